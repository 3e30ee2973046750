"""Box-window helpers shared by the windowed confidence measures.

All window operations use square odd windows centered on the pixel with
border replication (coordinates clamped to the image), so every pixel sees
a full window of window**2 samples.
"""

from __future__ import annotations

import numpy as np


def check_window(window: int) -> int:
    window = int(window)
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1, got %d" % window)
    return window


def box_sum(values: np.ndarray, window: int) -> np.ndarray:
    """Windowed sum with replicated borders, float64 result."""
    window = check_window(window)
    if window == 1:
        return values.astype(np.float64, copy=True)
    r = window // 2
    padded = np.pad(values.astype(np.float64), r, mode="edge")
    return _integral_box(padded, values.shape, window)


def box_sum_int(values: np.ndarray, window: int) -> np.ndarray:
    """Exact integer windowed sum (for histogram counts)."""
    window = check_window(window)
    if window == 1:
        return values.astype(np.int64, copy=True)
    r = window // 2
    padded = np.pad(values.astype(np.int64), r, mode="edge")
    return _integral_box(padded, values.shape, window)


def _integral_box(padded: np.ndarray, out_shape, window: int):
    h, w = out_shape
    s = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=padded.dtype)
    s[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    return (s[window:window + h, window:window + w]
            - s[0:h, window:window + w]
            - s[window:window + h, 0:w]
            + s[0:h, 0:w])


def box_mean(values: np.ndarray, window: int) -> np.ndarray:
    window = check_window(window)
    return box_sum(values, window) / float(window * window)


def window_offsets(window: int):
    """Iterate (dy, dx) over the window in raster order."""
    r = check_window(window) // 2
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            yield dy, dx


def clamped_shift(arr: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """View of arr sampled at (y + dy, x + dx) with clamped coordinates."""
    h, w = arr.shape[:2]
    ys = np.clip(np.arange(h) + dy, 0, h - 1)
    xs = np.clip(np.arange(w) + dx, 0, w - 1)
    return arr[np.ix_(ys, xs)]
