"""Measures computed from the winner-take-all disparity map alone.

The histogram statistics (da, ds, med and the median deviation) share one
per-window disparity histogram, evaluated with integer box sums per level
so the counts are exact.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..windows import box_mean, box_sum_int, check_window
from .inputs import MeasureInputs, MeasureParams


def _gradient_magnitude(values: np.ndarray) -> np.ndarray:
    gy, gx = np.gradient(values.astype(np.float64))
    return np.hypot(gx, gy)


def distance_to_mask(mask: np.ndarray) -> np.ndarray:
    """Euclidean distance from each pixel to the nearest True pixel.

    With an empty mask every pixel gets the (finite) sentinel H + W.
    """
    if not mask.any():
        return np.full(mask.shape, float(mask.shape[0] + mask.shape[1]))
    return ndimage.distance_transform_edt(~mask)


def dtd(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Distance to the nearest disparity discontinuity (gradient magnitude
    above the disparity edge threshold)."""
    mag = _gradient_magnitude(inputs.disparity)
    return distance_to_mask(mag > params.edge_threshold_disp)


def dmv(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Local gradient magnitude of the disparity map."""
    return _gradient_magnitude(inputs.disparity)


def var(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Negated window variance of the disparity map."""
    d = inputs.disparity.astype(np.float64)
    mean = box_mean(d, window)
    mean_sq = box_mean(d * d, window)
    return -np.maximum(mean_sq - mean * mean, 0.0)


def skew(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Negated third central window moment of the disparity map."""
    d = inputs.disparity.astype(np.float64)
    m1 = box_mean(d, window)
    m2 = box_mean(d * d, window)
    m3 = box_mean(d * d * d, window)
    return -(m3 - 3.0 * m1 * m2 + 2.0 * m1 ** 3)


def mnd(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Negated deviation from the window mean disparity."""
    d = inputs.disparity.astype(np.float64)
    return -np.abs(d - box_mean(d, window))


def _histogram_stats(inputs: MeasureInputs, window: int):
    """Window disparity histogram quantities: count at the center disparity,
    number of distinct values, and the window median."""
    check_window(window)
    d1 = inputs.disparity
    h, w = d1.shape
    n = window * window
    k_med = (n + 1) // 2
    own_count = np.zeros((h, w), dtype=np.int64)
    distinct = np.zeros((h, w), dtype=np.int64)
    median = np.zeros((h, w), dtype=np.int64)
    found = np.zeros((h, w), dtype=bool)
    cum = np.zeros((h, w), dtype=np.int64)
    for level in range(inputs.volume.num_hypotheses):
        counts = box_sum_int((d1 == level).astype(np.int64), window)
        own_count[d1 == level] = counts[d1 == level]
        distinct += counts > 0
        cum += counts
        newly = (~found) & (cum >= k_med)
        median[newly] = level
        found |= newly
    return own_count, distinct, median, n


def da(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Histogram count of the center's disparity within its window."""
    own, _, _, _ = _histogram_stats(inputs, window)
    return own.astype(np.float64)


def ds(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Negated log share of distinct disparities within the window."""
    _, distinct, _, n = _histogram_stats(inputs, window)
    return -np.log(distinct.astype(np.float64) / float(n))


def med(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Window median disparity (feature channel, not a ranking measure)."""
    _, _, median, _ = _histogram_stats(inputs, window)
    return median.astype(np.float64)


def mdd(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Negated deviation from the window median disparity."""
    _, _, median, _ = _histogram_stats(inputs, window)
    return -np.abs(inputs.disparity.astype(np.float64) - median.astype(np.float64))
