"""Windowed variants of the peak measures plus the ray energy.

The window indices (d1, d2m, d2) always come from the center pixel p while
the costs are read from the neighbor curves; windows clamp coordinates at
the image border.
"""

from __future__ import annotations

import numpy as np

from ..curve import local_minima_mask
from ..windows import check_window, clamped_shift, window_offsets
from .inputs import MeasureInputs, MeasureParams


def _window_ratio_sum(inputs: MeasureInputs, params: MeasureParams,
                      window: int, numer_idx: np.ndarray,
                      weights_from_image: bool = False) -> np.ndarray:
    """sum over q in N(p) of c_numer(p)(q) / c_d1(p)(q), optionally gated by
    an intensity weight."""
    check_window(window)
    costs = inputs.costs64
    d1 = inputs.stats.d1
    eps = params.epsilon
    h, w = d1.shape
    out = np.zeros((h, w), dtype=np.float64)
    if weights_from_image:
        inputs.require("left_image")
        anchor = inputs.left_image.astype_float()
        if params.wpkr_cross_image:
            inputs.require("right_image")
            other = inputs.right_image.astype_float()
        else:
            other = anchor
    for dy, dx in window_offsets(window):
        ys = np.clip(np.arange(h) + dy, 0, h - 1)
        xs = np.clip(np.arange(w) + dx, 0, w - 1)
        shifted = costs[np.ix_(ys, xs)]
        numer = np.take_along_axis(shifted, numer_idx[..., None], axis=-1)[..., 0]
        denom = np.take_along_axis(shifted, d1[..., None], axis=-1)[..., 0]
        ratio = numer / np.maximum(denom, eps)
        if weights_from_image:
            gate = np.abs(anchor - other[np.ix_(ys, xs)]) < params.w_wpkr
            ratio = np.where(gate, ratio, 0.0)
        out += ratio
    return out


def apkr(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Windowed peak ratio (second local minimum index)."""
    return _window_ratio_sum(inputs, params, window, inputs.stats.d2m)


def apkrn(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Windowed naive peak ratio (second global minimum index)."""
    return _window_ratio_sum(inputs, params, window, inputs.stats.d2)


def wpkr(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Windowed peak ratio gated by an intensity similarity weight."""
    return _window_ratio_sum(inputs, params, window, inputs.stats.d2m,
                             weights_from_image=True)


def wpkrn(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    return _window_ratio_sum(inputs, params, window, inputs.stats.d2,
                             weights_from_image=True)


def lmn(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Count of neighbors whose curve has a local minimum at the center's d1."""
    check_window(window)
    minima = local_minima_mask(inputs.costs64)
    d1 = inputs.stats.d1
    h, w = d1.shape
    out = np.zeros((h, w), dtype=np.float64)
    for dy, dx in window_offsets(window):
        ys = np.clip(np.arange(h) + dy, 0, h - 1)
        xs = np.clip(np.arange(w) + dx, 0, w - 1)
        shifted = minima[np.ix_(ys, xs)]
        out += np.take_along_axis(shifted, d1[..., None], axis=-1)[..., 0]
    return out


def sge(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Ray energy: along the four axis rays (length = window radius,
    truncated at the border) sum each ray pixel's minimum cost plus a
    penalty per consecutive ray pair, P1 for a one-level disparity gap and
    P2 for larger gaps."""
    check_window(window)
    radius = window // 2
    c_d1 = inputs.stats.c_d1
    d1 = inputs.stats.d1.astype(np.int64)
    h, w = d1.shape
    out = np.zeros((h, w), dtype=np.float64)
    for dy, dx in ((0, -1), (0, 1), (-1, 0), (1, 0)):
        prev_d = None
        prev_valid = None
        for k in range(1, radius + 1):
            ys = np.arange(h) + dy * k
            xs = np.arange(w) + dx * k
            valid = ((ys >= 0) & (ys < h))[:, None] & ((xs >= 0) & (xs < w))[None, :]
            ys = np.clip(ys, 0, h - 1)
            xs = np.clip(xs, 0, w - 1)
            cost_q = c_d1[np.ix_(ys, xs)]
            d_q = d1[np.ix_(ys, xs)]
            out += np.where(valid, cost_q, 0.0)
            if prev_d is not None:
                both = valid & prev_valid
                gap = np.abs(d_q - prev_d)
                penalty = np.where(gap == 1, params.p1,
                                   np.where(gap > 1, params.p2, 0.0))
                out += np.where(both, penalty, 0.0)
            prev_d = d_q
            prev_valid = valid
    return out
