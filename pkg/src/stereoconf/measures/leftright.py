"""Measures comparing the left view against the right one.

The right-view anchor of left pixel (x, y) at its winning disparity is
p_r = (x - d1(x, y), y), clamped to the image.  Collision measures look at
all pixels of a row mapping to the same right column.
"""

from __future__ import annotations

import numpy as np

from ..windows import box_mean, check_window, window_offsets
from .inputs import MeasureInputs, MeasureParams


def _right_anchor_cols(inputs: MeasureInputs) -> np.ndarray:
    h, w = inputs.disparity.shape
    cols = np.arange(w)[None, :]
    return np.clip(cols - inputs.disparity, 0, w - 1)


def lrc(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Left-right consistency: negated disparity gap against the right map."""
    inputs.require("right_disparity")
    rows = np.arange(inputs.disparity.shape[0])[:, None]
    d_right = inputs.right_disparity[rows, _right_anchor_cols(inputs)]
    return -np.abs(inputs.disparity.astype(np.float64) - d_right.astype(np.float64))


def lrd(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Left-right difference: naive margin over the cost gap between the
    left minimum and the right view's minimum at the anchor."""
    inputs.require("right_volume")
    s = inputs.stats
    rows = np.arange(inputs.disparity.shape[0])[:, None]
    right_min = inputs.right_volume.costs.astype(np.float64).min(axis=-1)
    right_min_at = right_min[rows, _right_anchor_cols(inputs)]
    gap = np.abs(s.c_d1 - right_min_at)
    return (s.c_d2 - s.c_d1) / np.maximum(gap, params.epsilon)


def zsad(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Zero-mean absolute difference between the window around p and the
    window around its right anchor, both corrected by their window means."""
    check_window(window)
    inputs.require("left_image", "right_image")
    left = inputs.left_image.astype_float()
    right = inputs.right_image.astype_float()
    h, w = left.shape
    mu_l = box_mean(left, window)
    mu_r_full = box_mean(right, window)
    rows = np.arange(h)[:, None]
    anchor_cols = _right_anchor_cols(inputs)
    mu_r = mu_r_full[rows, anchor_cols]
    disparity = inputs.disparity
    out = np.zeros((h, w), dtype=np.float64)
    base_cols = np.arange(w)[None, :]
    # both views shift with the same window offset, the right view is
    # additionally shifted by the center disparity
    for dy, dx in window_offsets(window):
        ys = np.clip(rows + dy, 0, h - 1)
        xs_l = np.clip(base_cols + dx, 0, w - 1)
        xs_r = np.clip(base_cols + dx - disparity, 0, w - 1)
        term = left[ys, xs_l] - mu_l - right[ys, xs_r] + mu_r
        out += np.abs(term)
    return out


def _collision_tables(inputs: MeasureInputs):
    """Per-pixel collision count, best (minimum) cost and largest disparity
    among all same-row pixels sharing the same right-view target column."""
    d1 = inputs.disparity.astype(np.int64)
    c_d1 = inputs.stats.c_d1
    h, w = d1.shape
    d_max = inputs.volume.d_max
    span = w + d_max
    cols = np.arange(w)[None, :]
    target = cols - d1 + d_max  # shifted to be nonnegative
    ids = (np.arange(h)[:, None] * span + target).ravel()
    n_bins = h * span
    counts = np.bincount(ids, minlength=n_bins)
    min_cost = np.full(n_bins, np.inf)
    np.minimum.at(min_cost, ids, c_d1.ravel())
    max_disp = np.full(n_bins, -1, dtype=np.int64)
    np.maximum.at(max_disp, ids, d1.ravel())
    shape = d1.shape
    return (counts[ids].reshape(shape),
            min_cost[ids].reshape(shape),
            max_disp[ids].reshape(shape))


def acc(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Asymmetric uniqueness: a collided pixel keeps confidence 1 only when
    it has both the largest disparity and the smallest cost of its group."""
    counts, min_cost, max_disp = _collision_tables(inputs)
    d1 = inputs.disparity.astype(np.int64)
    lose = (counts > 1) & ((d1 != max_disp) | (inputs.stats.c_d1 != min_cost))
    return np.where(lose, 0.0, 1.0)


def uc(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Uniqueness: 0 for collided pixels that do not hold the group's
    minimum cost, 1 otherwise."""
    counts, min_cost, _ = _collision_tables(inputs)
    lose = (counts > 1) & (inputs.stats.c_d1 != min_cost)
    return np.where(lose, 0.0, 1.0)


def ucc(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Uniqueness with cost: winners score their negated minimum cost,
    losers score 0 (as written; see ucc_oriented for ranking use)."""
    counts, min_cost, _ = _collision_tables(inputs)
    lose = (counts > 1) & (inputs.stats.c_d1 != min_cost)
    return np.where(lose, 0.0, -inputs.stats.c_d1)


def ucc_oriented(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Ranking variant of ucc: losers drop below every winner score
    (winners lie in [-1, 0] for normalized volumes, losers get -2)."""
    counts, min_cost, _ = _collision_tables(inputs)
    lose = (counts > 1) & (inputs.stats.c_d1 != min_cost)
    return np.where(lose, -2.0, -inputs.stats.c_d1)


def uco(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Negated number of other pixels colliding with p (0 when unique)."""
    counts, _, _ = _collision_tables(inputs)
    return -(counts.astype(np.float64) - 1.0)
