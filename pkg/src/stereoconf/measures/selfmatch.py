"""Measures built on self-matching volumes (image matched against itself
over signed horizontal offsets; the offset-0 slice is identically zero and
is excluded from the distinctiveness minimum)."""

from __future__ import annotations

import numpy as np

from ..costvol import SelfCostVolume
from .inputs import MeasureInputs, MeasureParams


def _distinctiveness(self_volume: SelfCostVolume) -> np.ndarray:
    costs = self_volume.costs.astype(np.float64)
    center = self_volume.d_max
    masked = costs.copy()
    masked[:, :, center] = np.inf
    return masked.min(axis=-1)


def dts(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Distinctiveness: smallest nonzero-offset self-matching cost."""
    inputs.require("left_self")
    return _distinctiveness(inputs.left_self)


def dsm(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Distinctive similarity: product of the left distinctiveness at p and
    the right distinctiveness at its anchor, over the squared minimum cost."""
    inputs.require("left_self", "right_self")
    h, w = inputs.shape
    rows = np.arange(h)[:, None]
    anchor = np.clip(np.arange(w)[None, :] - inputs.disparity, 0, w - 1)
    d_l = _distinctiveness(inputs.left_self)
    d_r = _distinctiveness(inputs.right_self)[rows, anchor]
    c1 = inputs.stats.c_d1
    return d_l * d_r / np.maximum(c1 * c1, params.epsilon)


def samm(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Correlation between the matching curve and the self-matching curve.

    The matching curve is shifted by the winning disparity: pair
    (c_k, c_self_(k + d1)) for k = 0 .. d_max - d1, correlate over the
    defined overlap, and return 0 where either side has no variance.
    """
    inputs.require("left_self")
    costs = inputs.costs64
    h, w, nd = costs.shape
    d1 = inputs.stats.d1.astype(np.int64)
    self_costs = inputs.left_self.costs.astype(np.float64)
    center = inputs.left_self.d_max

    k = np.arange(nd, dtype=np.int64)
    valid = k[None, None, :] <= (nd - 1 - d1)[..., None]
    idx = np.clip(k[None, None, :] + d1[..., None] + center, 0,
                  self_costs.shape[-1] - 1)
    b = np.take_along_axis(self_costs, idx, axis=-1)
    a = np.where(valid, costs, 0.0)
    b = np.where(valid, b, 0.0)

    m = valid.sum(axis=-1).astype(np.float64)
    mu_a = a.sum(axis=-1) / m
    mu_b = b.sum(axis=-1) / m
    da = np.where(valid, a - mu_a[..., None], 0.0)
    db = np.where(valid, b - mu_b[..., None], 0.0)
    cov = (da * db).sum(axis=-1)
    var_a = (da * da).sum(axis=-1)
    var_b = (db * db).sum(axis=-1)
    denom = np.sqrt(var_a * var_b)
    return np.where(denom > 1e-12, cov / np.maximum(denom, 1e-300), 0.0)
