"""Per-pixel cost curve statistics.

Everything downstream (confidence measures, features) works from the same
set of curve quantities: the minimum, the second global minimum, the second
local minimum, local-minima counts and a couple of whole-curve sums.

Tie-breaks always pick the lowest index.  A boundary index counts as a
local minimum when it is strictly below its single interior neighbor; an
interior index needs to be strictly below both neighbors.  When a curve has
no local minimum besides the winner, the second-local-minimum quantities
fall back to the second global minimum and the per-pixel flag records it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costvol import CostVolume

# A small cost curve whose second global minimum (index 1, cost 0.2) differs
# from its second local minimum (index 4, cost 0.25).  Handy for checking
# that full-curve statistics and their naive "second global minimum"
# counterparts really diverge: PKR reads 2.5 on it while PKRN reads 2.0.
DISTINGUISHING_CURVE = (0.5, 0.2, 0.1, 0.3, 0.25, 0.4)


def wta_disparity(volume, rng=None) -> np.ndarray:
    """Winner-take-all disparity map (argmin over hypotheses).

    Ties go to the lowest index; passing a numpy Generator instead picks
    uniformly among the tied minima (for tie-robustness experiments).
    """
    costs = volume.costs if isinstance(volume, CostVolume) else np.asarray(volume)
    if rng is None:
        return np.argmin(costs, axis=-1).astype(np.int32)
    is_min = costs == costs.min(axis=-1, keepdims=True)
    key = np.where(is_min, rng.random(costs.shape), -1.0)
    return np.argmax(key, axis=-1).astype(np.int32)


def local_minima_mask(costs: np.ndarray) -> np.ndarray:
    """Boolean mask of local minima along the hypothesis axis."""
    d = costs.shape[-1]
    mask = np.zeros(costs.shape, dtype=bool)
    if d == 1:
        # a single hypothesis is trivially the minimum of its curve
        mask[...] = True
        return mask
    mask[..., 0] = costs[..., 0] < costs[..., 1]
    mask[..., -1] = costs[..., -1] < costs[..., -2]
    if d > 2:
        interior = (costs[..., 1:-1] < costs[..., :-2]) & \
                   (costs[..., 1:-1] < costs[..., 2:])
        mask[..., 1:-1] = interior
    return mask


@dataclass(frozen=True)
class CurveStats:
    """Vectorized curve statistics for every pixel of a cost volume."""

    d1: np.ndarray              # argmin index
    c_d1: np.ndarray            # minimum cost
    d2: np.ndarray              # second global minimum index (i != d1)
    c_d2: np.ndarray            # its cost
    d2m: np.ndarray             # second local minimum index (fallback: d2)
    c_d2m: np.ndarray           # its cost (fallback: c_d2)
    has_d2m: np.ndarray         # False where the fallback was taken
    n_local_minima: np.ndarray  # local minima count over the curve
    sum_costs: np.ndarray       # sum_i c_i
    sum_exp_neg: np.ndarray     # sum_i exp(-c_i)
    num_hypotheses: int

    @property
    def d_max(self) -> int:
        return self.num_hypotheses - 1


def curve_stats(volume, d1=None) -> CurveStats:
    """Compute CurveStats for a CostVolume or raw (..., D) cost array.

    A precomputed winner map may be passed (e.g. with a shuffled tie-break);
    it must hold valid hypothesis indices.
    """
    costs = volume.costs if isinstance(volume, CostVolume) else np.asarray(volume)
    costs = costs.astype(np.float64, copy=False)
    d = costs.shape[-1]

    if d1 is None:
        d1 = np.argmin(costs, axis=-1)
    else:
        d1 = np.asarray(d1).astype(np.int64)
    c_d1 = np.take_along_axis(costs, d1[..., None], axis=-1)[..., 0]

    masked = costs.copy()
    np.put_along_axis(masked, d1[..., None], np.inf, axis=-1)
    if d == 1:
        # no second hypothesis exists; fall back to the winner itself
        d2 = d1.copy()
        c_d2 = c_d1.copy()
    else:
        d2 = np.argmin(masked, axis=-1)
        c_d2 = np.take_along_axis(masked, d2[..., None], axis=-1)[..., 0]

    minima = local_minima_mask(costs)
    n_local_minima = minima.sum(axis=-1).astype(np.int32)

    eligible = minima.copy()
    np.put_along_axis(eligible, d1[..., None], False, axis=-1)
    candidate = np.where(eligible, costs, np.inf)
    has_d2m = eligible.any(axis=-1)
    d2m = np.argmin(candidate, axis=-1)
    c_d2m = np.take_along_axis(candidate, d2m[..., None], axis=-1)[..., 0]
    d2m = np.where(has_d2m, d2m, d2)
    c_d2m = np.where(has_d2m, c_d2m, c_d2)

    return CurveStats(
        d1=d1.astype(np.int32),
        c_d1=c_d1,
        d2=d2.astype(np.int32),
        c_d2=c_d2,
        d2m=d2m.astype(np.int32),
        c_d2m=c_d2m,
        has_d2m=has_d2m,
        n_local_minima=n_local_minima,
        sum_costs=costs.sum(axis=-1),
        sum_exp_neg=np.exp(-costs).sum(axis=-1),
        num_hypotheses=d,
    )


def neighbor_costs(costs: np.ndarray, d1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Costs at d1 - 1 and d1 + 1 with the index clamped at the curve ends."""
    d = costs.shape[-1]
    lo = np.clip(d1 - 1, 0, d - 1)
    hi = np.clip(d1 + 1, 0, d - 1)
    c_lo = np.take_along_axis(costs, lo[..., None], axis=-1)[..., 0]
    c_hi = np.take_along_axis(costs, hi[..., None], axis=-1)[..., 0]
    return c_lo, c_hi
