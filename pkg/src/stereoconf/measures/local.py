"""Measures reading only the minimum and its immediate competitors.

Notation: c_d1 is the minimum cost, c_d2 the second global minimum
(excluding the winner index), c_d2m the second local minimum (falling back
to c_d2 on single-minimum curves).
"""

from __future__ import annotations

import numpy as np

from ..curve import neighbor_costs
from .inputs import MeasureInputs, MeasureParams


def msm(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Negated minimum cost."""
    return -inputs.stats.c_d1


def mm(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Margin c_d2m - c_d1."""
    return inputs.stats.c_d2m - inputs.stats.c_d1


def mmn(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Naive margin c_d2 - c_d1."""
    return inputs.stats.c_d2 - inputs.stats.c_d1


def nlm(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """exp of the margin scaled by 2*sigma**2."""
    s = 2.0 * params.sigma_nlm ** 2
    return np.exp((inputs.stats.c_d2m - inputs.stats.c_d1) / s)


def nlmn(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    s = 2.0 * params.sigma_nlm ** 2
    return np.exp((inputs.stats.c_d2 - inputs.stats.c_d1) / s)


def cur(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Curvature of the curve around the minimum: -2*c_d1 + c_(d1-1) + c_(d1+1),
    with neighbor indices clamped at the curve ends."""
    c_lo, c_hi = neighbor_costs(inputs.costs64, inputs.stats.d1)
    return -2.0 * inputs.stats.c_d1 + c_lo + c_hi


def lc(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Larger neighbor margin (max of the two neighbors minus the minimum)
    scaled by gamma."""
    c_lo, c_hi = neighbor_costs(inputs.costs64, inputs.stats.d1)
    return (np.maximum(c_lo, c_hi) - inputs.stats.c_d1) / params.gamma_lc


def pkr(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Peak ratio c_d2m / c_d1."""
    return inputs.stats.c_d2m / np.maximum(inputs.stats.c_d1, params.epsilon)


def pkrn(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Naive peak ratio c_d2 / c_d1."""
    return inputs.stats.c_d2 / np.maximum(inputs.stats.c_d1, params.epsilon)


def dam(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Distance |d1 - d2| between the two lowest hypotheses."""
    return np.abs(inputs.stats.d1.astype(np.float64)
                  - inputs.stats.d2.astype(np.float64))
