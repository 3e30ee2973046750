"""Measures integrating the entire cost curve."""

from __future__ import annotations

import numpy as np

from .inputs import MeasureInputs, MeasureParams


def per(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Deviation from an ideal curve: sum over i != d1 of
    exp(-(c_d1 - c_i)**2 / s**2).  Flat curves score high (ambiguous)."""
    costs = inputs.costs64
    diff = inputs.stats.c_d1[..., None] - costs
    total = np.exp(-(diff * diff) / (params.s_per ** 2)).sum(axis=-1)
    return total - 1.0  # remove the i == d1 term (always exp(0))


def mlm(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Softmin probability of the winner, costs tempered by 2*sigma."""
    scaled = np.exp(-inputs.costs64 / (2.0 * params.sigma_mlm))
    return np.take_along_axis(
        scaled, inputs.stats.d1[..., None].astype(np.int64), axis=-1
    )[..., 0] / scaled.sum(axis=-1)


def alm(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Softmin normalizer alone: 1 / sum_i exp(-c_i / (2*sigma))."""
    scaled = np.exp(-inputs.costs64 / (2.0 * params.sigma_mlm))
    return 1.0 / scaled.sum(axis=-1)


def nem(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Negative entropy term of the winner: p * log(p) with
    p = exp(-c_d1) / sum_i exp(-c_i)."""
    p = np.exp(-inputs.stats.c_d1) / inputs.stats.sum_exp_neg
    return p * np.log(p)


def noi(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Number of local minima of the curve."""
    return inputs.stats.n_local_minima.astype(np.float64)


def wmn(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Margin normalized by the curve sum."""
    s = inputs.stats
    return (s.c_d2m - s.c_d1) / np.maximum(s.sum_costs, params.epsilon)


def wmnn(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    s = inputs.stats
    return (s.c_d2 - s.c_d1) / np.maximum(s.sum_costs, params.epsilon)


def pwcfa(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Inverse sum of competing-minimum terms: hypotheses away from the
    winner contribute a capped squared index weight over a floored cost
    margin (the floor keeps the denominator at least 1)."""
    costs = inputs.costs64
    nd = costs.shape[-1]
    s = inputs.stats
    idx = np.arange(nd, dtype=np.float64)
    dist = np.abs(idx[None, None, :] - s.d1[..., None].astype(np.float64))
    numer = np.maximum(np.minimum(dist - 1.0, 1.0 / 3.0), 0.0) ** 2
    span = max(nd - 1, 1)
    floor_term = costs - s.c_d1[..., None] - (s.sum_costs / (3.0 * span))[..., None]
    denom = np.maximum(floor_term, 1.0)
    total = (numer / denom).sum(axis=-1)
    return 1.0 / np.maximum(total, params.epsilon)
