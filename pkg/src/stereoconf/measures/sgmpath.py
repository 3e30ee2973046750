"""Measures specific to scanline-aggregated pipelines."""

from __future__ import annotations

import numpy as np

from ..curve import curve_stats
from .inputs import MeasureInputs, MeasureParams


def scs(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Number of scanline paths whose own winner agrees with the final one."""
    inputs.require("scanlines")
    final = inputs.disparity
    agree = np.zeros(final.shape, dtype=np.float64)
    for wta in inputs.scanlines.path_wta.values():
        agree += (wta == final)
    return agree


def ps(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Relative margin of the aggregated curve, damped by how far apart its
    two minima sit and by the disagreement with the pre-aggregation winner.

    The aggregated quantities come from the current (scanline) volume; the
    raw winner comes from the volume fed into the aggregation.
    """
    inputs.require("pre_disparity")
    s = inputs.stats
    gamma = params.gamma_ps
    margin = (s.c_d2 - s.c_d1) / np.maximum(s.c_d1, params.epsilon)
    sep = np.abs(s.d2.astype(np.float64) - s.d1.astype(np.float64))
    damp_sep = 1.0 - np.minimum(sep, gamma) / gamma
    gap = np.abs(s.d1.astype(np.float64)
                 - inputs.pre_disparity.astype(np.float64))
    damp_gap = 1.0 - np.minimum(gap, gamma) / gamma
    return margin * damp_sep * damp_gap
