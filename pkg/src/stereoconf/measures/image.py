"""Measures depending only on the reference image geometry or texture."""

from __future__ import annotations

import numpy as np

from ..windows import box_mean
from .dispmap import distance_to_mask
from .inputs import MeasureInputs, MeasureParams


def db(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Distance from the image border: min(x, y, W - x, H - y)."""
    h, w = inputs.shape
    xs = np.arange(w, dtype=np.float64)[None, :]
    ys = np.arange(h, dtype=np.float64)[:, None]
    return np.minimum(np.minimum(xs, ys), np.minimum(w - xs, h - ys))


def dlb(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Distance from the left border capped at d_max: min(x, d_max)."""
    h, w = inputs.shape
    xs = np.minimum(np.arange(w, dtype=np.float64), float(inputs.volume.d_max))
    return np.broadcast_to(xs[None, :], (h, w)).copy()


def hgm(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Horizontal intensity gradient magnitude of the reference image."""
    inputs.require("left_image")
    gx = np.gradient(inputs.left_image.astype_float(), axis=1)
    return np.abs(gx)


def dte(inputs: MeasureInputs, params: MeasureParams) -> np.ndarray:
    """Distance to the nearest intensity edge of the reference image."""
    inputs.require("left_image")
    gy, gx = np.gradient(inputs.left_image.astype_float())
    mag = np.hypot(gx, gy)
    return distance_to_mask(mag > params.edge_threshold_int)


def ivar(inputs: MeasureInputs, params: MeasureParams, window: int) -> np.ndarray:
    """Window variance of the reference intensities (texture indicator)."""
    inputs.require("left_image")
    l = inputs.left_image.astype_float()
    mean = box_mean(l, window)
    mean_sq = box_mean(l * l, window)
    return np.maximum(mean_sq - mean * mean, 0.0)
