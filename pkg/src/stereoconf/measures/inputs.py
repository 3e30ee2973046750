"""Shared inputs and hyper-parameters for the confidence measures."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..aggregate import ScanlineResult
from ..costvol import CostVolume, SelfCostVolume, build_self_volume, derive_right_volume
from ..curve import CurveStats, curve_stats, wta_disparity
from ..dataio import GrayImage


@dataclass(frozen=True)
class MeasureParams:
    """Hyper-parameters of the parametric measures."""

    sigma_nlm: float = 0.5      # gaussian width of the non-linear margins
    sigma_mlm: float = 0.15     # softmin temperature (costs divided by 2*sigma)
    s_per: float = 0.1          # width of the curve-deviation kernel
    gamma_lc: float = 0.5       # curvature margin normalizer
    gamma_ps: float = 4.0       # disparity agreement span of the path measure
    w_wpkr: float = 10.0        # intensity gate of the weighted peak ratio
    wpkr_cross_image: bool = False  # gate against the right image instead
    window: int = 5             # default window for windowed measures
    p1: float = 0.03            # small-jump penalty (ray energy)
    p2: float = 0.12            # large-jump penalty (ray energy)
    edge_threshold_disp: float = 2.0   # disparity gradient edge threshold
    edge_threshold_int: float = 20.0   # intensity gradient edge threshold
    epsilon: float = 1e-6       # division guard

    def with_window(self, window: int) -> "MeasureParams":
        return replace(self, window=int(window))


@dataclass
class MeasureInputs:
    """Everything a measure may read.

    `volume` is the cost volume the curves come from (post aggregation for
    a given pipeline); `stats` are its curve statistics and `disparity` its
    winner-take-all map.  The remaining fields are optional and only needed
    by specific families (left-right, self-matching, scanline based).
    """

    volume: CostVolume
    stats: CurveStats
    disparity: np.ndarray
    left_image: GrayImage | None = None
    right_image: GrayImage | None = None
    right_volume: CostVolume | None = None
    right_disparity: np.ndarray | None = None
    left_self: SelfCostVolume | None = None
    right_self: SelfCostVolume | None = None
    scanlines: ScanlineResult | None = None
    pre_volume: CostVolume | None = None
    pre_disparity: np.ndarray | None = None
    _costs64: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple:
        return self.volume.costs.shape[:2]

    @property
    def costs64(self) -> np.ndarray:
        if self._costs64 is None:
            self._costs64 = self.volume.costs.astype(np.float64)
        return self._costs64

    def require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise ValueError("measure requires input %r which was not provided"
                                 % name)


def prepare_inputs(volume: CostVolume,
                   left_image: GrayImage | None = None,
                   right_image: GrayImage | None = None,
                   scanlines: ScanlineResult | None = None,
                   pre_volume: CostVolume | None = None,
                   census_window: int = 9,
                   with_self_volumes: bool = True,
                   tie_seed: int | None = None) -> MeasureInputs:
    """Fill a MeasureInputs from a volume and (optionally) the image pair.

    The right volume is derived from the left one, self-matching volumes
    are built from the images when available, and the pre-aggregation
    disparity comes from `pre_volume` when given.  tie_seed switches the
    winner-take-all tie-break to a seeded random pick.
    """
    if tie_seed is None:
        disparity = wta_disparity(volume)
        stats = curve_stats(volume)
    else:
        disparity = wta_disparity(volume, np.random.default_rng(tie_seed))
        stats = curve_stats(volume, d1=disparity)
    right_volume = derive_right_volume(volume)
    right_disparity = wta_disparity(right_volume)
    left_self = right_self = None
    if with_self_volumes and left_image is not None:
        left_self = build_self_volume(left_image, volume.d_max, census_window)
    if with_self_volumes and right_image is not None:
        right_self = build_self_volume(right_image, volume.d_max, census_window)
    pre_disparity = wta_disparity(pre_volume) if pre_volume is not None else None
    return MeasureInputs(
        volume=volume, stats=stats, disparity=disparity,
        left_image=left_image, right_image=right_image,
        right_volume=right_volume, right_disparity=right_disparity,
        left_self=left_self, right_self=right_self,
        scanlines=scanlines, pre_volume=pre_volume, pre_disparity=pre_disparity,
    )
