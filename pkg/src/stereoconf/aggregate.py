"""Cost aggregation: cross-based support regions and 4-path scanline optimization.

Cross-based aggregation (CBCA) averages costs over an adaptive support
region built from intensity-guided cross arms in both images.  Scanline
aggregation (SGM) runs the classic recurrence

    L(p, d) = C(p, d) + min(L(q, d),
                            L(q, d - 1) + P1,
                            L(q, d + 1) + P1,
                            min_o L(q, o) + P2) - min_k L(q, k)

along the four axis-aligned paths and sums the per-path volumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .costvol import CostVolume
from .dataio import GrayImage


# ---------------------------------------------------------------------------
# cross arms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossArms:
    """Per-pixel arm lengths (pixels beyond the anchor, >= 0) per direction."""

    left: np.ndarray
    right: np.ndarray
    up: np.ndarray
    down: np.ndarray
    max_arm: int
    tau_color: float


def build_cross(image, max_arm: int = 17, tau_color: float = 20.0) -> CrossArms:
    """Grow arms while the neighbor stays within tau_color of the anchor
    intensity and the distance stays strictly below max_arm (arms truncate
    at the image border)."""
    px = image.pixels if isinstance(image, GrayImage) else np.asarray(image)
    base = px.astype(np.int16)
    h, w = base.shape

    def grow(dy, dx):
        arm = np.zeros((h, w), dtype=np.int32)
        alive = np.ones((h, w), dtype=bool)
        for dist in range(1, max_arm):
            ys = np.arange(h) + dy * dist
            xs = np.arange(w) + dx * dist
            in_y = (ys >= 0) & (ys < h)
            in_x = (xs >= 0) & (xs < w)
            neighbor = base[np.ix_(np.clip(ys, 0, h - 1), np.clip(xs, 0, w - 1))]
            ok = (np.abs(neighbor - base) < tau_color) \
                & in_y[:, None] & in_x[None, :]
            alive &= ok
            arm += alive
            if not alive.any():
                break
        return arm

    return CrossArms(
        left=grow(0, -1), right=grow(0, 1), up=grow(-1, 0), down=grow(1, 0),
        max_arm=max_arm, tau_color=tau_color,
    )


# ---------------------------------------------------------------------------
# cross-based aggregation
# ---------------------------------------------------------------------------

def cbca_aggregate(volume: CostVolume, left_arms: CrossArms,
                   right_arms: CrossArms, iterations: int = 2) -> CostVolume:
    """Average costs over the joint left/right cross support.

    For hypothesis d the support arms at p are the elementwise minimum of
    the left-image arms at p and the right-image arms at (x - d, y); the
    support region is the usual horizontal-then-vertical union over those
    arms.  Aggregation replaces each cost by the mean over its support and
    is repeated `iterations` times on the same supports.
    """
    costs = volume.costs
    h, w, nd = costs.shape
    out = np.empty_like(costs)
    cols = np.arange(w)
    ones = np.ones((h, w), dtype=np.float64)
    for d in range(nd):
        src = np.clip(cols - d, 0, w - 1)
        al = np.minimum(left_arms.left[:, :], right_arms.left[:, src])
        ar = np.minimum(left_arms.right[:, :], right_arms.right[:, src])
        au = np.minimum(left_arms.up[:, :], right_arms.up[:, src])
        ad = np.minimum(left_arms.down[:, :], right_arms.down[:, src])
        counts = _two_pass_sum(ones, al, ar, au, ad)
        cur = costs[:, :, d].astype(np.float64)
        for _ in range(iterations):
            cur = _two_pass_sum(cur, al, ar, au, ad) / counts
        out[:, :, d] = cur
    # means of [0, 1] costs stay in [0, 1]; clip guards rounding drift only
    np.clip(out, 0.0, 1.0, out=out)
    return CostVolume(out)


def _two_pass_sum(values, al, ar, au, ad):
    """Horizontal arm sums per pixel, then vertical arm sums of those."""
    h, w = values.shape
    cols = np.arange(w)[None, :]
    rows = np.arange(h)[:, None]
    cs = np.zeros((h, w + 1), dtype=np.float64)
    np.cumsum(values, axis=1, out=cs[:, 1:])
    hsum = np.take_along_axis(cs, cols + ar + 1, axis=1) \
        - np.take_along_axis(cs, cols - al, axis=1)
    cs_v = np.zeros((h + 1, w), dtype=np.float64)
    np.cumsum(hsum, axis=0, out=cs_v[1:, :])
    return np.take_along_axis(cs_v, rows + ad + 1, axis=0) \
        - np.take_along_axis(cs_v, rows - au, axis=0)


# ---------------------------------------------------------------------------
# scanline aggregation
# ---------------------------------------------------------------------------

SCANLINE_ORDER = ("lr", "rl", "tb", "bt")


@dataclass(frozen=True)
class ScanlineResult:
    """Per-path aggregated volumes plus their sum.

    Path keys follow SCANLINE_ORDER: "lr" sweeps left-to-right, "rl"
    right-to-left, "tb" top-to-bottom, "bt" bottom-to-top.
    """

    per_path: dict          # name -> (H, W, D) float32
    summed: np.ndarray      # (H, W, D) float32, elementwise sum of paths
    path_wta: dict = field(repr=False, default_factory=dict)
    p1: float = 0.0
    p2: float = 0.0

    @property
    def num_paths(self) -> int:
        return len(self.per_path)

    def normalized_volume(self) -> CostVolume:
        """Summed volume scaled into [0, 1] (argmin is scale invariant)."""
        scale = self.num_paths * (1.0 + self.p2)
        return CostVolume((self.summed / scale).astype(np.float32))

    def normalized_path(self, name: str) -> np.ndarray:
        return self.per_path[name] / np.float32(1.0 + self.p2)


def _sweep_lr(costs: np.ndarray, p1: float, p2: float) -> np.ndarray:
    """Scanline recurrence along increasing x for every row at once."""
    h, w, nd = costs.shape
    agg = np.empty_like(costs)
    agg[:, 0, :] = costs[:, 0, :]
    inf = np.float32(np.inf)
    p1 = np.float32(p1)
    p2 = np.float32(p2)
    for x in range(1, w):
        prev = agg[:, x - 1, :]
        m = prev.min(axis=1, keepdims=True)
        cand = prev.copy()
        cand[:, 1:] = np.minimum(cand[:, 1:], prev[:, :-1] + p1)
        cand[:, :-1] = np.minimum(cand[:, :-1], prev[:, 1:] + p1)
        np.minimum(cand, m + p2, out=cand)
        # add the increment, not (costs + cand) - m: keeps the zero-penalty
        # case bit-exact (cand == m there, so the increment is exactly 0)
        agg[:, x, :] = costs[:, x, :] + (cand - m)
    return agg


def sgm_aggregate(volume: CostVolume, p1: float = 0.03, p2: float = 0.12,
                  directions=SCANLINE_ORDER) -> ScanlineResult:
    """Run the scanline recurrence along the requested paths and sum them."""
    costs = volume.costs
    per_path = {}
    for name in directions:
        if name == "lr":
            agg = _sweep_lr(costs, p1, p2)
        elif name == "rl":
            agg = _sweep_lr(costs[:, ::-1, :], p1, p2)[:, ::-1, :]
        elif name == "tb":
            agg = _sweep_lr(costs.transpose(1, 0, 2), p1, p2).transpose(1, 0, 2)
        elif name == "bt":
            agg = _sweep_lr(costs.transpose(1, 0, 2)[:, ::-1, :], p1, p2)
            agg = agg[:, ::-1, :].transpose(1, 0, 2)
        else:
            raise ValueError("unknown scanline direction: %r" % name)
        per_path[name] = np.ascontiguousarray(agg)
    summed = np.zeros_like(costs)
    for agg in per_path.values():
        summed += agg
    path_wta = {name: np.argmin(agg, axis=-1).astype(np.int32)
                for name, agg in per_path.items()}
    return ScanlineResult(per_path=per_path, summed=summed,
                          path_wta=path_wta, p1=p1, p2=p2)
