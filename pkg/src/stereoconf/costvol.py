"""Census transform and matching cost volumes.

Costs are Hamming distances between census descriptors, normalized by the
window area so every cost lies in [0, 1].  Disparity hypothesis i at left
pixel (x, y) compares against right pixel (x - i, y); out-of-image columns
are clamped (border replication).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .dataio import GrayImage

STCVOL_MAGIC = b"STCVOL01"


@dataclass(frozen=True)
class CensusImage:
    """Per-pixel census descriptors packed into uint64 words.

    Bit j of a descriptor (raster order within the window) is 1 iff the
    j-th neighbor intensity is strictly lower than the center intensity,
    so the center bit is always 0.
    """

    words: np.ndarray  # (H, W, n_words) uint64
    window: int

    @property
    def n_bits(self) -> int:
        return self.window * self.window

    def unpack_bits(self) -> np.ndarray:
        """Expand descriptors to a (H, W, window**2) uint8 bit array."""
        h, w, n_words = self.words.shape
        bits = np.zeros((h, w, self.n_bits), dtype=np.uint8)
        for j in range(self.n_bits):
            word = self.words[:, :, j // 64]
            bits[:, :, j] = (word >> np.uint64(j % 64)) & np.uint64(1)
        return bits


@dataclass(frozen=True)
class CostVolume:
    """Left-anchored cost volume, costs[y, x, i] for hypotheses i in [0, d_max]."""

    costs: np.ndarray  # (H, W, d_max + 1) float32

    def __post_init__(self):
        if self.costs.ndim != 3:
            raise ValueError("cost volume must be 3-d (H, W, D)")

    @property
    def height(self) -> int:
        return self.costs.shape[0]

    @property
    def width(self) -> int:
        return self.costs.shape[1]

    @property
    def num_hypotheses(self) -> int:
        return self.costs.shape[2]

    @property
    def d_max(self) -> int:
        return self.costs.shape[2] - 1


@dataclass(frozen=True)
class SelfCostVolume:
    """Self-matching volume over signed horizontal offsets -d_max..d_max.

    costs[y, x, d_max + o] compares pixel (x, y) with (x - o, y) in the
    same image, so the offset-0 slice is exactly zero.
    """

    costs: np.ndarray  # (H, W, 2 * d_max + 1) float32

    @property
    def d_max(self) -> int:
        return (self.costs.shape[2] - 1) // 2

    def at_offset(self, offset: int) -> np.ndarray:
        return self.costs[:, :, offset + self.d_max]


def _as_pixels(image) -> np.ndarray:
    if isinstance(image, GrayImage):
        return image.pixels
    return np.asarray(image)


def census_transform(image, window: int = 9) -> CensusImage:
    """Census transform with replicated borders.

    Args:
        image: GrayImage or (H, W) uint8 array.
        window: odd window side >= 3 (default 9, i.e. 81 bit descriptors).
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("census window must be odd and >= 3")
    px = _as_pixels(image)
    h, w = px.shape
    r = window // 2
    padded = np.pad(px, r, mode="edge")
    center = px
    n_bits = window * window
    n_words = (n_bits + 63) // 64
    words = np.zeros((h, w, n_words), dtype=np.uint64)
    j = 0
    for dy in range(window):
        for dx in range(window):
            neighbor = padded[dy:dy + h, dx:dx + w]
            bit = (neighbor < center).astype(np.uint64)
            words[:, :, j // 64] |= bit << np.uint64(j % 64)
            j += 1
    return CensusImage(words, window)


def hamming_distance(a: CensusImage, b: CensusImage) -> np.ndarray:
    """Per-pixel Hamming distance between two descriptor images (same shape)."""
    if a.window != b.window:
        raise ValueError("census windows differ")
    return np.bitwise_count(a.words ^ b.words).sum(axis=-1, dtype=np.int64)


def build_cost_volume(left, right, d_max: int, window: int = 9) -> CostVolume:
    """Census/Hamming cost volume for a rectified pair.

    costs[y, x, i] = Hamming(census_left(x, y), census_right(x - i, y)) / window**2
    with the right column index clamped at 0.
    """
    left_px = _as_pixels(left)
    right_px = _as_pixels(right)
    if left_px.shape != right_px.shape:
        raise ValueError("left/right image shapes differ")
    h, w = left_px.shape
    if d_max < 1 or d_max >= w:
        raise ValueError("d_max must be in [1, width), got %d for width %d"
                         % (d_max, w))
    cen_l = census_transform(left_px, window).words
    cen_r = census_transform(right_px, window).words
    norm = np.float32(window * window)
    costs = np.empty((h, w, d_max + 1), dtype=np.float32)
    cols = np.arange(w)
    for i in range(d_max + 1):
        idx = np.clip(cols - i, 0, w - 1)
        ham = np.bitwise_count(cen_l ^ cen_r[:, idx]).sum(axis=-1, dtype=np.int64)
        costs[:, :, i] = ham.astype(np.float32) / norm
    return CostVolume(costs)


def derive_right_volume(volume: CostVolume) -> CostVolume:
    """Right-anchored volume from a left one: c_r[y, x, i] = c[y, x + i, i],
    clamping x + i at the last column."""
    h, w, d = volume.costs.shape
    out = np.empty_like(volume.costs)
    cols = np.arange(w)
    for i in range(d):
        idx = np.clip(cols + i, 0, w - 1)
        out[:, :, i] = volume.costs[:, idx, i]
    return CostVolume(out)


def build_self_volume(image, d_max: int, window: int = 9) -> SelfCostVolume:
    """Self-matching volume of an image against itself over signed offsets."""
    px = _as_pixels(image)
    h, w = px.shape
    if d_max < 1 or d_max >= w:
        raise ValueError("d_max must be in [1, width)")
    cen = census_transform(px, window).words
    norm = np.float32(window * window)
    costs = np.empty((h, w, 2 * d_max + 1), dtype=np.float32)
    cols = np.arange(w)
    for o in range(-d_max, d_max + 1):
        idx = np.clip(cols - o, 0, w - 1)
        ham = np.bitwise_count(cen ^ cen[:, idx]).sum(axis=-1, dtype=np.int64)
        costs[:, :, o + d_max] = ham.astype(np.float32) / norm
    return SelfCostVolume(costs)


# ---------------------------------------------------------------------------
# STCVOL container and external volume ingest
# ---------------------------------------------------------------------------

def write_stcvol(path, costs: np.ndarray) -> None:
    """Write a (H, W, D) float32 volume: 8 byte magic, three u32 dims (LE),
    then the raster in [y][x][d] order as little-endian float32."""
    costs = np.asarray(costs, dtype=np.float32)
    if costs.ndim != 3:
        raise ValueError("expected a (H, W, D) volume")
    h, w, d = costs.shape
    with open(path, "wb") as f:
        f.write(STCVOL_MAGIC)
        f.write(struct.pack("<III", h, w, d))
        f.write(np.ascontiguousarray(costs, dtype="<f4").tobytes())


def read_stcvol(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != STCVOL_MAGIC:
            raise ValueError("bad cost volume magic: %r" % magic)
        h, w, d = struct.unpack("<III", f.read(12))
        raw = f.read(h * w * d * 4)
        if len(raw) != h * w * d * 4 or f.read(1):
            raise ValueError("cost volume payload does not match header dims")
    return np.frombuffer(raw, dtype="<f4").reshape(h, w, d).astype(np.float32)


def ingest_cost_volume(source, mode: str = "costs") -> CostVolume:
    """Adapt an externally computed volume to the internal convention.

    Args:
        source: STCVOL path or (H, W, D) array.
        mode: "costs" keeps values (min-max normalizing the whole volume only
            if it leaves [0, 1]); "probabilities" negates first (so higher
            likelihood becomes lower cost), then always min-max normalizes.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        data = read_stcvol(source)
    else:
        data = np.asarray(source, dtype=np.float32)
        if data.ndim != 3:
            raise ValueError("expected a (H, W, D) volume")
    if not np.all(np.isfinite(data)):
        raise ValueError("external volume contains non-finite values")
    if mode == "probabilities":
        data = -data
        data = _minmax_rescale(data)
    elif mode == "costs":
        if data.min() < 0.0 or data.max() > 1.0:
            data = _minmax_rescale(data)
    else:
        raise ValueError("unknown ingest mode: %r" % mode)
    return CostVolume(np.ascontiguousarray(data, dtype=np.float32))


def _minmax_rescale(data: np.ndarray) -> np.ndarray:
    lo = float(data.min())
    hi = float(data.max())
    if hi - lo < 1e-12:
        return np.zeros_like(data)
    return (data - lo) / (hi - lo)
