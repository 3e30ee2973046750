"""Feature stack assembly and export.

Stacks bundle confidence measures (possibly at several window sizes and
image scales) into named channels for external classifier training.  The
multi-scale channels are computed on half/quarter resolution pipelines and
upsampled back to full resolution by nearest neighbor.

Window apex convention: apex i means a (3 + 2i) x (3 + 2i) window, so
apex 1 is 5x5 and apex 14 is 31x31.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .dataio import GrayImage
from .measures import MeasureParams, compute_measure

STFEAT_MAGIC = b"STFEAT01"

FULL, HALF, QUARTER = 1, 2, 4
_SCALE_SUFFIX = {FULL: "", HALF: "@half", QUARTER: "@quarter"}


# ---------------------------------------------------------------------------
# pyramids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PyramidLevel:
    left: GrayImage
    right: GrayImage
    d_max: int
    scale: int


def downsample2(image: GrayImage) -> GrayImage:
    """2x2 box-filter downsampling (dimensions floored to even first)."""
    px = image.pixels
    h2, w2 = px.shape[0] // 2, px.shape[1] // 2
    if h2 < 1 or w2 < 1:
        raise ValueError("image too small to downsample")
    block = px[:h2 * 2, :w2 * 2].astype(np.float64)
    mean = (block[0::2, 0::2] + block[0::2, 1::2]
            + block[1::2, 0::2] + block[1::2, 1::2]) / 4.0
    return GrayImage(np.rint(mean).astype(np.uint8))


def build_pyramid(left: GrayImage, right: GrayImage, d_max: int) -> list:
    """Full, half and quarter resolution levels with d_max scaled by the
    same factor (floored, at least 1)."""
    if left.height < 4 or left.width < 4:
        raise ValueError("image too small for a 3-level pyramid")
    levels = [PyramidLevel(left, right, d_max, FULL)]
    l, r = left, right
    for scale in (HALF, QUARTER):
        l, r = downsample2(l), downsample2(r)
        levels.append(PyramidLevel(l, r, max(d_max // scale, 1), scale))
    return levels


def upsample_nearest(values: np.ndarray, scale: int, shape) -> np.ndarray:
    """Nearest-neighbor upsampling by an integer factor, edge-padded to the
    exact full-resolution shape."""
    if scale == 1:
        return values
    up = np.repeat(np.repeat(values, scale, axis=0), scale, axis=1)
    pad_y = shape[0] - up.shape[0]
    pad_x = shape[1] - up.shape[1]
    if pad_y < 0 or pad_x < 0:
        up = up[:shape[0], :shape[1]]
        pad_y = max(pad_y, 0)
        pad_x = max(pad_x, 0)
    if pad_y or pad_x:
        up = np.pad(up, ((0, pad_y), (0, pad_x)), mode="edge")
    return up


# ---------------------------------------------------------------------------
# stack composition tables
# ---------------------------------------------------------------------------

def _apex(i: int) -> int:
    return 3 + 2 * i


def _windowed(base, apexes):
    return ["%s_%d" % (base, _apex(i)) for i in apexes]


_MULTI = (FULL, HALF, QUARTER)


def _scaled(measure_id):
    return [(measure_id, s) for s in _MULTI]


STACKS = {
    "GCP": [(m, FULL) for m in
            ["MSM", "DB", "MMN", "ALM", "LRC", "LRD", "DTD", "MDD_5"]],
    "ENS23": (_scaled("PKR") + _scaled("NEM") + _scaled("PER")
              + [("LRC", FULL)]
              + _scaled("HGM") + _scaled("DMV") + _scaled("DAM")
              + _scaled("ZSAD_5") + [("SGE_5", FULL)]),
    "ENS7": [("LRC", FULL)] + _scaled("HGM") + _scaled("DMV"),
    "LEV22": [(m, FULL) for m in
              ["PKR", "PKRN", "MSM", "MM", "WMN", "MLM", "PER", "NEM",
               "LRD", "LC"]
              + _windowed("VAR", range(1, 5)) + ["DTD"]
              + _windowed("MDD", range(1, 5)) + ["LRC", "HGM", "DLB"]],
    "LEV50": [(m, FULL) for m in
              ["MSM", "PKR", "PKRN", "MM", "MMN", "WMN", "WMNN", "MLM",
               "PER", "NEM", "LRD", "LC", "ALM", "DTD", "DTE", "LRC",
               "HGM", "DLB", "DB", "NOI"]
              + _windowed("VAR", (1, 3, 4, 6, 9, 14))
              + _windowed("MDD", (1, 3, 4, 6, 9, 14))
              + _windowed("MND", (1, 3, 4, 6, 9, 14))
              + _windowed("SKEW", (1, 3, 4, 6, 9, 14))
              + _windowed("IVAR", (1, 3, 4, 6, 9, 14))],
    "FA1": [(m, FULL) for m in
            ["LRC", "DB", "LRD"] + _windowed("MDD", (1, 2, 3)) + ["MLM", "MSM"]],
    "FA2": [(m, FULL) for m in
            ["LRD", "PKRN"] + _windowed("MDD", (1, 2, 3, 4)) + ["MLM", "NEM"]],
    "O1": [(m, FULL) for m in
           _windowed("DA", range(1, 5)) + _windowed("DS", range(1, 5))
           + _windowed("MED", range(1, 5)) + _windowed("MDD", range(1, 5))
           + _windowed("VAR", range(1, 5))],
    "O2": [(m, FULL) for m in
           _windowed("DA", range(1, 10)) + _windowed("DS", range(1, 10))
           + _windowed("MED", range(1, 10)) + _windowed("MDD", range(1, 10))
           + _windowed("VAR", range(1, 10)) + ["DLB", "UC"]],
    "SGMF": None,  # handled separately (per-scanline winners and costs)
}

EXPECTED_CHANNELS = {
    "GCP": 8, "ENS23": 23, "ENS7": 7, "LEV22": 22, "LEV50": 50,
    "FA1": 8, "FA2": 8, "O1": 20, "O2": 47, "SGMF": 20,
}


@dataclass(frozen=True)
class FeatureStack:
    kind: str
    names: tuple
    values: np.ndarray  # (H, W, C) float32

    @property
    def num_channels(self) -> int:
        return self.values.shape[2]


def assemble_stack(kind: str, level_inputs: dict,
                   params: MeasureParams | None = None) -> FeatureStack:
    """Build a named feature stack.

    Args:
        kind: stack id (see STACKS / EXPECTED_CHANNELS).
        level_inputs: MeasureInputs keyed by scale (1 always; 2 and 4 for
            the multi-scale stacks).
        params: measure hyper-parameters.
    """
    kind = kind.upper()
    if kind not in EXPECTED_CHANNELS:
        raise KeyError("unknown stack kind: %r" % kind)
    if params is None:
        params = MeasureParams()
    full = level_inputs[FULL]
    shape = full.shape
    names = []
    maps = []
    if kind == "SGMF":
        full.require("scanlines")
        scanlines = full.scanlines
        order = list(scanlines.per_path.keys())
        for s in order:
            names.append("WTA_%s" % s)
            maps.append(scanlines.path_wta[s].astype(np.float64))
        for s in order:
            d_s = scanlines.path_wta[s][..., None].astype(np.int64)
            for z in order:
                cost_z = scanlines.normalized_path(z).astype(np.float64)
                names.append("COST_%s_AT_%s" % (z, s))
                maps.append(np.take_along_axis(cost_z, d_s, axis=-1)[..., 0])
    else:
        for measure_id, scale in STACKS[kind]:
            if scale not in level_inputs:
                raise ValueError("stack %s needs scale 1/%d inputs" % (kind, scale))
            value = compute_measure(measure_id, level_inputs[scale], params)
            value = upsample_nearest(value, scale, shape)
            names.append(measure_id + _SCALE_SUFFIX[scale])
            maps.append(value)
    if len(maps) != EXPECTED_CHANNELS[kind]:
        raise AssertionError("stack %s assembled %d channels, expected %d"
                             % (kind, len(maps), EXPECTED_CHANNELS[kind]))
    values = np.stack(maps, axis=-1).astype(np.float32)
    return FeatureStack(kind, tuple(names), values)


# ---------------------------------------------------------------------------
# STFEAT container
# ---------------------------------------------------------------------------

def export_stack(path, stack: FeatureStack) -> None:
    """Write magic, u32 dims, channel name records, then the raster."""
    if stack.num_channels == 0:
        raise ValueError("refusing to export an empty stack")
    h, w, c = stack.values.shape
    with open(path, "wb") as f:
        f.write(STFEAT_MAGIC)
        f.write(struct.pack("<III", h, w, c))
        for name in stack.names:
            encoded = name.encode("utf-8")
            f.write(struct.pack("<H", len(encoded)))
            f.write(encoded)
        f.write(np.ascontiguousarray(stack.values, dtype="<f4").tobytes())


def read_stfeat(path) -> FeatureStack:
    with open(path, "rb") as f:
        if f.read(8) != STFEAT_MAGIC:
            raise ValueError("bad feature stack magic")
        h, w, c = struct.unpack("<III", f.read(12))
        names = []
        for _ in range(c):
            (ln,) = struct.unpack("<H", f.read(2))
            names.append(f.read(ln).decode("utf-8"))
        raw = f.read(h * w * c * 4)
        if len(raw) != h * w * c * 4:
            raise ValueError("feature stack payload truncated")
    values = np.frombuffer(raw, dtype="<f4").reshape(h, w, c).astype(np.float32)
    return FeatureStack("", tuple(names), values)
