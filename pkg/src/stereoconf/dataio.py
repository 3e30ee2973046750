"""Image, disparity map and dataset manifest I/O.

Supported raster formats:
  - PGM (P5, 8 bit) for grayscale images
  - PNG (8 or 16 bit grayscale, or RGB reduced to luma) for images
  - PFM ("Pf" grayscale, little or big endian) for float maps
  - 16 bit PNG with 1/256 disparity scaling for ground truth and saved maps
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image


# ---------------------------------------------------------------------------
# core types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrayImage:
    """8 bit grayscale image, pixels stored as a (H, W) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 2:
            raise ValueError("GrayImage expects a 2-d array, got shape %r"
                             % (self.pixels.shape,))
        if self.pixels.dtype != np.uint8:
            raise ValueError("GrayImage expects uint8 pixels, got %s"
                             % self.pixels.dtype)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def astype_float(self) -> np.ndarray:
        return self.pixels.astype(np.float64)


@dataclass(frozen=True)
class GroundTruth:
    """Reference disparity with a validity mask (invalid pixels are excluded
    from every error statistic)."""

    disparity: np.ndarray  # (H, W) float32
    valid: np.ndarray      # (H, W) bool

    def __post_init__(self):
        if self.disparity.shape != self.valid.shape:
            raise ValueError("disparity and valid mask shapes differ")


@dataclass(frozen=True)
class ManifestEntry:
    left: str
    right: str
    gt: str
    gt_encoding: str
    d_max: int
    tau: float
    # optional fields for externally computed cost volumes
    volume: str | None = None
    volume_mode: str = "costs"

    def name(self) -> str:
        """Short identifier used in reports: stem of the left image path."""
        return Path(self.left).stem


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


GT_ENCODINGS = ("pfm", "kitti-png16")
SAVE_ENCODINGS = ("pfm", "png16-scaled")


# ---------------------------------------------------------------------------
# PFM
# ---------------------------------------------------------------------------

def read_pfm(path) -> np.ndarray:
    """Read a grayscale PFM file into a (H, W) float32 array.

    The header is "Pf", followed by width/height and a scale whose sign
    encodes endianness (negative = little endian).  Rows are stored
    bottom-to-top and flipped on load.
    """
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic != b"Pf":
            raise ValueError("not a grayscale PFM file: %r" % magic)
        dims = _read_pfm_token_line(f)
        width, height = (int(v) for v in dims.split())
        scale = float(_read_pfm_token_line(f))
        if scale == 0:
            raise ValueError("PFM scale must be non-zero")
        endian = "<" if scale < 0 else ">"
        count = width * height
        raw = f.read(count * 4)
        if len(raw) != count * 4:
            raise ValueError("PFM payload truncated")
    data = np.frombuffer(raw, dtype=endian + "f4").reshape(height, width)
    data = np.flipud(data).astype(np.float32)
    return np.ascontiguousarray(data)


def _read_pfm_token_line(f) -> str:
    line = f.readline().decode("latin-1").strip()
    while line.startswith("#") or line == "":
        line = f.readline().decode("latin-1").strip()
    return line


def write_pfm(path, data: np.ndarray) -> None:
    """Write a (H, W) float array as little-endian grayscale PFM."""
    data = np.asarray(data, dtype=np.float32)
    if data.ndim != 2:
        raise ValueError("write_pfm expects a 2-d array")
    height, width = data.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(("%d %d\n" % (width, height)).encode("ascii"))
        f.write(b"-1.0\n")
        f.write(np.flipud(data).astype("<f4").tobytes())


# ---------------------------------------------------------------------------
# PGM
# ---------------------------------------------------------------------------

def read_pgm(path) -> np.ndarray:
    """Read a binary 8 bit PGM (P5) into a (H, W) uint8 array."""
    with open(path, "rb") as f:
        if f.read(2) != b"P5":
            raise ValueError("not a binary PGM (P5) file")
        width = _read_pgm_int(f)
        height = _read_pgm_int(f)
        maxval = _read_pgm_int(f)
        if maxval <= 0 or maxval > 255:
            raise ValueError("only 8 bit PGM supported, maxval=%d" % maxval)
        raw = f.read(width * height)
        if len(raw) != width * height:
            raise ValueError("PGM payload truncated")
    return np.frombuffer(raw, dtype=np.uint8).reshape(height, width).copy()


def _read_pgm_int(f) -> int:
    """Read the next whitespace-delimited integer, skipping # comments."""
    token = b""
    while True:
        ch = f.read(1)
        if ch == b"":
            raise ValueError("unexpected end of PGM header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = f.read(1)
            continue
        if ch.isspace():
            if token:
                break
            continue
        token += ch
    return int(token)


def write_pgm(path, pixels: np.ndarray) -> None:
    pixels = np.asarray(pixels)
    if pixels.dtype != np.uint8 or pixels.ndim != 2:
        raise ValueError("write_pgm expects a 2-d uint8 array")
    height, width = pixels.shape
    with open(path, "wb") as f:
        f.write(("P5\n%d %d\n255\n" % (width, height)).encode("ascii"))
        f.write(pixels.tobytes())


# ---------------------------------------------------------------------------
# images
# ---------------------------------------------------------------------------

def load_gray_image(path) -> GrayImage:
    """Load a PGM or PNG image as 8 bit grayscale.

    16 bit grayscale PNGs are right-shifted by 8; color PNGs are reduced
    with the usual 0.299/0.587/0.114 luma weights.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        return GrayImage(read_pgm(path))
    if suffix == ".png":
        with Image.open(path) as img:
            if img.mode in ("I", "I;16", "I;16B", "I;16L"):
                arr = np.asarray(img, dtype=np.uint32)
                return GrayImage((arr >> 8).astype(np.uint8))
            if img.mode == "L":
                return GrayImage(np.asarray(img, dtype=np.uint8).copy())
            return GrayImage(np.asarray(img.convert("L"), dtype=np.uint8).copy())
    raise ValueError("unsupported image format: %s" % path)


def load_ground_truth(path, encoding: str) -> GroundTruth:
    """Load a reference disparity map.

    Args:
        path: file path.
        encoding: "pfm" (invalid pixels are non-finite or <= 0) or
            "kitti-png16" (uint16 PNG, disparity = raw / 256, raw 0 invalid).
    """
    if encoding == "pfm":
        disp = read_pfm(path)
        valid = np.isfinite(disp) & (disp > 0)
        disp = np.where(valid, disp, 0.0).astype(np.float32)
        return GroundTruth(disp, valid)
    if encoding == "kitti-png16":
        with Image.open(path) as img:
            raw = np.asarray(img, dtype=np.uint32)
        if raw.ndim != 2:
            raise ValueError("expected single-channel 16 bit PNG")
        valid = raw > 0
        disp = (raw.astype(np.float32) / 256.0)
        disp[~valid] = 0.0
        return GroundTruth(disp, valid)
    raise ValueError("unknown ground truth encoding: %r" % encoding)


def save_map(path, values: np.ndarray, encoding: str = "pfm") -> None:
    """Save a float map either bit-exact (pfm) or as 16 bit PNG with 1/256
    steps (png16-scaled: stored = round(v * 256) clamped to [0, 65535])."""
    values = np.asarray(values)
    if encoding == "pfm":
        write_pfm(path, values)
        return
    if encoding == "png16-scaled":
        scaled = np.round(values.astype(np.float64) * 256.0)
        scaled = np.clip(scaled, 0, 65535).astype(np.uint16)
        Image.fromarray(scaled).save(path)
        return
    raise ValueError("unknown save encoding: %r" % encoding)


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

_REQUIRED_KEYS = ("left", "right", "gt", "gt_encoding", "d_max", "tau")


def load_manifest(path) -> DatasetManifest:
    """Load a JSON dataset manifest: a list of entries with keys
    left/right/gt/gt_encoding/d_max/tau (plus optional volume/volume_mode
    for externally computed cost volumes)."""
    with open(path) as f:
        raw = json.load(f)
    if not isinstance(raw, list):
        raise ValueError("manifest must be a JSON array of entries")
    entries = []
    for idx, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ValueError("manifest entry %d is not an object" % idx)
        for key in _REQUIRED_KEYS:
            if key not in item:
                raise ValueError("manifest entry %d is missing key %r" % (idx, key))
        if item["gt_encoding"] not in GT_ENCODINGS:
            raise ValueError("manifest entry %d: unknown gt_encoding %r"
                             % (idx, item["gt_encoding"]))
        d_max = item["d_max"]
        if not isinstance(d_max, int) or d_max < 1:
            raise ValueError("manifest entry %d: d_max must be an integer >= 1" % idx)
        tau = item["tau"]
        if not isinstance(tau, (int, float)) or tau <= 0:
            raise ValueError("manifest entry %d: tau must be > 0" % idx)
        for key in ("left", "right", "gt"):
            if not isinstance(item[key], str) or not item[key]:
                raise ValueError("manifest entry %d: %r must be a non-empty path"
                                 % (idx, key))
        entries.append(ManifestEntry(
            left=item["left"], right=item["right"], gt=item["gt"],
            gt_encoding=item["gt_encoding"], d_max=d_max, tau=float(tau),
            volume=item.get("volume"), volume_mode=item.get("volume_mode", "costs"),
        ))
    return DatasetManifest(entries)
