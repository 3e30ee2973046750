"""Generate synthetic rectified stereo pairs with known disparity.

Each pair is a smoothed-noise texture; the right view samples the same
texture `shift` columns further right, so the true disparity map is a
constant equal to the shift.  Writes PGM images, PFM ground truth and a
manifest.json ready for the stereoconf command line tools:

    python scripts/make_synthetic_pair.py data/ --shifts 3,7
    stereoconf eval --manifest data/manifest.json --out out/
"""

import argparse
import json
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from stereoconf.dataio import write_pfm, write_pgm


def textured_base(height, width, smooth, rng):
    noise = rng.uniform(0.0, 255.0, size=(height, width))
    if smooth > 0:
        noise = gaussian_filter(noise, smooth, mode="nearest")
    lo, hi = float(noise.min()), float(noise.max())
    scaled = (noise - lo) / max(hi - lo, 1e-9) * 255.0
    return np.rint(scaled).astype(np.uint8)


def make_pair(height, width, shift, rng, smooth=1.0):
    """Left/right uint8 views of one texture, right shifted left by `shift`."""
    pad = max(int(shift), 16)
    base = textured_base(height, width + pad, smooth, rng)
    return base[:, :width], base[:, shift:shift + width]


def main(argv=None):
    ap = argparse.ArgumentParser(
        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("out_dir", help="directory for images, ground truth and manifest")
    ap.add_argument("--shifts", default="3,7",
                    help="comma separated disparities, one pair per value")
    ap.add_argument("--height", type=int, default=128)
    ap.add_argument("--width", type=int, default=192)
    ap.add_argument("--d-max", type=int, default=16,
                    help="disparity search range recorded in the manifest")
    ap.add_argument("--tau", type=float, default=1.0,
                    help="error threshold recorded in the manifest")
    ap.add_argument("--smooth", type=float, default=1.0,
                    help="gaussian sigma for the noise texture (0 = raw noise)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    shifts = [int(tok) for tok in args.shifts.split(",") if tok.strip()]
    if not shifts:
        ap.error("no shifts given")
    for shift in shifts:
        if not 0 <= shift <= args.d_max:
            ap.error("shift %d outside [0, d_max=%d]" % (shift, args.d_max))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    entries = []
    for i, shift in enumerate(shifts):
        left, right = make_pair(args.height, args.width, shift, rng, args.smooth)
        name = "pair%02d" % i
        write_pgm(out / (name + "_left.pgm"), left)
        write_pgm(out / (name + "_right.pgm"), right)
        gt = np.full(left.shape, float(shift), dtype=np.float32)
        write_pfm(out / (name + "_gt.pfm"), gt)
        entries.append({
            "left": str(out / (name + "_left.pgm")),
            "right": str(out / (name + "_right.pgm")),
            "gt": str(out / (name + "_gt.pfm")),
            "gt_encoding": "pfm",
            "d_max": args.d_max,
            "tau": args.tau,
        })

    manifest = out / "manifest.json"
    manifest.write_text(json.dumps(entries, indent=2) + "\n")
    print("wrote %d pairs and %s" % (len(entries), manifest))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
