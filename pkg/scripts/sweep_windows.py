"""Sweep the support window of every windowed confidence measure.

Evaluates each windowed measure at all protocol window sizes on one
manifest and writes macro-averaged AUC per (measure, window) to sweep.csv.
Matching goes through the on-disk volume cache, so the cost volumes are
computed once and every window re-reads them:

    python scripts/make_synthetic_pair.py data/
    python scripts/sweep_windows.py data/manifest.json --out sweep_out
"""

import argparse
import sys
from pathlib import Path

from stereoconf.dataio import load_manifest
from stereoconf.evalauc import macro_average
from stereoconf.measures import CATALOG
from stereoconf.pipeline import PipelineConfig, run_eval

WINDOW_SIZES = (5, 7, 9, 11, 13, 15, 17, 19, 21, 31)


def windowed_bases(include_sgm):
    bases = []
    for measure_id in sorted(CATALOG):
        spec = CATALOG[measure_id]
        if spec.windowed and spec.evaluable:
            if spec.sgm_only and not include_sgm:
                continue
            bases.append(measure_id)
    return bases


def main(argv=None):
    ap = argparse.ArgumentParser(
        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("manifest")
    ap.add_argument("--out", default="sweep_out")
    ap.add_argument("--algo", default="census-cbca",
                    choices=("census-cbca", "census-sgm"))
    ap.add_argument("--measures", default=None,
                    help="comma separated windowed measure names "
                    "(default: all of them)")
    ap.add_argument("--windows", default=",".join(map(str, WINDOW_SIZES)))
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    manifest = load_manifest(args.manifest)
    out = Path(args.out)
    bases = (args.measures.split(",") if args.measures
             else windowed_bases(args.algo == "census-sgm"))
    windows = [int(tok) for tok in args.windows.split(",")]

    rows = []
    for window in windows:
        config = PipelineConfig(
            algo=args.algo,
            out_dir=str(out / ("w%02d" % window)),
            cache_dir=str(out / "cache"),
            k=args.k,
            workers=args.workers,
            measures=tuple("%s_%d" % (base, window) for base in bases),
        )
        records, failures = run_eval(manifest, config)
        for name, message in failures:
            print("window %d failed on %s: %s" % (window, name, message),
                  file=sys.stderr)
        if failures:
            return 1
        for base in bases:
            tagged = "%s_%d" % (base, window)
            aucs = [r.auc for r in records if r.measure == tagged]
            opts = [r.optimal for r in records if r.measure == tagged]
            rows.append((base, window, macro_average(aucs),
                         macro_average(opts)))
        print("window %2d done (%d measures, %d images)"
              % (window, len(bases), len(manifest)))

    out.mkdir(parents=True, exist_ok=True)
    table = out / "sweep.csv"
    with open(table, "w") as fh:
        fh.write("measure,window,auc_x100,opt_x100\n")
        for base, window, auc, opt in sorted(rows):
            fh.write("%s,%d,%.4f,%.4f\n" % (base, window, 100 * auc, 100 * opt))

    print("\nbest window per measure (macro AUC x100, lower is better):")
    for base in bases:
        own = [(auc, window) for b, window, auc, _ in rows if b == base]
        auc, window = min(own)
        print("  %-6s %2d  %.4f" % (base, window, 100 * auc))
    print("wrote %s" % table)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
