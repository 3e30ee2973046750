"""Command line front end.

Subcommands mirror the library runners: match, confidence, eval, features,
sparsify, list-measures.  Options come from three layers with increasing
priority: dataclass defaults, a JSON config file (--config), then explicit
flags.  Exit code 0 on success, 1 when some entries failed, 2 on bad usage
or configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .dataio import load_manifest
from .features import EXPECTED_CHANNELS
from .measures.catalog import CATALOG, resolve_measure_tokens
from .pipeline import (ALGORITHMS, PipelineConfig, run_confidence, run_eval,
                       run_features, run_match, run_sparsify)

# (flag destination, PipelineConfig field)
_CONFIG_FLAGS = [
    ("manifest", "manifest"),
    ("algo", "algo"),
    ("out", "out_dir"),
    ("workers", "workers"),
    ("k", "k"),
    ("measures", "measures"),
    ("census_window", "census_window"),
    ("max_arm", "max_arm"),
    ("tau_color", "tau_color"),
    ("cbca_iters", "cbca_iterations"),
    ("p1", "p1"),
    ("p2", "p2"),
    ("cache_dir", "cache_dir"),
    ("save_encoding", "save_encoding"),
    ("shuffle_ties", "shuffle_ties"),
]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file mirroring PipelineConfig")
    parser.add_argument("--manifest", help="dataset manifest (JSON)")
    parser.add_argument("--algo", choices=ALGORITHMS)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--k", type=int, help="sparsification partition count")
    parser.add_argument("--measures", nargs="+", metavar="ID",
                        help="measure ids, or 'all'")
    parser.add_argument("--window", type=int,
                        help="default window for windowed measures")
    parser.add_argument("--census-window", type=int, dest="census_window")
    parser.add_argument("--max-arm", type=int, dest="max_arm")
    parser.add_argument("--tau-color", type=float, dest="tau_color")
    parser.add_argument("--cbca-iters", type=int, dest="cbca_iters")
    parser.add_argument("--p1", type=float)
    parser.add_argument("--p2", type=float)
    parser.add_argument("--cache-dir", dest="cache_dir")
    parser.add_argument("--save-encoding", dest="save_encoding",
                        choices=("pfm", "png16-scaled"))
    parser.add_argument("--shuffle-ties", type=int, dest="shuffle_ties",
                        metavar="SEED",
                        help="break WTA ties randomly with this seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stereoconf",
        description="stereo confidence measures: matching, scoring, evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="compute and save disparity maps")
    _add_common(p)

    p = sub.add_parser("confidence", help="save per-measure confidence maps")
    _add_common(p)
    p.add_argument("--oriented", action="store_true",
                   help="flip measures so higher always means more confident")

    p = sub.add_parser("eval", help="sparsification AUC report (CSV + Markdown)")
    _add_common(p)

    p = sub.add_parser("features", help="export a stacked feature volume")
    _add_common(p)
    p.add_argument("--kind", required=True,
                   help="stack name, e.g. GCP, ENS7, ENS23, O1, O2, SGMF")

    p = sub.add_parser("sparsify", help="dump raw sparsification curves to CSV")
    _add_common(p)

    p = sub.add_parser("list-measures",
                       help="print the measure catalog as JSON")
    return parser


def _build_config(args) -> PipelineConfig:
    data = {}
    if getattr(args, "config", None):
        with open(args.config) as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
    for dest, key in _CONFIG_FLAGS:
        value = getattr(args, dest, None)
        if value is not None:
            data[key] = value
    if getattr(args, "window", None) is not None:
        params = dict(data.get("measure_params", {}))
        params["window"] = args.window
        data["measure_params"] = params
    return PipelineConfig.from_dict(data)


def _list_measures() -> int:
    listing = [
        {
            "id": spec.id,
            "family": spec.family,
            "formula": spec.formula,
            "requires": list(spec.requires),
            "params": list(spec.params),
            "polarity": spec.polarity,
            "windowed": spec.windowed,
            "sgm_only": spec.sgm_only,
            "evaluable": spec.evaluable,
        }
        for spec in CATALOG.values()
    ]
    json.dump(listing, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _report_failures(failures) -> int:
    for name, message in failures:
        print("FAILED %s: %s" % (name, message), file=sys.stderr)
    return 1 if failures else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-measures":
        return _list_measures()
    try:
        config = _build_config(args)
        if not config.manifest:
            raise ValueError("no manifest given (use --manifest or the config file)")
        resolve_measure_tokens(config.measures, include_sgm=True)
        manifest = load_manifest(config.manifest)
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2

    if args.command == "match":
        results, failures = run_match(manifest, config)
        for name, d1 in results:
            print("%s  d1=%.4f" % (name, d1))
        return _report_failures(failures)
    if args.command == "confidence":
        results, failures = run_confidence(manifest, config,
                                           oriented=args.oriented)
        for name, written in results:
            print("%s: %d maps" % (name, len(written)))
        return _report_failures(failures)
    if args.command == "eval":
        records, failures = run_eval(manifest, config)
        print("wrote %s and %s (%d rows)"
              % (Path(config.out_dir) / "report.csv",
                 Path(config.out_dir) / "report.md", len(records)))
        return _report_failures(failures)
    if args.command == "sparsify":
        results, failures = run_sparsify(manifest, config)
        for name, written in results:
            print("%s: %d curves" % (name, len(written)))
        return _report_failures(failures)
    if args.command == "features":
        if args.kind.upper() not in EXPECTED_CHANNELS:
            print("config error: unknown stack %r" % args.kind, file=sys.stderr)
            return 2
        single_target = None
        if config.out_dir.endswith(".stfeat"):
            # --out may name the file itself when there is one entry
            if len(manifest.entries) != 1:
                print("config error: --out names a single .stfeat file but "
                      "the manifest has %d entries" % len(manifest.entries),
                      file=sys.stderr)
                return 2
            single_target = Path(config.out_dir)
            config = replace(config,
                             out_dir=str(single_target.parent or Path(".")))
        results, failures = run_features(manifest, config, args.kind)
        if single_target is not None and results:
            produced = Path(results[0][1])
            single_target.parent.mkdir(parents=True, exist_ok=True)
            os.replace(produced, single_target)
            results = [(results[0][0], str(single_target))]
        for name, path in results:
            print("%s -> %s" % (name, path))
        return _report_failures(failures)
    raise AssertionError("unhandled command %r" % args.command)


if __name__ == "__main__":
    sys.exit(main())
