"""End-to-end pipeline orchestration.

Wires the matching stages (census volume, cross aggregation, scanline
aggregation or external volume ingest) to the measure/evaluation layers,
with an on-disk volume cache keyed by content hashes and optional
process-level parallelism over dataset entries.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .aggregate import build_cross, cbca_aggregate, sgm_aggregate
from .costvol import CostVolume, build_cost_volume, ingest_cost_volume, read_stcvol, write_stcvol
from .dataio import DatasetManifest, GroundTruth, ManifestEntry, load_gray_image, load_ground_truth, save_map
from .evalauc import (EvalRecord, d1_rate, error_flags, optimal_auc,
                      sparsification_auc, sparsification_curve,
                      write_csv_report, write_markdown_report)
from .features import FULL, assemble_stack, build_pyramid, export_stack
from .measures import MeasureParams, compute_measure, prepare_inputs, resolve_measure_tokens

ALGORITHMS = ("census-cbca", "census-sgm", "external-volume")

MULTISCALE_STACKS = ("ENS23", "ENS7")


@dataclass(frozen=True)
class PipelineConfig:
    algo: str = "census-cbca"
    census_window: int = 9
    max_arm: int = 17
    tau_color: float = 20.0
    cbca_iterations: int = 2
    p1: float = 0.03
    p2: float = 0.12
    workers: int = 1
    k: int = 20
    manifest: str | None = None
    measures: tuple = ("all",)
    cache_dir: str | None = None
    out_dir: str = "out"
    save_encoding: str = "pfm"
    shuffle_ties: int | None = None
    measure_params: MeasureParams = field(default_factory=MeasureParams)

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError("unknown algorithm %r (choose from %s)"
                             % (self.algo, ", ".join(ALGORITHMS)))
        object.__setattr__(self, "measures", tuple(self.measures))

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        mp = data.pop("measure_params", {})
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        mp_unknown = set(mp) - set(MeasureParams.__dataclass_fields__)
        if mp_unknown:
            raise ValueError("unknown measure params: %s"
                             % ", ".join(sorted(mp_unknown)))
        return cls(measure_params=MeasureParams(**mp), **data)

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))


# ---------------------------------------------------------------------------
# volume cache
# ---------------------------------------------------------------------------

class VolumeCache:
    """Content-addressed store of cost volumes (atomic writes)."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    def path_for(self, key: str) -> Path:
        return self.dir / (key + ".stcvol")

    def get(self, key: str):
        path = self.path_for(key)
        if path.exists():
            return read_stcvol(path)
        return None

    def put(self, key: str, costs: np.ndarray) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        os.close(fd)
        try:
            write_stcvol(tmp, costs)
            os.replace(tmp, self.path_for(key))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


def _hash_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _stage_key(stage: str, config: PipelineConfig, entry: ManifestEntry) -> str:
    payload = {
        "stage": stage,
        "census_window": config.census_window,
        "max_arm": config.max_arm,
        "tau_color": config.tau_color,
        "cbca_iterations": config.cbca_iterations,
        "d_max": entry.d_max,
        "left": _hash_file(entry.left),
        "right": _hash_file(entry.right),
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# per-entry pipeline
# ---------------------------------------------------------------------------

@dataclass
class EntryResult:
    entry: ManifestEntry
    inputs: object  # MeasureInputs
    gt: GroundTruth

    @property
    def disparity(self):
        return self.inputs.disparity


def _cached(cache, key, compute):
    if cache is None:
        return compute()
    hit = cache.get(key)
    if hit is not None:
        return hit
    value = compute()
    cache.put(key, value)
    return value


def run_images(left, right, d_max: int, config: PipelineConfig,
               cache=None, entry: ManifestEntry | None = None):
    """Matcher over an in-memory pair; returns prepared measure inputs."""
    scanlines = None
    pre_volume = None
    if cache is not None and entry is not None:
        keys = {s: _stage_key(s, config, entry) for s in ("census", "cbca")}
    else:
        cache, keys = None, {"census": None, "cbca": None}

    def compute_raw():
        return build_cost_volume(left, right, d_max, config.census_window).costs

    def compute_agg():
        arms_l = build_cross(left, config.max_arm, config.tau_color)
        arms_r = build_cross(right, config.max_arm, config.tau_color)
        raw = _cached(cache, keys["census"], compute_raw)
        return cbca_aggregate(CostVolume(raw), arms_l, arms_r,
                              config.cbca_iterations).costs

    agg = _cached(cache, keys["cbca"], compute_agg)
    if config.algo == "census-sgm":
        pre_volume = CostVolume(agg)
        scanlines = sgm_aggregate(pre_volume, config.p1, config.p2)
        final = scanlines.normalized_volume()
    else:
        final = CostVolume(agg)
    return prepare_inputs(final, left, right, scanlines=scanlines,
                          pre_volume=pre_volume,
                          census_window=config.census_window,
                          tie_seed=config.shuffle_ties)


def run_entry(entry: ManifestEntry, config: PipelineConfig) -> EntryResult:
    """Run the configured matcher for one dataset entry and prepare every
    input the measures may need."""
    left = load_gray_image(entry.left)
    right = load_gray_image(entry.right)
    gt = load_ground_truth(entry.gt, entry.gt_encoding)
    if gt.disparity.shape != left.pixels.shape:
        raise ValueError("ground truth shape %r does not match image %r"
                         % (gt.disparity.shape, left.pixels.shape))
    if entry.d_max >= left.width:
        raise ValueError("d_max %d must be smaller than image width %d"
                         % (entry.d_max, left.width))
    if config.algo == "external-volume":
        if not entry.volume:
            raise ValueError("external-volume entries need a 'volume' path")
        final = ingest_cost_volume(entry.volume, entry.volume_mode)
        if final.costs.shape[:2] != left.pixels.shape:
            raise ValueError("external volume shape %r does not match image %r"
                             % (final.costs.shape, left.pixels.shape))
        inputs = prepare_inputs(final, left, right,
                                census_window=config.census_window,
                                tie_seed=config.shuffle_ties)
    else:
        cache = VolumeCache(config.cache_dir) if config.cache_dir else None
        inputs = run_images(left, right, entry.d_max, config,
                            cache=cache, entry=entry)
    return EntryResult(entry=entry, inputs=inputs, gt=gt)


# ---------------------------------------------------------------------------
# dataset runs
# ---------------------------------------------------------------------------

def _map_entries(fn, jobs, names, workers: int):
    """Run fn over jobs (serially or in a process pool), keeping job order.
    Returns (outputs, failures) where failures pair names with messages."""
    outputs = []
    failures = []
    if workers <= 1:
        for name, job in zip(names, jobs):
            try:
                outputs.append(fn(job))
            except Exception as exc:  # noqa: BLE001 - reported per entry
                failures.append((name, str(exc)))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, job) for job in jobs]
            for name, future in zip(names, futures):
                try:
                    outputs.append(future.result())
                except Exception as exc:  # noqa: BLE001
                    failures.append((name, str(exc)))
    return outputs, failures


def _entry_names(manifest):
    return [entry.name() for entry in manifest]


def _match_entry(args):
    entry, config = args
    result = run_entry(entry, config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = entry.name()
    suffix = ".pfm" if config.save_encoding == "pfm" else ".png"
    save_map(out_dir / (name + "_disp" + suffix),
             result.disparity.astype(np.float32), config.save_encoding)
    save_map(out_dir / (name + "_disp_right" + suffix),
             result.inputs.right_disparity.astype(np.float32),
             config.save_encoding)
    inputs = result.inputs
    write_stcvol(out_dir / (name + "_vol.stcvol"), inputs.volume.costs)
    write_stcvol(out_dir / (name + "_vol_right.stcvol"), inputs.right_volume.costs)
    if inputs.left_self is not None:
        write_stcvol(out_dir / (name + "_self.stcvol"), inputs.left_self.costs)
        write_stcvol(out_dir / (name + "_self_right.stcvol"),
                     inputs.right_self.costs)
    if inputs.scanlines is not None:
        for path_name, accum in inputs.scanlines.per_path.items():
            write_stcvol(out_dir / ("%s_path_%s.stcvol" % (name, path_name)),
                         accum)
    d1 = d1_rate(result.disparity, result.gt.disparity, result.gt.valid, entry.tau)
    return name, d1


def run_match(manifest: DatasetManifest, config: PipelineConfig):
    """Compute and save disparity maps for every entry.
    Returns ([(name, d1)], failures)."""
    jobs = [(entry, config) for entry in manifest]
    return _map_entries(_match_entry, jobs, _entry_names(manifest), config.workers)


def _resolve_tokens(config: PipelineConfig, measure_tokens):
    tokens = config.measures if measure_tokens is None else measure_tokens
    return resolve_measure_tokens(tokens,
                                  include_sgm=(config.algo == "census-sgm"))


def _confidence_entry(args):
    entry, config, measure_ids, oriented = args
    result = run_entry(entry, config)
    out_dir = Path(config.out_dir) / entry.name()
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for measure_id in measure_ids:
        conf = compute_measure(measure_id, result.inputs, config.measure_params,
                               oriented=oriented)
        path = out_dir / (measure_id.lower() + ".pfm")
        save_map(path, conf.astype(np.float32), "pfm")
        written.append(str(path))
    return entry.name(), written


def run_confidence(manifest: DatasetManifest, config: PipelineConfig,
                   measure_tokens=None, oriented: bool = False):
    """Save per-measure confidence maps (verbatim scores by default)."""
    measure_ids = _resolve_tokens(config, measure_tokens)
    jobs = [(entry, config, measure_ids, oriented) for entry in manifest]
    return _map_entries(_confidence_entry, jobs, _entry_names(manifest),
                        config.workers)


def _eval_entry(args):
    entry, config, measure_ids = args
    result = run_entry(entry, config)
    gt = result.gt
    errors = error_flags(result.disparity, gt.disparity, entry.tau)
    eps = d1_rate(result.disparity, gt.disparity, gt.valid, entry.tau)
    opt = optimal_auc(eps)
    records = []
    for measure_id in measure_ids:
        conf = compute_measure(measure_id, result.inputs, config.measure_params,
                               oriented=True)
        auc = sparsification_auc(conf, errors, gt.valid, config.k)
        records.append(EvalRecord(measure=measure_id, image=entry.name(),
                                  auc=auc, optimal=opt, d1=eps))
    return records


def run_eval(manifest: DatasetManifest, config: PipelineConfig,
             measure_tokens=None):
    """Evaluate measures on every entry; writes report.csv and report.md in
    the output directory.  Returns (records, failures)."""
    measure_ids = _resolve_tokens(config, measure_tokens)
    jobs = [(entry, config, measure_ids) for entry in manifest]
    outputs, failures = _map_entries(_eval_entry, jobs, _entry_names(manifest),
                                     config.workers)
    all_records = [record for chunk in outputs for record in chunk]
    all_records.sort(key=lambda r: (r.measure, r.image))
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv_report(out_dir / "report.csv", all_records)
    write_markdown_report(out_dir / "report.md", all_records)
    return all_records, failures


def _sparsify_entry(args):
    entry, config, measure_ids = args
    result = run_entry(entry, config)
    gt = result.gt
    errors = error_flags(result.disparity, gt.disparity, entry.tau)
    _, oracle = sparsification_curve((~errors).astype(np.float64), errors,
                                     gt.valid, config.k)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for measure_id in measure_ids:
        conf = compute_measure(measure_id, result.inputs, config.measure_params,
                               oriented=True)
        densities, rates = sparsification_curve(conf, errors, gt.valid,
                                                config.k)
        path = out_dir / ("%s_%s_curve.csv" % (entry.name(),
                                               measure_id.lower()))
        with open(path, "w", newline="") as f:
            f.write("density,error_rate,optimal_rate\n")
            for dens, rate, opt in zip(densities, rates, oracle):
                f.write("%.6f,%.6f,%.6f\n" % (dens, rate, opt))
        written.append(str(path))
    return entry.name(), written


def run_sparsify(manifest: DatasetManifest, config: PipelineConfig,
                 measure_tokens=None):
    """Dump the raw sparsification curves to CSV, one file per
    (entry, measure), alongside the error-oracle curve."""
    measure_ids = _resolve_tokens(config, measure_tokens)
    jobs = [(entry, config, measure_ids) for entry in manifest]
    return _map_entries(_sparsify_entry, jobs, _entry_names(manifest),
                        config.workers)


def _features_entry(args):
    entry, config, kind = args
    kind = kind.upper()
    result = run_entry(entry, config)
    level_inputs = {FULL: result.inputs}
    if kind in MULTISCALE_STACKS:
        if config.algo == "external-volume":
            raise ValueError("multi-scale stacks need an image-based pipeline")
        left = load_gray_image(entry.left)
        right = load_gray_image(entry.right)
        for level in build_pyramid(left, right, entry.d_max)[1:]:
            level_inputs[level.scale] = run_images(level.left, level.right,
                                                   level.d_max, config)
    stack = assemble_stack(kind, level_inputs, config.measure_params)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / ("%s_%s.stfeat" % (entry.name(), kind.lower()))
    export_stack(path, stack)
    return entry.name(), str(path)


def run_features(manifest: DatasetManifest, config: PipelineConfig, kind: str):
    """Assemble and export one feature stack per entry."""
    jobs = [(entry, config, kind) for entry in manifest]
    return _map_entries(_features_entry, jobs, _entry_names(manifest),
                        config.workers)
