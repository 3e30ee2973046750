"""Sparsification evaluation of confidence maps.

A confidence map is scored by sorting valid pixels by decreasing
confidence (raster order breaks ties), sweeping k density levels j/k, and
averaging the disparity error rate of each prefix.  The lower bound for a
given error rate eps has the closed form eps + (1 - eps) * ln(1 - eps).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


def d1_rate(disparity, gt_disparity, valid, tau: float) -> float:
    """Fraction of valid pixels whose absolute disparity error exceeds tau."""
    disparity = np.asarray(disparity, dtype=np.float64)
    gt = np.asarray(gt_disparity, dtype=np.float64)
    valid = np.asarray(valid, dtype=bool)
    n = int(valid.sum())
    if n == 0:
        raise ValueError("no valid pixels")
    errors = np.abs(disparity - gt) > tau
    return float(errors[valid].sum()) / n


def error_flags(disparity, gt_disparity, tau: float) -> np.ndarray:
    return np.abs(np.asarray(disparity, dtype=np.float64)
                  - np.asarray(gt_disparity, dtype=np.float64)) > tau


def sparsification_curve(confidence, errors, valid=None, k: int = 20):
    """Error rate of the ceil(j*n/k) most confident pixels for j = 1..k.

    Args:
        confidence: per-pixel scores, higher = keep earlier.
        errors: boolean error flags, same shape.
        valid: optional mask restricting the evaluation.
        k: number of density levels.

    Returns:
        (densities, rates): arrays of length k, densities j/k ending at 1.
    """
    confidence = np.asarray(confidence, dtype=np.float64)
    errors = np.asarray(errors, dtype=bool)
    if valid is not None:
        confidence = confidence[np.asarray(valid, dtype=bool)]
        errors = errors[np.asarray(valid, dtype=bool)]
    conf = confidence.ravel()
    errs = errors.ravel()
    n = conf.size
    if n == 0:
        raise ValueError("no pixels to evaluate")
    if k < 1:
        raise ValueError("k must be >= 1")
    # stable sort on the negated scores keeps raster order within ties
    order = np.argsort(-conf, kind="stable")
    cum_err = np.cumsum(errs[order].astype(np.int64))
    j = np.arange(1, k + 1)
    cuts = np.ceil(j * n / k).astype(np.int64)
    rates = cum_err[cuts - 1] / cuts
    return j / k, rates


def auc_from_rates(rates) -> float:
    """Area under the sparsification curve: mean of the k error rates."""
    return float(np.mean(rates))


def sparsification_auc(confidence, errors, valid=None, k: int = 20) -> float:
    _, rates = sparsification_curve(confidence, errors, valid, k)
    return auc_from_rates(rates)


def optimal_auc(eps) -> np.ndarray | float:
    """Closed-form lower bound for an oracle confidence at error rate eps:
    eps + (1 - eps) * ln(1 - eps)."""
    scalar = np.ndim(eps) == 0
    eps_arr = np.atleast_1d(np.asarray(eps, dtype=np.float64))
    if np.any((eps_arr < 0) | (eps_arr > 1)):
        raise ValueError("error rate must lie in [0, 1]")
    out = np.ones_like(eps_arr)  # eps = 1 limit: every prefix is all wrong
    below = eps_arr < 1.0
    e = eps_arr[below]
    out[below] = e + (1.0 - e) * np.log1p(-e)
    return float(out[0]) if scalar else out


def macro_average(values) -> float:
    """Unweighted mean over images (each image counts the same)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("nothing to average")
    return float(values.mean())


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvalRecord:
    measure: str
    image: str
    auc: float
    optimal: float
    d1: float


def write_csv_report(path, records) -> None:
    """Per-(measure, image) rows with AUC, optimal AUC and error rate in
    percentage points, in a fixed deterministic order, followed by one
    macro-average row per measure (image column "macro")."""
    rows = sorted(records, key=lambda r: (r.measure, r.image))
    by_measure = {}
    for r in rows:
        by_measure.setdefault(r.measure, []).append(r)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["measure", "image", "auc_x100", "opt_x100", "d1_pct"])

        def emit(measure, image, auc, opt, d1):
            writer.writerow([measure, image, "%.4f" % (auc * 100.0),
                             "%.4f" % (opt * 100.0), "%.4f" % (d1 * 100.0)])

        for r in rows:
            emit(r.measure, r.image, r.auc, r.optimal, r.d1)
        for measure in sorted(by_measure):
            recs = by_measure[measure]
            emit(measure, "macro",
                 macro_average([r.auc for r in recs]),
                 macro_average([r.optimal for r in recs]),
                 macro_average([r.d1 for r in recs]))


def write_markdown_report(path, records) -> None:
    """Macro-averaged summary: one row per measure, ranked by mean AUC."""
    by_measure = {}
    for r in records:
        by_measure.setdefault(r.measure, []).append(r)
    summary = []
    for measure, recs in by_measure.items():
        summary.append((
            measure,
            macro_average([r.auc for r in recs]),
            macro_average([r.optimal for r in recs]),
            macro_average([r.d1 for r in recs]),
            len(recs),
        ))
    summary.sort(key=lambda row: (row[1], row[0]))
    lines = [
        "# Confidence evaluation",
        "",
        "AUC values are macro averages over images, x100 (lower is better).",
        "",
        "| rank | measure | AUC | optimal | D1 | images |",
        "|---:|---|---:|---:|---:|---:|",
    ]
    for rank, (measure, auc, opt, d1, n) in enumerate(summary, start=1):
        lines.append("| %d | %s | %.4f | %.4f | %.4f | %d |"
                     % (rank, measure, auc * 100, opt * 100, d1 * 100, n))
    lines.append("")
    with open(path, "w") as f:
        f.write("\n".join(lines))
