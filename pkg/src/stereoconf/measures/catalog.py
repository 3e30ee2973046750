"""Measure catalog and dispatch.

Every measure is registered with its family, a short formula sketch, the
inputs it reads, the hyper-parameters it uses, and its polarity: "higher"
when larger verbatim values mean more confident, "lower" otherwise.  The
oriented mode flips "lower" measures (and remaps the uniqueness-with-cost
special case) so that sorting descending always ranks confident first.

Windowed measures accept an id suffix: "VAR_13" is the variance on a 13x13
window; without a suffix the default window from MeasureParams applies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dispmap, fullcurve, image, leftright, local, selfmatch, sgmpath, windowed
from .inputs import MeasureInputs, MeasureParams


@dataclass(frozen=True)
class MeasureSpec:
    id: str
    family: str
    formula: str
    fn: object
    windowed: bool = False
    polarity: str = "higher"          # "higher" | "lower"
    requires: tuple = ()
    params: tuple = ()
    sgm_only: bool = False
    evaluable: bool = True
    oriented_fn: object = None        # overrides sign flip when set

    @property
    def orientation(self) -> int:
        return 1 if self.polarity == "higher" else -1


_SPECS = [
    # --- minimum and its competitors -------------------------------------
    MeasureSpec("MSM", "minimum", "-c_d1", local.msm),
    MeasureSpec("MM", "minimum", "c_d2m - c_d1", local.mm),
    MeasureSpec("MMN", "minimum", "c_d2 - c_d1", local.mmn),
    MeasureSpec("NLM", "minimum", "exp((c_d2m - c_d1) / (2*sigma^2))",
                local.nlm, params=("sigma_nlm",)),
    MeasureSpec("NLMN", "minimum", "exp((c_d2 - c_d1) / (2*sigma^2))",
                local.nlmn, params=("sigma_nlm",)),
    MeasureSpec("CUR", "minimum", "-2*c_d1 + c_(d1-1) + c_(d1+1)", local.cur),
    MeasureSpec("LC", "minimum", "(max(c_(d1-1), c_(d1+1)) - c_d1) / gamma",
                local.lc, params=("gamma_lc",)),
    MeasureSpec("PKR", "minimum", "c_d2m / c_d1", local.pkr),
    MeasureSpec("PKRN", "minimum", "c_d2 / c_d1", local.pkrn),
    MeasureSpec("DAM", "minimum", "|d1 - d2|", local.dam, polarity="lower"),
    # --- windowed peak measures ------------------------------------------
    MeasureSpec("APKR", "window", "sum_q c_d2m(p)(q) / c_d1(p)(q)",
                windowed.apkr, windowed=True),
    MeasureSpec("APKRN", "window", "sum_q c_d2(p)(q) / c_d1(p)(q)",
                windowed.apkrn, windowed=True),
    MeasureSpec("WPKR", "window", "sum_q alpha(p,q) c_d2m(p)(q) / c_d1(p)(q)",
                windowed.wpkr, windowed=True,
                requires=("left_image",), params=("w_wpkr",)),
    MeasureSpec("WPKRN", "window", "sum_q alpha(p,q) c_d2(p)(q) / c_d1(p)(q)",
                windowed.wpkrn, windowed=True,
                requires=("left_image",), params=("w_wpkr",)),
    MeasureSpec("LMN", "window", "#{q : local min of q's curve at d1(p)}",
                windowed.lmn, windowed=True),
    MeasureSpec("SGE", "window", "sum_rays (min costs + P1/P2 jump penalties)",
                windowed.sge, windowed=True, polarity="lower",
                params=("p1", "p2")),
    # --- whole curve ------------------------------------------------------
    MeasureSpec("PER", "curve", "sum_(i!=d1) exp(-(c_d1 - c_i)^2 / s^2)",
                fullcurve.per, polarity="lower", params=("s_per",)),
    MeasureSpec("MLM", "curve", "softmin prob of d1 at temperature 2*sigma",
                fullcurve.mlm, params=("sigma_mlm",)),
    MeasureSpec("ALM", "curve", "1 / sum_i exp(-c_i / (2*sigma))",
                fullcurve.alm, params=("sigma_mlm",)),
    MeasureSpec("NEM", "curve", "p*log(p), p = exp(-c_d1)/sum exp(-c_i)",
                fullcurve.nem),
    MeasureSpec("NOI", "curve", "#local minima", fullcurve.noi, polarity="lower"),
    MeasureSpec("WMN", "curve", "(c_d2m - c_d1) / sum_i c_i", fullcurve.wmn),
    MeasureSpec("WMNN", "curve", "(c_d2 - c_d1) / sum_i c_i", fullcurve.wmnn),
    MeasureSpec("PWCFA", "curve", "1 / sum_i capped_idx^2 / floored_margin",
                fullcurve.pwcfa),
    # --- left-right -------------------------------------------------------
    MeasureSpec("LRC", "leftright", "-|d1(p) - d1_right(p_r)|", leftright.lrc,
                requires=("right_disparity",)),
    MeasureSpec("LRD", "leftright", "(c_d2 - c_d1) / |c_d1 - min c_right(p_r)|",
                leftright.lrd, requires=("right_volume",)),
    MeasureSpec("ZSAD", "leftright", "sum_q |l(q) - mu_l - r(q_r) + mu_r|",
                leftright.zsad, windowed=True, polarity="lower",
                requires=("left_image", "right_image")),
    MeasureSpec("ACC", "leftright", "1 unless outranked in its collision group",
                leftright.acc),
    MeasureSpec("UC", "leftright", "1 unless a cheaper collider exists",
                leftright.uc),
    MeasureSpec("UCC", "leftright", "-c_d1 for winners, 0 for losers",
                leftright.ucc, oriented_fn=leftright.ucc_oriented),
    MeasureSpec("UCO", "leftright", "-(collision count)", leftright.uco),
    # --- disparity map ----------------------------------------------------
    MeasureSpec("DTD", "disparity", "distance to nearest disparity edge",
                dispmap.dtd, params=("edge_threshold_disp",)),
    MeasureSpec("DMV", "disparity", "|grad d1|", dispmap.dmv, polarity="lower"),
    MeasureSpec("VAR", "disparity", "-window variance of d1", dispmap.var,
                windowed=True),
    MeasureSpec("SKEW", "disparity", "-window 3rd moment of d1", dispmap.skew,
                windowed=True),
    MeasureSpec("MDD", "disparity", "-|d1 - window median|", dispmap.mdd,
                windowed=True),
    MeasureSpec("MND", "disparity", "-|d1 - window mean|", dispmap.mnd,
                windowed=True),
    MeasureSpec("DA", "disparity", "#window pixels sharing d1(p)", dispmap.da,
                windowed=True),
    MeasureSpec("DS", "disparity", "-log(#distinct / #window)", dispmap.ds,
                windowed=True),
    MeasureSpec("MED", "disparity", "window median of d1 (feature only)",
                dispmap.med, windowed=True, evaluable=False),
    # --- image ------------------------------------------------------------
    MeasureSpec("DB", "image", "min(x, y, W - x, H - y)", image.db),
    MeasureSpec("DLB", "image", "min(x, d_max)", image.dlb),
    MeasureSpec("HGM", "image", "|horizontal intensity gradient|", image.hgm,
                requires=("left_image",)),
    MeasureSpec("DTE", "image", "distance to nearest intensity edge",
                image.dte, requires=("left_image",),
                params=("edge_threshold_int",)),
    MeasureSpec("IVAR", "image", "window intensity variance", image.ivar,
                windowed=True, requires=("left_image",)),
    # --- self matching ----------------------------------------------------
    MeasureSpec("DTS", "selfmatch", "min nonzero-offset self cost",
                selfmatch.dts, requires=("left_self",)),
    MeasureSpec("DSM", "selfmatch", "dts_l * dts_r(p_r) / c_d1^2",
                selfmatch.dsm, requires=("left_self", "right_self")),
    MeasureSpec("SAMM", "selfmatch", "corr(curve shifted by d1, self curve)",
                selfmatch.samm, requires=("left_self",)),
    # --- scanline ---------------------------------------------------------
    MeasureSpec("SCS", "scanline", "#paths agreeing with the final winner",
                sgmpath.scs, requires=("scanlines",), sgm_only=True),
    MeasureSpec("PS", "scanline", "rel margin * minima separation * raw agreement",
                sgmpath.ps, requires=("pre_disparity",),
                params=("gamma_ps",), sgm_only=True),
]

CATALOG = {spec.id: spec for spec in _SPECS}
ALL_IDS = tuple(spec.id for spec in _SPECS)


def parse_measure_id(measure_id: str) -> tuple:
    """Split an id like "VAR_13" into (spec, window); window is None when
    the id carries no suffix."""
    token = measure_id.strip().upper()
    window = None
    if "_" in token:
        base, suffix = token.rsplit("_", 1)
        if not suffix.isdigit():
            raise KeyError("bad measure id: %r" % measure_id)
        token, window = base, int(suffix)
    if token not in CATALOG:
        raise KeyError("unknown measure: %r" % measure_id)
    spec = CATALOG[token]
    if window is not None and not spec.windowed:
        raise KeyError("measure %s does not take a window suffix" % token)
    return spec, window


def compute_measure(measure_id: str, inputs: MeasureInputs,
                    params: MeasureParams | None = None,
                    oriented: bool = False) -> np.ndarray:
    """Evaluate one measure over the whole image, returning a float64 map.

    oriented=True returns the ranking orientation (higher = more confident)
    regardless of the verbatim sign convention.
    """
    if params is None:
        params = MeasureParams()
    spec, window = parse_measure_id(measure_id)
    fn = spec.oriented_fn if (oriented and spec.oriented_fn is not None) else spec.fn
    if spec.windowed:
        result = fn(inputs, params, window if window is not None else params.window)
    else:
        result = fn(inputs, params)
    if oriented and spec.oriented_fn is None and spec.orientation < 0:
        result = -result
    result = np.asarray(result, dtype=np.float64)
    if not np.all(np.isfinite(result)):
        raise FloatingPointError("measure %s produced non-finite values"
                                 % measure_id)
    return result


def evaluable_ids(include_sgm: bool) -> tuple:
    """Measures meaningful for ranking on a pipeline (excludes the
    feature-only channels, and the scanline measures unless available)."""
    out = []
    for spec in _SPECS:
        if not spec.evaluable:
            continue
        if spec.sgm_only and not include_sgm:
            continue
        out.append(spec.id)
    return tuple(out)


def resolve_measure_tokens(tokens, include_sgm: bool) -> list:
    """Expand CLI measure tokens ("all" or explicit ids) into a list."""
    out = []
    for token in tokens:
        if token.lower() == "all":
            out.extend(evaluable_ids(include_sgm))
        else:
            parse_measure_id(token)  # validate
            out.append(token.strip().upper())
    seen = set()
    unique = []
    for item in out:
        if item not in seen:
            seen.add(item)
            unique.append(item)
    return unique
