"""Hand-checked values for every measure family plus catalog mechanics.

Each value below was worked out on paper from small curves and maps, so
these tests pin the exact semantics (index conventions, clamping, guards)
rather than just shapes.
"""

import numpy as np
import pytest

from stereoconf.aggregate import ScanlineResult
from stereoconf.costvol import CostVolume, SelfCostVolume
from stereoconf.dataio import GrayImage
from stereoconf.measures import (ALL_IDS, CATALOG, MeasureParams,
                                 compute_measure, evaluable_ids,
                                 parse_measure_id, prepare_inputs,
                                 resolve_measure_tokens)

CURVE_A = [0.9, 0.3, 0.6, 0.8, 0.1, 0.5, 0.4, 0.7]
CURVE_B = [0.5, 0.2, 0.1, 0.3, 0.25, 0.4]


def curve_inputs(curve, **kw):
    vol = CostVolume(np.asarray(curve, dtype=np.float32).reshape(1, 1, -1))
    return prepare_inputs(vol, with_self_volumes=False, **kw)


def volume_inputs(costs, **kw):
    return prepare_inputs(CostVolume(np.asarray(costs, dtype=np.float32)), **kw)


def one_hot_volume(disparity, num_hypotheses):
    d = np.asarray(disparity)
    costs = np.ones(d.shape + (num_hypotheses,), dtype=np.float32)
    np.put_along_axis(costs, d[..., None], 0.0, axis=-1)
    return costs


def scalar(measure_id, inputs, params=None, **kw):
    return float(compute_measure(measure_id, inputs, params, **kw)[0, 0])


# ---------------------------------------------------------------------------
# minimum family
# ---------------------------------------------------------------------------

def test_msm():
    assert scalar("MSM", curve_inputs(CURVE_A)) == pytest.approx(-0.1)


def test_mm_and_mmn():
    a = curve_inputs(CURVE_A)
    assert scalar("MM", a) == pytest.approx(0.2)
    assert scalar("MMN", a) == pytest.approx(0.2)
    b = curve_inputs(CURVE_B)
    assert scalar("MM", b) == pytest.approx(0.15)   # second local minimum
    assert scalar("MMN", b) == pytest.approx(0.1)   # plain second minimum


def test_nlm_and_nlmn():
    a = curve_inputs(CURVE_A)
    assert scalar("NLM", a) == pytest.approx(np.exp(0.4), rel=1e-6)
    b = curve_inputs(CURVE_B)
    assert scalar("NLM", b) == pytest.approx(np.exp(0.3), rel=1e-6)
    assert scalar("NLMN", b) == pytest.approx(np.exp(0.2), rel=1e-6)


def test_cur():
    assert scalar("CUR", curve_inputs(CURVE_A)) == pytest.approx(1.1)
    # neighbor indices clamp at the curve ends
    assert scalar("CUR", curve_inputs([0.1, 0.5, 0.9])) == pytest.approx(0.4)
    assert scalar("CUR", curve_inputs([0.9, 0.5, 0.1])) == pytest.approx(0.4)


def test_lc():
    a = curve_inputs(CURVE_A)
    assert scalar("LC", a, MeasureParams(gamma_lc=1.0)) == pytest.approx(0.7)
    assert scalar("LC", a) == pytest.approx(1.4)    # default gamma 0.5


def test_pkr_and_pkrn():
    b = curve_inputs(CURVE_B)
    assert scalar("PKR", b) == pytest.approx(2.5)
    assert scalar("PKRN", b) == pytest.approx(2.0)
    # zero winner cost falls back to the epsilon guard
    z = curve_inputs([0.0, 0.5, 1.0])
    assert scalar("PKRN", z) == pytest.approx(0.5 / 1e-6)


def test_dam():
    assert scalar("DAM", curve_inputs(CURVE_A)) == pytest.approx(3.0)
    assert scalar("DAM", curve_inputs(CURVE_B)) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# full curve family
# ---------------------------------------------------------------------------

def test_per():
    flat = curve_inputs([0.5] * 6)
    assert scalar("PER", flat) == pytest.approx(5.0)
    ramp = curve_inputs([0.0, 1.0, 2.0])
    got = scalar("PER", ramp, MeasureParams(s_per=1.0))
    assert got == pytest.approx(np.exp(-1.0) + np.exp(-4.0), rel=1e-6)


def test_mlm_and_alm():
    inputs = curve_inputs([0.0, 1.0, 1.0, 1.0])
    params = MeasureParams(sigma_mlm=0.5)
    expect = 1.0 / (1.0 + 3.0 * np.exp(-1.0))
    assert scalar("MLM", inputs, params) == pytest.approx(expect, rel=1e-6)
    assert scalar("ALM", inputs, params) == pytest.approx(expect, rel=1e-6)
    # nonzero winner cost separates the two (temperature 2*sigma = 1)
    shifted = curve_inputs([0.2, 1.0, 1.0, 1.0])
    denom = np.exp(-0.2) + 3.0 * np.exp(-1.0)
    assert scalar("MLM", shifted, params) == pytest.approx(
        np.exp(-0.2) / denom, rel=1e-6)
    assert scalar("ALM", shifted, params) == pytest.approx(1.0 / denom, rel=1e-6)


def test_nem():
    two = curve_inputs([0.3, 0.3])
    assert scalar("NEM", two) == pytest.approx(0.5 * np.log(0.5), rel=1e-6)


def test_noi():
    assert scalar("NOI", curve_inputs(CURVE_A)) == pytest.approx(3.0)
    assert CATALOG["NOI"].polarity == "lower"


def test_wmn_and_wmnn():
    a = curve_inputs(CURVE_A)
    assert scalar("WMNN", a) == pytest.approx(0.2 / 4.3, rel=1e-6)
    b = curve_inputs(CURVE_B)
    assert scalar("WMN", b) == pytest.approx(0.15 / 1.75, rel=1e-6)
    assert scalar("WMNN", b) == pytest.approx(0.1 / 1.75, rel=1e-6)


def test_pwcfa():
    # all hypotheses within one step of the winner: empty sum, epsilon guard
    near = curve_inputs([0.5, 0.1, 0.5])
    assert scalar("PWCFA", near) == pytest.approx(1e6)
    # both far terms floored to denominator 1: 1 / (2 * (1/3)^2)
    far = curve_inputs([0.0, 0.2, 0.4, 0.9])
    assert scalar("PWCFA", far) == pytest.approx(4.5, rel=1e-6)


# ---------------------------------------------------------------------------
# windowed family
# ---------------------------------------------------------------------------

def test_apkr_uniform_neighborhood():
    b = curve_inputs(CURVE_B)
    # a 1x1 map clamps all 9 window taps onto the pixel itself
    assert scalar("APKR_3", b) == pytest.approx(9 * 2.5)
    assert scalar("APKRN_3", b) == pytest.approx(9 * 2.0)


def test_wpkr_gate():
    costs = np.stack([np.asarray(CURVE_B, np.float32)] * 2, axis=0)[None]
    assert costs.shape == (1, 2, 6)
    img = GrayImage(np.array([[0, 100]], dtype=np.uint8))
    inputs = volume_inputs(costs, left_image=img, with_self_volumes=False)
    got = compute_measure("WPKR_3", inputs)
    # at x=0 six taps stay in the dark column, three land across the edge
    assert got[0, 0] == pytest.approx(6 * 2.5)
    # zero gate width blanks everything
    assert compute_measure(
        "WPKR_3", inputs, MeasureParams(w_wpkr=0.0)).max() == 0.0


def test_wpkr_cross_image_gate():
    costs = np.asarray(CURVE_B, np.float32).reshape(1, 1, 6)
    left = GrayImage(np.array([[0]], dtype=np.uint8))
    right = GrayImage(np.array([[5]], dtype=np.uint8))
    inputs = volume_inputs(costs, left_image=left, right_image=right,
                           with_self_volumes=False)
    params = MeasureParams(wpkr_cross_image=True)
    assert scalar("WPKR_3", inputs, params) == pytest.approx(9 * 2.5)


def test_lmn():
    b = curve_inputs(CURVE_B)
    assert scalar("LMN_3", b) == pytest.approx(9.0)
    mono = [0.5, 0.4, 0.3, 0.2, 0.1, 0.05]
    costs = np.stack([np.asarray(CURVE_B), np.asarray(mono)], axis=0)[None]
    inputs = volume_inputs(costs.astype(np.float32))
    # the monotone neighbor has no local minimum at the center's winner
    assert compute_measure("LMN_3", inputs)[0, 0] == pytest.approx(6.0)


def sge_case(first_curve):
    costs = np.stack([np.asarray(first_curve),
                      [0.9, 0.1, 0.9],
                      [0.9, 0.9, 0.2]], axis=0)[None]
    return volume_inputs(costs.astype(np.float32))


def test_sge():
    params = MeasureParams(p1=1.0, p2=2.0)
    inputs = sge_case([0.9, 0.5, 0.9])
    # right ray: own minima 0.1 + 0.2 plus P1 for the one-step jump
    assert compute_measure("SGE_5", inputs, params)[0, 0] == pytest.approx(1.3)
    # the anchor-to-first-ray-pixel gap carries no penalty
    moved = sge_case([0.3, 0.9, 0.9])
    assert compute_measure("SGE_5", moved, params)[0, 0] == pytest.approx(1.3)
    # radius 1 sees only the first ray pixel and no pairs
    assert compute_measure("SGE_3", inputs, params)[0, 0] == pytest.approx(0.1)


# ---------------------------------------------------------------------------
# left-right family
# ---------------------------------------------------------------------------

def test_lrc():
    consistent = curve_inputs(CURVE_B)
    assert scalar("LRC", consistent) == pytest.approx(0.0)
    broken = curve_inputs([0.9, 0.1, 0.5])
    broken.right_disparity = np.array([[3]])
    # already negated, so larger (closer to zero) means more consistent
    assert scalar("LRC", broken) == pytest.approx(-2.0)
    assert CATALOG["LRC"].polarity == "higher"


def test_lrd():
    inputs = curve_inputs([0.1, 0.3, 0.8, 0.9])
    inputs.right_volume = CostVolume(
        np.array([[[0.15, 0.5, 0.9, 0.9]]], dtype=np.float32))
    assert scalar("LRD", inputs) == pytest.approx(4.0, rel=1e-6)


def test_zsad_identical_views():
    img = GrayImage(np.arange(12, dtype=np.uint8).reshape(3, 4) * 9)
    costs = one_hot_volume(np.zeros((3, 4), np.int64), 3)
    inputs = volume_inputs(costs, left_image=img, right_image=img,
                           with_self_volumes=False)
    np.testing.assert_allclose(compute_measure("ZSAD_3", inputs), 0.0)


def test_zsad_hand_value():
    left = GrayImage(np.array([[10, 20, 30]], dtype=np.uint8))
    right = GrayImage(np.array([[10, 20, 40]], dtype=np.uint8))
    costs = one_hot_volume(np.zeros((1, 3), np.int64), 2)
    inputs = volume_inputs(costs, left_image=left, right_image=right,
                           with_self_volumes=False)
    assert compute_measure("ZSAD_3", inputs)[0, 1] == pytest.approx(40.0)


def collision_case(curve0, curve1):
    costs = np.stack([np.asarray(curve0), np.asarray(curve1)], axis=0)[None]
    return volume_inputs(costs.astype(np.float32))


def test_collision_free_row():
    inputs = volume_inputs(one_hot_volume(np.zeros((1, 3), np.int64), 2))
    np.testing.assert_array_equal(compute_measure("UC", inputs), 1.0)
    np.testing.assert_array_equal(compute_measure("UCO", inputs), 0.0)
    np.testing.assert_array_equal(compute_measure("ACC", inputs), 1.0)


def test_collision_costs_decide_uc():
    inputs = collision_case([0.2, 0.9], [0.9, 0.1])  # both map to column 0
    np.testing.assert_array_equal(compute_measure("UC", inputs), [[0.0, 1.0]])
    np.testing.assert_array_equal(compute_measure("UCO", inputs), [[-1.0, -1.0]])
    np.testing.assert_allclose(compute_measure("UCC", inputs), [[0.0, -0.1]],
                               rtol=1e-6)
    oriented = compute_measure("UCC", inputs, oriented=True)
    np.testing.assert_allclose(oriented, [[-2.0, -0.1]], rtol=1e-6)


def test_collision_ties_break_by_disparity_in_acc():
    inputs = collision_case([0.1, 0.9], [0.9, 0.1])
    np.testing.assert_array_equal(compute_measure("UC", inputs), [[1.0, 1.0]])
    np.testing.assert_array_equal(compute_measure("ACC", inputs), [[0.0, 1.0]])


# ---------------------------------------------------------------------------
# disparity map family
# ---------------------------------------------------------------------------

def test_constant_map_statistics():
    inputs = volume_inputs(one_hot_volume(np.full((5, 5), 1, np.int64), 3))
    np.testing.assert_array_equal(compute_measure("VAR", inputs), 0.0)
    np.testing.assert_array_equal(compute_measure("SKEW", inputs), 0.0)
    np.testing.assert_array_equal(compute_measure("MND", inputs), 0.0)
    np.testing.assert_array_equal(compute_measure("MDD", inputs), 0.0)
    np.testing.assert_array_equal(compute_measure("DA", inputs), 25.0)
    np.testing.assert_allclose(compute_measure("DS", inputs), np.log(25.0),
                               rtol=1e-6)
    np.testing.assert_array_equal(compute_measure("MED", inputs), 1.0)
    np.testing.assert_array_equal(compute_measure("DMV", inputs), 0.0)


def test_distinct_map_statistics():
    disp = np.arange(25, dtype=np.int64).reshape(5, 5)
    inputs = volume_inputs(one_hot_volume(disp, 25))
    da = compute_measure("DA", inputs)
    ds = compute_measure("DS", inputs)
    assert da[2, 2] == 1.0 and ds[2, 2] == pytest.approx(0.0)
    # corner windows clamp onto 9 distinct values, the own one 9 times
    assert da[0, 0] == 9.0
    assert ds[0, 0] == pytest.approx(np.log(25.0 / 9.0), rel=1e-6)
    assert compute_measure("MED", inputs)[2, 2] == 12.0
    assert compute_measure("MDD", inputs)[2, 2] == 0.0


def test_distance_to_disparity_edge():
    flat = volume_inputs(one_hot_volume(np.zeros((4, 6), np.int64), 2))
    np.testing.assert_array_equal(compute_measure("DTD", flat), 10.0)
    step = np.zeros((4, 6), np.int64)
    step[:, 3:] = 5
    inputs = volume_inputs(one_hot_volume(step, 6))
    np.testing.assert_array_equal(compute_measure("DTD", inputs)[0],
                                  [2, 1, 0, 0, 1, 2])


def test_var_on_step_map():
    step = np.zeros((5, 6), np.int64)
    step[:, 3:] = 2
    inputs = volume_inputs(one_hot_volume(step, 3))
    got = compute_measure("VAR_3", inputs)
    assert got[2, 0] == 0.0
    # window spanning the step: values {0, 0, 2} per row
    expect = -(4.0 / 3.0 - (2.0 / 3.0) ** 2)
    assert got[2, 2] == pytest.approx(expect, rel=1e-6)


# ---------------------------------------------------------------------------
# image family
# ---------------------------------------------------------------------------

def test_border_distances():
    inputs = volume_inputs(np.zeros((50, 100, 2), np.float32))
    db = compute_measure("DB", inputs)
    assert db[25, 50] == 25.0
    assert db[0, 10] == 0.0 and db[10, 0] == 0.0


def test_left_border_distance_caps_at_dmax():
    inputs = volume_inputs(np.zeros((1, 66, 65), np.float32))
    dlb = compute_measure("DLB", inputs)
    assert dlb[0, 3] == 3.0
    assert dlb[0, 65] == 64.0


def test_horizontal_gradient():
    img = GrayImage(np.tile(np.arange(0, 40, 10, dtype=np.uint8), (2, 1)))
    inputs = volume_inputs(np.zeros((2, 4, 2), np.float32), left_image=img,
                           with_self_volumes=False)
    np.testing.assert_array_equal(compute_measure("HGM", inputs), 10.0)
    flat = volume_inputs(np.zeros((2, 4, 2), np.float32),
                         left_image=GrayImage(np.full((2, 4), 7, np.uint8)),
                         with_self_volumes=False)
    np.testing.assert_array_equal(compute_measure("HGM", flat), 0.0)
    np.testing.assert_array_equal(compute_measure("IVAR", flat), 0.0)


def test_distance_to_intensity_edge():
    img = GrayImage(np.array([[0, 0, 0, 100, 100, 100]] * 2, dtype=np.uint8))
    inputs = volume_inputs(np.zeros((2, 6, 2), np.float32), left_image=img,
                           with_self_volumes=False)
    np.testing.assert_array_equal(compute_measure("DTE", inputs)[0],
                                  [2, 1, 0, 0, 1, 2])


def test_ivar_checker_positive():
    img = GrayImage(np.array([[0, 100], [100, 0]], dtype=np.uint8))
    inputs = volume_inputs(np.zeros((2, 2, 2), np.float32), left_image=img,
                           with_self_volumes=False)
    assert compute_measure("IVAR_3", inputs).min() > 0.0


# ---------------------------------------------------------------------------
# self-matching family
# ---------------------------------------------------------------------------

def test_dts_on_stripes():
    img = GrayImage(np.tile(np.arange(32, dtype=np.uint8) % 4 * 60, (20, 1)))
    inputs = volume_inputs(np.zeros((20, 32, 5), np.float32), left_image=img)
    got = compute_measure("DTS", inputs)
    # period-4 stripes self-match perfectly at offset 4
    assert got[10, 16] == 0.0
    assert CATALOG["DTS"].requires == ("left_self",)


def test_dsm_hand_value():
    inputs = curve_inputs([0.5, 0.9])
    ring = np.array([[[0.5, 0.0, 0.5]]], dtype=np.float32)
    inputs.left_self = SelfCostVolume(ring)
    inputs.right_self = SelfCostVolume(ring)
    assert scalar("DSM", inputs) == pytest.approx(1.0, rel=1e-6)


def test_samm():
    curve = [0.0, 0.3, 0.5, 0.9]
    inputs = curve_inputs(curve)
    ring = np.zeros((1, 1, 7), dtype=np.float32)
    ring[0, 0, 3:] = curve  # positive offsets copy the matching curve
    inputs.left_self = SelfCostVolume(ring)
    assert scalar("SAMM", inputs) == pytest.approx(1.0, rel=1e-6)
    # a flat overlap has no variance to correlate
    flat = curve_inputs([0.5, 0.5, 0.5])
    flat.left_self = SelfCostVolume(np.zeros((1, 1, 5), dtype=np.float32))
    assert scalar("SAMM", flat) == 0.0


# ---------------------------------------------------------------------------
# scanline family
# ---------------------------------------------------------------------------

def path_result(winners):
    per_path = {}
    wta = {}
    for name, d in zip(("lr", "rl", "tb", "bt"), winners):
        costs = one_hot_volume(np.full((1, 1), d, np.int64), 4)
        per_path[name] = costs
        wta[name] = np.full((1, 1), d, dtype=np.int32)
    summed = sum(per_path.values())
    return ScanlineResult(per_path=per_path, summed=summed, path_wta=wta,
                          p1=0.1, p2=0.2)


def test_scs():
    final = one_hot_volume(np.full((1, 1), 2, np.int64), 4)
    three = prepare_inputs(CostVolume(final), scanlines=path_result([2, 2, 3, 2]))
    assert scalar("SCS", three) == pytest.approx(3.0)
    four = prepare_inputs(CostVolume(final), scanlines=path_result([2, 2, 2, 2]))
    assert scalar("SCS", four) == pytest.approx(4.0)


def test_ps():
    curve = np.ones(11, dtype=np.float32)
    curve[2], curve[7] = 0.1, 0.3
    pre = one_hot_volume(np.full((1, 1), 2, np.int64), 11)
    inputs = prepare_inputs(CostVolume(curve.reshape(1, 1, -1)),
                            pre_volume=CostVolume(pre))
    got = scalar("PS", inputs, MeasureParams(gamma_ps=10.0))
    assert got == pytest.approx(1.0, rel=1e-6)  # 2.0 * 0.5 * 1.0
    # separation at or beyond gamma kills the damped margin
    assert scalar("PS", inputs, MeasureParams(gamma_ps=4.0)) == 0.0


# ---------------------------------------------------------------------------
# catalog mechanics
# ---------------------------------------------------------------------------

def test_catalog_counts():
    assert len(ALL_IDS) == 50
    families = {}
    for spec in CATALOG.values():
        families[spec.family] = families.get(spec.family, 0) + 1
    assert families == {"minimum": 10, "window": 6, "curve": 8,
                        "leftright": 7, "disparity": 9, "image": 5,
                        "selfmatch": 3, "scanline": 2}
    assert len(evaluable_ids(include_sgm=False)) == 47
    assert len(evaluable_ids(include_sgm=True)) == 49
    assert not CATALOG["MED"].evaluable
    assert CATALOG["SCS"].sgm_only and CATALOG["PS"].sgm_only


def test_parse_measure_id():
    spec, window = parse_measure_id("VAR_13")
    assert spec.id == "VAR" and window == 13
    spec, window = parse_measure_id("DA_31")
    assert spec.id == "DA" and window == 31
    spec, window = parse_measure_id("MSM")
    assert spec.id == "MSM" and window is None
    with pytest.raises(KeyError):
        parse_measure_id("XYZ")
    with pytest.raises(KeyError):
        parse_measure_id("MSM_7")  # not a windowed measure


def test_resolve_measure_tokens():
    assert resolve_measure_tokens(("all",), True) == list(evaluable_ids(True))
    assert len(resolve_measure_tokens(("all",), False)) == 47
    assert resolve_measure_tokens(("msm", "MSM", "pkr"), False) == ["MSM", "PKR"]
    assert resolve_measure_tokens(("VAR_13", "all"), False)[0] == "VAR_13"
    with pytest.raises(KeyError):
        resolve_measure_tokens(("QQQ",), True)


def test_oriented_flips_lower_polarity():
    a = curve_inputs(CURVE_A)
    assert scalar("DAM", a, oriented=True) == pytest.approx(-3.0)
    assert scalar("MSM", a, oriented=True) == pytest.approx(-0.1)


def test_windowed_default_window_from_params():
    disp = np.arange(49, dtype=np.int64).reshape(7, 7)
    inputs = volume_inputs(one_hot_volume(disp, 49))
    via_suffix = compute_measure("VAR_3", inputs)
    via_params = compute_measure("VAR", inputs, MeasureParams(window=3))
    np.testing.assert_array_equal(via_suffix, via_params)
    assert not np.array_equal(via_suffix, compute_measure("VAR", inputs))


def test_missing_inputs_raise():
    bare = curve_inputs(CURVE_B)
    with pytest.raises(ValueError, match="requires input"):
        compute_measure("DTS", bare)
    with pytest.raises(ValueError, match="requires input"):
        compute_measure("SCS", bare)


def test_non_finite_results_raise():
    with np.errstate(all="ignore"):
        with pytest.raises(FloatingPointError):
            compute_measure("PER", curve_inputs(CURVE_A),
                            MeasureParams(s_per=0.0))
