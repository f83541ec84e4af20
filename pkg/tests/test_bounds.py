import math

import numpy as np
import pytest

import oracles
from ringlattice.bounds import (CLLL, ELLL, HERMITE, PSEUDO_QLLL, QLLL, RLLL, LllVariant,
                                Verdict, compare_defect, compare_first_norm, det_generator,
                                expected_list_size, first_minimum_bound, hermite,
                                hermite_upper, lll_defect_bound, lll_first_bound,
                                lll_mult_ratio, minima_product_bound, sivp_defect_bound, xi)
from ringlattice.rings import MultCost

# Hermite constants recomputed by shortest-vector search on A1, A2, A3, D4, D5,
# E6, E7, E8 (see oracles.hermite_from_cartan), frozen here
HERMITE_ORACLE = {1: 1.0, 2: 1.1547005383792512, 3: 1.259921049894873, 4: 1.4142135623730947,
                  5: 1.5157165665103969, 6: 1.6653663553112072, 7: 1.8114473285278108,
                  8: 2.0000000000000004}

# roots of the asymptotic conditions, located independently by bisection
THRESHOLDS = {
    ("G", "Z", "norm"): 0.75,
    ("G", "Z", "defect"): 0.5041737124933307,
    ("E", "Z", "norm"): 0.341751709536137,
    ("E", "Z", "defect"): 0.33338167063126023,
    ("H", "E", "norm"): 0.5446581987385205,
    ("H", "E", "defect"): 0.5007862688331038,
    ("H", "Z", "norm"): 0.5041737124933307,
    ("H", "Z", "defect"): 0.5000000002328306,
}
VARIANT = {"Z": RLLL, "G": CLLL, "E": ELLL, "H": QLLL, "L": PSEUDO_QLLL}


def test_hermite_table_matches_oracle():
    for K, v in HERMITE_ORACLE.items():
        assert HERMITE[K] == pytest.approx(v, rel=1e-12)
        assert hermite(K) == (HERMITE[K], True)
    assert hermite(24) == (4.0, True)
    assert hermite(9)[1] is False


@pytest.mark.parametrize("K", [1, 2, 4])
def test_hermite_oracle_small(K):
    assert oracles.hermite_from_cartan(K) == pytest.approx(HERMITE_ORACLE[K], rel=1e-12)


def test_hermite_upper():
    assert hermite_upper(1) == pytest.approx(9 / 8)
    assert hermite_upper(2) == pytest.approx(4 / math.pi)
    for K in list(range(1, 9)) + [24]:
        assert hermite_upper(K) >= HERMITE[K]
    with pytest.raises(ValueError):
        hermite_upper(0)


def test_first_minimum_bound():
    assert first_minimum_bound("Z", 1, 1.0) == pytest.approx(1)
    for K in (1, 2, 3):
        assert first_minimum_bound("E", K, 2.0) / first_minimum_bound("G", K, 2.0) == \
            pytest.approx(math.sqrt(3) / 2)
        assert first_minimum_bound("H", K, 2.0) / first_minimum_bound("L", K, 2.0) == \
            pytest.approx(1 / math.sqrt(2))


def test_product_and_defect_bounds():
    for K in (1, 2, 4):
        assert minima_product_bound("Z", K, K, 3.0) == pytest.approx(HERMITE[K] ** K * 9)
        assert sivp_defect_bound("E", K) / sivp_defect_bound("G", K) == \
            pytest.approx(0.75 ** (K / 4))
        assert sivp_defect_bound("H", K) / sivp_defect_bound("L", K) == \
            pytest.approx(0.5 ** (K / 4))
    with pytest.raises(ValueError):
        minima_product_bound("G", 2, 3, 1.0)
    assert det_generator("H", 3) == 0.125


def test_lll_bounds():
    assert lll_first_bound("G", 1, 1, 3.0) == pytest.approx(9)
    assert lll_first_bound("G", 1, 3, 1.0) == pytest.approx(2)
    assert lll_first_bound("E", 1, 3, 1.0) == pytest.approx(1.5)
    assert lll_defect_bound("G", 1, 1) == 1
    assert lll_defect_bound("G", 1, 2) == pytest.approx(math.sqrt(2))
    assert lll_defect_bound("H", 1, 2) == pytest.approx(math.sqrt(2))
    assert lll_defect_bound("L", 1, 3) == math.inf
    with pytest.raises(ValueError):
        lll_first_bound("G", 0.5, 2, 1.0)
    d = np.linspace(0.51, 1, 30)
    for f in (lambda x: lll_first_bound("G", x, 4, 1.0), lambda x: lll_defect_bound("H", x, 4)):
        v = [f(x) for x in d]
        assert np.all(np.diff(v) < 0)


@pytest.mark.parametrize("key", list(THRESHOLDS))
def test_thresholds(key):
    a, b, kind = key
    f = compare_first_norm if kind == "norm" else compare_defect
    v1, v2 = VARIANT[a], VARIANT[b]
    t = THRESHOLDS[key]
    assert f(v1, v2, 1.0).thresholds == pytest.approx((t,), abs=1e-9)
    # symmetric call reports the same crossing with swapped verdict
    assert f(v2, v1, 1.0).thresholds == f(v1, v2, 1.0).thresholds
    swap = {Verdict.V1_SMALLER: Verdict.V2_SMALLER, Verdict.V2_SMALLER: Verdict.V1_SMALLER}
    for d in (t - 0.01, min(t + 0.01, 1.0)):
        if d <= max(v1.ring.props.eps2, v2.ring.props.eps2):
            continue
        assert f(v2, v1, d).verdict is swap[f(v1, v2, d).verdict]
    lo, hi = max(v1.ring.props.eps2, v2.ring.props.eps2) + 1e-6, 1.0
    if key == ("G", "Z", "norm"):
        # tangent: the curves touch at 3/4 without crossing
        assert f(v1, v2, t).verdict is Verdict.EQUAL
        assert f(v1, v2, t - 1e-4).verdict is f(v1, v2, hi).verdict is Verdict.V2_SMALLER
    elif t - 1e-4 > lo:
        assert f(v1, v2, t - 1e-4).verdict is not f(v1, v2, hi).verdict


def test_thresholds_by_bisection():
    from scipy.optimize import brentq
    assert brentq(lambda d: (d - 0.25) ** 4 - (d - 0.5), 0.5 + 1e-12, 0.6) == \
        pytest.approx(THRESHOLDS[("G", "Z", "defect")], abs=1e-12)
    assert 0.75 - 1 / math.sqrt(6) == pytest.approx(THRESHOLDS[("E", "Z", "norm")], abs=1e-12)


def test_verdicts():
    assert compare_first_norm(CLLL, RLLL, 0.75).verdict is Verdict.EQUAL
    assert compare_first_norm(CLLL, RLLL, 0.9).verdict is Verdict.V2_SMALLER
    for d in (0.34, 0.5, 0.75, 1.0):
        assert compare_first_norm(ELLL, CLLL, max(d, 0.51)).verdict is Verdict.V1_SMALLER
    assert compare_first_norm(ELLL, RLLL, 0.34).verdict is Verdict.V2_SMALLER
    assert compare_first_norm(ELLL, RLLL, 0.35).verdict is Verdict.V1_SMALLER
    assert compare_defect(ELLL, CLLL, 0.8).thresholds == ()
    with pytest.raises(ValueError):
        compare_first_norm(ELLL, CLLL, 0.4)


def test_list_size():
    # n = D_r K real dimensions: the unit disc of Z^2 has area pi (5 points
    # counting the origin), the 4-dimensional unit ball volume pi^2 / 2
    assert expected_list_size("Z", 2, 1, 1) == pytest.approx(math.pi)
    assert expected_list_size("G", 2, 1, 1) == pytest.approx(math.pi ** 2 / 2)
    for K in (1, 2, 3):
        assert expected_list_size("H", K, 2.0, 1.5) / expected_list_size("L", K, 2.0, 1.5) == \
            pytest.approx(2 ** K)
    assert expected_list_size("G", 2, 1.7, 1.3) == pytest.approx(
        expected_list_size("Z", 4, 1.7, 1.3 ** 2))
    with pytest.raises(ValueError):
        expected_list_size("Z", 2, 0, 1)


def test_mult_ratio_model():
    K = 8
    c, r, q = LllVariant("G", K), LllVariant("Z", 2 * K), LllVariant("H", K // 2)
    assert lll_mult_ratio(c, r, 8, 16) == pytest.approx(0.5)
    r4 = LllVariant("Z", 4 * (K // 2))
    assert lll_mult_ratio(q, r4, 4, 16) == pytest.approx(0.25)
    assert lll_mult_ratio(q, r4, 4, 16, cost=MultCost.REDUCED) == pytest.approx(1 / 8)
    assert lll_mult_ratio(c, r, 8, 16, cost=MultCost.REDUCED) == pytest.approx(3 / 8)
    assert xi(QLLL, CLLL) == 2 and xi(QLLL, PSEUDO_QLLL) == 1
    with pytest.raises(ValueError):
        xi(LllVariant("E"), LllVariant("H"))
