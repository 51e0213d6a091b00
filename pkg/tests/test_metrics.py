from itertools import combinations
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dualframe import metrics as mt
from dualframe.charts import dual_from_parameter, make_chart, random_parameter
from dualframe.errors import HypothesisViolated, InvalidDimensions, PatternBudgetExceeded
from dualframe.frames import canonical_dual, harmonic, random_frame, random_unitary, simplex, transformed
from dualframe.metrics import AverageErrorSpec, Measure

import reference as ref

FRO_EXAMPLE = 0.720082299823095581  # sqrt(14/27), mpmath
HARMONIC_3_2 = [0.66666666666666666667, 1.0540925533894597773, 1.4142135623730950488]  # mpmath brute force
SIMPLEX_3 = [0.75, 1.1180339887498948482, 1.436140661634507165, 1.7320508075688772935]


def _random_pair(seed, N=6, n=3, radius=1.0):
    rng = np.random.default_rng(seed)
    chart = make_chart(random_frame(N, n, seed))
    return dual_from_parameter(chart, random_parameter(chart, rng, radius))


def test_example_values(example_frame):
    pair = canonical_dual(example_frame)
    for p in (1.5, 2, 4):
        assert mt.average_value(pair, "spec", 1, p) == pytest.approx(2 / 3, abs=1e-12)
    assert mt.average_value(pair, "fro", 1, 2) == pytest.approx(FRO_EXAMPLE, abs=1e-12)
    assert mt.average_value(pair, "fro", 3, 2) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_frozen_etf_values():
    for F, want in ((harmonic(3, 2), HARMONIC_3_2), (simplex(3), SIMPLEX_3)):
        pair = canonical_dual(F)
        for m, w in enumerate(want, 1):
            assert mt.average_value(pair, "fro", m, 3) == pytest.approx(w, abs=1e-12)
            assert mt.etf_average_prediction(F, m) == pytest.approx(w, abs=1e-14)


def test_prediction_needs_an_etf():
    with pytest.raises(HypothesisViolated):
        mt.etf_average_prediction(harmonic(7, 3), 2)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_measures_against_explicit_matrices(seed, m):
    pair = _random_pair(seed)
    idx = tuple(sorted(np.random.default_rng(seed).choice(6, m, replace=False).tolist()))
    E = ref.error_matrix(ref.rows(pair.frame), ref.rows(pair.dual), idx)
    assert np.allclose(mt.error_operator(pair, idx), np.array(E), atol=1e-12)
    assert mt.measure_frobenius(pair, idx) == pytest.approx(ref.frobenius(E), rel=1e-12, abs=1e-12)
    assert mt.measure_spectral_radius(pair, idx) == pytest.approx(ref.spectral_radius(E), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_numerical_radius_patterns_against_grid(seed):
    pair = _random_pair(seed)
    for idx in ((0,), (1, 4), (0, 2, 5)):
        E = ref.error_matrix(ref.rows(pair.frame), ref.rows(pair.dual), idx)
        assert mt.measure_numerical_radius(pair, idx) == pytest.approx(ref.numerical_radius(E), abs=1e-9)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_measure_ordering_per_pattern(seed, m):
    pair = _random_pair(seed, radius=2.0)
    pats = mt.enumerate_patterns(6, m)
    rho = mt.batch_values(pair.frame.vectors, pair.dual.vectors, "spec", pats)
    omega = mt.batch_values(pair.frame.vectors, pair.dual.vectors, "num", pats)
    fro = mt.batch_values(pair.frame.vectors, pair.dual.vectors, "fro", pats)
    assert np.all(rho <= omega + 1e-10) and np.all(omega <= fro + 1e-10)


@given(st.integers(0, 2**32 - 1), st.sampled_from(list(Measure)), st.integers(1, 3), st.floats(1.1, 6))
def test_unitary_invariance(seed, which, m, p):
    rng = np.random.default_rng(seed)
    pair = _random_pair(seed)
    U = random_unitary(3, rng)
    F2, G2 = transformed(pair.frame, U), transformed(pair.dual, U)
    from dualframe.frames import DualPair

    a = mt.average_value(pair, which, m, p)
    b = mt.average_value(DualPair(F2, G2), which, m, p)
    assert b == pytest.approx(a, rel=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_lower_bound(seed):
    pair = _random_pair(seed, radius=3.0)
    for which in Measure:
        assert mt.average_value(pair, which, 1, 2.5) >= 0.5 - 1e-12


def test_full_erasure_is_sqrt_n():
    for F in (random_frame(5, 2, 1), harmonic(4, 3), simplex(4)):
        assert mt.average_value(canonical_dual(F), "fro", F.N, 2) == pytest.approx(math.sqrt(F.n), abs=1e-12)


def test_enumeration_order_and_budget():
    pats = mt.enumerate_patterns(5, 2)
    assert [tuple(r) for r in pats] == list(combinations(range(5), 2))
    with pytest.raises(PatternBudgetExceeded):
        mt.enumerate_patterns(30, 15)
    with pytest.raises(InvalidDimensions):
        mt.enumerate_patterns(3, 4)


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=40), st.floats(1.01, 10), st.floats(1e-3, 1e3))
def test_lp_mean_properties(values, p, scale):
    v = mt.lp_mean(values, p)
    assert min(values) * (1 - 1e-12) <= v <= max(values) * (1 + 1e-12)
    assert mt.lp_mean([x * scale for x in values], p) == pytest.approx(v * scale, rel=1e-9, abs=1e-300)
    assert mt.lp_mean(values, p + 1) >= v * (1 - 1e-12)


def test_lp_mean_matches_reference():
    vals = [0.3, 1.2, 2.5]
    assert mt.lp_mean(vals, 3) == pytest.approx(ref.lp_mean(vals, 3), rel=1e-15)


def test_spec_validation():
    with pytest.raises(ValueError):
        AverageErrorSpec("fro", 1, 1.0)
    with pytest.raises(ValueError):
        AverageErrorSpec("fro", 1, float("inf"))
    with pytest.raises(InvalidDimensions):
        AverageErrorSpec("fro", 0, 2)
    with pytest.raises(ValueError):
        Measure.parse("bogus")
    assert AverageErrorSpec("omega", 2, 3).measure is Measure.NUMERICAL


def test_pattern_labels():
    p = mt.ErasurePattern((3, 0))
    assert p.indices == (0, 3) and p.label == "1;4"
    assert mt.ErasurePattern.from_label("1;4") == p
    with pytest.raises(InvalidDimensions):
        mt.ErasurePattern((1, 1))


def test_report(example_frame):
    rep = mt.average_error(canonical_dual(example_frame), AverageErrorSpec("fro", 1, 2))
    assert [lab for lab, _ in rep.rows()] == ["1", "2", "3"]
    assert rep.worst_case == pytest.approx(math.sqrt(5) / 3)
    assert rep.lower_bound == pytest.approx(2 / 3)
