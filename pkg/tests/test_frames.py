
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dualframe import frames as fr
from dualframe.charts import dual_from_parameter, make_chart, random_parameter
from dualframe.errors import InvalidDimensions, NotADual, NotOneUniform

def test_example_frame_operator_and_canonical_dual(example_frame):
    info = fr.frame_operator(example_frame)
    assert np.allclose(info.S, [[2, 1], [1, 2]])
    assert (info.lower_bound, info.upper_bound) == pytest.approx((1.0, 3.0))
    G = fr.canonical_dual(example_frame).dual.vectors
    assert np.allclose(G, np.array([[2, -1], [-1, 2], [1, 1]]) / 3, atol=1e-15)

def test_frame_validation():
    with pytest.raises(InvalidDimensions):
        fr.Frame(np.zeros((1, 2)))
    with pytest.raises(InvalidDimensions):
        fr.Frame(np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]))

def test_frame_is_read_only(example_frame):
    with pytest.raises(ValueError):
        example_frame.vectors[0, 0] = 5

def test_not_a_dual_reports_residual(example_frame):
    with pytest.raises(NotADual) as err:
        fr.DualPair(example_frame, example_frame)
    assert err.value.residual == pytest.approx(fr.duality_residual(example_frame, example_frame))
    assert err.value.residual > 1

def test_constructors():
    mb = fr.mercedes_benz()
    assert fr.is_tight(mb) and fr.is_uniform(mb) and fr.is_equiangular(mb)
    assert fr.frame_operator(mb).upper_bound == pytest.approx(1.5)
    for n in (1, 2, 3, 4):
        s = fr.simplex(n)
        G = s.vectors @ s.vectors.conj().T
        assert np.allclose(np.diag(G), 1) and np.allclose(G[~np.eye(n + 1, dtype=bool)], -1 / n)
    h = fr.harmonic(7, 3)
    assert fr.is_parseval(h) and fr.is_uniform(h) and not fr.is_equiangular(h)
    assert fr.is_equiangular(fr.harmonic(7, 3, columns=[1, 2, 4]))

def test_random_frame_is_seed_deterministic():
    a, b = fr.random_frame(7, 3, 42), fr.random_frame(7, 3, 42)
    assert np.array_equal(a.vectors, b.vectors)
    assert not np.array_equal(a.vectors, fr.random_frame(7, 3, 43).vectors)

def test_construct_dispatch():
    assert fr.construct("mb").N == 3
    assert fr.construct("explicit", vectors=[[1, 0], [0, 1], [1, 1]]).N == 3
    with pytest.raises(InvalidDimensions):
        fr.construct("harmonic", n=2)
    with pytest.raises(InvalidDimensions):
        fr.construct("nonsense")

dims = st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(n, 8)))

@given(dims, st.integers(0, 2**32 - 1))
def test_trace_identity(nN, seed):
    n, N = nN
    rng = np.random.default_rng(seed)
    chart = make_chart(fr.random_frame(N, n, seed))
    pair = dual_from_parameter(chart, random_parameter(chart, rng, 2.0))
    assert complex(pair.diagonal_products().sum()) == pytest.approx(n, abs=1e-9)

@given(dims, st.integers(0, 2**32 - 1))
def test_canonical_dual_of_canonical_dual_is_the_frame(nN, seed):
    n, N = nN
    F = fr.random_frame(N, n, seed)
    back = fr.canonical_dual(fr.canonical_dual(F).dual).dual
    assert np.allclose(back.vectors, F.vectors, atol=1e-8 * (1 + np.abs(F.vectors).max()))

@given(st.integers(0, 2**32 - 1), st.floats(0.2, 5.0))
def test_unitary_and_scaling_invariance(seed, a):
    rng = np.random.default_rng(seed)
    F = fr.random_frame(6, 3, seed)
    U = fr.random_unitary(3, rng)
    G = fr.canonical_dual(F).dual.vectors
    GU = fr.canonical_dual(fr.transformed(F, U)).dual.vectors
    assert np.allclose(GU, G @ U.T, atol=1e-10)
    Ga = fr.canonical_dual(fr.scaled(F, a)).dual.vectors
    assert np.allclose(Ga, G / a, atol=1e-10)

def test_uniform_tight_canonical_is_one_and_two_uniform():
    for F in (fr.harmonic(3, 2), fr.simplex(3), fr.harmonic(7, 3, columns=[1, 2, 4])):
        pair = fr.canonical_dual(F)
        assert fr.is_one_uniform_dual(pair)
        assert fr.is_two_uniform_dual(pair, 1e-9)
    # 1-uniform but not 2-uniform
    pair = fr.canonical_dual(fr.harmonic(5, 2))
    assert fr.is_one_uniform_dual(pair) and not fr.is_two_uniform_dual(pair, 1e-9)

def test_gap_requires_one_uniform(example_frame):
    assert fr.one_uniform_gap(fr.canonical_dual(example_frame)) >= -1e-12
    with pytest.raises(NotOneUniform):
        fr.one_uniform_gap(fr.canonical_dual(fr.explicit([[1, 0], [2, 0], [0, 1]])))

@given(st.integers(0, 2**32 - 1))
def test_gap_is_nonnegative_on_one_uniform_duals(seed):
    from dualframe.charts import one_uniform_family

    rng = np.random.default_rng(seed)
    chart = make_chart(fr.random_frame(6, 2, seed))
    fam = one_uniform_family(chart)
    assert fam is not None
    pair = dual_from_parameter(chart, fam.sample(rng, 1.5))
    assert fr.one_uniform_gap(pair) >= -1e-10
