import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolecc.correct import (
    _subcube_values,
    CorrectorParams,
    ReducedOracle,
    SubcubeReducedOracle,
    base_reduce,
    base_reduce_many,
    correct_small_error,
    levels_for,
    reduced_oracle,
    reduction_cost,
    subcube_reduce,
    unique_correct,
    unique_correct_budget,
)
from boolecc.gadget import gadget_q
from boolecc.groups import Cyclic, Integers, Product, Rationals
from boolecc.oracle import CorruptedOracle, FunctionOracle, RandomDensity
from boolecc.poly import evaluate, evaluate_many, random_linear, random_poly

GROUPS = [Cyclic(2), Cyclic(6), Integers(), Rationals(), Product((Cyclic(2), Cyclic(3)))]


def test_params_validation():
    CorrectorParams()
    for bad in ({"delta": 0.25}, {"reps": 4}, {"k_subcube": 3}, {"t_levels": -1}, {"d": 0}):
        with pytest.raises(ValueError):
            CorrectorParams(**bad)
    assert CorrectorParams(d=2, k_subcube=6, delta=0.1).d == 2
    assert CorrectorParams().to_json()["k_subcube"] == 6


def test_levels_for():
    assert levels_for(0.01, 0.01) == 0
    assert levels_for(0.1, 1e-3) == 12  # log_1.1(3) rounded up
    with pytest.raises(ValueError):
        levels_for(0, 0.1)


def test_reduction_cost_d1():
    assert reduction_cost(1) == 63


@pytest.mark.parametrize("G", GROUPS)
def test_stages_exact_on_clean_oracle(G):
    rng = np.random.default_rng(0)
    for trial in range(10):
        n = int(rng.integers(4, 30))
        P = random_linear(G, n, rng)
        f = CorruptedOracle(P)
        a = rng.integers(0, 2, n)
        want = evaluate(P, a)
        assert correct_small_error(f, a, 3, trial) == want
        assert base_reduce(f, a, 1, trial) == want
        assert subcube_reduce(f, a, 5, 1, trial) == want
        assert reduced_oracle(f, 1, 1, trial).query(a) == want
        assert unique_correct(f, a, CorrectorParams(k_subcube=4, seed=trial)) == want


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_exactness_property_degree2(seed):
    rng = np.random.default_rng(seed)
    G = Cyclic(int(rng.integers(2, 8)))
    n = int(rng.integers(6, 16))
    P = random_poly(G, n, 2, rng)
    f = CorruptedOracle(P)
    A = rng.integers(0, 2, (5, n)).astype(np.uint8)
    assert np.array_equal(base_reduce_many(f, A, 2, rng, rho=0.5), evaluate_many(P, A))
    assert subcube_reduce(f, A[0], 6, 2, seed) == evaluate(P, A[0])


@pytest.mark.parametrize("n", [10, 1000, 100_000])
def test_small_error_query_count(n):
    P = random_linear(Cyclic(2), n, 1)
    f = CorruptedOracle(P, RandomDensity(0.01, key=3))
    correct_small_error(f, np.zeros(n, np.uint8), reps=1, seed=0)
    assert f.count == gadget_q(n) == 2 * (n - 1).bit_length() + 3
    f.reset_count()
    correct_small_error(f, np.zeros(n, np.uint8), reps=5, seed=0)
    assert f.count == 5 * gadget_q(n)


def test_base_reduce_query_count():
    f = CorruptedOracle(random_linear(Cyclic(2), 50, 0))
    base_reduce(f, np.zeros(50, np.uint8), 1, 0)
    assert f.count == 63 == 3 * 21


def test_subcube_query_count():
    f = CorruptedOracle(random_linear(Cyclic(3), 40, 0))
    subcube_reduce(f, np.zeros(40, np.uint8), 7, 1, 0)
    assert f.count == 1 << 7


@pytest.mark.parametrize("t", [0, 1])
def test_unique_correct_query_count(t):
    n = 64
    params = CorrectorParams(k_subcube=5, t_levels=t, reps=3)
    f = CorruptedOracle(random_linear(Cyclic(2), n, 0), RandomDensity(0.1, key=1))
    unique_correct(f, np.ones(n, np.uint8), params)
    assert f.count == unique_correct_budget(n, params) == gadget_q(n) * 3 * 63**t * 32


def test_reduced_oracle_t0_is_identity():
    f = CorruptedOracle(random_linear(Cyclic(5), 20, 0), RandomDensity(0.3, key=2))
    g = reduced_oracle(f, 1, 0, seed=1)
    X = np.random.default_rng(0).integers(0, 2, (50, 20)).astype(np.uint8)
    assert np.array_equal(g.query_many(X), f.query_many(X))
    assert g.count == f.count == 100


def test_derived_oracles_deterministic():
    f = CorruptedOracle(random_linear(Cyclic(2), 30, 0), RandomDensity(0.05, key=2))
    X = np.random.default_rng(1).integers(0, 2, (40, 30)).astype(np.uint8)
    g1, g2 = reduced_oracle(f, 1, 1, seed=9), reduced_oracle(f, 1, 1, seed=9)
    assert isinstance(g1, ReducedOracle)
    assert np.array_equal(g1.query_many(X), g2.query_many(X))
    assert np.array_equal(g1.query_many(X), g1.query_many(X))
    s1, s2 = SubcubeReducedOracle(f, 6, 1, 4), SubcubeReducedOracle(f, 6, 1, 4)
    assert np.array_equal(s1.query_many(X), s2.query_many(X))


def test_unique_correct_replay():
    f = CorruptedOracle(random_linear(Cyclic(7), 40, 3), RandomDensity(0.15, key=4))
    params = CorrectorParams(seed=11)
    a = np.random.default_rng(2).integers(0, 2, 40)
    assert unique_correct(f, a, params) == unique_correct(f, a, params)


def test_stage2_does_not_increase_error():
    n = 128
    P = random_linear(Cyclic(2), n, 5)
    f = CorruptedOracle(P, RandomDensity(2e-4, key=6))
    rng = np.random.default_rng(7)
    A = rng.integers(0, 2, (50_000, n)).astype(np.uint8)
    truth = evaluate_many(P, A)
    before = int((f.query_many(A) != truth).sum())
    after = int((base_reduce_many(f, A, 1, rng) != truth).sum())
    # ≈10 raw errors expected; 3(21γ)² predicts ≈3 after one level
    assert after <= before


def test_subcube_reduce_large_error():
    n = 64
    P = random_linear(Cyclic(2), n, 8)
    f = CorruptedOracle(P, RandomDensity(0.2, key=9))
    rng = np.random.default_rng(10)
    hits = sum(subcube_reduce(f, a, 10, 1, rng) == evaluate(P, a) for a in rng.integers(0, 2, (200, n)))
    assert hits >= 0.75 * 200


def test_subcube_fallback_is_zero():
    G = Cyclic(3)
    # restricted to the cube with h = identity this is 1 + y0·y1: distance exactly
    # 1/4 from the constant 1, so unique decoding fails and the fallback fires
    f = FunctionOracle(G, 2, lambda X: (1 + X[:, 0] * X[:, 1]).astype(np.int64) % 3)
    A = np.zeros((1, 2), np.uint8)
    assert _subcube_values(f, A, np.array([[0, 1]]), 2, 1).tolist() == [0]
    g = FunctionOracle(G, 2, lambda X: np.ones(len(X), np.int64))
    assert _subcube_values(g, A, np.array([[0, 1]]), 2, 1).tolist() == [1]
