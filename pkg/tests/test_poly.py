import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolecc.cube import SubcubeEmbedding, embed, random_embedding
from boolecc.groups import Cyclic, GroupValue, Integers, Product, Rationals
from boolecc.poly import (
    DegreeExceededError,
    MultilinearPoly,
    Table,
    ball_interpolation_coeffs,
    evaluate,
    evaluate_many,
    exact_distance,
    interpolate,
    monomials,
    random_poly,
    restrict,
    tabulate,
)

GROUPS = [Cyclic(2), Cyclic(3), Cyclic(12), Integers(), Rationals(), Product((Cyclic(2), Integers()))]


def table_by_loop(P):
    """Oracle: evaluate P point by point straight from its coefficients."""
    G = P.group
    vals = []
    for x in range(1 << P.n):
        acc = G.zero
        for mon, c in P.coeffs.items():
            if all(x >> i & 1 for i in mon):
                acc = G.add(acc, c)
        vals.append(acc)
    return Table(G, P.n, G.asarray(vals))


def test_evaluate_examples():
    G = Cyclic(2)
    assert evaluate(MultilinearPoly(G, 3, 0, {(): 1}), "101") == GroupValue(G, 1)
    assert evaluate(MultilinearPoly(G, 2, 1, {(0,): 1, (1,): 1}), "11") == GroupValue(G, 0)
    H = Cyclic(5)
    assert evaluate(MultilinearPoly(H, 2, 2, {(0, 1): 3}), "10") == GroupValue(H, 0)
    with pytest.raises(ValueError):
        evaluate(MultilinearPoly(G, 3, 1, {}), "11")


def test_invariants_enforced():
    G = Cyclic(4)
    P = MultilinearPoly(G, 3, 1, {(0,): 0, (2,): 3})
    assert P.coeffs == {(2,): 3}
    assert MultilinearPoly.zero(G, 3, 1).coeffs == {}
    with pytest.raises(DegreeExceededError):
        MultilinearPoly(G, 3, 1, {(0, 1): 1})
    with pytest.raises(ValueError):
        MultilinearPoly(G, 3, 2, {(0, 0): 1})


def test_interpolate_examples():
    G = Cyclic(7)
    const = Table(G, 3, G.asarray([4] * 8))
    assert interpolate(const).coeffs == {(): 4}
    assert interpolate(Table(G, 1, G.asarray([0, 5]))).coeffs == {(0,): 5}
    full = Table(G, 2, G.asarray([0, 0, 0, 1]))
    with pytest.raises(DegreeExceededError) as e:
        interpolate(full, d_max=1)
    assert e.value.monomial == (0, 1)


@pytest.mark.parametrize("G", GROUPS)
def test_round_trip_against_loop(G):
    rng = np.random.default_rng(hash(G.kind) % 2**32)
    for trial in range(1000 if G.kind == "cyclic" else 150):
        n = int(rng.integers(0, 7))
        d = int(rng.integers(0, n + 1))
        P = random_poly(G, n, d, rng, density=0.6)
        T = tabulate(P)
        assert T == table_by_loop(P)
        assert interpolate(T, d_max=d) == P


@given(st.integers(0, 2**16 - 1), st.integers(1, 6))
@settings(max_examples=100, deadline=None)
def test_evaluate_many_matches_evaluate(seed, n):
    rng = np.random.default_rng(seed)
    P = random_poly(Integers(), n, min(n, 3), rng)
    X = rng.integers(0, 2, (8, n)).astype(np.uint8)
    many = evaluate_many(P, X)
    assert [evaluate(P, x).payload for x in X] == list(many)


def test_exact_distance():
    G = Cyclic(2)
    x1 = tabulate(MultilinearPoly(G, 2, 1, {(0,): 1}))
    x2 = tabulate(MultilinearPoly(G, 2, 1, {(1,): 1}))
    assert exact_distance(x1, x1) == 0
    assert exact_distance(x1, x2) == Fraction(1, 2)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_dlsz_exhaustive(m):
    """Distinct degree-≤d polynomials differ on at least a 2^-d fraction (n ≤ 4, d ≤ 2)."""
    for n, d in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1)] + ([(4, 2)] if m == 2 else []):
        mons = monomials(n, d)
        E = np.array([[all(x >> i & 1 for i in mon) for mon in mons] for x in range(1 << n)], dtype=np.int64)
        # nonzero difference polynomials suffice: δ(P, Q) = Pr[P − Q ≠ 0]
        C = np.array(list(itertools.product(range(m), repeat=len(mons)))[1:], dtype=np.int64)
        nonzero = ((C @ E.T) % m != 0).sum(axis=1)
        assert nonzero.min() * (1 << d) >= 1 << n


def test_dlsz_random_distinct_pairs():
    rng = np.random.default_rng(5)
    G = Cyclic(3)
    for _ in range(200):
        P, Q = random_poly(G, 6, 1, rng), random_poly(G, 6, 1, rng)
        if P != Q:
            assert exact_distance(tabulate(P), tabulate(Q)) >= Fraction(1, 2)


def test_restrict_examples():
    G = Cyclic(5)
    P = MultilinearPoly(G, 3, 2, {(0, 2): 2, (1,): 1})
    ident = SubcubeEmbedding(3, 3, "000", [2, 0, 1])
    R = restrict(P, ident)
    assert R.coeffs == {(1, 2): 2, (0,): 1}
    one = SubcubeEmbedding(1, 1, "1", [0])
    g = MultilinearPoly(G, 1, 1, {(0,): 3})
    assert restrict(g, one).coeffs == {(): 3, (0,): G.neg(3)}


@pytest.mark.parametrize("G", [Cyclic(2), Cyclic(6), Integers(), Rationals()])
def test_restrict_consistency(G):
    rng = np.random.default_rng(11)
    for _ in range(1000 if G.kind == "cyclic" else 250):
        n = int(rng.integers(1, 11))
        k = int(rng.integers(1, min(n, 4) + 1))
        P = random_poly(G, n, int(rng.integers(0, 3)), rng, density=0.5)
        emb = random_embedding(n, k, rng)
        R = restrict(P, emb)
        assert R.degree <= P.degree
        y = rng.integers(0, 2, k)
        assert evaluate(R, y) == evaluate(P, embed(emb, y))


def check_ball_monomial_basis(k, d, center):
    """Oracle: Σ α_b [I ⊆ supp b] = [I = ∅] for every |I| ≤ d (linear in P)."""
    terms = ball_interpolation_coeffs(k, d, center)
    for mon in monomials(k, d):
        s = sum(a for b, a in terms if all(b[i] for i in mon))
        assert s == (1 if not mon else 0), (center, mon)
    return terms


def test_ball_examples():
    assert ball_interpolation_coeffs(3, 2, (0, 0, 0)) == [((0, 0, 0), 1)]
    assert sorted(ball_interpolation_coeffs(2, 1, (1, 1))) == sorted([((1, 1), -1), ((0, 1), 1), ((1, 0), 1)])
    assert sorted(ball_interpolation_coeffs(4, 1, (1, 1, 0, 0))) == sorted(
        [((1, 1, 0, 0), -1), ((0, 1, 0, 0), 1), ((1, 0, 0, 0), 1)])
    with pytest.raises(ValueError):
        ball_interpolation_coeffs(1, 2, (1,))


def test_ball_weight_forty():
    terms = check_ball_monomial_basis(40, 1, [1] * 20 + [0] * 20)
    assert len(terms) == 21
    assert terms[0] == (tuple([1] * 20 + [0] * 20), -19)
    assert all(a == 1 for _, a in terms[1:])
    assert sum(a for _, a in terms) == 1


@pytest.mark.parametrize("k", range(1, 6))
def test_ball_identity_exhaustive_mod2(k):
    """All degree-≤d polynomials over cyclic(2), every center, by matrix evaluation."""
    for d in range(0, min(k, 2) + 1):
        mons = monomials(k, d)
        C = np.array(list(itertools.product(range(2), repeat=len(mons))), dtype=np.int64)
        for c in itertools.product(range(2), repeat=k):
            terms = check_ball_monomial_basis(k, d, c)
            B = np.array([[all(b[i] for i in mon) for mon in mons] for b, _ in terms], dtype=np.int64)
            alpha = np.array([a for _, a in terms], dtype=np.int64)
            lhs = (C @ B.T) % 2 @ alpha % 2
            assert np.array_equal(lhs, C[:, 0] % 2)  # P(0^k) is the constant term
            assert sum(alpha) == 1


def test_json_roundtrip():
    G = Product((Cyclic(3), Rationals()))
    P = MultilinearPoly(G, 4, 2, {(): (1, Fraction(1, 2)), (0, 3): (2, Fraction(-3))})
    obj = P.to_json()
    assert obj["terms"][1] == {"vars": [0, 3], "coeff": [2, -3]}
    assert MultilinearPoly.from_json(obj, G) == P
