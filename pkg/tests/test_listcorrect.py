import numpy as np
import pytest

from boolecc.bits import cube_indices
from boolecc.correct import CorrectorParams, unique_correct_budget
from boolecc.cube import random_embedding, span_with
from boolecc.groups import Cyclic
from boolecc.harness import planted_pair
from boolecc.listcorrect import (
    ApproxOracle,
    ListParams,
    PsiOracle,
    build_approx_oracles,
    decode_radius,
    default_ell,
    local_list_correct,
    psi_eval,
    psi_eval_shared,
)
from boolecc.oracle import CorruptedOracle
from boolecc.poly import MultilinearPoly, evaluate, evaluate_many, random_linear, restrict
from boolecc.seeds import substream


def test_radius_and_ell():
    assert decode_radius(0.2) == pytest.approx(0.4)
    assert default_ell(1) == 1 and default_ell(4) == 3 and default_ell(5) == 4


def test_odd_k_rejected():
    f = CorruptedOracle(random_linear(Cyclic(2), 10, 0))
    with pytest.raises(ValueError):
        build_approx_oracles(f, 0.2, 3, 1, 0)
    C = random_embedding(10, 3, 0)
    with pytest.raises(ValueError):
        ApproxOracle(C, tuple(range(6)), MultilinearPoly.zero(Cyclic(2), 3, 1), 0.2)
    with pytest.raises(ValueError):
        build_approx_oracles(f, 0.2, 4, 0, 0)


def test_clean_advice_contains_restriction():
    G = Cyclic(3)
    rng = np.random.default_rng(0)
    P = random_linear(G, 20, rng)
    f = CorruptedOracle(P)
    oracles = build_approx_oracles(f, 0.2, 6, 2, rng)
    assert f.count == 2 * (1 << 6)
    for C in {o.C for o in oracles}:
        assert any(o.Q == restrict(P, C) for o in oracles if o.C == C)
    assert len({o.sigma for o in oracles}) == 1


@pytest.mark.parametrize("m", [2, 4])
def test_clean_filter_sound_exhaustive(m):
    """f = P and Q = P|_C: ψ(b) = P(b) for every b, k ≤ 2, n ≤ 8."""
    G = Cyclic(m)
    rng = np.random.default_rng(m)
    for n in (2, 5, 8):
        for _ in range(3):
            P = random_linear(G, n, rng)
            f = CorruptedOracle(P)
            C = random_embedding(n, 2, rng)
            o = ApproxOracle(C, tuple(rng.permutation(4).tolist()), restrict(P, C), 0.2)
            X = cube_indices(n)
            for x, v in zip(X, evaluate_many(P, X)):
                assert psi_eval(o, f, x).payload == v


def test_psi_query_count_and_w_invariant():
    f, P1, _ = planted_pair(Cyclic(2), 32, np.random.default_rng(1))
    oracles = build_approx_oracles(f, 0.2, 8, 1, 1)
    f.reset_count()
    b = np.random.default_rng(2).integers(0, 2, 32)
    psi_eval(oracles[0], f, b)
    assert f.count == 1 << 16
    span = span_with(oracles[0].C, b, oracles[0].sigma)
    assert int(span.w.sum()) == 8
    f.reset_count()
    shared = psi_eval_shared(oracles, f, b)
    assert f.count == 1 << 16
    assert shared == [psi_eval(o, f, b).payload for o in oracles]


def test_planted_restrictions_found():
    hits = 0
    runs = 60
    for i in range(runs):
        rng = substream(100, i)
        f, P1, P2 = planted_pair(Cyclic(2), 32, rng)
        oracles = build_approx_oracles(f, 0.2, 8, 3, rng)
        got = {(o.C, o.Q) for o in oracles}
        cubes = {o.C for o in oracles}
        both = all(any((C, restrict(P, C)) in got for C in cubes) for P in (P1, P2))
        hits += both
        # cap: at most ell times the largest per-cube list
        per_cube = max(sum(1 for o in oracles if o.C == C) for C in cubes)
        assert len(oracles) <= 3 * per_cube
    assert hits >= 0.9 * runs


def test_psi_close_to_planted():
    rng = substream(7, "psi")
    f, P1, P2 = planted_pair(Cyclic(2), 32, rng)
    oracles = build_approx_oracles(f, 0.2, 8, 3, rng)
    mine = [o for o in oracles if restrict(P1, o.C) == o.Q]
    assert mine
    pts = rng.integers(0, 2, (150, 32))
    wrong = sum(psi_eval(mine[0], f, b) != evaluate(P1, b) for b in pts)
    assert wrong / len(pts) <= 0.1


def test_list_corrector_clean():
    G = Cyclic(4)
    rng = np.random.default_rng(5)
    n = 8
    P = random_linear(G, n, rng)
    f = CorruptedOracle(P)
    cp = CorrectorParams(delta=0.01, k_subcube=4, reps=1)
    correctors = local_list_correct(f, 0.2, ListParams(k=2, ell=2, seed=3, corrector=cp))
    assert len(correctors) == len(build_approx_oracles(f, 0.2, 2, 2, substream(3, "advice")))
    pts = rng.integers(0, 2, (10, n))
    good = [c for c in correctors if all(c(x) == evaluate(P, x) for x in pts)]
    assert good
    c = good[0]
    f.reset_count()
    c(pts[0])
    assert f.count == c.budget == (1 << 4) * unique_correct_budget(n, cp)
    assert isinstance(c.psi, PsiOracle)


def test_approx_oracle_json():
    C = random_embedding(6, 2, 0)
    o = ApproxOracle(C, (1, 0, 3, 2), MultilinearPoly(Cyclic(2), 2, 1, {(0,): 1}), 0.2)
    js = o.to_json()
    assert js["sigma"] == [1, 0, 3, 2] and js["C"] == C.to_json()
    assert js["Q"]["terms"] == [{"vars": [0], "coeff": 1}]
