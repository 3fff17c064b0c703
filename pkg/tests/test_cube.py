import itertools

import numpy as np
import pytest

from boolecc.bits import bits_to_int, cube_indices, int_to_bits
from boolecc.cube import (
    SubcubeEmbedding,
    cube_points,
    embed,
    embed_many,
    lift_pair,
    random_embedding,
    random_embeddings_many,
    restrict_pair,
    span_with,
)
from boolecc.groups import Cyclic, Integers
from boolecc.poly import MultilinearPoly, evaluate, random_poly

# chi-square critical value, 15 degrees of freedom, significance 1e-3
CHI2_15_001 = 37.697


def chi_square(counts):
    counts = np.asarray(counts, dtype=float)
    exp = counts.sum() / len(counts)
    return float(((counts - exp) ** 2 / exp).sum())


def test_embed_examples():
    emb = SubcubeEmbedding(5, 3, "10110", [0, 1, 2, 0, 1])
    assert np.array_equal(embed(emb, "000"), emb.a)
    ident = SubcubeEmbedding(4, 4, "0000", [0, 1, 2, 3])
    assert np.array_equal(embed(ident, "1101"), [1, 1, 0, 1])
    flip = SubcubeEmbedding(3, 1, "101", [0, 0, 0])
    assert np.array_equal(embed(flip, "1"), [0, 1, 0])
    with pytest.raises(ValueError):
        embed(emb, "01")


def test_embedding_validation_and_json():
    with pytest.raises(ValueError):
        SubcubeEmbedding(3, 2, "000", [0, 2, 1])
    with pytest.raises(ValueError):
        random_embedding(3, 4, 0)
    emb = random_embedding(10, 3, 7)
    assert SubcubeEmbedding.from_json(emb.to_json()) == emb
    with pytest.raises(AttributeError):
        emb.k = 2


def test_random_embedding_replay():
    assert random_embedding(20, 5, 42) == random_embedding(20, 5, 42)
    assert random_embedding(20, 5, 42) != random_embedding(20, 5, 43)


def test_cube_points_and_injectivity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        k = int(rng.integers(1, 5))
        n = int(rng.integers(k, 9))
        h = np.concatenate([rng.permutation(k), rng.integers(0, k, n - k)])
        emb = SubcubeEmbedding(n, k, rng.integers(0, 2, n), rng.permutation(h))
        P = cube_points(emb)
        for y in range(1 << k):
            assert np.array_equal(P[y], embed(emb, int_to_bits(y, k)))
        assert len({bits_to_int(x) for x in P}) == 1 << k


def test_marginal_uniform_chi_square():
    rng = np.random.default_rng(123)
    n, k, N = 4, 3, 100_000
    a, h = random_embeddings_many(n, k, N, rng)
    y = np.array([1, 0, 1], dtype=np.uint8)
    X = a ^ y[h]
    idx = X @ (1 << np.arange(n))
    assert chi_square(np.bincount(idx, minlength=16)) < CHI2_15_001


def test_pair_correlation_iid():
    rng = np.random.default_rng(321)
    n, k, N = 4, 4, 100_000
    a, h = random_embeddings_many(n, k, N, rng)
    y, y2 = np.array([0, 0, 1, 1], np.uint8), np.array([0, 1, 0, 1], np.uint8)  # distance 1/2
    D = (a ^ y[h]) ^ (a ^ y2[h])
    assert chi_square(np.bincount(D @ (1 << np.arange(n)), minlength=16)) < CHI2_15_001
    assert np.all(np.abs(D.mean(axis=0) - 0.5) < 0.01)


def test_span_with_hand_example():
    emb = SubcubeEmbedding(2, 1, "00", [0, 0])
    S = span_with(emb, "01", [0, 1])
    assert S.base.h.tolist() == [0, 1]
    assert S.w.tolist() == [0, 1]
    assert np.array_equal(embed(S.base, S.w), [0, 1])


def test_span_with_b_equals_a():
    rng = np.random.default_rng(4)
    emb = random_embedding(12, 3, rng)
    sigma = rng.permutation(6)
    S = span_with(emb, emb.a, sigma)
    assert set(S.base.h.tolist()) <= set(sigma[:3].tolist())
    assert sorted(np.flatnonzero(S.w).tolist()) == sorted(sigma[3:].tolist())
    assert np.array_equal(embed(S.base, S.w), emb.a)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_span_subset_property_exhaustive(k):
    rng = np.random.default_rng(k)
    for _ in range(30):
        n = int(rng.integers(k, 10))
        emb = random_embedding(n, k, rng)
        b = rng.integers(0, 2, n)
        sigma = rng.permutation(2 * k)
        S = span_with(emb, b, sigma)
        assert int(S.w.sum()) == k
        assert np.array_equal(embed(S.base, S.w), b)
        spanned = {bits_to_int(x) for x in cube_points(S.base)}
        for y in cube_indices(k):
            z = lift_pair(y, sigma)
            assert np.array_equal(embed(S.base, z), embed(emb, y))
            assert bits_to_int(embed(emb, y)) in spanned


def test_span_with_errors():
    emb = random_embedding(5, 2, 0)
    with pytest.raises(ValueError):
        span_with(emb, "0101", [0, 1, 2, 3])
    with pytest.raises(ValueError):
        span_with(emb, "01010", [0, 1, 2, 2])


def test_restrict_pair_examples():
    G = Cyclic(6)
    const = MultilinearPoly(G, 4, 1, {(): 5})
    assert restrict_pair(const, [0, 1, 2, 3]).coeffs == {(): 5}
    R = MultilinearPoly(G, 2, 1, {(0,): 4, (1,): 4})
    assert restrict_pair(R, [0, 1]).coeffs == {(0,): 2}
    R3 = MultilinearPoly(G, 2, 1, {(0,): 3, (1,): 3})
    assert restrict_pair(R3, [0, 1]).coeffs == {}
    with pytest.raises(ValueError):
        restrict_pair(MultilinearPoly(G, 3, 1, {}), [0, 1, 2])


@pytest.mark.parametrize("G", [Cyclic(2), Cyclic(5), Integers()])
def test_restrict_pair_consistency(G):
    rng = np.random.default_rng(9)
    for k in (1, 2, 3):
        for _ in range(40):
            R = random_poly(G, 2 * k, int(rng.integers(0, 3)), rng)
            sigma = rng.permutation(2 * k)
            Rp = restrict_pair(R, sigma)
            for y in itertools.product((0, 1), repeat=k):
                assert evaluate(Rp, y) == evaluate(R, lift_pair(y, sigma))


def test_embed_many_matches_embed():
    emb = random_embedding(9, 4, 2)
    Y = cube_indices(4)
    assert np.array_equal(embed_many(emb, Y), np.stack([embed(emb, y) for y in Y]))
