"""Non-local decoders on full tables.

``unique_decode`` is Reed's majority logic: for each top-degree monomial I,
every coset a of the I-coordinates gives a vote
``c_{I,a} = Σ_{J⊆I} (−1)^{|I∖J|} f(1_J ∘ a)``; the plurality vote is the
coefficient. Subtract and repeat one degree lower, then verify the distance.
The core works on a batch of tables at once.

``list_decode`` picks a strategy:

* ``walsh``: cyclic(2), d = 1. Every affine function's agreement is read
  off one Walsh–Hadamard transform.
* ``candidates``: d = 1, radius < 1/2, any group. A close codeword agrees
  with f on both endpoints of at least (1/2 − r)·2^n edges in each direction,
  so its coefficient on x_i is a frequent edge difference. Coefficients are
  assembled depth-first; a partial assignment is cut when even the best
  completion (one free constant per coset of the unassigned coordinates)
  cannot reach agreement (1 − r)·2^n.
* ``reed``: radius < 1/2^d. Try every combination of observed top-degree
  votes and unique-decode the remainder at degree d − 1.
* ``brute``: enumerate every polynomial (finite groups only); the test oracle.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from .groups import Cyclic, Group, plurality
from .poly import MultilinearPoly, Table, disagreements, monomials, tabulate

DEFAULT_BUDGET = 1 << 22
STRATEGIES = ("auto", "walsh", "candidates", "reed", "brute")


class BudgetExceededError(RuntimeError):
    pass


def as_fraction(r) -> Fraction:
    if isinstance(r, Fraction):
        return r
    if isinstance(r, float):
        return Fraction(repr(r))
    return Fraction(r)


def _monomial_mask(mon, k: int) -> np.ndarray:
    m = sum(1 << i for i in mon)
    return (np.arange(1 << k) & m) == m


def plurality_rows(group: Group, V: np.ndarray) -> np.ndarray:
    """Row-wise plurality of a ``(B, M)`` payload array; ties to the smallest key."""
    B, M = V.shape
    if isinstance(group, Cyclic) and B * group.m <= 1 << 24:
        m = group.m
        counts = np.bincount((V + m * np.arange(B)[:, None]).ravel(), minlength=B * m).reshape(B, m)
        return counts.argmax(axis=1)
    out = np.empty(B, dtype=V.dtype)
    for b in range(B):
        out[b] = plurality(group, V[b])
    return out


def _finite_difference(group: Group, A: np.ndarray, mon, k: int) -> np.ndarray:
    """Möbius transform over the coordinates in ``mon``, read at x_mon = 1.

    ``A`` has shape ``(B, 2, ..., 2)`` with coordinate i on axis ``k − i``.
    """
    for i in sorted(mon):
        ax = k - i
        A = group.sub_v(np.take(A, 1, axis=ax), np.take(A, 0, axis=ax))
    return A.reshape(A.shape[0], -1)


def unique_decode_many(group: Group, values: np.ndarray, k: int, d: int):
    """Batch majority-logic decoding of ``(B, 2^k)`` tables.

    Returns ``(coeffs, ok)`` where ``coeffs`` maps each monomial to a ``(B,)``
    payload array and ``ok[b]`` says table b passed the distance check.
    """
    values = np.asarray(values)
    B = values.shape[0]
    if values.shape[1] != 1 << k:
        raise ValueError(f"tables need {1 << k} columns")
    d = min(d, k)
    R = values.copy()
    coeffs: Dict[tuple, np.ndarray] = {}
    for deg in range(d, -1, -1):
        level = {}
        A = R.reshape((B,) + (2,) * k)
        for mon in itertools.combinations(range(k), deg):
            level[mon] = plurality_rows(group, _finite_difference(group, A, mon, k))
        for mon, c in level.items():
            R = group.sub_v(R, group.mask_v(_monomial_mask(mon, k)[None, :], c[:, None]))
        coeffs.update(level)
    wrong = (~group.is_zero_v(R)).sum(axis=1)
    ok = wrong * (1 << (d + 1)) < (1 << k)
    return coeffs, ok


def unique_decode(table: Table, d: int) -> Optional[MultilinearPoly]:
    """The degree-≤d polynomial within distance < 1/2^{d+1} of ``table``, or None."""
    coeffs, ok = unique_decode_many(table.group, table.values[None, :], table.n, d)
    if not ok[0]:
        return None
    return MultilinearPoly(table.group, table.n, d, {m: c[0] for m, c in coeffs.items()})


# -- list decoding --------------------------------------------------------------

def _need(N: int, r: Fraction) -> int:
    """Minimum agreement count for distance ≤ r."""
    return N - math.floor(r * N)


def _finish(table: Table, found, r: Fraction) -> List[MultilinearPoly]:
    """Deduplicate, filter by radius and sort. ``found`` holds polynomials or
    ``(poly, disagreements)`` pairs when a strategy already knows the count."""
    N = 1 << table.n
    seen = {}
    for item in found:
        P, dis = item if isinstance(item, tuple) else (item, None)
        if P in seen:
            continue
        if dis is None:
            dis = disagreements(table, tabulate(P))
        if dis <= r * N:
            seen[P] = dis
    return sorted(seen, key=lambda P: (seen[P], P.sort_key()))


def _walsh(table: Table, r: Fraction) -> List[MultilinearPoly]:
    n, N = table.n, 1 << table.n
    T = 1 - 2 * table.values.astype(np.int64)
    for i in range(n):
        V = T.reshape(-1, 2, 1 << i)
        a, b = V[:, 0, :].copy(), V[:, 1, :].copy()
        V[:, 0, :], V[:, 1, :] = a + b, a - b
    need = _need(N, r)
    out = []
    for c0, sign in ((0, 1), (1, -1)):
        # agreement of c0 + s·x with f is (N + sign·W(s)) / 2
        agree2 = N + sign * T
        for s in np.flatnonzero(agree2 >= 2 * need).tolist():
            coeffs = {(i,): 1 for i in range(n) if s >> i & 1}
            if c0:
                coeffs[()] = 1
            out.append((MultilinearPoly(table.group, n, 1, coeffs), N - int(agree2[s]) // 2))
    return out


def _row_max_counts(group: Group, g: np.ndarray, j: int, n: int) -> int:
    rows = g.reshape(1 << (n - j), 1 << j)
    if isinstance(group, Cyclic) and rows.shape[0] * group.m <= 1 << 24:
        m = group.m
        counts = np.bincount((rows + m * np.arange(rows.shape[0])[:, None]).ravel(), minlength=rows.shape[0] * m)
        return int(counts.reshape(rows.shape[0], m).max(axis=1).sum())
    return sum(max(Counter(row.tolist()).values()) for row in rows)


def _edge_candidates(group: Group, vals: np.ndarray, n: int, thr: int) -> List[list]:
    out = []
    for i in range(n):
        V = vals.reshape(-1, 2, 1 << i)
        D = group.sub_v(V[:, 1, :], V[:, 0, :]).ravel()
        counts = Counter(D.tolist())
        out.append(sorted((v for v, c in counts.items() if c >= thr), key=group.sort_key))
    return out


def _candidates(table: Table, r: Fraction, budget: int) -> List[MultilinearPoly]:
    if r >= Fraction(1, 2):
        raise BudgetExceededError("candidate strategy needs radius < 1/2")
    G, n, N = table.group, table.n, 1 << table.n
    thr = max(1, math.ceil((Fraction(1, 2) - r) * N))
    need = _need(N, r)
    cands = _edge_candidates(G, table.values, n, thr)
    bits = [((np.arange(N) >> i) & 1).astype(bool) for i in range(n)]
    out = []
    nodes = 0

    def dfs(j: int, g: np.ndarray, chosen: list):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceededError(f"candidate search exceeded {budget} nodes")
        if _row_max_counts(G, g, j, n) < need:
            return
        if j == n:
            c0 = plurality(G, g)
            coeffs = {(i,): c for i, c in enumerate(chosen)}
            coeffs[()] = c0
            P = MultilinearPoly(G, n, 1, coeffs)
            out.append((P, N - int(G.eq_v(g, G.mask_v(np.ones(N, dtype=bool), c0)).sum())))
            return
        for c in cands[j]:
            dfs(j + 1, G.sub_v(g, G.mask_v(bits[j], c)), chosen + [c])

    dfs(0, table.values, [])
    return out


def _reed(table: Table, d: int, r: Fraction, budget: int) -> List[MultilinearPoly]:
    G, n = table.group, table.n
    if r >= Fraction(1, 1 << d):
        raise BudgetExceededError("reed strategy needs radius < 1/2^d")
    A = table.values.reshape((1,) + (2,) * n)
    tops = list(itertools.combinations(range(n), d))
    choices = []
    for mon in tops:
        votes = _finite_difference(G, A, mon, n)[0]
        choices.append(sorted(set(votes.tolist()), key=G.sort_key))
    total = math.prod(len(c) for c in choices)
    if total > budget:
        raise BudgetExceededError(f"reed strategy would try {total} combinations")
    masks = [_monomial_mask(m, n) for m in tops]
    out = []
    for combo in itertools.product(*choices):
        rest = table.values
        for mask, c in zip(masks, combo):
            rest = G.sub_v(rest, G.mask_v(mask, c))
        coeffs, ok = unique_decode_many(G, rest[None, :], n, d - 1)
        if not ok[0]:
            continue
        full = {m: c[0] for m, c in coeffs.items()}
        full.update(zip(tops, combo))
        out.append(MultilinearPoly(G, n, d, full))
    return out


def _constants(table: Table, r: Fraction) -> List[MultilinearPoly]:
    counts = Counter(table.values.tolist())
    need = _need(1 << table.n, r)
    return [MultilinearPoly(table.group, table.n, 0, {(): v}) for v, c in counts.items() if c >= need]


def brute_force_list(table: Table, d: int, radius, budget: int = DEFAULT_BUDGET) -> List[MultilinearPoly]:
    """Every degree-≤d polynomial within ``radius``, by exhaustive enumeration."""
    G, n = table.group, table.n
    r = as_fraction(radius)
    if not G.is_finite:
        raise BudgetExceededError(f"{G} is infinite")
    mons = monomials(n, d)
    total = G.size ** len(mons)
    if total > budget:
        raise BudgetExceededError(f"{total} candidate polynomials exceed the budget {budget}")
    N = 1 << n
    need = _need(N, r)
    E = np.stack([_monomial_mask(m, n) for m in mons], axis=1).astype(np.int64)  # (N, M)
    out = []
    if isinstance(G, Cyclic):
        m = G.m
        f = table.values.astype(np.int64)
        chunk = max(1, (1 << 22) // max(N, 1))
        radix = m ** np.arange(len(mons), dtype=object)
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            C = (idx[:, None] // np.array([int(x) for x in radix], dtype=np.int64)[None, :]) % m
            vals = (C @ E.T) % m
            agree = (vals == f[None, :]).sum(axis=1)
            for row in np.flatnonzero(agree >= need):
                out.append((MultilinearPoly(G, n, d, dict(zip(mons, C[row].tolist()))), N - int(agree[row])))
    else:
        elems = list(G.elements())
        for combo in itertools.product(elems, repeat=len(mons)):
            acc = G.zeros(N)
            for j, c in enumerate(combo):
                acc = G.add_v(acc, G.mask_v(E[:, j].astype(bool), c))
            agree = int(G.eq_v(acc, table.values).sum())
            if agree >= need:
                out.append((MultilinearPoly(G, n, d, dict(zip(mons, combo))), N - agree))
    return _finish(table, out, r)


def choose_strategy(table: Table, d: int, radius, budget: int = DEFAULT_BUDGET) -> str:
    G, n = table.group, table.n
    r = as_fraction(radius)
    if d == 1 and isinstance(G, Cyclic) and G.m == 2:
        return "walsh"
    if d == 1 and r < Fraction(1, 2):
        return "candidates"
    if d >= 1 and r < Fraction(1, 1 << d):
        return "reed"
    if G.is_finite and G.size ** len(monomials(n, d)) <= budget:
        return "brute"
    raise BudgetExceededError(f"no list-decoding strategy fits d={d}, radius={r}, group={G}")


def list_decode(table: Table, d: int, radius, strategy: str = "auto", budget: int = DEFAULT_BUDGET) -> List[MultilinearPoly]:
    """All degree-≤d polynomials within ``radius`` of ``table``, ordered by
    distance then canonical coefficients."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    r = as_fraction(radius)
    if r < 0:
        raise ValueError("radius must be >= 0")
    if d == 0:
        return _finish(table, _constants(table, r), r)
    if strategy == "auto":
        strategy = choose_strategy(table, d, r, budget)
    if strategy == "walsh":
        if d != 1 or not (isinstance(table.group, Cyclic) and table.group.m == 2):
            raise ValueError("walsh strategy needs d=1 over cyclic(2)")
        polys = _walsh(table, r)
    elif strategy == "candidates":
        if d != 1:
            raise ValueError("candidate strategy needs d=1")
        polys = _candidates(table, r, budget)
    elif strategy == "reed":
        polys = _reed(table, d, r, budget)
    else:
        return brute_force_list(table, d, r, budget)
    return _finish(table, polys, r)
