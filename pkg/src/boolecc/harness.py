"""Experiment scenarios, reports and the sampling check.

Every trial draws from ``substream(seed, scenario, trial)`` and owns its
oracle, so trials can run on a thread pool (``BOOLECC_THREADS``) and merge
by index with byte-identical reports. Thresholds are desk-scale calibrations.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Optional

import numpy as np

from .bits import cube_indices
from .correct import (
    CorrectorParams,
    base_reduce_many,
    correct_small_error,
    subcube_reduce_many,
    unique_correct,
    unique_correct_budget,
)
from .decode import as_fraction, brute_force_list, list_decode, unique_decode
from .gadget import gadget_q
from .groups import Cyclic, Group, GroupValue, group_from_json
from .listcorrect import ListParams, build_approx_oracles, local_list_correct, psi_eval
from .oracle import CorruptedOracle, NoErrors, PlantedPair, RandomDensity, maj_instance
from .poly import MultilinearPoly, Table, disagreements, evaluate_many, random_linear, restrict, tabulate
from .seeds import child_seed, substream

REPORT_VERSION = 1
SCENARIOS = (
    "unique-correct",
    "small-error",
    "base-reduce",
    "subcube-reduce",
    "list-correct",
    "psi-check",
    "decode-equivalence",
    "sampling-check",
    "maj-list",
)


class UnknownScenarioError(ValueError):
    pass


@dataclass
class ExperimentReport:
    scenario: str
    config: Dict[str, Any]
    seed: int
    trials: int
    successes: int
    rate: float
    threshold: Optional[float]
    passed: bool
    queries_total: int = 0
    queries_per_stage: Dict[str, int] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0
    version: int = REPORT_VERSION
    note: str = "thresholds are desk-scale calibrations"

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes must lie in [0, trials]")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must lie in [0, 1]")

    def as_dict(self, wall_time: bool = True) -> dict:
        d = {
            "version": self.version,
            "scenario": self.scenario,
            "seed": self.seed,
            "config": self.config,
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
            "threshold": self.threshold,
            "passed": self.passed,
            "queries_total": self.queries_total,
            "queries_per_stage": self.queries_per_stage,
            "extra": self.extra,
            "note": self.note,
        }
        if wall_time:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, wall_time: bool = True) -> str:
        return json.dumps(self.as_dict(wall_time), indent=2, default=str)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["scenario", "seed", "trials", "successes", "rate", "threshold", "passed", "queries_total", "wall_time"])
        w.writerow([self.scenario, self.seed, self.trials, self.successes, self.rate, self.threshold,
                    self.passed, self.queries_total, f"{self.wall_time:.3f}"])
        return buf.getvalue()


def threads() -> int:
    try:
        return max(1, int(os.environ.get("BOOLECC_THREADS", "1")))
    except ValueError:
        return 1


def _map_trials(fn: Callable[[int], Any], trials: int) -> list:
    t = threads()
    if t == 1:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=t) as ex:
        return list(ex.map(fn, range(trials)))


def _group(cfg) -> Group:
    g = cfg.get("group", {"kind": "cyclic", "m": 2})
    return group_from_json(g) if isinstance(g, dict) else g


def _report(scenario, cfg, seed, trials, successes, threshold, higher_is_better=True, **kw) -> ExperimentReport:
    rate = successes / trials if trials else 0.0
    if threshold is None:
        passed = True
    elif higher_is_better:
        passed = rate >= threshold
    else:
        passed = rate <= threshold
    return ExperimentReport(scenario, cfg, seed, trials, successes, rate, threshold, passed, **kw)


# -- scenarios ----------------------------------------------------------------

def _unique_correct(cfg, seed):
    n, G = int(cfg.get("n", 64)), _group(cfg)
    delta = float(cfg.get("delta", 0.15))
    trials = int(cfg.get("trials", 2000))
    overrides = {k: cfg[k] for k in ("k_subcube", "t_levels", "reps", "d", "rho") if k in cfg}
    clean = bool(cfg.get("clean", False))

    def trial(i):
        rng = substream(seed, "unique-correct", i)
        P = random_linear(G, n, rng)
        model = NoErrors() if clean else RandomDensity(delta, child_seed(rng))
        f = CorruptedOracle(P, model)
        a = rng.integers(0, 2, n, dtype=np.uint8)
        params = CorrectorParams(delta=delta, seed=child_seed(rng), **overrides)
        ok = unique_correct(f, a, params).payload == evaluate_many(P, a[None, :])[0]
        return bool(ok), f.count, unique_correct_budget(n, params)

    res = _map_trials(trial, trials)
    total = sum(r[1] for r in res)
    exact = all(r[1] == r[2] for r in res)
    budget = res[0][2] if res else 0
    return _report(
        "unique-correct", cfg, seed, trials, sum(r[0] for r in res), cfg.get("threshold", 0.75),
        queries_total=total,
        queries_per_stage={"f": total, "per_trial": budget},
        extra={"query_count_matches_formula": exact, "per_trial_formula": budget},
    )


def _small_error(cfg, seed):
    n, G = int(cfg.get("n", 256)), _group(cfg)
    q = gadget_q(n)
    delta = float(cfg.get("delta", 1 / (8 * q)))
    reps = int(cfg.get("reps", 1))
    trials = int(cfg.get("trials", 10000))
    rng0 = substream(seed, "small-error", "setup")
    P = random_linear(G, n, rng0)
    f = CorruptedOracle(P, RandomDensity(delta, child_seed(rng0)))

    def trial(i):
        rng = substream(seed, "small-error", i)
        a = rng.integers(0, 2, n, dtype=np.uint8)
        return bool(correct_small_error(f, a, reps, rng).payload == evaluate_many(P, a[None, :])[0])

    ok = sum(_map_trials(trial, trials))
    return _report(
        "small-error", cfg, seed, trials, ok, cfg.get("threshold", 0.75),
        queries_total=f.count,
        queries_per_stage={"per_repetition": q},
        extra={"q": q, "delta": delta, "query_count_matches_formula": f.count == trials * reps * q},
    )


def _base_reduce(cfg, seed):
    n, G = int(cfg.get("n", 128)), _group(cfg)
    gamma = float(cfg.get("gamma", 1e-4))
    d = int(cfg.get("d", 1))
    trials = int(cfg.get("trials", 200000))
    rng = substream(seed, "base-reduce", 0)
    P = random_linear(G, n, rng)
    f = CorruptedOracle(P, RandomDensity(gamma, child_seed(rng)))
    A = rng.integers(0, 2, (trials, n), dtype=np.uint8)
    fails = int((~G.eq_v(base_reduce_many(f, A, d, rng), evaluate_many(P, A))).sum())
    return _report(
        "base-reduce", cfg, seed, trials, fails, cfg.get("threshold", 1e-4), higher_is_better=False,
        queries_total=f.count,
        queries_per_stage={"per_point": f.count // max(trials, 1)},
        extra={"failures": fails, "failure_rate": fails / trials},
    )


def _subcube_reduce(cfg, seed):
    n, G = int(cfg.get("n", 64)), _group(cfg)
    delta = float(cfg.get("delta", 0.20))
    k, d = int(cfg.get("k", 10)), int(cfg.get("d", 1))
    trials = int(cfg.get("trials", 2000))
    rng = substream(seed, "subcube-reduce", 0)
    P = random_linear(G, n, rng)
    clean = bool(cfg.get("clean", False))
    f = CorruptedOracle(P, NoErrors() if clean else RandomDensity(delta, child_seed(rng)))
    A = rng.integers(0, 2, (trials, n), dtype=np.uint8)
    ok = int(G.eq_v(subcube_reduce_many(f, A, k, d, rng), evaluate_many(P, A)).sum())
    return _report(
        "subcube-reduce", cfg, seed, trials, ok, cfg.get("threshold", 0.75),
        queries_total=f.count,
        queries_per_stage={"per_point": 1 << k},
        extra={"query_count_matches_formula": f.count == trials << k},
    )


def planted_pair(G: Group, n: int, rng: np.random.Generator, selector: int = 0):
    """(f, P1, P2) with f = P1 on x_selector = 1 and P2 elsewhere, P1 − P2 of full support."""
    P1 = random_linear(G, n, rng)
    diff = {m: G.nonzero_element() for m in [()] + [(i,) for i in range(n)]}
    P2 = P1 + MultilinearPoly(G, n, 1, diff)
    return CorruptedOracle(P1, PlantedPair(P2, selector)), P1, P2


def _psi_check(cfg, seed):
    n, G = int(cfg.get("n", 32)), _group(cfg)
    eps, k, ell = cfg.get("eps", 0.2), int(cfg.get("k", 8)), int(cfg.get("ell", 3))
    trials, points = int(cfg.get("trials", 20)), int(cfg.get("points", 200))
    max_err = float(cfg.get("max_error", 0.1))

    def trial(i):
        rng = substream(seed, "psi-check", i)
        f, P1, P2 = planted_pair(G, n, rng)
        oracles = build_approx_oracles(f, eps, k, ell, rng)
        found, exact = {}, True
        for name, P in (("P1", P1), ("P2", P2)):
            mine = [o for o in oracles if restrict(P, o.C) == o.Q]
            if not mine:
                found[name] = None
                continue
            o = mine[0]
            B = rng.integers(0, 2, (points, n), dtype=np.uint8)
            truth = evaluate_many(P, B)
            before = f.count
            errs = int(sum(psi_eval(o, f, b).payload != t for b, t in zip(B, truth)))
            exact &= f.count - before == points << (2 * k)
            found[name] = float(errs) / points
        return found, exact

    res = _map_trials(trial, trials)
    errors = [r[0] for r in res]
    ok = sum(all(v is not None and v <= max_err for v in r.values()) for r in errors)
    return _report(
        "psi-check", cfg, seed, trials, ok, cfg.get("threshold", 0.75),
        queries_per_stage={"per_psi": 1 << (2 * k)},
        extra={"psi_errors": errors, "query_count_matches_formula": all(r[1] for r in res)},
    )


def _list_correct(cfg, seed):
    """End-to-end local list correction on planted pairs.

    Before running, the minimum work needed to reach the threshold is
    projected (successful runs × corrector evaluations per run × ψ calls per
    evaluation × measured ψ time). When that exceeds ``time_budget`` the
    scenario stops and reports the projection instead of a rate.
    """
    n, G = int(cfg.get("n", 32)), _group(cfg)
    eps, k, ell = cfg.get("eps", 0.2), int(cfg.get("k", 8)), int(cfg.get("ell", 3))
    runs, points = int(cfg.get("trials", 200)), int(cfg.get("points", 500))
    agree_need = float(cfg.get("agreement", 0.9))
    threshold = float(cfg.get("threshold", 0.75))
    budget_s = cfg.get("time_budget")
    cparams = CorrectorParams(**{"delta": 0.01, **{k2: cfg[k2] for k2 in ("k_subcube", "t_levels", "reps") if k2 in cfg}})
    params = lambda s: ListParams(k=k, ell=ell, seed=s, corrector=cparams)

    psi_calls = unique_correct_budget(n, cparams)
    evals_per_success = 2 * math.ceil(agree_need * points)
    runs_needed = math.ceil(threshold * runs)
    extra: Dict[str, Any] = {"psi_calls_per_evaluation": psi_calls, "queries_per_psi": 1 << (2 * k)}

    if budget_s is not None:
        rng = substream(seed, "list-correct", "probe")
        f, P1, _ = planted_pair(G, n, rng)
        oracles = build_approx_oracles(f, eps, k, ell, rng)
        samples = []
        for b in rng.integers(0, 2, (5, n), dtype=np.uint8):
            t0 = time.perf_counter()
            psi_eval(oracles[0], f, b)
            samples.append(time.perf_counter() - t0)
        projected = runs_needed * evals_per_success * psi_calls * min(samples)
        extra.update(psi_seconds_min=min(samples), projected_seconds=projected, time_budget=budget_s)
        if projected > float(budget_s):
            extra["status"] = "infeasible within time budget"
            return _report("list-correct", cfg, seed, runs, 0, threshold, extra=extra)

    def trial(i):
        rng = substream(seed, "list-correct", i)
        f, P1, P2 = planted_pair(G, n, rng)
        correctors = local_list_correct(f, eps, params(child_seed(rng)))
        B = rng.integers(0, 2, (points, n), dtype=np.uint8)
        exact = True
        for P in (P1, P2):
            truth = evaluate_many(P, B)
            hit = False
            for phi in correctors:
                wrong = 0
                for j, b in enumerate(B):
                    before = f.count
                    if phi(b, substream(seed, "list-correct", i, "eval", j)).payload != truth[j]:
                        wrong += 1
                    exact &= f.count - before == phi.budget
                    if wrong > (1 - agree_need) * points:
                        break
                else:
                    hit = True
                    break
            if not hit:
                return False, exact
        return True, exact

    res = _map_trials(trial, runs)
    extra["query_count_matches_formula"] = all(r[1] for r in res)
    return _report("list-correct", cfg, seed, runs, sum(r[0] for r in res), threshold, extra=extra)


def random_table(G: Group, n: int, rng: np.random.Generator) -> Table:
    return Table(G, n, G.asarray([G.random_element(rng) for _ in range(1 << n)]))


def unique_radius(n: int, d: int) -> Fraction:
    """Largest multiple of 2^-n strictly below 1/2^{d+1}."""
    N = 1 << n
    return Fraction(-(-N // (1 << (d + 1))) - 1, N)


def _decode_equivalence(cfg, seed):
    trials = int(cfg.get("trials", 1000))
    max_n = int(cfg.get("max_n", 4))
    groups = [group_from_json(g) for g in cfg.get("groups", [{"kind": "cyclic", "m": m} for m in (2, 3, 4)])]
    d = int(cfg.get("d", 1))
    mismatches = []
    for i in range(trials):
        rng = substream(seed, "decode-equivalence", i)
        G = groups[i % len(groups)]
        n = int(rng.integers(1, max_n + 1))
        T = random_table(G, n, rng)
        r = Fraction(int(rng.integers(0, 1 << (n - 1))), 1 << n)  # radius < 1/2
        brute = brute_force_list(T, d, r)
        strategies = ["candidates", "reed"] if d == 1 else ["reed"]
        if d == 1 and isinstance(G, Cyclic) and G.m == 2:
            strategies.append("walsh")
        for s in strategies:
            if s == "reed" and r >= Fraction(1, 1 << d):
                continue
            if list_decode(T, d, r, strategy=s) != brute:
                mismatches.append({"trial": i, "strategy": s})
        u = unique_decode(T, d)
        ub = brute_force_list(T, d, unique_radius(n, d))
        if (u is None and ub) or (u is not None and ub != [u]):
            mismatches.append({"trial": i, "strategy": "unique"})
    return _report(
        "decode-equivalence", cfg, seed, trials, trials - len({m["trial"] for m in mismatches}),
        cfg.get("threshold", 1.0), extra={"mismatches": mismatches},
    )


def random_predicate(n: int, mu: float, rng: np.random.Generator, kind: str = "random") -> np.ndarray:
    """Boolean table of a predicate on {0,1}^n with density exactly round(μ 2^n)/2^n."""
    N = 1 << n
    T = np.zeros(N, dtype=bool)
    if kind == "random":
        T[rng.choice(N, size=round(mu * N), replace=False)] = True
    elif kind == "junta":
        j = round(-math.log2(mu)) if mu > 0 else 0
        if mu > 0 and 2.0 ** -j != mu:
            raise ValueError("junta predicates need μ = 2^-j")
        if mu > 0:
            idx = np.arange(N)
            T = (idx & ((1 << j) - 1)) == (1 << j) - 1
    else:
        raise ValueError(f"unknown predicate kind {kind!r}")
    return T


def sampling_check(mu: float, n: int, k: int, trials: int, eps: float, seed: int, predicate: str = "random") -> dict:
    """Empirical ``Pr[| |T∩C|/2^k − μ | ≥ ε]`` over random k-subcubes C.

    Embeddings use common random numbers across k: trial t draws a base point
    and uniforms u_i once, and sets h(i) = ⌊u_i·k⌋, so runs at different k are
    paired.
    """
    if n > 20:
        raise ValueError("sampling check tabulates the predicate; need n <= 20")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    T = random_predicate(n, mu, substream(seed, "predicate"), predicate)
    density = T.mean()
    rng = substream(seed, "embeddings")
    A = rng.integers(0, 2, (trials, n))
    U = rng.random((trials, n))
    Y = cube_indices(k).astype(np.int64)
    pw = 1 << np.arange(n, dtype=np.int64)
    devs = np.empty(trials)
    for t in range(trials):
        h = np.minimum((U[t] * k).astype(np.int64), k - 1)
        masks = np.zeros(k, dtype=np.int64)
        np.add.at(masks, h, pw)
        idx = int(A[t] @ pw) ^ (Y @ masks)
        devs[t] = abs(T[idx].mean() - density)
    tail = float((devs >= eps - 1e-12).mean())
    return {"mu": float(density), "n": n, "k": k, "trials": trials, "eps": eps, "predicate": predicate,
            "tail": tail, "mean_deviation": float(devs.mean()), "max_deviation": float(devs.max())}


def _sampling(cfg, seed):
    mu, n, eps = float(cfg.get("mu", 0.25)), int(cfg.get("n", 16)), float(cfg.get("eps", 0.1))
    trials = int(cfg.get("trials", 2000))
    grid = [int(k) for k in cfg.get("k_grid", [4, 6, 8, 10, 12, 14])]
    pred = cfg.get("predicate", "random")
    rows = [sampling_check(mu, n, k, trials, eps, seed, pred) for k in grid]
    tails = [r["tail"] for r in rows]
    last = rows[-1]
    monotone = all(a >= b for a, b in zip(tails, tails[1:]))
    thr = float(cfg.get("threshold", 0.05))
    rep = _report("sampling-check", cfg, seed, trials, trials - round(last["tail"] * trials), None,
                  extra={"tails": dict(zip(map(str, grid), tails)), "non_increasing": monotone, "tail_threshold": thr})
    rep.passed = last["tail"] <= thr and monotone
    return rep


def _maj_list(cfg, seed):
    t, n = int(cfg.get("t", 5)), int(cfg.get("n", 5))
    G = _group(cfg)
    g = GroupValue(G, G.nonzero_element())
    radius = as_fraction(cfg.get("radius", Fraction(7, 20)))
    f = maj_instance(t, n, g)
    T = f.table()
    dictators = [MultilinearPoly(G, n, 1, {(i,): g.payload}) for i in range(t)]
    agreements = [1 - Fraction(disagreements(T, tabulate(D)), 1 << n) for D in dictators]
    L = list_decode(T, 1, radius)
    contains = all(D in L for D in dictators)
    others = [P.to_json() for P in L if P not in dictators]
    expected = Fraction(1, 2) + Fraction(math.comb(t - 1, (t - 1) // 2), 1 << t)
    exact = all(a == expected for a in agreements)
    rep = _report("maj-list", cfg, seed, t, sum(D in L for D in dictators), 1.0,
                  extra={"agreements": [str(a) for a in agreements], "expected_agreement": str(expected),
                         "agreement_exact": exact, "list_size": len(L), "non_dictators": others})
    rep.passed = contains and exact
    return rep


_SCENARIOS = {
    "unique-correct": _unique_correct,
    "small-error": _small_error,
    "base-reduce": _base_reduce,
    "subcube-reduce": _subcube_reduce,
    "list-correct": _list_correct,
    "psi-check": _psi_check,
    "decode-equivalence": _decode_equivalence,
    "sampling-check": _sampling,
    "maj-list": _maj_list,
}


def run_experiment(config: dict) -> ExperimentReport:
    scenario = config.get("scenario")
    if scenario not in _SCENARIOS:
        raise UnknownScenarioError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    seed = int(config.get("seed", 0))
    cfg = {k: v for k, v in config.items() if k not in ("scenario", "seed")}
    t0 = time.perf_counter()
    rep = _SCENARIOS[scenario](cfg, seed)
    rep.wall_time = time.perf_counter() - t0
    return rep
