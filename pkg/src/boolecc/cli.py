"""Command line: ``boolecc {gadget|correct|list-correct|decode|bench|check-sampling}``.

Exit codes: 0 on success, 1 on usage or input errors, 2 when an acceptance
threshold is missed.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .bits import as_point
from .correct import CorrectorParams, unique_correct, unique_correct_budget
from .decode import STRATEGIES, BudgetExceededError, as_fraction, list_decode, unique_decode
from .gadget import build_balanced_matrix
from .harness import SCENARIOS, run_experiment, sampling_check
from .listcorrect import ListParams, local_list_correct
from .oracle import make_oracle
from .poly import Table, evaluate

EXIT_THRESHOLD = 2


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=str))


def cmd_gadget(args) -> int:
    A = build_balanced_matrix(args.k)
    bad = A.check() if args.check else []
    if args.emit == "json":
        out = A.to_json()
        if args.check:
            out["violations"] = bad
        _emit(out)
    elif args.check:
        print("ok" if not bad else "violated: " + ", ".join(bad))
    return EXIT_THRESHOLD if bad else 0


def cmd_correct(args) -> int:
    f = make_oracle(_load_json(args.oracle))
    a = as_point(args.point, f.n)
    params = CorrectorParams(delta=args.delta, seed=args.seed, k_subcube=args.k, t_levels=args.levels, reps=args.reps)
    value = unique_correct(f, a, params)
    out = {
        "value": f.group.to_json(value.payload),
        "queries": f.count,
        "budget": unique_correct_budget(f.n, params),
        "params": params.to_json(),
    }
    if f.truth is not None:
        out["truth"] = f.group.to_json(evaluate(f.truth, a).payload)
    _emit(out)
    return 0


def cmd_list_correct(args) -> int:
    f = make_oracle(_load_json(args.oracle))
    cparams = CorrectorParams(delta=0.01, k_subcube=args.corrector_k, reps=args.reps)
    correctors = local_list_correct(f, args.eps, ListParams(k=args.k, ell=args.ell, seed=args.seed, corrector=cparams))
    out = {"oracles": [c.approx.to_json() for c in correctors], "advice_queries": f.count}
    if args.eval_points:
        pts = _load_json(args.eval_points)
        evals = []
        for i, c in enumerate(correctors):
            vals = [f.group.to_json(c(as_point(p, f.n)).payload) for p in pts]
            evals.append({"corrector": i, "values": vals})
        out["evaluations"] = {"points": pts, "results": evals}
    _emit(out)
    return 0


def cmd_decode(args) -> int:
    table = Table.from_json(_load_json(args.table))
    if args.radius is None:
        P = unique_decode(table, args.d)
        _emit(None if P is None else P.to_json())
        return 0
    try:
        L = list_decode(table, args.d, as_fraction(args.radius), strategy=args.strategy)
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    _emit([P.to_json() for P in L])
    return 0


def cmd_bench(args) -> int:
    configs = []
    if args.config:
        cfg = _load_json(args.config)
        configs.extend(cfg if isinstance(cfg, list) else [cfg])
    for s in args.scenario or []:
        configs.append({"scenario": s, "seed": args.seed})
    if not configs:
        print("error: give --config or --scenario", file=sys.stderr)
        return 1
    ok = True
    for cfg in configs:
        if args.trials is not None:
            cfg = {**cfg, "trials": args.trials}
        rep = run_experiment(cfg)
        ok &= rep.passed
        print(rep.to_csv() if args.csv else rep.to_json(wall_time=not args.no_wall_time))
    return 0 if ok else EXIT_THRESHOLD


def cmd_check_sampling(args) -> int:
    res = sampling_check(args.mu, args.n, args.k, args.trials, args.eps, args.seed, args.predicate)
    res["threshold"] = args.threshold
    res["passed"] = res["tail"] <= args.threshold
    _emit(res)
    return 0 if res["passed"] else EXIT_THRESHOLD


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boolecc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gadget", help="build the balanced matrix A_k")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--emit", choices=["json"])
    g.add_argument("--check", action="store_true")
    g.set_defaults(fn=cmd_gadget)

    c = sub.add_parser("correct", help="unique local correction at one point")
    c.add_argument("--oracle", required=True, help="oracle spec JSON file")
    c.add_argument("--point", required=True, help="bitstring, coordinate i = character i")
    c.add_argument("--delta", type=float, default=0.15)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--k", type=int, default=CorrectorParams.k_subcube)
    c.add_argument("--levels", type=int, default=CorrectorParams.t_levels)
    c.add_argument("--reps", type=int, default=CorrectorParams.reps)
    c.set_defaults(fn=cmd_correct)

    lc = sub.add_parser("list-correct", help="local list correction (degree 1)")
    lc.add_argument("--oracle", required=True)
    lc.add_argument("--eps", type=float, required=True)
    lc.add_argument("--k", type=int, default=8)
    lc.add_argument("--ell", type=int, default=3)
    lc.add_argument("--seed", type=int, default=0)
    lc.add_argument("--corrector-k", type=int, default=CorrectorParams.k_subcube)
    lc.add_argument("--reps", type=int, default=CorrectorParams.reps)
    lc.add_argument("--eval-points", help="JSON list of bitstrings to evaluate every corrector on")
    lc.set_defaults(fn=cmd_list_correct)

    d = sub.add_parser("decode", help="unique or list decoding of a full table")
    d.add_argument("--table", required=True, help='JSON {"group":…, "n":…, "values":[…]}')
    d.add_argument("--d", type=int, required=True)
    d.add_argument("--radius", help="list-decode within this radius (e.g. 0.35 or 7/20)")
    d.add_argument("--strategy", choices=STRATEGIES, default="auto")
    d.set_defaults(fn=cmd_decode)

    b = sub.add_parser("bench", help="run experiment scenarios")
    b.add_argument("--config", help="JSON config or list of configs")
    b.add_argument("--scenario", action="append", choices=SCENARIOS)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--trials", type=int)
    b.add_argument("--csv", action="store_true")
    b.add_argument("--no-wall-time", action="store_true", help="omit wall time for byte-stable output")
    b.set_defaults(fn=cmd_bench)

    s = sub.add_parser("check-sampling", help="random-subcube sampling tail")
    s.add_argument("--mu", type=float, default=0.25)
    s.add_argument("--n", type=int, default=16)
    s.add_argument("--k", type=int, default=14)
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--predicate", choices=["random", "junta"], default="random")
    s.add_argument("--threshold", type=float, default=0.05)
    s.set_defaults(fn=cmd_check_sampling)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
