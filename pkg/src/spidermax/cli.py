"""Command-line surface.

Subcommands: constants, maxop, rearrange, verify, sharpness, covering,
bench.  Single results print as JSON (sorted keys), sweeps as CSV, report
streams as JSON lines.  Exit codes: 0 success, 1 verification failure,
2 usage error.  Runs are reproducible: the seed comes from --seed, the
SPIDER_SEED environment variable, or 0.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import bench as bench_mod
from . import kernels
from .constants import lp_operator_norm_constant, power_law_constant
from .covering import multiplicity_audit, select, union_traces
from .maximal import MaximalOperator
from .numeric import number_to_json, parse_number
from .rearrange import decreasing_rearrangement
from .spider import Ball, SpiderPoint, StepFunction
from .verify import (run_covering_suite, run_doob_suite, run_lemma_suite,
                     run_tail_suite, run_weaktype_suite, sharpness_sweep)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2


def _emit(obj, out):
    out.write(json.dumps(obj, sort_keys=True, default=number_to_json) + "\n")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("SPIDER_SEED", "0"))


def _open_out(path):
    return open(path, "w") if path else sys.stdout


def cmd_constants(args) -> int:
    if (args.p is None) == (args.r is None):
        print("constants: give exactly one of --p or --r", file=sys.stderr)
        return EXIT_USAGE
    if args.p is not None:
        c = lp_operator_norm_constant(args.p, args.k, tol=args.tol)
    else:
        c = power_law_constant(args.r, args.k, tol=args.tol)
    _emit(c.to_json(), sys.stdout)
    return EXIT_OK


def cmd_maxop(args) -> int:
    with open(args.file) as fh:
        f = StepFunction.from_json(json.load(fh))
    op = MaximalOperator(f, backend=args.backend)
    if args.full:
        g = op.compute()
        obj = {"k": g.k, "rays": [[[number_to_json(p.lo), number_to_json(p.hi),
                                    p.a, p.b, p.c, p.d] for p in pieces]
                                  for pieces in g.rays]}
        _emit(obj, sys.stdout)
    else:
        if args.ray is None or args.pos is None:
            print("maxop: need --ray and --pos (or --full)", file=sys.stderr)
            return EXIT_USAGE
        value = op.value_at(SpiderPoint(args.ray, args.pos))
        _emit({"ray": args.ray, "pos": args.pos, "value": value}, sys.stdout)
    return EXIT_OK


def cmd_rearrange(args) -> int:
    with open(args.file) as fh:
        obj = json.load(fh)
    values = [parse_number(v) for v in obj["values"]]
    probs = [parse_number(p) for p in obj["probs"]]
    f = decreasing_rearrangement(values, probs, args.k)
    _emit(f.to_json(), sys.stdout)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _seed(args)
    out = _open_out(args.out)
    ok = True
    try:
        if args.suite == "tail":
            res = run_tail_suite(atoms=args.atoms, k=args.k,
                                 max_len=args.max_len, xi_count=args.count,
                                 seed=seed, p_list=(2.0,) if args.with_doob else ())
            _emit(res.to_json(), out)
            ok = res.ok
            return EXIT_OK if ok else EXIT_VERIFICATION_FAILED

        runners = {
            "lemma": lambda: run_lemma_suite(count=args.count, seed=seed),
            "weaktype": lambda: run_weaktype_suite(count=args.count, seed=seed,
                                                   backend=args.backend),
            "doob": lambda: run_doob_suite(count=args.count, seed=seed),
            "covering": lambda: run_covering_suite(count=args.count, seed=seed),
        }
        if args.suite == "all":
            suites = list(runners)
        else:
            suites = [args.suite]
        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                futures = [(name, pool.submit(runners[name])) for name in suites]
                batches = [(name, fut.result()) for name, fut in futures]
        else:
            batches = [(name, runners[name]()) for name in suites]
        for name, reports in batches:  # submission order: deterministic output
            for rep in reports:
                _emit(rep.to_json(), out)
                ok = ok and rep.ok
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def cmd_sharpness(args) -> int:
    r_list = [float(x) for x in args.r.split(",")]
    rows = sharpness_sweep(args.p, args.k, r_list, grid_points=args.grid,
                           x_min=args.x_min)
    out = _open_out(args.out)
    try:
        out.write("r,lambda,ratio,C_pk,gap\n")
        for row in rows:
            out.write(row.csv() + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_covering(args) -> int:
    with open(args.file) as fh:
        balls = [Ball.from_json(b) for b in json.load(fh)]
    result = select(balls, args.k)
    mult, witness = multiplicity_audit(result.selected, args.k)
    union_ok = union_traces(result.selected, args.k) == union_traces(balls, args.k)
    obj = {
        "selected": [b.to_json() for b in result.selected],
        "removed": [b.to_json() for b in result.removed],
        "sequences": [[[idx, [number_to_json(t[0]), number_to_json(t[1])]]
                       for idx, t in seq] for seq in result.per_ray_sequences],
        "max_multiplicity": mult,
        "witness": None if witness is None else
        {"ray": witness.ray, "pos": number_to_json(witness.pos)},
        "union_preserved": union_ok,
    }
    _emit(obj, sys.stdout)
    return EXIT_OK if union_ok and mult <= max(args.k, 2) else EXIT_VERIFICATION_FAILED


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = bench_mod.run(sizes=sizes, k=args.k, repeats=args.repeats,
                         seed=_seed(args))
    out = _open_out(args.out)
    try:
        out.write("backend,kind,breakpoints,k,seconds\n")
        for row in rows:
            out.write("%s,%s,%d,%d,%.6f\n" % row)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spidermax",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="sharp-constant solver")
    c.add_argument("--p", type=float)
    c.add_argument("--r", type=float)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--tol", type=float, default=1e-12)
    c.set_defaults(fn=cmd_constants)

    m = sub.add_parser("maxop", help="evaluate the maximal operator")
    m.add_argument("--file", required=True, help="step-function JSON")
    m.add_argument("--ray", type=int)
    m.add_argument("--pos", type=float)
    m.add_argument("--full", action="store_true",
                   help="emit the full piecewise-Moebius function")
    m.add_argument("--backend", default=None, choices=("pure", "compiled"))
    m.set_defaults(fn=cmd_maxop)

    r = sub.add_parser("rearrange", help="decreasing rearrangement of an instance")
    r.add_argument("--file", required=True, help="instance JSON {probs, values}")
    r.add_argument("--k", type=int, required=True)
    r.set_defaults(fn=cmd_rearrange)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True,
                   choices=("lemma", "weaktype", "tail", "doob", "covering", "all"))
    v.add_argument("--count", type=int, default=100)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--backend", default="exact", choices=("exact", "float"))
    v.add_argument("--atoms", type=int, default=3)
    v.add_argument("--k", type=int, default=2)
    v.add_argument("--max-len", type=int, default=2)
    v.add_argument("--exhaustive", action="store_true",
                   help="tail suite: enumerate every union (always on)")
    v.add_argument("--with-doob", action="store_true",
                   help="tail suite: also check Doob ratios")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out", default=None, help="write reports to a file")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("sharpness", help="operator-ratio sweep toward C(p,k)")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--r", required=True, help="comma-separated r values")
    s.add_argument("--grid", type=int, default=2000)
    s.add_argument("--x-min", type=float, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=cmd_sharpness)

    g = sub.add_parser("covering", help="greedy ball selection + audit")
    g.add_argument("--file", required=True, help="JSON list of balls")
    g.add_argument("--k", type=int, required=True)
    g.set_defaults(fn=cmd_covering)

    b = sub.add_parser("bench", help="compare compiled and pure kernels")
    b.add_argument("--sizes", default="100,300,1000")
    b.add_argument("--k", type=int, default=3)
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--out", default=None)
    b.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sharpness" and args.x_min is None:
        from .verify import DEFAULT_SWEEP_XMIN
        args.x_min = DEFAULT_SWEEP_XMIN
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
