"""Command-line interface.

Subcommands: compute, properties, stabilizer, bench, group.
Exit codes: 0 success, 1 input error, 2 no convergence, 3 property failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources

import numpy as np

from . import backends
from .errors import SpdMeansError, ExprParseError
from .expr import parse_expr, expr_arity, reductive_stabilizer
from .fixtures import FIXTURE_NAMES, fixture_seed, get_fixture
from .lab import (
    PROPERTY_IDS,
    SpdSampler,
    check_property,
    estimate_stabilizer,
)
from .linalg import MatrixTuple, OpCounters
from .means import IterationConfig, MeanKind, mean_by_kind
from .perm import (
    match_named_group,
    named_group,
    induced_action,
    parse_permutation,
    right_transversal,
    transversal_from_reps,
)
from .tuplefile import format_number, read_tuple, tuple_digest, write_matrices

_MEAN_CHOICES = ("alm", "bmp", "palfia", "new")


def report_schema_path():
    """Filesystem path of the shipped JSON schema for run reports."""
    return resources.files("spdmeans") / "schema" / "report.schema.json"


class _Parser(argparse.ArgumentParser):
    # input errors must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> _Parser:
    p = _Parser(prog="spdmeans", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    pc = sub.add_parser("compute", help="compute a mean of a matrix tuple")
    pc.add_argument("file", nargs="?", help="tuple file (or use --fixture)")
    pc.add_argument("--fixture", choices=FIXTURE_NAMES, help="built-in input tuple")
    pc.add_argument("--mean", required=True, choices=_MEAN_CHOICES)
    pc.add_argument("--tol", type=float, default=1e-13)
    pc.add_argument("--max-iter", type=int, default=200)
    pc.add_argument("--inner", choices=("alm", "bmp"), default="bmp",
                    help="inner 3-mean of the composed 4-matrix mean")
    fmt = pc.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--text", action="store_true")
    pc.add_argument("--out", help="write the result matrix to this tuple file")

    pp = sub.add_parser("properties", help="check mean axioms empirically")
    pp.add_argument("file", nargs="?", help="tuple file providing the base tuples")
    pp.add_argument("--random", type=int, metavar="SEED",
                    help="sample base tuples from this seed instead of a file")
    pp.add_argument("--mean", required=True, choices=_MEAN_CHOICES)
    pp.add_argument("--props", default=",".join(PROPERTY_IDS),
                    help="comma-separated list, e.g. P1,P3,P9")
    pp.add_argument("--samples", type=int, default=20)
    pp.add_argument("--n", type=int, default=3, help="tuple size in sampler mode")
    pp.add_argument("--dim", type=int, default=3, help="matrix size in sampler mode")
    pp.add_argument("--tol", type=float, help="override every property tolerance")
    pp.add_argument("--json", action="store_true")

    ps = sub.add_parser("stabilizer", help="estimate the isotropy group of an expression")
    ps.add_argument("--expr", required=True, help="e.g. \"(A1#A3)#(A2#A4)\"")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--samples", type=int, default=20)
    ps.add_argument("--tol", type=float, default=1e-8)
    ps.add_argument("--dim", type=int, default=3)
    ps.add_argument("--seed", type=int)
    ps.add_argument("--json", action="store_true")

    pb = sub.add_parser("bench", help="compare means on one input")
    pb.add_argument("file", nargs="?", help="tuple file (or use --fixture)")
    pb.add_argument("--fixture", choices=FIXTURE_NAMES)
    pb.add_argument("--means", default="bmp,new", help="comma-separated list")
    pb.add_argument("--repeat", type=int, default=3)
    pb.add_argument("--tol", type=float, default=1e-13)
    pb.add_argument("--max-iter", type=int, default=200)
    pb.add_argument("--json", action="store_true")

    pg = sub.add_parser("group", help="coset information for a named subgroup")
    pg.add_argument("--subgroup", required=True, metavar="KIND:N",
                    help="e.g. dihedral:4, sym:4, alt:5")
    pg.add_argument("--transversal", action="store_true",
                    help="list the right-coset representatives")
    pg.add_argument("--action", metavar="SIGMA",
                    help="print the induced coset permutation of SIGMA")
    pg.add_argument("--reps", metavar="LIST",
                    help="use explicit representatives, e.g. \"();(1 2);(1 4)\"")
    pg.add_argument("--json", action="store_true")

    return p


def _load_tuple(args) -> tuple[MatrixTuple, str]:
    if (args.file is None) == (getattr(args, "fixture", None) is None):
        raise SpdMeansError("provide exactly one input: a tuple file or --fixture")
    if args.file is not None:
        return read_tuple(args.file), str(args.file)
    return get_fixture(args.fixture), f"fixture:{args.fixture}"


def _matrix_rows(values: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in values]


def build_run_report(mean_name, inner_name, source, tup, cfg, result, report, wall) -> dict:
    return {
        "schema": "spdmeans/run-report/v1",
        "mean": mean_name,
        "inner": inner_name,
        "backend": backends.backend_name(),
        "input": {
            "source": source,
            "digest": tuple_digest(tup),
            "n": tup.n,
            "m": tup.dim,
        },
        "config": {"tol": cfg.tol, "max_iter": cfg.max_iter},
        "result": _matrix_rows(result.values),
        "iterations": {
            "outer": report.outer_iters,
            "inner_log": list(report.inner_iter_log),
            "inner_avg": report.inner_avg,
        },
        "counters": {
            "sqrt": report.counters.sqrt_count,
            "proot": report.counters.proot_count,
        },
        "residual": report.final_residual,
        "converged": report.converged,
        "wall_time_s": wall,
    }


def _print_run_report_text(doc: dict) -> None:
    inner = f" (inner {doc['inner']})" if doc["inner"] else ""
    print(f"mean: {doc['mean']}{inner}")
    print(f"input: {doc['input']['source']} (n={doc['input']['n']}, m={doc['input']['m']})")
    print(f"backend: {doc['backend']}")
    it = doc["iterations"]
    print(
        f"converged: {'yes' if doc['converged'] else 'NO'}   outer {it['outer']}   "
        f"inner {it['inner_log']} (avg {it['inner_avg']:.2f})"
    )
    print(f"sqrt ops: {doc['counters']['sqrt']}   proot ops: {doc['counters']['proot']}")
    print(f"residual: {doc['residual']:.3e}")
    print(f"wall time: {doc['wall_time_s']:.4f} s")
    print("result:")
    for row in doc["result"]:
        print("  " + " ".join(format_number(x) for x in row))


def _cmd_compute(args) -> int:
    tup, source = _load_tuple(args)
    cfg = IterationConfig(tol=args.tol, max_iter=args.max_iter)
    kind = MeanKind(args.mean)
    inner = MeanKind(args.inner)
    counters = OpCounters()
    start = time.perf_counter()
    result, report = mean_by_kind(kind, tup, cfg, counters, inner)
    wall = time.perf_counter() - start
    inner_name = args.inner if kind is MeanKind.NEW else None
    doc = build_run_report(args.mean, inner_name, source, tup, cfg, result, report, wall)
    if args.json:
        print(json.dumps(doc))
    else:
        _print_run_report_text(doc)
    if args.out:
        write_matrices(args.out, [result.values], comment=f"{args.mean} mean of {source}")
    return 0 if report.converged else 2


def _cmd_properties(args) -> int:
    props = [p.strip() for p in args.props.split(",") if p.strip()]
    for p in props:
        if p not in PROPERTY_IDS:
            raise SpdMeansError(f"unknown property {p!r}; valid: {', '.join(PROPERTY_IDS)}")
    kind = MeanKind(args.mean)

    if (args.file is None) == (args.random is None):
        raise SpdMeansError("provide exactly one input: a tuple file or --random SEED")
    if args.file is not None:
        tup = read_tuple(args.file)
        n, dim = tup.n, tup.dim
        base_tuples = [tup]
        sampler = SpdSampler(seed=fixture_seed(), dim=dim, count=args.samples)
    else:
        n, dim = args.n, args.dim
        base_tuples = None
        sampler = SpdSampler(seed=args.random, dim=dim, count=args.samples)

    reports = [
        check_property(kind, prop, sampler, n, tol=args.tol, base_tuples=base_tuples)
        for prop in props
    ]

    if args.json:
        print(json.dumps({
            "mean": args.mean,
            "n": n,
            "dim": dim,
            "properties": [
                {
                    "prop": r.prop,
                    "samples": r.samples,
                    "max_violation": r.max_violation,
                    "tol": r.tol,
                    "pass": r.passed,
                    "witness": r.witness,
                }
                for r in reports
            ],
        }))
    else:
        print(f"{'prop':<5} {'samples':>7} {'max_violation':>14} {'tol':>9}  pass")
        for r in reports:
            note = ""
            if not r.passed and r.witness:
                note = f"  witness {r.witness}"
            print(
                f"{r.prop:<5} {r.samples:>7} {r.max_violation:>14.3e} "
                f"{r.tol:>9.1e}  {'yes' if r.passed else 'NO'}{note}"
            )
    failed = [r.prop for r in reports if not r.passed]
    if failed:
        sys.stderr.write(f"property failures: {','.join(failed)}\n")
        return 3
    return 0


def _cmd_stabilizer(args) -> int:
    try:
        expression = parse_expr(args.expr)
    except ExprParseError as exc:
        sys.stderr.write(exc.caret_diagnostic() + "\n")
        return 1
    if expr_arity(expression) > args.n:
        raise SpdMeansError(
            f"expression uses input A{expr_arity(expression)} but --n is {args.n}"
        )
    sampler = SpdSampler(
        seed=fixture_seed(args.seed), dim=args.dim, count=args.samples
    )
    estimate = estimate_stabilizer(expression, args.n, sampler, tol=args.tol)
    group = estimate.survivors
    name = match_named_group(group)
    gens = [g.cycle_string() for g in group.small_generating_set()]
    if args.json:
        print(json.dumps({
            "expr": args.expr,
            "n": args.n,
            "order": group.order,
            "name": name,
            "generators": gens,
            "samples": estimate.sample_count,
            "tol": estimate.tol,
        }))
    else:
        label = f", {name}" if name else ""
        print(f"survivors: order {group.order}{label}")
        print(f"generators: {' '.join(gens) if gens else '()'}")
        print(f"(from {estimate.sample_count} samples at tol {estimate.tol:.1e})")
    return 0


def _cmd_bench(args) -> int:
    tup, source = _load_tuple(args)
    means = [m.strip() for m in args.means.split(",") if m.strip()]
    for m in means:
        if m not in _MEAN_CHOICES:
            raise SpdMeansError(f"unknown mean {m!r}; valid: {', '.join(_MEAN_CHOICES)}")
    cfg = IterationConfig(tol=args.tol, max_iter=args.max_iter)
    backends.warmup()

    rows = []
    for name in means:
        kind = MeanKind(name)
        mean_by_kind(kind, tup, cfg)  # warm-up, untimed
        times = []
        for _ in range(max(1, args.repeat)):
            counters = OpCounters()
            start = time.perf_counter()
            _, report = mean_by_kind(kind, tup, cfg, counters)
            times.append(time.perf_counter() - start)
        rows.append({
            "mean": name,
            "wall_time_s": float(np.median(times)),
            "outer": report.outer_iters,
            "inner_total": report.inner_total,
            "inner_avg": report.inner_avg,
            "sqrt": report.counters.sqrt_count,
            "proot": report.counters.proot_count,
            "converged": report.converged,
        })

    by_name = {r["mean"]: r for r in rows}
    ratios = {}
    if "new" in by_name and "bmp" in by_name:
        bmp_row, new_row = by_name["bmp"], by_name["new"]
        ratios = {
            "sqrt_new_over_bmp": new_row["sqrt"] / max(bmp_row["sqrt"], 1),
            "proot_new_over_bmp": new_row["proot"] / max(bmp_row["proot"], 1),
            "time_new_over_bmp": new_row["wall_time_s"] / max(bmp_row["wall_time_s"], 1e-12),
        }

    if args.json:
        print(json.dumps({
            "input": source,
            "backend": backends.backend_name(),
            "repeat": args.repeat,
            "rows": rows,
            "ratios": ratios,
        }))
    else:
        print(f"input: {source}   backend: {backends.backend_name()}   repeat: {args.repeat}")
        print(f"{'mean':<7} {'time_s':>10} {'outer':>5} {'inner':>5} {'sqrt':>6} {'proot':>6}  status")
        for r in rows:
            status = "ok" if r["converged"] else "DIVERGED"
            print(
                f"{r['mean']:<7} {r['wall_time_s']:>10.4f} {r['outer']:>5} "
                f"{r['inner_total']:>5} {r['sqrt']:>6} {r['proot']:>6}  {status}"
            )
        if ratios:
            print(
                "ratios new/bmp: sqrt %.3f  proot %.3f  time %.3f"
                % (
                    ratios["sqrt_new_over_bmp"],
                    ratios["proot_new_over_bmp"],
                    ratios["time_new_over_bmp"],
                )
            )
    return 0


def _cmd_group(args) -> int:
    try:
        kind, _, n_text = args.subgroup.partition(":")
        n = int(n_text)
    except ValueError:
        raise SpdMeansError(f"malformed --subgroup {args.subgroup!r}; use kind:n")
    if n > 8:
        raise SpdMeansError("subgroup degree is capped at 8 for full enumeration")
    h = named_group(kind, n)
    if args.reps:
        reps = [parse_permutation(text.strip(), n) for text in args.reps.split(";")]
        transversal = transversal_from_reps(h, reps)
    else:
        transversal = right_transversal(h)

    doc = {
        "subgroup": args.subgroup,
        "order": h.order,
        "index": transversal.index,
        "degree": n,
    }
    if args.transversal:
        doc["transversal"] = [r.cycle_string() for r in transversal.reps]
    if args.action:
        sigma = parse_permutation(args.action, n)
        doc["action"] = induced_action(transversal, sigma).cycle_string()

    if args.json:
        print(json.dumps(doc))
    else:
        print(f"group: {args.subgroup}  order {h.order}  index {transversal.index} in Sym({n})")
        if "transversal" in doc:
            print("transversal: " + ", ".join(doc["transversal"]))
        if "action" in doc:
            print(f"action of {args.action.strip()}: {doc['action']}")
    return 0


_COMMANDS = {
    "compute": _cmd_compute,
    "properties": _cmd_properties,
    "stabilizer": _cmd_stabilizer,
    "bench": _cmd_bench,
    "group": _cmd_group,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.cmd](args)
    except ExprParseError as exc:
        sys.stderr.write(exc.caret_diagnostic() + "\n")
        return 1
    except (SpdMeansError, KeyError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
