"""Command-line entry point: ``confsched <subcommand> ...``.

Exit codes: 0 success, 1 negative answer (no packing, failed verification),
2 budget exhausted, 64 usage or input-format error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from fractions import Fraction

from . import corpus, eptas, objectives, oracle
from .conf_ip import ConfIP, make_thin, thin_report
from .exceptions import BudgetExceeded, InfeasibleError, InstanceFormatError
from .instance import format_instance, format_schedule, generate_instance, parse_instance, verify_schedule
from .knapsack import (
    KnapsackSpec,
    classify,
    enumerate_configurations,
    format_configuration,
    parse_configuration,
    sparsify,
)

EXIT_OK, EXIT_NO, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 64
BENCH_HEADER = ["id", "n", "m", "eps", "mode", "value", "oracle", "ratio", "ms", "budget_hit"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _int_list(text):
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _eps(text):
    try:
        return eptas.Epsilon.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _budgets(args):
    return {"max_nodes": args.max_nodes}


# -- subcommands -------------------------------------------------------------

def cmd_gen(args, out):
    out.write(format_instance(generate_instance(args.seed, args.n, args.m, args.pmax)))
    return EXIT_OK


def cmd_solve(args, out):
    instance = parse_instance(_read(args.input))
    args.eps.check_scheme_range()
    lines = []
    report = eptas.solve(instance, args.eps, args.mode, trace=lines.append, **_budgets(args))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("".join(line + "\n" for line in lines))
    out.write(format_schedule(instance, report.schedule))
    return EXIT_OK


def cmd_decide(args, out):
    instance = parse_instance(_read(args.input))
    args.eps.check_scheme_range()
    schedule = eptas.decide(instance, args.T, args.eps, args.mode, **_budgets(args))
    if schedule is None:
        sys.stderr.write(f"no schedule with makespan {args.T}\n")
        return EXIT_NO
    out.write(format_schedule(instance, schedule))
    return EXIT_OK


def cmd_solve_obj(args, out):
    instance = parse_instance(_read(args.input))
    spec = objectives.ObjectiveSpec(args.kind, objectives.parse_function(args.f))
    report = objectives.solve_objective(instance, args.eps.value, spec, args.mode, max_nodes=args.max_nodes)
    out.write(f"objective {report.value}\n")
    out.write(f"factor {report.factor}\n")
    out.write(" ".join(str(a) for a in report.schedule.assignment) + "\n")
    return EXIT_OK


def cmd_configs(args, out):
    spec = KnapsackSpec(args.sizes, args.capacity)
    for c in enumerate_configurations(spec, args.cap):
        out.write(f"{format_configuration(c)} {classify(spec, c)}\n")
    return EXIT_OK


def cmd_sparsify(args, out):
    spec = KnapsackSpec(args.sizes, args.capacity)
    c = parse_configuration(args.config)
    c1, c2 = sparsify(spec, c)
    out.write(f"{format_configuration(c1)}\n{format_configuration(c2)}\n")
    return EXIT_OK


def parse_thin_input(text):
    """``sizes``, ``capacity``, ``demand``, ``machines`` lines, then ``(c) multiplicity`` lines."""
    fields, x = {}, {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line.startswith("("):
                conf, mult = line.rsplit(None, 1)
                c = parse_configuration(conf)
                x[c] = x.get(c, 0) + int(mult)
            else:
                key, rest = line.split(None, 1)
                if key not in ("sizes", "capacity", "demand", "machines"):
                    raise ValueError(f"unknown field {key!r}")
                fields[key] = [int(tok) for tok in rest.split()]
        except ValueError as exc:
            raise InstanceFormatError(str(exc), number)
    missing = [k for k in ("sizes", "capacity", "demand", "machines") if k not in fields]
    if missing:
        raise InstanceFormatError(f"missing field {missing[0]}", 1)
    spec = KnapsackSpec(tuple(fields["sizes"]), fields["capacity"][0])
    return ConfIP(spec, tuple(fields["demand"]), fields["machines"][0]), x


def cmd_thin(args, out):
    ip, x = parse_thin_input(_read(args.input))
    lines = []
    thin = make_thin(ip, x, trace=lines.append if args.trace else None)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("".join(line + "\n" for line in lines))
    for c, v in sorted(thin.items()):
        out.write(f"{format_configuration(c)} {v}\n")
    report = thin_report(ip, thin)
    for key in ("feasible", "complex_at_most_once", "support", "support_bound",
                "complex_mass", "complex_mass_bound", "potential"):
        value = report[key]
        if isinstance(value, float):
            value = f"{value:.6f}"
        out.write(f"# {key}={value}\n")
    return EXIT_OK


def cmd_verify(args, out):
    instance = parse_instance(_read(args.instance))
    problems = verify_schedule(instance, _read(args.schedule))
    if problems:
        for p in problems:
            sys.stderr.write(p + "\n")
        return EXIT_NO
    out.write("ok\n")
    return EXIT_OK


def _ratio(value, opt, maximise):
    if opt is None or value is None:
        return ""
    r = Fraction(opt, 1) / Fraction(value) if maximise else Fraction(value) / Fraction(opt)
    return f"{float(r):.6f}"


def cmd_bench(args, out):
    items = corpus.scheduling_corpus(args.corpus, args.count)
    rows = []
    for item in items:
        inst = item.instance
        started = time.perf_counter()
        value, budget_hit = None, 0
        maximise = False
        try:
            if args.corpus == "objectives":
                spec = objectives.ObjectiveSpec(args.kind, objectives.parse_function(args.f))
                maximise = spec.maximise
                value = objectives.solve_objective(inst, args.eps.value, spec, args.mode, max_nodes=args.max_nodes).value
            else:
                value = eptas.solve(inst, args.eps, args.mode, max_nodes=args.max_nodes).makespan
        except BudgetExceeded:
            budget_hit = 1
        elapsed = (time.perf_counter() - started) * 1000
        opt = None
        if args.oracle:
            if args.corpus == "objectives":
                opt = oracle.opt_objective(inst, spec.kind, spec.f)[0]
            else:
                opt = oracle.opt_makespan(inst)[0]
        rows.append([
            item.id, inst.n, inst.m, str(args.eps), args.mode,
            "" if value is None else str(value),
            "" if opt is None else str(opt),
            _ratio(value, opt, maximise),
            f"{elapsed:.1f}" if args.timing else "",
            budget_hit,
        ])
    rows.sort(key=lambda r: r[0])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    writer.writerows(rows)
    out.write(buf.getvalue())
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="confsched", description="Configuration-IP scheduling toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(p, with_eps=True):
        p.add_argument("--input", default="-", help="instance file (default: stdin)")
        if with_eps:
            p.add_argument("--eps", type=_eps, default=eptas.Epsilon(4), help="accuracy 1/q (default 1/4)")
        p.add_argument("--mode", choices=eptas.MODES, default="paper")
        p.add_argument("--max-nodes", type=int, default=10**8)

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--pmax", type=int, required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="approximate minimum makespan")
    solver_flags(p)
    p.add_argument("--trace", help="write the search decisions to this file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decide", help="decide one makespan guess T")
    solver_flags(p)
    p.add_argument("--T", type=int, required=True)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("solve-obj", help="approximate a load objective")
    solver_flags(p)
    p.add_argument("--kind", choices=objectives.KINDS, required=True)
    p.add_argument("--f", default="power:2", help="power:p or identity")
    p.set_defaults(func=cmd_solve_obj)

    p = sub.add_parser("configs", help="list configurations with their class")
    p.add_argument("--sizes", type=_int_list, required=True)
    p.add_argument("--capacity", type=int, required=True)
    p.add_argument("--cap", type=int, default=10**7, help="enumeration budget")
    p.set_defaults(func=cmd_configs)

    p = sub.add_parser("sparsify", help="split a complex configuration")
    p.add_argument("--sizes", type=_int_list, required=True)
    p.add_argument("--capacity", type=int, required=True)
    p.add_argument("--config", required=True, help="e.g. (1,1,1)")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("thin", help="make a configuration-IP solution thin")
    p.add_argument("--input", default="-")
    p.add_argument("--trace", help="write one line per exchange to this file")
    p.set_defaults(func=cmd_thin)

    p = sub.add_parser("verify", help="check a schedule against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run a seeded corpus and print CSV")
    p.add_argument("--corpus", choices=("pcmax", "objectives"), default="pcmax")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--eps", type=_eps, default=eptas.Epsilon(4))
    p.add_argument("--mode", choices=eptas.MODES, default="oracle")
    p.add_argument("--max-nodes", type=int, default=10**8)
    p.add_argument("--kind", choices=objectives.KINDS, default="sum-min")
    p.add_argument("--f", default="power:2")
    p.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--timing", action="store_true", help="fill the ms column (breaks byte-identical output)")
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except InfeasibleError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_NO
    except (InstanceFormatError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main():
    sys.exit(run())
