"""Command-line front end.

Exit codes: 0 property holds, 1 property fails (witness printed), 2 input or
usage error, 3 internal error (two routes that must agree did not).
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import equivalence as eq
from .core import (
    FamilyInstance,
    FunctionFamily,
    Instance,
    ParamInstance,
    ParamUtilityTable,
    UtilityPair,
    dump_json,
    expected_value,
    format_rational,
    parse_instance,
    parse_rational,
)
from .crossing import (
    CrossingVerdict,
    check_family_sc,
    check_mixture_sc,
    check_mixture_sc_grid,
    check_srm,
    restrict_to_pair,
)
from .errors import RiskOrderError, TheoremViolation, TransformError
from .risk_order import (
    LotteryViolation,
    RiskOrderVerdict,
    build_transform,
    check_lra_definition,
    check_lra_grid,
    check_lra_pratt,
    check_lra_transform,
    transform_failure_witness,
)

EXIT_HOLDS, EXIT_FAILS, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
THREADS_ENV = "RISKORDER_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


@dataclass
class CliResult:
    code: int
    stdout: bytes
    stderr: bytes


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except RiskOrderError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit machine-readable JSON")
    with_input = _Parser(add_help=False, parents=[common])
    with_input.add_argument("input", help="instance file, or - for stdin")

    parser = _Parser(prog="riskorder", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-lra", parents=[with_input], help="is u less risk-averse than v?")
    p.add_argument("--method", choices=["definition", "pratt", "transform", "grid", "all"], default="definition")
    p.add_argument("--denom-bound", type=_positive_int)

    sub.add_parser("build-transform", parents=[with_input], help="increasing convex phi with u = phi(v)")
    sub.add_parser("check-sc", parents=[with_input], help="single-crossing of a family / of differences")
    sub.add_parser("check-srm", parents=[with_input], help="signed-ratio monotonicity")

    p = sub.add_parser("check-aggregate", parents=[with_input], help="single-crossing of all mixtures")
    p.add_argument("--method", choices=["exact", "grid"], default="exact")
    p.add_argument("--denom-bound", type=_positive_int)

    sub.add_parser("check-proposition", parents=[with_input], help="both sides for a parametrised U")

    p = sub.add_parser("gen-random", help="print a seeded random U instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-alternatives", type=int, default=3)
    p.add_argument("--n-params", type=int, default=3)
    p.add_argument("--relation-density", type=_rational_arg, default=Fraction(1, 2))
    p.add_argument("--max-abs-numerator", type=_positive_int, default=20)
    p.add_argument("--max-denominator", type=_positive_int, default=6)
    p.add_argument("--positive", action="store_true", help="constructive chain instance on which side (a) holds")

    p = sub.add_parser("selftest", parents=[common], help="random + constructive agreement campaign")
    p.add_argument("--instances", type=_positive_int, default=1000)
    p.add_argument("--constructive", type=int, help="constructive instances (default: half of --instances, rounded up)")
    p.add_argument("--seed", type=int, default=42)
    return parser


# ---------------------------------------------------------------------------
# Reporting helpers
# ---------------------------------------------------------------------------


class _Out:
    def __init__(self):
        self.lines: list[str] = []

    def __call__(self, line: str = "") -> None:
        self.lines.append(line)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _verdict_line(label: str, verdict, explain) -> str:
    if verdict.holds:
        return f"[{label}] holds"
    return f"[{label}] FAILS: {explain(verdict.witness)}"


def _read_input(path: str, stdin: bytes) -> Instance:
    if path == "-":
        data = stdin
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(data)


def _need(inst: Instance, kinds: tuple[type, ...], command: str) -> None:
    if not isinstance(inst, kinds):
        names = " or ".join(k.__name__ for k in kinds)
        raise UsageError(f"{command} expects a {names}, got a {type(inst).__name__}")


def _dump_reproducer(instance, name: str) -> Path:
    path = Path.cwd() / name
    path.write_text(dump_json(instance.to_json()), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_check_lra(args, inst: UtilityPair, out: _Out) -> tuple[int, Any]:
    u, v = inst.u, inst.v
    if args.method == "all":
        routes = ["definition", "pratt", "transform"] + (["grid"] if args.denom_bound else [])
    else:
        routes = [args.method]
    bound = args.denom_bound or 6
    checks = {
        "definition": lambda: check_lra_definition(u, v),
        "pratt": lambda: check_lra_pratt(u, v),
        "transform": lambda: check_lra_transform(u, v),
        "grid": lambda: check_lra_grid(u, v, bound),
    }
    verdicts = {name: checks[name]() for name in routes}

    exact = [verdicts[r].holds for r in ("definition", "pratt", "transform") if r in verdicts]
    if len(set(exact)) > 1:
        raise TheoremViolation("exact risk-order routes disagree", inst)
    if "grid" in verdicts and exact and exact[0] and not verdicts["grid"].holds:
        raise TheoremViolation("grid oracle found a violation the exact routes missed", inst)

    spot = []
    for i, p in enumerate(inst.lotteries):
        for y in u.domain:
            for part in ("weak", "strict"):
                w = LotteryViolation(y, p, part)
                if w.verify(u, v):
                    spot.append((i, w))
    if spot and exact and exact[0]:
        raise TheoremViolation("a supplied lottery violates a verdict of holds", inst)

    holds = all(vd.holds for vd in verdicts.values()) and not spot
    out(f"check-lra: u less risk-averse than v: {'holds' if holds else 'FAILS'}")
    for name, vd in verdicts.items():
        out("  " + _verdict_line(name, vd, lambda w: w.explain(u, v)))
    for i, p in enumerate(inst.lotteries):
        eu, ev = expected_value(u, p), expected_value(v, p)
        out(f"  lottery #{i}: E_p[u] = {format_rational(eu)}, E_p[v] = {format_rational(ev)}")
    for i, w in spot:
        out(f"  [lottery #{i}] FAILS: {w.explain(u, v)}")
    doc = {
        "command": "check-lra",
        "holds": holds,
        "verdicts": [vd.to_json() for vd in verdicts.values()],
        "lottery_checks": [{"lottery": i, "witness": w.to_json()} for i, w in spot],
    }
    return (EXIT_HOLDS if holds else EXIT_FAILS), doc


def _cmd_build_transform(args, inst: UtilityPair, out: _Out) -> tuple[int, Any]:
    u, v = inst.u, inst.v
    try:
        phi = build_transform(u, v)
    except TransformError as err:
        w = transform_failure_witness(u, v, err)
        out(f"build-transform: FAILS: {err}")
        out(f"  {w.explain(u, v)}")
        doc = {"command": "build-transform", "holds": False, "error": type(err).__name__, "message": str(err), "witness": w.to_json()}
        return EXIT_FAILS, doc
    out("build-transform: holds")
    out("  knots: " + ", ".join(f"({format_rational(t)}, {format_rational(a)})" for t, a in phi.knots))
    out("  slopes: " + ", ".join(format_rational(s) for s in phi.slopes))
    doc = {"command": "build-transform", "holds": True, "transform": phi.to_json()}
    return EXIT_HOLDS, doc


def _crossing_report(command: str, labelled: list[tuple[str, CrossingVerdict, FunctionFamily]], out: _Out) -> tuple[int, Any]:
    holds = all(vd.holds for _, vd, _ in labelled)
    out(f"{command}: {'holds' if holds else 'FAILS'}")
    for label, vd, fam in labelled:
        out("  " + _verdict_line(label, vd, lambda w, fam=fam: w.explain(fam)))
    doc = {
        "command": command,
        "holds": holds,
        "verdicts": [dict(label=label, **vd.to_json()) for label, vd, _ in labelled],
    }
    return (EXIT_HOLDS if holds else EXIT_FAILS), doc


def _family_checks(inst, check) -> list[tuple[str, CrossingVerdict, FunctionFamily]]:
    if isinstance(inst, FamilyInstance):
        fam = inst.family
        vd = check(fam)
        return [(vd.route, vd, fam)]
    U = inst.table
    out = []
    for y in U.alternatives:
        fam = eq.differences_family(U, y)
        out.append((f"y={y}", check(fam), fam))
    return out


def _cmd_check_sc(args, inst, out: _Out) -> tuple[int, Any]:
    if isinstance(inst, FamilyInstance):
        labelled = _family_checks(inst, check_family_sc)
    else:
        fam = eq.single_crossing_differences(inst.table)
        labelled = [("differences", check_family_sc(fam), fam)]
    return _crossing_report("check-sc", labelled, out)


def _cmd_check_srm(args, inst, out: _Out) -> tuple[int, Any]:
    return _crossing_report("check-srm", _family_checks(inst, check_srm), out)


def _cmd_check_aggregate(args, inst, out: _Out) -> tuple[int, Any]:
    if args.method == "grid":
        bound = args.denom_bound or 6
        labelled = _family_checks(inst, lambda fam: check_mixture_sc_grid(fam, bound))
    else:
        labelled = _family_checks(inst, check_mixture_sc)
    return _crossing_report("check-aggregate", labelled, out)


def _cmd_check_proposition(args, inst: ParamInstance, out: _Out) -> tuple[int, Any]:
    U = inst.table
    report = eq.check_proposition(U)
    _describe_report(U, report, out)
    doc = dict(command="check-proposition", **report.to_json())
    return (EXIT_HOLDS if report.holds else EXIT_FAILS), doc


def _describe_report(U: ParamUtilityTable, report: eq.PropositionReport, out: _Out) -> None:
    out(f"check-proposition: {'holds' if report.holds else 'FAILS'} (sides agree: {'yes' if report.agree else 'NO'})")
    for label, side in (("side (a), definition", report.side_a), ("side (a), pratt", report.side_a_pratt)):
        bad = side.first_failure
        if bad is None:
            out(f"  [{label}] holds")
        else:
            u, v = U.slice(bad.theta), U.slice(bad.theta_prime)
            out(f"  [{label}] FAILS: pair ({bad.theta}, {bad.theta_prime}): {bad.verdict.witness.explain(u, v)}")
    sc_family = eq.single_crossing_differences(U)
    out("  " + _verdict_line("side (b)(i) single-crossing differences", report.side_b_sc, lambda w: w.explain(sc_family)))
    for y, vd in report.side_b_srm.items():
        fam = eq.differences_family(U, y)
        out("  " + _verdict_line(f"side (b)(ii) y={y}", vd, lambda w, fam=fam: w.explain(fam)))
    bad_pair = next((r for r in report.mixture_route if not r.holds), None)
    if bad_pair is None:
        out("  [mixture route] holds")
    else:
        y, vd = next((y, vd) for y, vd in bad_pair.verdicts.items() if not vd.holds)
        fam = restrict_to_pair(eq.differences_family(U, y), bad_pair.theta, bad_pair.theta_prime)
        out(f"  [mixture route] FAILS: y={y}: {vd.witness.explain(fam)}")


def _cmd_gen_random(args, out: _Out) -> tuple[int, Any]:
    params = eq.InstanceGenParams(
        seed=args.seed,
        n_alternatives=args.n_alternatives,
        n_params=args.n_params,
        relation_density=Fraction(1) if args.positive else args.relation_density,
        max_abs_numerator=args.max_abs_numerator,
        max_denominator=args.max_denominator,
    )
    inst = eq.gen_positive_instance(params) if args.positive else eq.gen_random_instance(params)
    doc = inst.to_json()
    out(dump_json(doc).rstrip("\n"))
    return EXIT_HOLDS, doc


# ---------------------------------------------------------------------------
# Self-test campaign
# ---------------------------------------------------------------------------


def _oracle_problems(U: ParamUtilityTable, report: eq.PropositionReport) -> list[str]:
    """Checks beyond route agreement: witnesses re-verify, aggregation, grid soundness."""
    problems = []
    for side in (report.side_a, report.side_a_pratt):
        for pr in side.pairs:
            w = pr.verdict.witness
            if w is not None and not w.verify(U.slice(pr.theta), U.slice(pr.theta_prime)):
                problems.append(f"witness does not re-verify at ({pr.theta}, {pr.theta_prime})")
    if report.side_b_sc.witness is not None and not report.side_b_sc.witness.verify(eq.single_crossing_differences(U)):
        problems.append("single-crossing-differences witness does not re-verify")
    for y in U.alternatives:
        fam = eq.differences_family(U, y)
        srm = report.side_b_srm[y]
        if srm.witness is not None and not srm.witness.verify(fam):
            problems.append(f"SRM witness for y={y} does not re-verify")
        mix = check_mixture_sc(fam)
        if mix.holds != (check_family_sc(fam).holds and srm.holds):
            problems.append(f"aggregation equivalence fails for y={y}")
        if mix.witness is not None and not mix.witness.verify(fam):
            problems.append(f"mixture witness for y={y} does not re-verify")
    if len(U.alternatives) <= 4:
        # grid violations are real violations; the converse needs finer grids
        for pr in report.side_a.pairs[:1]:
            if pr.verdict.holds and not check_lra_grid(U.slice(pr.theta), U.slice(pr.theta_prime), 6).holds:
                problems.append(f"grid oracle refutes ({pr.theta}, {pr.theta_prime})")
    return problems


def _selftest_one(job: tuple[str, int, eq.InstanceGenParams]) -> tuple[str, int, bool, list[str], dict | None]:
    kind, index, params = job
    inst = eq.gen_positive_instance(params) if kind == "constructive" else eq.gen_random_instance(params)
    U = inst.table
    try:
        report = eq.check_proposition(U)
    except TheoremViolation as exc:
        return kind, index, False, [f"TheoremViolation: {exc.detail}"], inst.to_json()
    problems = _oracle_problems(U, report)
    if kind == "constructive" and not report.holds:
        problems.append("constructive instance fails side (a)")
    return kind, index, report.holds, problems, (inst.to_json() if problems else None)


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _cmd_selftest(args, out: _Out) -> tuple[int, Any]:
    threads = _threads()
    n_random = args.instances
    n_constructive = (n_random + 1) // 2 if args.constructive is None else args.constructive
    if n_constructive < 0:
        raise UsageError("--constructive must be nonnegative")
    master = random.Random(args.seed)
    jobs = [("random", i, eq.campaign_params(master, i)) for i in range(n_random)]
    for i in range(n_constructive):
        p = eq.campaign_params(master, i)
        jobs.append(("constructive", i, eq.InstanceGenParams(
            p.seed, p.n_alternatives, p.n_params, Fraction(1), p.max_abs_numerator, p.max_denominator,
        )))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_selftest_one, jobs, chunksize=16))
    else:
        results = [_selftest_one(job) for job in jobs]

    counts = {"random": [0, 0], "constructive": [0, 0]}
    failures = []
    for kind, index, holds, problems, doc in results:
        counts[kind][0] += 1
        counts[kind][1] += holds
        if problems:
            name = f"riskorder-reproducer-{args.seed}-{kind}-{index}.json"
            path = Path.cwd() / name
            path.write_text(dump_json(doc), encoding="utf-8")
            failures.append({"kind": kind, "index": index, "problems": problems, "reproducer": str(path)})

    ok = not failures
    out(f"selftest seed={args.seed}: {'ok' if ok else 'FAILED'}")
    for kind, (n, h) in counts.items():
        out(f"  {kind}: {n} instances, {h} with side (a) holding, {n - h} failing")
    out(f"  disagreements / oracle mismatches: {len(failures)}")
    for f in failures:
        out(f"  [{f['kind']} #{f['index']}] {'; '.join(f['problems'])} (reproducer: {f['reproducer']})")
    doc = {
        "command": "selftest",
        "seed": args.seed,
        "ok": ok,
        "instances": {k: {"total": n, "holds": h} for k, (n, h) in counts.items()},
        "failures": failures,
    }
    return (EXIT_HOLDS if ok else EXIT_INTERNAL), doc


_INPUT_COMMANDS = {
    "check-lra": (_cmd_check_lra, (UtilityPair,)),
    "build-transform": (_cmd_build_transform, (UtilityPair,)),
    "check-sc": (_cmd_check_sc, (FamilyInstance, ParamInstance)),
    "check-srm": (_cmd_check_srm, (FamilyInstance, ParamInstance)),
    "check-aggregate": (_cmd_check_aggregate, (FamilyInstance, ParamInstance)),
    "check-proposition": (_cmd_check_proposition, (ParamInstance,)),
}


def _validate(args) -> None:
    if args.command == "check-lra" and args.denom_bound is not None and args.method not in ("grid", "all"):
        raise UsageError("--denom-bound applies only to --method grid or all")
    if args.command == "check-aggregate" and args.denom_bound is not None and args.method != "grid":
        raise UsageError("--denom-bound applies only to --method grid")


def _dispatch(args, stdin: bytes, out: _Out) -> tuple[int, Any]:
    _validate(args)
    if args.command == "gen-random":
        return _cmd_gen_random(args, out)
    if args.command == "selftest":
        return _cmd_selftest(args, out)
    handler, kinds = _INPUT_COMMANDS[args.command]
    inst = _read_input(args.input, stdin)
    _need(inst, kinds, args.command)
    try:
        return handler(args, inst, out)
    except TheoremViolation as exc:
        if exc.instance is None:
            exc.instance = inst
        raise


def run(argv: Sequence[str], stdin: bytes = b"") -> CliResult:
    """Run one command; never raises."""
    out = _Out()
    err = io.StringIO()
    help_buf = io.StringIO()
    code: int
    doc: Any = None
    as_json = False
    try:
        with contextlib.redirect_stdout(help_buf), contextlib.redirect_stderr(err):
            args = build_parser().parse_args(list(argv))
        as_json = getattr(args, "json", False)
        code, doc = _dispatch(args, stdin, out)
    except SystemExit as exc:
        return CliResult(int(exc.code or 0), help_buf.getvalue().encode(), err.getvalue().encode())
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        code = EXIT_INPUT
    except TheoremViolation as exc:
        err.write(f"internal error (theorem violation): {exc.detail}\n")
        if exc.instance is not None:
            path = _dump_reproducer(exc.instance, "riskorder-reproducer.json")
            err.write(f"reproducer written to {path}\n")
        code = EXIT_INTERNAL
    except RiskOrderError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        code = EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - the CLI must not crash on any input
        err.write(f"internal error: {type(exc).__name__}: {exc}\n")
        code = EXIT_INTERNAL
    if doc is None:
        stdout = b""
    elif as_json:
        stdout = json.dumps(doc, indent=2, ensure_ascii=False).encode("utf-8") + b"\n"
    else:
        stdout = out.text().encode("utf-8")
    return CliResult(code, stdout, err.getvalue().encode("utf-8"))


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    needs_stdin = "-" in argv
    stdin = sys.stdin.buffer.read() if needs_stdin else b""
    result = run(argv, stdin)
    sys.stdout.buffer.write(result.stdout)
    sys.stderr.buffer.write(result.stderr)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
