"""Command-line front end.

Subcommands cover rule evaluation (exact and Monte Carlo), property scans,
the feasibility program, bound oracles, and a one-shot reproduction report.
Every number read or written is an integer or a "p/q" rational; decimals
are rejected outright so nothing is silently rounded. Randomized paths
demand an explicit --seed and identical invocations produce byte-identical
reports.

Exit codes: 0 when the command succeeds and any checked property holds or
the program is feasible; 1 when a checked property fails or the program is
infeasible (the report carries the witness or certificate); 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analysis, bounds, lp
from ._rational import format_rational, parse_rational, rat
from .analysis import INFINITE, ManipulationWitness, PropertyReport, Witness
from .canonical import BudgetError
from .montecarlo import monte_carlo
from .rules import ALL_RULES, RuleId, evaluate, format_distribution
from .tournament import (
    FAMILIES,
    Tournament,
    TournamentFormatError,
    construct,
    parse_tournament,
)


@dataclass
class CommandResult:
    exit_code: int
    report: str


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # report usage problems through CommandResult instead of exiting
    def error(self, message: str) -> None:
        raise UsageError(f"{message}\n{self.format_usage()}")


def _rational(text: str):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _rule(name: str) -> RuleId:
    for rule in ALL_RULES:
        if rule.value.lower() == name.lower():
            return rule
    choices = ", ".join(r.value for r in ALL_RULES)
    raise UsageError(f"unknown rule {name!r}; choose from {choices}")


def _load_tournament(path: str) -> Tournament:
    try:
        return parse_tournament(Path(path).read_text().strip())
    except OSError as exc:
        raise UsageError(f"cannot read tournament file: {exc}") from None
    except TournamentFormatError as exc:
        raise UsageError(str(exc)) from None


def _load_table(path: str) -> lp.RuleTable:
    try:
        return lp.parse_rule_table(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read table file: {exc}") from None
    except (ValueError, TournamentFormatError) as exc:
        raise UsageError(f"bad rule table: {exc}") from None


def _write_out(path: str | None, payload: str, lines: list[str]) -> None:
    if path:
        Path(path).write_text(payload)
        lines.append(f"wrote {path}")


def _witness_lines(witness) -> list[str]:
    if witness is None:
        return []
    if isinstance(witness, ManipulationWitness):
        return [
            f"witness tournament: {witness.T.compact()}",
            f"witness pair: {witness.i} {witness.j}",
            "witness gains: "
            f"gain_i={format_rational(witness.gain_i)} "
            f"gain_j={format_rational(witness.gain_j)} "
            f"joint={format_rational(witness.joint_gain)} "
            f"max_loss={format_rational(witness.max_loss)} "
            f"value={format_rational(witness.value)}",
        ]
    if isinstance(witness, Witness):
        out = [
            f"witness tournament: {witness.T.compact()}",
            "witness agents: " + " ".join(str(a) for a in witness.agents),
            "witness values: " + " ".join(format_rational(v) for v in witness.values),
        ]
        if witness.detail:
            out.append(f"witness detail: {witness.detail}")
        return out
    return [f"witness: {witness!r}"]


def _report_lines(report: PropertyReport) -> list[str]:
    verdict = "holds" if report.holds else "FAILS"
    head = f"{report.property} {report.rule} n={report.n}"
    if report.lam is not None:
        head += f" lambda={format_rational(report.lam)}"
    lines = [f"{head}: {verdict}"]
    if report.alpha is not None:
        lines.append(f"alpha = {format_rational(report.alpha)}")
    if not report.holds:
        lines.extend(_witness_lines(report.witness))
    return lines


def _threads(value: int | None) -> int:
    # accepted for interface stability; scans are deterministic either way
    count = value if value is not None else os.cpu_count() or 1
    if count < 1:
        raise UsageError("--threads must be at least 1")
    return count


def build_parser() -> _Parser:
    parser = _Parser(prog="tourneyrules", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def cmd(name: str, **kwargs) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--threads", type=int, default=None, metavar="K")
        p.add_argument("--out", metavar="FILE")
        return p

    p = cmd("eval", help="exact winner distribution of a rule on one tournament")
    p.add_argument("--rule", required=True)
    p.add_argument("--tournament", metavar="FILE")
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--param", type=int, metavar="K")

    p = cmd("mc", help="Monte Carlo winner frequencies")
    p.add_argument("--rule", required=True)
    p.add_argument("--tournament", metavar="FILE")
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--param", type=int, metavar="K")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True, metavar="U64")

    p = cmd("scan", help="worst-case manipulation slack over all tournaments")
    p.add_argument("--rule", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True, metavar="p/q")

    p = cmd("min-lambda", help="least selfishness level at which a rule is resistant")
    p.add_argument("--rule", required=True)
    p.add_argument("--n", type=int, required=True)

    p = cmd("fairness", help="CC/TCC/COVER/DSTC verdicts for a rule")
    p.add_argument("--rule", required=True)
    p.add_argument("--n", type=int, required=True)

    p = cmd("monotone", help="check that throwing a match never helps")
    p.add_argument("--rule", required=True)
    p.add_argument("--n", type=int, required=True)

    p = cmd("pnm", help="pairwise non-manipulability, two-case and limit forms")
    p.add_argument("--rule", required=True)
    p.add_argument("--n", type=int, required=True)

    p = cmd("lp", help="solve the rule-table feasibility program")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True, metavar="p/q")
    p.add_argument("--symmetric", action="store_true")

    p = cmd("probe", help="exact per-agent value range over the feasible tables")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", required=True, metavar="p/q")
    p.add_argument("--tournament", metavar="FILE")
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--param", type=int, metavar="K")
    p.add_argument("--symmetric", action="store_true")

    p = cmd("verify-table", help="audit a rule table file")
    p.add_argument("--table", required=True, metavar="FILE")
    p.add_argument("--lambda", dest="lam", metavar="p/q")

    p = cmd("construct", help="build a named tournament family member")
    p.add_argument("--family", required=True, choices=sorted(FAMILIES))
    p.add_argument("--param", type=int, metavar="K")

    p = cmd("bounds", help="closed-form oracle comparison CSV")
    p.add_argument("--n", type=int, default=6, help="largest size to tabulate")

    p = cmd("reproduce", help="recompute the headline result matrices")
    p.add_argument("--n", type=int, default=6, help="largest size to tabulate")

    return parser


def _pick_tournament(args) -> Tournament:
    if args.tournament and args.family:
        raise UsageError("give either --tournament or --family, not both")
    if args.tournament:
        return _load_tournament(args.tournament)
    if args.family:
        try:
            return construct(args.family, args.param)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError("one of --tournament or --family is required")


def _cmd_eval(args) -> CommandResult:
    dist = evaluate(_rule(args.rule), _pick_tournament(args))
    text = format_distribution(dist)
    lines = [text]
    _write_out(args.out, text + "\n", lines)
    return CommandResult(0, "\n".join(lines))


def _cmd_mc(args) -> CommandResult:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if not 0 <= args.seed < 1 << 64:
        raise UsageError("--seed must fit in 64 bits")
    T = _pick_tournament(args)
    dist = monte_carlo(_rule(args.rule), T, args.trials, args.seed)
    text = format_distribution(dist)
    lines = [
        f"trials={args.trials} seed={args.seed}",
        text,
    ]
    _write_out(args.out, text + "\n", lines)
    return CommandResult(0, "\n".join(lines))


def _cmd_scan(args) -> CommandResult:
    lam = _rational(args.lam)
    report = analysis.alpha_report(_rule(args.rule), args.n, lam)
    lines = [f"alpha = {format_rational(report.alpha)}"]
    lines.extend(_witness_lines(report.witness))
    _write_out(args.out, analysis.reports_to_csv([report]), lines)
    return CommandResult(0, "\n".join(lines))


def _cmd_min_lambda(args) -> CommandResult:
    rule = _rule(args.rule)
    value, witness = analysis.min_lambda(rule, args.n, return_witness=True)
    shown = "INFINITE" if value is INFINITE else format_rational(value)
    lines = [f"min_lambda = {shown}"]
    lines.extend(_witness_lines(witness))
    if args.out:
        Path(args.out).write_text(f"min_lambda = {shown}\n")
        lines.append(f"wrote {args.out}")
    return CommandResult(0, "\n".join(lines))


def _cmd_fairness(args) -> CommandResult:
    rule = _rule(args.rule)
    reports = [
        analysis.check_fairness(rule, args.n, prop)
        for prop in analysis.FAIRNESS_PROPERTIES
    ]
    lines = []
    for report in reports:
        lines.extend(_report_lines(report))
    _write_out(args.out, analysis.reports_to_csv(reports), lines)
    code = 0 if all(r.holds for r in reports) else 1
    return CommandResult(code, "\n".join(lines))


def _cmd_monotone(args) -> CommandResult:
    report = analysis.check_monotone(_rule(args.rule), args.n)
    lines = _report_lines(report)
    _write_out(args.out, analysis.reports_to_csv([report]), lines)
    return CommandResult(0 if report.holds else 1, "\n".join(lines))


def _cmd_pnm(args) -> CommandResult:
    rule = _rule(args.rule)
    two_case = analysis.check_pnm(rule, args.n)
    limit = analysis.check_nm_infinity(rule, args.n)
    if two_case.holds != limit.holds:
        raise AssertionError("two-case and limit checks disagree")
    lines = _report_lines(two_case)
    lines.append(f"limit form agrees: {'holds' if limit.holds else 'FAILS'}")
    _write_out(args.out, analysis.reports_to_csv([two_case, limit]), lines)
    return CommandResult(0 if two_case.holds else 1, "\n".join(lines))


def _default_lp_out(args, kind: str) -> str:
    lam = format_rational(_rational(args.lam)).replace("/", "-")
    sym = "_sym" if args.symmetric else ""
    return f"lp_n{args.n}_lambda{lam}{sym}.{kind}"


def _format_certificate(instance: lp.LPInstance, certificate) -> str:
    head = (
        f"n={instance.n} lambda={format_rational(instance.lam)}"
        + (" symmetric" if instance.symmetric else "")
    )
    body = [
        "_".join(str(part) for part in tag) + " " + format_rational(mult)
        for tag, mult in certificate
    ]
    return "\n".join([head, *body]) + "\n"


def _cmd_lp(args) -> CommandResult:
    lam = _rational(args.lam)
    instance = lp.build_lp(args.n, lam, symmetric=args.symmetric)
    nvars, eqs, ineqs = instance.stats()
    result = lp.solve_feasibility(instance)
    lines = [
        f"variables={nvars} equalities={eqs} inequalities={ineqs}",
        result.status,
    ]
    if result.status == "FEASIBLE":
        out = args.out or _default_lp_out(args, "table")
        Path(out).write_text(lp.format_rule_table(result.table))
        lines.append(f"verified: {result.verification.holds}")
        lines.append(f"wrote {out}")
        return CommandResult(0, "\n".join(lines))
    out = args.out or _default_lp_out(args, "cert")
    Path(out).write_text(_format_certificate(instance, result.certificate))
    lines.append(f"certificate rows: {len(result.certificate)}")
    lines.append(f"wrote {out}")
    return CommandResult(1, "\n".join(lines))


def _cmd_probe(args) -> CommandResult:
    lam = _rational(args.lam)
    T = _pick_tournament(args)
    n = args.n if args.n is not None else T.n
    if n != T.n:
        raise UsageError(f"--n {n} does not match the {T.n}-agent tournament")
    instance = lp.build_lp(n, lam, symmetric=args.symmetric)
    lines = []
    for agent in T.agents():
        lo, hi = lp.probe_forced_values(instance, T, agent)
        tag = "forced" if lo == hi else "free"
        lines.append(
            f"agent {agent}: min={format_rational(lo)} "
            f"max={format_rational(hi)} {tag}"
        )
    _write_out(args.out, "\n".join(lines) + "\n", lines)
    return CommandResult(0, "\n".join(lines))


def _cmd_verify_table(args) -> CommandResult:
    table = _load_table(args.table)
    lam = _rational(args.lam) if args.lam is not None else None
    report = lp.verify_rule_table(table, lam)
    lines = []
    for part in report.details:
        lines.extend(_report_lines(part))
    lines.append(f"table: {'holds' if report.holds else 'FAILS'}")
    _write_out(args.out, analysis.reports_to_csv(report.details), lines)
    return CommandResult(0 if report.holds else 1, "\n".join(lines))


def _cmd_construct(args) -> CommandResult:
    try:
        T = construct(args.family, args.param)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = T.compact()
    lines = [text]
    _write_out(args.out, text + "\n", lines)
    return CommandResult(0, "\n".join(lines))


def _cmd_bounds(args) -> CommandResult:
    rows = bounds.oracle_rows(args.n)
    csv_text = bounds.bounds_csv(args.n)
    mismatches = [row for row in rows if row[-1] != "yes"]
    lines = [f"rows={len(rows)} mismatches={len(mismatches)}"]
    _write_out(args.out, csv_text, lines)
    if not args.out:
        lines.append(csv_text.rstrip("\n"))
    return CommandResult(0 if not mismatches else 1, "\n".join(lines))


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def _reproduce(nmax: int) -> str:
    """Recompute the headline matrices at desk scale.

    Matrix 1: monotonicity and fairness verdicts per rule, exhaustive over
    all tournaments at the stated sizes. Matrix 2: exact worst-case
    manipulation numbers per rule. Bounds: oracle comparison CSV.
    """
    nmax = max(3, min(nmax, 6))
    fair_n = min(nmax, 5)
    out = []
    out.append(f"# fairness and monotonicity, exhaustive at n <= {fair_n}")
    out.append("rule,monotone,CC,TCC,COVER,DSTC,PNM")
    for rule in ALL_RULES:
        mono = all(
            analysis.check_monotone(rule, n).holds for n in range(3, fair_n + 1)
        )
        fair = {
            prop: all(
                analysis.check_fairness(rule, n, prop).holds
                for n in range(3, fair_n + 1)
            )
            for prop in analysis.FAIRNESS_PROPERTIES
        }
        pnm = all(analysis.check_pnm(rule, n).holds for n in range(3, 5))
        out.append(
            f"{rule.value},{_yesno(mono)},{_yesno(fair['CC'])},{_yesno(fair['TCC'])},"
            f"{_yesno(fair['COVER'])},{_yesno(fair['DSTC'])},{_yesno(pnm)}"
        )
    scan_n = min(nmax, 5)
    out.append("")
    out.append(f"# worst-case manipulation at n = {scan_n}, exact scan")
    out.append("rule,alpha_at_lambda_0,alpha_at_lambda_1,min_lambda")
    for rule in ALL_RULES:
        a0, _ = analysis.worst_alpha(rule, scan_n, 0)
        a1, _ = analysis.worst_alpha(rule, scan_n, 1)
        ml = analysis.min_lambda(rule, scan_n)
        shown = "INFINITE" if ml is INFINITE else format_rational(ml)
        out.append(
            f"{rule.value},{format_rational(a0)},{format_rational(a1)},{shown}"
        )
    out.append("")
    out.append("# closed-form bound oracles vs implementation")
    out.append(bounds.bounds_csv(nmax).rstrip("\n"))
    return "\n".join(out) + "\n"


def _cmd_reproduce(args) -> CommandResult:
    text = _reproduce(args.n)
    lines = []
    _write_out(args.out, text, lines)
    if not args.out:
        lines.append(text.rstrip("\n"))
    return CommandResult(0, "\n".join(lines))


_DISPATCH = {
    "eval": _cmd_eval,
    "mc": _cmd_mc,
    "scan": _cmd_scan,
    "min-lambda": _cmd_min_lambda,
    "fairness": _cmd_fairness,
    "monotone": _cmd_monotone,
    "pnm": _cmd_pnm,
    "lp": _cmd_lp,
    "probe": _cmd_probe,
    "verify-table": _cmd_verify_table,
    "construct": _cmd_construct,
    "bounds": _cmd_bounds,
    "reproduce": _cmd_reproduce,
}


def run(argv: list[str] | None = None) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
        _threads(args.threads)
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        return CommandResult(2, str(exc).rstrip("\n"))
    except BudgetError as exc:
        return CommandResult(2, f"budget: {exc}")
    except (ValueError, OSError) as exc:
        return CommandResult(2, str(exc))


def main(argv: list[str] | None = None) -> int:
    result = run(argv)
    stream = sys.stderr if result.exit_code == 2 else sys.stdout
    print(result.report, file=stream)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
