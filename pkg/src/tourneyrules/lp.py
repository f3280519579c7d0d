"""Feasibility programs over complete rule tables.

A rule table assigns a win distribution to every labeled tournament of a
fixed size. The program built here asks for a table that is Condorcet
consistent, monotone, and pairwise manipulation-resistant at a given
selfishness level, with the resistance constraint linearized through its
one-sided form (valid for monotone tables). Variables are per
(tournament, agent), or per (canonical class, automorphism orbit) under
symmetry reduction: the constraint system is relabeling-equivariant and
its feasible set convex, so averaging any feasible table over all
relabelings yields an equivariant one and the reduction loses nothing.

Solving proceeds by row generation: equalities first, then whichever
inequality rows the current point violates, until the point satisfies the
whole system or a subset is infeasible. Either way the answer is exact: a
FEASIBLE table re-passes the full max-form verifier before it is
returned, and an INFEASIBLE certificate is a checked nonnegative
combination of rows.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import permutations
from math import lcm
from typing import Iterable, Mapping, Sequence

from . import simplex
from ._rational import ZERO, as_fraction, format_rational, parse_rational, rat
from .analysis import (
    PropertyReport,
    alpha_report,
    check_fairness,
    check_monotone,
    check_one_sided_nm,
)
from .canonical import BudgetError, CanonicalClass, canonical_classes, canonical_form, class_members
from .rules import WinDistribution, format_distribution, parse_distribution
from .tournament import Tournament, all_tournaments, flip, from_code, pairs, top_cycle

#: full-table variables stop here; one size later the table alone has ~200k
#: variables, which this exact solver does not target
MAX_UNSYM_N = 5
MAX_SYM_N = 6

TABLE_PROPERTIES = ("CC", "MONOTONE", "NM_LAMBDA", "ONE_SIDED")


@dataclass(frozen=True)
class RuleTable:
    """Explicit tournament rule: one distribution per labeled tournament."""

    n: int
    lam: object
    entries: Mapping[int, WinDistribution]

    def __post_init__(self) -> None:
        count = 1 << (self.n * (self.n - 1) // 2)
        if len(self.entries) != count:
            raise ValueError(f"table must cover all {count} tournaments")
        for code, dist in self.entries.items():
            if not 0 <= code < count:
                raise ValueError(f"code {code} out of range")
            if dist.n != self.n:
                raise ValueError("distribution size mismatch")


def format_rule_table(table: RuleTable) -> str:
    lines = [f"n={table.n} lambda={format_rational(table.lam)}"]
    for code in sorted(table.entries):
        compact = from_code(table.n, code).compact()
        lines.append(f"{compact} {format_distribution(table.entries[code])}")
    return "\n".join(lines) + "\n"


def parse_rule_table(text: str) -> RuleTable:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty rule table")
    head = lines[0].split()
    if len(head) != 2 or not head[0].startswith("n=") or not head[1].startswith("lambda="):
        raise ValueError("first line must be 'n=<int> lambda=<rational>'")
    n = int(head[0][2:])
    lam = parse_rational(head[1][7:])
    entries: dict[int, WinDistribution] = {}
    for line in lines[1:]:
        compact, _, rest = line.partition(" ")
        from .tournament import parse_tournament

        T = parse_tournament(compact)
        if T.n != n:
            raise ValueError(f"tournament size {T.n} in a size-{n} table")
        code = T.code()
        if code in entries:
            raise ValueError(f"duplicate entry for {compact}")
        entries[code] = parse_distribution(rest, n)
    return RuleTable(n, lam, entries)


# -- instance construction ---------------------------------------------------


@dataclass
class LPRow:
    coeffs: dict[int, object]
    sense: str
    rhs: object
    tag: tuple

    def as_simplex(self) -> simplex.Row:
        return simplex.Row(self.coeffs, self.sense, self.rhs)


@dataclass
class LPInstance:
    n: int
    lam: object
    symmetric: bool
    monotone: bool
    variables: list[tuple]
    var_index: dict[tuple, int]
    rows: list[LPRow]
    classes: list[CanonicalClass] | None = None
    # indices of rows seen binding in earlier solves on this instance; a
    # warm start only, never a substitute for the full violation check
    _active: set[int] = field(default_factory=set, repr=False, compare=False)

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def stats(self) -> tuple[int, int, int]:
        eq = sum(1 for r in self.rows if r.sense == "eq")
        return (self.num_vars, eq, len(self.rows) - eq)

    def var_for(self, T: Tournament, agent: int) -> int:
        """Index of the variable carrying r_agent(T)."""
        if not self.symmetric:
            return self.var_index[("r", T.code(), agent)]
        cf = canonical_form(T)
        rep_code = cf.canonical.code()
        for k, cls in enumerate(self.classes):
            if cls.representative.code() == rep_code:
                target = cf.relabeling[agent - 1]
                for oi, orbit in enumerate(cls.orbits):
                    if target in orbit:
                        return self.var_index[("rc", k, oi)]
        raise KeyError("tournament not covered by the instance")


def build_lp(n: int, lam, symmetric: bool = False, monotone: bool = True) -> LPInstance:
    """Materialize the full constraint system for size n at selfishness lam."""
    lam = rat(lam)
    if n < 2:
        raise ValueError("need at least 2 agents")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if symmetric:
        if n > MAX_SYM_N:
            raise BudgetError(f"symmetric instances supported up to n={MAX_SYM_N}")
        return _build_symmetric(n, lam, monotone)
    if n > MAX_UNSYM_N:
        raise BudgetError(f"full-table instances supported up to n={MAX_UNSYM_N}")
    return _build_full(n, lam, monotone)


def _ordered_beating_pairs(T: Tournament) -> list[tuple[int, int]]:
    return [(i, j) if T.beats(i, j) else (j, i) for i, j in pairs(T.n)]


def _build_full(n: int, lam, monotone: bool) -> LPInstance:
    variables = [("r", T.code(), a) for T in all_tournaments(n) for a in T.agents()]
    var_index = {key: idx for idx, key in enumerate(variables)}
    rows: list[LPRow] = []
    for T in all_tournaments(n):
        code = T.code()
        rows.append(
            LPRow(
                {var_index[("r", code, a)]: rat(1) for a in T.agents()},
                "eq",
                rat(1),
                ("simplex", code),
            )
        )
        cw = T.condorcet_winner()
        if cw is not None:
            rows.append(LPRow({var_index[("r", code, cw)]: rat(1)}, "eq", rat(1), ("cc", code)))
    for T in all_tournaments(n):
        code = T.code()
        for w, l in _ordered_beating_pairs(T):
            other = flip(T, w, l)
            ocode = other.code()
            vw, vw2 = var_index[("r", code, w)], var_index[("r", ocode, w)]
            vl, vl2 = var_index[("r", code, l)], var_index[("r", ocode, l)]
            if monotone:
                rows.append(LPRow({vw2: rat(1), vw: rat(-1)}, "le", ZERO, ("mono", code, w, l)))
            rows.append(
                LPRow(
                    {vl2: rat(1), vl: rat(-1), vw: -(lam + 1), vw2: lam + 1},
                    "le",
                    ZERO,
                    ("oneside", code, l, w),
                )
            )
    return LPInstance(n, lam, False, monotone, variables, var_index, rows)


def _build_symmetric(n: int, lam, monotone: bool) -> LPInstance:
    classes = canonical_classes(n)
    rep_class = {cls.representative.code(): k for k, cls in enumerate(classes)}
    orbit_of: list[dict[int, int]] = []
    variables: list[tuple] = []
    for k, cls in enumerate(classes):
        mapping: dict[int, int] = {}
        for oi, orbit in enumerate(cls.orbits):
            variables.append(("rc", k, oi))
            for agent in orbit:
                mapping[agent] = oi
        orbit_of.append(mapping)
    var_index = {key: idx for idx, key in enumerate(variables)}

    cf_cache: dict[int, tuple[int, tuple[int, ...]]] = {}

    def locate(T: Tournament) -> tuple[int, tuple[int, ...]]:
        code = T.code()
        got = cf_cache.get(code)
        if got is None:
            cf = canonical_form(T)
            got = cf_cache[code] = (rep_class[cf.canonical.code()], cf.relabeling)
        return got

    def var_of(T: Tournament, k: int, relab: tuple[int, ...], agent: int) -> int:
        return var_index[("rc", k, orbit_of[k][relab[agent - 1]])]

    rows: list[LPRow] = []
    seen: set[tuple] = set()

    def push(coeffs: dict[int, object], sense: str, rhs, tag: tuple) -> None:
        coeffs = {j: c for j, c in coeffs.items() if c != 0}
        if not coeffs:
            if (sense == "eq" and rhs != 0) or (sense == "le" and rhs < 0):
                raise AssertionError("derived an unsatisfiable constant row")
            return
        key = (sense, rhs, tuple(sorted(coeffs.items())))
        if key in seen:
            return
        seen.add(key)
        rows.append(LPRow(coeffs, sense, rhs, tag))

    for k, cls in enumerate(classes):
        rep = cls.representative
        code = rep.code()
        push(
            {var_index[("rc", k, oi)]: rat(len(orbit)) for oi, orbit in enumerate(cls.orbits)},
            "eq",
            rat(1),
            ("simplex", code),
        )
        cw = rep.condorcet_winner()
        if cw is not None:
            push({var_index[("rc", k, orbit_of[k][cw])]: rat(1)}, "eq", rat(1), ("cc", code))
    for k, cls in enumerate(classes):
        rep = cls.representative
        code = rep.code()
        ident = tuple(range(1, n + 1))
        for w, l in _ordered_beating_pairs(rep):
            other = flip(rep, w, l)
            k2, relab = locate(other)
            vw, vw2 = var_of(rep, k, ident, w), var_of(other, k2, relab, w)
            vl, vl2 = var_of(rep, k, ident, l), var_of(other, k2, relab, l)
            if monotone:
                coeffs: dict[int, object] = {}
                coeffs[vw2] = coeffs.get(vw2, ZERO) + 1
                coeffs[vw] = coeffs.get(vw, ZERO) - 1
                push(coeffs, "le", ZERO, ("mono", code, w, l))
            coeffs = {}
            for v, c in ((vl2, rat(1)), (vl, rat(-1)), (vw, -(lam + 1)), (vw2, lam + 1)):
                coeffs[v] = coeffs.get(v, ZERO) + c
            push(coeffs, "le", ZERO, ("oneside", code, l, w))
    return LPInstance(n, lam, True, monotone, variables, var_index, rows, classes)


# -- solving -----------------------------------------------------------------


@dataclass
class FeasibilityResult:
    status: str  # FEASIBLE | INFEASIBLE | BUDGET_EXCEEDED
    table: RuleTable | None = None
    certificate: list[tuple[tuple, object]] | None = None
    verification: PropertyReport | None = None


def _remaining(deadline: float | None) -> float | None:
    if deadline is None:
        return None
    left = deadline - time.monotonic()
    if left <= 0:
        raise simplex.BudgetExceeded
    return left


def _start_rows(lp: LPInstance) -> set[int]:
    if not lp._active:
        lp._active = {i for i, row in enumerate(lp.rows) if row.sense == "eq"}
    return lp._active


def _generate(lp: LPInstance, deadline: float | None, solver):
    """Solve over a growing subset of rows until the point satisfies the
    whole instance or the subset is already infeasible.

    The subset persists on the instance, so later solves (the second probe
    direction, further probes) start from the rows that mattered before.
    Returns (simplex result, row indices the result refers to).
    """
    active = _start_rows(lp)
    while True:
        working = sorted(active)
        res = solver(
            [lp.rows[i].as_simplex() for i in working], _remaining(deadline)
        )
        if res.status not in ("feasible", "optimal"):
            return res, working
        x = res.point
        violated = [
            i
            for i, row in enumerate(lp.rows)
            if i not in active and _violates(row, x)
        ]
        if not violated:
            return res, working
        active.update(violated)


def solve_feasibility(lp: LPInstance, budget_seconds: float | None = None) -> FeasibilityResult:
    """Row-generating exact solve of the instance.

    FEASIBLE results carry a full rule table that has already re-passed
    the max-form verifier; INFEASIBLE results carry (tag, multiplier)
    certificate entries whose nonnegative combination is contradictory,
    re-checkable against the instance rows.
    """
    deadline = time.monotonic() + budget_seconds if budget_seconds else None
    try:
        res, working = _generate(
            lp,
            deadline,
            lambda rows, left: simplex.solve_feasibility(lp.num_vars, rows, left),
        )
    except simplex.BudgetExceeded:
        return FeasibilityResult("BUDGET_EXCEEDED")
    if res.status == "budget":
        return FeasibilityResult("BUDGET_EXCEEDED")
    if res.status == "infeasible":
        cert = [
            (lp.rows[i].tag, m)
            for i, m in zip(working, res.certificate)
            if m != 0
        ]
        return FeasibilityResult("INFEASIBLE", certificate=cert)
    table = _table_from_point(lp, res.point)
    verification = verify_rule_table(table, lp.lam, _require_for(lp))
    if not verification.holds:
        raise AssertionError(
            f"solver produced a table that fails verification: {verification}"
        )
    return FeasibilityResult("FEASIBLE", table=table, verification=verification)


def _require_for(lp: LPInstance) -> tuple[str, ...]:
    if lp.monotone:
        return TABLE_PROPERTIES
    return ("CC", "ONE_SIDED")


def _violates(row: LPRow, x: Sequence) -> bool:
    lhs = sum((c * x[j] for j, c in row.coeffs.items()), ZERO)
    return lhs != row.rhs if row.sense == "eq" else lhs > row.rhs


def verify_lp_certificate(lp: LPInstance, certificate: Iterable[tuple[tuple, object]]) -> bool:
    """Exact recheck of an infeasibility certificate against the instance."""
    by_tag = {row.tag: idx for idx, row in enumerate(lp.rows)}
    mu = [ZERO] * len(lp.rows)
    for tag, m in certificate:
        if tag not in by_tag:
            return False
        mu[by_tag[tag]] += m
    return simplex.verify_certificate(
        lp.num_vars, [r.as_simplex() for r in lp.rows], mu
    )


def _table_from_point(lp: LPInstance, x: Sequence) -> RuleTable:
    entries: dict[int, WinDistribution] = {}
    if not lp.symmetric:
        for T in all_tournaments(lp.n):
            code = T.code()
            entries[code] = WinDistribution(
                tuple(x[lp.var_index[("r", code, a)]] for a in T.agents())
            )
        return RuleTable(lp.n, lp.lam, entries)
    for k, cls in enumerate(lp.classes):
        orbit_value: dict[int, object] = {}
        for oi, orbit in enumerate(cls.orbits):
            for agent in orbit:
                orbit_value[agent] = x[lp.var_index[("rc", k, oi)]]
        for code, perm in class_members(cls.representative).items():
            probs = [ZERO] * lp.n
            for agent in range(1, lp.n + 1):
                probs[perm[agent - 1] - 1] = orbit_value[agent]
            entries[code] = WinDistribution(tuple(probs))
    return RuleTable(lp.n, lp.lam, entries)


def verify_rule_table(
    table: RuleTable,
    lam=None,
    require: Sequence[str] = TABLE_PROPERTIES,
) -> PropertyReport:
    """Exact audit of the table; NM_LAMBDA is the true max-form scan, so
    tables from any source can be checked without assuming monotonicity."""
    lam = table.lam if lam is None else rat(lam)
    mapping = dict(table.entries)
    details: list[PropertyReport] = []
    for prop in require:
        if prop == "CC":
            details.append(check_fairness(mapping, table.n, "CC"))
        elif prop == "MONOTONE":
            details.append(check_monotone(mapping, table.n))
        elif prop == "NM_LAMBDA":
            details.append(alpha_report(mapping, table.n, lam))
        elif prop == "ONE_SIDED":
            details.append(check_one_sided_nm(mapping, table.n, lam))
        else:
            raise ValueError(f"unknown table property {prop!r}")
    failing = [d for d in details if not d.holds]
    return PropertyReport(
        "TABLE",
        "table",
        table.n,
        not failing,
        failing[0].witness if failing else None,
        lam=lam,
        details=tuple(details),
    )


def probe_forced_values(
    lp: LPInstance, T: Tournament, agent: int, budget_seconds: float | None = None
) -> tuple[object, object]:
    """Exact range of r_agent(T) over the instance's feasible region; equal
    endpoints certify a forced value."""
    var = lp.var_for(T, agent)
    deadline = time.monotonic() + budget_seconds if budget_seconds else None
    bounds = []
    for maximize in (False, True):
        try:
            res, _ = _generate(
                lp,
                deadline,
                lambda rows, left, mx=maximize: simplex.optimize(
                    lp.num_vars, rows, {var: rat(1)}, maximize=mx, budget_seconds=left
                ),
            )
        except simplex.BudgetExceeded:
            raise BudgetError("probe budget exceeded") from None
        if res.status == "budget":
            raise BudgetError("probe budget exceeded")
        if res.status == "infeasible":
            raise ValueError("instance is infeasible")
        if res.status == "unbounded":
            raise AssertionError("probe cannot be unbounded on a simplex")
        bounds.append(res.value)
    return bounds[0], bounds[1]


# -- interchange format ------------------------------------------------------


def _lp_var_name(key: tuple) -> str:
    if key[0] == "r":
        return f"r{key[1]}_{key[2]}"
    return f"c{key[1]}_o{key[2]}"


def to_lp_format(lp: LPInstance) -> str:
    """Text export in the common LP interchange format, with each row
    scaled to integer coefficients so external solvers parse it exactly."""
    lines = [
        f"\\ rule-table feasibility: n={lp.n} lambda={format_rational(lp.lam)}"
        + (" symmetric" if lp.symmetric else ""),
        "Minimize",
        f" obj: 0 {_lp_var_name(lp.variables[0])}",
        "Subject To",
    ]
    for row in lp.rows:
        scale = lcm(
            as_fraction(row.rhs).denominator,
            *(as_fraction(c).denominator for c in row.coeffs.values()),
        )
        terms = []
        for j in sorted(row.coeffs):
            c = row.coeffs[j] * scale
            num = as_fraction(c).numerator
            terms.append(f"{'+' if num >= 0 else '-'} {abs(num)} {_lp_var_name(lp.variables[j])}")
        op = "=" if row.sense == "eq" else "<="
        rhs = as_fraction(row.rhs * scale).numerator
        name = "_".join(str(part) for part in row.tag)
        lines.append(f" {name}: {' '.join(terms)} {op} {rhs}")
    lines.append("End")
    return "\n".join(lines) + "\n"


# -- convex-hull reporting ---------------------------------------------------

#: vertex list of a known-good solution region for the strongly connected
#: 4-agent class at selfishness 1; the agent labeling it assumes is not
#: recorded with the vertices, so membership is reported per relabeling
#: instead of asserted
SC4_KNOWN_VERTICES = (
    (rat(4, 9), rat(2, 9), ZERO, rat(3, 9)),
    (rat(5, 9), rat(1, 9), ZERO, rat(3, 9)),
    (rat(13, 33), rat(8, 33), rat(2, 33), rat(10, 33)),
    (rat(5, 12), rat(13, 48), rat(1, 48), rat(7, 24)),
    (rat(11, 21), rat(4, 21), rat(1, 21), rat(5, 21)),
    (rat(17, 39), rat(7, 39), rat(4, 39), rat(11, 39)),
)


def hull_membership(point: Sequence, vertices: Sequence[Sequence]) -> bool:
    """Exact test that the point is a convex combination of the vertices."""
    dim = len(point)
    rows = [
        simplex.Row({k: rat(v[d]) for k, v in enumerate(vertices)}, "eq", rat(point[d]))
        for d in range(dim)
    ]
    rows.append(simplex.Row({k: rat(1) for k in range(len(vertices))}, "eq", rat(1)))
    return simplex.solve_feasibility(len(vertices), rows).status == "feasible"


def sc4_class_representative(n: int = 4) -> Tournament:
    for cls in canonical_classes(n):
        if len(top_cycle(cls.representative)) == n:
            return cls.representative
    raise AssertionError("no strongly connected class found")


def sc4_hull_labelings(dist: WinDistribution) -> list[tuple[int, ...]]:
    """Relabelings (reference position -> our agent) under which the
    distribution lies in the known vertex hull."""
    if dist.n != 4:
        raise ValueError("the reference hull is four-dimensional")
    matches = []
    for perm in permutations(range(1, 5)):
        reordered = tuple(dist[perm[d]] for d in range(4))
        if hull_membership(reordered, SC4_KNOWN_VERTICES):
            matches.append(perm)
    return matches
