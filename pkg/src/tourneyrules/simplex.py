"""Exact rational simplex for feasibility and small optimizations.

Systems are equalities and <= inequalities over nonnegative variables with
rational coefficients. The solver is a textbook two-phase dictionary
simplex kept fully exact: no floats anywhere, so FEASIBLE means a point
that satisfies every row under rational arithmetic and INFEASIBLE comes
with a nonnegative-combination certificate that is re-verified before it
is returned.

Pivoting uses Dantzig's rule for speed and switches permanently to Bland's
least-index rule after a run of degenerate pivots, which guarantees
termination. All candidate scans break ties by lowest variable index, so
runs are deterministic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Mapping, Sequence

from ._rational import ONE, ZERO, rat

#: consecutive non-improving pivots tolerated before Bland's rule kicks in
_STALL_LIMIT = 25


class BudgetExceeded(Exception):
    """Raised internally when the pivot loop hits its deadline."""


@dataclass(frozen=True)
class Row:
    """coeffs maps variable index to a nonzero rational coefficient."""

    coeffs: Mapping[int, object]
    sense: str
    rhs: object

    def __post_init__(self) -> None:
        if self.sense not in ("eq", "le"):
            raise ValueError(f"unknown row sense {self.sense!r}")


@dataclass
class SimplexResult:
    status: str  # feasible | infeasible | optimal | unbounded | budget
    point: list | None = None
    value: object | None = None
    certificate: list | None = None


def verify_point(rows: Sequence[Row], x: Sequence) -> bool:
    if any(v < 0 for v in x):
        return False
    for row in rows:
        lhs = sum((c * x[j] for j, c in row.coeffs.items()), ZERO)
        if row.sense == "eq":
            if lhs != row.rhs:
                return False
        elif lhs > row.rhs:
            return False
    return True


def verify_certificate(num_vars: int, rows: Sequence[Row], mu: Sequence) -> bool:
    """A valid certificate is a combination of the rows, nonnegative on
    inequalities, whose combined left side is componentwise nonnegative
    while the combined right side is negative: unsatisfiable over x >= 0."""
    if len(mu) != len(rows):
        return False
    combined: dict[int, object] = {}
    beta = ZERO
    for m, row in zip(mu, rows):
        if row.sense == "le" and m < 0:
            return False
        if m == 0:
            continue
        beta += m * row.rhs
        for j, c in row.coeffs.items():
            combined[j] = combined.get(j, ZERO) + m * c
    if any(not 0 <= j < num_vars for j in combined):
        return False
    return all(g >= 0 for g in combined.values()) and beta < 0


class _Dictionary:
    """Sparse simplex dictionary: every basic variable is expressed as a
    constant plus a combination of nonbasic variables, and a column index
    tracks which rows mention each nonbasic variable."""

    def __init__(self, deadline: float | None) -> None:
        self.consts: dict[int, object] = {}
        self.coeffs: dict[int, dict[int, object]] = {}
        self.where: dict[int, set[int]] = {}
        self.zrow: dict[int, object] = {}
        self.zconst = ZERO
        self.deadline = deadline
        self.bland = False
        self._stall = 0

    # -- construction --------------------------------------------------------

    def install_row(self, basic: int, const, coeffs: dict[int, object]) -> None:
        self.consts[basic] = const
        self.coeffs[basic] = coeffs
        for j in coeffs:
            self.where.setdefault(j, set()).add(basic)

    # -- pivoting -------------------------------------------------------------

    def _entering(self) -> int | None:
        best = None
        best_coef = None
        for j, coef in self.zrow.items():
            if coef <= 0:
                continue
            if self.bland:
                if best is None or j < best:
                    best = j
            elif best_coef is None or coef > best_coef or (coef == best_coef and j < best):
                best, best_coef = j, coef
        return best

    def _leaving(self, enter: int) -> int | None:
        best = None
        best_ratio = None
        for b in self.where.get(enter, ()):
            coef = self.coeffs[b][enter]
            if coef >= 0:
                continue
            ratio = self.consts[b] / -coef
            if (
                best_ratio is None
                or ratio < best_ratio
                or (ratio == best_ratio and b < best)
            ):
                best, best_ratio = b, ratio
        return best

    def pivot(self, enter: int, leave: int) -> None:
        lrow = self.coeffs.pop(leave)
        lconst = self.consts.pop(leave)
        for j in lrow:
            self.where[j].discard(leave)
        a = lrow.pop(enter)
        inv = -1 / a
        econst = lconst * inv
        erow = {leave: -inv}
        for j, c in lrow.items():
            erow[j] = c * inv
        touched = [b for b in self.where.get(enter, ()) if b != leave]
        for b in touched:
            ce = self.coeffs[b].pop(enter)
            self._merge(self.coeffs[b], b, ce, econst, erow)
        ze = self.zrow.pop(enter, None)
        if ze is not None:
            self.zconst += ze * econst
            self._zmerge(ze, erow)
        self.where[enter] = set()
        self.install_row(enter, econst, erow)

    def _merge(self, row: dict, b: int, factor, econst, erow: dict) -> None:
        self.consts[b] += factor * econst
        for j, c in erow.items():
            new = row.get(j, ZERO) + factor * c
            if new == 0:
                if j in row:
                    del row[j]
                    self.where[j].discard(b)
            else:
                if j not in row:
                    self.where.setdefault(j, set()).add(b)
                row[j] = new

    def _zmerge(self, factor, erow: dict) -> None:
        for j, c in erow.items():
            new = self.zrow.get(j, ZERO) + factor * c
            if new == 0:
                self.zrow.pop(j, None)
            else:
                self.zrow[j] = new

    def maximize(self) -> str:
        while True:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise BudgetExceeded
            enter = self._entering()
            if enter is None:
                return "optimal"
            leave = self._leaving(enter)
            if leave is None:
                return "unbounded"
            before = self.zconst
            self.pivot(enter, leave)
            if self.zconst == before:
                self._stall += 1
                if self._stall >= _STALL_LIMIT:
                    self.bland = True
            else:
                self._stall = 0


def _build_phase1(num_vars: int, rows: Sequence[Row], deadline):
    """Slacks for inequalities, artificials wherever no +1 unit column is
    available after making right sides nonnegative. Returns the dictionary
    plus per-row bookkeeping needed for certificate extraction."""
    d = _Dictionary(deadline)
    next_var = num_vars
    unit_vars: list[int] = []
    unit_costs: list[int] = []
    flips: list[int] = []
    art_rows: list[int] = []
    for row in rows:
        flip = -1 if row.rhs < 0 else 1
        coeffs = {j: flip * c for j, c in row.coeffs.items()}
        const = flip * row.rhs
        if row.sense == "le":
            slack = next_var
            next_var += 1
            coeffs[slack] = flip * ONE
        if row.sense == "le" and flip == 1:
            unit, cost = slack, 0
        else:
            unit = next_var
            next_var += 1
            cost = 1
            art_rows.append(unit)
        unit_vars.append(unit)
        unit_costs.append(cost)
        flips.append(flip)
        # dictionary form: x_unit = const - sum(coeffs * x)
        d.install_row(unit, const, {j: -c for j, c in coeffs.items() if c != 0})
    # maximize z = -sum(artificials), expressed through the basic rows
    for a in art_rows:
        d.zconst -= d.consts[a]
        for j, c in d.coeffs[a].items():
            new = d.zrow.get(j, ZERO) - c
            if new == 0:
                d.zrow.pop(j, None)
            else:
                d.zrow[j] = new
    return d, unit_vars, unit_costs, flips, set(art_rows), next_var


def _extract_certificate(d: _Dictionary, unit_vars, unit_costs, flips) -> list:
    """Row multipliers from the phase-1 reduced costs at each row's initial
    unit column; see verify_certificate for the property they satisfy."""
    mu = []
    for unit, cost, flip in zip(unit_vars, unit_costs, flips):
        reduced = ZERO if unit in d.coeffs else -d.zrow.get(unit, ZERO)
        y = cost - reduced
        mu.append(-flip * y)
    return mu


def _drive_out_artificials(d: _Dictionary, artificials: set[int]) -> None:
    for a in sorted(artificials):
        if a not in d.coeffs:
            for b in d.where.pop(a, set()):
                d.coeffs[b].pop(a, None)
            d.zrow.pop(a, None)
            continue
        pivot_col = None
        for j in sorted(d.coeffs[a]):
            if j not in artificials and d.coeffs[a][j] != 0:
                pivot_col = j
                break
        if pivot_col is None:
            # the row is a combination of the others: drop it
            for j in d.coeffs[a]:
                d.where[j].discard(a)
            del d.coeffs[a]
            del d.consts[a]
        else:
            d.pivot(pivot_col, a)
            for b in d.where.pop(a, set()):
                d.coeffs[b].pop(a, None)
            d.zrow.pop(a, None)


def _point(d: _Dictionary, num_vars: int) -> list:
    return [d.consts.get(j, ZERO) if j in d.coeffs else ZERO for j in range(num_vars)]


def _trivial_conflict(rows: Sequence[Row]) -> list | None:
    """Constant rows that are false on their own yield a unit certificate."""
    for idx, row in enumerate(rows):
        if row.coeffs:
            continue
        mu = None
        if row.sense == "le" and row.rhs < 0:
            mu = ONE
        elif row.sense == "eq" and row.rhs != 0:
            mu = -ONE if row.rhs > 0 else ONE
        if mu is not None:
            cert = [ZERO] * len(rows)
            cert[idx] = mu
            return cert
    return None


def solve_feasibility(
    num_vars: int, rows: Sequence[Row], budget_seconds: float | None = None
) -> SimplexResult:
    deadline = time.monotonic() + budget_seconds if budget_seconds else None
    cert = _trivial_conflict(rows)
    if cert is not None:
        return SimplexResult("infeasible", certificate=cert)
    d, unit_vars, unit_costs, flips, artificials, _ = _build_phase1(
        num_vars, rows, deadline
    )
    try:
        status = d.maximize()
    except BudgetExceeded:
        return SimplexResult("budget")
    if status != "optimal":
        raise AssertionError("phase 1 is bounded by construction")
    if d.zconst != 0:
        mu = _extract_certificate(d, unit_vars, unit_costs, flips)
        if not verify_certificate(num_vars, rows, mu):
            raise AssertionError("internal error: invalid infeasibility certificate")
        return SimplexResult("infeasible", certificate=mu)
    _drive_out_artificials(d, artificials)
    x = _point(d, num_vars)
    if not verify_point(rows, x):
        raise AssertionError("internal error: phase-1 point fails verification")
    return SimplexResult("feasible", point=x)


def optimize(
    num_vars: int,
    rows: Sequence[Row],
    objective: Mapping[int, object],
    maximize: bool = True,
    budget_seconds: float | None = None,
) -> SimplexResult:
    """Exact optimum of a linear objective over the system; feasibility
    certificates behave as in solve_feasibility."""
    deadline = time.monotonic() + budget_seconds if budget_seconds else None
    cert = _trivial_conflict(rows)
    if cert is not None:
        return SimplexResult("infeasible", certificate=cert)
    d, unit_vars, unit_costs, flips, artificials, _ = _build_phase1(
        num_vars, rows, deadline
    )
    try:
        d.maximize()
        if d.zconst != 0:
            mu = _extract_certificate(d, unit_vars, unit_costs, flips)
            if not verify_certificate(num_vars, rows, mu):
                raise AssertionError("internal error: invalid infeasibility certificate")
            return SimplexResult("infeasible", certificate=mu)
        _drive_out_artificials(d, artificials)
        sign = ONE if maximize else -ONE
        d.zconst = ZERO
        d.zrow = {}
        for j, c in sorted(objective.items()):
            if c == 0:
                continue
            c = sign * rat(c)
            if j in d.coeffs:
                d.zconst += c * d.consts[j]
                for k, rc in d.coeffs[j].items():
                    new = d.zrow.get(k, ZERO) + c * rc
                    if new == 0:
                        d.zrow.pop(k, None)
                    else:
                        d.zrow[k] = new
            else:
                new = d.zrow.get(j, ZERO) + c
                if new == 0:
                    d.zrow.pop(j, None)
                else:
                    d.zrow[j] = new
        d.bland = False
        d._stall = 0
        status = d.maximize()
    except BudgetExceeded:
        return SimplexResult("budget")
    if status == "unbounded":
        return SimplexResult("unbounded")
    x = _point(d, num_vars)
    if not verify_point(rows, x):
        raise AssertionError("internal error: optimal point fails verification")
    value = sum((rat(c) * x[j] for j, c in objective.items()), ZERO)
    return SimplexResult("optimal", point=x, value=value)
