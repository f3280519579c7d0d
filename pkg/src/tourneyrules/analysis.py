"""Exact property scans: fairness, monotonicity, and pairwise manipulation.

Scans enumerate labeled tournaments in ascending code order and keep the
first (or maximal, for worst-case gain) witness, so every report is
deterministic and can be replayed independently. All arithmetic is exact;
a report never depends on floating point.

The ``rule`` argument of every scan accepts a RuleId, a mapping from
tournament codes to WinDistribution (an explicit rule table), or any
callable from Tournament to WinDistribution. Mapping-backed rules only
cover one size, so they cannot be scanned for DSTC, which evaluates
restrictions of smaller size.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

from ._rational import ZERO, format_rational, rat
from .canonical import BudgetError, canonical_classes
from .rules import RuleId, WinDistribution, evaluate
from .tournament import (
    Tournament,
    all_tournaments,
    covered_agents,
    dominant_subsets,
    flip,
    pad,
    prsl_cycle,
    restrict,
    rkoth_gadget,
    rseb_dstc_gadget,
    superman_kryptonite,
    top_cycle,
)

#: exhaustive scans stop here: 2^15 tournaments at n = 6 is the practical limit
MAX_SCAN_N = 6
#: above MAX_SCAN_N, built-in scans run on a targeted battery of constructions
MAX_TARGETED_N = 8

FAIRNESS_PROPERTIES = ("CC", "TCC", "COVER", "DSTC")

RuleLike = Union[RuleId, Mapping, Callable[[Tournament], WinDistribution]]


class _Infinite:
    """Distinguished "no finite lambda suffices" value; compares above
    every number and equals only itself."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "INFINITE"

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self


INFINITE = _Infinite()


@dataclass(frozen=True)
class ManipulationWitness:
    """One pairwise deviation: agents i and j flip their match in T."""

    T: Tournament
    i: int
    j: int
    gain_i: object
    gain_j: object
    joint_gain: object
    max_loss: object
    value: object

    def __post_init__(self) -> None:
        if self.joint_gain != self.gain_i + self.gain_j:
            raise ValueError("joint_gain must equal gain_i + gain_j")
        if self.max_loss != max(-self.gain_i, -self.gain_j):
            raise ValueError("max_loss must equal max(-gain_i, -gain_j)")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.i, self.j)


@dataclass(frozen=True)
class Witness:
    """Generic counterexample: a tournament, the agents involved, and the
    probability values that violate the property."""

    T: Tournament
    agents: tuple[int, ...]
    values: tuple
    detail: str = ""


@dataclass(frozen=True)
class PropertyReport:
    property: str
    rule: str
    n: int
    holds: bool
    witness: Witness | ManipulationWitness | None = None
    lam: object | None = None
    alpha: object | None = None
    details: tuple = ()

    def __post_init__(self) -> None:
        if not self.holds and self.witness is None:
            raise ValueError("failing report requires a witness")

    def csv_row(self) -> list[str]:
        wit = self.witness
        compact = pair = gains = ""
        if isinstance(wit, ManipulationWitness):
            compact = wit.T.compact()
            pair = f"{wit.i};{wit.j}"
            gains = ";".join(format_rational(g) for g in (wit.gain_i, wit.gain_j))
        elif isinstance(wit, Witness):
            compact = wit.T.compact()
            pair = ";".join(str(a) for a in wit.agents)
            gains = ";".join(format_rational(v) for v in wit.values)
        return [
            self.property,
            self.rule,
            str(self.n),
            format_rational(self.lam) if self.lam is not None else "",
            "holds" if self.holds else "fails",
            format_rational(self.alpha) if self.alpha is not None else "",
            compact,
            pair,
            gains,
        ]


CSV_HEADER = [
    "property",
    "rule",
    "n",
    "lambda",
    "verdict",
    "alpha",
    "witness",
    "pair",
    "gains",
]


def reports_to_csv(reports: Iterable[PropertyReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in reports:
        writer.writerow(report.csv_row())
    return buf.getvalue()


# -- rule plumbing -----------------------------------------------------------


def rule_name(rule: RuleLike) -> str:
    return rule.value if isinstance(rule, RuleId) else "table"


def _evaluator(rule: RuleLike) -> Callable[[Tournament], WinDistribution]:
    """Memoizing view of the rule; one instance per scan so repeated flips
    share work."""
    if isinstance(rule, RuleId):
        memo: dict[tuple[int, int], WinDistribution] = {}

        def ev(T: Tournament) -> WinDistribution:
            key = (T.n, T.code())
            got = memo.get(key)
            if got is None:
                got = memo[key] = evaluate(rule, T)
            return got

        return ev
    if isinstance(rule, Mapping):
        return lambda T: rule[T.code()]
    if callable(rule):
        return rule
    raise TypeError("rule must be a RuleId, a code->distribution mapping, or a callable")


def _scan_pool(n: int, tournaments: Iterable[Tournament] | None) -> Iterable[Tournament]:
    if tournaments is not None:
        pool = list(tournaments)
        for T in pool:
            if T.n != n:
                raise ValueError(f"tournament of size {T.n} in a size-{n} scan")
        return pool
    if n <= MAX_SCAN_N:
        return all_tournaments(n)
    if n <= MAX_TARGETED_N:
        return _targeted_pool(n)
    raise BudgetError(f"no built-in scan pool for n={n}; pass tournaments explicitly")


def _targeted_pool(n: int) -> list[Tournament]:
    """Structured instances scanned when full enumeration is out of budget."""
    pool = [superman_kryptonite(n)]
    if n == 7:
        pool.append(prsl_cycle(3))
    if n == 8:
        pool.append(rseb_dstc_gadget())
        pool.append(pad(superman_kryptonite(4), 8))
        pool.append(pad(rkoth_gadget(), 8))
    return pool


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _witness(ev, T: Tournament, i: int, j: int, lam) -> ManipulationWitness:
    before = ev(T)
    after = ev(flip(T, i, j))
    gain_i = after[i] - before[i]
    gain_j = after[j] - before[j]
    joint = gain_i + gain_j
    loss = max(-gain_i, -gain_j)
    return ManipulationWitness(T, i, j, gain_i, gain_j, joint, loss, joint - lam * loss)


# -- fairness ----------------------------------------------------------------


def check_fairness(
    rule: RuleLike,
    n: int,
    property: str,
    tournaments: Iterable[Tournament] | None = None,
) -> PropertyReport:
    """Scan for a violation of CC, TCC, COVER, or DSTC.

    With no explicit tournament list the scan is exhaustive up to
    MAX_SCAN_N and runs on the targeted battery for n in (6, 8].
    """
    prop = property.upper()
    if prop not in FAIRNESS_PROPERTIES:
        raise ValueError(f"unknown fairness property {property!r}")
    ev = _evaluator(rule)
    witness = None
    for T in _scan_pool(n, tournaments):
        witness = _fairness_witness(ev, T, prop)
        if witness is not None:
            break
    return PropertyReport(prop, rule_name(rule), n, witness is None, witness)


def _fairness_witness(ev, T: Tournament, prop: str) -> Witness | None:
    """All violating agents of the first failing tournament (for DSTC, of
    its first failing dominant subset); values align with agents, except
    DSTC carries (full, restricted) probability pairs."""
    dist = ev(T)
    if prop == "CC":
        cw = T.condorcet_winner()
        if cw is not None and dist[cw] != 1:
            return Witness(T, (cw,), (dist[cw],), "Condorcet winner lacks full mass")
        return None
    if prop == "TCC":
        tc = top_cycle(T)
        bad = [i for i in T.agents() if i not in tc and dist[i] != 0]
        if bad:
            return Witness(
                T, tuple(bad), tuple(dist[i] for i in bad), "mass outside the top cycle"
            )
        return None
    if prop == "COVER":
        bad = [i for i in sorted(covered_agents(T)) if dist[i] != 0]
        if bad:
            return Witness(
                T, tuple(bad), tuple(dist[i] for i in bad), "covered agent wins"
            )
        return None
    # DSTC: winners inside a dominant subset keep their exact probabilities
    # when the rule runs on the induced subtournament
    for S in dominant_subsets(T):
        members = sorted(S)
        sub_dist = ev(restrict(T, members))
        bad = [
            (agent, dist[agent], sub_dist[pos])
            for pos, agent in enumerate(members, start=1)
            if dist[agent] != sub_dist[pos]
        ]
        if bad:
            values = []
            for _, full_p, sub_p in bad:
                values.extend((full_p, sub_p))
            return Witness(
                T,
                tuple(a for a, _, _ in bad),
                tuple(values),
                f"dominant subset {{{','.join(map(str, members))}}}",
            )
    return None


# -- monotonicity ------------------------------------------------------------


def check_monotone(
    rule: RuleLike,
    n: int,
    tournaments: Iterable[Tournament] | None = None,
) -> PropertyReport:
    """Throwing a match must never raise the thrower's win probability."""
    ev = _evaluator(rule)
    witness = None
    for T in _scan_pool(n, tournaments):
        before = ev(T)
        for i, j in _pairs(n):
            winner, loser = (i, j) if T.beats(i, j) else (j, i)
            after = ev(flip(T, i, j))
            if before[winner] < after[winner]:
                witness = Witness(
                    T,
                    (winner, loser),
                    (before[winner], after[winner]),
                    "thrown match raised the thrower's probability",
                )
                break
        if witness is not None:
            break
    return PropertyReport("MONOTONE", rule_name(rule), n, witness is None, witness)


# -- pairwise manipulation ---------------------------------------------------


def manipulation_value(
    rule: RuleLike, T: Tournament, i: int, j: int, lam
) -> ManipulationWitness:
    """Exact gain/loss bookkeeping for agents i and j flipping their match."""
    if i == j:
        raise ValueError("agents must differ")
    lam = rat(lam)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    return _witness(_evaluator(rule), T, i, j, lam)


def worst_alpha(
    rule: RuleLike,
    n: int,
    lam,
    reduced: bool = False,
) -> tuple[object, ManipulationWitness | None]:
    """Worst-case manipulation slack over all size-n tournaments and pairs.

    The returned alpha is floored at zero; the witness is the maximal-value
    deviation regardless of sign. Scanning every labeled tournament covers
    both orientations of each adjacent pair, since flipping is an
    involution on the full enumeration. With reduced=True only canonical
    representatives are scanned, which reaches the same maximum because
    every deviation value is invariant under relabeling.
    """
    lam = rat(lam)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if n > MAX_SCAN_N:
        raise BudgetError(f"worst_alpha scan limited to n <= {MAX_SCAN_N}")
    if reduced:
        pool: Iterable[Tournament] = (c.representative for c in canonical_classes(n))
    else:
        pool = all_tournaments(n)
    ev = _evaluator(rule)
    best: ManipulationWitness | None = None
    for T in pool:
        for i, j in _pairs(n):
            w = _witness(ev, T, i, j, lam)
            if best is None or w.value > best.value:
                best = w
    alpha = max(ZERO, best.value) if best is not None else ZERO
    return alpha, best


def alpha_report(rule: RuleLike, n: int, lam, reduced: bool = False) -> PropertyReport:
    lam = rat(lam)
    alpha, witness = worst_alpha(rule, n, lam, reduced=reduced)
    prop = "SNM" if lam == 0 else "NM_LAMBDA"
    return PropertyReport(
        prop, rule_name(rule), n, alpha == 0, witness, lam=lam, alpha=alpha
    )


def min_lambda(rule: RuleLike, n: int, return_witness: bool = False):
    """Least lambda at which no deviation has positive value.

    INFINITE when some flip gains jointly while neither agent loses;
    otherwise the maximum of joint_gain / max_loss over jointly profitable
    flips, or zero when there are none.
    """
    if n > MAX_SCAN_N:
        raise BudgetError(f"min_lambda scan limited to n <= {MAX_SCAN_N}")
    ev = _evaluator(rule)
    best_ratio = None
    best_witness: ManipulationWitness | None = None
    for T in all_tournaments(n):
        for i, j in _pairs(n):
            w = _witness(ev, T, i, j, ZERO)
            if w.joint_gain > 0:
                if w.max_loss <= 0:
                    return (INFINITE, w) if return_witness else INFINITE
                ratio = w.joint_gain / w.max_loss
                if best_ratio is None or ratio > best_ratio:
                    best_ratio, best_witness = ratio, w
    result = best_ratio if best_ratio is not None else ZERO
    return (result, best_witness) if return_witness else result


# -- Pareto non-manipulability ----------------------------------------------


def check_pnm(
    rule: RuleLike,
    n: int,
    tournaments: Iterable[Tournament] | None = None,
) -> PropertyReport:
    """No pairwise flip may strictly help one agent without hurting the other."""
    ev = _evaluator(rule)
    witness = None
    for T in _scan_pool(n, tournaments):
        for i, j in _pairs(n):
            w = _witness(ev, T, i, j, ZERO)
            if (w.gain_i > 0 and w.gain_j >= 0) or (w.gain_j > 0 and w.gain_i >= 0):
                witness = w
                break
        if witness is not None:
            break
    return PropertyReport("PNM", rule_name(rule), n, witness is None, witness)


def check_nm_infinity(
    rule: RuleLike,
    n: int,
    tournaments: Iterable[Tournament] | None = None,
) -> PropertyReport:
    """Limit form: a jointly profitable flip must cost somebody something."""
    ev = _evaluator(rule)
    witness = None
    for T in _scan_pool(n, tournaments):
        for i, j in _pairs(n):
            w = _witness(ev, T, i, j, ZERO)
            if w.joint_gain > 0 and w.max_loss <= 0:
                witness = w
                break
        if witness is not None:
            break
    return PropertyReport("NM_INF", rule_name(rule), n, witness is None, witness)


# -- padding invariance ------------------------------------------------------


def dstc_gain_invariance(rule: RuleLike, T: Tournament, k: int, lam) -> bool:
    """True when every pairwise deviation inside T has identical per-agent
    gains after padding T to size k with agents everyone in T defeats.

    Callers are expected to have verified the rule's DSTC at both sizes;
    for rules without it the equality can genuinely fail.
    """
    if k < T.n:
        raise ValueError("padding size must be at least the tournament size")
    lam = rat(lam)
    ev = _evaluator(rule)
    padded = pad(T, k) if k > T.n else T
    for i, j in _pairs(T.n):
        small = _witness(ev, T, i, j, lam)
        large = _witness(ev, padded, i, j, lam)
        if (small.gain_i, small.gain_j) != (large.gain_i, large.gain_j):
            return False
    return True


# -- one-sided bound ---------------------------------------------------------


def check_one_sided_nm(
    rule: RuleLike,
    n: int,
    lam,
    tournaments: Iterable[Tournament] | None = None,
) -> PropertyReport:
    """A loser who flips a match may gain at most (lambda+1) times what the
    former winner gives up.

    When the scan holds and the rule is also monotone, the combination is
    rechecked against the direct worst-case scan: together they must imply
    no deviation has positive value at this lambda.
    """
    lam = rat(lam)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    ev = _evaluator(rule)
    witness = None
    pool = list(_scan_pool(n, tournaments))
    for T in pool:
        before = ev(T)
        for i, j in _pairs(n):
            winner, loser = (i, j) if T.beats(i, j) else (j, i)
            after = ev(flip(T, i, j))
            gain = after[loser] - before[loser]
            drop = before[winner] - after[winner]
            if gain > (lam + 1) * drop:
                witness = Witness(
                    T,
                    (loser, winner),
                    (gain, drop),
                    "loser's gain exceeds (lambda+1) times winner's drop",
                )
                break
        if witness is not None:
            break
    report = PropertyReport(
        "ONE_SIDED", rule_name(rule), n, witness is None, witness, lam=lam
    )
    if report.holds and tournaments is None and n <= MAX_SCAN_N:
        if check_monotone(rule, n).holds:
            alpha, bad = worst_alpha(rule, n, lam)
            if alpha != 0:
                raise RuntimeError(
                    "monotone rule passed the one-sided scan yet a deviation "
                    f"has positive value: {bad}"
                )
    return report
