"""Exact winner distributions for the eight randomized tournament rules.

Every evaluator returns exact rationals. Elimination-style rules use
memoized recursion over surviving-agent bitmasks; the single-elimination
rule uses the balanced-partition recurrence over sub-brackets; the
PageRank-style rules solve their stationary linear system by exact
Gaussian elimination on the top cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from itertools import combinations

from ._rational import ONE, ZERO, as_fraction, format_rational, parse_rational, rat
from .canonical import BudgetError
from .tournament import Tournament, pad, restrict, top_cycle

#: subset-recursion evaluators keep state spaces to 2^16
MAX_EVAL_N = 16
#: single-elimination brackets are padded to at most this many slots
MAX_BRACKET = 16


class RuleId(Enum):
    ICR = "ICR"
    RVC = "RVC"
    TCR = "TCR"
    RSEB = "RSEB"
    RKOTH = "RKotH"
    RDM = "RDM"
    PR = "PR"
    PRSL = "PRSL"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "RuleId":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise ValueError(f"unknown rule {text!r}; choose from {[m.value for m in cls]}")


ALL_RULES = tuple(RuleId)


@dataclass(frozen=True)
class WinDistribution:
    """Probability of each agent winning; exact, nonnegative, sums to one."""

    probs: tuple

    def __post_init__(self):
        if any(p < 0 for p in self.probs):
            raise ValueError(f"negative win probability in {self.probs}")
        if sum(self.probs) != 1:
            raise ValueError("win probabilities must sum to 1")

    def __getitem__(self, agent: int):
        return self.probs[agent - 1]

    @property
    def n(self) -> int:
        return len(self.probs)

    def support(self) -> frozenset[int]:
        return frozenset(a for a in range(1, self.n + 1) if self.probs[a - 1] > 0)

    def as_fractions(self) -> tuple[Fraction, ...]:
        return tuple(as_fraction(p) for p in self.probs)


def format_distribution(dist: WinDistribution) -> str:
    """Serialize as "p1/q1 p2/q2 ..." with explicit denominators."""
    return " ".join(f"{int(p.numerator)}/{int(p.denominator)}" for p in dist.probs)


def parse_distribution(text: str, n: int) -> WinDistribution:
    parts = text.split()
    if len(parts) != n:
        raise ValueError(f"expected {n} probabilities, got {len(parts)}")
    return WinDistribution(tuple(parse_rational(p) for p in parts))


def evaluate(rule: RuleId, T: Tournament) -> WinDistribution:
    """Exact winner distribution of the rule on T."""
    if T.n > MAX_EVAL_N:
        raise BudgetError(f"evaluate supports n <= {MAX_EVAL_N}, got {T.n}")
    probs = _EVALUATORS[rule](T)
    return WinDistribution(tuple(probs))


def evaluate_all(rule: RuleId, n: int) -> dict[int, WinDistribution]:
    """Winner distribution for every tournament on 1..n, keyed by code."""
    from .tournament import all_tournaments

    if n > 6:
        raise BudgetError(f"full enumeration supports n <= 6, got {n}")
    return {T.code(): evaluate(rule, T) for T in all_tournaments(n)}


# -- elimination-style rules ----------------------------------------------


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _cw_in(rows: tuple[int, ...], mask: int) -> int | None:
    for a in _bits(mask):
        if rows[a] & mask == mask ^ (1 << a):
            return a
    return None


def _icr(T: Tournament) -> list:
    """Eliminate a uniformly random agent until someone is undefeated."""
    n, rows = T.n, T.rows
    memo: dict[int, list] = {}

    def rec(mask: int) -> list:
        got = memo.get(mask)
        if got is not None:
            return got
        out = [ZERO] * n
        cw = _cw_in(rows, mask)
        if cw is not None:
            out[cw] = ONE
        else:
            share = rat(1, mask.bit_count())
            for a in _bits(mask):
                sub = rec(mask ^ (1 << a))
                for b in _bits(mask ^ (1 << a)):
                    if sub[b]:
                        out[b] += share * sub[b]
        memo[mask] = out
        return out

    return rec((1 << n) - 1)


def _rdm(T: Tournament) -> list:
    """Uniformly random pair plays, loser leaves, last survivor wins."""
    n, rows = T.n, T.rows
    memo: dict[int, list] = {}

    def rec(mask: int) -> list:
        got = memo.get(mask)
        if got is not None:
            return got
        size = mask.bit_count()
        out = [ZERO] * n
        if size == 1:
            out[mask.bit_length() - 1] = ONE
        else:
            share = rat(1, comb(size, 2))
            members = list(_bits(mask))
            for x in range(len(members)):
                for y in range(x + 1, len(members)):
                    a, b = members[x], members[y]
                    loser = b if (rows[a] >> b) & 1 else a
                    sub = rec(mask ^ (1 << loser))
                    for c in _bits(mask ^ (1 << loser)):
                        if sub[c]:
                            out[c] += share * sub[c]
        memo[mask] = out
        return out

    return rec((1 << n) - 1)


def _rkoth(T: Tournament) -> list:
    """A uniformly random agent and everyone she dominates leave, until
    some survivor is undefeated."""
    n, rows = T.n, T.rows
    memo: dict[int, list] = {}

    def rec(mask: int) -> list:
        got = memo.get(mask)
        if got is not None:
            return got
        out = [ZERO] * n
        cw = _cw_in(rows, mask)
        if cw is not None:
            out[cw] = ONE
        else:
            share = rat(1, mask.bit_count())
            for a in _bits(mask):
                child = mask & ~((1 << a) | rows[a])
                sub = rec(child)  # nonempty: a is not undefeated here
                for b in _bits(child):
                    if sub[b]:
                        out[b] += share * sub[b]
        memo[mask] = out
        return out

    return rec((1 << n) - 1)


def _rvc(T: Tournament) -> list:
    """Uniformly random arrival order; the standing champion plays each
    arrival in turn (a caterpillar bracket)."""
    n, rows = T.n, T.rows
    memo: dict[tuple[int, int], list] = {}

    def champ_rec(champ: int, rest: int) -> list:
        if rest == 0:
            out = [ZERO] * n
            out[champ] = ONE
            return out
        got = memo.get((champ, rest))
        if got is not None:
            return got
        out = [ZERO] * n
        share = rat(1, rest.bit_count())
        for v in _bits(rest):
            winner = champ if (rows[champ] >> v) & 1 else v
            sub = champ_rec(winner, rest ^ (1 << v))
            for b in range(n):
                if sub[b]:
                    out[b] += share * sub[b]
        memo[(champ, rest)] = out
        return out

    full = (1 << n) - 1
    out = [ZERO] * n
    if n == 1:
        out[0] = ONE
        return out
    share = rat(2, n * (n - 1))
    for a in range(n):
        for b in range(a + 1, n):
            winner = a if (rows[a] >> b) & 1 else b
            sub = champ_rec(winner, full ^ (1 << a) ^ (1 << b))
            for c in range(n):
                if sub[c]:
                    out[c] += share * sub[c]
    return out


def _tcr(T: Tournament) -> list:
    """Uniform over the top cycle."""
    tc = top_cycle(T)
    share = rat(1, len(tc))
    return [share if a in tc else ZERO for a in T.agents()]


# -- single elimination -----------------------------------------------------


def _rseb(T: Tournament) -> list:
    """Uniformly random seeding of a single-elimination bracket, padded
    with dummies that lose to every real agent."""
    n = T.n
    size = 1
    while size < n:
        size *= 2
    if size > MAX_BRACKET:
        raise BudgetError(f"bracket size {size} exceeds the {MAX_BRACKET}-slot budget")
    Tp = pad(T, size) if size > n else T
    dist = _bracket_dist(Tp.rows, (1 << size) - 1, {})
    probs = [dist.get(a, ZERO) for a in range(n)]
    if sum(probs) != 1:  # dummies can never beat a real agent
        raise AssertionError("dummy agent won with positive probability")
    return probs


def _bracket_dist(rows: tuple[int, ...], mask: int, memo: dict) -> dict:
    """Winner distribution of a uniformly seeded bracket on the agents in
    mask (a power-of-two count), as a sparse {agent_bit: prob} map.

    Conditioned on which half of the draw each agent lands in, the two
    halves run independent uniform sub-brackets, so averaging over balanced
    partitions with weight 2/C(s, s/2) is exact.
    """
    got = memo.get(mask)
    if got is not None:
        return got
    size = mask.bit_count()
    if size == 1:
        out = {mask.bit_length() - 1: ONE}
        memo[mask] = out
        return out
    members = list(_bits(mask))
    first, rest = members[0], members[1:]
    weight = rat(2, comb(size, size // 2))
    acc: dict[int, object] = {}
    for picks in combinations(rest, size // 2 - 1):
        amask = 1 << first
        for p in picks:
            amask |= 1 << p
        bmask = mask ^ amask
        da = _bracket_dist(rows, amask, memo)
        db = _bracket_dist(rows, bmask, memo)
        for side, other in ((da, db), (db, da)):
            for a, pa in side.items():
                beatable = rows[a]
                total = ZERO
                for b, pb in other.items():
                    if (beatable >> b) & 1:
                        total += pb
                if total:
                    acc[a] = acc.get(a, ZERO) + pa * total
    out = {a: weight * v for a, v in acc.items() if v}
    memo[mask] = out
    return out


# -- stationary mass rules ---------------------------------------------------


class StationarySystemError(ValueError):
    """The requested stationary system has no unique solution."""


def solve_stationary(T: Tournament, members: frozenset[int] | set[int], self_loops: bool) -> dict:
    """Stationary mass of the beat-me random walk on T restricted to members.

    From agent j the walk moves to a uniformly random agent among those in
    the set that beat j, plus j herself when self_loops is set. Requires the
    restriction to be strongly connected (unique stationary distribution).
    """
    S = sorted(members)
    if any(not 1 <= i <= T.n for i in S) or not S:
        raise ValueError(f"members {S} out of range for n={T.n}")
    if len(S) == 1:
        return {S[0]: ONE}
    sub = restrict(T, S)
    if top_cycle(sub) != frozenset(sub.agents()):
        raise StationarySystemError(f"restriction to {S} is not strongly connected")
    # denominators: in-set losses, plus the self loop
    d = {}
    for j in S:
        loss = sum(1 for k in S if k != j and T.beats(k, j))
        d[j] = loss + (1 if self_loops else 0)
        if d[j] == 0:
            raise StationarySystemError(f"agent {j} is undefeated inside {S}")
    # stationarity rows for all members but the last (they sum to zero),
    # then normalization
    k = len(S)
    index = {j: c for c, j in enumerate(S)}
    matrix = []
    for i in S[:-1]:
        row = [ZERO] * (k + 1)
        row[index[i]] += ONE
        for j in S:
            if j != i and T.beats(i, j):
                row[index[j]] -= rat(1, d[j])
        if self_loops:
            row[index[i]] -= rat(1, d[i])
        matrix.append(row)
    matrix.append([ONE] * k + [ONE])
    solution = _gauss_solve(matrix, k)
    if solution is None:
        raise StationarySystemError(f"singular stationary system on {S}")
    return {j: solution[index[j]] for j in S}


def _gauss_solve(matrix: list[list], k: int) -> list | None:
    """Exact Gauss-Jordan on a k x (k+1) augmented system; None if singular."""
    rows = len(matrix)
    piv_of_col = [-1] * k
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, rows) if matrix[i][c] != 0), None)
        if piv is None:
            continue
        matrix[r], matrix[piv] = matrix[piv], matrix[r]
        inv = ONE / matrix[r][c]
        matrix[r] = [v * inv for v in matrix[r]]
        for i in range(rows):
            if i != r and matrix[i][c] != 0:
                f = matrix[i][c]
                matrix[i] = [a - f * b for a, b in zip(matrix[i], matrix[r])]
        piv_of_col[c] = r
        r += 1
    if any(p == -1 for p in piv_of_col):
        return None
    if any(all(v == 0 for v in row[:-1]) and row[-1] != 0 for row in matrix):
        return None
    return [matrix[piv_of_col[c]][-1] for c in range(k)]


def _pagerank(T: Tournament, self_loops: bool) -> list:
    tc = top_cycle(T)
    out = [ZERO] * T.n
    if len(tc) == 1:
        out[next(iter(tc)) - 1] = ONE
        return out
    mass = solve_stationary(T, tc, self_loops)
    for j, v in mass.items():
        out[j - 1] = v
    return out


_EVALUATORS = {
    RuleId.ICR: _icr,
    RuleId.RVC: _rvc,
    RuleId.TCR: _tcr,
    RuleId.RSEB: _rseb,
    RuleId.RKOTH: _rkoth,
    RuleId.RDM: _rdm,
    RuleId.PR: lambda T: _pagerank(T, self_loops=False),
    RuleId.PRSL: lambda T: _pagerank(T, self_loops=True),
}
