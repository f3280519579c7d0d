"""Round-robin tournaments on labeled agents.

A tournament on agents 1..n orients every pair: exactly one of i beats j or
j beats i. Orientations are stored as n packed bit rows; agents are 1-indexed
throughout the public API. Helper constructions used by the analysis and
bounds layers live here too.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class TournamentFormatError(ValueError):
    """Malformed tournament text; carries the offending pair when known."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class Tournament:
    """Complete orientation of the matches among agents 1..n.

    rows[i-1] has bit (j-1) set iff agent i beats agent j. The diagonal is
    always clear and exactly one of the (i, j)/(j, i) bits is set.
    """

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1 or len(self.rows) != self.n:
            raise ValueError(f"need {self.n} bit rows, got {len(self.rows)}")
        for a in range(self.n):
            if self.rows[a] >> self.n:
                raise ValueError(f"row {a + 1} has bits beyond agent {self.n}")
            if (self.rows[a] >> a) & 1:
                raise ValueError(f"agent {a + 1} listed as beating itself")
        for a in range(self.n):
            for b in range(a + 1, self.n):
                fwd = (self.rows[a] >> b) & 1
                rev = (self.rows[b] >> a) & 1
                if fwd == rev:
                    word = "both" if fwd else "neither"
                    raise TournamentFormatError(
                        f"pair ({a + 1}, {b + 1}) oriented {word} ways", (a + 1, b + 1)
                    )

    # -- basic queries ---------------------------------------------------

    def beats(self, i: int, j: int) -> bool:
        return bool((self.rows[i - 1] >> (j - 1)) & 1)

    def wins_mask(self, i: int) -> int:
        """Bitmask (bit j-1) of agents that i beats."""
        return self.rows[i - 1]

    def score(self, i: int) -> int:
        return self.rows[i - 1].bit_count()

    def agents(self) -> range:
        return range(1, self.n + 1)

    def condorcet_winner(self) -> int | None:
        full = (1 << self.n) - 1
        for a in range(self.n):
            if self.rows[a] == full & ~(1 << a):
                return a + 1
        return None

    # -- encodings -------------------------------------------------------

    def code(self) -> int:
        """Upper-triangle bits read row-major as a binary number."""
        c = 0
        for i, j in pairs(self.n):
            c = (c << 1) | ((self.rows[i - 1] >> (j - 1)) & 1)
        return c

    def compact(self) -> str:
        m = self.n * (self.n - 1) // 2
        return f"{self.n}:{format(self.code(), f'0{m}b')}" if m else f"{self.n}:"

    def matrix_str(self) -> str:
        lines = [str(self.n)]
        for a in range(self.n):
            lines.append("".join("1" if (self.rows[a] >> b) & 1 else "0" for b in range(self.n)))
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return self.compact()


def pairs(n: int) -> list[tuple[int, int]]:
    """Agent pairs (i, j), i < j, in row-major order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def from_beats(n: int, beaten_by: Iterable[tuple[int, int]]) -> Tournament:
    """Build from an explicit list of (winner, loser) covering every pair."""
    rows = [0] * n
    for i, j in beaten_by:
        rows[i - 1] |= 1 << (j - 1)
    return Tournament(n, tuple(rows))


def from_code(n: int, code: int) -> Tournament:
    m = n * (n - 1) // 2
    if not 0 <= code < (1 << m):
        raise ValueError(f"code {code} out of range for n={n}")
    rows = [0] * n
    for t, (i, j) in enumerate(pairs(n)):
        if (code >> (m - 1 - t)) & 1:
            rows[i - 1] |= 1 << (j - 1)
        else:
            rows[j - 1] |= 1 << (i - 1)
    return Tournament(n, tuple(rows))


def all_tournaments(n: int) -> Iterator[Tournament]:
    """Every tournament on 1..n once, in ascending code order."""
    m = n * (n - 1) // 2
    for code in range(1 << m):
        yield from_code(n, code)


def parse_tournament(text: str) -> Tournament:
    """Parse either the matrix format or the compact "n:bits" form."""
    stripped = text.strip()
    if not stripped:
        raise TournamentFormatError("empty tournament text")
    if ":" in stripped.splitlines()[0]:
        return _parse_compact(stripped.splitlines()[0])
    return _parse_matrix(stripped)


def _parse_compact(line: str) -> Tournament:
    head, _, bits = line.partition(":")
    try:
        n = int(head.strip())
    except ValueError:
        raise TournamentFormatError(f"bad agent count {head!r}") from None
    if n < 1:
        raise TournamentFormatError(f"bad agent count {n}")
    bits = bits.strip()
    m = n * (n - 1) // 2
    if len(bits) != m:
        raise TournamentFormatError(f"expected {m} pair bits for n={n}, got {len(bits)}")
    for t, ch in enumerate(bits):
        if ch not in "01":
            raise TournamentFormatError(
                f"pair {pairs(n)[t]} has bit {ch!r}", pairs(n)[t]
            )
    return from_code(n, int(bits, 2) if m else 0)


def _parse_matrix(text: str) -> Tournament:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    try:
        n = int(lines[0])
    except ValueError:
        raise TournamentFormatError(f"bad agent count {lines[0]!r}") from None
    if n < 1:
        raise TournamentFormatError(f"bad agent count {n}")
    if len(lines) != n + 1:
        raise TournamentFormatError(f"expected {n} matrix rows, got {len(lines) - 1}")
    rows = [0] * n
    for a, line in enumerate(lines[1:]):
        if len(line) != n:
            raise TournamentFormatError(f"row {a + 1} has {len(line)} columns, expected {n}")
        for b, ch in enumerate(line):
            if ch not in "01":
                raise TournamentFormatError(f"entry ({a + 1}, {b + 1}) is {ch!r}", (a + 1, b + 1))
            if ch == "1":
                rows[a] |= 1 << b
    for a in range(n):
        if (rows[a] >> a) & 1:
            raise TournamentFormatError(f"diagonal entry ({a + 1}, {a + 1}) set", (a + 1, a + 1))
        for b in range(a + 1, n):
            if ((rows[a] >> b) & 1) == ((rows[b] >> a) & 1):
                word = "both" if (rows[a] >> b) & 1 else "neither"
                raise TournamentFormatError(
                    f"pair ({a + 1}, {b + 1}) oriented {word} ways", (a + 1, b + 1)
                )
    return Tournament(n, tuple(rows))


# -- surgery -------------------------------------------------------------


def flip(T: Tournament, i: int, j: int) -> Tournament:
    """Reverse the single match between i and j."""
    if i == j:
        raise ValueError("flip needs two distinct agents")
    a, b = i - 1, j - 1
    rows = list(T.rows)
    rows[a] ^= 1 << b
    rows[b] ^= 1 << a
    return Tournament(T.n, tuple(rows))


def pad(T: Tournament, k: int) -> Tournament:
    """Extend to k agents: originals beat every added agent; the added
    block is transitive by index (dummies act as byes)."""
    if k < T.n:
        raise ValueError(f"cannot pad {T.n} agents down to {k}")
    rows = list(T.rows)
    added_all = ((1 << k) - 1) ^ ((1 << T.n) - 1)
    for a in range(T.n):
        rows[a] |= added_all
    for a in range(T.n, k):
        rows.append(((1 << k) - 1) ^ ((1 << (a + 1)) - 1))
    return Tournament(k, tuple(rows))


def restrict(T: Tournament, members: Iterable[int]) -> Tournament:
    """Induced sub-tournament; members are relabeled 1..|S| in ascending order."""
    order = sorted(set(members))
    if not order or order[0] < 1 or order[-1] > T.n:
        raise ValueError(f"members {order} out of range for n={T.n}")
    rows = [0] * len(order)
    for a, i in enumerate(order):
        for b, j in enumerate(order):
            if a != b and T.beats(i, j):
                rows[a] |= 1 << b
    return Tournament(len(order), tuple(rows))


def relabel(T: Tournament, perm: Sequence[int]) -> Tournament:
    """Apply the permutation perm (perm[i-1] = new label of agent i)."""
    if sorted(perm) != list(range(1, T.n + 1)):
        raise ValueError(f"not a permutation of 1..{T.n}: {perm}")
    rows = [0] * T.n
    for i in range(1, T.n + 1):
        for j in range(1, T.n + 1):
            if i != j and T.beats(i, j):
                rows[perm[i - 1] - 1] |= 1 << (perm[j - 1] - 1)
    return Tournament(T.n, tuple(rows))


# -- structure -----------------------------------------------------------


def scc_chain(T: Tournament) -> list[frozenset[int]]:
    """Strongly connected components in domination order (first beats all
    later ones). In a tournament the condensation is a total order."""
    chain: list[frozenset[int]] = []
    remaining = set(T.agents())
    while remaining:
        top = _top_cycle_within(T, remaining)
        chain.append(frozenset(top))
        remaining -= top
    return chain


def _top_cycle_within(T: Tournament, members: set[int]) -> set[int]:
    # Copeland winner within the set is always in its top cycle; close off
    # under "beats somebody inside".
    start = max(members, key=lambda i: (len([j for j in members if j != i and T.beats(i, j)]), -i))
    cycle = {start}
    grew = True
    while grew:
        grew = False
        for u in members - cycle:
            if any(T.beats(u, c) for c in cycle):
                cycle.add(u)
                grew = True
    return cycle


def top_cycle(T: Tournament) -> frozenset[int]:
    """Smallest nonempty set whose members beat every outsider."""
    return scc_chain(T)[0]


def covered_agents(T: Tournament) -> frozenset[int]:
    """Agents j for which some i beats j and everything j beats."""
    covered = set()
    for j in T.agents():
        wj = T.wins_mask(j)
        for i in T.agents():
            if i != j and T.beats(i, j) and wj & ~T.wins_mask(i) == 0:
                covered.add(j)
                break
    return frozenset(covered)


def dominant_subsets(T: Tournament) -> list[frozenset[int]]:
    """Proper subsets whose members beat every outsider, ascending by size.

    These are exactly the proper prefixes of the component chain.
    """
    chain = scc_chain(T)
    out: list[frozenset[int]] = []
    acc: set[int] = set()
    for comp in chain[:-1]:
        acc |= comp
        out.append(frozenset(acc))
    return out


def bracket_winner(T: Tournament, leaves: Sequence[int]) -> int:
    """Play a single-elimination bracket with the given leaf order."""
    size = len(leaves)
    if size & (size - 1) or size == 0:
        raise ValueError(f"bracket size {size} is not a power of two")
    if sorted(leaves) != sorted(set(leaves)) or any(not 1 <= v <= T.n for v in leaves):
        raise ValueError("leaves must be distinct agents of T")
    layer = list(leaves)
    while len(layer) > 1:
        layer = [
            layer[k] if T.beats(layer[k], layer[k + 1]) else layer[k + 1]
            for k in range(0, len(layer), 2)
        ]
    return layer[0]


# -- named constructions ----------------------------------------------------


def superman_kryptonite(n: int) -> Tournament:
    """Transitive order 1 > 2 > ... > n except agent n beats agent 1."""
    if n < 3:
        raise ValueError("superman_kryptonite needs n >= 3")
    wins = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    wins.remove((1, n))
    wins.append((n, 1))
    return from_beats(n, wins)


def rkoth_gadget() -> Tournament:
    """Five agents, i beats j for i < j except both 4 and 5 beat 1."""
    wins = [(i, j) for i in range(1, 6) for j in range(i + 1, 6)]
    wins.remove((1, 4))
    wins.remove((1, 5))
    wins += [(4, 1), (5, 1)]
    return from_beats(5, wins)


def prsl_cycle(k: int) -> Tournament:
    """Self-loop PageRank worst case on n = 2k+1 agents.

    Using the construction's 0-based team labels t (agent = t+1): team n-1
    beats team n-2 only; teams 0..n-3 all lose to n-2 and beat n-1; within
    0..n-3 team t beats the next k-1 teams cyclically.
    """
    if k < 2:
        raise ValueError("prsl_cycle needs k >= 2")
    n = 2 * k + 1
    wins = [(n - 1 + 1, n - 2 + 1)]
    for t in range(n - 2):
        wins.append((n - 2 + 1, t + 1))
        wins.append((t + 1, n - 1 + 1))
        for d in range(1, k):
            wins.append((t + 1, (t + d) % (n - 2) + 1))
    return from_beats(n, wins)


def rseb_dstc_gadget() -> Tournament:
    """Eight agents: 1>2>3>4>1 with 1>3 and 2>4; each of 1..4 beats each of
    5..8; the 5..8 block is fixed transitive by index."""
    wins = [(1, 2), (2, 3), (3, 4), (4, 1), (1, 3), (2, 4)]
    wins += [(i, j) for i in range(1, 5) for j in range(5, 9)]
    wins += [(i, j) for i in range(5, 9) for j in range(i + 1, 9)]
    return from_beats(8, wins)


FAMILIES = {
    "superman_kryptonite": (superman_kryptonite, True),
    "rkoth_gadget": (rkoth_gadget, False),
    "prsl_cycle": (prsl_cycle, True),
    "rseb_dstc_gadget": (rseb_dstc_gadget, False),
}


def construct(family: str, parameter: int | None = None) -> Tournament:
    """Build a named family member; parameter required iff the family is sized."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    builder, takes_param = FAMILIES[family]
    if takes_param:
        if parameter is None:
            raise ValueError(f"family {family!r} needs a parameter")
        return builder(parameter)
    if parameter is not None:
        raise ValueError(f"family {family!r} takes no parameter")
    return builder()
