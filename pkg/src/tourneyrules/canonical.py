"""Canonical labelings of tournaments under agent renaming.

The canonical form of a tournament is the lexicographically smallest
upper-triangle encoding over all relabelings, found by exhaustive permutation
search with prefix pruning. Exhaustive search is the point: these sizes
(n <= 9) never justify a real graph-canonicalization dependency.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .tournament import Tournament, from_code, pairs

#: exhaustive relabeling search is kept to factorial(9) permutations
MAX_CANONICAL_N = 9


class BudgetError(ValueError):
    """Requested size exceeds the documented enumeration budget."""


@dataclass(frozen=True)
class CanonicalForm:
    """canonical: class representative; relabeling: permutation (1-indexed,
    relabeling[i-1] = image of agent i) with relabel(T, relabeling) ==
    canonical; orbits: automorphism orbits of the canonical tournament."""

    canonical: Tournament
    relabeling: tuple[int, ...]
    orbits: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class CanonicalClass:
    """An isomorphism class: smallest-code representative, its automorphism
    orbits, and the number of labeled tournaments in the class."""

    representative: Tournament
    orbits: tuple[frozenset[int], ...]
    size: int


def canonical_form(T: Tournament) -> CanonicalForm:
    """Minimize the encoding over all relabelings (n <= 9)."""
    n = T.n
    if n > MAX_CANONICAL_N:
        raise BudgetError(f"canonical_form supports n <= {MAX_CANONICAL_N}, got {n}")
    beats = _beats_table(T)
    idx = [(i - 1, j - 1) for i, j in pairs(n)]
    best_bits: list[int] | None = None
    ties: list[tuple[int, ...]] = []
    for q in permutations(range(n)):
        bits = []
        verdict = 0  # -1 better, 0 equal so far, 1 worse
        for t, (a, b) in enumerate(idx):
            bit = beats[q[a] * n + q[b]]
            if best_bits is not None and verdict == 0:
                if bit > best_bits[t]:
                    verdict = 1
                    break
                if bit < best_bits[t]:
                    verdict = -1
            bits.append(bit)
        if verdict == 1:
            continue
        if best_bits is None or verdict == -1:
            best_bits = bits
            ties = [q]
        else:
            ties.append(q)
    assert best_bits is not None
    code = 0
    for bit in best_bits:
        code = (code << 1) | bit
    q0 = ties[0]
    relabeling = _invert(q0)
    return CanonicalForm(from_code(n, code), relabeling, _orbits(n, q0, ties))


def canonical_classes(n: int) -> list[CanonicalClass]:
    """All isomorphism classes on 1..n, ordered by representative code.

    Walks codes in ascending order and expands whole relabeling orbits, so
    each class is visited exactly once at its minimal member.
    """
    if n > MAX_CANONICAL_N:
        raise BudgetError(f"canonical_classes supports n <= {MAX_CANONICAL_N}, got {n}")
    m = n * (n - 1) // 2
    seen = bytearray(1 << m)
    perms = list(permutations(range(n)))
    idx = [(i - 1, j - 1) for i, j in pairs(n)]
    classes: list[CanonicalClass] = []
    for code in range(1 << m):
        if seen[code]:
            continue
        T = from_code(n, code)
        beats = _beats_table(T)
        members: set[int] = set()
        autos: list[tuple[int, ...]] = []
        for q in perms:
            c = 0
            for a, b in idx:
                c = (c << 1) | beats[q[a] * n + q[b]]
            seen[c] = 1
            members.add(c)
            if c == code:
                autos.append(q)
        classes.append(CanonicalClass(T, _orbits(n, autos[0], autos), len(members)))
    return classes


def class_members(representative: Tournament) -> dict[int, tuple[int, ...]]:
    """Map each labeled code in the class to one permutation carrying the
    representative onto it (perm[i-1] = member label of rep agent i)."""
    n = representative.n
    beats = _beats_table(representative)
    idx = [(i - 1, j - 1) for i, j in pairs(n)]
    out: dict[int, tuple[int, ...]] = {}
    for q in permutations(range(n)):
        c = 0
        for a, b in idx:
            c = (c << 1) | beats[q[a] * n + q[b]]
        if c not in out:
            out[c] = _invert(q)
    return out


def _beats_table(T: Tournament) -> list[int]:
    n = T.n
    flat = [0] * (n * n)
    for a in range(n):
        row = T.rows[a]
        for b in range(n):
            flat[a * n + b] = (row >> b) & 1
    return flat


def _invert(q: tuple[int, ...]) -> tuple[int, ...]:
    # q maps result position -> source index (0-based); the public
    # relabeling maps source agent -> result position (1-based).
    inv = [0] * len(q)
    for pos, src in enumerate(q):
        inv[src] = pos + 1
    return tuple(inv)


def _orbits(n: int, q0: tuple[int, ...], ties: list[tuple[int, ...]]) -> tuple[frozenset[int], ...]:
    # Each pair of minimizing permutations composes to an automorphism of
    # the canonical tournament; union positions they identify.
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    inv_q0 = [0] * n
    for pos, src in enumerate(q0):
        inv_q0[src] = pos
    for q in ties:
        for a in range(n):
            ra, rb = find(a), find(inv_q0[q[a]])
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, set[int]] = {}
    for a in range(n):
        groups.setdefault(find(a), set()).add(a + 1)
    return tuple(sorted((frozenset(g) for g in groups.values()), key=min))
