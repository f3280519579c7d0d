"""Seeded Monte Carlo simulation of the randomized tournament procedures.

This is the independent statistical oracle for the exact evaluators, so it
deliberately re-derives every transition from the rule definitions instead
of sharing code with the memoized recursions.

Randomness comes from counter-based Philox streams spawned from a single
SeedSequence, one per trial chunk, so results are reproducible bit-for-bit
for a given (seed, trials) and chunks could be simulated in any order.
Elimination processes are tallied as multinomial walker flows over their
state graphs, which has exactly the same joint distribution as looping over
individual trials but runs in state-space rather than trial time.
"""

from __future__ import annotations

from math import comb

import numpy as np

from ._rational import rat
from .rules import RuleId, WinDistribution
from .tournament import Tournament, pad, top_cycle

_CHUNK = 1 << 18
#: burn-in steps for the stationary-mass chains; the chains have at most
#: MAX_EVAL_N states and uniform jump weights, so this is far past mixing
_CHAIN_STEPS = 1024


def monte_carlo(rule: RuleId, T: Tournament, trials: int, seed: int) -> WinDistribution:
    """Empirical win frequencies from simulating the rule trials times."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    counts = np.zeros(T.n, dtype=np.int64)
    offsets = list(range(0, trials, _CHUNK))
    streams = np.random.SeedSequence(seed).spawn(len(offsets))
    for child, start in zip(streams, offsets):
        rng = np.random.Generator(np.random.Philox(child))
        counts += _SIMULATORS[rule](T, min(_CHUNK, trials - start), rng)
    return WinDistribution(tuple(rat(int(c), trials) for c in counts))


# -- shared helpers ----------------------------------------------------------


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _cw_in(rows: tuple[int, ...], mask: int) -> int | None:
    for a in _bits(mask):
        if rows[a] & mask == mask ^ (1 << a):
            return a
    return None


def _flow(
    T: Tournament,
    trials: int,
    rng: np.random.Generator,
    children_of,
) -> np.ndarray:
    """Push walker counts through an elimination process.

    children_of(mask) returns None when the state is absorbing with a known
    winner packed as (winner,), else a list of (child_mask, weight) with
    weights summing to one. Children always have fewer members, so states
    are processed by descending population.
    """
    n, rows = T.n, T.rows
    winners = np.zeros(n, dtype=np.int64)
    level: dict[int, int] = {(1 << n) - 1: trials}
    pending: dict[int, dict[int, int]] = {n: level}
    for size in range(n, 0, -1):
        for mask in sorted(pending.get(size, {}), reverse=True):
            walkers = pending[size][mask]
            if not walkers:
                continue
            outcome = children_of(mask)
            if isinstance(outcome, int):
                winners[outcome] += walkers
                continue
            kids, weights = zip(*outcome)
            split = rng.multinomial(walkers, np.asarray(weights, dtype=float))
            for child, k in zip(kids, split):
                if k:
                    bucket = pending.setdefault(child.bit_count(), {})
                    bucket[child] = bucket.get(child, 0) + int(k)
    return winners


# -- per-rule simulators -----------------------------------------------------


def _sim_icr(T: Tournament, trials: int, rng) -> np.ndarray:
    rows = T.rows

    def children(mask: int):
        cw = _cw_in(rows, mask)
        if cw is not None:
            return cw
        members = _bits(mask)
        w = 1.0 / len(members)
        return [(mask ^ (1 << a), w) for a in members]

    return _flow(T, trials, rng, children)


def _sim_rdm(T: Tournament, trials: int, rng) -> np.ndarray:
    rows = T.rows

    def children(mask: int):
        members = _bits(mask)
        if len(members) == 1:
            return members[0]
        total = comb(len(members), 2)
        acc: dict[int, int] = {}
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                a, b = members[x], members[y]
                loser = b if (rows[a] >> b) & 1 else a
                child = mask ^ (1 << loser)
                acc[child] = acc.get(child, 0) + 1
        return [(child, cnt / total) for child, cnt in sorted(acc.items())]

    return _flow(T, trials, rng, children)


def _sim_rkoth(T: Tournament, trials: int, rng) -> np.ndarray:
    rows = T.rows

    def children(mask: int):
        cw = _cw_in(rows, mask)
        if cw is not None:
            return cw
        members = _bits(mask)
        w = 1.0 / len(members)
        acc: dict[int, float] = {}
        for a in members:
            child = mask & ~((1 << a) | rows[a])
            acc[child] = acc.get(child, 0.0) + w
        return sorted(acc.items())

    return _flow(T, trials, rng, children)


def _sim_rvc(T: Tournament, trials: int, rng) -> np.ndarray:
    """Random arrival order, standing champion plays each arrival."""
    n, rows = T.n, T.rows
    winners = np.zeros(n, dtype=np.int64)
    if n == 1:
        winners[0] = trials
        return winners
    first_pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    split = rng.multinomial(trials, [1.0 / len(first_pairs)] * len(first_pairs))
    full = (1 << n) - 1
    states: dict[int, dict[tuple[int, int], int]] = {}
    for (a, b), k in zip(first_pairs, split):
        if not k:
            continue
        champ = a if (rows[a] >> b) & 1 else b
        rest = full ^ (1 << a) ^ (1 << b)
        bucket = states.setdefault(rest.bit_count(), {})
        key = (champ, rest)
        bucket[key] = bucket.get(key, 0) + int(k)
    for size in range(n - 2, -1, -1):
        for champ, rest in sorted(states.get(size, {})):
            walkers = states[size][(champ, rest)]
            if not walkers:
                continue
            if rest == 0:
                winners[champ] += walkers
                continue
            arrivals = _bits(rest)
            split = rng.multinomial(walkers, [1.0 / len(arrivals)] * len(arrivals))
            for v, k in zip(arrivals, split):
                if not k:
                    continue
                nxt = champ if (rows[champ] >> v) & 1 else v
                bucket = states.setdefault(size - 1, {})
                key = (nxt, rest ^ (1 << v))
                bucket[key] = bucket.get(key, 0) + int(k)
    return winners


def _sim_tcr(T: Tournament, trials: int, rng) -> np.ndarray:
    winners = np.zeros(T.n, dtype=np.int64)
    members = sorted(top_cycle(T))
    split = rng.multinomial(trials, [1.0 / len(members)] * len(members))
    for i, k in zip(members, split):
        winners[i - 1] = int(k)
    return winners


def _sim_rseb(T: Tournament, trials: int, rng) -> np.ndarray:
    """Uniformly random leaf order of the padded bracket, folded round by
    round with vectorized match lookups."""
    n = T.n
    size = 1
    while size < n:
        size *= 2
    Tp = pad(T, size) if size > n else T
    beats = np.zeros((size, size), dtype=bool)
    for i in range(size):
        for j in range(size):
            if i != j and Tp.beats(i + 1, j + 1):
                beats[i, j] = True
    layer = np.tile(np.arange(size, dtype=np.int64), (trials, 1))
    layer = rng.permuted(layer, axis=1)
    while layer.shape[1] > 1:
        a, b = layer[:, 0::2], layer[:, 1::2]
        layer = np.where(beats[a, b], a, b)
    final = np.bincount(layer[:, 0], minlength=size)
    if final[n:].any():
        raise AssertionError("dummy agent won a simulated bracket")
    return final[:n].astype(np.int64)


def _sim_stationary(T: Tournament, trials: int, rng, self_loops: bool) -> np.ndarray:
    """Walk the beat-me chain on the top cycle well past mixing and tally
    final states. Without self loops the lazy version of the chain is used;
    it has the same stationary mass and is aperiodic."""
    winners = np.zeros(T.n, dtype=np.int64)
    members = sorted(top_cycle(T))
    if len(members) == 1:
        winners[members[0] - 1] = trials
        return winners
    succ: list[list[int]] = []
    probs: list[np.ndarray] = []
    for j in members:
        beaters = [k for k in members if k != j and T.beats(k, j)]
        if self_loops:
            options = beaters + [j]
            weight = np.full(len(options), 1.0 / len(options))
        else:
            options = beaters + [j]  # lazy stay half the time
            weight = np.full(len(options), 0.5 / len(beaters))
            weight[-1] = 0.5
        succ.append([members.index(o) for o in options])
        probs.append(weight)
    counts = rng.multinomial(trials, [1.0 / len(members)] * len(members))
    for _ in range(_CHAIN_STEPS):
        nxt = np.zeros(len(members), dtype=np.int64)
        for s, c in enumerate(counts):
            if not c:
                continue
            moved = rng.multinomial(int(c), probs[s])
            for tgt, k in zip(succ[s], moved):
                nxt[tgt] += k
        counts = nxt
    for j, c in zip(members, counts):
        winners[j - 1] = int(c)
    return winners


_SIMULATORS = {
    RuleId.ICR: _sim_icr,
    RuleId.RVC: _sim_rvc,
    RuleId.TCR: _sim_tcr,
    RuleId.RSEB: _sim_rseb,
    RuleId.RKOTH: _sim_rkoth,
    RuleId.RDM: _sim_rdm,
    RuleId.PR: lambda T, trials, rng: _sim_stationary(T, trials, rng, self_loops=False),
    RuleId.PRSL: lambda T, trials, rng: _sim_stationary(T, trials, rng, self_loops=True),
}
