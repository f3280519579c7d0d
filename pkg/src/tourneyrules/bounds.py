"""Closed-form values for the worst-case constructions.

Every function here evaluates a printed formula with exact big-integer
arithmetic and nothing else: no simulation, no recursion into the rule
evaluators. The test suite cross-checks these oracles against the exact
evaluators on the corresponding constructed tournaments, so the two
implementations vouch for each other.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import comb
from typing import Mapping

from ._rational import ZERO, format_rational, rat
from .rules import RuleId, evaluate
from .tournament import prsl_cycle, superman_kryptonite

SUPERMAN = "superman_kryptonite"
PRSL_CYCLE = "prsl_cycle"


@dataclass(frozen=True)
class ClosedForm:
    rule: RuleId
    family: str
    n: int
    quantities: Mapping[str, object]

    def __post_init__(self) -> None:
        for name, q in self.quantities.items():
            if name.startswith("r_") and not 0 <= q <= 1:
                raise ValueError(f"{name} = {q} is not a probability")
            if name == "lambda_bound" and q < 0:
                raise ValueError("lambda bound must be nonnegative")


def closed_form(rule: RuleId, family: str, n: int, alpha=ZERO) -> ClosedForm:
    """Printed win probabilities and the implied manipulation bound for the
    construction, evaluated at slack alpha."""
    alpha = rat(alpha)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if family == SUPERMAN:
        return ClosedForm(rule, family, n, _superman_quantities(rule, n, alpha))
    if family == PRSL_CYCLE:
        if rule is not RuleId.PRSL:
            raise ValueError("the cyclic construction is specific to PRSL")
        return ClosedForm(rule, family, n, _prsl_cycle_quantities(n, alpha))
    raise ValueError(f"no closed form for family {family!r}")


def _superman_quantities(rule: RuleId, n: int, alpha) -> dict[str, object]:
    """Agent 1 beats everyone but n; agent n beats only 1. The quantities
    are r for those two agents plus the lambda (or alpha) bound implied by
    their joint deviation to make agent 1 undefeated."""
    if n < 3:
        raise ValueError("the construction needs at least 3 agents")
    pairs = n * (n - 1)
    if rule is RuleId.ICR:
        return {
            "r_superman": rat(1, 2) - rat(1, pairs),
            "r_kryptonite": rat(2, pairs),
            "lambda_bound": (rat(1, 4) - alpha / 2) * pairs - rat(1, 2),
        }
    if rule is RuleId.RVC:
        return {
            "r_superman": rat(1, 2) - rat(1, pairs),
            "r_kryptonite": rat(1, n),
            "lambda_bound": (rat(1, 2) - alpha) * n - rat(n - 2, n - 1),
        }
    if rule is RuleId.RDM:
        return {
            "r_superman": 1 - rat(2, n),
            "r_kryptonite": rat(2, pairs),
            "lambda_bound": (1 - rat(n, 2) * alpha) * (n - 1) - 1,
        }
    if rule is RuleId.TCR:
        return {
            "r_superman": rat(1, n),
            "r_kryptonite": rat(1, n),
            "lambda_bound": (1 - alpha) * n - 2,
        }
    if rule is RuleId.RSEB:
        if n < 4 or n & (n - 1):
            raise ValueError("the bracket form needs n a power of two, n >= 4")
        # no-dummy bracket: the kryptonite never wins, so the deviation
        # costs nothing and only the slack alpha is bounded
        return {
            "r_superman": 1 - rat(1, n - 1),
            "r_kryptonite": ZERO,
            "alpha_bound": rat(1, n - 1),
        }
    raise ValueError(f"no printed superman-kryptonite formula for {rule.value}")


def _prsl_cycle_quantities(n: int, alpha) -> dict[str, object]:
    """Cyclic blocker construction: n-2 cycle members, one near-dominator,
    one spoiler who only beats the dominator."""
    if n < 5 or n % 2 == 0:
        raise ValueError("the cyclic construction needs odd n >= 5")
    dominator_share = rat(2 * (n - 2), n - 1)
    cycle_share = rat((n - 2) * (n + 1), 2 * (n - 1))
    total = dominator_share + cycle_share + 1
    return {
        "r_cycle": cycle_share / (n - 2) / total,
        "r_dominator": dominator_share / total,
        "r_spoiler": 1 / total,
        "lambda_bound": (1 - alpha) * rat((n - 2) * (n + 1), 2 * (n - 1)) - 3 * alpha,
    }


def lambda_alpha_tradeoff(rule: RuleId, n: int, alpha=ZERO):
    """Manipulation bound implied by the rule's worst construction at size n.

    For ICR, RDM, RVC, TCR, and PRSL this is a lower bound on the lambda
    needed for 2-NM_lambda-alpha. RSEB, RKotH, and PR admit deviations with
    no loss at all, so for those the returned value is a floor on alpha
    that holds for every lambda.
    """
    alpha = rat(alpha)
    if rule in (RuleId.ICR, RuleId.RVC, RuleId.RDM, RuleId.TCR):
        return closed_form(rule, SUPERMAN, n, alpha).quantities["lambda_bound"]
    if rule is RuleId.PRSL:
        return closed_form(rule, PRSL_CYCLE, n, alpha).quantities["lambda_bound"]
    if rule is RuleId.RSEB:
        return closed_form(rule, SUPERMAN, n).quantities["alpha_bound"]
    if rule is RuleId.RKOTH:
        if n < 5:
            raise ValueError("the RKotH gadget needs n >= 5")
        return rat(1, 10)
    if rule is RuleId.PR:
        if n < 4:
            raise ValueError("the PR construction needs n >= 4")
        return rat(1, 13)
    raise ValueError(f"no bound formula for {rule.value}")


def rdm_alpha_floor(lam: int):
    """Slack forced on RDM at selfishness lam by the construction with
    2*lam + 1 agents: (lam-1) / (lam*(2*lam+1))."""
    if not isinstance(lam, int) or lam < 1:
        raise ValueError("lam must be an integer >= 1")
    return rat(lam - 1, lam * (2 * lam + 1))


# -- bracket recurrences -----------------------------------------------------


def rseb_kryptonite_prob(h: int, m: int):
    """Win probability of the kryptonite (agent n = 2^h) after padding the
    no-dummy instance to a 2^m bracket, by the halving recurrence.

    In a bracket with no padding she must beat someone other than agent 1
    in round one, which is impossible, hence the base case zero.
    """
    if not 1 <= h <= m:
        raise ValueError("need m >= h >= 1")
    n = 1 << h
    prob = ZERO
    for mm in range(h + 1, m + 1):
        size = 1 << mm
        half = size // 2
        prob = rat(2, comb(size, half)) * (
            comb(size - n, half - 1) + comb(size - n, half - n) * prob
        )
    return prob


def rseb_superman_loss(h: int, m: int):
    """Probability that agent 1 of the 2^h-agent instance fails to win the
    2^m bracket: she loses only by meeting the kryptonite while the
    kryptonite is still alive, summed over rounds."""
    if not 2 <= h <= m:
        raise ValueError("need m >= h >= 2")
    size = 1 << m
    n = 1 << h
    return sum(
        rat(comb(size - n, (1 << k) - 1), comb(size - 1, 1 << k)) for k in range(m)
    )


def series_partial_sum(n: int, ell: int):
    """Partial sum of (1 - 2^-k)^(n-2) * 2^-k for k = 1..ell."""
    if n < 4 or n & (n - 1):
        raise ValueError("n must be a power of two, n >= 4")
    if ell < 1:
        raise ValueError("ell must be positive")
    return sum(rat(2**k - 1, 2**k) ** (n - 2) * rat(1, 2**k) for k in range(1, ell + 1))


def series_least_ell(n: int, limit: int = 10_000) -> tuple[int, object]:
    """Least ell whose partial sum reaches 1/(3n), with the sum itself."""
    target = rat(1, 3 * n)
    total = ZERO
    for k in range(1, limit + 1):
        total += rat(2**k - 1, 2**k) ** (n - 2) * rat(1, 2**k)
        if total >= target:
            return k, total
    raise RuntimeError(f"partial sums did not reach 1/(3n) within {limit} terms")


# -- reproduction report -----------------------------------------------------

BOUNDS_CSV_HEADER = ["rule", "family", "n", "quantity", "oracle", "implementation", "match"]


def oracle_rows(nmax: int = 6) -> list[list[str]]:
    """Oracle-versus-implementation comparison rows for every covered
    construction of size at most nmax (PRSL's odd-size family is included
    one step past nmax when that is the first valid size)."""
    rows: list[list[str]] = []

    def add(rule: RuleId, family: str, n: int, name: str, oracle, impl) -> None:
        rows.append(
            [
                rule.value,
                family,
                str(n),
                name,
                format_rational(oracle),
                format_rational(impl),
                "yes" if oracle == impl else "no",
            ]
        )

    for rule in (RuleId.ICR, RuleId.RVC, RuleId.RDM, RuleId.TCR, RuleId.RSEB):
        sizes = [n for n in range(3, nmax + 1)]
        if rule is RuleId.RSEB:
            sizes = [n for n in (4, 8) if n <= max(nmax, 4)]
        for n in sizes:
            form = closed_form(rule, SUPERMAN, n)
            dist = evaluate(rule, superman_kryptonite(n))
            add(rule, SUPERMAN, n, "r_superman", form.quantities["r_superman"], dist[1])
            add(
                rule,
                SUPERMAN,
                n,
                "r_kryptonite",
                form.quantities["r_kryptonite"],
                dist[n],
            )
            joint = 1 - dist[1] - dist[n]
            if rule is RuleId.RSEB:
                add(rule, SUPERMAN, n, "alpha_bound", form.quantities["alpha_bound"], joint)
            else:
                add(
                    rule,
                    SUPERMAN,
                    n,
                    "lambda_bound",
                    form.quantities["lambda_bound"],
                    joint / dist[n],
                )
    prsl_sizes = [n for n in range(5, nmax + 1, 2)] or [5]
    for n in prsl_sizes:
        form = closed_form(RuleId.PRSL, PRSL_CYCLE, n)
        dist = evaluate(RuleId.PRSL, prsl_cycle((n - 1) // 2))
        add(RuleId.PRSL, PRSL_CYCLE, n, "r_cycle", form.quantities["r_cycle"], dist[1])
        add(
            RuleId.PRSL,
            PRSL_CYCLE,
            n,
            "r_dominator",
            form.quantities["r_dominator"],
            dist[n - 1],
        )
        add(
            RuleId.PRSL,
            PRSL_CYCLE,
            n,
            "r_spoiler",
            form.quantities["r_spoiler"],
            dist[n],
        )
    return rows


def bounds_csv(nmax: int = 6) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BOUNDS_CSV_HEADER)
    writer.writerows(oracle_rows(nmax))
    return buf.getvalue()
