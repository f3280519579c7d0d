"""Exact analysis of randomized tournament rules.

Everything is computed in exact rational arithmetic: rule evaluation,
fairness and manipulability scans, closed-form bound oracles, and the
feasibility program searching for rules with prescribed properties. A
seeded Monte Carlo engine provides an independent statistical check.
"""

from ._rational import format_rational, parse_rational, rat
from .analysis import (
    INFINITE,
    ManipulationWitness,
    PropertyReport,
    Witness,
    check_fairness,
    check_monotone,
    check_nm_infinity,
    check_one_sided_nm,
    check_pnm,
    dstc_gain_invariance,
    manipulation_value,
    min_lambda,
    worst_alpha,
)
from .bounds import (
    closed_form,
    lambda_alpha_tradeoff,
    rdm_alpha_floor,
    rseb_kryptonite_prob,
    rseb_superman_loss,
    series_least_ell,
    series_partial_sum,
)
from .canonical import BudgetError, canonical_classes, canonical_form
from .lp import (
    LPInstance,
    RuleTable,
    build_lp,
    parse_rule_table,
    probe_forced_values,
    solve_feasibility,
    verify_rule_table,
)
from .montecarlo import monte_carlo
from .rules import ALL_RULES, RuleId, WinDistribution, evaluate, evaluate_all
from .tournament import Tournament, construct, parse_tournament

__version__ = "0.1.0"

__all__ = [
    "ALL_RULES",
    "BudgetError",
    "INFINITE",
    "LPInstance",
    "ManipulationWitness",
    "PropertyReport",
    "RuleId",
    "RuleTable",
    "Tournament",
    "WinDistribution",
    "Witness",
    "build_lp",
    "canonical_classes",
    "canonical_form",
    "check_fairness",
    "check_monotone",
    "check_nm_infinity",
    "check_one_sided_nm",
    "check_pnm",
    "closed_form",
    "construct",
    "dstc_gain_invariance",
    "evaluate",
    "evaluate_all",
    "format_rational",
    "lambda_alpha_tradeoff",
    "manipulation_value",
    "min_lambda",
    "monte_carlo",
    "parse_rational",
    "parse_rule_table",
    "parse_tournament",
    "probe_forced_values",
    "rat",
    "rdm_alpha_floor",
    "rseb_kryptonite_prob",
    "rseb_superman_loss",
    "series_least_ell",
    "series_partial_sum",
    "solve_feasibility",
    "verify_rule_table",
    "worst_alpha",
]
