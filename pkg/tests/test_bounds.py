"""Closed-form oracles against the exact evaluators and frozen constants."""

import pytest

from tourneyrules import bounds
from tourneyrules._rational import rat
from tourneyrules.bounds import (
    closed_form,
    lambda_alpha_tradeoff,
    oracle_rows,
    rdm_alpha_floor,
    rseb_kryptonite_prob,
    rseb_superman_loss,
    series_least_ell,
    series_partial_sum,
)
from tourneyrules.rules import RuleId, evaluate
from tourneyrules.tournament import pad, superman_kryptonite


@pytest.mark.parametrize("rule", [RuleId.ICR, RuleId.RVC, RuleId.RDM, RuleId.TCR])
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_superman_closed_forms_match_evaluator(rule, n):
    got = closed_form(rule, "superman_kryptonite", n)
    dist = evaluate(rule, superman_kryptonite(n))
    assert got.quantities["r_superman"] == dist[1]
    assert got.quantities["r_kryptonite"] == dist[n]


@pytest.mark.parametrize("n", [4, 8])
def test_rseb_superman_closed_form(n):
    got = closed_form(RuleId.RSEB, "superman_kryptonite", n)
    dist = evaluate(RuleId.RSEB, superman_kryptonite(n))
    assert got.quantities["r_superman"] == dist[1] == 1 - rat(1, n - 1)
    assert got.quantities["r_kryptonite"] == dist[n] == 0
    assert got.quantities["alpha_bound"] == rat(1, n - 1)


def test_rseb_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        closed_form(RuleId.RSEB, "superman_kryptonite", 6)


def test_prsl_cycle_closed_form_n5():
    got = closed_form(RuleId.PRSL, "prsl_cycle", 5)
    assert got.quantities["r_cycle"] == rat(3, 19)
    assert got.quantities["r_dominator"] == rat(6, 19)
    assert got.quantities["r_spoiler"] == rat(4, 19)


@pytest.mark.parametrize(
    "rule,n,alpha,expected",
    [
        # lambda below which the construction defeats the rule
        (RuleId.ICR, 4, rat(0), rat(1, 4) * 12 - rat(1, 2)),
        (RuleId.RVC, 4, rat(0), rat(1, 2) * 4 - rat(2, 3)),
        (RuleId.RDM, 4, rat(0), 3 - 1),
        (RuleId.TCR, 4, rat(0), 4 - 2),
        (RuleId.TCR, 5, rat(0), 3),
    ],
)
def test_lambda_bounds_at_alpha_zero(rule, n, alpha, expected):
    got = lambda_alpha_tradeoff(rule, n, alpha)
    assert got == expected


def test_lambda_bound_decreases_with_alpha():
    lo = lambda_alpha_tradeoff(RuleId.TCR, 5, rat(1, 4))
    hi = lambda_alpha_tradeoff(RuleId.TCR, 5, rat(0))
    assert lo < hi


def test_alpha_floors():
    assert lambda_alpha_tradeoff(RuleId.RKOTH, 5, rat(0)) == rat(1, 10)
    assert lambda_alpha_tradeoff(RuleId.PR, 4, rat(0)) == rat(1, 13)
    assert lambda_alpha_tradeoff(RuleId.RSEB, 4, rat(0)) == rat(1, 3)


def test_rdm_alpha_floor_values():
    assert rdm_alpha_floor(1) == 0
    assert rdm_alpha_floor(2) == rat(1, 10)
    assert rdm_alpha_floor(3) == rat(2, 21)
    with pytest.raises(ValueError):
        rdm_alpha_floor(0)


def test_rdm_floor_attained_at_five_agents():
    # the 5-agent construction realizes the lambda = 2 floor exactly
    from tourneyrules.analysis import worst_alpha

    alpha, _ = worst_alpha(RuleId.RDM, 5, 2)
    assert alpha == rdm_alpha_floor(2) == rat(1, 10)


# -- bracket recurrences -------------------------------------------------------


def test_kryptonite_prob_frozen_values():
    assert rseb_kryptonite_prob(2, 3) == rat(4, 35)
    assert rseb_kryptonite_prob(2, 4) == rat(12, 91)
    assert rseb_kryptonite_prob(2, 5) == rat(4, 29)


def test_kryptonite_prob_base_case():
    assert rseb_kryptonite_prob(3, 3) == 0


def test_kryptonite_prob_bounded():
    for m in (3, 4, 5):
        assert rseb_kryptonite_prob(2, m) <= rat(1, 7)


def test_kryptonite_prob_matches_bracket_dp():
    # the recurrence versus the full evaluator on the padded tournament
    T = pad(superman_kryptonite(4), 8)
    dist = evaluate(RuleId.RSEB, T)
    assert dist[4] == rseb_kryptonite_prob(2, 3)


def test_superman_loss_frozen_values():
    assert rseb_superman_loss(2, 2) == rat(1, 3)
    assert rseb_superman_loss(2, 3) == rat(47, 105)


def test_superman_loss_matches_bracket_dp():
    T = pad(superman_kryptonite(4), 8)
    dist = evaluate(RuleId.RSEB, T)
    assert 1 - dist[1] == rseb_superman_loss(2, 3)


def test_series_partial_sums():
    assert series_partial_sum(4, 1) == rat(1, 8)
    assert series_partial_sum(4, 3) == rat(185, 512)


def test_series_least_ell():
    ell, value = series_least_ell(8)
    assert ell == 2
    assert value == rat(857, 16384)
    assert value >= rat(1, 3 * 8)


def test_oracle_rows_all_match():
    rows = oracle_rows(6)
    assert rows, "oracle table must not be empty"
    assert all(row[-1] == "yes" for row in rows)


def test_bounds_csv_header():
    text = bounds.bounds_csv(4)
    assert text.splitlines()[0] == "rule,family,n,quantity,oracle,implementation,match"
