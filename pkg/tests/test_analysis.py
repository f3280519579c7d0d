"""Fairness and manipulability scans: frozen values, implications, scans."""

import pytest

from tourneyrules import analysis
from tourneyrules._rational import rat
from tourneyrules.analysis import (
    FAIRNESS_PROPERTIES,
    INFINITE,
    check_fairness,
    check_monotone,
    check_nm_infinity,
    check_one_sided_nm,
    check_pnm,
    dstc_gain_invariance,
    manipulation_value,
    min_lambda,
    reports_to_csv,
    worst_alpha,
)
from tourneyrules.rules import ALL_RULES, RuleId, evaluate
from tourneyrules.tournament import (
    all_tournaments,
    covered_agents,
    flip,
    from_code,
    pad,
    rseb_dstc_gadget,
    superman_kryptonite,
    top_cycle,
)

RULES = sorted(ALL_RULES, key=lambda r: r.value)


# -- the infinite sentinel -----------------------------------------------------


def test_infinite_ordering():
    assert INFINITE > rat(10) ** 6
    assert not INFINITE < rat(3)
    assert INFINITE >= INFINITE
    assert repr(INFINITE) == "INFINITE"


# -- manipulation primitives ---------------------------------------------------


def test_manipulation_value_matches_definition():
    T = from_code(4, 13)
    for lam in (rat(0), rat(1), rat(7, 2)):
        for i in range(1, 4):
            for j in range(i + 1, 5):
                w = manipulation_value(RuleId.RDM, T, i, j, lam)
                before = evaluate(RuleId.RDM, T)
                after = evaluate(RuleId.RDM, flip(T, i, j))
                gi = after[i] - before[i]
                gj = after[j] - before[j]
                assert w.gain_i == gi and w.gain_j == gj
                assert w.joint_gain == gi + gj
                assert w.max_loss == max(-gi, -gj)
                assert w.value == w.joint_gain - lam * w.max_loss


def test_witness_identity_validation():
    T = from_code(3, 1)
    with pytest.raises(ValueError):
        analysis.ManipulationWitness(
            T, 1, 2, rat(1, 2), rat(0), rat(1, 3), rat(0), rat(1, 3)
        )


# -- fairness table (exhaustive n <= 4 here; n = 5 in the acceptance run) ------

EXPECTED_FAIRNESS = {
    RuleId.ICR: {"CC": True, "TCC": True, "COVER": False, "DSTC": True},
    RuleId.RVC: {"CC": True, "TCC": True, "COVER": False, "DSTC": True},
    RuleId.TCR: {"CC": True, "TCC": True, "COVER": False, "DSTC": True},
    RuleId.RSEB: {"CC": True, "TCC": True, "COVER": True, "DSTC": True},
    RuleId.RKOTH: {"CC": True, "TCC": True, "COVER": True, "DSTC": True},
    RuleId.RDM: {"CC": True, "TCC": True, "COVER": False, "DSTC": True},
    RuleId.PR: {"CC": True, "TCC": True, "COVER": False, "DSTC": True},
    RuleId.PRSL: {"CC": True, "TCC": True, "COVER": False, "DSTC": True},
}


@pytest.mark.parametrize("rule", RULES)
def test_fairness_verdicts_n4(rule):
    # RSEB's cover and DSTC failures need 5+ real agents, so everything
    # except the known cover failures holds at n = 4
    for prop in FAIRNESS_PROPERTIES:
        report = check_fairness(rule, 4, prop)
        assert report.holds == EXPECTED_FAIRNESS[rule][prop], (rule, prop)


def test_rseb_gadget_breaks_cover_and_dstc():
    gadget = rseb_dstc_gadget()
    cover = check_fairness(RuleId.RSEB, 8, "COVER", tournaments=[gadget])
    assert not cover.holds
    assert 3 in cover.witness.agents
    dstc = check_fairness(RuleId.RSEB, 8, "DSTC", tournaments=[gadget])
    assert not dstc.holds
    assert 4 in dstc.witness.agents


def test_fairness_witness_is_recheckable():
    report = check_fairness(RuleId.ICR, 4, "COVER")
    assert not report.holds
    T = report.witness.T
    dist = evaluate(RuleId.ICR, T)
    covered = covered_agents(T)
    for agent, value in zip(report.witness.agents, report.witness.values):
        assert agent in covered
        assert dist[agent] == value
        assert value > 0


def test_hierarchy_implications_exhaustive_n4():
    # cover consistency forces top-cycle consistency, which forces CC,
    # and sub-tournament consistency forces top-cycle consistency
    for rule in RULES:
        holds = {
            prop: check_fairness(rule, 4, prop).holds for prop in FAIRNESS_PROPERTIES
        }
        if holds["COVER"]:
            assert holds["TCC"]
        if holds["DSTC"]:
            assert holds["TCC"]
        if holds["TCC"]:
            assert holds["CC"]


@pytest.mark.parametrize("rule", RULES)
def test_monotone_n4(rule):
    assert check_monotone(rule, 4).holds


# -- worst-case slack ----------------------------------------------------------


def test_worst_alpha_rseb_3_is_one_third():
    alpha, witness = worst_alpha(RuleId.RSEB, 3, 0)
    assert alpha == rat(1, 3)
    assert witness.value == rat(1, 3)


@pytest.mark.parametrize(
    "rule,expected",
    [
        (RuleId.ICR, rat(1, 3)),
        (RuleId.TCR, rat(1, 3)),
        (RuleId.RSEB, rat(1, 3)),
    ],
)
def test_worst_alpha_n3_lambda0(rule, expected):
    alpha, _ = worst_alpha(rule, 3, 0)
    assert alpha == expected


def test_worst_alpha_nonincreasing_in_lambda():
    for lam_lo, lam_hi in [(rat(0), rat(1)), (rat(1), rat(3))]:
        lo, _ = worst_alpha(RuleId.RDM, 4, lam_hi)
        hi, _ = worst_alpha(RuleId.RDM, 4, lam_lo)
        assert lo <= hi


def test_worst_alpha_reduced_scan_agrees_n4():
    for rule in RULES:
        full, _ = worst_alpha(rule, 4, rat(1, 2))
        reduced, _ = worst_alpha(rule, 4, rat(1, 2), reduced=True)
        assert full == reduced


def test_worst_alpha_floor_at_zero():
    # TCR at huge lambda: every profitable flip also hurts someone badly
    alpha, _ = worst_alpha(RuleId.TCR, 3, rat(100))
    assert alpha == 0


# -- least selfishness levels --------------------------------------------------

MIN_LAMBDA_EXPECTED = [
    (RuleId.ICR, 4, rat(5, 2)),
    (RuleId.RVC, 4, rat(4, 3)),
    (RuleId.RDM, 4, rat(2)),
    (RuleId.TCR, 3, rat(1)),
    (RuleId.TCR, 4, rat(2)),
    (RuleId.PRSL, 5, rat(9, 4)),
]


@pytest.mark.parametrize("rule,n,expected", MIN_LAMBDA_EXPECTED)
def test_min_lambda_values(rule, n, expected):
    assert min_lambda(rule, n) == expected


@pytest.mark.parametrize(
    "rule,n", [(RuleId.RSEB, 4), (RuleId.PR, 4)]
)
def test_min_lambda_infinite(rule, n):
    assert min_lambda(rule, n) is INFINITE


def test_min_lambda_witness_attains_value():
    value, witness = min_lambda(RuleId.TCR, 4, return_witness=True)
    assert value == 2
    assert witness.joint_gain > 0 and witness.max_loss > 0
    assert witness.joint_gain / witness.max_loss == value


def test_min_lambda_resistance_at_and_above():
    value = min_lambda(RuleId.RDM, 4)
    at, _ = worst_alpha(RuleId.RDM, 4, value)
    assert at == 0
    below, _ = worst_alpha(RuleId.RDM, 4, value - rat(1, 100))
    assert below > 0


# -- pairwise non-manipulability ----------------------------------------------

PNM_EXPECTED_N4 = {
    RuleId.ICR: True,
    RuleId.RVC: True,
    RuleId.TCR: True,
    RuleId.RSEB: False,
    RuleId.RKOTH: False,
    RuleId.RDM: True,
    RuleId.PR: False,
    RuleId.PRSL: True,
}


@pytest.mark.parametrize("rule", RULES)
def test_pnm_two_case_equals_limit_form(rule):
    for n in (3, 4):
        two_case = check_pnm(rule, n)
        limit = check_nm_infinity(rule, n)
        assert two_case.holds == limit.holds
    assert check_pnm(rule, 4).holds == PNM_EXPECTED_N4[rule]


def test_pnm_failure_witness_shows_free_gain():
    report = check_pnm(RuleId.RSEB, 4)
    assert not report.holds
    w = report.witness
    assert w.joint_gain > 0 and w.max_loss <= 0


# -- one-sided bound and padding invariance -------------------------------------


def test_one_sided_holds_for_tcr_at_its_level():
    report = check_one_sided_nm(RuleId.TCR, 4, 2)
    assert report.holds


def test_one_sided_fails_below_level():
    report = check_one_sided_nm(RuleId.TCR, 4, rat(3, 2))
    assert not report.holds
    loser, winner = report.witness.agents
    gain, drop = report.witness.values
    assert report.witness.T.beats(winner, loser)
    before = evaluate(RuleId.TCR, report.witness.T)
    after = evaluate(RuleId.TCR, flip(report.witness.T, winner, loser))
    assert after[loser] - before[loser] == gain
    assert before[winner] - after[winner] == drop
    assert gain > (rat(3, 2) + 1) * drop


@pytest.mark.parametrize("rule", [RuleId.RDM, RuleId.TCR])
def test_padding_preserves_manipulation_values(rule):
    # paired-agent gains on a tournament match those on its padded copy
    for code in (7, 29, 44, 61):
        T = from_code(4, code)
        assert dstc_gain_invariance(rule, T, 6, rat(1))


def test_dstc_gain_invariance_fails_for_rseb():
    # padding changes the bracket size, so values genuinely move
    T = from_code(4, 29)
    assert not dstc_gain_invariance(RuleId.RSEB, T, 6, rat(1))


def test_dstc_gain_invariance_validates_size():
    with pytest.raises(ValueError):
        dstc_gain_invariance(RuleId.RDM, from_code(4, 3), 3, rat(1))


# -- report plumbing -----------------------------------------------------------


def test_csv_shape():
    reports = [
        check_fairness(RuleId.ICR, 4, "COVER"),
        analysis.alpha_report(RuleId.RSEB, 3, 0),
    ]
    text = reports_to_csv(reports)
    lines = text.strip().split("\n")
    assert lines[0] == "property,rule,n,lambda,verdict,alpha,witness,pair,gains"
    assert len(lines) == 3
    assert lines[1].startswith("COVER,ICR,4,")
    assert lines[2].startswith("SNM,RSEB,3,0,")


def test_scan_pool_rejects_oversize_exhaustive():
    with pytest.raises(Exception):
        worst_alpha(RuleId.ICR, 9, 0)


def test_targeted_pool_covers_known_instances():
    # the n = 8 targeted pool contains the bracket gadget
    pool = list(analysis._targeted_pool(8))
    codes = {T.code() for T in pool}
    assert rseb_dstc_gadget().code() in codes
