"""Exact simplex: feasibility, certificates, optimization, degeneracy."""

import random

import pytest

from tourneyrules._rational import rat
from tourneyrules.simplex import (
    Row,
    optimize,
    solve_feasibility,
    verify_certificate,
    verify_point,
)


def test_simple_feasible_system():
    rows = [
        Row({0: rat(1), 1: rat(1)}, "eq", rat(1)),
        Row({0: rat(1)}, "le", rat(3, 4)),
    ]
    res = solve_feasibility(2, rows)
    assert res.status == "feasible"
    assert verify_point(rows, res.point)


def test_simple_infeasible_system_has_certificate():
    rows = [
        Row({0: rat(1), 1: rat(1)}, "eq", rat(1)),
        Row({0: rat(1)}, "le", rat(1, 4)),
        Row({1: rat(1)}, "le", rat(1, 4)),
    ]
    res = solve_feasibility(2, rows)
    assert res.status == "infeasible"
    assert verify_certificate(2, rows, res.certificate)


def test_negative_rhs_handled():
    # x0 - x1 = -2 with x1 <= 1 forces x0 <= -1 < 0: infeasible over x >= 0
    rows = [
        Row({0: rat(1), 1: rat(-1)}, "eq", rat(-2)),
        Row({1: rat(1)}, "le", rat(1)),
    ]
    res = solve_feasibility(2, rows)
    assert res.status == "infeasible"
    assert verify_certificate(2, rows, res.certificate)


def test_constant_conflict_row():
    res = solve_feasibility(1, [Row({}, "le", rat(-1))])
    assert res.status == "infeasible"


def test_optimize_brackets():
    rows = [
        Row({0: rat(1), 1: rat(1), 2: rat(1)}, "eq", rat(1)),
        Row({0: rat(1), 1: rat(-1)}, "le", rat(0)),
    ]
    hi = optimize(3, rows, {0: rat(1)}, maximize=True)
    lo = optimize(3, rows, {0: rat(1)}, maximize=False)
    assert lo.status == hi.status == "optimal"
    assert lo.value == 0
    assert hi.value == rat(1, 2)


def test_optimize_unbounded():
    res = optimize(2, [Row({0: rat(1), 1: rat(-1)}, "le", rat(1))], {0: rat(1)})
    assert res.status == "unbounded"


def test_optimize_infeasible():
    rows = [
        Row({0: rat(1)}, "eq", rat(2)),
        Row({0: rat(1)}, "le", rat(1)),
    ]
    res = optimize(1, rows, {0: rat(1)})
    assert res.status == "infeasible"
    assert verify_certificate(1, rows, res.certificate)


def test_degenerate_cycling_instance_terminates():
    # Beale's classic example stalls Dantzig pricing without a guard
    rows = [
        Row({0: rat(1, 4), 1: rat(-60), 2: rat(-1, 25), 3: rat(9)}, "le", rat(0)),
        Row({0: rat(1, 2), 1: rat(-90), 2: rat(-1, 50), 3: rat(3)}, "le", rat(0)),
        Row({2: rat(1)}, "le", rat(1)),
    ]
    objective = {0: rat(-3, 4), 1: rat(150), 2: rat(-1, 50), 3: rat(6)}
    res = optimize(4, rows, objective, maximize=False)
    assert res.status == "optimal"
    assert res.value == rat(-1, 20)


def test_randomized_systems_self_verify():
    rng = random.Random(12345)
    feasible = infeasible = 0
    for _ in range(120):
        num_vars = rng.randint(2, 5)
        rows = []
        for _ in range(rng.randint(2, 7)):
            coeffs = {
                j: rat(rng.randint(-4, 4))
                for j in range(num_vars)
                if rng.random() < 0.7
            }
            sense = "eq" if rng.random() < 0.4 else "le"
            rows.append(Row(coeffs, sense, rat(rng.randint(-3, 3))))
        res = solve_feasibility(num_vars, rows)
        if res.status == "feasible":
            feasible += 1
            assert verify_point(rows, res.point)
        else:
            infeasible += 1
            assert verify_certificate(num_vars, rows, res.certificate)
    assert feasible and infeasible  # both branches exercised


def test_budget_reported():
    rows = [Row({j: rat(1) for j in range(40)}, "le", rat(1)) for _ in range(40)]
    res = solve_feasibility(40, rows, budget_seconds=1e-9)
    assert res.status == "budget"
