from fractions import Fraction as F

import pytest

from nullstate.pde_check import (StepError, full_report, growth_bound_probe, growth_probe_points,
                                 null_state_residual, random_points, ward_residuals)
from nullstate.solutions import (constant_solution, counterexample_solution, s1_solution, s2_solution,
                                 zero_solution)

PT = (0, 1, 2, 4)


@pytest.mark.parametrize("k", [2, F(8, 3), 4, 6, 7.3])
def test_s1_residual(k):
    h = s1_solution(k, 1.7)
    for pt in ((0, 1), (-2.5, 0.3), (10, 10.2)):
        for j in (1, 2):
            assert null_state_residual(h, pt, j) <= 1e-8


def test_s2_and_counterexample_at_fixed_point():
    for j in range(1, 5):
        assert null_state_residual(s2_solution(6, 1, 0), PT, j) <= 1e-6
        assert null_state_residual(counterexample_solution(4, 2), PT, j) <= 1e-6


def test_ward_examples():
    for c1, c2 in ((1, 0), (0, 1), (0.3, -2.0)):
        assert max(ward_residuals(s2_solution(F(8, 3), c1, c2), PT)) <= 1e-6
    w1, w2, w3 = ward_residuals(counterexample_solution(4, 2), PT)
    assert w1 <= 1e-8 and w2 > 0.1 and w3 > 0.1
    assert max(ward_residuals(constant_solution(2), PT)) <= 1e-12


def test_zero_function_reports_zero():
    assert ward_residuals(zero_solution(2), PT) == (0.0, 0.0, 0.0)
    assert null_state_residual(zero_solution(2), PT, 2) == 0.0


def test_wrong_kappa_is_detected():
    # the kappa = 6 solution checked as if kappa were 4 must fail
    import dataclasses
    h = dataclasses.replace(s2_solution(6, 1, 0), kappa=4)
    assert max(null_state_residual(h, PT, j) for j in range(1, 5)) > 1e-3


def test_step_guard():
    with pytest.raises(StepError):
        null_state_residual(s1_solution(4), (0, 1), 1, h=0.3)
    with pytest.raises(StepError):
        ward_residuals(s1_solution(4), (0, 1), h=0.0)


def test_full_report_order_and_note():
    rep = full_report(s2_solution(F(8, 3), 1, 1), random_points(2, 4, seed=1))
    assert rep.max_null_state <= 1e-5
    assert all(o is not None and o >= 3.5 for o in rep.convergence_order)
    short = full_report(s2_solution(4, 1, 0), random_points(2, 2, seed=1), h_sweep=(1e-2, 1e-3, 1e-4))
    assert short.convergence_order is None and "decades" in short.order_note
    const = full_report(constant_solution(2), random_points(2, 2, seed=1))
    assert const.convergence_order == [None] * 7


def test_counterexample_report():
    rep = full_report(counterexample_solution(F(8, 3), 2), random_points(2, 20, seed=7), order_points=2)
    assert rep.max_null_state <= 1e-5 and rep.ward[0] <= 1e-6
    assert min(p["ward"][1] for p in rep.per_point) >= 0.1
    assert min(p["ward"][2] for p in rep.per_point) >= 0.1


def test_random_points_shape():
    pts = random_points(3, 5, seed=2)
    assert len(pts) == 5 and all(len(p) == 6 for p in pts)
    assert all(0.5 <= b - a <= 2.0 for p in pts for a, b in zip(p, p[1:]))
    assert random_points(3, 5, seed=2) == pts


def test_growth_bound():
    pts = growth_probe_points(1, seed=0)
    assert growth_bound_probe(s1_solution(4), 2, 10, pts)
    assert growth_bound_probe(constant_solution(1), 1, 1, pts)
    assert not growth_bound_probe(s1_solution(4), 0, 1e-3, pts)
    assert growth_bound_probe(s2_solution(6, 1, 1), 2, 10, growth_probe_points(2, seed=1))
