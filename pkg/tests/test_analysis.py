import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrao.analysis import (
    DomainError,
    bounds_report,
    crossover_closed_form,
    crossover_sweep,
    epsilon_under_noise,
    expected_ratio_ising,
    expected_ratio_qrac_lower,
    find_crossover_N1,
    min_shots,
    min_shots_under_noise,
    shot_plan,
    shot_ratio_qrac_vs_ising,
    shots_order,
    sign_error_bound,
    simulate_sign_errors,
    validity_condition,
)
from qrao.errors import ParameterError


def test_min_shots_values():
    assert min_shots(0.05, 0.1) == 150
    assert min_shots(1 / math.e, 0.5) == 2


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 0.99), st.floats(0.01, 0.5))
def test_min_shots_is_smallest(delta, eps):
    s = min_shots(delta, eps)
    assert sign_error_bound(s, eps) <= delta * (1 + 1e-9)
    if s > 1:
        assert sign_error_bound(s - 1, eps) > delta * (1 - 1e-9)


@pytest.mark.parametrize("delta,eps", [(0.0, 0.1), (1.0, 0.1), (0.1, 0.0), (0.1, -1)])
def test_min_shots_domain(delta, eps):
    with pytest.raises(DomainError):
        min_shots(delta, eps)
    assert issubclass(DomainError, ParameterError)


def test_noise_bias_and_shots():
    assert epsilon_under_noise(0.9, 2, -0.5) == pytest.approx(0.81 * 0.25)
    assert epsilon_under_noise(0.0, 3, -0.5) == 0.0
    with pytest.raises(DomainError):
        epsilon_under_noise(0.9, 2, 0.3)
    # 4 ln(1/delta)/(p^2N tr^2) equals ln(1/delta)/(eps^2) with the noisy bias
    eps = epsilon_under_noise(0.95, 4, -0.6)
    assert min_shots_under_noise(0.05, 0.95, 4, -0.6) == pytest.approx(math.log(20) / eps**2)


def test_shots_order_and_ratio():
    assert shots_order(40, 0.1) == pytest.approx(40 * math.log(40) * 100)
    assert shot_ratio_qrac_vs_ising(0.99, 3, 40) == pytest.approx(0.99**90)
    assert shot_ratio_qrac_vs_ising(1.0, 3, 40) == 1.0
    with pytest.raises(DomainError):
        shot_ratio_qrac_vs_ising(0.0, 3, 40)


def test_shot_plan():
    plan = shot_plan(0.9, 10, 0.1)
    assert plan.delta == pytest.approx(math.log(1 / 0.9) / 10)
    assert plan.min_shots == min_shots(plan.delta, 0.1)
    with pytest.raises(DomainError):
        shot_plan(1e-9, 2, 0.1)


def test_expected_ratios():
    assert expected_ratio_ising(0.99, 100, 60, 60) == pytest.approx(0.99**100 + (1 - 0.99**100) / 2)
    assert expected_ratio_qrac_lower(0.99, 33, 60, 60) == pytest.approx(5 / 9 * 0.99**33 + (1 - 0.99**33) / 2)
    assert expected_ratio_ising(1.0, 50, 60, 50) == 1.0
    # fully depolarized: both collapse to the random-cut ratio
    assert expected_ratio_ising(0.5, 2000, 12, 10) == pytest.approx(0.6)
    with pytest.raises(DomainError):
        expected_ratio_ising(0.99, 10, 10, 11)
    with pytest.raises(DomainError):
        expected_ratio_qrac_lower(1.5, 10, 10, 10)


def test_validity_condition_strict():
    assert validity_condition(100, 91)
    assert not validity_condition(100, 90)
    with pytest.raises(DomainError):
        validity_condition(0, 0)


@pytest.mark.parametrize("p", [0.9, 0.95, 0.99, 0.999])
def test_crossover_matches_closed_form(p):
    res = find_crossover_N1(p)
    exact = crossover_closed_form(p)
    assert res.n1_continuous == pytest.approx(exact, rel=1e-8)
    assert res.n1 == math.ceil(exact)
    assert res.diagnostic == "ok"


def test_crossover_sentinels():
    assert find_crossover_N1(1.0).n1 is None
    # cut*/|E| below 9/10 means the QRAC bound never overtakes
    res = find_crossover_N1(0.99, edges=10, opt_cut=8)
    assert res.n1 is None and "no crossover" in res.diagnostic


def test_crossover_general_cut_ratio_is_a_crossing():
    res = find_crossover_N1(0.99, edges=100, opt_cut=95)
    gap = lambda n: expected_ratio_qrac_lower(0.99, n / 3, 100, 95) - expected_ratio_ising(0.99, n, 100, 95)
    assert gap(res.n1) >= 0 > gap(res.n1 - 1)


def test_crossover_sweep_rows():
    rows = crossover_sweep(0.99, 5)
    assert [r[0] for r in rows] == list(range(6))
    assert rows[0][1] == 1.0 and rows[0][2] == pytest.approx(5 / 9)


def test_simulated_sign_errors_within_bound():
    rate = simulate_sign_errors(150, 0.1, 2000, seed=0)
    assert rate <= 0.05
    assert simulate_sign_errors(150, 0.1, 50, seed=1) == simulate_sign_errors(150, 0.1, 50, seed=1)


def test_bounds_report_keys():
    rep = bounds_report(0.99, 100, 40, 60, 60, 3, 0.05, 0.1)
    assert rep["min_shots"] == 150
    assert rep["crossover_N1"] == 328
    assert rep["N3"] == 33
    assert rep["validity_condition"] is True
