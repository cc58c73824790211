from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from angelesco.errors import BranchError, DomainError, ValidationError
from angelesco.weights import (
    AnalyticFactor,
    ScalingParams,
    WeightParams,
    a_n,
    classify_endpoint,
    continue_weight,
    eval_weight,
)


def test_constant_weight_is_one():
    p = WeightParams(-1)
    assert eval_weight(2, 0.5, p) == 1


def test_power_of_x_on_first_interval():
    p = WeightParams(-1, beta=1)
    assert eval_weight(1, Fraction(-1, 2), p) == mp.mpf("0.5")


def test_square_root_on_second_interval():
    p = WeightParams(-1, beta=Fraction(1, 2))
    assert eval_weight(2, Fraction(1, 4), p) == mp.mpf("0.5")


def test_continuation_restricts_to_real_values():
    p = WeightParams.jacobi_angelesco(-2, Fraction(1, 2), Fraction(1, 3), Fraction(3, 4))
    with mp.workdps(40):
        assert abs(continue_weight(2, mp.mpf("0.5"), p, 40) - eval_weight(2, mp.mpf("0.5"), p, 40)) < mp.mpf(10) ** -35


def test_continuation_of_linear_factor():
    p = WeightParams(-1, alpha=1)
    v = continue_weight(1, mp.mpc(-0.5, 0.1), p)
    assert abs(v - mp.mpc(0.5, 0.1)) < 1e-15
    assert continue_weight(2, mp.mpc(0.5, 0.1), WeightParams(-1)) == 1


def test_continuation_rejects_cut():
    with pytest.raises(BranchError):
        continue_weight(2, 2, WeightParams(-1, gamma=Fraction(1, 2)))


def test_parameter_validation():
    with pytest.raises(ValidationError):
        WeightParams(Fraction(1, 2))
    with pytest.raises(ValidationError):
        WeightParams(-1, alpha=-1)
    with pytest.raises(ValidationError):
        WeightParams(-1, h2=AnalyticFactor.power([(Fraction(1, 2), 1)]))
    with pytest.raises(ValidationError):
        WeightParams(-1, h1=AnalyticFactor.constant(-2))


def test_point_outside_interval():
    with pytest.raises(DomainError):
        eval_weight(1, 0.5, WeightParams(-1))


def test_endpoint_limits():
    p = WeightParams(-1, alpha=Fraction(1, 2), beta=Fraction(-1, 2))
    assert classify_endpoint(1, -1, p) == "zero"
    assert classify_endpoint(1, 0, p) == "infinite"
    assert eval_weight(1, -1, p) == 0
    assert eval_weight(1, 0, p) == mp.inf


def test_scaled_endpoint():
    assert a_n(ScalingParams(0, 100)) == -1
    assert abs(a_n(ScalingParams(1, 8)) + mp.mpf("0.5")) < 1e-15
    with pytest.raises(ValidationError):
        a_n(ScalingParams(1, 2))


def test_json_round_trip():
    p = WeightParams.jacobi_angelesco(Fraction(-3, 2), Fraction(1, 2), 0, Fraction(-1, 4))
    assert WeightParams.from_json(p.to_json()) == p


@settings(max_examples=30, deadline=None)
@given(
    st.fractions(min_value=-3, max_value=Fraction(-1, 10), max_denominator=50),
    st.fractions(min_value=Fraction(-9, 10), max_value=2, max_denominator=20),
    st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100),
)
def test_weight_positive_inside(a, beta, t):
    p = WeightParams.jacobi_angelesco(a, beta, beta, beta)
    assert eval_weight(1, a * t, p) > 0
    assert eval_weight(2, t, p) > 0
