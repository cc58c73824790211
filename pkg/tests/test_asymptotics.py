from fractions import Fraction
from math import comb

import mpmath as mp
import pytest

from angelesco import asymptotics as asy
from angelesco.errors import ValidationError
from angelesco.weights import AnalyticFactor, WeightParams

D = 30
with mp.workdps(D + 10):
    K = mp.log(2) - mp.log(3) / 2


def test_constant_factors_give_zero():
    p = WeightParams(-1, h1=AnalyticFactor.constant(3), h2=AnalyticFactor.constant(5))
    assert asy.cj_constant(1, p) == 0 and asy.cj_constant(2, p) == 0


@pytest.mark.parametrize("alpha,gamma", [(1, 0), (0, 1), (Fraction(1, 2), Fraction(-1, 3))])
def test_jacobi_angelesco_constants(alpha, gamma):
    p = WeightParams.jacobi_angelesco(-1, alpha, 0, gamma)
    with mp.workdps(D):
        c1, c2 = asy.jacobi_angelesco_cj(alpha, gamma)
        assert abs(asy.cj_constant(1, p, D) - c1) < mp.mpf(10) ** -20
        assert abs(asy.cj_constant(2, p, D) - c2) < mp.mpf(10) ** -20


def test_worked_value():
    p = WeightParams.jacobi_angelesco(-1, 0, 0, 1)
    assert abs(asy.cj_constant(1, p) - mp.mpf("0.143841")) < 1e-6


def test_constants_ignore_the_endpoint():
    p = WeightParams.jacobi_angelesco(Fraction(-3, 2), 1, 0, 0)
    with mp.workdps(D):
        assert abs(asy.cj_constant(2, p) - K) < mp.mpf(10) ** -20


def test_log_of_nonpositive_factor_rejected():
    h = AnalyticFactor.analytic(lambda x: x + mp.mpf("0.5"), 0.1)
    with pytest.raises(ValidationError):
        asy.cj_constant(1, WeightParams(-1, h1=h))


def test_Cn_anchor():
    p = WeightParams(-1)
    with mp.workdps(D):
        want = 2 / mp.sqrt(3 * mp.pi) * (mp.mpf(4) / 27) ** 4
        assert abs(asy.Cn_constant(4, 0, p) - want) < mp.mpf(10) ** -33
    assert abs(asy.Cn_constant(4, 0, p) - mp.mpf("3.138e-4")) < 1e-7


def test_Cn_ratio_and_sign():
    p = WeightParams(-1, alpha=Fraction(1, 2), gamma=2)
    with mp.workdps(D):
        for n in (1, 5, 40):
            r = asy.Cn_constant(n + 1, 0, p) / asy.Cn_constant(n, 0, p)
            assert abs(r - mp.sqrt(mp.mpf(n + 1) / n) * 4 / 27) < mp.mpf(10) ** -25
    for tau in (-2, 0, mp.mpf("0.7")):
        assert asy.Cn_constant(7, tau, p) > 0
    with pytest.raises(ValidationError):
        asy.Cn_constant(0, 0, p)


def test_rhs_at_zero():
    p = WeightParams(-1)
    assert abs(asy.mh_rhs(0, 4, 0, p) - mp.mpf("1.9717e-3")) < 1e-7
    assert asy.mh_rhs(0, 5, 0, p) < 0 < asy.mh_rhs(0, 4, 0, p)
    q = WeightParams(-1, beta=Fraction(3, 2))
    with mp.workdps(D):
        want = -asy.Cn_constant(3, 0, q) * 2 * mp.pi / mp.gamma(mp.mpf(5) / 2)
        assert abs(asy.mh_rhs(0, 3, 0, q) - want) < mp.mpf(10) ** -25 * abs(want)


@pytest.mark.parametrize(
    "alpha,beta,gamma,tau", [(0, 0, 0, 0), (1, Fraction(1, 2), Fraction(-1, 2), mp.mpf("0.7")), (2, 0, 1, -1)]
)
def test_stirling_value_matches_rhs(alpha, beta, gamma, tau):
    p = WeightParams.jacobi_angelesco(-1, alpha, beta, gamma)
    for n in (3, 10):
        a = asy.mh_rhs(0, n, tau, p, D)
        b = asy.pnn_zero_asymptotic(n, tau, alpha, beta, gamma, D)
        assert abs(a / b - 1) < 1e-8


def test_stirling_constant():
    with mp.workdps(D):
        for n in (2, 9, 50):
            v = asy.pnn_zero_asymptotic(n, 0, 0, 0, 0) * (-1) ** n
            scaled = v / (mp.sqrt(n) * (mp.mpf(4) / 27) ** n)
            assert abs(scaled - 2 * mp.sqrt(mp.pi / 3)) < mp.mpf(10) ** -25


def test_exact_anchor_ratio():
    # a^n / binom(3n, n) at a = -1 against the leading term
    ns = [16, 64, 256]
    errs = []
    with mp.workdps(D):
        for n in ns:
            exact = mp.mpf((-1) ** n) / comb(3 * n, n)
            errs.append(abs(exact / asy.pnn_zero_asymptotic(n, 0, 0, 0, 0) - 1))
    assert errs[0] > errs[1] > errs[2]
    assert abs(asy.fit_exponent(ns, errs) - 1) < 0.1


def test_fit_exponent():
    ns = [10, 100, 1000]
    assert abs(asy.fit_exponent(ns, [3 * n ** -0.5 for n in ns]) - mp.mpf("0.5")) < 1e-12
    assert asy.fit_exponent([10], [1]) is None


def test_compare_at_zero_tau_zero():
    r = asy.mh_compare(0, 0, [4, 16, 64])
    assert all(isinstance(v, Fraction) for v in r.lhs)
    assert r.errors[0] > r.errors[1] > r.errors[2]
    assert r.exponent > mp.mpf("0.5")
    row = r.rows()[0]
    assert set(row) == {"n", "lhs", "rhs", "ratio", "ratio_minus_1", "abs_error"}


def test_compare_off_axis():
    r = asy.mh_compare(mp.mpc(1, "0.5"), 0, [16, 64])
    assert r.errors[0] > r.errors[1]
    assert r.errors[1] < 0.05


def test_compare_rejects_bad_ladder():
    with pytest.raises(ValidationError):
        asy.mh_compare(0, 0, [8, 4])
    with pytest.raises(ValidationError):
        asy.mh_compare(0, 0, [0, 4])


def test_lagrange_scaling_at_zero_tau():
    r = asy.lagrange_scaling_check(0, [4, 64])
    assert all(abs(d) < mp.mpf(10) ** -20 for d in r.deviations)
    assert all(e == -1 for e in r.endpoints)


def test_lagrange_scaling_decay():
    r = asy.lagrange_scaling_check(mp.mpf("0.7"), [64, 256, 1024])
    assert abs(r.exponent - mp.mpf("0.5")) < 0.1
    assert [abs(d) for d in r.deviations] == sorted((abs(d) for d in r.deviations), reverse=True)
