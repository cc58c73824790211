"""Acceptance criteria, one test each; tolerances are pinned below.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import itertools
import random
from fractions import Fraction
from math import comb

import mpmath as mp
import pytest

from angelesco import asymptotics as asy
from angelesco import equilibrium as eq
from angelesco import modelrhp as m
from angelesco._precision import to_mpf
from angelesco.mop import classical_pnn_coeffs, poly_zeros, solve_mop
from angelesco.weights import AnalyticFactor, WeightParams

D = 30

TOL_EXACT_ANCHOR = mp.mpf(10) ** -30
TOL_CROSS = mp.mpf(10) ** -30
TOL_CUBIC = mp.mpf(10) ** -20
EXPANSION_EXPONENT = 4
EXPANSION_SLACK = 0.2
TOL_ZETA_SUM = mp.mpf(10) ** -12
TOL_ZETA_PRODUCT = mp.mpf(10) ** -10
TOL_MASS = mp.mpf(10) ** -10
TOL_VARIATIONAL = mp.mpf(10) ** -10
TOL_LAGRANGE_SYM = mp.mpf(10) ** -6
TOL_MODEL = mp.mpf(10) ** -8
SLOPE_WITH_CORRECTION = -mp.mpf(2) / 3
SLOPE_WITHOUT_CORRECTION = -mp.mpf(1) / 3
SLOPE_SLACK = 0.1
TOL_Q = mp.mpf(10) ** -10
TOL_CJ = mp.mpf(10) ** -8
SQRT_N_FACTOR = 3
FINAL_RATIO_ERROR = 0.05
GUARANTEED_ORDER = mp.mpf(1) / 6
SCALING_EXPONENT = 0.5
SCALING_SLACK = 0.15

BETAS = (mp.mpf("-0.5"), mp.mpf(0), mp.mpf("0.5"), mp.mpf("1.3"))
TAUS = (-1, 0, 1)
MODEL_GRID = list(itertools.product(BETAS, TAUS))


def _rel_coeff_error(got, want):
    """Norm-wise relative error of coefficient vectors."""
    with mp.workdps(60):
        want = [to_mpf(c) for c in want]
        scale = max(abs(c) for c in want)
        return max(abs(to_mpf(g) - w) for g, w in zip(got, want)) / scale


def _slope(xs, ys):
    """Least-squares slope of log|y| against log x."""
    return -asy.fit_exponent(xs, ys)


# ------------------------------------------------------------------ 1


def test_exact_polynomial_anchor(record):
    worst = mp.mpf(0)
    for a in (Fraction(-1), Fraction(-3, 2), Fraction(-1, 2)):
        p = WeightParams(a)
        for n in range(1, 31):
            P = solve_mop((n, n), p, 160)
            want = a**n / comb(3 * n, n)
            if P.exact:
                err = 0 if P.coeffs[0] == want else 1
            else:
                err = abs(to_mpf(P.coeffs[0]) / to_mpf(want) - 1)
            worst = max(worst, err)
    ok = worst <= TOL_EXACT_ANCHOR
    record(1, ok, f"P_nn(0;a) = a^n/binom(3n,n), n=1..30, a in -1,-3/2,-1/2: max rel error {mp.nstr(worst, 3)}")
    assert ok


# ------------------------------------------------------------------ 2 and 3

GRID = (Fraction(-1, 2), Fraction(0), Fraction(1, 2))
CELLS = random.Random(20240).sample(list(itertools.product(GRID, repeat=3)), 8)
ENDPOINTS = (Fraction(-3, 2), Fraction(-1), Fraction(-1, 2))


def test_methods_agree_and_zero_counts(record):
    worst = mp.mpf(0)
    bad_counts = []
    for (alpha, beta, gamma), a in itertools.product(CELLS, ENDPOINTS):
        p = WeightParams.jacobi_angelesco(a, alpha, beta, gamma)
        for n in range(1, 13):
            P = solve_mop((n, n), p, 160)
            ref = classical_pnn_coeffs(n, alpha, beta, gamma, a, 160)
            worst = max(worst, _rel_coeff_error(P.coeffs, ref.coeffs))
            z1, z2 = poly_zeros(P, p, 160)
            lo = to_mpf(a)
            simple = len(set(z1)) == len(z1) and len(set(z2)) == len(z2)
            inside = all(lo < x < 0 for x in z1) and all(0 < x < 1 for x in z2)
            if not (len(z1) == n and len(z2) == n and simple and inside):
                bad_counts.append((alpha, beta, gamma, a, n))
    ok2 = worst <= TOL_CROSS
    ok3 = not bad_counts
    cells = " ".join(f"({al},{be},{ga})" for al, be, ga in CELLS)
    record(2, ok2, f"double sum vs moment system, n<=12, cells {cells}: max rel error {mp.nstr(worst, 3)}")
    record(3, ok3, f"n simple zeros in each open interval for all {len(CELLS) * 3 * 12} cases; failures {bad_counts}")
    assert ok2 and ok3


# ------------------------------------------------------------------ 4


def test_curve_constants(record):
    worst = mp.mpf(0)
    for a in (-3, -2, Fraction(-11, 10), -1, Fraction(-9, 10), Fraction(-3, 5), Fraction(-1, 3)):
        worst = max(worst, *eq.cubic_residuals(eq.curve_constants(a, D)))
    b_ok = eq.curve_constants(-2, D).b == Fraction(-1, 63)
    eps = [Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)]
    rz, rx = [], []
    with mp.workdps(D):
        for e in eps:
            c = eq.curve_constants(-1 + e, D)
            lead = to_mpf(e) ** 3 / 108
            rz.append(c.zstar + lead)
            rx.append(c.x0 - lead)
        sz = _slope(eps, rz)
        sx = _slope(eps, rx)
    floor = EXPANSION_EXPONENT - EXPANSION_SLACK
    ok = worst <= TOL_CUBIC and b_ok and sz >= floor and sx >= floor
    record(
        4,
        ok,
        f"cubic residual {mp.nstr(worst, 3)}, b(-2)=-1/63 {b_ok}, "
        f"remainder exponents z* {mp.nstr(sz, 4)} x0 {mp.nstr(sx, 4)} (need >= {floor})",
    )
    assert ok


# ------------------------------------------------------------------ 5


def test_branch_identities(record):
    rng = random.Random(5)
    worst_sum = worst_prod = mp.mpf(0)
    for a in (-2, -1, Fraction(-3, 5)):
        c = eq.curve_constants(a, D)
        for _ in range(200):
            y = rng.uniform(0.01, 3)
            z = mp.mpc(rng.uniform(-3, 3), y if rng.random() < 0.5 else -y)
            s, prod = eq.branch_identity_residuals(eq.zeta_branches(z, None, D, c), c)
            worst_sum, worst_prod = max(worst_sum, s), max(worst_prod, prod)
    ok = worst_sum <= TOL_ZETA_SUM and worst_prod <= TOL_ZETA_PRODUCT
    record(5, ok, f"200 points x 3 endpoints: sum {mp.nstr(worst_sum, 3)}, product {mp.nstr(worst_prod, 3)}")
    assert ok


# ------------------------------------------------------------------ 6


def test_equilibrium(record):
    half = mp.mpf(1) / 2
    worst_mass = worst_var = mp.mpf(0)
    sign_ok = True
    for a in (-2, -1, Fraction(-3, 5)):
        c = eq.curve_constants(a, D)
        for j in (1, 2):
            worst_mass = max(worst_mass, abs(eq.mass(j, None, D, c) - half))
            # psi_j keeps the sign of a+1 between x0 and 0 and is positive elsewhere
            negative_j = 1 if a < -1 else 2 if a > -1 else None
            for x, s in eq.sign_changes(j, None, 200, D, c):
                between = min(c.x0, 0) < x < max(c.x0, 0)
                want = -1 if (j == negative_j and between) else 1
                sign_ok = sign_ok and s == want
        worst_var = max(worst_var, eq.variational_deviation(eq.potentials_and_constants(None, D, c), 20))
    data = eq.potentials_and_constants(-1, D)
    with mp.workdps(D):
        lag = abs(data.l1 + data.l2 - mp.mpf(3) / 2 * mp.log(mp.mpf(27) / 4))
    ok = worst_mass <= TOL_MASS and sign_ok and worst_var <= TOL_VARIATIONAL and lag <= TOL_LAGRANGE_SYM
    record(
        6,
        ok,
        f"mass error {mp.nstr(worst_mass, 3)}, sign pattern {sign_ok}, "
        f"variational deviation {mp.nstr(worst_var, 3)}, l1+l2 at a=-1 off by {mp.nstr(lag, 3)}",
    )
    assert ok


# ------------------------------------------------------------------ 7


def _ode_points(rng, count):
    pts = []
    while len(pts) < count:
        z = mp.mpc(rng.uniform(-5, 5), rng.uniform(-5, 5))
        if abs(z) > mp.mpf("0.3") and abs(mp.arg(z)) < 3:
            pts.append(z)
    return pts


def test_model_problem(record):
    rng = random.Random(7)
    worst = {"jump": mp.mpf(0), "monodromy": mp.mpf(0), "ode q": mp.mpf(0), "ode Q": mp.mpf(0)}
    for beta, tau in MODEL_GRID:
        for r in (mp.mpf("0.5"), 2, 10):
            for ray in m.RAYS:
                worst["jump"] = max(worst["jump"], m.jump_residual(ray, r, tau, beta, D))
        for x in (mp.mpf("-0.5"), -2):
            worst["monodromy"] = max(worst["monodromy"], m.monodromy_residual(x, tau, beta, D))
        for z in _ode_points(rng, 5):
            for j in (1, 2, 3):
                worst["ode q"] = max(worst["ode q"], m.ode_residual_q(j, z, tau, beta, D))
            worst["ode Q"] = max(worst["ode Q"], m.ode_residual_Q(z, tau, beta, D))
    Rs = (16, 64, 256)
    slopes = []
    for beta, tau in MODEL_GRID:
        if tau == 0:
            continue
        for order, want in ((1, SLOPE_WITH_CORRECTION), (0, SLOPE_WITHOUT_CORRECTION)):
            v = [m.psi_asymptotic_check(mp.mpc(0, R), tau, beta, order) for R in Rs]
            slopes.append((beta, tau, order, _slope(Rs, v), want))
    res_ok = all(v <= TOL_MODEL for v in worst.values())
    slope_ok = all(abs(s - w) <= SLOPE_SLACK for _, _, _, s, w in slopes)
    with_corr = [s for *_, order, s, _ in slopes if order == 1]
    without = [s for *_, order, s, _ in slopes if order == 0]
    record(
        7,
        res_ok and slope_ok,
        "max residuals "
        + ", ".join(f"{k} {mp.nstr(v, 3)}" for k, v in worst.items())
        + f"; slopes with correction [{mp.nstr(min(with_corr), 4)}, {mp.nstr(max(with_corr), 4)}],"
        f" without [{mp.nstr(min(without), 4)}, {mp.nstr(max(without), 4)}]",
    )
    assert res_ok and slope_ok


# ------------------------------------------------------------------ 8


def test_Q_function(record):
    worst0 = mp.mpf(0)
    for beta, tau in MODEL_GRID:
        with mp.workdps(D):
            exact = 2 * mp.pi / mp.gamma(beta + 1)
        worst0 = max(worst0, abs(m.Q_eval(0, tau, beta, digits=D).value - exact) / abs(exact))
    pts = [mp.mpc(5, 0), mp.mpc(-5, 0), mp.mpc(0, 5), mp.mpc(3, 4), mp.mpc(-2.5, 1), mp.mpc(0.5, -0.25), mp.mpc(-1, -4)]
    worst_series = mp.mpf(0)
    for beta in BETAS:
        for z in pts:
            s = m.Q_series_tau0(z, beta, digits=D)
            c = m.Q_eval(z, 0, beta, digits=D).value
            worst_series = max(worst_series, abs(c - s) / abs(s))
    worst_shape = mp.mpf(0)
    alt = m.ContourSpec(shape="rays")
    wide = m.ContourSpec(radius=3, tail=2)
    for beta, tau in MODEL_GRID:
        for z in (mp.mpc(1.5, -0.7), mp.mpc(-2, 1)):
            v = m.Q_eval(z, tau, beta, digits=D).value
            for spec in (alt, wide):
                w = m.Q_eval(z, tau, beta, spec=spec, digits=D).value
                worst_shape = max(worst_shape, abs(v - w) / abs(v))
    ok = worst0 <= TOL_Q and worst_series <= TOL_Q and worst_shape <= TOL_Q
    record(
        8,
        ok,
        f"Q(0) rel error {mp.nstr(worst0, 3)}, contour vs series |z|<=5 {mp.nstr(worst_series, 3)}, "
        f"contour deformation {mp.nstr(worst_shape, 3)}",
    )
    assert ok


# ------------------------------------------------------------------ 9


def test_szego_constants(record):
    worst = mp.mpf(0)
    for alpha, gamma in ((1, 0), (0, 1), (Fraction(1, 2), Fraction(3, 2)), (Fraction(-1, 2), 2)):
        p = WeightParams.jacobi_angelesco(-1, alpha, 0, gamma)
        with mp.workdps(D):
            c1, c2 = asy.jacobi_angelesco_cj(alpha, gamma)
            worst = max(worst, abs(asy.cj_constant(1, p, D) - c1), abs(asy.cj_constant(2, p, D) - c2))
    const = WeightParams(-1, h1=AnalyticFactor.constant(7), h2=AnalyticFactor.constant(Fraction(1, 3)))
    zero = asy.cj_constant(1, const) == 0 and asy.cj_constant(2, const) == 0
    ok = worst <= TOL_CJ and zero
    record(9, ok, f"Jacobi-Angelesco c_j max error {mp.nstr(worst, 3)}, constant factors give exactly 0: {zero}")
    assert ok


# ------------------------------------------------------------------ 10

LADDER_10 = [16, 64, 256, 1024]


def _scaled_errors(tau):
    r = asy.mh_compare(0, tau, LADDER_10, digits=D)
    with mp.workdps(D):
        return [e * mp.sqrt(n) for n, e in zip(r.ns, r.errors)]


def test_mehler_heine_at_zero(record):
    # O(n^(-1/2)): |ratio - 1| sqrt(n) never grows past 3 times its first value
    lines, ok = [], True
    for tau in (0, mp.mpf("0.7")):
        s = _scaled_errors(tau)
        cell = max(s) <= SQRT_N_FACTOR * s[0]
        ok = ok and cell
        lines.append(f"tau={mp.nstr(tau, 2)}: " + " ".join(mp.nstr(v, 3) for v in s))
    record(10, ok, "|ratio-1| sqrt(n) at n=16..1024 bounded by 3x its first value; " + "; ".join(lines))
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="at tau=0 the exact error decays like 1/n, so |ratio-1| sqrt(n) falls by ~8x over the ladder",
)
def test_mehler_heine_at_zero_two_sided(record):
    s = _scaled_errors(0)
    ok = max(s) <= SQRT_N_FACTOR * min(s)
    record("10b", ok, f"two-sided factor-3 band at tau=0: max/min = {mp.nstr(max(s) / min(s), 3)}")
    assert ok


def test_mehler_heine_at_zero_two_sided_off_symmetry(record):
    s = _scaled_errors(mp.mpf("0.7"))
    ok = max(s) <= SQRT_N_FACTOR * min(s)
    record("10c", ok, f"two-sided factor-3 band at tau=0.7: max/min = {mp.nstr(max(s) / min(s), 3)}")
    assert ok


# ------------------------------------------------------------------ 11


def test_mehler_heine_off_zero(record):
    lines, ok = [], True
    for z, tau in itertools.product((mp.mpc(1, 0), mp.mpc(1, "0.5")), (0, mp.mpf("0.7"))):
        r = asy.mh_compare(z, tau, [16, 64, 256], digits=D)
        e = r.errors
        cell = e[0] > e[1] > e[2] and e[2] <= FINAL_RATIO_ERROR and r.exponent >= GUARANTEED_ORDER
        ok = ok and cell
        lines.append(
            f"z={mp.nstr(z, 2)} tau={mp.nstr(tau, 2)}: "
            + " ".join(mp.nstr(v, 3) for v in e)
            + f" exponent {mp.nstr(r.exponent, 3)}"
        )
    record(11, ok, "; ".join(lines))
    assert ok


# ------------------------------------------------------------------ 12


def test_scaling_identity(record):
    r = asy.lagrange_scaling_check(mp.mpf("0.7"), [64, 256, 1024], digits=D)
    ok = abs(r.exponent - SCALING_EXPONENT) <= SCALING_SLACK
    record(
        12,
        ok,
        "deviations " + " ".join(mp.nstr(d, 3) for d in r.deviations) + f", fitted exponent {mp.nstr(r.exponent, 3)}",
    )
    assert ok
