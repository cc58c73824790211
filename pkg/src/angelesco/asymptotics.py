"""Mehler-Heine comparison at the touching point and its convergence experiments.

The right-hand side is (-1)^n C_n Q(z; tau).  C_n collects the Szego-type
constants c_1, c_2 (computed at the limiting endpoint a = -1), the exponents
of the weights and the n-dependence coming from the double scaling
a_n = -1 + sqrt(2) tau / sqrt(n).  Left-hand sides come from ``eval_scaled``;
reports carry the ladder, the ratios and a least-squares decay exponent.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp
import numpy as np

from ._precision import to_mpc, to_mpf
from .equilibrium import potentials_and_constants, smooth_quad
from .errors import AccuracyError, ValidationError
from .modelrhp import Q_eval
from .mop import eval_scaled
from .weights import ScalingParams, WeightParams, a_n

DEFAULT_DIGITS = 30


@dataclass(frozen=True)
class AsymptoticConstants:
    c1: object
    c2: object
    Cn: object
    n: int
    tau: object
    params: WeightParams


@dataclass
class ComparisonReport:
    z: object
    tau: object
    ns: list
    lhs: list
    rhs: list
    ratios: list
    errors: list = field(default_factory=list)
    exponent: object = None

    def rows(self):
        return [
            {"n": n, "lhs": l, "rhs": r, "ratio": q, "ratio_minus_1": q - 1, "abs_error": e}
            for n, l, r, q, e in zip(self.ns, self.lhs, self.rhs, self.ratios, self.errors)
        ]


@dataclass
class ScalingReport:
    tau: object
    ns: list
    endpoints: list
    lagrange_sums: list
    deviations: list
    exponent: object = None

    def rows(self):
        return [
            {"n": n, "a": a, "l1_plus_l2": s, "deviation": d}
            for n, a, s, d in zip(self.ns, self.endpoints, self.lagrange_sums, self.deviations)
        ]


def fit_exponent(ns, errors):
    """p in |error| ~ C n^(-p), least squares on log-log data."""
    pts = [(mp.log(n), mp.log(abs(e))) for n, e in zip(ns, errors) if e != 0]
    if len(pts) < 2:
        return None
    mx = mp.fsum(x for x, _ in pts) / len(pts)
    my = mp.fsum(y for _, y in pts) / len(pts)
    sxx = mp.fsum((x - mx) ** 2 for x, _ in pts)
    sxy = mp.fsum((x - mx) * (y - my) for x, y in pts)
    return -sxy / sxx


# ------------------------------------------------------------------ constants


def xi_cubic(z, a):
    """Coefficients of the cubic in xi whose roots are the sheet values of the uniformizing map.

    Its inverse is the rational map z(xi) = 4a xi^3 / (2(a+1) xi^3 + 3(a-1) xi^2 - (a-1)),
    which sends xi = -1, 0, 1 to the branch points a, 0, 1.
    """
    return [4 * a - 2 * (a + 1) * z, -3 * (a - 1) * z, 0, (a - 1) * z]


def z_of_xi_derivative(xi, a):
    num = 4 * a * xi**3
    den = 2 * (a + 1) * xi**3 + 3 * (a - 1) * xi**2 - (a - 1)
    dnum = 12 * a * xi**2
    dden = 6 * (a + 1) * xi**2 + 6 * (a - 1) * xi
    return (dnum * den - num * dden) / den**2


def _xi_at_infinity(j, a):
    """xi_1(inf) < 0 < xi_2(inf): the finite real roots of the denominator of z(xi)."""
    af = float(a)
    den = [2 * (af + 1), 3 * (af - 1), 0, -(af - 1)]
    roots = np.roots(den if af != -1 else den[1:])
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-12)
    return real[0] if j == 1 else real[-1]


@lru_cache(maxsize=8)
def _xi_lower_sign(j, a_float):
    """Sign of Im xi_j on the lower side of interval j, by continuation from infinity."""
    x = -0.5 if j == 1 else 0.5
    cur = _xi_at_infinity(j, a_float)
    path = np.concatenate(
        [
            np.linspace(10, 10 - 2j, 200),
            np.linspace(10 - 2j, x - 2j, 400),
            np.linspace(x - 2j, x - 1e-6j, 400),
        ]
    )
    for z in path:
        roots = np.roots([complex(c) for c in xi_cubic(z, a_float)])
        cur = roots[np.argmin(abs(roots - cur))]
    return 1 if cur.imag > 0 else -1


def _xi_lower(j, x, a, sign):
    roots = mp.polyroots(xi_cubic(x, a), maxsteps=200, extraprec=2 * mp.mp.prec)
    pair = sorted(roots, key=lambda r: -abs(mp.im(r)))[:2]
    return pair[0] if mp.im(pair[0]) * sign > 0 else pair[1]


def cj_constant(j, p, digits=DEFAULT_DIGITS):
    """Szego-type constant c_j of the analytic factor h_j, at a = -1.

    c_j is the integral of log h_j(z(s)) ds / s over the clockwise boundary of
    the image of sheet j under the uniformizing map xi.  Pulled back to
    interval j it reads

        c_j = -(1/pi) int [log h_j(x) - log h_j(0)] Im (xi_j'/xi_j)_-(x) dx,

    with the lower boundary value.  Subtracting log h_j(0) accounts for the
    small arc around 0, where xi_j'/xi_j ~ 1/(3z); in particular constant
    factors give exactly 0.
    """
    if j not in (1, 2):
        raise ValidationError(f"interval index must be 1 or 2, got {j}")
    h = p.with_a(-1).factor(j)
    if h.is_constant:
        return 0
    return _cj_cached(j, h, digits)


@lru_cache(maxsize=64)
def _cj_cached(j, h, digits):
    lo, hi = (-1, 0) if j == 1 else (0, 1)
    sign = _xi_lower_sign(j, -1.0)
    with mp.workdps(digits + 10):
        a = mp.mpf(-1)
        log_h0 = mp.log(h.value(mp.mpf(0), lo, hi))

        def integrand(x):
            hv = h.value(x, lo, hi)
            if not hv > 0:
                raise ValidationError(f"log of nonpositive analytic factor at x={mp.nstr(x, 8)}")
            xi = _xi_lower(j, x, a, sign)
            return (mp.log(hv) - log_h0) * mp.im(1 / (xi * z_of_xi_derivative(xi, a)))

        # x = edge + v^2 at the square-root end, x = +-u^3 at the cube-root end 0
        half_v = mp.sqrt(mp.mpf(1) / 2)
        half_u = mp.cbrt(mp.mpf(1) / 2)
        if j == 1:
            outer = smooth_quad(lambda v: 2 * v * integrand(-1 + v * v), [0, half_v], digits)
            inner = smooth_quad(lambda u: 3 * u * u * integrand(-(u**3)), [0, half_u], digits)
        else:
            outer = smooth_quad(lambda v: 2 * v * integrand(1 - v * v), [0, half_v], digits)
            inner = smooth_quad(lambda u: 3 * u * u * integrand(u**3), [0, half_u], digits)
        val = -(outer + inner) / mp.pi
    with mp.workdps(digits):
        return +val


def jacobi_angelesco_cj(alpha, gamma):
    """Closed forms c_1 = gamma (ln 2 - ln 3 / 2), c_2 = alpha (ln 2 - ln 3 / 2)."""
    k = mp.log(2) - mp.log(3) / 2
    return to_mpf(gamma) * k, to_mpf(alpha) * k


def Cn_constant(n, tau, p, digits=DEFAULT_DIGITS, c=None):
    """Positive constant C_n of the Mehler-Heine formula.

    ``c`` may supply (c1, c2) to skip their quadrature.
    """
    if int(n) != n or n < 1:
        raise ValidationError("n must be a positive integer")
    c1, c2 = c if c is not None else (cj_constant(1, p, digits), cj_constant(2, p, digits))
    with mp.workdps(digits + 10):
        al, be, ga = (to_mpf(v) for v in (p.alpha, p.beta, p.gamma))
        t = to_mpf(tau)
        nn = mp.mpf(n)
        value = (
            mp.exp(to_mpf(c1) + to_mpf(c2))
            / mp.sqrt(3 * mp.pi)
            * mp.power(2, be)
            / mp.power(3, (al + 2 * be + ga) / 2)
            * mp.exp(-t * t)
            * mp.power(nn, be + mp.mpf(1) / 2)
            * mp.exp(-mp.sqrt(2) * t * mp.sqrt(nn))
            * mp.power(mp.mpf(4) / 27, n)
        )
    with mp.workdps(digits):
        return +value


def asymptotic_constants(n, tau, p, digits=DEFAULT_DIGITS):
    c1 = cj_constant(1, p, digits)
    c2 = cj_constant(2, p, digits)
    return AsymptoticConstants(c1, c2, Cn_constant(n, tau, p, digits, (c1, c2)), n, tau, p)


def mh_rhs(z, n, tau, p, digits=DEFAULT_DIGITS, c=None):
    """(-1)^n C_n Q(z; tau)."""
    Cn = Cn_constant(n, tau, p, digits, c)
    Q = _Q_value(z, tau, p.beta, digits)
    with mp.workdps(digits):
        return (-1) ** n * Cn * Q


def _Q_value(z, tau, beta, digits):
    """Q(z; tau), real-valued for real z since its Taylor coefficients are real."""
    Q = Q_eval(z, tau, beta, digits=digits).value
    if mp.im(to_mpc(z)) == 0:
        return mp.re(Q)
    return Q


def pnn_zero_asymptotic(n, tau, alpha, beta, gamma, digits=DEFAULT_DIGITS):
    """Leading behavior of P_{n,n}(0; a_n) for the Jacobi-Angelesco weight."""
    with mp.workdps(digits + 10):
        al, be, ga, t = (to_mpf(v) for v in (alpha, beta, gamma, tau))
        nn = mp.mpf(n)
        value = (
            (-1) ** n
            * 2
            * mp.pi
            / mp.gamma(1 + be)
            / mp.sqrt(3 * mp.pi)
            * mp.power(mp.mpf(2) / 3, al + be + ga)
            * mp.exp(-t * t)
            * mp.power(nn, be + mp.mpf(1) / 2)
            * mp.exp(-mp.sqrt(2) * t * mp.sqrt(nn))
            * mp.power(mp.mpf(4) / 27, n)
        )
    with mp.workdps(digits):
        return +value


# ------------------------------------------------------------------ experiments


def _map(func, items, workers):
    if workers and workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


def _check_ladder(ns):
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValidationError("ladder must be strictly increasing positive integers")
    return ns


def _lhs_job(args):
    n, z, tau, p, digits = args
    return eval_scaled(n, z, ScalingParams(tau, n), p, digits)


def mh_compare(z, tau, n_ladder, p=None, digits=DEFAULT_DIGITS, workers=None):
    """Compare P_{n,n}(z / (sqrt(2) n^(3/2)); a_n) with (-1)^n C_n Q(z; tau) along a ladder.

    ``p`` fixes the exponents and factors (default: all exponents 0, h = 1);
    its endpoint is replaced by a_n.  Exact rational left-hand sides are kept
    exact until the ratio is formed.
    """
    ns = _check_ladder(n_ladder)
    p = p or WeightParams.jacobi_angelesco(-1)
    c = (cj_constant(1, p, digits), cj_constant(2, p, digits))
    lhs = _map(_lhs_job, [(n, z, tau, p, digits) for n in ns], workers)
    Q = _Q_value(z, tau, p.beta, digits)
    report = ComparisonReport(z, tau, ns, [], [], [], [])
    with mp.workdps(digits):
        for n, left in zip(ns, lhs):
            right = (-1) ** n * Cn_constant(n, tau, p, digits, c) * Q
            left_mp = to_mpc(left) if not isinstance(left, (mp.mpf, mp.mpc)) else left
            if left_mp == 0 or right == 0:
                raise AccuracyError(f"vanishing side in the comparison at n={n}")
            ratio = left_mp / right
            if mp.im(ratio) == 0:
                ratio = mp.re(ratio)
            report.lhs.append(left)
            report.rhs.append(right)
            report.ratios.append(ratio)
            report.errors.append(abs(ratio - 1))
        report.exponent = fit_exponent(ns, report.errors)
    return report


def _lagrange_job(args):
    tau, n, digits = args
    with mp.workdps(digits + 10):
        a = a_n(ScalingParams(tau, n))
    data = potentials_and_constants(a, digits)
    with mp.workdps(digits):
        total = data.l1 + data.l2
        t = to_mpf(tau)
        # log of exp(-(2n/3)(l1+l2)) / [(4/27)^n exp(-sqrt2 tau sqrt n) exp(-5 tau^2/6)]
        log_ratio = -2 * n * total / 3 - n * mp.log(mp.mpf(4) / 27) + mp.sqrt(2) * t * mp.sqrt(n) + 5 * t * t / 6
        return a, total, mp.expm1(log_ratio)


def lagrange_scaling_check(tau, n_ladder, digits=DEFAULT_DIGITS, workers=None):
    """Relative deviation of exp(-(2n/3)(l1+l2)) at a_n from (4/27)^n e^(-sqrt2 tau sqrt n) e^(-5 tau^2/6)."""
    ns = _check_ladder(n_ladder)
    out = _map(_lagrange_job, [(tau, n, digits) for n in ns], workers)
    report = ScalingReport(tau, ns, [o[0] for o in out], [o[1] for o in out], [o[2] for o in out])
    with mp.workdps(digits):
        report.exponent = fit_exponent(ns, report.deviations)
    return report


__all__ = [
    "AsymptoticConstants",
    "ComparisonReport",
    "ScalingReport",
    "Cn_constant",
    "asymptotic_constants",
    "cj_constant",
    "fit_exponent",
    "jacobi_angelesco_cj",
    "lagrange_scaling_check",
    "mh_compare",
    "mh_rhs",
    "pnn_zero_asymptotic",
]
