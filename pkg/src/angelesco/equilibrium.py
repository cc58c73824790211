"""Modified vector equilibrium problem on [a, 0] and [0, 1] via its spectral curve.

The Cauchy transforms of the two (signed) equilibrium measures are branches
of

    zeta^3 + p(z) zeta + q(z) = 0,
    p(z) = -(3z - 2z* - 1 - a) / (4z(z-a)(z-1)),
    q(z) = -(z - z*) / (4z^2(z-a)(z-1)),

with zeta_0 ~ 1/z and zeta_1, zeta_2 ~ -1/(2z) at infinity.  zeta_1 is
analytic off [a, 0] and zeta_2 off [0, 1]; the densities are the jumps
psi_j = (zeta_j+ - zeta_j-) / (2 pi i).

Roots are computed in closed form at the working precision.  Sheet labels
off the real line come from continuation in double precision starting at
z = 10, where the three roots are real and ordered zeta_0 > zeta_1 > zeta_2.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from ._precision import to_mpc, to_mpf
from .errors import AccuracyError, BranchError, DomainError, TrackingError, ValidationError
from .quadrature import legendre_rule

DEFAULT_DIGITS = 30
BASE_POINT = 10.0
MIN_STEP = 1e-13


# ------------------------------------------------------------------ constants


@dataclass(frozen=True)
class CurveData:
    a: object
    zstar: object
    x0: object
    b: object
    digits: int

    def coefficients(self, z):
        """(p, q) of the depressed cubic at z."""
        a = to_mpf(self.a)
        zs = self.zstar
        den = 4 * z * (z - a) * (z - 1)
        p = -(3 * z - 2 * zs - 1 - a) / den
        q = -(z - zs) / (z * den)
        return p, q

    def coefficient_derivatives(self, z):
        """(p', q') at z."""
        a = to_mpf(self.a)
        zs = self.zstar
        d = z * (z - a) * (z - 1)
        dd = 3 * z * z - 2 * (a + 1) * z + a
        num_p = 3 * z - 2 * zs - 1 - a
        dp = -(3 * d - num_p * dd) / (4 * d * d)
        e = z * d
        de = d + z * dd
        dq = -(e - (z - zs) * de) / (4 * e * e)
        return dp, dq

    def discriminant(self, z):
        """Discriminant -4p^3 - 27q^2 in factored form, exact near its double zero x0."""
        a = to_mpf(self.a)
        s = self.zstar
        lead = 9 * a * a - 18 * a * s - 9 * a + 9 * s * s - 18 * s + 9
        return lead * (z - self.x0) ** 2 / (16 * z**4 * (z - a) ** 3 * (z - 1) ** 3)

    def pair_imag(self, x, t, m):
        """Imaginary part of the complex pair -t/2 +- i m at real x.

        Near x0 the direct value sqrt(3t^2 + 4p)/2 cancels; there the
        identity -disc = 4 m^2 (9t^2/4 + m^2)^2 is solved for m^2 instead.
        """
        if m * m > t * t / 10:
            return m
        d = -self.discriminant(x)
        if d <= 0:
            return mp.mpf(0)
        w = m * m
        for _ in range(60):
            w_new = d / (4 * (9 * t * t / 4 + w) ** 2)
            if abs(w_new - w) <= mp.eps * w_new:
                w = w_new
                break
            w = w_new
        return mp.sqrt(w)

    def to_json(self):
        return {
            "a": _fmt(self.a, self.digits),
            "zstar": _fmt(self.zstar, self.digits),
            "x0": _fmt(self.x0, self.digits),
            "b": _fmt(self.b, self.digits),
        }


def _fmt(v, digits):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    return mp.nstr(v, digits, strip_zeros=False)


def zstar_polynomial(a):
    """Coefficients (highest first) of the cubic whose middle root is z*."""
    return [64, -48 * (a + 1), -(15 * a * a - 78 * a + 15), -((a + 1) ** 3)]


def x0_polynomial(a):
    """Coefficients (highest first) of the cubic whose middle root is x0."""
    return [
        27 * a * a - 46 * a + 27,
        -3 * (a + 1) * (9 * a * a - 14 * a + 9),
        3 * a * (11 * a * a - 14 * a + 11),
        -a * (a + 1) ** 3,
    ]


def _middle_root(coeffs):
    roots = mp.polyroots(coeffs, maxsteps=200, extraprec=2 * mp.mp.prec)
    scale = max(abs(r) for r in roots) + 1
    if any(abs(mp.im(r)) > mp.mpf(10) ** (-(mp.mp.dps // 2)) * scale for r in roots):
        raise DomainError("cubic has complex roots; the curve degenerates for this a")
    real = sorted(mp.re(r) for r in roots)
    return real[1]


def _exact(a):
    if isinstance(a, (int, Fraction)):
        return a
    if isinstance(a, str):
        return Fraction(a)
    if isinstance(a, float) and Fraction(a).denominator <= 2**16:
        return Fraction(a)
    return None


def curve_constants(a, digits=DEFAULT_DIGITS):
    """z*, x0 (middle roots of their cubics) and b = (a+1)^3 / (9(a^2 - a + 1))."""
    return _curve_cached(_a_key(a, digits), int(digits))


def _a_key(a, digits):
    exact = _exact(a)
    if exact is not None:
        return ("exact", str(exact))
    with mp.workdps(digits + 15):
        return ("float", mp.nstr(to_mpf(a), digits + 15))


@lru_cache(maxsize=128)
def _curve_cached(a_key, digits):
    kind, text = a_key
    exact = Fraction(text) if kind == "exact" else None
    with mp.workdps(digits + 15):
        a = to_mpf(exact) if exact is not None else mp.mpf(text)
        if not a < 0:
            raise ValidationError(f"a must be negative, got {a_key}")
        if a == -1:
            zs = mp.mpf(0)
            x0 = mp.mpf(0)
        else:
            zs = _middle_root(zstar_polynomial(a))
            x0 = _middle_root(x0_polynomial(a))
        if exact is not None:
            b = Fraction(exact + 1) ** 3 / (9 * (exact * exact - exact + 1))
        else:
            b = (a + 1) ** 3 / (9 * (a * a - a + 1))
        return CurveData(exact if exact is not None else a, zs, x0, b, digits)


def cubic_residuals(curve):
    """|residual| of z* and x0 in their defining cubics."""
    with mp.workdps(curve.digits + 15):
        a = to_mpf(curve.a)
        return (
            abs(mp.polyval(zstar_polynomial(a), curve.zstar)),
            abs(mp.polyval(x0_polynomial(a), curve.x0)),
        )


# ------------------------------------------------------------------ cubic roots


def _polish(r, p, q):
    for _ in range(3):
        f = (r * r + p) * r + q
        d = 3 * r * r + p
        if d == 0:
            break
        step = f / d
        r -= step
        if abs(step) <= abs(r) * mp.eps:
            break
    return r


def cubic_roots(p, q):
    """All roots of zeta^3 + p zeta + q (complex p, q), polished by Newton."""
    omega = mp.expjpi(mp.mpf(2) / 3)
    if p == 0:
        w = -q
        A = mp.cbrt(w) if mp.im(w) == 0 and mp.re(w) >= 0 else mp.power(w, mp.mpf(1) / 3)
        return [A, A * omega, A * omega * omega]
    s = mp.sqrt(q * q / 4 + p**3 / 27)
    w1 = -q / 2 - s
    w2 = -q / 2 + s
    w = w1 if abs(w1) >= abs(w2) else w2
    A = mp.power(w, mp.mpf(1) / 3)
    roots = []
    for k in range(3):
        Ak = A * omega**k
        roots.append(_polish(Ak - p / (3 * Ak), p, q))
    return roots


def real_cubic_roots(p, q):
    """Roots for real p, q: ('one', t, m) with pair -t/2 +- i m, or ('three', sorted roots)."""
    disc = q * q / 4 + p**3 / 27
    if disc > 0:
        s = mp.sqrt(disc)
        w = -q / 2 - s if q > 0 else -q / 2 + s
        A = mp.cbrt(abs(w)) * (1 if w >= 0 else -1)
        t = A - p / (3 * A) if A != 0 else mp.mpf(0)
        t = mp.re(_polish(mp.mpf(t), p, q))
        m2 = 3 * t * t + 4 * p
        m = mp.sqrt(m2) / 2 if m2 > 0 else mp.mpf(0)
        return "one", t, m
    r = 2 * mp.sqrt(-p / 3)
    arg = (3 * q / (2 * p)) * mp.sqrt(-3 / p)
    arg = max(mp.mpf(-1), min(mp.mpf(1), arg))
    phi = mp.acos(arg) / 3
    roots = sorted(mp.re(_polish(r * mp.cos(phi - 2 * mp.pi * k / 3), p, q)) for k in range(3))
    return "three", roots, None


# ------------------------------------------------------------------ branch tracking


def _float_coeffs(curve):
    return float(curve.a), float(curve.zstar)


def _float_roots(z, a, zs):
    den = 4 * z * (z - a) * (z - 1)
    p = -(3 * z - 2 * zs - 1 - a) / den
    q = -(z - zs) / (z * den)
    return np.roots([1, 0, p, q])


def _match(prev, new):
    """Permutation of ``new`` following ``prev``; None when ambiguous."""
    dist = np.abs(prev[:, None] - new[None, :])
    order = dist.argmin(axis=1)
    if len(set(order.tolist())) != 3:
        return None
    moved = dist[np.arange(3), order].max()
    seps = [abs(new[i] - new[j]) for i in range(3) for j in range(i + 1, 3)]
    seps += [abs(prev[i] - prev[j]) for i in range(3) for j in range(i + 1, 3)]
    if moved * 4 > min(seps):
        return None
    return new[order]


class Tracker:
    """Continues the labeled triple (zeta_0, zeta_1, zeta_2) along straight segments."""

    def __init__(self, curve):
        self.a, self.zs = _float_coeffs(curve)
        self.z = complex(BASE_POINT)
        roots = np.sort(_float_roots(self.z, self.a, self.zs).real)[::-1]
        self.roots = roots.astype(complex)

    def move_to(self, target):
        target = complex(target)
        start = self.z
        length = abs(target - start)
        if length == 0:
            return self.roots
        s = 0.0
        h = min(1.0, 0.05 / max(length, 1e-300) * max(abs(start), abs(target), 1e-3))
        while s < 1.0:
            s_new = min(1.0, s + h)
            z = start + (target - start) * s_new
            matched = _match(self.roots, _float_roots(z, self.a, self.zs))
            if matched is None:
                h /= 2
                if h * length < MIN_STEP * max(1.0, abs(z)):
                    raise TrackingError(f"root continuation stalled near z={z}")
                continue
            self.roots = matched
            self.z = z
            s = s_new
            h = min(1.0 - s if s < 1.0 else 1.0, h * 1.6) or h
        self.z = target
        return self.roots


def _check_branch_point(z, curve):
    a = to_mpf(curve.a)
    for bp in (a, mp.mpf(0), mp.mpf(1)):
        if abs(z - bp) <= mp.mpf(10) ** (-12) * (1 + abs(bp)):
            raise BranchError(f"z={mp.nstr(z, 10)} is a branch point of the curve")


def _path_to(tracker, z):
    """Standard path 10 -> 10+iH -> Re z+iH -> z for Im z >= 0."""
    x, y = float(mp.re(z)), float(mp.im(z))
    H = max(2.0, y)
    tracker.move_to(complex(BASE_POINT, H))
    tracker.move_to(complex(x, H))
    return tracker.move_to(complex(x, y))


@dataclass(frozen=True)
class BranchValues:
    z: object
    zeta0: object
    zeta1: object
    zeta2: object
    sheet: str = "tracked"

    def as_tuple(self):
        return (self.zeta0, self.zeta1, self.zeta2)


def _label(roots_mp, roots_float):
    out = []
    used = set()
    for target in roots_float:
        best = min((i for i in range(3) if i not in used), key=lambda i: abs(complex(roots_mp[i]) - target))
        used.add(best)
        out.append(roots_mp[best])
    return out


def zeta_branches(z, a, digits=DEFAULT_DIGITS, curve=None):
    """Labeled roots zeta_0, zeta_1, zeta_2 of the spectral cubic at z."""
    curve = curve or curve_constants(a, digits)
    with mp.workdps(digits + 10):
        z = to_mpc(z)
        _check_branch_point(z, curve)
        am = to_mpf(curve.a)
        if mp.im(z) == 0 and am < mp.re(z) < 1:
            raise BranchError("z lies on the support [a, 1]; use boundary_values")
        conj = mp.im(z) < 0
        zz = mp.conj(z) if conj else z
        labels = _path_to(Tracker(curve), complex(zz))
        p, q = curve.coefficients(zz)
        roots = _label(cubic_roots(p, q), labels)
        if conj:
            roots = [mp.conj(r) for r in roots]
    with mp.workdps(digits):
        return BranchValues(z, +roots[0], +roots[1], +roots[2], "conjugate" if conj else "tracked")


def branch_identity_residuals(bv, curve):
    """(|sum|, relative product residual) for a BranchValues."""
    with mp.workdps(curve.digits + 10):
        return _identity_residuals(bv, curve)


def _identity_residuals(bv, curve):
    z = bv.z
    a = to_mpf(curve.a)
    s = bv.zeta0 + bv.zeta1 + bv.zeta2
    prod = bv.zeta0 * bv.zeta1 * bv.zeta2
    target = (z - curve.zstar) / (4 * z * z * (z - a) * (z - 1))
    scale = max(abs(bv.zeta0), abs(bv.zeta1), abs(bv.zeta2))
    return abs(s) / scale, abs(prod - target) / abs(target) if target != 0 else abs(prod)


# ------------------------------------------------------------------ boundary values and densities


def _interval(j, curve):
    a = to_mpf(curve.a)
    if j == 1:
        return a, mp.mpf(0)
    if j == 2:
        return mp.mpf(0), mp.mpf(1)
    raise ValidationError("interval index must be 1 or 2")


@lru_cache(maxsize=512)
def _anchor_sign(a_key, digits, j, part):
    """Sign of psi_j on the part of interval j left (0) or right (1) of x0."""
    curve = _curve_cached(a_key, digits)
    with mp.workdps(digits + 10):
        lo, hi = _interval(j, curve)
        x0 = curve.x0
        if lo < x0 < hi:
            lo, hi = (lo, x0) if part == 0 else (x0, hi)
        x = (lo + hi) / 2
        delta = (hi - lo) * mp.mpf("1e-6")
        tracked = zeta_branches(mp.mpc(x, delta), None, digits, curve)
        val = tracked.zeta1 if j == 1 else tracked.zeta2
        return 1 if mp.im(val) > 0 else -1


def _curve_key(curve):
    return _a_key(curve.a, curve.digits)


def boundary_values(x, a, digits=DEFAULT_DIGITS, curve=None):
    """(zeta_0+, zeta_1+, zeta_2+) at real x in (a, 0) or (0, 1), limits from the upper half plane."""
    curve = curve or curve_constants(a, digits)
    with mp.workdps(digits + 10):
        x = to_mpf(x)
        am = to_mpf(curve.a)
        if not (am < x < 1) or x == 0:
            raise DomainError("boundary values are taken on (a, 0) and (0, 1)")
        j = 1 if x < 0 else 2
        p, q = curve.coefficients(x)
        kind, t, m = real_cubic_roots(p, q)
        if kind == "three":
            # only at x0 itself: the double pair is the complex pair with m = 0
            r = t
            gaps = [abs(r[1] - r[2]) + abs(r[0] - r[2]), abs(r[0] - r[2]) + abs(r[0] - r[1]), abs(r[0] - r[1]) + abs(r[1] - r[2])]
            real_root = r[gaps.index(max(gaps))]
            pair = [x_ for x_ in r if x_ is not real_root]
            t, m = real_root, mp.mpf(0)
            mid = (pair[0] + pair[1]) / 2
        else:
            mid = -t / 2
            m = curve.pair_imag(x, t, m)
        part = 0 if x < curve.x0 else 1
        sign = _anchor_sign(_curve_key(curve), curve.digits, j, part)
        upper = mp.mpc(mid, sign * m)
        lower = mp.mpc(mid, -sign * m)
        if j == 1:
            vals = (lower, upper, mp.mpc(t))
        else:
            vals = (lower, mp.mpc(t), upper)
    with mp.workdps(digits):
        return tuple(+v for v in vals)


def density(j, x, a, digits=DEFAULT_DIGITS, curve=None, method="exact"):
    """psi_j(x) for x inside interval j.

    method="exact" uses the closed-form roots of the real cubic with the
    sheet fixed once per sign region; "richardson" extrapolates tracked
    values at x + i eps, eps in {1e-6, 1e-7, 1e-8}; "tracked" picks the
    root from a continuation to x + i 1e-9 |x| at this very x.
    """
    curve = curve or curve_constants(a, digits)
    lo, hi = _interval(j, curve)
    with mp.workdps(digits + 10):
        x = to_mpf(x)
        if not lo < x < hi:
            raise DomainError(f"x={mp.nstr(x, 10)} is outside the open interval {j}")
        if method == "exact":
            val = mp.im(boundary_values(x, None, digits, curve)[j]) / mp.pi
        elif method == "tracked":
            p, q = curve.coefficients(x)
            _, t, m = real_cubic_roots(p, q)
            m = curve.pair_imag(x, t, m)
            eps = mp.mpf("1e-9") * min(abs(x - lo), abs(hi - x))
            side = zeta_branches(mp.mpc(x, eps), None, digits, curve).as_tuple()[j]
            val = (m if mp.im(side) > 0 else -m) / mp.pi
        elif method == "richardson":
            val = _richardson_density(j, x, curve, digits)
        else:
            raise ValidationError(f"unknown density method {method!r}")
    with mp.workdps(digits):
        return +val


def _richardson_density(j, x, curve, digits):
    eps = [mp.mpf("1e-6"), mp.mpf("1e-7"), mp.mpf("1e-8")]
    vals = [mp.im(zeta_branches(mp.mpc(x, e), None, digits, curve).as_tuple()[j]) / mp.pi for e in eps]
    # error is linear in eps: eliminate it twice
    r1 = (10 * vals[1] - vals[0]) / 9
    r2 = (10 * vals[2] - vals[1]) / 9
    if abs(r1 - r2) > mp.mpf("1e-6") * (abs(r2) + 1):
        raise AccuracyError("extrapolation in eps did not settle; use method='exact'")
    return (10 * r2 - r1) / 9


def _psi_fast(j, curve):
    """Vectorizable closure psi_j(x) for quadrature (working precision from caller)."""
    key = _curve_key(curve)
    lo, hi = _interval(j, curve)
    x0 = curve.x0
    signs = (_anchor_sign(key, curve.digits, j, 0), _anchor_sign(key, curve.digits, j, 1))

    def psi(x):
        p, q = curve.coefficients(x)
        kind, t, m = real_cubic_roots(p, q)
        if kind == "three":
            return mp.mpf(0)
        return (signs[0] if x < x0 else signs[1]) * curve.pair_imag(x, t, m) / mp.pi

    return psi, lo, hi


def _breakpoints(j, curve):
    lo, hi = _interval(j, curve)
    pts = [lo]
    if lo < curve.x0 < hi:
        pts.append(curve.x0)
    pts.append(hi)
    return pts


def mass(j, a, digits=DEFAULT_DIGITS, curve=None):
    """Total mass of psi_j over its interval (should be 1/2)."""
    curve = curve or curve_constants(a, digits)
    with mp.workdps(digits + 5):
        psi, lo, hi = _psi_fast(j, curve)
        pts = _breakpoints(j, curve)
        total = mp.quad(psi, pts)
    with mp.workdps(digits):
        return +total


def _scan_grid(j, curve, npts):
    """Uniform interior grid plus geometric points toward 0 and around x0."""
    lo, hi = _interval(j, curve)
    pts = {lo + (hi - lo) * mp.mpf(k) / npts for k in range(1, npts)}
    edge = lo if j == 1 else hi
    for k in range(1, 10):
        pts.add(edge * mp.mpf(10) ** -k)
    x0 = curve.x0
    if lo < x0 < hi:
        for f in ("0.01", "0.1", "0.5", "0.9", "1.1", "2", "10"):
            x = x0 * mp.mpf(f)
            if lo < x < hi:
                pts.add(x)
    return sorted(pts)


def sign_changes(j, a, npts=200, digits=DEFAULT_DIGITS, curve=None, method="tracked"):
    """Sign of psi_j on an interior grid, as a list of (x, sign).

    The grid is uniform with extra geometric points toward 0 and around x0,
    where the negative region of psi_j lives when a != -1.
    """
    curve = curve or curve_constants(a, digits)
    out = []
    with mp.workdps(digits + 10):
        grid = _scan_grid(j, curve, npts)
    for x in grid:
        v = density(j, x, None, digits, curve, method=method)
        out.append((x, 0 if v == 0 else (1 if v > 0 else -1)))
    return out


# ------------------------------------------------------------------ potentials


@dataclass(frozen=True)
class PotentialData:
    a: object
    l1: object
    l2: object
    U1_at_0: object
    U2_at_0: object
    curve: CurveData
    digits: int

    def U(self, j, x):
        return log_potential(j, x, self.curve, self.digits)

    def g(self, j, z):
        return g_function(j, z, self.curve, self.digits)

    def phi(self, j, z):
        return phi_from_g(j, z, self)

    def variational(self, x):
        """2U1 + U2 at x in [a,0] or U1 + 2U2 at x in [0,1]."""
        u1 = self.U(1, x)
        u2 = self.U(2, x)
        return 2 * u1 + u2 if x <= 0 else u1 + 2 * u2


def log_potential(j, x, curve, digits=DEFAULT_DIGITS):
    """U^{mu_j}(x) = int log(1/|x - s|) psi_j(s) ds for real x."""
    with mp.workdps(digits + 5):
        x = to_mpf(x)
        psi, lo, hi = _psi_fast(j, curve)
        pts = _breakpoints(j, curve)
        if lo < x < hi:
            pts = sorted(set(pts + [x]))
        val = mp.quad(lambda s: -mp.log(abs(x - s)) * psi(s), pts)
    with mp.workdps(digits):
        return +val


def g_function(j, z, curve, digits=DEFAULT_DIGITS):
    """g_j(z) = int log(z - s) dmu_j(s), principal logarithm."""
    with mp.workdps(digits + 5):
        z = to_mpc(z)
        psi, lo, hi = _psi_fast(j, curve)
        pts = _breakpoints(j, curve)
        val = mp.quad(lambda s: mp.log(z - s) * psi(s), pts)
    with mp.workdps(digits):
        return +val


def _zeta1_positive_axis(curve):
    def f(x):
        p, q = curve.coefficients(x)
        kind, t, _ = real_cubic_roots(p, q)
        if kind == "one":
            return t
        if x > 1:
            return t[1]
        r = t
        gaps = [abs(r[1] - r[2]) + abs(r[0] - r[2]), abs(r[0] - r[2]) + abs(r[0] - r[1]), abs(r[0] - r[1]) + abs(r[1] - r[2])]
        return r[gaps.index(max(gaps))]

    return f


def _zeta2_negative_axis(curve):
    a = to_mpf(curve.a)

    def f(x):
        p, q = curve.coefficients(x)
        kind, t, _ = real_cubic_roots(p, q)
        if kind == "one":
            return t
        if x < a:
            return t[1]
        r = t
        gaps = [abs(r[1] - r[2]) + abs(r[0] - r[2]), abs(r[0] - r[2]) + abs(r[0] - r[1]), abs(r[0] - r[1]) + abs(r[1] - r[2])]
        return r[gaps.index(max(gaps))]

    return f


def smooth_quad(f, pts, digits, order=24, max_panels=256):
    """Composite Gauss-Legendre for integrands analytic on each [pts[k], pts[k+1]].

    Nodes stay away from the endpoints, which matters when f is evaluated
    through a subtraction that cancels there.
    """
    ys, ws = legendre_rule(order, mp.mp.dps)
    tol = mp.mpf(10) ** (-digits)
    total = mp.mpf(0)
    for lo, hi in zip(pts, pts[1:]):
        lo, hi = mp.mpf(lo), mp.mpf(hi)
        prev = None
        panels = 2
        while True:
            acc = mp.mpf(0)
            width = (hi - lo) / panels
            for k in range(panels):
                a = lo + k * width
                acc += width / 2 * mp.fsum(w * f(a + width * (1 + y) / 2) for y, w in zip(ys, ws))
            if prev is not None and abs(acc - prev) <= tol * (1 + abs(acc)):
                break
            if panels >= max_panels:
                raise AccuracyError("panel refinement did not converge", achieved_digits=None)
            prev = acc
            panels *= 2
        total += acc
    return total


def potentials_at_zero(curve, digits=DEFAULT_DIGITS):
    """(U1(0), U2(0)) from the real-axis branches zeta_1 on (0, inf) and zeta_2 on (-inf, 0).

    U1(0) = -[int_0^1 zeta_1 + int_1^inf (zeta_1 + 1/(2s))] and
    U2(0) = -[int_-inf^-1 (-zeta_2 - 1/(2t)) - int_-1^0 zeta_2].
    """
    with mp.workdps(digits + 10):
        z1 = _zeta1_positive_axis(curve)
        z2 = _zeta2_negative_axis(curve)
        a = to_mpf(curve.a)
        x0 = curve.x0
        # s = u^3 absorbs the s^(-2/3) singularity at 0
        cut = [mp.mpf(0)] + ([mp.cbrt(x0)] if 0 < x0 < 1 else []) + [mp.mpf(1)]
        near = smooth_quad(lambda u: 3 * u * u * z1(u**3), cut, digits)
        far = smooth_quad(lambda v: (z1(1 / v) + v / 2) / (v * v), [0, 1], digits)
        u1 = -(near + far)
        bps = sorted({mp.mpf(-1), a} | ({x0} if a < x0 < 0 else set()))
        left = [bp for bp in bps if bp < -1]
        # (-inf, -1]: t = -1/v
        tail = smooth_quad(lambda v: (-z2(-1 / v) + v / 2) / (v * v), [0] + sorted(-1 / bp for bp in left) + [1], digits)
        inner_pts = [bp for bp in bps if -1 < bp < 0]
        # t = -u^3 on [-1, 0]
        us = sorted({mp.mpf(0), mp.mpf(1)} | {mp.cbrt(-bp) for bp in inner_pts})
        inner = smooth_quad(lambda u: 3 * u * u * z2(-(u**3)), us, digits)
        u2 = -(tail - inner)
    with mp.workdps(digits):
        return +u1, +u2


def potentials_and_constants(a, digits=DEFAULT_DIGITS, curve=None):
    """Potentials at 0 and the Lagrange constants l1 = 2U1 + U2, l2 = U1 + 2U2."""
    curve = curve or curve_constants(a, digits)
    u1, u2 = potentials_at_zero(curve, digits)
    with mp.workdps(digits):
        return PotentialData(curve.a, 2 * u1 + u2, u1 + 2 * u2, u1, u2, curve, digits)


def variational_deviation(data, npts=20):
    """Max deviation of the variational conditions from l1, l2 over interior points."""
    with mp.workdps(data.digits):
        a = to_mpf(data.a)
        worst = mp.mpf(0)
        for k in range(npts):
            if k % 2 == 0:
                x = a * (k + 1) / (npts + 1)
                worst = max(worst, abs(data.variational(x) - data.l1))
            else:
                x = mp.mpf(k + 1) / (npts + 1)
                worst = max(worst, abs(data.variational(x) - data.l2))
        return worst


def lagrange_sum_expected(a):
    """Series (3/2) ln(27/4) + (3/2) e + (5/8) e^2 for l1 + l2 in e = a + 1."""
    e = to_mpf(a) + 1
    return mp.mpf(3) / 2 * mp.log(mp.mpf(27) / 4) + mp.mpf(3) / 2 * e + mp.mpf(5) / 8 * e * e


# ------------------------------------------------------------------ phase functions


def phi_from_g(j, z, data):
    """phi_j from the g-functions and l_j (off the real axis)."""
    z = to_mpc(z)
    if mp.im(z) == 0:
        raise BranchError("phi_j is evaluated off the real axis")
    g1 = data.g(1, z)
    g2 = data.g(2, z)
    s = 1 if mp.im(z) > 0 else -1
    if j == 1:
        return -2 * g1 - g2 - data.l1 + s * mp.pi * 1j / 2
    return -2 * g2 - g1 - data.l2 + s * mp.pi * 1j


def phi_integral(j, z, a, digits=DEFAULT_DIGITS, curve=None, panels=4, order=24):
    """phi_j(z) = int_0^z (zeta_j - zeta_0) ds along the segment, with s = z u^3."""
    curve = curve or curve_constants(a, digits)
    with mp.workdps(digits + 10):
        z = to_mpc(z)
        if z == 0:
            return mp.mpc(0)
        if mp.im(z) == 0:
            raise BranchError("phi_j is evaluated off the real axis")
        conj = mp.im(z) < 0
        zz = mp.conj(z) if conj else z
        tracker = Tracker(curve)
        _path_to(tracker, complex(zz))
        ys, ws = legendre_rule(order, mp.mp.dps)
        nodes = []
        for k in range(panels):
            lo = mp.mpf(k) / panels
            hi = mp.mpf(k + 1) / panels
            for y, w in zip(ys, ws):
                nodes.append((lo + (hi - lo) * (1 + y) / 2, w * (hi - lo) / 2))
        nodes.sort(key=lambda t: -t[0])
        total = mp.mpc(0)
        for u, w in nodes:
            s = zz * u**3
            labels = tracker.move_to(complex(s))
            p, q = curve.coefficients(s)
            r = _label(cubic_roots(p, q), labels)
            total += w * 3 * zz * u * u * (r[j] - r[0])
        if conj:
            total = mp.conj(total)
    with mp.workdps(digits):
        return +total


def local_constants(a, digits=DEFAULT_DIGITS, curve=None):
    """(c0, c1) of zeta_1 = c0 s^(-2/3) + c1 s^(-1/3) + O(1) at 0 from above."""
    curve = curve or curve_constants(a, digits)
    with mp.workdps(digits + 10):
        am = to_mpf(curve.a)
        if am == -1:
            c0 = mp.mpf(0)
            c1 = -mp.cbrt(2) / 2
        else:
            w = -curve.zstar / (4 * am)
            c0 = mp.cbrt(abs(w)) * (1 if w >= 0 else -1)
            c1 = -(2 * curve.zstar + am + 1) / (12 * am * c0)
    with mp.workdps(digits):
        return +c0, +c1


@dataclass(frozen=True)
class PhaseMaps:
    a: object
    c0: object
    c1: object
    lambda1_0: object
    lambda2_0: object
    fprime0: object
    tau0: object
    curve: CurveData
    digits: int

    def lambda1(self, z):
        return lambda_functions(z, self)[0]

    def lambda2(self, z):
        return lambda_functions(z, self)[1]

    def f(self, z):
        z = to_mpc(z)
        if z == 0:
            return mp.mpc(0)
        return mp.mpf(8) / 27 * z * self.lambda2(z) ** (mp.mpf(3) / 2)

    def tau_of_z(self, z):
        z = to_mpc(z)
        if z == 0:
            return mp.mpc(self.tau0)
        l1, l2 = lambda_functions(z, self)
        return l1 / mp.sqrt(l2)


def lambda_functions(z, maps):
    """(lambda1, lambda2) at z off the real axis."""
    z = to_mpc(z)
    if z == 0:
        return mp.mpc(maps.lambda1_0), mp.mpc(maps.lambda2_0)
    phi1 = phi_integral(1, z, None, maps.digits, maps.curve)
    phi2 = phi_integral(2, z, None, maps.digits, maps.curve)
    w = mp.expjpi(mp.mpf(2) / 3)
    third = mp.mpf(1) / 3
    if mp.im(z) > 0:
        l1 = -(z ** (-third)) * (phi1 + w * w * phi2)
        l2 = -(z ** (-2 * third)) * (phi1 + w * phi2)
    else:
        l1 = -(z ** (-third)) * (phi1 + w * phi2)
        l2 = -(z ** (-2 * third)) * (phi1 + w * w * phi2)
    return l1, l2


def phase_maps(a, digits=DEFAULT_DIGITS, curve=None, check_radius=None):
    """lambda_1, lambda_2, f and tau(z) near 0.

    lambda_1(0) = -9 c0 and lambda_2(0) = -(9/2) c1 follow from the cube-root
    expansions of the zeta_j at 0.  With ``check_radius`` the right half plane
    condition Re lambda_2 > 0 is verified on that circle.
    """
    curve = curve or curve_constants(a, digits)
    c0, c1 = local_constants(None, digits, curve)
    with mp.workdps(digits + 5):
        l1_0 = -9 * c0
        l2_0 = -mp.mpf(9) / 2 * c1
        if not l2_0 > 0:
            raise BranchError("lambda_2(0) is not positive; a is too far from -1")
        fp = mp.mpf(8) / 27 * l2_0 ** (mp.mpf(3) / 2)
        t0 = l1_0 / mp.sqrt(l2_0)
    with mp.workdps(digits):
        maps = PhaseMaps(curve.a, c0, c1, +l1_0, +l2_0, +fp, +t0, curve, digits)
    if check_radius is not None:
        for k in range(8):
            ang = mp.pi * (2 * k + 1) / 8
            z = to_mpf(check_radius) * mp.expj(ang)
            if not mp.re(maps.lambda2(z)) > 0:
                raise BranchError("lambda_2 leaves the right half plane on the working disk")
    return maps


def lambda_continuity(maps, x, eps="1e-10"):
    """|lambda_k(x + i eps) - lambda_k(x - i eps)| for k = 1, 2 at real x."""
    eps = to_mpf(eps)
    up = lambda_functions(mp.mpc(x, eps), maps)
    down = lambda_functions(mp.mpc(x, -eps), maps)
    return abs(up[0] - down[0]), abs(up[1] - down[1])


# ------------------------------------------------------------------ conformal map and energy


def riemann_map(xi, a):
    """z(xi) = 4a xi^3 / (2(a+1) xi^3 + 3(a-1) xi^2 - (a-1))."""
    xi = to_mpc(xi)
    a = to_mpf(a)
    den = 2 * (a + 1) * xi**3 + 3 * (a - 1) * xi**2 - (a - 1)
    if den == 0:
        raise DomainError(f"xi={mp.nstr(xi, 10)} is a pole of the rational map")
    val = 4 * a * xi**3 / den
    return mp.re(val) if mp.im(val) == 0 else val


def _split_quad(f, pts, order):
    """Integrate f over consecutive breakpoints with every breakpoint mapped to t = 0.

    Each piece is split at its midpoint and integrated in the distance t from
    the nearer breakpoint, with t = h s^6 and Gauss-Legendre in s. The sixth
    power turns |t|^(-1/2), |t|^(-2/3) and |t|^(-1/3) into polynomials in s
    and damps log t to s^5 log s.
    """
    ys, ws = legendre_rule(order, mp.mp.dps)
    nodes = [((y + 1) / 2, w / 2) for y, w in zip(ys, ws)]
    terms = []
    for p, q in zip(pts[:-1], pts[1:]):
        h = (q - p) / 2
        for base, sgn in ((p, 1), (q, -1)):
            for s, w in nodes:
                t = h * s**6
                x = base + sgn * t
                if t == 0 or x in (p, q):
                    continue
                terms.append(6 * h * s**5 * w * f(x, base, t))
    return mp.fsum(terms)


def mutual_energy(nu, mu, support_nu, support_mu, digits=20, order=24):
    """I(nu, mu) = double integral of log(1/|x-y|) for densities on the given breakpoints.

    Runs with 10 guard digits; the densities lose accuracy near hard edges
    at the bare working precision.
    """
    with mp.workdps(digits + 10):
        smu = [to_mpf(v) for v in support_mu]
        snu = [to_mpf(v) for v in support_nu]

        def pot(x):
            if smu[0] < x < smu[-1]:
                pts = sorted(set(smu + [x]))
            else:
                # geometric breakpoints resolve log|x - y| when x sits just outside
                b, nxt, sgn = (smu[0], smu[1], 1) if x <= smu[0] else (smu[-1], smu[-2], -1)
                extra, d = [], abs(x - b)
                while 0 < d < abs(nxt - b) / 2:
                    extra.append(b + sgn * d)
                    d *= 4
                pts = sorted(set(smu + extra))

            def inner(y, base, t):
                return -mp.log(t if base == x else abs(x - y)) * mu(y)

            return _split_quad(inner, pts, order)

        val = _split_quad(lambda x, base, t: pot(x) * nu(x), snu, order)
    with mp.workdps(digits):
        return +val


def energy(psi1, psi2, support1, support2, digits=20, order=24):
    """E = I(mu1) + I(mu1, mu2) + I(mu2) for densities psi1 on support1 and psi2 on support2.

    Supports are ascending breakpoint lists (endpoints plus any interior
    points where the density is not smooth).
    """
    i11 = mutual_energy(psi1, psi1, support1, support1, digits, order)
    i12 = mutual_energy(psi1, psi2, support1, support2, digits, order)
    i22 = mutual_energy(psi2, psi2, support2, support2, digits, order)
    return i11 + i12 + i22


def equilibrium_densities(a, digits=DEFAULT_DIGITS, curve=None):
    """(psi1, support1, psi2, support2) ready for ``energy``."""
    curve = curve or curve_constants(a, digits)
    psi1, _, _ = _psi_fast(1, curve)
    psi2, _, _ = _psi_fast(2, curve)
    return psi1, _breakpoints(1, curve), psi2, _breakpoints(2, curve)


def density_profile(a, npts=101, digits=DEFAULT_DIGITS, curve=None):
    """Rows (x, psi1 or None, psi2 or None) on uniform interior grids of both intervals."""
    curve = curve or curve_constants(a, digits)
    rows = []
    with mp.workdps(digits):
        for j in (1, 2):
            lo, hi = _interval(j, curve)
            for k in range(1, npts):
                x = lo + (hi - lo) * mp.mpf(k) / npts
                v = density(j, x, None, digits, curve)
                rows.append((x, v, None) if j == 1 else (x, None, v))
    return rows


def edge_exponent_check(j, a, digits=DEFAULT_DIGITS, curve=None, points=(1e-4, 1e-6, 1e-8)):
    """psi_j(x) |x|^e at points approaching 0 from inside interval j.

    e = 1/3 in the symmetric case a = -1 and 2/3 otherwise, so the returned
    values settle to a finite nonzero limit.
    """
    curve = curve or curve_constants(a, digits)
    sgn = -1 if j == 1 else 1
    out = []
    with mp.workdps(digits):
        e = mp.mpf(1) / 3 if curve.a == -1 else mp.mpf(2) / 3
        for d in points:
            x = sgn * to_mpf(d)
            out.append(density(j, x, None, digits, curve) * abs(x) ** e)
    return out


__all__ = [
    "BranchValues",
    "CurveData",
    "PhaseMaps",
    "PotentialData",
    "Tracker",
    "boundary_values",
    "branch_identity_residuals",
    "cubic_residuals",
    "cubic_roots",
    "curve_constants",
    "density",
    "density_profile",
    "edge_exponent_check",
    "energy",
    "equilibrium_densities",
    "lagrange_sum_expected",
    "lambda_continuity",
    "lambda_functions",
    "local_constants",
    "log_potential",
    "mass",
    "mutual_energy",
    "phase_maps",
    "phi_from_g",
    "phi_integral",
    "potentials_and_constants",
    "potentials_at_zero",
    "riemann_map",
    "sign_changes",
    "variational_deviation",
    "zeta_branches",
]
