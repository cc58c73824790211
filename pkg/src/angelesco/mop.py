"""Type II multiple orthogonal polynomials for the two-interval weight pair.

Two independent constructions are provided:

* ``solve_mop`` builds and solves the moment system in the monomial basis,
  exactly over the rationals when the data allow it and otherwise in high
  precision floating point;
* ``classical_pnn`` evaluates the closed double-sum representation valid for
  the weight |x-a|^alpha |x|^beta |x-1|^gamma on both intervals.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
import mpmath as mp

from ._precision import default_digits, to_mpc, to_mpf
from .errors import AccuracyError, ConditioningError, InvariantError, ValidationError
from .quadrature import QuadratureRule, gauss_jacobi_rule
from .weights import AnalyticFactor, ScalingParams, WeightParams, a_n, is_rational

__all__ = [
    "MultiIndex",
    "Polynomial",
    "QuadratureRule",
    "gauss_jacobi_rule",
    "modified_moment",
    "solve_mop",
    "classical_pnn",
    "classical_pnn_coeffs",
    "poly_zeros",
    "eval_scaled",
    "mop_digits",
]

RESIDUAL_GUARD = 10
MIN_ACHIEVED_DIGITS = 30


@dataclass(frozen=True)
class MultiIndex:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0 or int(self.n1) != self.n1 or int(self.n2) != self.n2:
            raise ValidationError(f"multi-index entries must be nonnegative integers, got {self}")

    @property
    def degree(self):
        return self.n1 + self.n2

    def count(self, j):
        return self.n1 if j == 1 else self.n2


def _index(idx):
    if isinstance(idx, MultiIndex):
        return idx
    if isinstance(idx, int):
        return MultiIndex(idx, idx)
    return MultiIndex(*idx)


@dataclass(frozen=True)
class Polynomial:
    """Monic polynomial with ascending coefficients.

    ``exact`` marks Fraction coefficients; ``achieved_digits`` is the
    estimated number of correct significant digits (None when exact).
    """

    coeffs: tuple
    index: MultiIndex
    digits: int
    exact: bool = False
    achieved_digits: object = None

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def mp_coeffs(self, digits=None):
        with mp.workdps(digits or self.digits):
            return [to_mpf(c) for c in self.coeffs]

    def derivative_at(self, z):
        acc = 0
        n = self.degree
        for k in range(n, 0, -1):
            acc = acc * z + k * self.coeffs[k]
        return acc

    def to_json(self):
        if self.exact:
            coeffs = [str(c) for c in self.coeffs]
        else:
            with mp.workdps(self.digits):
                coeffs = [mp.nstr(c, self.digits, strip_zeros=False) for c in self.coeffs]
        return {"index": [self.index.n1, self.index.n2], "digits": self.digits, "coeffs": coeffs}


def mop_digits(degree):
    """Default working digits for a moment system of the given total degree."""
    return default_digits(max(160, 3 * degree + 64))


# ---------------------------------------------------------------- moments

def _split_factor(p, j):
    """Jacobi exponents on interval j, with power roots at an endpoint folded in.

    Returns (p_lo, p_hi, remainder) where remainder is a list of (root, exponent)
    pairs strictly away from the interval, a callable, or None.
    """
    lo, hi = p.interval(j)
    e_lo, e_hi = p.jacobi_exponents(j)
    h = p.factor(j)
    if h.kind == "callable":
        return e_lo, e_hi, h
    rest = []
    for r, e in h.factors:
        if e == 0:
            continue
        if r == lo:
            e_lo = e_lo + e
        elif r == hi:
            e_hi = e_hi + e
        else:
            rest.append((r, e))
    return e_lo, e_hi, tuple(rest)


def _nodes_for(digits, lo, hi, remainder):
    """Rule order estimate from the Bernstein ellipse through the nearest singularity."""
    if isinstance(remainder, AnalyticFactor):
        dist = float(remainder.radius)
        u = 1 + 2 * dist / float(hi - lo)
    elif not remainder:
        return 0
    else:
        u = min(abs(2 * float(r) - float(lo) - float(hi)) / float(hi - lo) for r, _ in remainder)
    rho = u + math.sqrt(max(u * u - 1, 1e-300))
    return int(math.ceil(digits * math.log(10) / (2 * math.log(rho)))) + 4


def _moment_table(p, j, kmax, digits):
    """Moments 0..kmax of w_j via Gauss-Jacobi with refinement.

    Tables are computed for kmax rounded up to a multiple of 32 so that a
    sweep over degrees reuses both the rules and the moments.
    """
    return _moment_table_padded(p, j, 32 * (kmax // 32 + 1) - 1, digits)[: kmax + 1]


def _ladder(m):
    return 16 * ((m + 15) // 16)


@lru_cache(maxsize=128)
def _moment_table_padded(p, j, kmax, digits):
    lo, hi = p.interval(j)
    e_lo, e_hi, remainder = _split_factor(p, j)
    work = digits + 10
    with mp.workdps(work):
        h = p.factor(j)
        base = kmax // 2 + 1
        extra = _nodes_for(work, lo, hi, remainder)
        c = to_mpf(h.c) if h.kind != "callable" else mp.mpf(1)

        def table(m):
            rule = gauss_jacobi_rule((lo, hi), e_lo, e_hi, m, work)
            rows = [mp.mpf(0)] * (kmax + 1)
            for x, w in zip(rule.nodes, rule.weights):
                if isinstance(remainder, AnalyticFactor):
                    r = mp.re(remainder.func(x))
                else:
                    r = c
                    for root, e in remainder:
                        r *= abs(x - to_mpf(root)) ** to_mpf(e)
                wx = w * r
                for k in range(kmax + 1):
                    rows[k] += wx
                    wx *= x
            return rows

        if extra == 0:
            return tuple(table(base))
        m = _ladder(base + extra)
        current = table(m)
        for _ in range(5):
            m2 = _ladder(m + max(8, m // 4))
            refined = table(m2)
            scale = max(abs(v) for v in refined)
            diff = max(abs(u - v) for u, v in zip(current, refined))
            if diff <= scale * mp.mpf(10) ** (-(digits + 2)):
                return tuple(refined)
            m, current = m2, refined
        achieved = int(-mp.log10(diff / scale)) if diff else digits
        raise AccuracyError(f"moment quadrature did not converge on interval {j}", achieved)


def _rational_moment_ratios(p, j, kmax):
    """Moments of w_j divided by the zeroth moment, exactly (constant h, rational data).

    On [0,1]:  int x^(k+beta) (1-x)^gamma  = B(k+beta+1, gamma+1)
    On [a,0]:  int x^k (x-a)^alpha |x|^beta = a^k |a|^(alpha+beta+1) B(k+beta+1, alpha+1)
    and B(k+s, t)/B(s, t) = prod_{i<k} (s+i)/(s+t+i).
    """
    a = Fraction(p.a)
    alpha, beta, gamma = (Fraction(v) for v in (p.alpha, p.beta, p.gamma))
    s = beta + 1
    t = (alpha if j == 1 else gamma) + 1
    scale = a if j == 1 else Fraction(1)
    out = [Fraction(1)]
    for k in range(kmax):
        out.append(out[-1] * scale * (s + k) / (s + t + k))
    return out


def modified_moment(j, k, p, digits=None):
    """Integral of x^k w_j(x) over interval j."""
    if k < 0:
        raise ValidationError("moment order must be nonnegative")
    digits = digits or default_digits(64)
    with mp.workdps(digits):
        if p.factor(j).is_constant and p.factor(j).kind != "callable":
            lo, hi = p.interval(j)
            e_lo, e_hi, _ = _split_factor(p, j)
            e_lo, e_hi = to_mpf(e_lo), to_mpf(e_hi)
            c = to_mpf(p.factor(j).c)
            if j == 2:
                return +(c * mp.beta(k + e_lo + 1, e_hi + 1))
            a = to_mpf(p.a)
            # (x-a)^alpha |x|^beta x^k on [a,0], with x = a u
            return +(c * a**k * (-a) ** (e_lo + e_hi + 1) * mp.beta(k + e_hi + 1, e_lo + 1))
        return +_moment_table(p, j, k, digits)[k]


# ---------------------------------------------------------------- linear algebra

def _solve_fraction(matrix, rhs):
    """Gaussian elimination over the rationals with integer row scaling."""
    n = len(rhs)
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    # clear denominators row by row so elimination runs on integers (fraction-free Bareiss)
    int_rows = []
    for r in rows:
        den = 1
        for v in r:
            den = den * v.denominator // math.gcd(den, v.denominator)
        int_rows.append([gmpy2.mpz(v.numerator * (den // v.denominator)) for v in r])
    m = int_rows
    prev = gmpy2.mpz(1)
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            raise ConditioningError("singular moment system")
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
        mk = m[k]
        pk = mk[k]
        for i in range(k + 1, n):
            mi = m[i]
            f = mi[k]
            for c in range(k + 1, n + 1):
                mi[c] = (pk * mi[c] - f * mk[c]) // prev
            mi[k] = gmpy2.mpz(0)
        prev = pk
    x = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        acc = Fraction(int(m[k][n]))
        for c in range(k + 1, n):
            acc -= int(m[k][c]) * x[c]
        x[k] = acc / int(m[k][k])
    return x


def _system(index, moments1, moments2):
    N = index.degree
    matrix = []
    rhs = []
    for count, mom in ((index.n1, moments1), (index.n2, moments2)):
        for k in range(count):
            matrix.append([mom[i + k] for i in range(N)])
            rhs.append(-mom[N + k])
    return matrix, rhs


def _residuals(coeffs, index, moments1, moments2):
    """Relative orthogonality residuals |int P x^k w_j| / (sum of term magnitudes)."""
    N = index.degree
    worst = mp.mpf(0)
    for count, mom in ((index.n1, moments1), (index.n2, moments2)):
        for k in range(count):
            terms = [coeffs[i] * mom[i + k] for i in range(N)] + [mom[N + k]]
            total = abs(mp.fsum(terms))
            scale = mp.fsum(abs(t) for t in terms)
            worst = max(worst, total / scale)
    return worst


def _float_solve(index, p, digits):
    N = index.degree
    kmax = N + max(index.n1, index.n2)
    with mp.workdps(digits + 10):
        m1 = _moments_list(p, 1, kmax, digits)
        m2 = _moments_list(p, 2, kmax, digits)
        # normalize each block so both intervals carry comparable weight
        m1 = [v / m1[0] for v in m1]
        m2 = [v / m2[0] for v in m2]
        matrix, rhs = _system(index, m1, m2)
        sol = mp.lu_solve(mp.matrix(matrix), mp.matrix(rhs))
        coeffs = [sol[i] for i in range(N)] + [mp.mpf(1)]
        res = _residuals(coeffs, index, m1, m2)
    return coeffs, res


def _moments_list(p, j, kmax, digits):
    h = p.factor(j)
    if h.is_constant and h.kind != "callable":
        return [modified_moment(j, k, p, digits + 10) for k in range(kmax + 1)]
    return list(_moment_table(p, j, kmax, digits))


def solve_mop(idx, p, digits=None, exact=None):
    """Monic type II multiple orthogonal polynomial P_{n1,n2} for the weights ``p``.

    ``exact=None`` picks the rational path whenever it applies (rational a and
    exponents, constant factors).  The floating path solves at ``digits``
    (default ``mop_digits``) and re-solves with 20 extra digits to estimate the
    digits actually achieved; fewer than 30 raises ConditioningError.
    """
    index = _index(idx)
    N = index.degree
    if N == 0:
        return Polynomial((Fraction(1),), index, 0, exact=True)
    can_exact = p.is_rational and p.has_constant_factors
    if exact and not can_exact:
        raise ValidationError("exact solve needs rational a, exponents and constant factors")
    if exact is None:
        exact = can_exact
    if exact:
        kmax = N + max(index.n1, index.n2)
        m1 = _rational_moment_ratios(p, 1, kmax)
        m2 = _rational_moment_ratios(p, 2, kmax)
        matrix, rhs = _system(index, m1, m2)
        coeffs = tuple(_solve_fraction(matrix, rhs)) + (Fraction(1),)
        return Polynomial(coeffs, index, digits or mop_digits(N), exact=True)

    digits = digits or mop_digits(N)
    coeffs, res = _float_solve(index, p, digits)
    tol = mp.mpf(10) ** (-(digits - RESIDUAL_GUARD))
    if res > tol:
        raise ConditioningError(
            f"orthogonality residual {mp.nstr(res, 3)} exceeds 1e-{digits - RESIDUAL_GUARD}",
            achieved_digits=int(-mp.log10(res)),
        )
    check, _ = _float_solve(index, p, digits + 20)
    with mp.workdps(digits + 10):
        scale = max(abs(c) for c in check)
        err = max(abs(u - v) for u, v in zip(coeffs, check))
        achieved = digits if err == 0 else min(digits, int(mp.floor(-mp.log10(err / scale))))
    if achieved < MIN_ACHIEVED_DIGITS:
        raise ConditioningError(
            f"moment system kept only {achieved} digits at {digits}-digit precision; raise digits",
            achieved_digits=achieved,
        )
    with mp.workdps(digits):
        coeffs = tuple(+c for c in coeffs)
    return Polynomial(coeffs, index, digits, exact=False, achieved_digits=achieved)


# ---------------------------------------------------------------- explicit formula

def _binomials(x, count):
    """Generalized binomials C(x, k) for k = 0..count via the product formula."""
    out = [x * 0 + 1]
    for k in range(count):
        out.append(out[-1] * (x - k) / (k + 1))
    return out


def _field(values, digits):
    """Return (converter, exact?) for a list of parameters."""
    if all(is_rational(v) or isinstance(v, Fraction) for v in values):
        return Fraction, True
    return to_mpf, False


def _ja_setup(n, alpha, beta, gamma, a, digits):
    conv, exact = _field([alpha, beta, gamma, a], digits)
    alpha, beta, gamma, a = (conv(v) for v in (alpha, beta, gamma, a))
    ca = _binomials(n + alpha, n)
    cb = _binomials(n + beta, n)
    cg = _binomials(n + gamma, n)
    norm = _binomials(3 * n + alpha + beta + gamma, n)[n]
    return ca, cb, cg, norm, a, exact


def classical_pnn(n, alpha, beta, gamma, a, z, digits=None):
    """P_{n,n}(z) for |x-a|^alpha |x|^beta |x-1|^gamma via the explicit double sum.

    Exact (Fraction) when every input is rational and z is real rational;
    otherwise evaluated at ``digits`` (default max(64, 2n+100)).
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    if n == 0:
        return Fraction(1) if is_rational(z) else mp.mpf(1)
    digits = digits or default_digits(max(64, 2 * n + 100))
    inputs = [alpha, beta, gamma, a, z]
    exact = all(is_rational(v) for v in inputs)
    with mp.workdps(digits):
        ca, cb, cg, norm, a_v, exact_params = _ja_setup(n, alpha, beta, gamma, a, digits)
        if exact:
            zz = Fraction(z)
        else:
            zz = to_mpc(z) if isinstance(z, (complex, mp.mpc)) else to_mpf(z)
            if exact_params:
                ca = [to_mpf(v) for v in ca]
                cb = [to_mpf(v) for v in cb]
                cg = [to_mpf(v) for v in cg]
                norm = to_mpf(norm)
                a_v = to_mpf(a_v)
        if zz == 0:
            # only k = 0, j = n survives
            value = cb[n] * (-a_v) ** n * (-1) ** n / norm
            return value if exact else +value
        za = _powers(zz - a_v, n)
        z0 = _powers(zz, n)
        z1 = _powers(zz - 1, n)
        u = [cb[j] * z0[n - j] * z1[j] for j in range(n + 1)]
        total = 0
        for k in range(n + 1):
            inner = 0
            for j in range(n - k + 1):
                inner += u[j] * cg[n - k - j]
            total += ca[k] * za[n - k] * z1[k] * inner
        value = total / norm
        return value if exact else +value


def _powers(x, n):
    out = [x * 0 + 1]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, u in enumerate(p):
        if u == 0:
            continue
        for j, v in enumerate(q):
            out[i + j] += u * v
    return out


def _poly_pow(base, n):
    out = [base[0] * 0 + 1]
    for _ in range(n):
        out = _poly_mul(out, base)
    return out


def classical_pnn_coeffs(n, alpha, beta, gamma, a, digits=None):
    """Ascending coefficients of the explicit P_{n,n} as a Polynomial."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    index = MultiIndex(n, n)
    if n == 0:
        return Polynomial((Fraction(1),), index, 0, exact=True)
    digits = digits or mop_digits(2 * n)
    with mp.workdps(digits + 10):
        ca, cb, cg, norm, a_v, exact = _ja_setup(n, alpha, beta, gamma, a, digits)
        one = a_v * 0 + 1
        lin_a = [-a_v, one]
        lin_0 = [0 * one, one]
        lin_1 = [-one, one]
        pa = [_poly_pow(lin_a, i) for i in range(n + 1)]
        p1 = [_poly_pow(lin_1, i) for i in range(2 * n + 1)]
        total = [0 * one] * (2 * n + 1)
        for k in range(n + 1):
            for j in range(n - k + 1):
                c = ca[k] * cb[j] * cg[n - k - j]
                if c == 0:
                    continue
                # (z-a)^(n-k) z^(n-j) (z-1)^(k+j)
                prod = _poly_mul(pa[n - k], p1[k + j])
                shift = n - j
                for i, v in enumerate(prod):
                    total[i + shift] += c * v
        coeffs = [v / norm for v in total[: 2 * n + 1]]
        lead = coeffs[2 * n]
        if exact:
            if lead != 1:
                raise InvariantError("explicit formula is not monic")
            return Polynomial(tuple(coeffs), index, digits, exact=True)
        coeffs = tuple(+c for c in coeffs)
    return Polynomial(coeffs, index, digits, exact=False, achieved_digits=digits)


# ---------------------------------------------------------------- zeros

def _horner_mpfr(coeffs, x):
    acc = gmpy2.mpfr(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_zeros(P, p, digits=None):
    """Zeros of P on (a, 0) and (0, 1), found by a sign scan plus bisection.

    The scan uses 8*deg^2 equispaced points per interval (quadrupled once if
    the count comes out short).  Raises InvariantError unless exactly n1 and
    n2 simple zeros are found.
    """
    N = P.degree
    if N == 0:
        return (), ()
    digits = digits or (P.digits if not P.exact else mop_digits(N))
    bits = int(digits * 3.33) + 16
    with mp.workdps(digits + 10):
        mp_coeffs = [to_mpf(c) for c in P.coeffs]
        a = to_mpf(p.a)
    out = []
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        coeffs = [gmpy2.mpfr(mp.nstr(c, digits + 10)) for c in mp_coeffs]
        a_g = gmpy2.mpfr(mp.nstr(a, digits + 10))
        for j, (lo, hi) in enumerate(((a_g, gmpy2.mpfr(0)), (gmpy2.mpfr(0), gmpy2.mpfr(1))), start=1):
            want = P.index.count(j)
            found = []
            for grid in (8 * N * N, 32 * N * N):
                found = _scan(coeffs, lo, hi, grid, bits)
                if len(found) == want:
                    break
            if len(found) != want:
                raise InvariantError(f"found {len(found)} zeros on interval {j}, expected {want}")
            for x in found:
                if _horner_mpfr(_derivative(coeffs), x) == 0:
                    raise InvariantError(f"multiple zero at {x} on interval {j}")
            out.append(tuple(_to_mp(x, digits) for x in found))
    return out[0], out[1]


def _derivative(coeffs):
    return [k * c for k, c in enumerate(coeffs)][1:]


def _to_mp(x, digits):
    with mp.workdps(digits):
        return +mp.mpf(str(x))


def _scan(coeffs, lo, hi, grid, bits):
    step = (hi - lo) / (grid + 1)
    prev_x = lo + step
    prev_v = _horner_mpfr(coeffs, prev_x)
    zeros = []
    for i in range(2, grid + 1):
        x = lo + step * i
        v = _horner_mpfr(coeffs, x)
        if v == 0:
            zeros.append(x)
        elif prev_v != 0 and (v > 0) != (prev_v > 0):
            zeros.append(_bisect(coeffs, prev_x, x, prev_v, bits))
        prev_x, prev_v = x, v
    return zeros


def _bisect(coeffs, lo, hi, v_lo, bits):
    for _ in range(bits + 8):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        v = _horner_mpfr(coeffs, mid)
        if v == 0:
            return mid
        if (v > 0) == (v_lo > 0):
            lo, v_lo = mid, v
        else:
            hi = mid
    return (lo + hi) / 2


# ---------------------------------------------------------------- scaled evaluation

def jacobi_angelesco_exponents(p):
    """(alpha, beta, gamma) if ``p`` has the explicit-formula form, else None.

    Constant multiples of the factors do not change monic orthogonal
    polynomials, so any positive constant is accepted.
    """
    def matches(h, root, expected):
        if h.kind == "constant":
            return expected == 0
        if h.kind != "power":
            return False
        nonzero = [(r, e) for r, e in h.factors if e != 0]
        if expected == 0:
            return not nonzero
        return len(nonzero) == 1 and nonzero[0][0] == root and nonzero[0][1] == expected

    if matches(p.h1, 1, p.gamma) and matches(p.h2, p.a, p.alpha):
        return p.alpha, p.beta, p.gamma
    return None


def eval_scaled(n, z, s, p_base, digits=None):
    """P_{n,n}(z / (sqrt(2) n^(3/2)); a_n) with a_n from the scaling parameters.

    Uses the explicit double sum (at max(digits, 2n+100) digits, self-checked
    against a re-evaluation with 30 more digits) when ``p_base`` has the
    Jacobi-Angelesco form, and the moment system otherwise.  The endpoint of
    ``p_base`` is replaced by a_n.
    """
    if not isinstance(s, ScalingParams):
        s = ScalingParams(*s)
    if s.n != n:
        raise ValidationError("ScalingParams.n must equal n")
    exps = jacobi_angelesco_exponents(p_base)
    if exps is not None:
        digits = max(digits or 0, default_digits(2 * n + 100))

        def value(d):
            with mp.workdps(d):
                an = a_n(s)
                if is_rational(z) and z == 0:
                    x = 0
                else:
                    x = to_mpc(z) / (mp.sqrt(2) * mp.mpf(n) ** mp.mpf(1.5))
                    if mp.im(x) == 0:
                        x = mp.re(x)
                return classical_pnn(n, *exps, an, x, d)

        v = value(digits)
        check = value(digits + 30)
        with mp.workdps(digits + 30):
            v_mp = mp.mpc(to_mpf(v)) if isinstance(v, Fraction) else mp.mpc(v)
            c_mp = mp.mpc(to_mpf(check)) if isinstance(check, Fraction) else mp.mpc(check)
            rel = abs(v_mp - c_mp) / abs(c_mp) if c_mp != 0 else abs(v_mp)
        if rel > mp.mpf(10) ** -30:
            raise AccuracyError(f"scaled evaluation self-check failed (rel {mp.nstr(rel, 3)})")
        return v
    with mp.workdps(digits or mop_digits(2 * n)):
        an = a_n(s)
        q = p_base.with_a(an if not isinstance(an, int) else an)
        P = solve_mop((n, n), q, digits)
        with mp.workdps(P.digits):
            x = to_mpc(z) / (mp.sqrt(2) * mp.mpf(n) ** mp.mpf(1.5))
            return +P(x) if not P.exact else P(x)
