"""Gauss-Jacobi rules in arbitrary precision.

Nodes come from double-precision guesses (scipy) polished by Newton's method on
the monic three-term recurrence; weights use the Christoffel-type formula
``h_{m-1} / (P_m'(y) P_{m-1}(y))``.
"""

from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import mpmath as mp
from scipy.special import roots_jacobi

from ._precision import to_mpf
from .errors import AccuracyError, ValidationError


@dataclass(frozen=True)
class QuadratureRule:
    """m-point rule for the weight (x-lo)^p (hi-x)^q on (lo, hi)."""

    lo: object
    hi: object
    p: object
    q: object
    nodes: tuple
    weights: tuple

    @property
    def order(self):
        return len(self.nodes)

    def integrate(self, f):
        return mp.fsum(w * f(x) for x, w in zip(self.nodes, self.weights))


def _recurrence(alpha, beta, m):
    """Monic Jacobi recurrence on [-1,1] for (1-y)^alpha (1+y)^beta.

    Returns (a_k, b_k) for k < m, with b_0 the total mass.
    """
    ab = alpha + beta
    a = []
    b = []
    for k in range(m):
        s = 2 * k + ab
        if k == 0:
            a.append((beta - alpha) / (ab + 2))
            b.append(mp.power(2, ab + 1) * mp.gamma(alpha + 1) * mp.gamma(beta + 1) / mp.gamma(ab + 2))
        else:
            a.append((beta * beta - alpha * alpha) / (s * (s + 2)) if s != 0 else mp.mpf(0))
            if k == 1:
                b.append(4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab)))
            else:
                b.append(4 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1) * (s - 1)))
    return a, b


def _to_mpfr(x):
    sign, man, exp, _bc = mp.mpf(x)._mpf_
    if not man:
        return gmpy2.mpfr(0)
    value = gmpy2.mpfr(man) * gmpy2.exp2(exp)
    return -value if sign else value


def _to_mpf(x):
    if x == 0:
        return mp.mpf(0)
    num, den = x.as_integer_ratio()
    return mp.mpf(int(num)) / int(den)


def _newton_nodes(guesses, a, b, m, dps):
    """Polish all nodes with Newton on the recurrence; gmpy2 keeps this fast."""
    bits = int(dps * 3.33) + 16
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        ag = [_to_mpfr(v) for v in a]
        bg = [_to_mpfr(v) for v in b]
        bg[0] = gmpy2.mpfr(0)
        tol = gmpy2.mpfr(2) ** (-(bits - 8))
        out = []
        for g in guesses:
            y = gmpy2.mpfr(float(g))
            for _ in range(80):
                p_prev, p = gmpy2.mpfr(0), gmpy2.mpfr(1)
                d_prev, d = gmpy2.mpfr(0), gmpy2.mpfr(0)
                for k in range(m):
                    t = y - ag[k]
                    p_next = t * p - bg[k] * p_prev
                    d_next = p + t * d - bg[k] * d_prev
                    p_prev, p = p, p_next
                    d_prev, d = d, d_next
                step = p / d
                y -= step
                if abs(step) <= tol * (1 + abs(y)):
                    break
            else:
                raise AccuracyError(f"Newton polish of Gauss-Jacobi node failed (m={m})")
            # P_m'(y) and P_{m-1}(y) at the polished node, for the weights
            p_prev, p = gmpy2.mpfr(0), gmpy2.mpfr(1)
            d_prev, d = gmpy2.mpfr(0), gmpy2.mpfr(0)
            for k in range(m):
                t = y - ag[k]
                p_next = t * p - bg[k] * p_prev
                d_next = p + t * d - bg[k] * d_prev
                p_prev, p = p, p_next
                d_prev, d = d, d_next
            out.append((y, d * p_prev))
    return [(_to_mpf(y), _to_mpf(dp)) for y, dp in out]


@lru_cache(maxsize=256)
def _reference_rule(alpha_s, beta_s, m, dps):
    """Rule on [-1,1]; parameters passed as strings so the cache key is exact."""
    work = dps + 10
    with mp.workdps(work):
        alpha = mp.mpf(alpha_s)
        beta = mp.mpf(beta_s)
        a, b = _recurrence(alpha, beta, m)
        guesses, _ = roots_jacobi(m, float(alpha), float(beta))
        h_prev = mp.fprod(b[:m])  # squared norm of P_{m-1}
        polished = _newton_nodes(guesses, a, b, m, work)
        pairs = sorted((y, h_prev / dp) for y, dp in polished)
        nodes = tuple(y for y, _ in pairs)
        weights = tuple(w for _, w in pairs)
        for u, v in zip(nodes, nodes[1:]):
            if not u < v:
                raise AccuracyError(f"Gauss-Jacobi nodes collapsed during refinement (m={m})")
        return nodes, weights


def gauss_jacobi_rule(interval, p, q, m, digits=None):
    """Gauss rule for (x-lo)^p (hi-x)^q on (lo, hi) with m nodes.

    Exact for polynomials of degree up to 2m-1.  ``digits`` defaults to the
    current mpmath precision.
    """
    lo, hi = interval
    if m < 1:
        raise ValidationError("rule order m must be at least 1")
    if digits is None:
        digits = mp.mp.dps
    with mp.workdps(digits + 10):
        lo, hi, p, q = (to_mpf(v) for v in (lo, hi, p, q))
        if not lo < hi:
            raise ValidationError("interval must satisfy lo < hi")
        if p <= -1 or q <= -1:
            raise ValidationError("Jacobi exponents must exceed -1")
        # (x-lo)^p (hi-x)^q with x = lo + (hi-lo)(1+y)/2 is (1-y)^q (1+y)^p up to scale
        ys, ws = _reference_rule(mp.nstr(q, digits + 15), mp.nstr(p, digits + 15), int(m), int(digits))
        half = (hi - lo) / 2
        scale = half ** (p + q + 1)
        nodes = tuple(lo + half * (1 + y) for y in ys)
        weights = tuple(w * scale for w in ws)
    return QuadratureRule(lo, hi, p, q, nodes, weights)


@lru_cache(maxsize=64)
def legendre_rule(m, dps):
    """Gauss-Legendre nodes and weights on [-1, 1] (cached)."""
    return _reference_rule("0", "0", int(m), int(dps))


def gl_panel(f, lo, hi, m, dps):
    """m-point Gauss-Legendre approximation of the integral of f over [lo, hi]."""
    ys, ws = legendre_rule(m, dps)
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    return half * mp.fsum(w * f(mid + half * y) for y, w in zip(ys, ws))
