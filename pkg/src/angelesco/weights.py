"""Modified Jacobi weights on the touching intervals [a, 0] and [0, 1].

    w1(x) = (x - a)^alpha |x|^beta h1(x)      on [a, 0]
    w2(x) = x^beta (1 - x)^gamma h2(x)        on [0, 1]

with h1, h2 positive and analytic near their intervals.  The continuations
off the real line use principal powers, giving cuts (-inf, a] U [0, inf)
for w1 and (-inf, 0] U [1, inf) for w2.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import mpmath as mp

from ._precision import to_mpc, to_mpf
from .errors import BranchError, DomainError, ValidationError

DEFAULT_DIGITS = 64


def _as_number(value):
    """Keep ints and Fractions exact and parse decimal strings exactly."""
    if isinstance(value, bool):
        raise ValidationError("booleans are not numeric parameters")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        exact = Fraction(value)
        # short dyadics such as -1.5 or 0.25 are kept exact
        return exact if exact.denominator <= 2**16 else value
    if isinstance(value, mp.mpf):
        return value
    raise ValidationError(f"unsupported numeric parameter {value!r}")


def is_rational(value):
    return isinstance(value, (int, Fraction))


@dataclass(frozen=True)
class AnalyticFactor:
    """Positive analytic factor h_j.

    ``kind`` is "constant" (value c), "power" (c times a product of
    |x - r|^p with every r outside the open interval) or "callable"
    (user function, valid within ``radius`` of the interval).
    """

    kind: str
    c: object = 1
    factors: tuple = ()
    func: object = field(default=None, compare=False)
    radius: object = None

    @classmethod
    def constant(cls, c=1):
        return cls("constant", c=_as_number(c))

    @classmethod
    def power(cls, factors, c=1):
        cleaned = tuple((_as_number(r), _as_number(p)) for r, p in factors)
        return cls("power", c=_as_number(c), factors=cleaned)

    @classmethod
    def analytic(cls, func, radius):
        if radius is None or radius <= 0:
            raise ValidationError("callable factors need a positive neighborhood radius")
        return cls("callable", func=func, radius=radius)

    @property
    def is_constant(self):
        return self.kind == "constant" or (self.kind == "power" and all(p == 0 for _, p in self.factors))

    def validate(self, lo, hi):
        if self.kind not in ("constant", "power", "callable"):
            raise ValidationError(f"unknown analytic factor kind {self.kind!r}")
        if self.kind in ("constant", "power") and not self.c > 0:
            raise ValidationError("analytic factor constant must be positive")
        if self.kind == "power":
            for r, _p in self.factors:
                if lo < r < hi:
                    raise ValidationError(f"power factor root {r} lies inside ({lo}, {hi})")
        if self.kind == "callable":
            for t in (0.125, 0.5, 0.875):
                x = lo + (hi - lo) * t
                v = self.func(mp.mpf(x))
                if mp.im(v) != 0 or not mp.re(v) > 0:
                    raise ValidationError("callable analytic factor must be positive on its interval")

    def value(self, x, lo, hi):
        """Value at real x in [lo, hi]."""
        if self.kind == "callable":
            return mp.re(self.func(x))
        out = to_mpf(self.c)
        for r, p in self.factors:
            if p != 0:
                out *= abs(x - to_mpf(r)) ** to_mpf(p)
        return out

    def continued(self, z, lo, hi):
        """Analytic continuation to complex z near [lo, hi]."""
        if self.kind == "callable":
            d = _distance_to_segment(z, lo, hi)
            if d > self.radius:
                raise DomainError(f"z={z} is outside the declared neighborhood of the factor")
            return mp.mpc(self.func(z))
        out = mp.mpc(to_mpf(self.c))
        mid = (to_mpf(lo) + to_mpf(hi)) / 2
        for r, p in self.factors:
            if p == 0:
                continue
            r = to_mpf(r)
            sign = 1 if mid > r else -1
            out *= (sign * (z - r)) ** to_mpf(p)
        return out

    def log_value(self, x, lo, hi):
        return mp.log(self.value(x, lo, hi))

    def to_json(self):
        if self.kind == "constant":
            return {"kind": "constant", "c": _num_str(self.c)}
        if self.kind == "power":
            return {
                "kind": "power",
                "c": _num_str(self.c),
                "factors": [[_num_str(r), _num_str(p)] for r, p in self.factors],
            }
        raise ValidationError("callable analytic factors are not serializable")

    @classmethod
    def from_json(cls, data):
        kind = data.get("kind")
        if kind == "constant":
            return cls.constant(data.get("c", "1"))
        if kind == "power":
            return cls.power([tuple(f) for f in data.get("factors", [])], c=data.get("c", "1"))
        raise ValidationError(f"unsupported analytic factor descriptor {data!r}")


def _num_str(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, mp.mpf):
        return mp.nstr(v, mp.mp.dps)
    return str(v)


def _distance_to_segment(z, lo, hi):
    x = mp.re(z)
    y = mp.im(z)
    lo = to_mpf(lo)
    hi = to_mpf(hi)
    dx = lo - x if x < lo else (x - hi if x > hi else 0)
    return mp.sqrt(dx * dx + y * y)


@dataclass(frozen=True)
class WeightParams:
    a: object
    alpha: object = 0
    beta: object = 0
    gamma: object = 0
    h1: AnalyticFactor = field(default_factory=AnalyticFactor.constant)
    h2: AnalyticFactor = field(default_factory=AnalyticFactor.constant)

    def __post_init__(self):
        for name in ("a", "alpha", "beta", "gamma"):
            object.__setattr__(self, name, _as_number(getattr(self, name)))
        if not self.a < 0:
            raise ValidationError(f"a must be negative, got {self.a}")
        for name in ("alpha", "beta", "gamma"):
            if not getattr(self, name) > -1:
                raise ValidationError(f"{name} must exceed -1, got {getattr(self, name)}")
        self.h1.validate(self.a, 0)
        self.h2.validate(0, 1)

    @classmethod
    def jacobi_angelesco(cls, a, alpha=0, beta=0, gamma=0):
        """Weight |x-a|^alpha |x|^beta |x-1|^gamma on both intervals."""
        a = _as_number(a)
        alpha = _as_number(alpha)
        gamma = _as_number(gamma)
        return cls(
            a,
            alpha,
            beta,
            gamma,
            AnalyticFactor.power([(1, gamma)]),
            AnalyticFactor.power([(a, alpha)]),
        )

    def interval(self, j):
        _check_index(j)
        return (self.a, 0) if j == 1 else (0, 1)

    def jacobi_exponents(self, j):
        """Exponents (p, q) of (x - lo)^p (hi - x)^q on interval j."""
        _check_index(j)
        return (self.alpha, self.beta) if j == 1 else (self.beta, self.gamma)

    def factor(self, j):
        _check_index(j)
        return self.h1 if j == 1 else self.h2

    @property
    def is_rational(self):
        return all(is_rational(v) for v in (self.a, self.alpha, self.beta, self.gamma))

    @property
    def has_constant_factors(self):
        return self.h1.is_constant and self.h2.is_constant

    def with_a(self, a):
        """Same exponents and factor kinds at another endpoint a.

        Power factors whose root sat at the old endpoint move with it.
        """
        def move(h):
            if h.kind != "power":
                return h
            return AnalyticFactor.power([(a if r == self.a else r, p) for r, p in h.factors], c=h.c)

        return WeightParams(a, self.alpha, self.beta, self.gamma, move(self.h1), move(self.h2))

    def to_json(self):
        return {
            "a": _num_str(self.a),
            "alpha": _num_str(self.alpha),
            "beta": _num_str(self.beta),
            "gamma": _num_str(self.gamma),
            "h1": self.h1.to_json(),
            "h2": self.h2.to_json(),
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            data["a"],
            data.get("alpha", "0"),
            data.get("beta", "0"),
            data.get("gamma", "0"),
            AnalyticFactor.from_json(data.get("h1", {"kind": "constant"})),
            AnalyticFactor.from_json(data.get("h2", {"kind": "constant"})),
        )


@dataclass(frozen=True)
class ScalingParams:
    tau: object
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "tau", _as_number(self.tau))


def _check_index(j):
    if j not in (1, 2):
        raise ValidationError(f"interval index must be 1 or 2, got {j}")


def classify_endpoint(j, x, p):
    """'zero', 'finite' or 'infinite' limit of w_j at an endpoint x of interval j."""
    lo, hi = p.interval(j)
    e_lo, e_hi = p.jacobi_exponents(j)
    if x == lo:
        e = e_lo
    elif x == hi:
        e = e_hi
    else:
        raise DomainError(f"{x} is not an endpoint of interval {j}")
    if e > 0:
        return "zero"
    if e < 0:
        return "infinite"
    return "finite"


def eval_weight(j, x, p, digits=DEFAULT_DIGITS):
    """w_j(x) for x in interval j.

    At an exact endpoint the power-law limit is returned (0, +inf, or the
    finite value when the exponent there is 0); see ``classify_endpoint``.
    """
    lo, hi = p.interval(j)
    with mp.workdps(digits):
        x = to_mpf(x)
        lo_m, hi_m = to_mpf(lo), to_mpf(hi)
        if x < lo_m or x > hi_m:
            raise DomainError(f"x={x} lies outside interval {j} = [{lo}, {hi}]")
        e_lo, e_hi = (to_mpf(e) for e in p.jacobi_exponents(j))
        if x == lo_m or x == hi_m:
            kind = classify_endpoint(j, lo if x == lo_m else hi, p)
            if kind == "zero":
                return mp.mpf(0)
            if kind == "infinite":
                return mp.inf
        left = (x - lo_m) ** e_lo if e_lo != 0 else mp.mpf(1)
        right = (hi_m - x) ** e_hi if e_hi != 0 else mp.mpf(1)
        return +(left * right * p.factor(j).value(x, lo, hi))


def continue_weight(j, z, p, digits=DEFAULT_DIGITS):
    """Analytic continuation of w_j to the slit plane."""
    lo, hi = p.interval(j)
    with mp.workdps(digits):
        z = to_mpc(z)
        lo_m, hi_m = to_mpf(lo), to_mpf(hi)
        if mp.im(z) == 0 and (mp.re(z) <= lo_m or mp.re(z) >= hi_m):
            raise BranchError(f"z={z} lies on a branch cut of w_{j}")
        e_lo, e_hi = (to_mpf(e) for e in p.jacobi_exponents(j))
        left = (z - lo_m) ** e_lo if e_lo != 0 else mp.mpc(1)
        right = (hi_m - z) ** e_hi if e_hi != 0 else mp.mpc(1)
        return +(left * right * p.factor(j).continued(z, lo, hi))


def a_n(s, n=None):
    """Double-scaling endpoint a_n = -1 + sqrt(2) tau / sqrt(n).

    Accepts a ScalingParams or (tau, n).  Returns an exact -1 when tau = 0.
    """
    if not isinstance(s, ScalingParams):
        s = ScalingParams(s, n)
    if s.tau == 0:
        return -1
    # a_n < 0  <=>  tau <= 0 or 2 tau^2 < n, decided exactly
    exact_tau = s.tau if isinstance(s.tau, (int, Fraction)) else Fraction(float(s.tau))
    if exact_tau > 0 and 2 * exact_tau * exact_tau >= s.n:
        raise ValidationError(f"a_n is not negative for tau={s.tau}, n={s.n}")
    return -1 + mp.sqrt(2) * to_mpf(s.tau) / mp.sqrt(s.n)
