import os
from contextlib import contextmanager
from fractions import Fraction

import mpmath as mp

ENV_DIGITS = "ANGELESCO_DIGITS"


def default_digits(fallback):
    """Digits from the environment override, else ``fallback``."""
    raw = os.environ.get(ENV_DIGITS)
    if raw is None or raw.strip() == "":
        return fallback
    value = int(raw)
    if value < 15:
        raise ValueError(f"{ENV_DIGITS} must be at least 15, got {value}")
    return value


@contextmanager
def working(digits):
    """Run a block at ``digits`` significant digits (never lowering current precision)."""
    with mp.workdps(max(int(digits), 15)):
        yield


def to_mpf(x):
    """Convert ints, floats, Fractions and strings to mpf at the current precision."""
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, (int, float)):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def to_mpc(z):
    if isinstance(z, mp.mpc):
        return z
    if isinstance(z, complex):
        return mp.mpc(z.real, z.imag)
    return mp.mpc(to_mpf(z))


def decimal_string(v, digits):
    """Decimal text for ints, Fractions, mpf and mpc (complex as 're+imj')."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if hasattr(v, "numerator") and hasattr(v, "denominator") and not isinstance(v, float):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        v = mp.mpc(v.real, v.imag)
    if isinstance(v, mp.mpc):
        re = mp.nstr(v.real, digits, strip_zeros=False)
        im = mp.nstr(abs(v.imag), digits, strip_zeros=False)
        sign = "-" if v.imag < 0 else "+"
        return f"{re}{sign}{im}j"
    if not isinstance(v, mp.mpf):
        v = mp.mpf(v)
    return mp.nstr(v, digits, strip_zeros=False)


def parse_number(text, exact=True):
    """Inverse of ``decimal_string``: int, Fraction, mpf or mpc (suffix j or i).

    Real decimal text becomes an exact Fraction unless ``exact`` is false.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty number")
    if s[-1] in "ij":
        body = s[:-1]
        # split at the last sign that is not part of an exponent
        cut = None
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                cut = k
                break
        if cut is None:
            re_part, im_part = "0", body or "1"
        else:
            re_part, im_part = body[:cut], body[cut:]
        if im_part in ("+", "-"):
            im_part += "1"
        # parse at enough precision to keep every digit of the text
        with mp.workdps(max(mp.mp.dps, len(s) + 20)):
            return mp.mpc(mp.mpf(re_part), mp.mpf(im_part))
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    try:
        return int(s)
    except ValueError:
        pass
    if exact:
        try:
            return Fraction(s)
        except ValueError:
            pass
    with mp.workdps(max(mp.mp.dps, len(s) + 20)):
        return mp.mpf(s)
