"""Adaptive Gauss-Legendre integration along piecewise-smooth complex paths.

A path is a list of pieces; each piece maps a real parameter interval to the
complex plane and supplies log(t) with whatever branch the caller wants, so
fractional powers stay continuous along the piece.  The integrand is a
function of (t, log t) returning a list of values, so several related
integrals (for instance all derivative orders) share one set of nodes.
"""

from dataclasses import dataclass

import mpmath as mp

from .errors import AccuracyError
from .quadrature import legendre_rule

PANEL_ORDER = 20
MAX_DEPTH = 40


@dataclass(frozen=True)
class Piece:
    """t(s) for s in [s0, s1]; ``point`` returns (t, log t, dt/ds).

    Radial and arc pieces carry their own continuous argument; horizontal
    lines use the principal logarithm.
    """

    kind: str  # "radial" | "arc" | "hline"
    s0: object
    s1: object
    angle: object = 0  # direction for radial pieces
    radius: object = 1  # radius for arcs, imaginary offset for horizontal lines
    sign: int = 1  # +1 keeps the parameter orientation, -1 reverses it

    def point(self, s):
        if self.kind == "radial":
            e = mp.expj(self.angle)
            t = s * e
            return t, mp.mpc(mp.log(s), self.angle), e
        if self.kind == "hline":
            t = mp.mpc(s, self.radius)
            return t, mp.log(t), mp.mpc(1)
        t = self.radius * mp.expj(s)
        return t, mp.mpc(mp.log(self.radius), s), 1j * t


def _panel(piece, integrand, lo, hi, ys, ws):
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    acc = None
    peak = mp.mpf(0)
    for y, w in zip(ys, ws):
        s = mid + half * y
        t, logt, dt = piece.point(s)
        vals = integrand(t, logt)
        scale = w * half * dt
        if acc is None:
            acc = [v * scale for v in vals]
        else:
            for i, v in enumerate(vals):
                acc[i] += v * scale
        peak = max(peak, abs(vals[0] * dt))
    return acc, peak


def integrate_piece(piece, integrand, tol, order=PANEL_ORDER, dps=None):
    """Adaptive bisection: accept a panel when its GL value matches the sum over its halves."""
    dps = dps or mp.mp.dps
    ys, ws = legendre_rule(order, dps)
    total = None
    peak = mp.mpf(0)
    stack = [(mp.mpf(piece.s0), mp.mpf(piece.s1), None, 0)]
    while stack:
        lo, hi, whole, depth = stack.pop()
        if whole is None:
            whole, pk = _panel(piece, integrand, lo, hi, ys, ws)
            peak = max(peak, pk)
        mid = (lo + hi) / 2
        left, pl = _panel(piece, integrand, lo, mid, ys, ws)
        right, pr = _panel(piece, integrand, mid, hi, ys, ws)
        peak = max(peak, pl, pr)
        halves = [u + v for u, v in zip(left, right)]
        err = max(abs(u - v) for u, v in zip(whole, halves))
        width = abs(hi - lo) / abs(piece.s1 - piece.s0)
        if err <= tol * width or depth >= MAX_DEPTH:
            if depth >= MAX_DEPTH and err > tol * width:
                raise AccuracyError("contour panel refinement did not converge")
            total = halves if total is None else [u + v for u, v in zip(total, halves)]
        else:
            stack.append((mid, hi, right, depth + 1))
            stack.append((lo, mid, left, depth + 1))
    if piece.sign < 0:
        total = [-v for v in total]
    return total, peak


def integrate_path(pieces, integrand, tol, order=PANEL_ORDER):
    total = None
    peak = mp.mpf(0)
    for piece in pieces:
        vals, pk = integrate_piece(piece, integrand, tol, order)
        peak = max(peak, pk)
        total = vals if total is None else [u + v for u, v in zip(total, vals)]
    return total, peak
