"""Model special functions of the 3x3 local problem at the touching point.

q1, q2, q3 solve  z q''' - beta q'' - tau q' + q = 0  and are integrals of

    t^(-beta-3) exp(tau/t - 1/(2 t^2) + z t)

with arg t in (0, 2 pi).  Every contour starts (or ends) at t = 0 along a
direction where exp(-1/(2t^2)) is flat, circles at radius r and leaves to
infinity along the direction where z t is negative real:

    q3: out of 0 along arg t = pi,
    q1: out of 0 along arg t = 2 pi (below the cut),
    q2: into 0 along arg t = 0 (above the cut), oriented towards 0.

This realizes the analytic continuation of the q_j to the plane slit along
(-inf, 0].  Derivatives in z multiply the integrand by t.

Q(z) is the entire function

    Q(z) = i * int t^(-beta-1) exp(-z^2/(2t^2) + tau z/t + t) dt

over a loop that comes in from -inf above the negative axis, passes around
the origin clockwise and returns below it (principal powers), normalized by
Q(0) = 2 pi / Gamma(beta+1).
"""

import math
from dataclasses import dataclass, field

import mpmath as mp

from ._precision import to_mpc, to_mpf
from .contour import Piece, integrate_path
from .errors import AccuracyError, BranchError, DomainError

DEFAULT_DIGITS = 50
ASYMPTOTIC_DIGITS = 30
RAY_TOLERANCE = mp.mpf("1e-8")

RAYS = {
    "pi/4": math.pi / 4,
    "3pi/4": 3 * math.pi / 4,
    "-pi/4": -math.pi / 4,
    "-3pi/4": -3 * math.pi / 4,
    "positive": 0.0,
    "negative": math.pi,
}


@dataclass(frozen=True)
class ContourSpec:
    """Shape knobs for the contours.

    ``radius`` is the circle radius (None picks one from |z|); ``tail`` scales
    the truncation length of the infinite pieces; ``order`` is the
    Gauss-Legendre panel order.
    """

    radius: object = None
    tail: object = 1
    order: int = 20
    offset: object = None  # Q only: imaginary offset of the horizontal rays (None: radius)
    shape: str = "lines"  # Q only: "lines" (horizontal rays) or "rays" (rays at +-3pi/4)


DEFAULT_SPEC = ContourSpec()


@dataclass(frozen=True)
class QValue:
    z: object
    tau: object
    beta: object
    value: object
    method: str
    derivatives: tuple = field(default=(), compare=False)


# ------------------------------------------------------------------ q_j


def _q_radius(z, spec):
    if spec.radius is not None:
        return to_mpf(spec.radius)
    az = abs(z)
    return min(mp.mpf(1.2), max(mp.mpf("0.12"), az ** (-mp.mpf(1) / 3)))


def _start_offset(tau, beta, target):
    """Radius below which the flat factor exp(-1/(2s^2)) kills the integrand."""
    goal = (target + 20) * math.log(10)
    s = 0.5
    for _ in range(200):
        val = 1 / (2 * s * s) - abs(float(tau)) / s - (float(beta) + 6) * math.log(1 / s)
        if val > goal:
            return mp.mpf(s)
        s *= 0.9
    return mp.mpf(s)


def _direction(z, side):
    """Angle of the outgoing rays: arg(z t) = pi."""
    x, y = mp.re(z), mp.im(z)
    if y == 0 and x < 0:
        if side not in ("+", "-"):
            raise BranchError("z on the negative axis needs side='+' or side='-'")
        return mp.mpf(0) if side == "+" else 2 * mp.pi
    if y == 0 and x == 0:
        raise BranchError("q_j are singular at z = 0")
    return mp.pi - mp.arg(z)


def _q_pieces(z, tau, beta, target, spec, side):
    r = _q_radius(z, spec)
    theta = _direction(z, side)
    delta = min(_start_offset(tau, beta, target), r / 2)
    far = r + to_mpf(spec.tail) * ((target + 25) * mp.log(10) + 10) / abs(z)
    out = {}
    for name, start in (("q3", mp.pi), ("q1", 2 * mp.pi), ("q2", mp.mpf(0))):
        sign = -1 if name == "q2" else 1
        pieces = [Piece("radial", delta, r, angle=start, sign=sign)]
        if start != theta:
            pieces.append(Piece("arc", start, theta, radius=r, sign=sign))
        out[name] = pieces
    tail = Piece("radial", r, far, angle=theta)
    return out, tail


def _q_integrand(z, tau, beta):
    expo = -beta - 3

    def f(t, logt):
        u = 1 / t
        base = mp.exp(expo * logt + tau * u - u * u / 2 + z * t)
        return [base, base * t, base * t * t, base * t * t * t]

    return f


def _q_values(z, tau, beta, digits, spec, side):
    """All q_j and derivatives 0..3 at z; precision raised until ``digits`` survive."""
    work = digits + 10
    for _ in range(4):
        with mp.workdps(work):
            zz = to_mpc(z)
            tt = to_mpf(tau)
            bb = to_mpf(beta)
            groups, tail = _q_pieces(zz, tt, bb, work, spec, side)
            f = _q_integrand(zz, tt, bb)
            peak = _probe(groups, tail, f)
            tol = peak * mp.mpf(10) ** (-(work - 2))
            tail_vals, _ = integrate_path([tail], f, tol, spec.order)
            vals = {}
            for name, pieces in groups.items():
                head, _ = integrate_path(pieces, f, tol, spec.order)
                sign = -1 if name == "q2" else 1
                vals[name] = [h + sign * tv for h, tv in zip(head, tail_vals)]
            smallest = min(abs(v) for vs in vals.values() for v in vs[:3])
            loss = float(mp.log10(peak / smallest)) if smallest > 0 else work
        if work - max(loss, 0) >= digits + 5:
            return vals
        work = int(digits + max(loss, 0) + 15)
    raise AccuracyError("q_j evaluation lost too many digits to cancellation")


def _probe(groups, tail, f):
    peak = mp.mpf(0)
    pieces = [p for ps in groups.values() for p in ps] + [tail]
    for piece in pieces:
        for k in range(17):
            s = piece.s0 + (piece.s1 - piece.s0) * k / 16
            t, logt, dt = piece.point(s)
            peak = max(peak, abs(f(t, logt)[0] * dt) * abs(piece.s1 - piece.s0))
    return peak


_Q_CACHE = {}


def q_all(z, tau, beta, digits=DEFAULT_DIGITS, spec=DEFAULT_SPEC, side=None):
    """Dictionary {"q1": [q, q', q'', q'''], ...} at z (cached)."""
    key = (str(to_mpc(z)), str(tau), str(beta), digits, spec, side)
    if key not in _Q_CACHE:
        if len(_Q_CACHE) > 4096:
            _Q_CACHE.clear()
        _Q_CACHE[key] = _q_values(z, tau, beta, digits, spec, side)
    return _Q_CACHE[key]


def q_j(j, z, tau, beta, deriv=0, spec=DEFAULT_SPEC, digits=DEFAULT_DIGITS, side=None):
    """q_j^(deriv)(z) on the plane slit along (-inf, 0].

    For z < 0 pass side='+' or '-' for the boundary value from above or below.
    """
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    if deriv not in (0, 1, 2, 3):
        raise ValueError("deriv must be between 0 and 3")
    with mp.workdps(digits):
        return +q_all(z, tau, beta, digits, spec, side)[f"q{j}"][deriv]


# ------------------------------------------------------------------ Psi

SECTORS_UPPER = ((0, "I"), (math.pi / 4, "II"), (3 * math.pi / 4, "III"))
SECTORS_LOWER = ((-math.pi / 4, "IV"), (-3 * math.pi / 4, "V"), (-math.pi, "VI"))


def sector_of(z):
    """Sector label of z: I (0,pi/4), II (pi/4,3pi/4), III (3pi/4,pi) and the
    mirrored IV (-pi/4,0), V (-3pi/4,-pi/4), VI (-pi,-3pi/4)."""
    z = to_mpc(z)
    if z == 0:
        raise BranchError("z = 0 is the junction of all rays")
    phi = mp.arg(z)
    for ray in RAYS.values():
        if abs(phi - ray) < RAY_TOLERANCE or abs(abs(phi) - math.pi) < RAY_TOLERANCE:
            raise BranchError(f"z={mp.nstr(z, 8)} lies within tolerance of a jump ray")
    if phi > 0:
        if phi < math.pi / 4:
            return "I"
        return "II" if phi < 3 * math.pi / 4 else "III"
    if phi > -math.pi / 4:
        return "IV"
    return "V" if phi > -3 * math.pi / 4 else "VI"


def _columns(sector, q1, q2, q3, beta):
    e1 = mp.expjpi(beta)
    e2 = mp.expjpi(2 * beta)
    if sector == "I":
        return [e2 * q1, e1 * q3, q2]
    if sector == "II":
        return [e2 * q1 + q2, e1 * q3, q2]
    if sector == "III":
        return [e2 * q1 + q2 - e2 * q3, e1 * q3, q2]
    if sector == "IV":
        return [q2, e1 * q3, -e2 * q1]
    if sector == "V":
        return [q2 + e2 * q1, e1 * q3, -e2 * q1]
    if sector == "VI":
        return [e2 * q1 + q2 + q3, e1 * q3, -e2 * q1]
    raise ValueError(f"unknown sector {sector!r}")


def psi(z, tau, beta, digits=DEFAULT_DIGITS, sector=None, side=None, spec=DEFAULT_SPEC):
    """3x3 matrix with rows (q, q', q'') of the sector combination at z.

    ``sector`` forces the formula of a given sector, which gives one-sided
    boundary values on a ray (the q_j themselves are analytic there except on
    the negative axis, where ``side`` selects the boundary value).
    """
    sector = sector or sector_of(z)
    vals = q_all(z, tau, beta, digits, spec, side)
    with mp.workdps(digits):
        m = mp.matrix(3, 3)
        for d in range(3):
            cols = _columns(sector, vals["q1"][d], vals["q2"][d], vals["q3"][d], to_mpf(beta))
            for c in range(3):
                m[d, c] = cols[c]
        return m


def jump_matrix(ray, beta):
    e = mp.expjpi(beta)
    if ray == "positive":
        return mp.matrix([[0, 0, 1], [0, 1, 0], [-1, 0, 0]])
    if ray in ("pi/4", "-pi/4"):
        return mp.matrix([[1, 0, 0], [0, 1, 0], [1, 0, 1]])
    if ray == "3pi/4":
        return mp.matrix([[1, 0, 0], [e, 1, 0], [0, 0, 1]])
    if ray == "-3pi/4":
        return mp.matrix([[1, 0, 0], [1 / e, 1, 0], [0, 0, 1]])
    if ray == "negative":
        return mp.matrix([[0, e, 0], [-e, 0, 0], [0, 0, 1]])
    raise ValueError(f"unknown ray {ray!r}")


# (+ side sector, - side sector) for each oriented ray; + is on the left
_RAY_SIDES = {
    "positive": ("I", "IV"),
    "pi/4": ("II", "I"),
    "3pi/4": ("II", "III"),  # oriented towards 0: left side is the clockwise one
    "negative": ("III", "VI"),
    "-3pi/4": ("VI", "V"),
    "-pi/4": ("IV", "V"),
}


def _rel(a, b):
    num = mp.mnorm(a - b, 1)
    den = max(mp.mnorm(a, 1), mp.mnorm(b, 1))
    return num / den if den else num


def jump_residual(ray, radius, tau, beta, digits=DEFAULT_DIGITS):
    """max-norm of Psi_+ - Psi_- J relative to |Psi| at radius*e^{i ray}."""
    plus, minus = _RAY_SIDES[ray]
    with mp.workdps(digits):
        if ray == "negative":
            z = mp.mpc(-to_mpf(radius), 0)
            p_plus = psi(z, tau, beta, digits, sector=plus, side="+")
            p_minus = psi(z, tau, beta, digits, sector=minus, side="-")
        else:
            z = to_mpf(radius) * mp.expj(RAYS[ray])
            p_plus = psi(z, tau, beta, digits, sector=plus)
            p_minus = psi(z, tau, beta, digits, sector=minus)
        return _rel(p_plus, p_minus * jump_matrix(ray, beta))


def monodromy_matrix(beta):
    e2 = mp.expjpi(2 * beta)
    return mp.matrix([[1 + e2, 1, 0], [-e2, 0, 0], [e2, 1, 1]])


def monodromy_residual(x, tau, beta, digits=DEFAULT_DIGITS):
    """Relative residual of (q1+, q2+, q3+) = M (q1-, q2-, q3-) at x < 0, all derivative orders."""
    with mp.workdps(digits):
        z = mp.mpc(to_mpf(x), 0)
        if not mp.re(z) < 0:
            raise DomainError("monodromy relation is stated on the negative axis")
        up = q_all(z, tau, beta, digits, side="+")
        down = q_all(z, tau, beta, digits, side="-")
        M = monodromy_matrix(beta)
        worst = mp.mpf(0)
        for d in range(3):
            vp = mp.matrix([up[f"q{j}"][d] for j in (1, 2, 3)])
            vm = mp.matrix([down[f"q{j}"][d] for j in (1, 2, 3)])
            worst = max(worst, _rel(vp, M * vm))
        return worst


def ode_residual_q(j, z, tau, beta, digits=DEFAULT_DIGITS):
    """|z q''' - beta q'' - tau q' + q| relative to the sum of term magnitudes."""
    with mp.workdps(digits):
        vals = q_all(z, tau, beta, digits)[f"q{j}"]
        z = to_mpc(z)
        terms = [z * vals[3], -to_mpf(beta) * vals[2], -to_mpf(tau) * vals[1], vals[0]]
        return abs(mp.fsum(terms)) / mp.fsum(abs(t) for t in terms)


# ------------------------------------------------------------------ asymptotics

def omega():
    return mp.expjpi(mp.mpf(2) / 3)


def theta_k(k, z, tau):
    """theta_k(z) = -(3/2) w^k z^(2/3) - tau w^(2k) z^(1/3), principal powers."""
    z = to_mpc(z)
    if mp.im(z) == 0 and mp.re(z) <= 0:
        raise BranchError("theta_k is defined off the cut (-inf, 0]")
    w = omega()
    return -mp.mpf(3) / 2 * w**k * z ** (mp.mpf(2) / 3) - to_mpf(tau) * w ** (2 * k) * z ** (mp.mpf(1) / 3)


def model_matrices(tau, beta):
    """Constant ingredients of the large-z expansion for both half planes."""
    w = omega()
    b = to_mpf(beta)
    t = to_mpf(tau)
    omega_plus = mp.matrix([[-w * w, 1, w], [1, -1, -1], [-w, 1, w * w]])
    omega_minus = mp.matrix([[w, 1, w * w], [-1, -1, -1], [w * w, 1, w]])
    e = mp.expjpi(b / 3)
    b_plus = mp.diag([e, 1, 1 / e])
    b_minus = mp.diag([1 / e, 1, e])
    c = -t / 3 * (t * t / 9 + b + 1)
    psi1_plus = c * mp.diag([w, 1, w * w]) - t / 9 * mp.matrix(
        [[0, w * w - w, 1 - w], [w * w - 1, 0, 1 - w], [1 - w * w, w * w - w, 0]]
    )
    psi1_minus = c * mp.diag([w * w, 1, w]) - t / 9 * mp.matrix(
        [[0, w * w - w, w * w - 1], [1 - w, 0, 1 - w * w], [w - 1, w - w * w, 0]]
    )
    return {
        "omega": w,
        "OmegaPlus": omega_plus,
        "OmegaMinus": omega_minus,
        "BPlus": b_plus,
        "BMinus": b_minus,
        "Psi1Plus": psi1_plus,
        "Psi1Minus": psi1_minus,
    }


def Theta(z, tau):
    z = to_mpc(z)
    if mp.im(z) >= 0:
        return [theta_k(1, z, tau), theta_k(3, z, tau), theta_k(2, z, tau)]
    return [theta_k(2, z, tau), theta_k(3, z, tau), theta_k(1, z, tau)]


def psi_asymptotic_check(z, tau, beta, order=1, digits=ASYMPTOTIC_DIGITS):
    """Size of the remainder in the large-z expansion of Psi at z.

    Returns the max-norm of
        (I + order*Psi1 z^(-1/3))^(-1) [c z^(beta/3) D(z) Omega]^(-1) Psi(z) e^(-Theta) B^(-1) - I,
    with D(z) = diag(z^(1/3), 1, z^(-1/3)) and c = sqrt(2 pi/3) e^(tau^2/6).
    """
    with mp.workdps(digits):
        z = to_mpc(z)
        tau_m = to_mpf(tau)
        beta_m = to_mpf(beta)
        mats = model_matrices(tau_m, beta_m)
        upper = mp.im(z) > 0
        Om = mats["OmegaPlus"] if upper else mats["OmegaMinus"]
        B = mats["BPlus"] if upper else mats["BMinus"]
        P1 = mats["Psi1Plus"] if upper else mats["Psi1Minus"]
        P = psi(z, tau, beta, digits)
        pref = mp.sqrt(2 * mp.pi / 3) * mp.exp(tau_m**2 / 6) * z ** (beta_m / 3)
        D = mp.diag([z ** (mp.mpf(1) / 3), 1, z ** (-mp.mpf(1) / 3)])
        th = Theta(z, tau_m)
        E = mp.diag([mp.exp(-t) for t in th])
        core = mp.inverse(pref * D * Om) * P * E * mp.inverse(B)
        corr = mp.eye(3) + order * P1 * z ** (-mp.mpf(1) / 3)
        R = mp.inverse(corr) * core - mp.eye(3)
        return max(abs(R[i, k]) for i in range(3) for k in range(3))


# ------------------------------------------------------------------ Q


def _Q_pieces(z, spec, target, tau):
    r = to_mpf(spec.radius) if spec.radius is not None else max(mp.mpf(1), mp.mpf("1.2") * abs(z) ** (mp.mpf(2) / 3))
    length = to_mpf(spec.tail) * ((target + 20) * mp.log(10) + 30 + 2 * r)
    if spec.shape == "rays":
        ang = 3 * mp.pi / 4
        return [
            Piece("radial", length, r, angle=ang),
            Piece("arc", ang, -ang, radius=r),
            Piece("radial", r, length, angle=-ang),
        ]
    h = to_mpf(spec.offset) if spec.offset is not None else r
    if h > r:
        raise ValueError("ray offset cannot exceed the circle radius")
    x0 = -mp.sqrt(r * r - h * h)
    ang = mp.pi - mp.asin(h / r)
    return [
        Piece("hline", -length, x0, radius=h),
        Piece("arc", ang, -ang, radius=r),
        Piece("hline", x0, -length, radius=-h),
    ]


def _Q_integrand(z, tau, beta):
    expo = -beta - 1

    def f(t, logt):
        u = 1 / t
        base = mp.exp(expo * logt - z * z * u * u / 2 + tau * z * u + t)
        a = -z * u * u + tau * u
        a1 = -u * u
        return [base, base * a, base * (a * a + a1), base * (a * a * a + 3 * a * a1)]

    return f


def Q_eval(z, tau, beta, spec=DEFAULT_SPEC, digits=DEFAULT_DIGITS):
    """Q(z; tau) and its first three z-derivatives by contour integration."""
    work = digits + 10
    for _ in range(4):
        with mp.workdps(work):
            zz = to_mpc(z)
            f = _Q_integrand(zz, to_mpf(tau), to_mpf(beta))
            pieces = _Q_pieces(zz, spec, work, tau)
            peak = _probe({"Q": pieces}, pieces[0], f)
            tol = peak * mp.mpf(10) ** (-(work - 2))
            vals, _ = integrate_path(pieces, f, tol, spec.order)
            vals = [1j * v for v in vals]
            loss = float(mp.log10(peak / abs(vals[0]))) if vals[0] != 0 else work
        if work - max(loss, 0) >= digits + 5:
            with mp.workdps(digits):
                vals = [+v for v in vals]
                return QValue(zz, tau, beta, vals[0], "contour", tuple(vals))
        work = int(digits + max(loss, 0) + 15)
    raise AccuracyError("Q contour integral lost too many digits")


def Q_series_tau0(z, beta, nterms=None, digits=DEFAULT_DIGITS):
    """Q(z; 0) = 2 pi/Gamma(beta+1) * 0F2(; (beta+1)/2, (beta+2)/2; -z^2/8).

    Without ``nterms`` the series runs until the tail bound drops below
    10^-digits relative; with ``nterms`` an AccuracyError is raised when the
    bound on the omitted tail is not small enough.
    """
    with mp.workdps(digits + 10):
        z = to_mpc(z)
        b = to_mpf(beta)
        x = -z * z / 8
        p1 = (b + 1) / 2
        p2 = (b + 2) / 2
        term = mp.mpc(1)
        total = mp.mpc(1)
        eps = mp.mpf(10) ** (-(digits + 5))
        k = 0
        limit = nterms if nterms is not None else 100000
        while k < limit:
            term *= x / ((p1 + k) * (p2 + k) * (k + 1))
            total += term
            k += 1
            # once the ratio is below 1/2 the tail is bounded by twice the last term
            ratio = abs(x) / (abs(p1 + k) * abs(p2 + k) * (k + 1))
            if ratio < 0.5 and abs(term) * 2 <= eps * abs(total):
                break
        else:
            if nterms is not None:
                ratio = abs(x) / (abs(p1 + k) * abs(p2 + k) * (k + 1))
                if ratio >= 0.5 or abs(term) * 2 > eps * abs(total):
                    raise AccuracyError(f"{nterms} terms do not reach the requested accuracy")
        value = 2 * mp.pi / mp.gamma(b + 1) * total
    with mp.workdps(digits):
        return +value


def Q_relation_check(z, tau, beta, digits=DEFAULT_DIGITS):
    """|i z^(-beta) (e^(2 beta pi i) q1'' + q2'') - Q(z)| relative to |Q(z)|."""
    with mp.workdps(digits):
        zz = to_mpc(z)
        b = to_mpf(beta)
        vals = q_all(zz, tau, beta, digits)
        lhs = 1j * zz ** (-b) * (mp.expjpi(2 * b) * vals["q1"][2] + vals["q2"][2])
        rhs = Q_eval(zz, tau, beta, digits=digits).value
        return abs(lhs - rhs) / abs(rhs)


def ode_residual_Q(z, tau, beta, digits=DEFAULT_DIGITS):
    """Relative residual of z^2 Q''' + 2(beta+1) z Q'' + (beta^2+beta-tau z) Q' + (z - tau beta) Q."""
    with mp.workdps(digits):
        q = Q_eval(z, tau, beta, digits=digits).derivatives
        z = to_mpc(z)
        b = to_mpf(beta)
        t = to_mpf(tau)
        terms = [z * z * q[3], 2 * (b + 1) * z * q[2], (b * b + b - t * z) * q[1], (z - t * b) * q[0]]
        scale = mp.fsum(abs(v) for v in terms)
        return abs(mp.fsum(terms)) / scale if scale else mp.mpf(0)
