"""Command-line experiments emitting JSON or CSV.

Every number is written as a decimal string at the requested digits, field
order is fixed and line endings are LF, so identical invocations produce
identical bytes.  Exit codes: 0 success, 1 failed verification or numerical
failure, 2 usage error, 3 output error.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import mpmath as mp

from . import asymptotics, equilibrium, modelrhp, mop
from ._precision import ENV_DIGITS, decimal_string, default_digits, parse_number, to_mpc, to_mpf
from .errors import AngelescoError, DomainError, ValidationError
from .weights import AnalyticFactor, WeightParams

MIN_DIGITS = 30
VERIFY_TOLERANCE = mp.mpf("1e-8")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


@dataclass
class RunConfig:
    command: str
    options: dict
    digits: int
    out: str = None
    fmt: str = "json"
    weights: WeightParams = None
    ladder: list = field(default_factory=list)


@dataclass
class Report:
    """Scalar summary plus an optional table; ``passed`` is None for non-verification commands."""

    summary: dict
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    passed: bool = None


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ parsing


def _number(text):
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from exc


def _real(text):
    v = _number(text)
    if isinstance(v, mp.mpc):
        raise argparse.ArgumentTypeError(f"expected a real number, got {text!r}")
    if isinstance(v, mp.mpf) and not mp.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


def _number_list(text):
    return [_number(t) for t in text.split(",") if t.strip()]


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}") from exc


def _positive_int(text):
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _add_common(p):
    p.add_argument("--digits", type=int, help=f"working digits (>= {MIN_DIGITS}); default from {ENV_DIGITS}")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")


def _add_weights(p, need_a=True):
    if need_a:
        p.add_argument("--a", type=_real, required=True, help="left endpoint, a < 0")
    p.add_argument("--alpha", type=_real, default=0)
    p.add_argument("--beta", type=_real, default=0)
    p.add_argument("--gamma", type=_real, default=0)
    p.add_argument(
        "--factors",
        choices=("jacobi-angelesco", "constant"),
        default="jacobi-angelesco",
        help="jacobi-angelesco: h1=|x-1|^gamma, h2=|x-a|^alpha; constant: h1=h2=1",
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="angelesco", description="Angelesco multiple orthogonal polynomial experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mop", help="P_{n1,n2} from the moment system")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n2", type=int, help="second index (default: n)")
    _add_weights(p)
    _add_common(p)

    p = sub.add_parser("classical", help="P_{n,n}(z) from the explicit double sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--z", type=_number_list, default=[0], help="comma-separated evaluation points")
    _add_weights(p)
    _add_common(p)

    p = sub.add_parser("zeros", help="zeros of P_{n1,n2} on both intervals")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n2", type=int)
    _add_weights(p)
    _add_common(p)

    p = sub.add_parser("curve", help="constants z*, x0, b of the spectral curve")
    p.add_argument("--a", type=_real, required=True)
    _add_common(p)

    p = sub.add_parser("density", aliases=["equilibrium"], help="equilibrium densities, masses and Lagrange constants")
    p.add_argument("--a", type=_real, required=True)
    p.add_argument("--npts", type=_positive_int, default=20, help="grid intervals per support")
    _add_common(p)

    p = sub.add_parser("phase", help="lambda_1, lambda_2, f and tau(z) near 0")
    p.add_argument("--a", type=_real, required=True)
    p.add_argument("--z", type=_number_list, default=[], help="comma-separated nonreal points")
    _add_common(p)

    p = sub.add_parser("model-check", help="jump, monodromy and ODE residuals of the model problem")
    p.add_argument("--beta", type=_real, required=True)
    p.add_argument("--tau", type=_real, required=True)
    p.add_argument("--radius", type=_real, default=mp.mpf(1) / 2)
    _add_common(p)

    p = sub.add_parser("q-eval", help="Q(z; tau) by contour integration")
    p.add_argument("--beta", type=_real, required=True)
    p.add_argument("--tau", type=_real, required=True)
    p.add_argument("--z", type=_number_list, default=[0])
    _add_common(p)

    p = sub.add_parser("constants", help="c_1, c_2 and C_n")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--tau", type=_real, default=0)
    _add_weights(p, need_a=False)
    _add_common(p)

    p = sub.add_parser("mehler-heine", help="Mehler-Heine ratio ladder")
    p.add_argument("--tau", type=_real, required=True)
    p.add_argument("--z", type=_number, default=0)
    p.add_argument("--ladder", type=_int_list, required=True)
    p.add_argument("--workers", type=int, default=None)
    _add_weights(p, need_a=False)
    _add_common(p)

    p = sub.add_parser("scaling-check", help="l1 + l2 at a_n against the double-scaling expansion")
    p.add_argument("--tau", type=_real, required=True)
    p.add_argument("--ladder", type=_int_list, required=True)
    p.add_argument("--workers", type=int, default=None)
    _add_common(p)
    return parser


def _weights(ns, a):
    if ns.factors == "constant":
        return WeightParams(a, ns.alpha, ns.beta, ns.gamma, AnalyticFactor.constant(), AnalyticFactor.constant())
    return WeightParams.jacobi_angelesco(a, ns.alpha, ns.beta, ns.gamma)


def parse_args(argv):
    """Validated RunConfig; raises UsageError for values argparse cannot check."""
    ns = build_parser().parse_args(argv)
    command = "density" if ns.command == "equilibrium" else ns.command
    options = {k: v for k, v in vars(ns).items() if k not in ("command", "digits", "out", "fmt")}
    digits = ns.digits if ns.digits is not None else default_digits(MIN_DIGITS)
    if digits < MIN_DIGITS:
        raise UsageError(f"--digits must be at least {MIN_DIGITS}")
    cfg = RunConfig(command, options, digits, ns.out, ns.fmt)
    try:
        if "a" in options and options["a"] is not None and not options["a"] < 0:
            raise UsageError(f"--a must be negative, got {decimal_string(options['a'], 10)}")
        if "alpha" in options:
            a = options.get("a", -1)
            cfg.weights = _weights(ns, a)
    except ValidationError as exc:
        raise UsageError(str(exc)) from exc
    if "ladder" in options:
        ladder = options["ladder"]
        if any(n < 1 for n in ladder) or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise UsageError("--ladder must be strictly increasing positive integers")
        cfg.ladder = ladder
    for key in ("n", "n2"):
        if options.get(key) is not None and options[key] < 0:
            raise UsageError(f"--{key} must be nonnegative")
    return cfg


# ------------------------------------------------------------------ commands


def _index(cfg):
    n = cfg.options["n"]
    n2 = cfg.options.get("n2")
    return (n, n if n2 is None else n2)


def _cmd_mop(cfg):
    digits = max(cfg.digits, mop.mop_digits(sum(_index(cfg))))
    P = mop.solve_mop(_index(cfg), cfg.weights, digits)
    rows = [[k, c] for k, c in enumerate(P.coeffs)]
    summary = {
        "params": cfg.weights.to_json(),
        "index": list(_index(cfg)),
        "exact": P.exact,
        "digits": digits,
        "achieved_digits": P.achieved_digits if P.achieved_digits is not None else "exact",
    }
    return Report(summary, ["k", "coefficient"], rows)


def _jacobi_or_fail(cfg):
    exps = mop.jacobi_angelesco_exponents(cfg.weights)
    if exps is None:
        raise ValidationError("the explicit double sum needs Jacobi-Angelesco factors")
    return exps


def _cmd_classical(cfg):
    n = cfg.options["n"]
    exps = _jacobi_or_fail(cfg)
    digits = max(cfg.digits, 2 * n + 100)
    rows = []
    for z in cfg.options["z"]:
        rows.append([z, mop.classical_pnn(n, *exps, cfg.weights.a, z, digits)])
    return Report({"params": cfg.weights.to_json(), "n": n, "digits": digits}, ["z", "value"], rows)


def _cmd_zeros(cfg):
    idx = _index(cfg)
    digits = max(cfg.digits, mop.mop_digits(sum(idx)))
    P = mop.solve_mop(idx, cfg.weights, digits)
    z1, z2 = mop.poly_zeros(P, cfg.weights, digits)
    rows = [[1, k, x] for k, x in enumerate(z1)] + [[2, k, x] for k, x in enumerate(z2)]
    summary = {"params": cfg.weights.to_json(), "index": list(idx), "count1": len(z1), "count2": len(z2)}
    return Report(summary, ["interval", "k", "x"], rows, passed=True)


def _cmd_curve(cfg):
    curve = equilibrium.curve_constants(cfg.options["a"], cfg.digits)
    r1, r2 = equilibrium.cubic_residuals(curve)
    ok = max(r1, r2) <= mp.mpf("1e-20")
    summary = {
        "a": curve.a,
        "zstar": curve.zstar,
        "x0": curve.x0,
        "b": curve.b,
        "zstar_residual": r1,
        "x0_residual": r2,
    }
    return Report(summary, list(summary), [list(summary.values())], passed=bool(ok))


def _cmd_density(cfg):
    a = cfg.options["a"]
    digits = cfg.digits
    curve = equilibrium.curve_constants(a, digits)
    m1 = equilibrium.mass(1, None, digits, curve)
    m2 = equilibrium.mass(2, None, digits, curve)
    data = equilibrium.potentials_and_constants(None, digits, curve)
    dev = equilibrium.variational_deviation(data)
    half = mp.mpf(1) / 2
    ok = max(abs(m1 - half), abs(m2 - half), dev) <= mp.mpf("1e-10")
    rows = []
    for x, p1, p2 in equilibrium.density_profile(None, cfg.options["npts"] + 1, digits, curve):
        rows.append([x, 1 if p1 is not None else 2, p1 if p1 is not None else p2])
    summary = {
        "a": curve.a,
        "x0": curve.x0,
        "mass1": m1,
        "mass2": m2,
        "l1": data.l1,
        "l2": data.l2,
        "variational_deviation": dev,
    }
    return Report(summary, ["x", "interval", "density"], rows, passed=bool(ok))


def _cmd_phase(cfg):
    maps = equilibrium.phase_maps(cfg.options["a"], cfg.digits)
    summary = {
        "a": maps.a,
        "lambda1_0": maps.lambda1_0,
        "lambda2_0": maps.lambda2_0,
        "fprime_0": maps.fprime0,
        "tau_0": maps.tau0,
    }
    rows = []
    for z in cfg.options["z"]:
        z = to_mpc(z)
        if mp.im(z) == 0:
            raise DomainError("phase maps are evaluated off the real axis")
        l1, l2 = equilibrium.lambda_functions(z, maps)
        rows.append([z, l1, l2, maps.f(z), maps.tau_of_z(z)])
    return Report(summary, ["z", "lambda1", "lambda2", "f", "tau"], rows)


def _cmd_model_check(cfg):
    beta, tau, r = cfg.options["beta"], cfg.options["tau"], cfg.options["radius"]
    digits = cfg.digits
    rows = []
    for ray in modelrhp.RAYS:
        rows.append([f"jump {ray}", modelrhp.jump_residual(ray, r, tau, beta, digits)])
    rows.append(["monodromy", modelrhp.monodromy_residual(-r, tau, beta, digits)])
    z = mp.mpc(r, r) / 2
    for j in (1, 2, 3):
        rows.append([f"ode q{j}", modelrhp.ode_residual_q(j, z, tau, beta, digits)])
    rows.append(["ode Q", modelrhp.ode_residual_Q(z, tau, beta, digits)])
    q0 = modelrhp.Q_eval(0, tau, beta, digits=digits).value
    with mp.workdps(digits):
        exact = 2 * mp.pi / mp.gamma(to_mpf(beta) + 1)
        rows.append(["Q(0)", abs(q0 - exact) / abs(exact)])
    ok = all(v <= VERIFY_TOLERANCE for _, v in rows)
    return Report({"beta": beta, "tau": tau, "radius": r, "tolerance": VERIFY_TOLERANCE}, ["check", "residual"], rows, passed=ok)


def _cmd_q_eval(cfg):
    beta, tau = cfg.options["beta"], cfg.options["tau"]
    rows = []
    for z in cfg.options["z"]:
        v = modelrhp.Q_eval(z, tau, beta, digits=cfg.digits).value
        # Taylor coefficients are real, so drop the rounding-level imaginary part on the axis
        rows.append([z, mp.re(v) if mp.im(to_mpc(z)) == 0 else v])
    return Report({"beta": beta, "tau": tau}, ["z", "Q"], rows)


def _cmd_constants(cfg):
    const = asymptotics.asymptotic_constants(cfg.options["n"], cfg.options["tau"], cfg.weights, cfg.digits)
    summary = {
        "n": const.n,
        "tau": const.tau,
        "alpha": cfg.weights.alpha,
        "beta": cfg.weights.beta,
        "gamma": cfg.weights.gamma,
        "factors": cfg.options["factors"],
        "c1": const.c1,
        "c2": const.c2,
        "Cn": const.Cn,
    }
    return Report(summary, list(summary), [list(summary.values())])


def _cmd_mehler_heine(cfg):
    tau, z = cfg.options["tau"], cfg.options["z"]
    report = asymptotics.mh_compare(z, tau, cfg.ladder, cfg.weights, cfg.digits, cfg.options["workers"])
    rows = []
    with mp.workdps(cfg.digits):
        for n, lhs, rhs, ratio, err in zip(report.ns, report.lhs, report.rhs, report.ratios, report.errors):
            rows.append([n, lhs, rhs, ratio, ratio - 1, err * mp.sqrt(n)])
    summary = {
        "z": z,
        "tau": tau,
        "params": cfg.weights.to_json(),
        "ladder": cfg.ladder,
        "fitted_exponent": report.exponent if report.exponent is not None else "none",
    }
    return Report(summary, ["n", "lhs", "rhs", "ratio", "ratio_minus_1", "abs_error_times_sqrt_n"], rows)


def _cmd_scaling_check(cfg):
    report = asymptotics.lagrange_scaling_check(cfg.options["tau"], cfg.ladder, cfg.digits, cfg.options["workers"])
    rows = [[r["n"], r["a"], r["l1_plus_l2"], r["deviation"]] for r in report.rows()]
    summary = {
        "tau": cfg.options["tau"],
        "ladder": cfg.ladder,
        "fitted_exponent": report.exponent if report.exponent is not None else "none",
    }
    return Report(summary, ["n", "a", "l1_plus_l2", "deviation"], rows)


COMMANDS = {
    "mop": _cmd_mop,
    "classical": _cmd_classical,
    "zeros": _cmd_zeros,
    "curve": _cmd_curve,
    "density": _cmd_density,
    "phase": _cmd_phase,
    "model-check": _cmd_model_check,
    "q-eval": _cmd_q_eval,
    "constants": _cmd_constants,
    "mehler-heine": _cmd_mehler_heine,
    "scaling-check": _cmd_scaling_check,
}


# ------------------------------------------------------------------ output


def _text(v, digits):
    if isinstance(v, dict):
        return {k: _text(x, digits) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_text(x, digits) for x in v]
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    return decimal_string(v, digits)


def render(report, fmt, digits):
    """Serialized text of a report (JSON object or CSV table)."""
    if fmt == "json":
        doc = {"summary": _text(report.summary, digits)}
        if report.passed is not None:
            doc["passed"] = report.passed
        doc["columns"] = report.columns
        doc["rows"] = [_text(r, digits) for r in report.rows]
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for r in report.rows:
        writer.writerow(_text(r, digits))
    return buf.getvalue()


def emit_report(report, fmt, path, digits):
    text = render(report, fmt, digits)
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run_command(cfg):
    """Run a parsed config and write its artifact; returns the exit code."""
    try:
        with mp.workdps(cfg.digits):
            report = COMMANDS[cfg.command](cfg)
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AngelescoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    try:
        with mp.workdps(cfg.digits):
            emit_report(report, cfg.fmt, cfg.out, cfg.digits)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_FAILED if report.passed is False else EXIT_OK


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
