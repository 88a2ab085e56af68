"""Command-line interface: JSON in, JSON or CSV out.

Exit status is 0 on success, 2 for invalid input and 3 when a numerical
procedure fails; in the latter two cases a JSON diagnostic is written to
standard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import shlex
import sys
from fractions import Fraction

import jsonschema
import numpy as np

from . import ddesim, hyperfunc, mid, pade, quasipoly, zerogeometry
from ._quad import QuadratureError
from .contour import ContourError, Rect
from .polycore import Polynomial, as_fraction

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3

_NUMBER = {
    "oneOf": [
        {"type": "number"},
        {"type": "string", "pattern": r"^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?(\s*/\s*\d+)?\s*$"},
    ]
}

PROBLEM_SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 0},
        "tau": _NUMBER,
        "a": {"type": "array", "items": _NUMBER},
        "alpha": {"type": "array", "items": _NUMBER},
        "history": {"type": "array", "items": _NUMBER},
    },
    "required": ["n", "m", "tau", "a", "alpha"],
    "additionalProperties": False,
}


class InvalidInput(ValueError):
    pass


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, Rect):
        return x.as_list()
    if hasattr(x, "as_dict"):
        return jsonable(x.as_dict())
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, ensure_ascii=False)


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


def _pair(text: str, count: int) -> list[float]:
    parts = text.split(",")
    if len(parts) != count:
        raise InvalidInput(f"expected {count} comma-separated numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def _complex(text: str) -> complex:
    re, im = _pair(text, 2)
    return complex(re, im)


def load_problem(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from None
    try:
        jsonschema.validate(data, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InvalidInput(f"{path}: {exc.message}") from None
    return data


def problem_quasipolynomial(data: dict) -> quasipoly.Quasipolynomial:
    return quasipoly.Quasipolynomial(
        data["n"],
        data["m"],
        as_fraction(data["tau"]),
        [as_fraction(v) for v in data["a"]],
        [as_fraction(v) for v in data["alpha"]],
    )


def _invocation(argv) -> str:
    return "invocation: " + shlex.join(["qpmid", *argv])


def _write_csv(path: str, argv, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {_invocation(argv)}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def cmd_pade(args, argv) -> dict:
    raw = pade.perron_pair(args.n, args.m)
    norm = pade.exp_pade_normalized(args.n, args.m)
    out = {"perron_raw": raw.as_dict(), "exp_normalized": norm.as_dict()}
    rem = norm.remainder_series(1)
    out["remainder_leading_coefficient"] = rem[args.n + args.m + 1]
    if args.check_remainder is not None:
        z = _complex(args.check_remainder)
        lhs, rhs = pade.remainder_identity(args.n, args.m, z)
        out["remainder_check"] = {"z": z, "lhs": lhs, "rhs": rhs, "abs_diff": abs(lhs - rhs)}
    return out


def cmd_kummer(args, argv) -> dict:
    p = hyperfunc.KummerParams(args.a, args.b)
    z = _complex(args.z)
    value = hyperfunc.kummer_phi(p, z)
    scale = hyperfunc.phi_scale(args.a, args.b, z)
    out = {
        "a": args.a,
        "b": args.b,
        "z": z,
        "value": value,
        "series_scale": scale,
        "ode_residual": abs(hyperfunc.kummer_ode_residual(p, z)),
    }
    if args.b > args.a > 0:
        oracle = hyperfunc.kummer_integral_oracle(p, z)
        out["integral_oracle"] = oracle
        out["integral_residual"] = abs(oracle - value)
    else:
        out["integral_oracle"] = None
        out["integral_residual"] = None
    return out


def cmd_mid_design(args, argv) -> dict:
    d = mid.synthesize_coeffs(args.n, args.m, args.tau, args.s0)
    q = d.quasipolynomial()
    out = {
        "design": d.as_dict(),
        "s0_from_coeffs": float(mid.s0_from_coeffs(d.n, d.m, d.tau, d.a[-1])),
        "s0_relation_exact": mid.s0_from_coeffs(d.n, d.m, d.tau, d.a[-1]) == d.s0,
        "stable": mid.stability_criterion(d.n, d.m, d.tau, d.a[-1]),
    }
    if args.verify:
        out["equivalences"] = mid.check_equivalences(q, d.s0).as_dict()
        if d.m <= d.n:
            out["dominance"] = mid.verify_dominance(d, args.im_cap).as_dict()
    return out


def cmd_spectrum(args, argv) -> dict:
    q = problem_quasipolynomial(load_problem(args.input))
    re0, re1, im0, im1 = _pair(args.rect, 4)
    if not (re0 < re1 and im0 < im1):
        raise InvalidInput("rect must satisfy a < b and c < d")
    zs = quasipoly.find_zeros_in_rect(q, Rect(re0, re1, im0, im1), args.tol)
    return {
        "quasipolynomial": q.as_dict(),
        "rect": [re0, re1, im0, im1],
        "count": zs.total,
        "roots": [r.as_dict() for r in zs],
        "unresolved": [{"rect": r.as_list(), "count": c} for r, c in zs.unresolved],
    }


def cmd_counterexample(args, argv) -> dict:
    return zerogeometry.saff_varga_counterexample(args.l)


def cmd_curve(args, argv) -> dict:
    samples = zerogeometry.root_curve(args.l, args.kmin, args.kmax, args.step)
    _write_csv(args.out, argv, ["k", "z", "residual"], [(s.k, s.z, s.residual) for s in samples])
    return {
        "l": args.l,
        "samples": len(samples),
        "k_range": [samples[0].k, samples[-1].k],
        "seed": [args.l + 1.5, 1 + 2 * args.l],
        "max_relative_residual": max(s.residual / s.scale for s in samples),
        "breakdown": samples.breakdown,
        "out": args.out,
    }


def cmd_xi(args, argv) -> dict:
    zs = zerogeometry.xi_set(args.n, args.count)
    rows = []
    for z in zs:
        row = {"zeta": z}
        if args.crosscheck:
            row["phi_residual"] = zerogeometry.xi_crosscheck(args.n, z)
        rows.append(row)
    if args.out:
        header = ["zeta"] + (["phi_residual"] if args.crosscheck else [])
        _write_csv(args.out, argv, header, [[r[h] for h in header] for r in rows])
    return {"n": args.n, "count": args.count, "roots": rows}


def cmd_simulate(args, argv) -> dict:
    data = load_problem(args.input)
    q = problem_quasipolynomial(data)
    hist = Polynomial.of(*[as_fraction(v) for v in data.get("history", [1])])
    stride = max(1, args.stride)
    cfg = ddesim.SimConfig(hist, args.horizon, args.dt, stride)
    tr = ddesim.simulate(q, cfg)
    rate = ddesim.decay_rate_estimate(tr, args.skip)
    tr.to_csv(args.out, comment=_invocation(argv))
    return {
        "quasipolynomial": q.as_dict(),
        "samples": len(tr.times),
        "decay_rate": float(rate),
        "decay_method": rate.method,
        "underflow": rate.underflow,
        "out": args.out,
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpmid", description="Quasipolynomial multiplicity and zero-location toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pade", help="Padé pairs of the exponential")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--check-remainder", metavar="RE,IM")
    p.set_defaults(func=cmd_pade)

    p = sub.add_parser("kummer", help="Kummer function value with oracle residuals")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--z", required=True, metavar="RE,IM")
    p.set_defaults(func=cmd_kummer)

    p = sub.add_parser("mid-design", help="coefficients placing a root of maximal multiplicity")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--tau", type=as_fraction, required=True)
    p.add_argument("--s0", type=as_fraction, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--im-cap", type=float, default=None)
    p.set_defaults(func=cmd_mid_design)

    p = sub.add_parser("spectrum", help="zeros of a quasipolynomial in a rectangle")
    p.add_argument("--input", required=True)
    p.add_argument("--rect", required=True, metavar="A,B,C,D")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("counterexample", help="Saff-Varga counterexample report")
    p.add_argument("--l", type=float, required=True)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("curve", help="real root curve of M_{k,l} as CSV")
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--kmin", type=float, required=True)
    p.add_argument("--kmax", type=float, required=True)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("xi", help="positive elements of Xi_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--crosscheck", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("simulate", help="time-domain simulation and decay rate")
    p.add_argument("--input", required=True)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--skip", type=float, default=0.5)
    p.add_argument("--stride", type=int, default=1)
    p.set_defaults(func=cmd_simulate)
    return ap


_INVALID = (
    InvalidInput,
    hyperfunc.ParameterError,
    zerogeometry.PreconditionError,
    ddesim.SimConfigError,
    ddesim.UnsupportedEquation,
    ValueError,
    ZeroDivisionError,
)
_NUMERIC = (
    ContourError,
    hyperfunc.ConvergenceError,
    zerogeometry.ContinuationError,
    QuadratureError,
    ArithmeticError,
    RuntimeError,
)


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


_LIST_OPTIONS = ("--rect", "--z", "--check-remainder", "--s0", "--a", "--b", "--l", "--kmin", "--kmax")


def _glue(argv: list[str]) -> list[str]:
    """Attach values such as ``-1,1,-2,2`` to their option so argparse
    does not mistake them for flags."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LIST_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args, argv)
    except _NUMERIC as exc:
        if isinstance(exc, ZeroDivisionError):
            return _fail(EXIT_INVALID, exc)
        return _fail(EXIT_NUMERIC, exc)
    except _INVALID as exc:
        return _fail(EXIT_INVALID, exc)
    _emit(result)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
