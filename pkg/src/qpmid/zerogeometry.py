"""Where the zeros of Whittaker and Kummer functions lie.

Region predicates for verified zeros, the counterexample to the
Saff-Varga half-plane bounds, continuation of the real root curve
``k -> z_l(k)`` of ``M_{k,l}``, and the real sets ``Xi_n`` describing the
purely imaginary zeros of ``M_{0, n+1/2}``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import factorial

import mpmath
import numpy as np
from scipy.optimize import brentq

from .contour import AnalyticTarget, Rect, RootRecord, find_zeros
from .hyperfunc import (
    KummerParams,
    WhittakerParams,
    kummer_phi,
    phi_array,
    phi_array_scale,
    phi_derivative,
    phi_parameter_derivative,
    phi_scale,
    whittaker_m,
    whittaker_m_derivative,
    whittaker_scale,
)
from .polycore import Polynomial

ZERO_GATE = 1e-6
AXIS_TOL = 1e-9


class PreconditionError(ValueError):
    pass


class ContinuationError(RuntimeError):
    pass


@dataclass
class RegionReport:
    z: complex
    verified_zero: bool
    residual: float
    hypothesis: bool
    predicates: dict = field(default_factory=dict)
    applicable: dict = field(default_factory=dict)
    bound_regime: str | None = None
    consistent: bool | None = None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["z"] = [self.z.real, self.z.imag]
        return d


def _phi_residual(a: float, b: float, z: complex) -> float:
    return abs(kummer_phi(KummerParams(a, b), z)) / phi_scale(a, b, z)


def _geometry(z: complex, c_im: float, c_re: float, radius2: float) -> tuple[dict, str]:
    """Shared predicates: ``c_im Im^2 - c_re Re^2 > 0`` and ``|z|^2 > radius2``."""
    tol = AXIS_TOL * max(1.0, abs(z))
    nonreal = abs(z.imag) > tol
    preds = {
        "imaginary_axis": abs(z.real) <= tol,
        "right_half": z.real > tol,
        "left_half": z.real < -tol,
        "hyperbola_bound": c_im * z.imag**2 - c_re * z.real**2 > 0,
        "modulus_bound": (abs(z) ** 2 > radius2) if nonreal else None,
    }
    regime = "vacuous" if c_re <= 0 else "informative"
    return preds, regime


def _judge(preds: dict, applicable: dict) -> bool:
    ok = preds["modulus_bound"] is not False
    if applicable["zero"]:
        return ok and preds["imaginary_axis"]
    side = "right_half" if applicable["positive"] else "left_half"
    return ok and preds[side] and preds["hyperbola_bound"]


def whittaker_region_check(k: float, l: float, z: complex, gate: float = ZERO_GATE) -> RegionReport:
    """Test a zero of ``M_{k,l}`` against the half-plane, hyperbola and modulus bounds.

    The zero is verified on the Kummer level, ``Phi(1/2+l-k, 1+2l, z)``,
    whose nontrivial zeros are those of M and which has no branch cut.
    Requires ``2l - 1 >= 0``; otherwise the report carries no judgement.
    """
    z = complex(z)
    hyp = 2 * l - 1 >= 0
    if z == 0:
        raise PreconditionError("z = 0 is a trivial zero")
    res = _phi_residual(0.5 + l - k, 1 + 2 * l, z)
    rep = RegionReport(z, res <= gate, res, hyp)
    if not (rep.verified_zero and hyp):
        return rep
    rep.predicates, rep.bound_regime = _geometry(z, 4 * k * k, 4 * (l * l - k * k) - 1, 4 * l * l - 1)
    rep.applicable = {"zero": k == 0, "positive": k > 0, "negative": k < 0}
    if k == 0:
        rep.bound_regime = None
        rep.predicates["hyperbola_bound"] = None
    rep.consistent = _judge(rep.predicates, rep.applicable)
    return rep


def kummer_region_check(a: float, b: float, z: complex, gate: float = ZERO_GATE) -> RegionReport:
    """Same as :func:`whittaker_region_check` for ``Phi(a, b, .)``, needing ``b >= 2``."""
    z = complex(z)
    hyp = b >= 2
    res = _phi_residual(a, b, z)
    rep = RegionReport(z, res <= gate, res, hyp)
    if not (rep.verified_zero and hyp):
        return rep
    d = b - 2 * a
    zero = abs(d) <= 1e-12 * max(1.0, abs(b))
    rep.predicates, rep.bound_regime = _geometry(z, d * d, 4 * a * (b - a) - 2 * b, b * (b - 2))
    rep.applicable = {"zero": zero, "positive": not zero and d > 0, "negative": not zero and d < 0}
    if zero:
        rep.bound_regime = None
        rep.predicates["hyperbola_bound"] = None
    rep.consistent = _judge(rep.predicates, rep.applicable)
    return rep


def saff_varga_counterexample(l: float) -> dict:
    """The zero ``z = 1 + 2l`` of ``M_{k,l}`` with ``k = l + 3/2``.

    ``Phi(-1, 1+2l, z) = 1 - z/(1+2l)`` so the zero is exact.  The old
    bound ``Re z > 2k`` fails while ``Re z > 0`` holds; the mirrored pair
    ``(-k, -z)`` behaves the same way for ``k < 0``.
    """
    if not l > 0:
        raise PreconditionError("l must be > 0")
    k = l + 1.5
    z = 1 + 2 * l
    w = WhittakerParams(k, l)
    m_res = abs(whittaker_m(w, z))
    m_scale = whittaker_scale(w, z)
    # mirrored zero of M_{-k,l} at -z, checked on the entire Kummer factor
    mirror_res = abs(kummer_phi(KummerParams(0.5 + l + k, 1 + 2 * l), -z))
    sv_rhs = z * z * (4 * l * l - 4 * k * k - 1) / (4 * k * k)
    return {
        "l": l,
        "k": k,
        "z": z,
        "residual": m_res,
        "residual_scale": m_scale,
        "mirror_residual": mirror_res,
        "prop2_hypothesis": 2 * l - 1 >= 0,
        "sv_a_violated": not z > 2 * k,
        "sv_a_imaginary_part_holds": 0.0 > sv_rhs,
        "prop2b_satisfied": z > 0,
        "sv_b_violated": not -z < -2 * k,
        "prop2c_satisfied": -z < 0,
    }


def whittaker_symmetry_check(k: float, l: float, z: complex, gate: float = ZERO_GATE) -> float:
    """``|Phi(1/2+l+k, 1+2l, -z)|``, the Kummer factor of ``M_{-k,l}(-z)``.

    ``z`` must be a verified nontrivial zero of ``M_{k,l}``.  Working with
    the entire factor avoids the branch cut of ``(-z)^(1/2+l)``.
    """
    z = complex(z)
    if z == 0:
        raise PreconditionError("z = 0 is a trivial zero")
    if _phi_residual(0.5 + l - k, 1 + 2 * l, z) > gate:
        raise PreconditionError(f"z = {z} is not a zero of M_{{{k},{l}}}")
    return abs(kummer_phi(KummerParams(0.5 + l + k, 1 + 2 * l), -z))


@dataclass(frozen=True)
class CurveSample:
    k: float
    z: float
    residual: float
    l: float
    scale: float = 1.0


class CurveSamples(list):
    """Samples sorted by k; ``breakdown`` describes where continuation stopped, if it did."""

    def __init__(self, samples=(), breakdown=None):
        super().__init__(samples)
        self.breakdown = breakdown or []


def _curve_newton(k: float, l: float, z: float, maxiter: int = 30) -> tuple[float, bool]:
    w = WhittakerParams(k, l)
    for _ in range(maxiter):
        f = whittaker_m(w, z).real
        df = whittaker_m_derivative(w, z).real
        if df == 0 or not math.isfinite(df):
            return z, False
        step = f / df
        z -= step
        if not (z > 0 and math.isfinite(z)):
            return z, False
        if abs(step) <= 1e-15 * max(1.0, z):
            return z, True
    return z, False


def _slope(k: float, l: float, z: float) -> float:
    """dz/dk along Phi(1/2+l-k, 1+2l, z) = 0."""
    a, b = 0.5 + l - k, 1 + 2 * l
    dk = -phi_parameter_derivative(a, b, z).real
    dz = phi_derivative(KummerParams(a, b), z, 1).real
    return -dk / dz


def _sample(k: float, l: float, z: float) -> CurveSample:
    w = WhittakerParams(k, l)
    return CurveSample(k, z, abs(whittaker_m(w, z)), l, whittaker_scale(w, z))


def _continue(l: float, k: float, z: float, k_end: float, step: float, out: list, breakdown: list) -> None:
    sign = 1.0 if k_end > k else -1.0
    h = step
    while sign * (k_end - k) > 1e-14:
        hh = min(h, sign * (k_end - k))
        kn = k + sign * hh
        zp = z + sign * hh * _slope(k, l, z)
        zn, ok = _curve_newton(kn, l, zp) if zp > 0 else (zp, False)
        if ok and abs(zn - zp) <= 0.1 * max(1.0, z):
            s = _sample(kn, l, zn)
            if s.residual <= 1e-9 * s.scale:
                out.append(s)
                k, z = kn, zn
                h = min(step, 2 * h)
                continue
        h /= 2
        if h < step / 64:
            breakdown.append({"k": k, "z": z, "direction": "up" if sign > 0 else "down"})
            return


def root_curve(l: float, k_min: float, k_max: float, step: float = 0.05) -> CurveSamples:
    """Real zero ``z_l(k)`` of ``M_{k,l}`` from the seed ``(l + 3/2, 1 + 2l)``.

    Tangent predictor from the implicit-function slope, Newton corrector on
    M in z.  Steps are halved down to ``step/64``; if that fails the curve
    is truncated and ``breakdown`` records the last good point.
    """
    if not l > -0.5:
        raise PreconditionError("need l > -1/2")
    k0 = l + 1.5
    if not k_min <= k0 <= k_max:
        raise PreconditionError("seed k = l + 3/2 must lie in [k_min, k_max]")
    if step <= 0:
        raise PreconditionError("step must be > 0")
    z0 = 1 + 2 * l
    seed = _sample(k0, l, z0)
    if seed.residual > 1e-10 * seed.scale:
        raise ContinuationError(f"seed residual {seed.residual:.3e} too large")
    up: list = []
    down: list = []
    breakdown: list = []
    _continue(l, k0, z0, k_max, step, up, breakdown)
    _continue(l, k0, z0, k_min, step, down, breakdown)
    samples = list(reversed(down)) + [seed] + up
    return CurveSamples(samples, breakdown)


def xi_polynomials(n: int) -> tuple[Polynomial, Polynomial]:
    """Numerator and denominator of the rational side of ``tan(zeta/2) = N/D``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    num = [Fraction(0)] * (n + 1)
    for j in range((n - 1) // 2 + 1):
        num[2 * j + 1] = Fraction((-1) ** j * factorial(2 * n - 2 * j - 1), factorial(2 * j + 1) * factorial(n - 2 * j - 1))
    den = [Fraction(0)] * (n + 1)
    for j in range(n // 2 + 1):
        den[2 * j] = Fraction((-1) ** j * factorial(2 * n - 2 * j), factorial(2 * j) * factorial(n - 2 * j))
    return Polynomial(tuple(num)), Polynomial(tuple(den))


def xi_set(n: int, count: int, scan_step: float = math.pi / 64) -> list[float]:
    """First ``count`` positive elements of ``Xi_n``.

    Solves ``F(zeta) = D(zeta) sin(zeta/2) - N(zeta) cos(zeta/2) = 0``,
    which is the tangent equation with denominators cleared.  ``F`` is
    entire, so neither the poles of tan nor the zeros of D need special
    brackets: sign changes of F on a fine grid are refined by Brent's
    method and a final Newton step.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    num, den = xi_polynomials(n)
    nf = np.array(num.to_floats())
    df = np.array(den.to_floats())
    dnf = np.polynomial.polynomial.polyder(nf)
    ddf = np.polynomial.polynomial.polyder(df)
    P = np.polynomial.polynomial.polyval

    def F(x):
        return P(x, df) * np.sin(x / 2) - P(x, nf) * np.cos(x / 2)

    def dF(x):
        return (P(x, ddf) - P(x, nf) / 2) * np.sin(x / 2) + (P(x, df) / 2 - P(x, dnf)) * np.cos(x / 2)

    roots: list[float] = []
    lo = scan_step
    flo = F(lo)
    while len(roots) < count:
        hi = lo + scan_step
        fhi = F(hi)
        if flo == 0:
            roots.append(lo)
        elif flo * fhi < 0:
            r = brentq(F, lo, hi, xtol=1e-14, rtol=1e-15)
            d = dF(r)
            if d != 0:
                r2 = r - F(r) / d
                if lo <= r2 <= hi:
                    r = r2
            roots.append(float(r))
        lo, flo = hi, fhi
    return roots[:count]


def xi_crosscheck(n: int, zeta: float) -> float:
    """``|Phi(n+1, 2n+2, i zeta)|``; vanishes exactly on ``Xi_n``."""
    return abs(kummer_phi(KummerParams(n + 1, 2 * n + 2), 1j * zeta))


class KummerTarget(AnalyticTarget):
    """``Phi(a, b, .)`` as a target for the zero counting machinery."""

    real = True

    def __init__(self, a: float, b: float):
        self.p = KummerParams(a, b)
        self.a = float(a)
        self.b = float(b)

    def sample(self, s: np.ndarray):
        s = np.asarray(s, dtype=complex)
        f = phi_array(self.a, self.b, s)
        df = self.a / self.b * phi_array(self.a + 1, self.b + 1, s)
        sc = phi_array_scale(self.a, self.b, s)
        with np.errstate(all="ignore"):
            return np.angle(f), df / f, np.abs(f) / sc

    def sample_precise(self, s: complex):
        dps = 30
        while True:
            with mpmath.workdps(dps):
                f = mpmath.hyp1f1(self.a, self.b, s)
                df = self.a / mpmath.mpf(self.b) * mpmath.hyp1f1(self.a + 1, self.b + 1, s)
            rel = float(abs(f)) / phi_scale(self.a, self.b, s)
            if f != 0 or dps >= 400:
                break
            dps *= 2
        if f == 0:
            return 0.0, complex("inf"), 0.0
        return float(mpmath.arg(f)), complex(df / f), rel

    def derivs(self, s: complex, orders) -> list[complex]:
        return [phi_derivative(self.p, s, j) for j in orders]

    def scale(self) -> float:
        return 1.0

    def deriv_scale(self, z: complex, j: int) -> float:
        c = 1.0
        for i in range(j):
            c *= abs((self.a + i) / (self.b + i))
        return max(c * phi_scale(self.a + j, self.b + j, z), 1e-300)


def kummer_zeros(a: float, b: float, rect: Rect, tol: float = 1e-10) -> list[RootRecord]:
    """Zeros of ``Phi(a, b, .)`` in ``rect``, located by the argument principle."""
    t = KummerTarget(a, b)
    roots, unresolved, total = find_zeros(_ScaledTarget(t), rect, tol, max_mult=4)
    if unresolved:
        raise ContinuationError(f"{len(unresolved)} sub-rectangle(s) unresolved; {total} zeros counted")
    return roots


class _ScaledTarget(AnalyticTarget):
    """Judges residuals relative to the local series magnitude."""

    real = True

    def __init__(self, inner: KummerTarget):
        self.inner = inner
        self._z = 0j

    def sample(self, s):
        return self.inner.sample(s)

    def sample_precise(self, s):
        return self.inner.sample_precise(s)

    def derivs(self, s, orders):
        self._z = complex(s)
        return self.inner.derivs(s, orders)

    def scale(self):
        return phi_scale(self.inner.a, self.inner.b, self._z)

    def deriv_scale(self, z, j):
        return self.inner.deriv_scale(z, j)
