"""The characteristic quasipolynomial of a single-delay linear DDE.

    Delta(s) = s^n + sum_{k<n} a_k s^k + e^{-s tau} sum_{k<=m} alpha_k s^k

Coefficients are kept as exact rationals (floats are taken at their exact
binary value), so any instance can be re-evaluated at arbitrary precision.
Delayed coefficients may carry a common factor ``exp(delay_gain_log)``; this
is how designs whose delayed coefficients contain ``e^{s0 tau}`` stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly

from .contour import (
    AnalyticTarget,
    ContourError,
    Rect,
    RootRecord,
    count_zeros,
    find_zeros,
    multiplicity,
)
from .polycore import Polynomial, as_fraction

__all__ = [
    "Quasipolynomial",
    "Rect",
    "RootRecord",
    "qp_eval",
    "degree_bound",
    "right_bound",
    "count_zeros_in_rect",
    "find_zeros_in_rect",
    "rightmost_root",
    "root_multiplicity",
    "strip_uniqueness_check",
    "strip_uniqueness_evidence",
]

STRIP_INSET = 1e-6


@dataclass(frozen=True)
class Quasipolynomial:
    n: int
    m: int
    tau: Fraction
    a: tuple
    alpha: tuple
    delay_gain_log: Fraction = Fraction(0)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.m <= self.n:
            raise ValueError("need 0 <= m <= n")
        object.__setattr__(self, "tau", as_fraction(self.tau))
        object.__setattr__(self, "a", tuple(as_fraction(x) for x in self.a))
        object.__setattr__(self, "alpha", tuple(as_fraction(x) for x in self.alpha))
        object.__setattr__(self, "delay_gain_log", as_fraction(self.delay_gain_log))
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        if len(self.a) != self.n:
            raise ValueError(f"expected {self.n} coefficients a_0..a_(n-1), got {len(self.a)}")
        if len(self.alpha) != self.m + 1:
            raise ValueError(f"expected {self.m + 1} coefficients alpha_0..alpha_m, got {len(self.alpha)}")

    @property
    def neutral(self) -> bool:
        return self.m == self.n

    @property
    def retarded(self) -> bool:
        return self.m < self.n

    @property
    def p_poly(self) -> Polynomial:
        return Polynomial(self.a + (Fraction(1),))

    @property
    def q_poly(self) -> Polynomial:
        """Delayed polynomial *without* the ``exp(delay_gain_log)`` factor."""
        return Polynomial(self.alpha)

    @cached_property
    def gain(self) -> float:
        return math.exp(float(self.delay_gain_log))

    @cached_property
    def pc(self) -> np.ndarray:
        return np.array([float(x) for x in self.a] + [1.0])

    @cached_property
    def qc(self) -> np.ndarray:
        return np.array([float(x) for x in self.alpha]) * self.gain

    @cached_property
    def tau_f(self) -> float:
        return float(self.tau)

    @property
    def a_float(self) -> list[float]:
        return [float(x) for x in self.a]

    @property
    def alpha_float(self) -> list[float]:
        return [float(x) for x in self.qc]

    def scale(self) -> float:
        return 1.0 + float(np.sum(np.abs(self.pc[:-1]))) + float(np.sum(np.abs(self.qc)))

    def mp_coeffs(self):
        """Coefficients as mpf at the current mpmath precision."""
        pc = [mpmath.mpf(c.numerator) / c.denominator for c in self.a] + [mpmath.mpf(1)]
        g = mpmath.exp(mpmath.mpf(self.delay_gain_log.numerator) / self.delay_gain_log.denominator)
        qc = [g * mpmath.mpf(c.numerator) / c.denominator for c in self.alpha]
        tau = mpmath.mpf(self.tau.numerator) / self.tau.denominator
        return pc, qc, tau

    def __call__(self, s, order: int = 0):
        return qp_eval(self, s, order)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "tau": _fmt_fraction(self.tau),
            "a": [_fmt_fraction(x) for x in self.a],
            "alpha": [float(x) for x in self.qc] if self.delay_gain_log else [_fmt_fraction(x) for x in self.alpha],
        }


def _fmt_fraction(x: Fraction):
    f = float(x)
    return f if Fraction(f) == x else f"{x.numerator}/{x.denominator}"


def _poly_derivs_float(c: np.ndarray, s, jmax: int) -> list:
    out = []
    d = c
    for _ in range(jmax + 1):
        out.append(npoly.polyval(s, d) if len(d) else 0 * s)
        d = npoly.polyder(d) if len(d) > 1 else np.zeros(0)
    return out


def _poly_derivs_mp(c: list, s, jmax: int) -> list:
    out = []
    d = list(c)
    for _ in range(jmax + 1):
        acc = mpmath.mpc(0)
        for x in reversed(d):
            acc = acc * s + x
        out.append(acc)
        d = [k * x for k, x in enumerate(d)][1:]
    return out


def qp_eval(q: Quasipolynomial, s, order: int = 0, dps: int | None = None):
    """``order``-th derivative of Delta at ``s`` by the Leibniz rule.

    Double precision by default; pass ``dps`` for an mpmath evaluation with
    that many digits (returned as a Python complex).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if dps is not None:
        with mpmath.workdps(dps):
            return complex(_qp_eval_mp(q, mpmath.mpc(s), order))
    s = complex(s)
    P = _poly_derivs_float(q.pc, s, order)
    Q = _poly_derivs_float(q.qc, s, order)
    tau = q.tau_f
    delayed = sum(comb(order, i) * (-tau) ** (order - i) * Q[i] for i in range(order + 1))
    return complex(P[order] + np.exp(-s * tau) * delayed)


def _qp_eval_mp(q: Quasipolynomial, s, order: int):
    pc, qc, tau = q.mp_coeffs()
    P = _poly_derivs_mp(pc, s, order)
    Q = _poly_derivs_mp(qc, s, order)
    delayed = sum(comb(order, i) * (-tau) ** (order - i) * Q[i] for i in range(order + 1))
    return P[order] + mpmath.exp(-s * tau) * delayed


def _magnitude_float(q: Quasipolynomial, s: complex, order: int) -> float:
    r = abs(s)
    P = _poly_derivs_float(np.abs(q.pc), r, order)
    Q = _poly_derivs_float(np.abs(q.qc), r, order)
    tau = q.tau_f
    delayed = sum(comb(order, i) * tau ** (order - i) * Q[i] for i in range(order + 1))
    return float(P[order] + math.exp(min(-s.real * tau, 700.0)) * delayed)


def degree_bound(q: Quasipolynomial) -> int:
    """Maximal multiplicity of any zero of Delta: ``n + m + 1``."""
    return q.n + q.m + 1


def right_bound(q: Quasipolynomial) -> float:
    """A real ``R >= 1`` such that Delta has no zero with ``Re s >= R``.

    For ``Re s >= R >= 1`` one has ``|e^{-s tau}| <= 1`` and ``|s| >= R``.

    Retarded case: the perturbation of ``s^n`` is bounded by
    ``|s|^(n-1) (A + B)`` with ``A = sum|a_k|``, ``B = sum|alpha_k|``, which
    is strictly smaller than ``|s|^n`` once ``|s| > A + B``.  So
    ``R = 1 + A + B`` works.

    Neutral case: the ``alpha_n`` term is of order ``|s|^n``; bounding the
    perturbation by ``|s|^n (A/|s| + B e^{-R tau})`` and requiring each
    part below 1/2 gives ``R = max(1 + A + B, 1 + 2A, 1 + ln(2B + 1)/tau)``.
    """
    A = float(np.sum(np.abs(q.pc[:-1])))
    B = float(np.sum(np.abs(q.qc)))
    R = 1.0 + A + B
    if q.neutral:
        R = max(R, 1.0 + 2 * A, 1.0 + math.log(2 * B + 1) / q.tau_f)
    return R


class QuasipolyTarget(AnalyticTarget):
    real = True

    def __init__(self, q: Quasipolynomial):
        self.q = q
        self._abs_p = np.abs(q.pc)
        self._abs_q = np.abs(q.qc)
        self._dp = npoly.polyder(q.pc)
        self._dq = npoly.polyder(q.qc) if len(q.qc) > 1 else np.zeros(1)

    def scale(self) -> float:
        return self.q.scale()

    def deriv_scale(self, z: complex, j: int) -> float:
        return max(_magnitude_float(self.q, complex(z), j), 1e-300)

    def sample(self, s: np.ndarray):
        q = self.q
        tau = q.tau_f
        s = np.asarray(s, dtype=complex)
        P = npoly.polyval(s, q.pc)
        dP = npoly.polyval(s, self._dp)
        Q = npoly.polyval(s, q.qc)
        dQ = npoly.polyval(s, self._dq)
        r = np.abs(s)
        Pabs = npoly.polyval(r, self._abs_p)
        Qabs = npoly.polyval(r, self._abs_q)
        phase = np.empty(s.shape)
        logd = np.empty(s.shape, dtype=complex)
        rel = np.empty(s.shape)
        left = s.real < 0
        with np.errstate(all="ignore"):
            # right half: Delta directly
            R = ~left
            E = np.exp(-s[R] * tau)
            D = P[R] + E * Q[R]
            dD = dP[R] + E * (dQ[R] - tau * Q[R])
            phase[R] = np.angle(D)
            logd[R] = dD / D
            rel[R] = np.abs(D) / (Pabs[R] + np.abs(E) * Qabs[R])
            # left half: e^{s tau} Delta, phase of the dropped factor added back
            F = np.exp(s[left] * tau)
            G = F * P[left] + Q[left]
            dG = F * dP[left] + dQ[left] - tau * Q[left]
            phase[left] = np.angle(G) - tau * s[left].imag
            logd[left] = dG / G
            rel[left] = np.abs(G) / (np.abs(F) * Pabs[left] + Qabs[left])
        return phase, logd, rel

    def sample_precise(self, s: complex):
        dps = 40
        while True:
            with mpmath.workdps(dps):
                ss = mpmath.mpc(s)
                D = _qp_eval_mp(self.q, ss, 0)
                dD = _qp_eval_mp(self.q, ss, 1)
                pc, qc, tau = self.q.mp_coeffs()
                r = abs(ss)
                mag = sum(abs(c) * r**k for k, c in enumerate(pc)) + mpmath.exp(-ss.real * tau) * sum(
                    abs(c) * r**k for k, c in enumerate(qc)
                )
                rel = abs(D) / mag if mag else mpmath.mpf(0)
                if (rel != 0 and rel > mpmath.mpf(10) ** (-(dps - 20))) or dps >= 800:
                    if D == 0:
                        return 0.0, complex("inf"), 0.0
                    return float(mpmath.arg(D)), complex(dD / D), float(rel)
            dps *= 2

    def derivs(self, s: complex, orders) -> list[complex]:
        out = []
        for j in orders:
            v = qp_eval(self.q, s, j)
            mag = _magnitude_float(self.q, complex(s), j)
            if not np.isfinite(v) or abs(v) < 1e-8 * mag:
                v = qp_eval(self.q, s, j, dps=40 + int(max(0, math.log10(max(mag, 1.0)))))
            out.append(v)
        return out


class ZeroList(list):
    """List of :class:`RootRecord` with the sub-rectangles left unresolved."""

    def __init__(self, roots=(), unresolved=(), total: int = 0):
        super().__init__(roots)
        self.unresolved = list(unresolved)
        self.total = total


def count_zeros_in_rect(q: Quasipolynomial, r: Rect) -> int:
    """Number of zeros of Delta in ``r`` counted with multiplicity.

    If a zero lies on (or numerically on) the boundary the rectangle is
    inflated by 1e-3 and the count retried, at most five times.
    """
    return count_zeros(QuasipolyTarget(q), r)


def find_zeros_in_rect(q: Quasipolynomial, r: Rect, tol: float = 1e-10) -> ZeroList:
    roots, unresolved, total = find_zeros(QuasipolyTarget(q), r, tol, max_mult=degree_bound(q))
    return ZeroList(roots, unresolved, total)


def root_multiplicity(q: Quasipolynomial, s: complex, mult_tol: float = 1e-6) -> int:
    """Multiplicity of ``s`` as a zero of Delta (0 if not a zero), derivative test."""
    mult, _, _ = multiplicity(QuasipolyTarget(q), complex(s), degree_bound(q), mult_tol)
    return mult


def rightmost_root(q: Quasipolynomial, im_cap: float | None = None, tol: float = 1e-10) -> RootRecord:
    """Rightmost zero within the strip ``|Im s| <= im_cap``.

    Zeros with larger imaginary part are not searched; for neutral
    quasipolynomials, whose zero chains approach a vertical asymptote, this
    is corroboration only.
    """
    if im_cap is None:
        im_cap = 4 * 2 * math.pi / q.tau_f
    R = right_bound(q)
    width = 1.0
    while True:
        rect = Rect(R - width, R, -im_cap, im_cap)
        c = count_zeros_in_rect(q, rect)
        if c > 0:
            break
        width *= 2
        if width > 1e12:
            raise ContourError("no zero found within the search strip")
    zs = find_zeros_in_rect(q, rect, tol)
    if not zs:
        raise ContourError(f"{c} zeros counted but none isolated in {rect}")
    best = max(zs, key=lambda r: (round(r.location.real, 9), -abs(r.location.imag)))
    best.note = f"rightmost within strip |Im s| <= {im_cap:g}"
    if zs.unresolved:
        best.note += f"; {len(zs.unresolved)} sub-rectangle(s) unresolved"
    return best


def strip_uniqueness_evidence(q: Quasipolynomial, s0: float) -> dict:
    s0 = float(s0)
    W = right_bound(q)
    h = 2 * math.pi / q.tau_f - STRIP_INSET
    mult = root_multiplicity(q, s0)
    count = count_zeros_in_rect(q, Rect(s0 - W, s0 + W, -h, h))
    return {"s0": s0, "half_width": W, "half_height": h, "multiplicity": mult, "count": count, "unique": count == mult and mult > 0}


def strip_uniqueness_check(q: Quasipolynomial, s0: float) -> bool:
    """True iff ``s0`` is the only zero (with its multiplicity) in the strip
    ``|Im s| < 2 pi / tau`` intersected with ``|Re s - s0| <= R``."""
    return strip_uniqueness_evidence(q, s0)["unique"]
