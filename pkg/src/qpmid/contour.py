"""Argument-principle zero counting and isolation for analytic functions.

A *target* supplies, for an array of points, the phase of ``f`` modulo 2π,
the logarithmic derivative ``f'/f`` and a conditioning ratio
``|f| / (sum of |terms|)``.  Working with the phase and the log-derivative
instead of ``f`` itself keeps exponentially large factors (``e^{-s tau}``
far in the left half-plane) out of the arithmetic.  Poorly conditioned
samples are re-evaluated by the target's extended-precision path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import factorial

import numpy as np

TWO_PI = 2 * math.pi
PHASE_STEP = math.pi / 4
LOGDERIV_STEP = 0.5
PRECISE_BELOW = 1e-6
BOUNDARY_TOL = 1e-10
MAX_POINTS_PER_EDGE = 400_000
MULT_TOL = 1e-6


class ContourError(RuntimeError):
    pass


class BoundaryZeroError(ContourError):
    pass


@dataclass(frozen=True)
class Rect:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (
            self.re_min - pad <= z.real <= self.re_max + pad and self.im_min - pad <= z.imag <= self.im_max + pad
        )

    def inflate(self, d: float) -> Rect:
        return Rect(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)

    def corners(self) -> list[complex]:
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    def split(self, fx: float = 0.5, fy: float = 0.5) -> list[Rect]:
        x = self.re_min + fx * (self.re_max - self.re_min)
        y = self.im_min + fy * (self.im_max - self.im_min)
        return [
            Rect(self.re_min, x, self.im_min, y),
            Rect(x, self.re_max, self.im_min, y),
            Rect(self.re_min, x, y, self.im_max),
            Rect(x, self.re_max, y, self.im_max),
        ]

    def as_list(self) -> list[float]:
        return [self.re_min, self.re_max, self.im_min, self.im_max]


@dataclass
class RootRecord:
    location: complex
    multiplicity: int
    residuals: list[float]
    method: str = "contour"
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "re": self.location.real,
            "im": self.location.imag,
            "multiplicity": self.multiplicity,
            "residuals": list(self.residuals),
            "method": self.method,
            "note": self.note,
        }


class AnalyticTarget:
    """Interface expected by the counting and isolation routines."""

    #: coefficients are real, so zeros come in conjugate pairs
    real: bool = True

    def sample(self, s: np.ndarray):
        """Return ``(phase, logderiv, rel)`` arrays for points ``s``."""
        raise NotImplementedError

    def sample_precise(self, s: complex):
        """Scalar extended-precision version of :meth:`sample`."""
        raise NotImplementedError

    def derivs(self, s: complex, orders) -> list[complex]:
        raise NotImplementedError

    def scale(self) -> float:
        return 1.0

    def points_of_interest(self) -> list[complex]:
        return [0j]

    def deriv_scale(self, z: complex, j: int) -> float:
        """Magnitude against which ``|f^(j)(z)|`` is judged to be zero."""
        return factorial(j) * max(1.0, abs(z)) ** (-j) * self.scale()


def _wrap(d: np.ndarray) -> np.ndarray:
    return (d + math.pi) % TWO_PI - math.pi


def _evaluate(target: AnalyticTarget, s: np.ndarray):
    phase, logd, rel = target.sample(s)
    phase = np.array(phase, dtype=float)
    logd = np.array(logd, dtype=complex)
    rel = np.array(rel, dtype=float)
    bad = ~(rel >= PRECISE_BELOW) | ~np.isfinite(phase) | ~np.isfinite(logd)
    for i in np.flatnonzero(bad):
        phase[i], logd[i], rel[i] = target.sample_precise(complex(s[i]))
    return phase, logd, rel


def _initial_params(A: complex, B: complex, interest: list[complex]) -> np.ndarray:
    L = abs(B - A)
    ts = [np.linspace(0.0, 1.0, 33)]
    geo = np.logspace(-10, 0, 41)
    ts.append(geo * 0.5)
    ts.append(1 - geo * 0.5)
    d = (B - A) / L
    for p in interest:
        # projection of p onto the edge, clamped
        tp = ((p - A) * d.conjugate()).real / L
        if 0 < tp < 1:
            off = np.logspace(-9, 0, 37) * 0.5
            ts.append(np.clip(tp - off, 0, 1))
            ts.append(np.clip(tp + off, 0, 1))
            ts.append(np.array([tp]))
    t = np.unique(np.concatenate(ts))
    return t


def _edge_phase_change(target: AnalyticTarget, A: complex, B: complex, interest) -> float:
    L = abs(B - A)
    t = _initial_params(A, B, interest)
    phase, logd, rel = _evaluate(target, A + (B - A) * t)
    min_dt = 1e-14 * max(1.0, abs(A), abs(B)) / L
    verified = False
    while True:
        if len(t) > MAX_POINTS_PER_EDGE:
            raise ContourError(f"edge {A}->{B}: refinement exceeded {MAX_POINTS_PER_EDGE} points")
        dt = np.diff(t)
        ds = (B - A) * dt
        dphi = _wrap(np.diff(phase))
        with np.errstate(invalid="ignore", over="ignore"):
            rate = np.maximum(np.abs((logd[:-1] * ds).imag), np.abs((logd[1:] * ds).imag))
        rate[~np.isfinite(rate)] = np.inf
        flag = (np.abs(dphi) > PHASE_STEP) | (rate > LOGDERIV_STEP)
        tiny = dt < min_dt
        if np.any(flag & tiny & (np.abs(dphi) > math.pi / 2)):
            raise BoundaryZeroError(f"zero on or within {min_dt * L:.1e} of edge {A}->{B}")
        flag &= ~tiny
        if not flag.any():
            if verified:
                break
            # converged: bisect every segment once and require the same total
            before = float(np.sum(dphi))
            flag = ~tiny
        else:
            before = None
        idx = np.flatnonzero(flag)
        tm = 0.5 * (t[idx] + t[idx + 1])
        pm, lm, rm = _evaluate(target, A + (B - A) * tm)
        t = np.insert(t, idx + 1, tm)
        phase = np.insert(phase, idx + 1, pm)
        logd = np.insert(logd, idx + 1, lm)
        rel = np.insert(rel, idx + 1, rm)
        if before is not None:
            after = float(np.sum(_wrap(np.diff(phase))))
            verified = abs(after - before) < 1e-6
    s = A + (B - A) * t
    inv = 1.0 / np.maximum(np.abs(logd), 1e-300)
    if np.any(rel == 0) or np.any(inv < BOUNDARY_TOL * (1 + np.abs(s))):
        raise BoundaryZeroError(f"zero on edge {A}->{B}")
    return float(np.sum(_wrap(np.diff(phase))))


def winding_number(target: AnalyticTarget, rect: Rect) -> int:
    """Zeros of the target inside ``rect`` (with multiplicity)."""
    cs = rect.corners()
    interest = list(target.points_of_interest()) + [rect.center]
    total = 0.0
    for i in range(4):
        total += _edge_phase_change(target, cs[i], cs[(i + 1) % 4], interest)
    w = total / TWO_PI
    k = round(w)
    if abs(w - k) > 0.05:
        raise ContourError(f"non-integer winding {w:.6f} on {rect}")
    if k < 0:
        raise ContourError(f"negative winding {k} on {rect}: target has poles or sampling failed")
    return int(k)


def count_zeros(target: AnalyticTarget, rect: Rect, retries: int = 5, inflate: float = 1e-3) -> int:
    r = rect
    for attempt in range(retries + 1):
        try:
            return winding_number(target, r)
        except BoundaryZeroError:
            if attempt == retries:
                raise
            r = r.inflate(inflate)
    raise AssertionError("unreachable")


def _count_with_rect(target, rect, retries=5, inflate=1e-3):
    r = rect
    for attempt in range(retries + 1):
        try:
            return winding_number(target, r), r
        except BoundaryZeroError:
            if attempt == retries:
                raise
            r = r.inflate(inflate)
    raise AssertionError("unreachable")


def newton(
    target: AnalyticTarget, z0: complex, order: int = 0, maxiter: int = 100, bound: float | None = None
) -> tuple[complex, bool]:
    """Newton iteration on the ``order``-th derivative of the target.

    Gives up if an iterate strays farther than ``bound`` from ``z0``.
    """
    z = complex(z0)
    for _ in range(maxiter):
        try:
            f, df = target.derivs(z, (order, order + 1))
        except (ArithmeticError, RuntimeError):
            return z, False
        if f == 0:
            return z, True
        if df == 0 or not np.isfinite(df):
            return z, False
        step = f / df
        z = z - step
        if not np.isfinite(z) or (bound is not None and abs(z - z0) > bound):
            return z, False
        if abs(step) <= 4e-16 * max(1.0, abs(z)):
            return z, True
    return z, False


def multiplicity(target: AnalyticTarget, z: complex, max_order: int, mult_tol: float = MULT_TOL) -> tuple[int, bool, list[float]]:
    """Smallest ``j`` with a derivative clearly away from zero.

    Returns ``(j, ambiguous, |f^(i)(z)| for i <= j)``.
    """
    vals = [abs(v) for v in target.derivs(z, range(max_order + 1))]
    for j, v in enumerate(vals):
        thr = mult_tol * target.deriv_scale(z, j)
        if v > thr:
            ambiguous = v < 10 * thr or (j > 0 and vals[j - 1] > 0.1 * mult_tol * target.deriv_scale(z, j - 1))
            return j, ambiguous, vals[: j + 1]
    return max_order + 1, True, vals


def _local_count(target, z: complex, radius: float) -> int | None:
    try:
        return count_zeros(target, Rect(z.real - radius, z.real + radius, z.imag - radius, z.imag + radius), retries=2, inflate=radius * 0.1)
    except ContourError:
        return None


@dataclass
class _Finder:
    target: AnalyticTarget
    tol: float
    max_mult: int
    max_depth: int = 40
    roots: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)

    def accept(self, z: complex, count: int, rect: Rect) -> bool:
        sc = self.target.scale()
        if count > 1:
            zp, ok = newton(self.target, z, order=count - 1)
            if ok and abs(zp - z) <= 1e-6 * max(1.0, abs(z)):
                z = zp
        if self.target.real and abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        if not rect.contains(z, pad=1e-12 * max(1.0, abs(z))):
            return False
        f0 = abs(self.target.derivs(z, (0,))[0])
        if f0 > self.tol * sc:
            return False
        mult, ambiguous, res = multiplicity(self.target, z, min(self.max_mult, count + 1))
        if ambiguous:
            radius = 0.25 * min(rect.re_max - rect.re_min, rect.im_max - rect.im_min, 1e-2 * max(1.0, abs(z)))
            local = _local_count(self.target, z, radius)
            if local:
                mult = local
                res = [abs(v) for v in self.target.derivs(z, range(mult + 1))]
        if mult != count:
            return False
        if len(res) < mult + 1:
            res = [abs(v) for v in self.target.derivs(z, range(mult + 1))]
        self.roots.append(RootRecord(z, mult, [float(x) for x in res[: mult + 1]], "contour"))
        return True

    def run(self, rect: Rect, count: int, depth: int = 0) -> None:
        if count == 0:
            return
        reach = 2 * rect.diameter
        z, ok = newton(self.target, rect.center, order=count - 1, bound=reach)
        if ok and self.accept(z, count, rect):
            return
        if count > 1:
            # a cluster may still be one root of lower apparent order; try plain Newton
            z, ok = newton(self.target, rect.center, order=0, bound=reach)
            if ok and rect.contains(z):
                mult, _, _ = multiplicity(self.target, z, min(self.max_mult, count + 1))
                if mult == count and self.accept(z, count, rect):
                    return
        if depth >= self.max_depth:
            self.unresolved.append((rect, count))
            return
        for fx, fy in ((0.5, 0.5), (0.4871, 0.5137), (0.5413, 0.4629)):
            subs = rect.split(fx, fy)
            try:
                counts = [count_zeros(self.target, r, retries=0) for r in subs]
            except ContourError:
                continue
            if sum(counts) == count:
                for r, c in zip(subs, counts):
                    self.run(r, c, depth + 1)
                return
        self.unresolved.append((rect, count))


def find_zeros(target: AnalyticTarget, rect: Rect, tol: float = 1e-10, max_mult: int = 64):
    """Isolate zeros in ``rect``; returns ``(roots, unresolved, total_count)``."""
    total, r = _count_with_rect(target, rect)
    finder = _Finder(target, tol, max_mult)
    finder.run(r, total)
    roots = sorted(finder.roots, key=lambda rr: (round(rr.location.real, 10), round(rr.location.imag, 10)))
    return roots, finder.unresolved, total
