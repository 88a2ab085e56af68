"""Quasipolynomials with a real root of maximal multiplicity.

``synthesize_coeffs`` places a root of multiplicity ``n + m + 1`` (the
largest possible) at a prescribed real ``s0``.  ``check_equivalences``
tests the four equivalent characterisations of that situation: the
multiplicity itself, the Padé form of the normalised polynomials, the
Kummer-function closed form of the normalised quasipolynomial, and the
explicit coefficient formulas.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import mpmath

from .contour import Rect
from .hyperfunc import KummerParams, kummer_phi
from .pade import exp_pade_normalized
from .polycore import Polynomial, as_fraction
from .quasipoly import (
    STRIP_INSET,
    Quasipolynomial,
    _qp_eval_mp,
    count_zeros_in_rect,
    right_bound,
    root_multiplicity,
)

DERIV_TOL = 1e-8
PADE_TOL = 1e-9
KUMMER_TOL = 1e-9
COEFF_TOL = 1e-9
DOMINANCE_GAP = 1e-6


def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


@dataclass(frozen=True)
class MIDDesign:
    n: int
    m: int
    tau: Fraction
    s0: Fraction
    a: tuple[Fraction, ...]
    alpha_rational: tuple[Fraction, ...]

    @property
    def alpha(self) -> list[float]:
        g = math.exp(float(self.s0 * self.tau))
        return [g * float(c) for c in self.alpha_rational]

    @property
    def a_float(self) -> list[float]:
        return [float(c) for c in self.a]

    def quasipolynomial(self) -> Quasipolynomial:
        return Quasipolynomial(self.n, self.m, self.tau, self.a, self.alpha_rational, self.s0 * self.tau)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "tau": float(self.tau),
            "s0": float(self.s0),
            "a": self.a_float,
            "alpha": self.alpha,
            "a_exact": [str(c) for c in self.a],
            "alpha_exact": [f"({c})*exp({self.s0 * self.tau})" for c in self.alpha_rational],
        }


def synthesize_coeffs(n: int, m: int, tau, s0) -> MIDDesign:
    """Coefficients giving ``s0`` multiplicity ``n + m + 1``.

    The sums are evaluated exactly; only the common factor ``e^{s0 tau}`` of
    the delayed coefficients is left symbolic (see ``MIDDesign``).
    """
    if n < 1 or not 0 <= m <= n:
        raise ValueError("need n >= 1 and 0 <= m <= n")
    tau = as_fraction(tau)
    s0 = as_fraction(s0)
    if tau <= 0:
        raise ValueError("tau must be > 0")
    a = []
    for k in range(n):
        acc = Fraction(0)
        for j in range(k, n + 1):
            acc += Fraction(comb(j, k) * comb(m + n - j, m)) * s0 ** (j - k) / (factorial(j) * tau ** (n - j))
        a.append((-1) ** (n - k) * factorial(n) * acc)
    alpha = []
    for k in range(m + 1):
        acc = Fraction(0)
        for j in range(k, m + 1):
            acc += (
                Fraction((-1) ** (j - k) * factorial(m + n - j), factorial(k) * factorial(j - k) * factorial(m - j))
                * s0 ** (j - k)
                / tau ** (n - j)
            )
        alpha.append((-1) ** (n - 1) * acc)
    return MIDDesign(n, m, tau, s0, tuple(a), tuple(alpha))


def s0_from_coeffs(n: int, m: int, tau, a_top):
    """Location of a maximal-multiplicity root implied by ``a_{n-1}``."""
    if isinstance(tau, (int, Fraction)) and isinstance(a_top, (int, Fraction)):
        return -Fraction(a_top) / n - Fraction(m + 1) / Fraction(tau)
    return -float(a_top) / n - (m + 1) / float(tau)


def stability_criterion(n: int, m: int, tau, a_top) -> bool:
    """Exponential stability of a maximal-multiplicity design.

    Only meaningful when the coefficients come from ``synthesize_coeffs``;
    that is not checked here (see ``stability_criterion_strict``).
    """
    return a_top > -n * (m + 1) / tau


def stability_criterion_strict(q: Quasipolynomial) -> bool:
    s0 = s0_from_coeffs(q.n, q.m, q.tau, q.a[-1])
    report = check_equivalences(q, s0)
    if not report.all_true:
        raise ValueError(f"coefficients are not a maximal-multiplicity design at s0={float(s0)}")
    return stability_criterion(q.n, q.m, q.tau, q.a[-1])


@dataclass(frozen=True)
class NormalizedForm:
    p_tilde: Polynomial
    q_tilde: Polynomial
    n: int
    m: int
    source: Quasipolynomial
    s0: Fraction

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        return complex(self.p_tilde(z) + cmath.exp(-z) * self.q_tilde(z))

    def quasipolynomial(self) -> Quasipolynomial:
        """The normalised function as a quasipolynomial with unit delay."""
        qt = [self.q_tilde.coeff(k) for k in range(self.m + 1)]
        return Quasipolynomial(self.n, self.m, 1, self.p_tilde.coeffs[: self.n], qt)

    def scale(self) -> float:
        return 1.0 + sum(abs(float(c)) for c in self.p_tilde.coeffs) + sum(abs(float(c)) for c in self.q_tilde.coeffs)


def normalize(q: Quasipolynomial, s0) -> NormalizedForm:
    """Shift ``s0`` to the origin and rescale time by ``tau``."""
    s0 = as_fraction(s0)
    tau = q.tau
    tn = tau**q.n
    p_t = q.p_poly.compose_affine(s0, 1 / tau) * tn
    if q.delay_gain_log == s0 * tau:
        factor = Fraction(1)
    else:
        factor = Fraction(math.exp(float(q.delay_gain_log - s0 * tau)))
    q_t = q.q_poly.compose_affine(s0, 1 / tau) * (tn * factor)
    return NormalizedForm(p_t, q_t, q.n, q.m, q, s0)


def kummer_side(n: int, m: int, z: complex) -> complex:
    """``n! z^(n+m+1) / (n+m+1)! * Phi(m+1, n+m+2, -z)``."""
    N = n + m + 1
    z = complex(z)
    return factorial(n) / factorial(N) * z**N * kummer_phi(KummerParams(m + 1, N + 1), -z)


def kummer_grid(radius: float = 5.0) -> list[complex]:
    """81 points in the closed disc: 9 radii times 9 angles."""
    pts = []
    for i in range(1, 10):
        r = radius * i / 9
        for j in range(9):
            pts.append(cmath.rect(r, 2 * math.pi * j / 9 + 0.1 * i))
    return pts


@dataclass
class EquivalenceReport:
    item_a: bool
    item_b: bool
    item_c: bool
    item_d: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def all_true(self) -> bool:
        return self.item_a and self.item_b and self.item_c and self.item_d

    @property
    def coherent(self) -> bool:
        flags = {self.item_a, self.item_b, self.item_c, self.item_d}
        return len(flags) == 1

    def as_dict(self) -> dict:
        return {
            "item_a": self.item_a,
            "item_b": self.item_b,
            "item_c": self.item_c,
            "item_d": self.item_d,
            "coherent": self.coherent,
            "diagnostics": self.diagnostics,
        }


def derivative_residuals(q: Quasipolynomial, s0, dps: int = 60) -> list[float]:
    """``|Delta^(j)(s0)|`` for ``j = 0..n+m+1`` in extended precision."""
    N = q.n + q.m + 1
    s0 = as_fraction(s0)
    with mpmath.workdps(dps):
        s = mpmath.mpc(_mpf(s0))
        return [float(abs(_qp_eval_mp(q, s, j))) for j in range(N + 1)]


def check_equivalences(q: Quasipolynomial, s0) -> EquivalenceReport:
    n, m = q.n, q.m
    N = n + m + 1
    s0 = as_fraction(s0)
    sc = q.scale()
    diag: dict = {"s0": float(s0), "scale": sc}

    res = derivative_residuals(q, s0)
    worst = max(res[:N]) if N else 0.0
    # P is monic, so no zero can be of order above N; vanishing below N suffices
    item_a = worst <= DERIV_TOL * sc
    diag["a"] = {
        "max_residual_below_order": worst,
        "top_derivative": res[N],
        "expected_top_derivative": float(factorial(n) * q.tau ** (m + 1)),
    }

    nf = normalize(q, s0)
    pade = exp_pade_normalized(n, m)
    rel_b = 0.0
    for mine, ref in ((nf.p_tilde, pade.den), (nf.q_tilde, pade.num)):
        for k in range(max(len(mine.coeffs), len(ref.coeffs))):
            y = ref.coeff(k)
            x = mine.coeff(k)
            denom = abs(y) if y != 0 else Fraction(1)
            rel_b = max(rel_b, float(abs(x - y) / denom))
    item_b = rel_b <= PADE_TOL
    diag["b"] = {"max_relative_coeff_error": rel_b}

    nsc = nf.scale()
    err_c = max(abs(nf(z) - kummer_side(n, m, z)) for z in kummer_grid())
    item_c = err_c < KUMMER_TOL * nsc
    diag["c"] = {"max_grid_error": err_c, "scale": nsc}

    d = synthesize_coeffs(n, m, q.tau, s0)
    dq = d.quasipolynomial()
    err_d = 0.0
    for x, y in zip(list(q.pc[:-1]) + list(q.qc), list(dq.pc[:-1]) + list(dq.qc)):
        err_d = max(err_d, abs(x - y) / max(1.0, abs(y)))
    item_d = err_d <= COEFF_TOL
    diag["d"] = {"max_relative_coeff_error": err_d}
    return EquivalenceReport(item_a, item_b, item_c, item_d, diag)


@dataclass
class DominanceReport:
    dominant: bool
    right_count: int
    strip_count: int
    multiplicity: int
    right_rect: list
    strip_rect: list
    note: str = (
        "numerical corroboration only: for m <= n dominance of s0 is an analytic result; "
        "counts are restricted to the stated rectangles"
    )

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def verify_dominance(d: MIDDesign, im_cap: float | None = None) -> DominanceReport:
    """Count zeros right of ``s0`` and in the strip ``|Im s| < 2 pi / tau``.

    Counting is done on the normalised quasipolynomial
    ``tau^n Delta(s0 + z/tau)``; the affine change of variable preserves
    zero counts and keeps coefficients moderate.
    """
    q = d.quasipolynomial()
    tau = float(d.tau)
    s0 = float(d.s0)
    if im_cap is None:
        im_cap = 8 * math.pi / tau
    R = right_bound(q)
    nq = normalize(q, d.s0).quasipolynomial()
    right = Rect(s0 + DOMINANCE_GAP, R, -im_cap, im_cap)
    # zeros of the normalised function cannot lie right of its own bound
    z_right = Rect(tau * DOMINANCE_GAP, min(tau * (R - s0), right_bound(nq)), -tau * im_cap, tau * im_cap)
    right_count = count_zeros_in_rect(nq, z_right)
    h = 2 * math.pi / tau - STRIP_INSET
    strip = Rect(s0 - R, s0 + R, -h, h)
    z_strip = Rect(-tau * R, tau * R, -tau * h, tau * h)
    strip_count = count_zeros_in_rect(nq, z_strip)
    mult = root_multiplicity(nq, 0.0)
    return DominanceReport(
        dominant=right_count == 0 and strip_count == mult == d.n + d.m + 1,
        right_count=right_count,
        strip_count=strip_count,
        multiplicity=mult,
        right_rect=right.as_list(),
        strip_rect=strip.as_list(),
    )


def thread_count() -> int:
    env = os.environ.get("QPMID_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep(fn, items):
    """Map ``fn`` over ``items`` concurrently; results keep input order."""
    items = list(items)
    workers = min(thread_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
