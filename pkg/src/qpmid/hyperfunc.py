"""Kummer's confluent hypergeometric function and the Whittaker function M.

The series is summed directly.  When the terms are much larger than the
result (destructive cancellation) the sum is repeated in extended precision,
with the working precision chosen from the observed cancellation ratio.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np

from ._quad import integrate

MAX_TERMS = 10_000
REFLECT_BELOW = -10.0
_EPS = 2.0**-52


class ParameterError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class BranchCutWarning(UserWarning):
    pass


def _near_int(x: float, tol: float = 1e-12) -> bool:
    return abs(x - round(x)) <= tol


@dataclass(frozen=True)
class KummerParams:
    a: float
    b: float

    def __post_init__(self):
        b = float(self.b)
        if b <= 0 and _near_int(b):
            raise ParameterError(f"b = {b} is zero or a negative integer")


@dataclass(frozen=True)
class WhittakerParams:
    k: float
    l: float

    def __post_init__(self):
        two_l = 2 * float(self.l)
        if two_l < 0 and _near_int(two_l):
            raise ParameterError(f"2l = {two_l} is a negative integer")

    @property
    def kummer(self) -> KummerParams:
        return KummerParams(0.5 + self.l - self.k, 1 + 2 * self.l)

    @property
    def exponent(self) -> float:
        return 0.5 + self.l


def _series_double(a: float, b: float, z: complex, tol: float):
    """Compensated summation; returns (sum, max |term|, terms used)."""
    s = 0j
    c = 0j
    t = 1 + 0j
    tmax = 1.0
    small = 0
    for k in range(MAX_TERMS):
        y = t - c
        nxt = s + y
        c = (nxt - s) - y
        s = nxt
        at = abs(t)
        if at > tmax:
            tmax = at
        if t == 0:
            return s, tmax, k + 1
        if at < tol * abs(s):
            small += 1
            if small >= 3:
                return s, tmax, k + 1
        else:
            small = 0
        t = t * (a + k) / ((b + k) * (k + 1)) * z
    raise ConvergenceError(f"Kummer series for a={a}, b={b}, z={z} did not converge in {MAX_TERMS} terms")


def _series_mp(a, b, z, dps: int):
    with mpmath.workdps(dps):
        a = mpmath.mpf(a)
        b = mpmath.mpf(b)
        z = mpmath.mpc(z)
        s = mpmath.mpc(0)
        t = mpmath.mpc(1)
        eps = mpmath.mpf(10) ** (-dps)
        small = 0
        for k in range(MAX_TERMS):
            s += t
            if t == 0:
                return s
            if abs(t) < eps * abs(s):
                small += 1
                if small >= 3:
                    return s
            else:
                small = 0
            t = t * (a + k) / ((b + k) * (k + 1)) * z
    raise ConvergenceError(f"Kummer series for a={a}, b={b}, z={z} did not converge in {MAX_TERMS} terms")


def _phi_direct(a: float, b: float, z: complex, tol: float) -> complex:
    s, tmax, _ = _series_double(a, b, z, tol)
    ratio = tmax / max(abs(s), 1e-300)
    if ratio * _EPS * 64 > tol:
        digits = 20 + int(math.ceil(math.log10(ratio)))
        return complex(_series_mp(a, b, z, digits))
    return s


def kummer_phi(p: KummerParams, z: complex, tol: float = 1e-15) -> complex:
    """Kummer's function Phi(a, b, z) for real parameters.

    For ``Re z < -10`` the reflection ``Phi(a,b,z) = e^z Phi(b-a,b,-z)`` is
    used.  See :func:`phi` for a positional shorthand.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    z = complex(z)
    a, b = float(p.a), float(p.b)
    if z.real < REFLECT_BELOW:
        return cmath.exp(z) * _phi_direct(b - a, b, -z, tol)
    return _phi_direct(a, b, z, tol)


def phi(a: float, b: float, z: complex, tol: float = 1e-15) -> complex:
    return kummer_phi(KummerParams(a, b), z, tol)


def phi_scale(a: float, b: float, z: complex) -> float:
    """Sum of |terms| of the series (after reflection when it applies).

    Used as the magnitude against which residuals are judged.
    """
    z = complex(z)
    factor = 1.0
    if z.real < REFLECT_BELOW:
        factor = math.exp(z.real)
        a, z = b - a, -z
    total = 0.0
    t = 1.0
    for k in range(MAX_TERMS):
        total += t
        if t < 1e-17 * total:
            break
        t = t * abs((a + k) / ((b + k) * (k + 1))) * abs(z)
    return factor * total


def phi_derivative(p: KummerParams, z: complex, order: int = 1, tol: float = 1e-15) -> complex:
    """``order``-th z-derivative of Phi, from the term-wise differentiated series.

    Differentiating ``sum (a)_k/(b)_k z^k/k!`` ``j`` times and shifting the
    index gives ``(a)_j/(b)_j * sum (a+j)_k/(b+j)_k z^k/k!``.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    a, b = float(p.a), float(p.b)
    coef = 1.0
    for i in range(order):
        coef *= (a + i) / (b + i)
    if coef == 0:
        return 0j
    return coef * kummer_phi(KummerParams(a + order, b + order), z, tol)


def phi_parameter_derivative(a: float, b: float, z: complex) -> complex:
    """d/da Phi(a, b, z), differentiating the Pochhammer products directly.

    Uses ``D_{k+1} = D_k (a+k) + (a)_k`` so nonpositive-integer ``a`` is fine.
    Evaluated in 30-digit arithmetic.
    """
    with mpmath.workdps(30):
        a = mpmath.mpf(a)
        b = mpmath.mpf(b)
        z = mpmath.mpc(z)
        poch = mpmath.mpf(1)
        dpoch = mpmath.mpf(0)
        bk = mpmath.mpf(1)
        zk = mpmath.mpc(1)
        s = mpmath.mpc(0)
        small = 0
        for k in range(MAX_TERMS):
            t = dpoch / bk * zk
            s += t
            if k > 2 and abs(t) < mpmath.mpf(10) ** -28 * max(abs(s), 1e-300) and abs(poch / bk * zk) < 1e-28:
                small += 1
                if small >= 3:
                    return complex(s)
            else:
                small = 0
            dpoch = dpoch * (a + k) + poch
            poch = poch * (a + k)
            bk = bk * (b + k) * (k + 1)
            zk = zk * z
    raise ConvergenceError("parameter derivative series did not converge")


def phi_array(a: float, b: float, z: np.ndarray) -> np.ndarray:
    """Vectorised Phi in double precision (no cancellation recovery).

    Intended for dense sampling, e.g. along contours.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    refl = z.real < REFLECT_BELOW
    for mask, aa, zz, pref in (
        (~refl, a, z, None),
        (refl, b - a, -z, z),
    ):
        if not mask.any():
            continue
        zm = zz[mask]
        s = np.zeros_like(zm)
        t = np.ones_like(zm)
        for k in range(MAX_TERMS):
            s = s + t
            if np.all(np.abs(t) <= 1e-17 * np.abs(s)) and k > 2:
                break
            t = t * ((aa + k) / ((b + k) * (k + 1))) * zm
        else:
            raise ConvergenceError("vectorised Kummer series did not converge")
        if pref is not None:
            s = s * np.exp(pref[mask])
        out[mask] = s
    return out


def phi_array_scale(a: float, b: float, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape)
    refl = z.real < REFLECT_BELOW
    for mask, aa, zz, pref in ((~refl, a, z, None), (refl, b - a, -z, z)):
        if not mask.any():
            continue
        r = np.abs(zz[mask])
        s = np.zeros_like(r)
        t = np.ones_like(r)
        for k in range(MAX_TERMS):
            s = s + t
            if np.all(t <= 1e-17 * s) and k > 2:
                break
            t = t * abs((aa + k) / ((b + k) * (k + 1))) * r
        if pref is not None:
            s = s * np.exp(pref[mask].real)
        out[mask] = s
    return out


def kummer_integral_oracle(p: KummerParams, z: complex, rtol: float = 1e-10) -> complex:
    """Phi from its Euler integral, valid for ``b > a > 0``.

    Endpoint singularities ``t^(a-1)`` (a < 1) and ``(1-t)^(b-a-1)``
    (b - a < 1) are removed by the substitutions ``t = u^(1/a)`` on
    ``[0, 1/2]`` and ``1 - t = v^(1/(b-a))`` on ``[1/2, 1]``.
    """
    a, b = float(p.a), float(p.b)
    if not b > a > 0:
        raise ParameterError(f"integral representation needs b > a > 0 (got a={a}, b={b})")
    z = complex(z)
    c = b - a

    def plain(t):
        return np.exp(z * t) * t ** (a - 1) * (1 - t) ** (c - 1)

    def left(u):
        t = u ** (1.0 / a)
        return np.exp(z * t) * (1 - t) ** (c - 1) / a

    def right(v):
        t = 1 - v ** (1.0 / c)
        return np.exp(z * t) * t ** (a - 1) / c

    eps = rtol * 1e-2
    if a < 1:
        i1 = integrate(left, 0.0, 0.5**a, rtol=eps).value
    else:
        i1 = integrate(plain, 0.0, 0.5, rtol=eps).value
    if c < 1:
        i2 = integrate(right, 0.0, 0.5**c, rtol=eps).value
    else:
        i2 = integrate(plain, 0.5, 1.0, rtol=eps).value
    norm = math.exp(math.lgamma(b) - math.lgamma(a) - math.lgamma(c))
    return norm * (i1 + i2)


def kummer_ode_residual(p: KummerParams, z: complex) -> complex:
    """``z Phi'' + (b - z) Phi' - a Phi`` from term-wise derivatives."""
    z = complex(z)
    f0 = kummer_phi(p, z)
    f1 = phi_derivative(p, z, 1)
    f2 = phi_derivative(p, z, 2)
    return z * f2 + (p.b - z) * f1 - p.a * f0


def _principal_power(z: complex, mu: float) -> complex:
    if z == 0:
        if mu > 0:
            return 0j
        raise ParameterError("z = 0 with non-positive exponent")
    if z.imag == 0 and z.real < 0 and not _near_int(mu):
        warnings.warn(
            f"z = {z.real} lies on the branch cut of z^{mu}; returning the principal value",
            BranchCutWarning,
            stacklevel=3,
        )
    return cmath.exp(mu * cmath.log(z))


def whittaker_m(w: WhittakerParams, z: complex) -> complex:
    """``M_{k,l}(z) = e^{-z/2} z^{1/2+l} Phi(1/2+l-k, 1+2l, z)``, principal branch."""
    z = complex(z)
    power = _principal_power(z, w.exponent)
    if power == 0:
        return 0j
    return cmath.exp(-z / 2) * power * kummer_phi(w.kummer, z)


def whittaker_m_derivative(w: WhittakerParams, z: complex) -> complex:
    z = complex(z)
    mu = w.exponent
    power = _principal_power(z, mu)
    f = kummer_phi(w.kummer, z)
    df = phi_derivative(w.kummer, z, 1)
    return cmath.exp(-z / 2) * power * ((mu / z - 0.5) * f + df)


def whittaker_scale(w: WhittakerParams, z: complex) -> float:
    """Magnitude scale for judging |M| residuals at ``z``."""
    z = complex(z)
    kp = w.kummer
    return abs(cmath.exp(-z / 2)) * abs(z) ** w.exponent * phi_scale(kp.a, kp.b, z)
