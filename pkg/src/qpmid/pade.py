"""Explicit Padé approximants of the exponential.

Two conventions are kept side by side:

``perron_raw``
    The classical closed-form coefficients.  With ``den`` monic of degree
    ``n`` they satisfy ``den(z) e^{-z} - num(z) = O(z^{n+m+1})``, i.e. they
    approximate ``e^{-z}``.

``exp_normalized``
    The reflected pair ``den(z) = (-1)^n P(-z)``, ``num(z) = (-1)^{n+1} Q(-z)``
    with ``den(z) e^{z} + num(z) = O(z^{n+m+1})``.  This is the form that
    appears after normalising a quasipolynomial at a root of maximal
    multiplicity.

Both order contracts are checked with exact rational series at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath
import numpy as np

from ._quad import integrate
from .polycore import Polynomial, TruncatedSeries, order_of_vanishing, series_mul_exp

PERRON_RAW = "perron_raw"
EXP_NORMALIZED = "exp_normalized"


class PadeContractError(AssertionError):
    pass


@dataclass(frozen=True)
class PadePair:
    num: Polynomial
    den: Polynomial
    n: int
    m: int
    convention: str

    def remainder_series(self, extra: int = 1):
        """Exact series of the approximation error through ``z^(n+m+extra)``."""
        order = self.n + self.m + extra
        if self.convention == PERRON_RAW:
            return series_mul_exp(self.den, -1, order) - TruncatedSeries.from_polynomial(self.num, order)
        return series_mul_exp(self.den, 1, order) + TruncatedSeries.from_polynomial(self.num, order)

    def verify(self) -> None:
        if self.den.degree > self.n or self.num.degree > self.m:
            raise PadeContractError(f"degree bound violated for ({self.n},{self.m})")
        if self.den.coeff(self.n) != 1:
            raise PadeContractError("denominator is not monic")
        s = self.remainder_series()
        k = order_of_vanishing(s, 0)
        if k != self.n + self.m + 1:
            raise PadeContractError(f"remainder vanishes to order {k}, expected {self.n + self.m + 1}")

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "convention": self.convention,
            "den": [str(c) for c in self.den.coeffs],
            "num": [str(c) for c in self.num.coeffs],
        }


def perron_pair(n: int, m: int) -> PadePair:
    """Closed-form pair, denominator monic of degree ``n``."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    den = Polynomial(
        tuple(
            Fraction(factorial(n + m - k) * factorial(n), factorial(k) * factorial(m) * factorial(n - k))
            for k in range(n + 1)
        )
    )
    num = Polynomial(
        tuple(
            Fraction((-1) ** k * factorial(n + m - k), factorial(k) * factorial(m - k)) for k in range(m + 1)
        )
    )
    pair = PadePair(num, den, n, m, PERRON_RAW)
    pair.verify()
    return pair


def exp_pade_normalized(n: int, m: int) -> PadePair:
    raw = perron_pair(n, m)
    sign = (-1) ** n
    den = raw.den.reflect() * sign
    num = raw.num.reflect() * (-sign)
    pair = PadePair(num, den, n, m, EXP_NORMALIZED)
    pair.verify()
    return pair


def remainder_identity(n: int, m: int, z: complex, rtol: float = 1e-12) -> tuple[complex, complex]:
    """Both sides of the integral form of the Padé remainder.

    ``lhs = den(z) e^z + num(z)`` for the exp-normalised pair, evaluated in
    40-digit arithmetic to avoid cancellation; ``rhs`` is
    ``z^(n+m+1)/m! * int_0^1 e^(tz) (1-t)^m t^n dt`` by adaptive quadrature.
    """
    pair = exp_pade_normalized(n, m)
    with mpmath.workdps(40):
        zz = mpmath.mpc(z)
        lhs = pair.den(zz) * mpmath.exp(zz) + pair.num(zz)
        lhs = complex(lhs)
    z = complex(z)
    if z == 0:
        return lhs, 0j

    def integrand(t):
        return np.exp(t * z) * (1 - t) ** m * t**n

    res = integrate(integrand, 0.0, 1.0, rtol=rtol)
    rhs = z ** (n + m + 1) / factorial(m) * res.value
    return lhs, rhs
