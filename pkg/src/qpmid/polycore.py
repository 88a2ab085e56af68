"""Dense rational polynomials and truncated power series.

Coefficients are stored lowest degree first as :class:`fractions.Fraction`.
Evaluation works for any numeric argument that supports ``+`` and ``*``
(Fraction, float, complex, mpmath numbers).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence


def as_fraction(x) -> Fraction:
    """Convert ``x`` to a Fraction without rounding.

    Floats are taken at their exact binary value; strings may be decimal
    (``"0.3"``) or ratios (``"3/7"``).
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float, str)):
        return Fraction(x)
    # mpmath / numpy scalars
    return Fraction(float(x))


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [as_fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, *coeffs) -> Polynomial:
        return cls(tuple(coeffs))

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __call__(self, z):
        return poly_eval(self, z)

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs))

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coeff(k) + other.coeff(k) for k in range(n)))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            c = as_fraction(other)
            return Polynomial(tuple(c * x for x in self.coeffs))
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def derivative(self, order: int = 1) -> Polynomial:
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [k * c for k, c in enumerate(cs)][1:]
        return Polynomial(tuple(cs))

    def compose_affine(self, shift, scale) -> Polynomial:
        """Return ``z -> p(shift + scale * z)`` expanded binomially."""
        shift, scale = as_fraction(shift), as_fraction(scale)
        out = [Fraction(0)] * len(self.coeffs)
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            # (shift + scale z)^k
            for j in range(k + 1):
                out[j] += c * comb(k, j) * shift ** (k - j) * scale**j
        return Polynomial(tuple(out))

    def reflect(self) -> Polynomial:
        """``z -> p(-z)``."""
        return Polynomial(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)))

    def to_floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"{c}" if k == 0 else f"{c}*z" if k == 1 else f"{c}*z^{k}")
        return " + ".join(terms)


def poly_eval(p: Polynomial, z):
    """Horner evaluation; exact when ``z`` is a Fraction."""
    if isinstance(z, (Fraction, int)):
        acc = Fraction(0)
        for c in reversed(p.coeffs):
            acc = acc * z + c
        return acc
    acc = 0 * z
    for c in reversed(p.coeffs):
        acc = acc * z + _coerce(c, z)
    return acc


def _coerce(c: Fraction, like):
    mod = type(like).__module__
    if mod.startswith("mpmath"):
        import mpmath

        return mpmath.mpf(c.numerator) / c.denominator
    return float(c)


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series known through ``z**order``."""

    coeffs: tuple
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be >= 0")
        cs = tuple(self.coeffs[: self.order + 1])
        cs = cs + (Fraction(0),) * (self.order + 1 - len(cs))
        object.__setattr__(self, "coeffs", cs)

    def __getitem__(self, k: int):
        if not 0 <= k <= self.order:
            raise IndexError(f"coefficient z^{k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def __len__(self) -> int:
        return self.order + 1

    def _check(self, other: TruncatedSeries):
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check(other)
        return TruncatedSeries(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)), self.order)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check(other)
        return TruncatedSeries(tuple(x - y for x, y in zip(self.coeffs, other.coeffs)), self.order)

    def __mul__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check(other)
        N = self.order
        out = [0 * self.coeffs[0]] * (N + 1)
        for i in range(N + 1):
            if self.coeffs[i] == 0:
                continue
            for j in range(N + 1 - i):
                out[i + j] += self.coeffs[i] * other.coeffs[j]
        return TruncatedSeries(tuple(out), N)

    @classmethod
    def from_polynomial(cls, p: Polynomial, order: int) -> TruncatedSeries:
        return cls(tuple(p.coeff(k) for k in range(order + 1)), order)


def exp_series(sign: int, order: int) -> TruncatedSeries:
    return TruncatedSeries(tuple(Fraction(sign**j, factorial(j)) for j in range(order + 1)), order)


def series_mul_exp(p: Polynomial, sign: int, order: int) -> TruncatedSeries:
    """Exact Taylor coefficients of ``p(z) * exp(sign * z)`` through ``z**order``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if order < 0:
        raise ValueError("order must be >= 0")
    return TruncatedSeries.from_polynomial(p, order) * exp_series(sign, order)


def order_of_vanishing(s: TruncatedSeries | Sequence, tol: float = 0) -> int:
    """Index of the first coefficient exceeding ``tol`` in modulus.

    Returns ``order + 1`` when every stored coefficient is within ``tol``.
    """
    coeffs: Iterable = s.coeffs if isinstance(s, TruncatedSeries) else s
    k = -1
    for k, c in enumerate(coeffs):
        if abs(c) > tol:
            return k
    return k + 1
