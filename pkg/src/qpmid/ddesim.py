"""Time-domain simulation of retarded delay equations.

``y^(n)(t) + sum a_k y^(k)(t) + sum alpha_k y^(k)(t - tau) = 0`` with
``m < n`` is integrated on the companion system by classical RK4.  Delayed
values come from cubic Hermite interpolation of the stored solution, or from
the (polynomial) history while ``t - tau <= 0``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .polycore import Polynomial
from .quasipoly import Quasipolynomial


class SimConfigError(ValueError):
    pass


class UnsupportedEquation(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    history: Polynomial
    horizon: float
    dt: float
    record_stride: int = 1

    def validate(self, tau: float) -> None:
        if not self.dt > 0:
            raise SimConfigError("dt must be > 0")
        if self.dt > tau / 50 * (1 + 1e-12):
            raise SimConfigError(f"dt = {self.dt} exceeds tau/50 = {tau / 50}")
        if self.horizon < 10 * tau * (1 - 1e-12):
            raise SimConfigError(f"horizon = {self.horizon} is shorter than 10 tau = {10 * tau}")
        if self.record_stride < 1:
            raise SimConfigError("record_stride must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 0]

    def to_csv(self, path: str, comment: str | None = None) -> None:
        n = self.states.shape[1]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if comment is not None:
                fh.write(f"# {comment}\n")
            w = csv.writer(fh)
            w.writerow(["t"] + ["y" + "'" * k for k in range(n)])
            for t, row in zip(self.times, self.states):
                w.writerow([repr(float(t))] + [repr(float(v)) for v in row])


def _history_state(h: Polynomial, n: int, t: float) -> np.ndarray:
    out = np.empty(n)
    d = h
    for k in range(n):
        out[k] = float(d(t))
        d = d.derivative()
    return out


def simulate(q: Quasipolynomial, cfg: SimConfig) -> Trajectory:
    """Integrate the delay equation whose characteristic function is ``q``."""
    if q.neutral:
        raise UnsupportedEquation("neutral equations (m = n) are not simulated")
    tau = q.tau_f
    cfg.validate(tau)
    n, m = q.n, q.m
    a = np.array(q.pc[:-1])
    alpha = np.array(q.qc)
    dt = cfg.dt
    steps = int(math.ceil(cfg.horizon / dt - 1e-9))
    X = np.zeros((steps + 1, n))
    Xd = np.zeros((steps + 1, n))
    hist = [cfg.history]
    for _ in range(n):
        hist.append(hist[-1].derivative())
    hist_f = [np.array(p.to_floats() or [0.0]) for p in hist]

    def delayed(td: float) -> tuple[np.ndarray, np.ndarray]:
        """State and its derivative at past time ``td``."""
        if td <= 0:
            v = np.array([np.polynomial.polynomial.polyval(td, c) for c in hist_f])
            return v[:n], v[1 : n + 1]
        u = td / dt
        i = min(int(u), steps - 1)
        th = u - i
        h00 = (1 + 2 * th) * (1 - th) ** 2
        h10 = th * (1 - th) ** 2
        h01 = th * th * (3 - 2 * th)
        h11 = th * th * (th - 1)
        x = h00 * X[i] + h10 * dt * Xd[i] + h01 * X[i + 1] + h11 * dt * Xd[i + 1]
        return x, None

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        xd, _ = delayed(t - tau)
        out = np.empty(n)
        out[:-1] = x[1:]
        out[-1] = -(a @ x) - (alpha @ xd[: m + 1])
        return out

    X[0] = _history_state(cfg.history, n, 0.0)
    Xd[0] = rhs(0.0, X[0])
    for i in range(steps):
        t = i * dt
        x = X[i]
        k1 = Xd[i]
        k2 = rhs(t + dt / 2, x + dt / 2 * k1)
        k3 = rhs(t + dt / 2, x + dt / 2 * k2)
        k4 = rhs(t + dt, x + dt * k3)
        X[i + 1] = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        # the interpolant at t + dt needs Xd[i + 1]; the delayed point lies in the past
        Xd[i + 1] = rhs(t + dt, X[i + 1])
    idx = np.arange(0, steps + 1, cfg.record_stride)
    return Trajectory(idx * dt, X[idx].copy(), {"dt": dt, "tau": tau, "n": n, "m": m})


class DecayRate(float):
    """A decay rate with the fitting details attached."""

    method: str
    underflow: bool
    points: int

    def __new__(cls, value: float, method: str, underflow: bool = False, points: int = 0):
        obj = super().__new__(cls, value)
        obj.method = method
        obj.underflow = underflow
        obj.points = points
        return obj


def _peaks(v: np.ndarray) -> np.ndarray:
    return np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1


def decay_rate_estimate(tr: Trajectory, skip_fraction: float = 0.5, polynomial_factor: bool = True) -> DecayRate:
    """Exponential rate of the envelope of ``|y|`` over the tail of ``tr``.

    Local maxima of ``|y|`` are used when there are at least three, all
    samples otherwise.  With ``polynomial_factor`` the model
    ``log|y| = c + r t + p log t`` is fitted instead of a straight line, so
    that the ``t^(N-1)`` factor produced by a dominant root of multiplicity
    ``N`` does not bias ``r``.
    """
    if not 0 <= skip_fraction < 1:
        raise ValueError("skip_fraction must lie in [0, 1)")
    t = np.asarray(tr.times, dtype=float)
    v = np.abs(np.asarray(tr.y, dtype=float))
    start = t[0] + skip_fraction * (t[-1] - t[0])
    keep = t >= start
    t, v = t[keep], v[keep]
    if v.size == 0 or not np.any(v > 1e-300):
        return DecayRate(-math.inf, "underflow", True, 0)
    pk = _peaks(v)
    if pk.size >= 3:
        tt, vv, method = t[pk], v[pk], "peaks"
    else:
        tt, vv, method = t, v, "samples"
    ok = vv > 1e-300
    tt, vv = tt[ok], vv[ok]
    if tt.size < 2:
        return DecayRate(-math.inf, "underflow", True, int(tt.size))
    if np.ptp(np.log(vv)) <= 1e-12:
        return DecayRate(0.0, method, False, int(tt.size))
    cols = [np.ones_like(tt), tt]
    if polynomial_factor and tt.size >= 4 and tt[0] > 0:
        cols.append(np.log(tt))
        method += "+log"
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, np.log(vv), rcond=None)
    return DecayRate(float(coef[1]), method, False, int(tt.size))
