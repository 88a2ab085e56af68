"""End-to-end acceptance checks.  Each test prints one PASS/FAIL line and
the session summary repeats them all."""

import csv
import functools
import math
import time
from fractions import Fraction
from math import factorial

import mpmath
import pytest

from conftest import CRITERIA
from qpmid import cli, zerogeometry
from qpmid.contour import Rect
from qpmid.ddesim import SimConfig, decay_rate_estimate, simulate
from qpmid.hyperfunc import KummerParams, kummer_phi
from qpmid.mid import (
    check_equivalences,
    derivative_residuals,
    normalize,
    s0_from_coeffs,
    sweep,
    synthesize_coeffs,
    verify_dominance,
)
from qpmid.pade import perron_pair, remainder_identity
from qpmid.polycore import Polynomial
from qpmid.quasipoly import _qp_eval_mp


def criterion(num: int, title: str, budget: float):
    """Record pass/fail and runtime; a run over ``budget`` seconds fails."""

    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            t0 = time.perf_counter()
            status = "FAIL"
            try:
                fn(*args, **kwargs)
                secs = time.perf_counter() - t0
                assert secs < budget, f"took {secs:.1f} s, budget {budget} s"
                status = "PASS"
            finally:
                secs = time.perf_counter() - t0
                CRITERIA[num] = (status, title, secs)
                print(f"\n{status} criterion {num}: {title} ({secs:.1f} s)")

        return inner

    return wrap


TAUS = (Fraction(3, 10), Fraction(1), Fraction(27, 10))
S0S = (Fraction(-3), Fraction(-1), Fraction(0), Fraction(3, 2))
GRID = [(n, m, tau, s0) for n in range(1, 6) for m in range(n + 1) for tau in TAUS for s0 in S0S]


@pytest.fixture(scope="module")
def designs():
    return {g: synthesize_coeffs(*g) for g in GRID}


@criterion(1, "Perron order identity, 0 <= m <= n <= 8", 5)
def test_perron_order_identity():
    for n in range(9):
        for m in range(n + 1):
            pair = perron_pair(n, m)
            order = n + m + 1
            exp_neg = [Fraction((-1) ** k, factorial(k)) for k in range(order + 1)]
            series = [Fraction(0)] * (order + 1)
            for i, p in enumerate(pair.den.coeffs):
                for k in range(order + 1 - i):
                    series[i + k] += p * exp_neg[k]
            for i, c in enumerate(pair.num.coeffs):
                series[i] -= c
            assert all(c == 0 for c in series[:order]), (n, m)
            assert series[order] == Fraction((-1) ** (m + 1) * factorial(n), factorial(order)), (n, m)


@criterion(2, "remainder integral identity", 2)
def test_remainder_identity():
    for n, m in ((1, 1), (2, 1), (3, 3), (5, 2)):
        for z in (1, -1, 1j, -1j, 2 + 3j):
            lhs, rhs = remainder_identity(n, m, z)
            assert abs(lhs - rhs) < 1e-10 * (1 + abs(lhs)), (n, m, z)
    lhs, rhs = remainder_identity(1, 1, 1)
    exact = 3 - math.e
    assert abs(lhs - exact) < 1e-12 and abs(rhs - exact) < 1e-12


def _round_trip(d) -> None:
    n, m = d.n, d.m
    N = n + m + 1
    q = d.quasipolynomial()
    rep = check_equivalences(q, d.s0)
    assert rep.all_true, (d.n, d.m, d.tau, d.s0, rep.diagnostics)
    res = derivative_residuals(q, d.s0)
    assert max(res[:N]) < 1e-8 * q.scale()
    with mpmath.workdps(60):
        top = _qp_eval_mp(q, mpmath.mpc(mpmath.mpf(d.s0.numerator) / d.s0.denominator), N)
        expected = factorial(n) * mpmath.mpf(d.tau.numerator) ** (m + 1) / mpmath.mpf(d.tau.denominator) ** (m + 1)
        assert abs(top - expected) <= 1e-8 * expected
    s0 = s0_from_coeffs(n, m, d.tau, d.a[n - 1])
    assert isinstance(s0, Fraction) and s0 == d.s0


@criterion(3, "design round trip over the 240-design grid", 30)
def test_design_round_trip(designs):
    sweep(_round_trip, designs.values())


def _kummer_error(d) -> tuple[float, float]:
    n, m = d.n, d.m
    N = n + m + 1
    nf = normalize(d.quasipolynomial(), d.s0)
    err = 0.0
    with mpmath.workdps(30):
        for i in range(1, 10):
            r = 5 * i / 9
            for j in range(9):
                z = mpmath.mpc(mpmath.rect(r, 2 * mpmath.pi * j / 9 + 0.1 * i))
                ref = factorial(n) * z**N / factorial(N) * mpmath.hyp1f1(m + 1, N + 1, -z)
                err = max(err, abs(nf(complex(z)) - complex(ref)))
    return err, nf.scale()


@criterion(4, "normalized quasipolynomial equals the Kummer form on |z| <= 5", 20)
def test_kummer_identity(designs):
    for d, (err, scale) in zip(designs.values(), sweep(_kummer_error, designs.values())):
        assert err < 1e-9 * scale, (d.n, d.m, d.tau, d.s0, err, scale)


@criterion(5, "dominance of s0 over the 240-design grid", 180)
def test_dominance(designs):
    items = list(designs.values())
    for d, rep in zip(items, sweep(verify_dominance, items)):
        key = (d.n, d.m, d.tau, d.s0)
        assert rep.right_count == 0, key
        assert rep.strip_count == rep.multiplicity == d.n + d.m + 1, key
        assert rep.dominant, key
        assert rep.right_rect[2] <= -8 * math.pi / float(d.tau) and rep.right_rect[3] >= 8 * math.pi / float(d.tau)


@criterion(6, "counterexample to the old half-plane bound", 1)
def test_counterexample():
    for l in (0.25, 0.5, 1.0, 2.0):
        r = zerogeometry.saff_varga_counterexample(l)
        assert r["k"] == l + 1.5 and r["z"] == 1 + 2 * l
        assert r["sv_a_violated"] and r["z"] < 2 * r["k"]
        assert r["prop2b_satisfied"]
        assert r["residual"] < 1e-10
        # independent check: Phi(-1, 1+2l, z) = 1 - z/(1+2l)
        assert abs(mpmath.hyp1f1(-1, 1 + 2 * l, r["z"], zeroprec=200)) < 1e-15


@criterion(7, "real zero curves of M_{k,l}", 60)
def test_root_curves(tmp_path):
    for l in (-0.25, 0.0, 0.25, 0.5, 0.75, 1.0):
        k_min = l + 0.7
        curve = zerogeometry.root_curve(l, k_min, 12.0)
        assert not curve.breakdown, (l, curve.breakdown)
        assert abs(curve[0].k - k_min) < 1e-12 and abs(curve[-1].k - 12.0) < 1e-12
        seed = next(s for s in curve if s.k == l + 1.5)
        assert abs(seed.z - (1 + 2 * l)) < 1e-8
        for s in curve:
            assert s.residual < 1e-9 * s.scale and s.residual < 1e-9, (l, s)
            a, b = 0.5 + l - s.k, 1 + 2 * l
            assert abs(mpmath.hyp1f1(a, b, s.z, zeroprec=200)) < 1e-9 * zerogeometry.phi_scale(a, b, s.z)
        zs = [s.z for s in curve]
        assert all(z > 0 for z in zs)
        assert all(z1 < z0 for z0, z1 in zip(zs, zs[1:]))

        path = tmp_path / f"curve_{l}.csv"
        argv = ["curve", "--l", repr(l), "--kmin", repr(k_min), "--kmax", "12", "--out", str(path)]
        assert cli.run(argv) == cli.EXIT_OK
        with open(path, encoding="utf-8") as fh:
            assert fh.readline().startswith("# invocation: qpmid curve")
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(curve)
        assert all(float(r["z"]) > 0 for r in rows)


def _bisect(f, lo: float, hi: float) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@criterion(8, "first point of Xi_1 and the imaginary-axis classification", 1)
def test_xi_one():
    zeta = zerogeometry.xi_set(1, 1)[0]
    # tan(x/2) = x/2 written without poles, bracketed between 2 pi and 3 pi
    oracle = _bisect(lambda x: math.sin(x / 2) - x / 2 * math.cos(x / 2), 2 * math.pi + 1e-9, 3 * math.pi - 1e-9)
    assert abs(zeta - 8.986819) < 1e-5
    assert abs(zeta - oracle) < 1e-12
    assert abs(kummer_phi(KummerParams(2, 4), 1j * zeta)) < 1e-8
    assert abs(mpmath.hyp1f1(2, 4, 1j * zeta)) < 1e-8
    rep = zerogeometry.whittaker_region_check(0.0, 1.5, 1j * zeta)
    assert rep.verified_zero and rep.hypothesis and rep.applicable["zero"]
    assert rep.predicates["imaginary_axis"] and rep.consistent


@criterion(9, "simulated decay rates match s0", 30)
def test_time_domain():
    one = Polynomial((Fraction(1),))
    for args in ((1, 0, 1, Fraction(-1)), (2, 1, 1, Fraction(-1, 2)), (2, 0, Fraction(1, 2), Fraction(-2))):
        d = synthesize_coeffs(*args)
        tau = float(d.tau)
        tr = simulate(d.quasipolynomial(), SimConfig(one, 20 * tau, tau / 100))
        rate = decay_rate_estimate(tr)
        s0 = float(d.s0)
        assert abs(rate - s0) <= 0.05 * abs(s0) + 0.02, (args, float(rate))
    for args in ((1, 0, 1, 0), (2, 1, 1, 0)):
        d = synthesize_coeffs(*args)
        tr = simulate(d.quasipolynomial(), SimConfig(one, 20.0, 0.01))
        assert max(abs(tr.y - 1)) < 1e-9


@criterion(10, "zero location predicates for Kummer functions", 60)
def test_kummer_zero_predicates():
    zeros = zerogeometry.kummer_zeros(1, 2, Rect(-1, 1, 0, 30))
    found = sorted((r.location for r in zeros), key=lambda z: z.imag)
    # Phi(1, 2, z) = (e^z - 1)/z vanishes exactly at 2 pi i k, k != 0
    expected = [2j * math.pi * k for k in range(1, 5)]
    assert len(found) == len(expected)
    for z, ref in zip(found, expected):
        assert abs(z - ref) < 1e-8
        rep = zerogeometry.kummer_region_check(1, 2, z)
        assert rep.applicable["zero"] and rep.predicates["imaginary_axis"] and rep.consistent

    for a, b, side in ((2, 5, "right_half"), (3, 4, "left_half")):
        zs = [r.location for r in zerogeometry.kummer_zeros(a, b, Rect(-25, 25, -25, 25)) if abs(r.location) <= 25]
        assert zs, (a, b)
        for z in zs:
            assert abs(mpmath.hyp1f1(a, b, z)) < 1e-8 * zerogeometry.phi_scale(a, b, z)
            rep = zerogeometry.kummer_region_check(a, b, z)
            assert rep.consistent and rep.predicates[side], (a, b, z)
            assert z.imag != 0 and abs(z) > math.sqrt(b * (b - 2))
