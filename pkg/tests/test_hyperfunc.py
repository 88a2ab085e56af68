import cmath
import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpmid.hyperfunc import (
    BranchCutWarning,
    KummerParams,
    ParameterError,
    WhittakerParams,
    kummer_integral_oracle,
    kummer_ode_residual,
    kummer_phi,
    phi,
    phi_array,
    phi_derivative,
    phi_parameter_derivative,
    phi_scale,
    whittaker_m,
    whittaker_m_derivative,
)


def ref(a, b, z):
    with mpmath.workdps(40):
        return complex(mpmath.hyp1f1(a, b, z))


def test_elementary_closed_forms():
    assert abs(phi(1, 2, 1) - (math.e - 1)) < 1e-15
    assert phi(-1, 3, 3) == 0
    assert abs(phi(2, 2, 0.7 + 0.2j) - cmath.exp(0.7 + 0.2j)) < 1e-15
    assert phi(0.3, 1.7, 0) == 1


def test_rejects_nonpositive_integer_b():
    with pytest.raises(ParameterError):
        KummerParams(1, -2)
    with pytest.raises(ParameterError):
        KummerParams(1, 0)
    KummerParams(1, -2.5)


@pytest.mark.parametrize(
    "a,b,z",
    [
        (1, 2, 25j),
        (2, 4, 8.98681891581813j),
        (0.5, 1.5, -20 + 3j),
        (3, 4, -8 + 25j),
        (2, 5, 12 - 7j),
        (-4.5, 3, 6),
        (1.25, 0.75, -30),
    ],
)
def test_against_mpmath(a, b, z):
    v = kummer_phi(KummerParams(a, b), z)
    r = ref(a, b, z)
    assert abs(v - r) <= 1e-12 * max(abs(r), 1e-300) + 1e-15 * phi_scale(a, b, z) * 1e-3


def test_zero_of_phi_2_4_on_imaginary_axis():
    assert abs(phi(2, 4, 8.98681891581813j)) < 1e-14


def test_reflection_consistent_across_threshold():
    a, b = 1.5, 3.25
    for z in (-9.999 + 1j, -10.001 + 1j):
        assert abs(phi(a, b, z) - ref(a, b, z)) < 1e-13 * abs(ref(a, b, z))


@pytest.mark.parametrize("a,b,z", [(2, 4, 3 - 1j), (0.7, 2.5, -1.5), (1, 2, 2j)])
def test_integral_oracle(a, b, z):
    assert abs(kummer_integral_oracle(KummerParams(a, b), z) - phi(a, b, z)) < 1e-10 * abs(phi(a, b, z))


def test_integral_oracle_closed_form():
    # Phi(1, 3, 1) = 2 (e - 2)
    assert abs(kummer_integral_oracle(KummerParams(1, 3), 1) - 2 * (math.e - 2)) < 1e-12


def test_integral_oracle_needs_b_gt_a_gt_0():
    with pytest.raises(ParameterError):
        kummer_integral_oracle(KummerParams(2, 2), 1)


@given(
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=0.3, max_value=6),
    st.complex_numbers(max_magnitude=8),
)
@settings(max_examples=60, deadline=None)
def test_ode_residual_small(a, b, z):
    scale = phi_scale(a + 2, b + 2, z) * (1 + abs(z)) * (1 + abs(a)) + phi_scale(a, b, z) * (abs(b) + abs(z) + abs(a))
    assert abs(kummer_ode_residual(KummerParams(a, b), z)) < 1e-12 * scale


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivatives_against_mpmath(order):
    a, b, z = 1.3, 2.7, 1.1 - 0.4j
    with mpmath.workdps(40):
        r = complex(mpmath.diff(lambda t: mpmath.hyp1f1(a, b, t), z, order))
    assert abs(phi_derivative(KummerParams(a, b), z, order) - r) < 1e-12 * abs(r)


@pytest.mark.parametrize("a,b,z", [(-1, 3, 3), (0.5, 2, 1.5), (-3, 2.5, -2 + 1j)])
def test_parameter_derivative(a, b, z):
    with mpmath.workdps(30):
        r = complex(mpmath.diff(lambda t: mpmath.hyp1f1(t, b, z), a))
    assert abs(phi_parameter_derivative(a, b, z) - r) < 1e-12 * max(1.0, abs(r))


def test_vectorised_matches_scalar():
    zs = np.array([0.5, -12 + 2j, 3 + 4j, -2.5j])
    v = phi_array(1.5, 2.5, zs)
    for z, x in zip(zs, v):
        assert abs(x - phi(1.5, 2.5, z)) < 1e-12 * max(1.0, abs(x))


def test_whittaker_against_mpmath():
    for k, l, z in [(0.3, 1.2, 2 + 1j), (-1, 0.75, 0.5 - 3j), (2.5, 1, 4)]:
        with mpmath.workdps(30):
            r = complex(mpmath.whitm(k, l, z))
        assert abs(whittaker_m(WhittakerParams(k, l), z) - r) < 1e-12 * max(1.0, abs(r))


def test_whittaker_counterexample_zero():
    assert whittaker_m(WhittakerParams(2.5, 1), 3) == 0


def test_whittaker_derivative_finite_difference():
    w = WhittakerParams(0.4, 1.1)
    z = 1.7 + 0.3j
    h = 1e-6
    fd = (whittaker_m(w, z + h) - whittaker_m(w, z - h)) / (2 * h)
    assert abs(whittaker_m_derivative(w, z) - fd) < 1e-8


def test_branch_cut_warning():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        whittaker_m(WhittakerParams(0.2, 0.75), -2.0)
    assert any(issubclass(r.category, BranchCutWarning) for r in rec)


def test_whittaker_rejects_negative_integer_2l():
    with pytest.raises(ParameterError):
        WhittakerParams(0, -1)
