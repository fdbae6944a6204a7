import doctest
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hypervolt.special as special
from hypervolt.errors import ConvergenceError, GammaPoleError, ValidationError
from hypervolt.special import gamma, mittag_leffler, rgamma, sin_pi

from _oracles import gamma_ref, mittag_leffler_ref

away_from_poles = st.floats(-19.5, 19.5).filter(lambda x: abs(x - round(x)) > 1e-3)
off_integers = st.floats(-9.5, 9.5).filter(lambda x: abs(x - round(x)) > 1e-3)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_doctests():
    assert doctest.testmod(special).failed == 0


@pytest.mark.parametrize("n, fact", [(1, 1), (2, 1), (5, 24), (10, 362880), (21, math.factorial(20))])
def test_gamma_factorials(n, fact):
    assert rel(gamma(float(n)), fact) < 1e-14


def test_gamma_half_is_sqrt_pi():
    assert gamma(0.5) == pytest.approx(1.77245385090552, rel=1e-14)
    assert rel(gamma(0.5), math.sqrt(math.pi)) < 1e-15


def test_gamma_minus_quarter_identity():
    g = gamma(-0.25)
    assert abs(g + 4 * gamma(0.75)) <= 1e-12 * abs(g)


@pytest.mark.parametrize("z", [0.1, 0.75, 3.3, -0.25, -2.5, -7.1, 1 + 1j, -3.5 + 2j, 0.5 - 10j, 15 + 5j])
def test_gamma_matches_high_precision(z):
    g = gamma(z)
    assert abs(complex(g) - gamma_ref(z)) <= 1e-13 * abs(gamma_ref(z))


def test_real_in_real_out_complex_in_complex_out():
    assert isinstance(gamma(2.5), float)
    assert isinstance(gamma(2.5 + 0j), complex)


@pytest.mark.parametrize("z", [0.0, -1.0, -7.0, -1e-17, -3.0 + 0j])
def test_gamma_poles_raise(z):
    with pytest.raises(GammaPoleError):
        gamma(z)


def test_gamma_overflow_is_inf():
    assert gamma(200.0) == math.inf


def test_rgamma_zero_at_poles():
    assert rgamma(-3.0) == 0.0
    assert rgamma(0.0) == 0.0
    assert rel(rgamma(170.5), math.exp(-math.lgamma(170.5))) < 1e-12


def test_sin_pi_exact_at_integers():
    for n in range(-5, 6):
        assert sin_pi(float(n)) == 0.0


@settings(max_examples=300, deadline=None)
@given(away_from_poles)
def test_recurrence_property(x):
    assert abs(gamma(x + 1) - x * gamma(x)) <= 1e-12 * abs(gamma(x + 1))


@settings(max_examples=300, deadline=None)
@given(off_integers)
def test_reflection_property(x):
    val = gamma(x) * gamma(1 - x) * math.sin(math.pi * x) / math.pi
    assert abs(val - 1) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-8, 8), st.floats(-8, 8))
def test_complex_recurrence_property(x, y):
    z = complex(x, y)
    if min(abs(z - n) for n in range(-9, 1)) < 1e-3:
        return
    assert abs(gamma(z + 1) - z * gamma(z)) <= 1e-12 * abs(gamma(z + 1))


# --- Mittag-Leffler ---------------------------------------------------------


def test_ml_exponential():
    assert mittag_leffler(1, 1, 1) == pytest.approx(2.71828182845905, rel=1e-14)


def test_ml_zero_argument():
    assert mittag_leffler(0.25, 0.25, 0.0) == pytest.approx(1 / gamma(0.25), rel=1e-15)
    assert mittag_leffler(0.25, 0.25, 0.0) == pytest.approx(0.275815662830209, rel=1e-13)


@pytest.mark.parametrize(
    "alpha, beta, z",
    [(0.5, 0.5, 1.0), (0.5, 1.0, -1.5), (0.25, 0.25, -1.0), (0.25, 0.25, 2.0), (1.0, 2.0, -3.0), (0.5, 0.5, 8.0)],
)
def test_ml_against_extended_precision(alpha, beta, z):
    ref = mittag_leffler_ref(alpha, beta, z, terms=1000)
    assert abs(mittag_leffler(alpha, beta, z) - ref) <= 1e-13 * (1 + abs(ref))


def test_ml_closed_forms():
    x = np.linspace(0.0, 2.0, 9)
    # E_{1/2,1}(z) = exp(z^2) erfc(-z)
    from scipy.special import erfcx

    assert np.allclose(mittag_leffler(0.5, 1.0, x), erfcx(-x), rtol=1e-13, atol=0)
    # E_{2,1}(z^2) = cosh z
    assert np.allclose(mittag_leffler(2.0, 1.0, x**2), np.cosh(x), rtol=1e-14, atol=0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5))
def test_ml_unit_order_is_exp(x):
    # required: 1e-13 relative on [-5, 5]; the alternating series cannot
    # deliver this below about -2.5 and raises ConvergenceError below -3.1
    assert abs(mittag_leffler(1.0, 1.0, x) - math.exp(x)) <= 1e-13 * math.exp(x)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3.1, 5))
def test_ml_unit_order_absolute_accuracy(x):
    e = math.exp(x)
    assert abs(mittag_leffler(1.0, 1.0, x) - e) <= 1e-14 * (1 + e)


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([0.25, 0.5, 1.0]),
    st.sampled_from([0.25, 0.5, 1.0, 2.0]),
    st.floats(0, 2),
    st.floats(0, 0.3),
)
def test_ml_monotone_for_positive_argument(alpha, beta, z, dz):
    assert mittag_leffler(alpha, beta, z + dz) >= mittag_leffler(alpha, beta, z)


@pytest.mark.parametrize("alpha, zneg, zpos", [(1.0, 3.1, 50.0), (0.5, 1.4, 10.0), (0.25, 1.1, 2.5)])
def test_ml_documented_range_accuracy(alpha, zneg, zpos):
    for z in (-zneg, zpos):
        ref = mittag_leffler_ref(alpha, alpha, z, terms=1500)
        assert abs(mittag_leffler(alpha, alpha, z) - ref) <= 1e-14 * (1 + abs(ref))


def test_ml_array_matches_scalar():
    z = np.array([-1.0, 0.0, 0.5, 2.0])
    arr = mittag_leffler(0.5, 0.5, z)
    assert np.array_equal(arr, [mittag_leffler(0.5, 0.5, float(x)) for x in z])


@pytest.mark.parametrize("z", [-1.5, -5.0, -20.0])
def test_ml_cancellation_raises(z):
    with pytest.raises(ConvergenceError):
        mittag_leffler(0.25, 0.25, z)


def test_ml_cap_raises():
    with pytest.raises(ConvergenceError):
        mittag_leffler(1.0, 1.0, 30.0, cap=20)


def test_ml_rejects_bad_alpha():
    with pytest.raises(ValidationError):
        mittag_leffler(0.0, 1.0, 1.0)
