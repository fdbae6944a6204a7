import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypervolt.asymptotics import (
    PowerLawFit,
    estimate_power_law,
    onset_prediction,
    tail_prediction,
    tauberian_map,
)
from hypervolt.errors import DomainError, UnsupportedError, ValidationError
from hypervolt.profiles import CATALOG, zero_profile
from hypervolt.resolvent import SolutionGrid, solve_via_inversion
from hypervolt.special import gamma

from _oracles import hyper_constant


def grid(t, v):
    return SolutionGrid(np.asarray(t), np.asarray(v), {"route": "synthetic"})


def test_tauberian_examples():
    assert tauberian_map(1.0, 0.0) == (1.0, -1.0)
    amp, power = tauberian_map(1.0, -0.25)
    assert amp == pytest.approx(gamma(0.75), rel=1e-15) and power == -0.75
    assert tauberian_map(2.0, 1.0, "large-t") == (2.0, -2.0)


@pytest.mark.parametrize("nu", [-1.0, -2.0, -5.0])
def test_tauberian_excluded(nu):
    with pytest.raises(DomainError):
        tauberian_map(1.0, nu)


def test_tauberian_direction_validated():
    with pytest.raises(ValidationError):
        tauberian_map(1.0, 0.5, "sideways")


@settings(max_examples=200, deadline=None)
@given(st.floats(-100, 100).filter(lambda a: abs(a) > 1e-3), st.floats(-0.99, 5))
def test_tauberian_round_trip(amp, nu):
    coef, power = tauberian_map(amp, nu)
    nu_back = -power - 1
    assert nu_back == pytest.approx(nu, abs=1e-15)
    assert coef / gamma(nu_back + 1) == pytest.approx(amp, rel=1e-14)


def test_fit_exact_power_law():
    t = np.geomspace(1e-4, 1e-2, 20)
    fit = estimate_power_law(grid(t, 3 * t**0.25), (1e-4, 1e-2))
    assert fit.exponent == pytest.approx(0.25, abs=1e-10)
    assert fit.amplitude == pytest.approx(3.0, abs=1e-9)
    assert fit.rms_log_residual < 1e-12 and fit.samples == 20
    assert fit(1e-3) == pytest.approx(3 * 1e-3**0.25)


def test_fit_negative_exponent_and_sign():
    t = np.geomspace(1e3, 1e5, 12)
    fit = estimate_power_law(grid(t, -0.5 * t**-1.25), (1e3, 1e5))
    assert fit.exponent == pytest.approx(-1.25, abs=1e-10)
    assert fit.amplitude == pytest.approx(-0.5, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100), st.floats(-3, 3), st.floats(-6, 4), st.floats(0.5, 4))
def test_fit_recovers_any_power_law(amp, nu, log_lo, decades):
    lo, hi = 10.0**log_lo, 10.0 ** (log_lo + decades)
    t = np.geomspace(lo, hi, 15)
    fit = estimate_power_law(grid(t, amp * t**nu), (lo, hi))
    assert fit.exponent == pytest.approx(nu, abs=1e-8)
    assert fit.amplitude == pytest.approx(amp, rel=1e-8)


def test_fit_errors():
    t = np.geomspace(1, 10, 10)
    with pytest.raises(ValidationError):
        estimate_power_law(grid(t, np.sin(t)), (1, 10))
    with pytest.raises(ValidationError):
        estimate_power_law(grid(t, t), (1, 2))
    with pytest.raises(ValidationError):
        estimate_power_law(grid(t, t), (10, 1))


def test_fit_record_invariants():
    with pytest.raises(ValidationError):
        PowerLawFit(1.0, 1.0, (2.0, 1.0), 0.0)
    with pytest.raises(ValidationError):
        PowerLawFit(1.0, 1.0, (1.0, 2.0), -1.0)


@pytest.mark.parametrize("name", ["exp", "texp"])
def test_tail_prediction(name):
    amp, power = tail_prediction(CATALOG[name])
    assert amp == pytest.approx(1.0, rel=1e-14)
    assert power == -1.25


def test_tail_prediction_zero_and_other_profiles():
    assert tail_prediction(zero_profile())[0] == 0.0
    assert tail_prediction(CATALOG["cosbump"])[0] == pytest.approx(2.0)
    with pytest.raises(UnsupportedError):
        tail_prediction(replace(CATALOG["exp"], decay="power"))
    with pytest.raises(UnsupportedError):
        tail_prediction(CATALOG["exp"], 0.5)


def test_onset_prediction():
    amp, nu = onset_prediction(CATALOG["exp"])
    assert nu == 0.25
    assert amp == pytest.approx(1 / (hyper_constant() * math.gamma(1.25)), rel=1e-14)
    assert amp == pytest.approx(0.2252, rel=1e-3)
    assert onset_prediction(CATALOG["texp"])[0] == 0.0


@pytest.mark.parametrize(
    "window, predict",
    [((1e-16, 1e-14), onset_prediction), ((1e16, 1e18), tail_prediction)],
)
def test_fits_approach_predictions_far_out(window, predict):
    # corrections are powers of t**(1/4) (small t) and t**(-1/4) (large t),
    # so the leading law is only reached many decades from t = 1
    prof = CATALOG["exp"]
    t = np.geomspace(*window, 25)
    fit = estimate_power_law(solve_via_inversion(prof, -0.25, t, estimate_error=False), window)
    amp, nu = predict(prof)
    assert fit.exponent == pytest.approx(nu, abs=1e-3)
    assert fit.amplitude == pytest.approx(amp, rel=1e-2)
