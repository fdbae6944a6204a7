"""Power-law behaviour of solutions at the two ends of the time axis.

A time-side law ``f(t) ~ A t**nu`` pairs with ``L(f)(p) ~ A Gamma(nu+1)
p**(-nu-1)`` at the opposite end of the ``p`` axis; :func:`tauberian_map`
implements that pairing. The estimators fit straight lines in log-log
coordinates and make no assumption about which exponent to expect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from hypervolt.errors import DomainError, UnsupportedError, ValidationError
from hypervolt.kernel import check_lambda
from hypervolt.profiles import SourceProfile
from hypervolt.resolvent import HYPER_LAMBDA, SolutionGrid
from hypervolt.special import gamma

__all__ = [
    "PowerLawFit",
    "tauberian_map",
    "estimate_power_law",
    "tail_prediction",
    "onset_prediction",
    "SMALL_T_WINDOW",
    "LARGE_T_WINDOW",
    "SINGULARITY_BOUND",
]

Direction = Literal["small-t", "large-t"]

SMALL_T_WINDOW = (1e-4, 1e-2)
LARGE_T_WINDOW = (1e3, 1e5)
# kernel singularity t**(-5/4) plus a margin of 0.5
SINGULARITY_BOUND = -0.75

_HYPER_C = 4.0 * gamma(0.75)  # = -Gamma(-1/4)


@dataclass(frozen=True)
class PowerLawFit:
    amplitude: float
    exponent: float
    window: tuple[float, float]
    rms_log_residual: float
    samples: int = 0

    def __post_init__(self) -> None:
        lo, hi = self.window
        if not lo < hi:
            raise ValidationError("fit window must satisfy t_min < t_max")
        if not self.rms_log_residual >= 0:
            raise ValidationError("rms_log_residual must be >= 0")

    def __call__(self, t):
        return self.amplitude * np.asarray(t, dtype=float) ** self.exponent


def tauberian_map(amplitude: float, exponent: float, direction: Direction = "small-t") -> tuple[float, float]:
    """``(A, nu) -> (A Gamma(nu+1), -nu-1)``.

    The same formula serves both pairings (t -> 0 with p -> inf, and
    t -> inf with p -> 0); ``direction`` is only validated.
    """
    if direction not in ("small-t", "large-t"):
        raise ValidationError(f"direction must be 'small-t' or 'large-t', got {direction!r}")
    nu = float(exponent)
    if nu <= -1.0 and abs(nu - round(nu)) < 1e-12:
        raise DomainError(f"exponent {nu} is excluded (nu = -1, -2, ...)")
    return float(amplitude) * gamma(nu + 1.0), -nu - 1.0


def estimate_power_law(grid: SolutionGrid, window: tuple[float, float]) -> PowerLawFit:
    """Least-squares fit of ``log|v|`` against ``log t`` inside ``window``.

    Needs at least 6 samples in the window, all of one sign; the amplitude
    carries that sign.
    """
    lo, hi = float(window[0]), float(window[1])
    if not 0 < lo < hi:
        raise ValidationError("window must satisfy 0 < t_min < t_max")
    mask = (grid.times >= lo) & (grid.times <= hi)
    t, v = grid.times[mask], grid.values[mask]
    if t.size < 6:
        raise ValidationError(f"need >= 6 samples in [{lo:g}, {hi:g}], got {t.size}")
    if np.any(v == 0) or not (np.all(v > 0) or np.all(v < 0)):
        raise ValidationError("samples change sign (or vanish) inside the fit window")
    x, y = np.log(t), np.log(np.abs(v))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    sign = 1.0 if v[0] > 0 else -1.0
    return PowerLawFit(
        amplitude=sign * math.exp(intercept),
        exponent=float(slope),
        window=(lo, hi),
        rms_log_residual=float(np.sqrt(np.mean(resid**2))),
        samples=int(t.size),
    )


def _require_hyper(lam: float) -> None:
    lam = check_lambda(lam)
    if abs(lam - HYPER_LAMBDA) > 1e-12:
        raise UnsupportedError(f"power-law predictions are implemented for lambda = -1/4 only, got {lam}")


def tail_prediction(profile: SourceProfile, lam: float = HYPER_LAMBDA) -> tuple[float, float]:
    """Leading large-t law ``(M0, -5/4)`` of the lambda = -1/4 solution.

    Near ``p = 0`` the transform of the solution is ``M0 - c M0 p**(1/4) +
    O(p**(1/2))`` with ``c = 4 Gamma(3/4)``. The analytic part does not
    contribute to the tail; the ``p**(1/4)`` term pairs with
    ``c M0 / |Gamma(-1/4)| t**(-5/4) = M0 t**(-5/4)``.
    """
    _require_hyper(lam)
    if profile.decay not in ("exponential", "super-exponential"):
        raise UnsupportedError(
            f"tail prediction needs exponentially decaying forcing; {profile.name!r} decays as {profile.decay}"
        )
    # B p**(-nu-1) with -nu-1 = 1/4  <->  (B / Gamma(nu+1)) t**nu
    nu = -1.25
    return -_HYPER_C * profile.moment0 / gamma(nu + 1.0), nu


def onset_prediction(profile: SourceProfile, lam: float = HYPER_LAMBDA) -> tuple[float, float]:
    """Leading small-t law of the lambda = -1/4 solution.

    As ``p -> inf`` the transform behaves like ``v0(0) / (c p**(5/4))``, which
    pairs with ``v0(0) / (c Gamma(5/4)) t**(1/4)``. Profiles with
    ``v0(0) = 0`` start at a higher power and get amplitude 0.
    """
    _require_hyper(lam)
    return profile.value_at_zero / (_HYPER_C * gamma(1.25)), 0.25
