r"""Laplace-domain solution of ``v = v0 + k * v`` with ``k(t) = t**(lam-1)``.

Transforming the equation gives ``L(v) = L(v0) / (1 - Gamma(lam) p**(-lam))``.
Two independent routes turn this into numbers:

* inversion: invert ``multiplier(lam, p) * L(v0)(p)`` numerically;
* resolvent: expand the multiplier geometrically, invert term by term, and
  convolve the resulting Mittag-Leffler kernel with ``v0`` in the time domain.

For ``lam`` in (0, 1] the kernel is
``R(t) = Gamma(lam) t**(lam-1) E_{lam,lam}(Gamma(lam) t**lam)`` and
``v = v0 + R * v0``. For ``lam = -1/4``, with ``c = -Gamma(-1/4) = 4 Gamma(3/4)``,
``R(t) = t**(-3/4) E_{1/4,1/4}(-t**(1/4) / c) / c`` and ``v = R * v0``: the
multiplier ``1 / (1 + c p**(1/4))`` vanishes as ``p -> inf``, so there is no
identity part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from hypervolt._parallel import map_ordered
from hypervolt.errors import ContourPoleError, PoleError, UnsupportedError, ValidationError
from hypervolt.kernel import check_lambda
from hypervolt.profiles import SourceProfile
from hypervolt.quadrature import adaptive_integrate
from hypervolt.special import gamma, mittag_leffler
from hypervolt.transform import (
    EULER,
    TALBOT,
    InversionConfig,
    inversion_nodes,
    laplace_invert,
    profile_transform,
)

__all__ = [
    "SolutionGrid",
    "multiplier",
    "multiplier_pole",
    "resolvent_kernel",
    "default_inversion",
    "solve_via_inversion",
    "solve_via_resolvent",
    "inversion_solution",
    "resolvent_solution",
    "HYPER_LAMBDA",
]

HYPER_LAMBDA = -0.25
POLE_CLEARANCE = 1e-6


@dataclass(frozen=True)
class SolutionGrid:
    """Solution samples ``values[i] = v(times[i])`` with provenance."""

    times: np.ndarray
    values: np.ndarray
    method: dict = field(default_factory=dict)
    error_estimates: np.ndarray | None = None

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise ValidationError("times and values must be 1-d arrays of equal, nonzero length")
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ValidationError("times must be positive and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValidationError("solution values must be finite")
        if self.error_estimates is not None:
            e = np.asarray(self.error_estimates, dtype=float)
            if e.shape != t.shape:
                raise ValidationError("error_estimates must match times")
            object.__setattr__(self, "error_estimates", e)

    @property
    def route(self) -> str:
        return self.method.get("route", "")

    def at(self, t):
        """Linear interpolation inside ``[times[0], times[-1]]``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < self.times[0]) or np.any(t > self.times[-1]):
            raise ValidationError("interpolation outside the solution grid")
        return np.interp(t, self.times, self.values)


def _is_hyper(lam: float) -> bool:
    return abs(lam - HYPER_LAMBDA) <= 1e-12


def _check_resolvent_lambda(lam: float) -> float:
    lam = check_lambda(lam)
    if not (0.0 < lam <= 1.0 or _is_hyper(lam)):
        raise UnsupportedError(
            f"resolvent route supports lambda in (0, 1] or lambda = -1/4, got {lam}"
        )
    return HYPER_LAMBDA if _is_hyper(lam) else lam


def _validate_times(times) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1 or t.size == 0:
        raise ValidationError("times must be a non-empty 1-d grid")
    if np.any(~np.isfinite(t)) or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValidationError("times must be finite, positive and strictly increasing")
    return t


# --- Laplace side -------------------------------------------------------------


def multiplier(lam: float, p):
    """``1 / (1 - Gamma(lam) p**(-lam))`` on the cut plane (principal branch).

    Raises :class:`PoleError` where the denominator is numerically zero,
    ``|1 - Gamma(lam) p**(-lam)| < 1e-12 (1 + |Gamma(lam) p**(-lam)|)``.
    """
    lam = check_lambda(lam)
    parr = np.asarray(p, dtype=complex)
    sym = gamma(lam) * np.power(parr, -lam)
    den = 1.0 - sym
    if np.any(np.abs(den) < 1e-12 * (1.0 + np.abs(sym))):
        raise PoleError(f"multiplier pole: 1 - Gamma({lam}) p^{-lam} = 0")
    out = 1.0 / den
    return complex(out) if out.ndim == 0 else out


def multiplier_pole(lam: float) -> float | None:
    """The real pole ``Gamma(lam)**(1/lam)`` for ``lam > 0``; None otherwise.

    For ``-1 < lam < 0`` the denominator ``1 + |Gamma(lam)| p**(-lam)`` has
    no zero on the cut plane because ``arg p**(-lam)`` stays in
    ``(-pi |lam|, pi |lam|)``.
    """
    lam = check_lambda(lam)
    if lam > 0:
        g = gamma(lam)
        if g > 0:
            return g ** (1.0 / lam)
    return None


EULER_KINKED_NODES = 4000


def default_inversion(profile: SourceProfile) -> InversionConfig:
    """Talbot where the profile's transform allows it, Euler otherwise.

    Profiles with kinks get a long Euler series: their Fourier coefficients
    decay only algebraically, so convergence next to a kink is slow.
    """
    if profile.contour_safe and profile.transform is not None:
        return TALBOT
    if profile.breakpoints and profile.transform is not None:
        return InversionConfig("euler", EULER_KINKED_NODES)
    return EULER


def _prepared_config(profile: SourceProfile, lam: float, cfg: InversionConfig | None):
    if cfg is None:
        cfg = default_inversion(profile)
    if cfg.method == "talbot" and not (profile.contour_safe and profile.transform is not None):
        raise ValidationError(
            f"profile {profile.name!r} has no transform that is bounded on a Talbot "
            "contour (delayed or compactly supported forcing); use euler or stehfest"
        )
    pole = multiplier_pole(lam)
    if pole is not None and cfg.shift <= pole:
        cfg = cfg.with_shift(pole + 1.0)
    return cfg, pole


def _inversion_integrand(profile: SourceProfile, lam: float):
    lv0 = profile_transform(profile)
    return lambda p: multiplier(lam, p) * lv0(p)


def _coarser(cfg: InversionConfig) -> InversionConfig:
    from dataclasses import replace

    if cfg.method == "talbot":
        return replace(cfg, nodes=max(16, (2 * cfg.nodes) // 3))
    if cfg.method == "stehfest":
        return replace(cfg, nodes=max(2, cfg.nodes - 2))
    return replace(cfg, nodes=max(10, cfg.nodes // 2))


def _invert_at(F, t: float, cfg: InversionConfig, pole: float | None) -> float:
    if pole is not None:
        nodes = inversion_nodes(t, cfg)
        if np.min(np.abs(nodes - pole)) < POLE_CLEARANCE:
            raise ContourPoleError(
                f"inversion node within {POLE_CLEARANCE:g} of the multiplier pole p={pole:.12g}"
            )
    return laplace_invert(F, t, cfg, singularities=() if pole is None else (pole,))


def solve_via_inversion(
    profile: SourceProfile,
    lam: float,
    times,
    cfg: InversionConfig | None = None,
    *,
    estimate_error: bool = True,
) -> SolutionGrid:
    """Invert ``multiplier(lam, p) * L(v0)(p)`` at every grid time.

    ``cfg=None`` picks :func:`default_inversion`. For ``lam > 0`` the node
    set is shifted right of the pole ``Gamma(lam)**(1/lam)``; a node closer
    than 1e-6 to the pole is an error. The error estimate is the change
    against a run with fewer nodes.
    """
    lam = check_lambda(lam)
    t = _validate_times(times)
    cfg, pole = _prepared_config(profile, lam, cfg)
    F = _inversion_integrand(profile, lam)
    values = np.array(map_ordered(lambda x: _invert_at(F, x, cfg, pole), t))
    errors = None
    if estimate_error:
        coarse = _coarser(cfg)
        other = np.array(map_ordered(lambda x: _invert_at(F, x, coarse, pole), t))
        errors = np.abs(values - other)
    method = {
        "route": "inversion",
        "lambda": lam,
        "profile": profile.name,
        "inversion": cfg.method,
        "nodes": cfg.nodes,
        "contour_scale": cfg.contour_scale,
        "shift": cfg.shift,
    }
    return SolutionGrid(t, values, method, errors)


# --- time side ----------------------------------------------------------------


def _kernel_params(lam: float) -> tuple[float, float, float]:
    """(alpha, a, b) with R(u) = a u**(alpha-1) E_{alpha,alpha}(b u**alpha)."""
    if lam > 0:
        g = gamma(lam)
        return lam, g, g
    b = 1.0 / gamma(lam)  # = -1/c
    return -lam, -b, b


def resolvent_kernel(lam: float, t):
    """Resolvent kernel ``R`` whose transform is ``multiplier(lam, p) - 1``
    (``lam`` in (0, 1]) or ``multiplier(lam, p)`` (``lam = -1/4``)."""
    lam = _check_resolvent_lambda(lam)
    tt = np.asarray(t, dtype=float)
    if np.any(tt <= 0):
        raise ValidationError("resolvent_kernel requires t > 0")
    alpha, a, b = _kernel_params(lam)
    ta = tt**alpha
    out = a * ta / tt * mittag_leffler(alpha, alpha, b * ta)
    return float(out) if np.ndim(out) == 0 else out


def _convolve_resolvent(
    profile: SourceProfile, lam: float, t: float, rtol: float
) -> tuple[float, float]:
    """``int_0^t R(t-s) v0(s) ds`` via ``w = (t-s)**alpha``, which absorbs the
    endpoint singularity: ``R(u) du = (a/alpha) E(b w) dw``."""
    alpha, a, b = _kernel_params(lam)
    inv = 1.0 / alpha
    s_hi = min(t, float(profile.cutoff(1e-18)))
    u_lo = t - s_hi
    w_lo, w_hi = u_lo**alpha, t**alpha
    # features of v0 live on O(1) scales in s; seed the mesh accordingly
    n_seed = int(min(max(math.ceil(s_hi / 0.5), 4), 400))
    u_seed = u_lo + (s_hi) * np.arange(1, n_seed) / n_seed
    u_breaks = list(u_seed) + [t - s for s in profile.breakpoints if 0 < s < s_hi]
    w_breaks = [u**alpha for u in u_breaks if u > u_lo]

    def integrand(w):
        s = t - w**inv
        return (a * inv) * mittag_leffler(alpha, alpha, b * w) * profile.evaluate(np.maximum(s, 0.0))

    return adaptive_integrate(integrand, w_lo, w_hi, breakpoints=w_breaks, rtol=rtol, atol=1e-300)


def solve_via_resolvent(
    profile: SourceProfile, lam: float, times, *, rtol: float = 1e-10
) -> SolutionGrid:
    """Time-domain route: ``v = v0 + R * v0`` (or ``R * v0`` for ``lam = -1/4``).

    Supports ``lam`` in (0, 1] and ``lam = -1/4``. The convolution is done by
    adaptive Gauss-Legendre quadrature in the graded variable
    ``w = (t - s)**alpha``; the reported error estimate is the quadrature's.
    """
    lam = _check_resolvent_lambda(lam)
    t = _validate_times(times)
    parts = map_ordered(lambda x: _convolve_resolvent(profile, lam, x, rtol), t)
    conv = np.array([float(np.real(v)) for v, _ in parts])
    errors = np.array([e for _, e in parts])
    values = conv if lam < 0 else conv + profile.evaluate(t)
    method = {"route": "resolvent", "lambda": lam, "profile": profile.name, "rtol": rtol}
    return SolutionGrid(t, values, method, errors)


# --- evaluable solutions ------------------------------------------------------


def inversion_solution(
    profile: SourceProfile, lam: float, cfg: InversionConfig | None = None
) -> Callable[[np.ndarray], np.ndarray]:
    """``s -> v(s)`` by inversion, for arbitrary arrays of positive ``s``."""
    lam = check_lambda(lam)
    cfg, pole = _prepared_config(profile, lam, cfg)
    F = _inversion_integrand(profile, lam)

    def v(s):
        s = np.asarray(s, dtype=float)
        flat = [_invert_at(F, float(x), cfg, pole) for x in s.ravel()]
        return np.array(flat).reshape(s.shape)

    return v


def resolvent_solution(
    profile: SourceProfile, lam: float, *, rtol: float = 1e-10
) -> Callable[[np.ndarray], np.ndarray]:
    """``s -> v(s)`` through the resolvent route (any order of ``s``)."""
    lam = _check_resolvent_lambda(lam)

    def v(s):
        s = np.asarray(s, dtype=float)
        conv = np.array(
            [float(np.real(_convolve_resolvent(profile, lam, float(x), rtol)[0])) for x in s.ravel()]
        ).reshape(s.shape)
        return conv if lam < 0 else conv + profile.evaluate(s)

    return v

