r"""Residual of ``v = v0 + k * v`` with the convolution taken as a finite part.

For ``lam`` in (-1, 0) the integral of ``(t-s)**(lam-1) v(s)`` diverges at
``s = t``. Subtracting ``v(t)`` removes the single divergent power:

.. math::

    \mathrm{f.p.}\int_0^t (t-s)^{\lambda-1} v(s)\,ds
      = \int_0^t (t-s)^{\lambda-1} [v(s) - v(t)]\,ds + v(t)\,\frac{t^\lambda}{\lambda}

The remaining integrand behaves like ``(t-s)**lam`` near ``s = t`` when ``v``
is Lipschitz there. Only ``lam > -1`` is covered: below that the Taylor
term ``v'(t)(s - t)`` diverges as well. The same formula is the classical
integral for ``lam > 0``. That this finite part coincides with the distributional
convolution is an assumption, not something checked here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from hypervolt.errors import ConvergenceError, UnsupportedError, ValidationError
from hypervolt.kernel import PowerKernel, finite_part_primitive
from hypervolt.profiles import SourceProfile
from hypervolt.quadrature import gauss_legendre

__all__ = ["ResidualReport", "finite_part_convolution", "residual", "REGULARIZATION"]

REGULARIZATION = "subtraction-at-t"
_GRADING = 4
_ORDER = 16
# Within GAP * t of s = t, rounding in v(s) - v(t) would be amplified by
# (t-s)**(lam-1); that sliver is integrated from the linear term instead.
# 1e-8 ~ sqrt(eps) balances the two errors for lam down to -3/4.
_GAP = 1e-8

Evaluable = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ResidualReport:
    t: float
    residual: float
    convolution_value: float
    regularization: str
    quadrature_error_estimate: float
    solution_value: float = math.nan

    def __post_init__(self) -> None:
        if not math.isfinite(self.residual):
            raise ValidationError("residual must be finite")
        if not self.quadrature_error_estimate >= 0:
            raise ValidationError("quadrature error estimate must be >= 0")


def _graded_rule(t: float, panels: int, gap: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on (0, t - gap): y**4 grading toward s = 0 on the left
    half and toward s = t - gap on the right half, composite Gauss-Legendre in y."""
    x, w = gauss_legendre(_ORDER)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)[:, None]
    y = (edges[:-1, None] + h * x).ravel()
    wy = (h * w).ravel()
    g = _GRADING
    half = 0.5 * t
    right = half - gap
    s = np.concatenate([half * y**g, t - gap - right * y**g])
    weights = np.concatenate([half * g * y ** (g - 1) * wy, right * g * y ** (g - 1) * wy])
    return s, weights


def _fp_value(v: Evaluable, t: float, lam: float, panels: int, vt: float, gap: float, v_gap: float) -> float:
    s, w = _graded_rule(t, panels, gap)
    u = t - s
    vals = np.asarray(v(s), dtype=float)
    body = float(np.dot(w, u ** (lam - 1.0) * (vals - vt)))
    # last sliver (t - gap, t): v(s) - v(t) ~ linear in t - s
    return body + (v_gap - vt) * gap**lam / (lam + 1.0)


def _finite_part(
    v: Evaluable, t: float, lam: float, *, rtol: float = 1e-5, panels: int = 4, max_panels: int = 256
) -> tuple[float, float, float]:
    """Return (value, error estimate, v(t)), halving the mesh until stable."""
    if not t > 0:
        raise ValidationError("t must be positive")
    if not lam > -1.0:
        raise UnsupportedError(f"finite parts need lambda > -1, got {lam}")
    k = PowerKernel(lam)
    gap = _GAP * t
    vt, v_gap = (float(x) for x in np.asarray(v(np.array([t, t - gap])), dtype=float))
    boundary = vt * finite_part_primitive(k, t)
    prev = _fp_value(v, t, lam, panels, vt, gap, v_gap)
    while panels < max_panels:
        panels *= 2
        cur = _fp_value(v, t, lam, panels, vt, gap, v_gap)
        err = abs(cur - prev)
        value = cur + boundary
        if err <= rtol * max(abs(value), abs(boundary), 1e-300) or err == 0.0:
            return value, err, vt
        prev = cur
    raise ConvergenceError(
        f"finite-part quadrature did not stabilize at t={t:g}", achieved=err
    )


def finite_part_convolution(v: Evaluable, t: float, lam: float = -0.25, *, rtol: float = 1e-5) -> float:
    """Finite-part value of the integral of ``(t-s)**(lam-1) v(s)`` over (0, t).

    ``v`` maps an array of times in (0, t] to values; it must be
    differentiable near ``t`` and may behave like ``s**sigma``
    (``sigma > -1``) at 0. Mesh halving stops once successive values agree to
    ``rtol``; otherwise :class:`ConvergenceError`.
    """
    return _finite_part(v, float(t), float(lam), rtol=rtol)[0]


def residual(
    profile: SourceProfile, lam: float, v: Evaluable, t: float, *, rtol: float = 1e-5
) -> ResidualReport:
    """``r(t) = v(t) - v0(t) - f.p.(k * v)(t)`` with its quadrature error."""
    t = float(t)
    conv, err, vt = _finite_part(v, t, float(lam), rtol=rtol)
    v0t = float(profile.evaluate(np.array([t]))[0])
    return ResidualReport(
        t=t,
        residual=vt - v0t - conv,
        convolution_value=conv,
        regularization=REGULARIZATION,
        quadrature_error_estimate=err,
        solution_value=vt,
    )
