"""The power kernel ``t**(lam - 1)`` and its Laplace symbol.

For ``lam <= 0`` the kernel is not locally integrable at the origin. Every
quantity here is the analytic continuation in ``lam`` of the classical
formula (equivalently, a Hadamard finite part: pure power divergences in the
cutoff are dropped).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hypervolt.errors import DomainError, InadmissibleLambdaError
from hypervolt.special import gamma

__all__ = [
    "PowerKernel",
    "check_lambda",
    "laplace_symbol",
    "continued_symbol",
    "finite_part_primitive",
]

LAMBDA_POLE_TOL = 1e-9


def check_lambda(lam: float) -> float:
    """Return ``lam`` as a float, rejecting 0, -1, -2, ... (to 1e-9)."""
    lam = float(lam)
    if not np.isfinite(lam):
        raise InadmissibleLambdaError(f"lambda must be finite, got {lam}")
    n = round(lam)
    if n <= 0 and abs(lam - n) <= LAMBDA_POLE_TOL:
        raise InadmissibleLambdaError(
            f"lambda={lam} is inadmissible: lambda must avoid 0, -1, -2, ..."
        )
    return lam


@dataclass(frozen=True)
class PowerKernel:
    """Kernel ``t_+**(lam - 1)``, or ``t_+**(lam - 1) / Gamma(lam)`` if normalized."""

    lam: float
    normalized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", check_lambda(self.lam))

    @property
    def gamma_lam(self) -> float:
        return gamma(self.lam)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            k = np.where(t > 0, np.abs(t) ** (self.lam - 1.0), 0.0)
        return k / self.gamma_lam if self.normalized else k


def continued_symbol(k: PowerKernel, p):
    """Symbol on the plane cut along the negative real axis (no domain check).

    Uses the principal branch ``p**(-lam) = exp(-lam (ln|p| + i arg p))``,
    ``arg p`` in (-pi, pi]. This is what inversion contours that wrap the
    negative axis evaluate.
    """
    p = np.asarray(p, dtype=complex)
    power = np.power(p, -k.lam)
    out = power if k.normalized else k.gamma_lam * power
    return out if out.ndim else complex(out)


def laplace_symbol(k: PowerKernel, p):
    """Laplace transform of the kernel, ``Gamma(lam) p**(-lam)``.

    The normalized kernel has symbol ``p**(-lam)``. ``p`` may be a scalar or
    an array and must satisfy ``Re p > 0``.
    """
    if np.any(np.real(np.asarray(p)) <= 0):
        raise DomainError("laplace_symbol requires Re p > 0")
    return continued_symbol(k, p)


def finite_part_primitive(k: PowerKernel, t):
    """Finite part of the integral of ``(t - s)**(lam - 1)`` over ``0 < s < t``.

    Equal to ``t**lam / lam`` (divided by ``Gamma(lam)`` when normalized).
    For ``lam < 0`` the divergent endpoint term ``eps**lam / (-lam)`` is
    dropped.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("finite_part_primitive requires t > 0")
    val = t**k.lam / k.lam
    if k.normalized:
        val = val / k.gamma_lam
    return float(val) if val.ndim == 0 else val
