"""Forward and inverse Laplace transforms.

Inversion methods (``F`` must accept an array of complex ``p``):

talbot
    Trapezoidal rule on the optimized cotangent contour
    ``p(theta) = s (0.5017 theta cot(0.6407 theta) - 0.6122 + 0.2645 i theta)``,
    ``theta`` in (-pi, pi), with ``s = contour_scale * min(M, 24) / t``. The
    contour wraps the negative real axis, so ``F`` must be analytic in the
    cut plane (branch points of ``p**(1/4)`` type are fine) and bounded
    there. The width stops growing at 24 nodes: past that point roundoff,
    which grows like ``exp(0.17 s t)``, would dominate the truncation error,
    so extra nodes only refine the trapezoid sum.
stehfest
    Gaver-Stehfest: ``N`` real nodes ``k ln 2 / t`` with the classical
    alternating binomial weights. Absolute accuracy is only about 1e-4 to
    1e-6 in double precision.
euler
    Bromwich line ``Re p = A / (2 t)`` with ``A = 25``, discretized as a
    Fourier series; ``nodes`` terms are summed directly and the next 20 are
    folded in by binomial (Euler) averaging of partial sums.

A positive ``shift`` moves every node set right by ``shift`` and multiplies
the result by ``exp(shift t)``, which is how transforms with poles in the
right half-plane are inverted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Literal, Sequence

import numpy as np

from hypervolt.errors import (
    ContourPoleError,
    ConvergenceError,
    DomainError,
    InversionOverflowError,
    ValidationError,
)
from hypervolt.profiles import SourceProfile
from hypervolt.quadrature import adaptive_integrate

__all__ = [
    "InversionConfig",
    "laplace_forward",
    "laplace_invert",
    "inversion_nodes",
    "profile_transform",
    "TALBOT",
    "STEHFEST",
    "EULER",
]

Method = Literal["talbot", "stehfest", "euler"]
ComplexFn = Callable[[np.ndarray], np.ndarray]

_TALBOT_WIDTH_CAP = 24
_EULER_A = 25.0
_EULER_TAIL = 20
_DEFAULT_NODES = {"talbot": 48, "stehfest": 12, "euler": 100}


@dataclass(frozen=True)
class InversionConfig:
    method: Method = "talbot"
    nodes: int | None = None
    contour_scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self) -> None:
        if self.method not in _DEFAULT_NODES:
            raise ValidationError(f"unknown inversion method {self.method!r}")
        if self.nodes is None:
            object.__setattr__(self, "nodes", _DEFAULT_NODES[self.method])
        n = self.nodes
        if not isinstance(n, int | np.integer) or n <= 0:
            raise ValidationError(f"nodes must be a positive integer, got {n!r}")
        if self.method == "talbot" and not 16 <= n <= 128:
            raise ValidationError(f"talbot nodes must lie in [16, 128], got {n}")
        if self.method == "stehfest" and (n % 2 or n > 18):
            raise ValidationError(f"stehfest nodes must be even and <= 18, got {n}")
        if self.method == "euler" and n < 10:
            raise ValidationError(f"euler series length must be >= 10, got {n}")
        if not self.contour_scale > 0:
            raise ValidationError("contour_scale must be positive")
        if not (self.shift >= 0 and math.isfinite(self.shift)):
            raise ValidationError("shift must be finite and >= 0")

    def with_shift(self, shift: float) -> InversionConfig:
        return replace(self, shift=float(shift))


TALBOT = InversionConfig("talbot")
STEHFEST = InversionConfig("stehfest")
EULER = InversionConfig("euler")


# --- forward transform -------------------------------------------------------


def _forward_quadrature(profile: SourceProfile, p: complex, rtol: float) -> complex:
    # integrand tail beyond T is below |v0| e^{-Re p T}; both factors bounded
    T = min(float(profile.cutoff(1e-17)), 40.0 / p.real)
    breaks = [b for b in profile.breakpoints if b < T]
    # resolve oscillations of e^{-i Im(p) s} with the initial mesh
    n_osc = int(min(abs(p.imag) * T / math.pi, 4000))
    if n_osc > 1:
        breaks = sorted(set(breaks) | set(np.linspace(0.0, T, n_osc + 1)[1:-1].tolist()))
    # roundoff floor: cancellation cannot beat eps * int |v0| e^{-Re p s}
    mass, _ = adaptive_integrate(
        lambda s: np.abs(profile.evaluate(s)) * np.exp(-p.real * s),
        0.0,
        T,
        breakpoints=[b for b in profile.breakpoints if b < T],
        rtol=1e-6,
        atol=1e-300,
    )
    val, _ = adaptive_integrate(
        lambda s: profile.evaluate(s) * np.exp(-p * s),
        0.0,
        T,
        breakpoints=breaks,
        rtol=rtol,
        atol=max(1e-14 * mass, 1e-300),
    )
    return complex(val)


def laplace_forward(profile: SourceProfile, p, *, rtol: float = 1e-10, use_closed_form: bool = True):
    """Laplace transform of ``profile`` at ``p`` (scalar or array, ``Re p > 0``).

    The closed form is used when the profile has one; otherwise adaptive
    quadrature over ``[0, T*]``, with ``T*`` from the profile's cutoff (plus
    the ``e^{-p s}`` decay) so the neglected tail is below 1e-16.
    """
    parr = np.asarray(p, dtype=complex)
    if np.any(parr.real <= 0):
        raise DomainError("laplace_forward requires Re p > 0")
    if use_closed_form and profile.transform is not None:
        out = np.asarray(profile.transform(parr), dtype=complex)
    else:
        flat = parr.ravel()
        out = np.array([_forward_quadrature(profile, complex(q), rtol) for q in flat]).reshape(parr.shape)
    return complex(out) if out.ndim == 0 else out


def profile_transform(profile: SourceProfile) -> ComplexFn:
    """``p -> L(v0)(p)`` as used by inversion.

    Closed forms are used as analytic continuations (valid on a Talbot
    contour); sample-file profiles fall back to quadrature, valid for
    ``Re p > 0`` only.
    """
    if profile.transform is not None:
        return lambda p: np.asarray(profile.transform(p), dtype=complex)
    return lambda p: np.asarray(laplace_forward(profile, p), dtype=complex)


# --- node sets ---------------------------------------------------------------


def _talbot_nodes(t: float, m: int, scale: float) -> tuple[np.ndarray, np.ndarray]:
    theta = -math.pi + (np.arange(m) + 0.5) * (2.0 * math.pi / m)
    s = scale * min(m, _TALBOT_WIDTH_CAP) / t
    a = 0.6407 * theta
    z = s * (0.5017 * theta / np.tan(a) - 0.6122 + 0.2645j * theta)
    dz = s * (0.5017 / np.tan(a) - 0.5017 * a / np.sin(a) ** 2 + 0.2645j)
    return z, dz


@lru_cache(maxsize=32)
def _stehfest_weights(n: int) -> np.ndarray:
    half = n // 2
    weights = []
    for k in range(1, n + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(
                j**half * math.factorial(2 * j),
                math.factorial(half - j)
                * math.factorial(j)
                * math.factorial(j - 1)
                * math.factorial(k - j)
                * math.factorial(2 * j - k),
            )
        weights.append((-1) ** (k + half) * acc)
    return np.array([float(w) for w in weights])


@lru_cache(maxsize=8)
def _euler_weights(n: int) -> np.ndarray:
    """Coefficients c_k with f ~ e^{A/2}/t * sum_k c_k Re F(p_k), k = 0..n+m."""
    m = _EULER_TAIL
    binom = np.array([math.comb(m, j) for j in range(m + 1)], dtype=float) / 2.0**m
    # average of partial sums S_n..S_{n+m}: term k enters every S_j with j >= k
    tail_mass = np.ones(n + m + 1)
    cum = np.cumsum(binom[::-1])[::-1]  # cum[j] = sum_{i >= j} binom[i]
    tail_mass[n:] = cum
    signs = (-1.0) ** np.arange(n + m + 1)
    c = signs * tail_mass
    c[0] *= 0.5
    return c


def inversion_nodes(t: float, cfg: InversionConfig) -> np.ndarray:
    """Complex abscissae at which ``laplace_invert`` samples ``F``."""
    if not t > 0:
        raise DomainError("inversion requires t > 0")
    if cfg.method == "talbot":
        z, _ = _talbot_nodes(t, cfg.nodes, cfg.contour_scale)
    elif cfg.method == "stehfest":
        z = np.arange(1, cfg.nodes + 1) * (math.log(2.0) / t) + 0j
    else:
        k = np.arange(cfg.nodes + _EULER_TAIL + 1)
        z = (_EULER_A + 2j * math.pi * k) / (2.0 * t)
    return z + cfg.shift


def laplace_invert(
    F: ComplexFn,
    t: float,
    cfg: InversionConfig = TALBOT,
    *,
    singularities: Sequence[complex] = (),
) -> float:
    """Approximate the inverse Laplace transform of ``F`` at time ``t > 0``.

    ``singularities`` lists known poles of ``F``; a node closer than 1e-8 to
    one raises :class:`ContourPoleError`, as does a non-finite value of ``F``
    at any node.
    """
    t = float(t)
    p = inversion_nodes(t, cfg)
    if not np.all(np.isfinite(p)) or np.max(np.abs(p)) > 1e300:
        raise InversionOverflowError(f"inversion nodes overflow for t={t:g}")
    for s in singularities:
        if np.min(np.abs(p - s)) < 1e-8:
            raise ContourPoleError(f"inversion node within 1e-8 of singularity {s}")
    with np.errstate(all="ignore"):
        fp = np.asarray(F(p), dtype=complex)
    if fp.shape != p.shape:
        fp = np.broadcast_to(fp, p.shape)
    if not np.all(np.isfinite(fp)):
        raise ContourPoleError(f"transform is not finite at some inversion node (t={t:g})")

    growth = math.exp(cfg.shift * t) if cfg.shift else 1.0
    with np.errstate(over="ignore"):
        if cfg.method == "talbot":
            _, dz = _talbot_nodes(t, cfg.nodes, cfg.contour_scale)
            # e^{pt} = e^{shift t} e^{zt}; the shift factor is applied last
            vals = np.exp((p - cfg.shift) * t) * fp * dz
            # (1 / 2 pi i) * (2 pi / M) * sum
            out = float((np.sum(vals) / (1j * cfg.nodes)).real)
        elif cfg.method == "stehfest":
            out = math.log(2.0) / t * float(np.dot(_stehfest_weights(cfg.nodes), fp.real))
        else:
            c = _euler_weights(cfg.nodes)
            out = math.exp(0.5 * _EULER_A) / t * float(np.dot(c, fp.real))
        result = growth * out
    if not math.isfinite(result):
        raise ConvergenceError(f"inversion produced a non-finite value at t={t:g}")
    return result
