"""Product-integration time stepping for ``lam`` in (0, 1].

Independent of every Laplace-side component: the kernel ``(t_n - s)**(lam-1)``
is integrated exactly against piecewise-constant or piecewise-linear
interpolants of ``v`` on a uniform grid ``t_n = n h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from hypervolt.errors import NumericalError, UnsupportedError, ValidationError
from hypervolt.kernel import check_lambda
from hypervolt.profiles import SourceProfile
from hypervolt.resolvent import SolutionGrid

__all__ = ["StepperConfig", "product_weights", "solve_product_integration"]

Rule = Literal["product-trapezoid", "product-rectangle"]


@dataclass(frozen=True)
class StepperConfig:
    step: float
    horizon: float
    rule: Rule = "product-trapezoid"

    def __post_init__(self) -> None:
        if not (self.step > 0 and self.horizon > 0):
            raise ValidationError("step and horizon must be positive")
        if self.step > self.horizon / 8:
            raise ValidationError("step must satisfy h <= T/8")
        if self.horizon / self.step > 1e7:
            raise ValidationError("T/h must not exceed 1e7")
        if self.rule not in ("product-trapezoid", "product-rectangle"):
            raise ValidationError(f"unknown rule {self.rule!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.step))


def _binom_series(beta: float, x: np.ndarray, start: int, parity: int | None) -> np.ndarray:
    """sum_{k >= start} C(beta, k) x**k, restricted to even k if parity == 0."""
    out = np.zeros_like(x)
    coef = 1.0
    power = np.ones_like(x)
    for k in range(1, 200):
        coef *= (beta - k + 1) / k
        power = power * x
        if k < start or (parity is not None and k % 2 != parity):
            continue
        term = coef * power
        out += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(out)):
            break
    return out


def _second_difference(beta: float, m: np.ndarray) -> np.ndarray:
    """(m+1)**beta - 2 m**beta + (m-1)**beta without cancellation (m >= 1)."""
    m = np.asarray(m, dtype=float)
    out = np.empty_like(m)
    direct = m < 2
    out[direct] = (m[direct] + 1) ** beta - 2 * m[direct] ** beta + np.abs(m[direct] - 1) ** beta
    big = ~direct
    if np.any(big):
        x = 1.0 / m[big]
        out[big] = 2.0 * m[big] ** beta * _binom_series(beta, x, 2, 0)
    return out


def _first_difference(lam: float, m: np.ndarray) -> np.ndarray:
    """m**lam - (m-1)**lam for m >= 1, stable for large m."""
    m = np.asarray(m, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(m > 1, -(m**lam) * np.expm1(lam * np.log1p(-1.0 / np.maximum(m, 2.0))), 1.0)


def _start_weight(lam: float, n: np.ndarray) -> np.ndarray:
    """a_{0,n} = (n-1)**(lam+1) - (n-1-lam) n**lam, stable for large n."""
    beta = lam + 1.0
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    direct = n < 3
    nd = n[direct]
    out[direct] = np.abs(nd - 1) ** beta - (nd - 1 - lam) * nd**lam
    big = ~direct
    if np.any(big):
        x = -1.0 / n[big]
        out[big] = n[big] ** beta * _binom_series(beta, x, 2, None)
    return out


def _check_diagonal(diag: float) -> None:
    if abs(1.0 - diag) < 1e-8:
        raise NumericalError("product integration unstable: 1 - w_nn is ~0")


def product_weights(lam: float, n: int, h: float, rule: Rule = "product-trapezoid") -> np.ndarray:
    """Weights w_{n,j}, j = 0..n, with sum_j w_{n,j} f(t_j) ~ int_0^{t_n} (t_n-s)**(lam-1) f(s) ds."""
    lam = float(lam)
    if n < 1:
        raise ValidationError("n must be >= 1")
    if rule == "product-rectangle":
        w = np.zeros(n + 1)
        w[:n] = h**lam / lam * _first_difference(lam, n - np.arange(n))
        return w
    scale = h**lam / (lam * (lam + 1.0))
    w = np.empty(n + 1)
    w[0] = _start_weight(lam, np.array([n]))[0]
    if n > 1:
        w[1:n] = _second_difference(lam + 1.0, n - np.arange(1, n))
    w[n] = 1.0
    return scale * w


def solve_product_integration(
    profile: SourceProfile, lam: float, cfg: StepperConfig
) -> SolutionGrid:
    """March ``v_n (1 - w_nn) = v0(t_n) + sum_{j<n} w_{n,j} v_j`` on ``t_n = n h``.

    Returns the samples at ``t_1 .. t_N`` (``v(0) = v0(0)`` is used in the
    march but not reported, since solution grids are strictly positive).
    """
    lam = check_lambda(lam)
    if not 0.0 < lam <= 1.0:
        raise UnsupportedError(f"product integration needs lambda in (0, 1], got {lam}")
    h = cfg.step
    N = cfg.n_steps
    t = h * np.arange(N + 1)
    f = np.asarray(profile.evaluate(t), dtype=float)
    v = np.empty(N + 1)
    v[0] = f[0]

    if cfg.rule == "product-trapezoid":
        scale = h**lam / (lam * (lam + 1.0))
        inner = np.zeros(N + 1)
        if N > 1:
            inner[1:N] = _second_difference(lam + 1.0, np.arange(1, N))  # index m = n - j
        start = _start_weight(lam, np.arange(N + 1, dtype=float))
        diag = scale
        _check_diagonal(diag)
        for n in range(1, N + 1):
            acc = start[n] * v[0]
            if n > 1:
                acc += np.dot(inner[n - 1 : 0 : -1], v[1:n])
            rhs = f[n] + scale * acc
            v[n] = rhs / (1.0 - diag)
    else:
        cell = h**lam / lam * _first_difference(lam, np.arange(1, N + 1, dtype=float))
        for n in range(1, N + 1):
            # cell[m-1] weights v_{n-m}, m = 1..n
            v[n] = f[n] + np.dot(cell[:n], v[n - 1 :: -1][:n])
    if not np.all(np.isfinite(v)):
        raise NumericalError("product integration produced non-finite values")
    method = {"route": "direct", "lambda": lam, "profile": profile.name, "step": h, "rule": cfg.rule}
    return SolutionGrid(t[1:], v[1:], method)
