"""Forcing profiles v0: the catalog shipped with the CLI and sample files."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import erfcx

from hypervolt.errors import ValidationError

__all__ = [
    "SourceProfile",
    "CATALOG",
    "catalog_names",
    "get_profile",
    "load_sample_file",
    "resolve_profile",
    "zero_profile",
    "scaled_sum",
]

Evaluator = Callable[[np.ndarray], np.ndarray]
Transform = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SourceProfile:
    """A forcing term ``v0`` supported on ``t >= 0``.

    ``transform``, when present, must be the analytic continuation of the
    Laplace transform to the plane cut along the negative axis.
    ``contour_safe`` says whether that continuation stays bounded enough in
    the left half-plane for Talbot inversion; it is False for delayed or
    compactly supported profiles, whose transforms grow like ``exp(-tau p)``
    as ``Re p -> -inf``. ``cutoff(tol)`` returns a time beyond which
    ``|v0| < tol``; ``breakpoints`` lists kinks of ``v0``.
    """

    name: str
    evaluate: Evaluator
    value_at_zero: float
    moment0: float
    decay: str
    transform: Transform | None = None
    contour_safe: bool = False
    cutoff: Callable[[float], float] = field(default=lambda tol: 60.0, repr=False)
    breakpoints: tuple[float, ...] = ()
    description: str = ""

    def __call__(self, t):
        return self.evaluate(np.asarray(t, dtype=float))

    @property
    def is_zero(self) -> bool:
        return self.name == "zero"


def _exp_eval(t):
    return np.where(t >= 0, np.exp(-np.abs(t)), 0.0)


def _texp_eval(t):
    return np.where(t >= 0, t * np.exp(-np.abs(t)), 0.0)


def _gauss_eval(t):
    return np.where(t >= 0, np.exp(-((t - 3.0) ** 2)), 0.0)


def _gauss_transform(p):
    # (sqrt(pi)/2) e^{p^2/4 - 3p} erfc(p/2 - 3), rewritten with erfcx for stability
    p = np.asarray(p, dtype=complex)
    return 0.5 * math.sqrt(math.pi) * math.exp(-9.0) * erfcx(0.5 * p - 3.0)


_COS_OMEGA = 0.5 * math.pi


def _cosbump_eval(t):
    inside = np.abs(t - 3.0) < 2.0
    return np.where(inside, np.cos(0.25 * math.pi * (t - 3.0)) ** 2, 0.0)


def _cosbump_transform(p):
    # 1/2 (e^{-p} - e^{-5p}) w^2 / (p (p^2 + w^2)), w = pi/2
    p = np.asarray(p, dtype=complex)
    w2 = _COS_OMEGA**2
    diff = -np.exp(-p) * np.expm1(-4.0 * p)
    small = np.abs(p) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 0.5 * diff * w2 / (p * (p * p + w2))
    return np.where(small, 2.0 * np.exp(-3.0 * p), out)


CATALOG: dict[str, SourceProfile] = {
    "exp": SourceProfile(
        name="exp",
        evaluate=_exp_eval,
        transform=lambda p: 1.0 / (1.0 + np.asarray(p, dtype=complex)),
        value_at_zero=1.0,
        moment0=1.0,
        decay="exponential",
        contour_safe=True,
        cutoff=lambda tol: max(-math.log(tol), 1.0),
        description="exp(-t)",
    ),
    "texp": SourceProfile(
        name="texp",
        evaluate=_texp_eval,
        transform=lambda p: 1.0 / (1.0 + np.asarray(p, dtype=complex)) ** 2,
        value_at_zero=0.0,
        moment0=1.0,
        decay="exponential",
        contour_safe=True,
        cutoff=lambda tol: max(-math.log(tol) + 2.0 * math.log(-math.log(tol)), 2.0),
        description="t exp(-t)",
    ),
    "gauss": SourceProfile(
        name="gauss",
        evaluate=_gauss_eval,
        transform=_gauss_transform,
        value_at_zero=math.exp(-9.0),
        moment0=0.5 * math.sqrt(math.pi) * (1.0 + math.erf(3.0)),
        decay="super-exponential",
        contour_safe=False,
        cutoff=lambda tol: 3.0 + math.sqrt(max(-math.log(tol), 0.0)),
        description="exp(-(t-3)^2)",
    ),
    "cosbump": SourceProfile(
        name="cosbump",
        evaluate=_cosbump_eval,
        transform=_cosbump_transform,
        value_at_zero=0.0,
        moment0=2.0,
        decay="super-exponential",
        contour_safe=False,
        cutoff=lambda tol: 5.0,
        breakpoints=(1.0, 5.0),
        description="cos^2(pi (t-3)/4) on [1, 5], zero elsewhere",
    ),
}


def catalog_names() -> list[str]:
    return list(CATALOG)


def get_profile(name: str) -> SourceProfile:
    try:
        return CATALOG[name]
    except KeyError:
        raise ValidationError(
            f"unknown profile {name!r}; catalog: {', '.join(CATALOG)}"
        ) from None


def zero_profile() -> SourceProfile:
    return SourceProfile(
        name="zero",
        evaluate=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        transform=lambda p: np.zeros_like(np.asarray(p, dtype=complex)),
        value_at_zero=0.0,
        moment0=0.0,
        decay="super-exponential",
        contour_safe=True,
        cutoff=lambda tol: 1.0,
    )


def scaled_sum(a: float, first: SourceProfile, b: float, second: SourceProfile) -> SourceProfile:
    """Profile ``a * first + b * second``."""
    tf = None
    if first.transform is not None and second.transform is not None:
        f1, f2 = first.transform, second.transform
        tf = lambda p: a * f1(p) + b * f2(p)  # noqa: E731
    e1, e2 = first.evaluate, second.evaluate
    c1, c2 = first.cutoff, second.cutoff
    return SourceProfile(
        name=f"{a}*{first.name}+{b}*{second.name}",
        evaluate=lambda t: a * e1(t) + b * e2(t),
        transform=tf,
        value_at_zero=a * first.value_at_zero + b * second.value_at_zero,
        moment0=a * first.moment0 + b * second.moment0,
        decay="exponential" if "exponential" in (first.decay, second.decay) else first.decay,
        contour_safe=first.contour_safe and second.contour_safe,
        cutoff=lambda tol: max(c1(tol), c2(tol)),
        breakpoints=tuple(sorted(set(first.breakpoints) | set(second.breakpoints))),
    )


def load_sample_file(path: str | Path) -> SourceProfile:
    """Read a two-column ``t, v0`` table and build a piecewise-linear profile.

    ``t`` must start at 0 and increase strictly. Beyond the last sample the
    profile is extended by zero (a warning is issued if the last value is
    not zero). Commas, tabs or spaces separate columns; ``#`` starts a
    comment, and a non-numeric first line is treated as a header.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read sample file {path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        try:
            vals = [float(x) for x in parts]
        except ValueError:
            if not rows:
                continue  # header
            raise ValidationError(f"{path}:{lineno}: non-numeric entry") from None
        if len(vals) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 2 columns, got {len(vals)}")
        rows.append(vals)
    if len(rows) < 2:
        raise ValidationError(f"{path}: need at least two samples")
    data = np.array(rows)
    ts, vs = data[:, 0], data[:, 1]
    if not np.all(np.isfinite(data)):
        raise ValidationError(f"{path}: non-finite values")
    if ts[0] != 0.0:
        raise ValidationError(f"{path}: first sample must be at t = 0")
    if np.any(np.diff(ts) <= 0):
        raise ValidationError(f"{path}: t must be strictly increasing")
    if vs[-1] != 0.0:
        warnings.warn(
            f"{path.name}: profile is extended by zero beyond t = {ts[-1]:g} "
            f"(last value {vs[-1]:g})",
            stacklevel=2,
        )
    t_end = float(ts[-1])

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= 0) & (t <= t_end), np.interp(t, ts, vs), 0.0)

    return SourceProfile(
        name=path.name,
        evaluate=evaluate,
        transform=None,
        value_at_zero=float(vs[0]),
        moment0=float(np.trapezoid(vs, ts)),
        decay="super-exponential",
        contour_safe=False,
        cutoff=lambda tol: t_end,
        breakpoints=tuple(float(x) for x in ts[1:]),
        description=f"samples from {path}",
    )


def resolve_profile(name_or_path: str) -> SourceProfile:
    """Catalog name, or a path to a sample file."""
    if name_or_path in CATALOG:
        return CATALOG[name_or_path]
    if Path(name_or_path).is_file():
        return load_sample_file(name_or_path)
    raise ValidationError(
        f"unknown profile {name_or_path!r}: not a catalog name ({', '.join(CATALOG)}) "
        "and not an existing file"
    )
