"""
Closed-form relations between cumulative and stage-wise market quantities.

Notation used throughout (``c_n`` is the cumulative employment rate
``(1−U)_n`` after stage ``n``, ``α`` the initial job-offer ratio ``V/N``):

    U = αΩ + 1 − α                              (any stage, any market)
    α⁽ⁿ⁾ = (α − c_{n−1}) / (1 − c_{n−1})
    U⁽ⁿ⁾ = (1 − c_n) / (1 − c_{n−1})
    Ω⁽ⁿ⁾ = (α − c_n) / (α − c_{n−1})
    c_n  = 1 − Π_{k≤n} U⁽ᵏ⁾

with the convention ``c_{−1} = 0`` so stage 0 reproduces ``(α, U, Ω)``.
"""

from __future__ import annotations

import enum
import math
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from laborsim.errors import DomainError, SaturationError, SeriesValidationError


class Limit(enum.Enum):
    """Non-numeric outcomes of an ``n → ∞`` limit."""

    DIVERGES = "diverges"
    MARGINAL = "marginal"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CumulativeSeries:
    """One year's job-offer ratio and cumulative employment rates by stage."""

    year_label: str
    alpha0: float
    cum_employment: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cum_employment", tuple(float(c) for c in self.cum_employment))
        problems = validate_series(self.alpha0, self.cum_employment)
        if problems:
            raise SeriesValidationError(f"{self.year_label}: " + "; ".join(m for _, m in problems))

    def __len__(self) -> int:
        return len(self.cum_employment)


def validate_series(alpha0: float, cum: Sequence[float]) -> list[tuple[int | None, str]]:
    """Return ``(stage, message)`` for every violated series invariant.

    ``stage`` is None for problems with ``alpha0`` itself.
    """
    problems: list[tuple[int | None, str]] = []
    if not (math.isfinite(alpha0) and alpha0 > 0):
        problems.append((None, f"alpha0 must be positive, got {alpha0}"))
        return problems
    cap = min(1.0, alpha0)
    for n, c in enumerate(cum):
        if not (math.isfinite(c) and 0.0 <= c <= 1.0):
            problems.append((n, f"stage {n} rate {c} outside [0, 1]"))
        elif c > cap:
            problems.append((n, f"stage {n} rate {c} exceeds alpha0={alpha0} (more hires than seats)"))
        if n and cum[n] < cum[n - 1]:
            problems.append((n, f"stage {n} rate {cum[n]} below stage {n - 1} rate {cum[n - 1]}"))
    return problems


@dataclass(frozen=True)
class StageTriple:
    stage: int
    alpha_stage: float
    u_stage: float
    omega_stage: float

    @property
    def identity_residual(self) -> float:
        """``U − (αΩ + 1 − α)``; zero up to rounding for any consistent triple."""
        return self.u_stage - (self.alpha_stage * self.omega_stage + 1.0 - self.alpha_stage)


@dataclass(frozen=True)
class StagewiseResult:
    """Stage triples of a series, truncated where the market saturated.

    ``saturated_at`` is the first stage whose quantities are undefined,
    either because every student was already hired (``"students"``) or every
    seat already filled (``"vacancies"``); None when the full series converts.
    """

    triples: tuple[StageTriple, ...]
    saturated_at: int | None = None
    saturation: Literal["students", "vacancies"] | None = None

    def __iter__(self):
        return iter(self.triples)

    def __len__(self) -> int:
        return len(self.triples)

    def __getitem__(self, i):
        return self.triples[i]

    @property
    def alpha(self) -> np.ndarray:
        return np.array([t.alpha_stage for t in self.triples])

    @property
    def u(self) -> np.ndarray:
        return np.array([t.u_stage for t in self.triples])

    @property
    def omega(self) -> np.ndarray:
        return np.array([t.omega_stage for t in self.triples])


def labor_shortage(u: float, alpha: float) -> float:
    """Fraction of vacancies left open, ``Ω = (α − (1 − U)) / α``."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return (alpha - (1.0 - u)) / alpha


def unemployment_from_shortage(omega: float, alpha: float) -> float:
    """``U = αΩ + 1 − α``."""
    return alpha * omega + 1.0 - alpha


def _saturation(alpha: float, prev: float) -> Literal["students", "vacancies"] | None:
    if prev >= 1.0:
        return "students"
    if alpha - prev <= 0.0:
        return "vacancies"
    return None


def stagewise_from_cumulative(series: CumulativeSeries) -> StagewiseResult:
    """Convert cumulative employment rates to stage-wise ``(α⁽ⁿ⁾, U⁽ⁿ⁾, Ω⁽ⁿ⁾)``."""
    alpha = series.alpha0
    triples = []
    prev = 0.0
    for n, c in enumerate(series.cum_employment):
        reason = _saturation(alpha, prev)
        if reason is not None:
            return StagewiseResult(tuple(triples), saturated_at=n, saturation=reason)
        triples.append(StageTriple(
            stage=n,
            alpha_stage=(alpha - prev) / (1.0 - prev),
            u_stage=(1.0 - c) / (1.0 - prev),
            omega_stage=(alpha - c) / (alpha - prev),
        ))
        prev = c
    return StagewiseResult(tuple(triples))


def cumulative_from_stagewise(u_stages: Iterable[float]) -> np.ndarray:
    """``(1−U)_n = 1 − Π_{k≤n} U⁽ᵏ⁾``."""
    u = np.asarray(list(u_stages), dtype=float)
    if np.any((u < 0) | (u > 1)) or not np.all(np.isfinite(u)):
        raise DomainError("stage-wise unemployment rates must lie in [0, 1]")
    return 1.0 - np.cumprod(u)


def stage_alpha_from_products(alpha: float, u_stages: Sequence[float], n: int) -> float:
    """α⁽ⁿ⁾ from the surviving fraction ``Π_{k<n} U⁽ᵏ⁾`` of students."""
    if n == 0:
        return alpha
    survivors = float(np.prod(u_stages[:n]))
    if survivors == 0.0:
        raise SaturationError(f"no students left before stage {n}")
    return (alpha - 1.0 + survivors) / survivors


def learning_curve(series: CumulativeSeries, include_start: bool = False) -> np.ndarray:
    """Residual error of the collective search after each stage.

    ``1 − (1−U)_n`` when α ≥ 1 and ``α − (1−U)_n`` when α < 1. Entry ``j``
    is the error once stages ``0..j`` are over; ``include_start`` prepends the
    error before any stage (``1`` or ``α``), so that entry ``n`` is the error
    after ``n`` completed stages.
    """
    target = 1.0 if series.alpha0 >= 1 else series.alpha0
    eps = target - np.asarray(series.cum_employment, dtype=float)
    if include_start:
        eps = np.concatenate([[target], eps])
    return eps


def invariant_omega_alpha(alpha: float, omega: float, n: int) -> float:
    """α⁽ⁿ⁾ of a market whose stage-wise labor shortage stays at ``omega``.

    Only buyer's markets (``α < 1``) admit a stage-invariant Ω.
    """
    if not 0 < alpha < 1:
        raise DomainError("a stage-invariant labor shortage needs 0 < alpha < 1")
    if not 0 < omega < 1:
        raise DomainError("omega must lie in (0, 1)")
    if n < 0:
        raise DomainError("stage must be non-negative")
    w = omega ** n
    return alpha * w / (1.0 - alpha * (1.0 - w))


def invariant_u_alpha(alpha: float, u: float, n: int) -> float:
    """α⁽ⁿ⁾ of a seller's market (``α > 1``) whose stage-wise U stays at ``u``.

    Returns ``inf`` once ``u**-n`` leaves the float range.
    """
    if not alpha > 1:
        raise DomainError("a stage-invariant unemployment rate needs alpha > 1")
    if not 0 < u < 1:
        raise DomainError("u must lie in (0, 1)")
    if n < 0:
        raise DomainError("stage must be non-negative")
    log_growth = -n * math.log(u)
    if log_growth > 700.0:
        return math.inf
    return 1.0 + (alpha - 1.0) * math.exp(log_growth)


@dataclass(frozen=True)
class AsymptoticLimits:
    alpha_limit: float | Limit
    u_limit: float | Limit
    omega_limit: float | Limit
    omega_cumulative_limit: float
    regime: str


def asymptotic_limits(alpha: float) -> AsymptoticLimits:
    """``n → ∞`` limits of ``(α⁽ⁿ⁾, U⁽ⁿ⁾, Ω⁽ⁿ⁾)`` and of the cumulative Ω_n."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if alpha < 1:
        return AsymptoticLimits(0.0, 1.0, 0.0, 0.0, "perfect unemployment")
    if alpha > 1:
        return AsymptoticLimits(Limit.DIVERGES, 0.0, 1.0, (alpha - 1.0) / alpha,
                                "perfect labor shortage")
    return AsymptoticLimits(1.0, Limit.MARGINAL, Limit.MARGINAL, 0.0, "marginal")


@dataclass(frozen=True)
class TrajectoryPoint:
    year_label: str
    stage: int
    omega: float
    u: float


@dataclass(frozen=True)
class TrajectoryWarning:
    year_label: str
    stage: int
    reason: str


@dataclass(frozen=True)
class Trajectory:
    points: tuple[TrajectoryPoint, ...]
    warnings: tuple[TrajectoryWarning, ...] = field(default=())


def uv_trajectory(series_list: Iterable[CumulativeSeries], stage: int,
                  mode: Literal["cumulative", "stagewise"] = "cumulative") -> Trajectory:
    """Year-ordered (Ω, U) points at ``stage``, one per year.

    ``mode="cumulative"`` uses ``(Ω_n, 1 − (1−U)_n)``; ``"stagewise"`` uses
    ``(Ω⁽ⁿ⁾, U⁽ⁿ⁾)``. Years too short for ``stage`` (or saturated before it)
    are skipped and reported in ``warnings``.
    """
    if mode not in ("cumulative", "stagewise"):
        raise DomainError(f"unknown trajectory mode {mode!r}")
    points, skipped = [], []
    for s in sorted(series_list, key=lambda s: s.year_label):
        if stage >= len(s):
            skipped.append(TrajectoryWarning(s.year_label, stage, "series too short"))
            continue
        if mode == "cumulative":
            u = 1.0 - s.cum_employment[stage]
            points.append(TrajectoryPoint(s.year_label, stage, labor_shortage(u, s.alpha0), u))
            continue
        res = stagewise_from_cumulative(s)
        if stage >= len(res):
            skipped.append(TrajectoryWarning(s.year_label, stage, f"saturated ({res.saturation})"))
            continue
        t = res[stage]
        points.append(TrajectoryPoint(s.year_label, stage, t.omega_stage, t.u_stage))
    for w in skipped:
        warnings.warn(f"{w.year_label}: stage {w.stage} skipped, {w.reason}", stacklevel=2)
    return Trajectory(tuple(points), tuple(skipped))


def stage_alpha_gap(series: CumulativeSeries, n: int) -> float:
    """α⁽ⁿ⁾ − α⁽ⁿ⁻¹⁾ in closed form.

    Equal to ``(α−1)(c_{n−1} − c_{n−2}) / ((1 − c_{n−1})(1 − c_{n−2}))``, so
    its sign is the sign of ``α − 1`` whenever the series grew at ``n − 1``.
    """
    if n < 1:
        raise DomainError("the gap is defined for stages n >= 1")
    if n > len(series):
        raise DomainError(f"series has {len(series)} stages, gap at n={n} needs {n}")
    c = (0.0, 0.0) + series.cum_employment
    prev, prev2 = c[n + 1], c[n]
    for k, cc in ((n, prev), (n - 1, prev2)):
        reason = _saturation(series.alpha0, cc)
        if reason is not None:
            raise SaturationError(f"stage {k} undefined: market saturated ({reason})")
    return (series.alpha0 - 1.0) * (prev - prev2) / ((1.0 - prev) * (1.0 - prev2))
