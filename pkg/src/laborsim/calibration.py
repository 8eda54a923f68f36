"""
Inverse problem ``γ = U⁻¹(U_empirical)`` at fixed β.

U(γ) is only available as a Monte Carlo estimate, so the bisection carries a
standard error with every evaluation and may stop as soon as the estimate at
the midpoint is statistically indistinguishable from the target. All
replicate streams are derived from ``config.seed`` by spawn key, so every
γ is evaluated on the same seeds (common random numbers).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from laborsim.errors import BracketingError, NonMonotoneError
from laborsim.market import MarketConfig
from laborsim.stages import run_annual

log = logging.getLogger(__name__)

DEFAULT_HORIZON = 30
DEFAULT_REPLICATES = 8


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    """Independent stream for replicate ``r`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float

    def __iter__(self):
        return iter((self.mean, self.stderr))


def estimate_u(gamma: float, config: MarketConfig, replicates: int = DEFAULT_REPLICATES,
               horizon: int = DEFAULT_HORIZON, burn_in: int | None = None) -> Estimate:
    """Mean and standard error of the time-averaged unemployment rate over replicates."""
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    cfg = replace(config, gamma=gamma)
    averages = np.array([
        run_annual(cfg, horizon, replicate_rng(config.seed, r), burn_in).average
        for r in range(replicates)
    ])
    mean = float(averages.mean())
    se = float(averages.std(ddof=1) / math.sqrt(replicates)) if replicates > 1 else 0.0
    return Estimate(mean, se)


@dataclass(frozen=True)
class TracePoint:
    gamma: float
    u: float
    stderr: float
    low: float
    high: float


@dataclass(frozen=True)
class CalibrationResult:
    """Fitted γ with its final bracket and the full evaluation trace.

    ``consistent_interval`` spans every evaluated γ whose estimate is within
    the noise band of the target; it is wide where U(γ) is flat and the
    inverse is poorly identified.
    """

    gamma_hat: float
    bracket: tuple[float, float]
    target_u: float
    achieved_u: float
    achieved_stderr: float
    replicates: int
    iterations: int
    converged_by: str
    consistent_interval: tuple[float, float]
    trace: tuple[TracePoint, ...] = field(default=())


def _noise(*ses: float) -> float:
    return math.sqrt(sum(s * s for s in ses))


DEFAULT_LADDER = (0.0, 1.0, 2.0, 5.0, 10.0)


def calibrate_gamma(target_u: float, config: MarketConfig, *, gamma_max: float = 20.0,
                    tolerance: float = 0.05, max_iterations: int = 40,
                    replicates: int = DEFAULT_REPLICATES, horizon: int = DEFAULT_HORIZON,
                    burn_in: int | None = None, noise_sigmas: float = 2.0,
                    target_stderr: float = 0.0,
                    ladder: tuple[float, ...] = DEFAULT_LADDER) -> CalibrationResult:
    """Find the γ ∈ [0, gamma_max] whose simulated U matches ``target_u``.

    U is first estimated on a coarse γ ladder (always including 0 and
    ``gamma_max``); the ladder must be non-decreasing up to 3 standard errors.
    Bisection then runs inside the first ladder interval where the estimate
    crosses the target from below. The search stops when the bracket is
    narrower than ``tolerance`` or when an estimate lies within
    ``noise_sigmas`` combined standard errors of the target
    (``target_stderr`` is the uncertainty of the target itself).
    """
    if not 0.0 <= target_u <= 1.0:
        raise ValueError("target_u must lie in [0, 1]")
    if not gamma_max > 0:
        raise ValueError("gamma_max must be positive")

    def evaluate(g: float) -> Estimate:
        return estimate_u(g, config, replicates, horizon, burn_in)

    def close(e: Estimate) -> bool:
        return abs(e.mean - target_u) <= noise_sigmas * _noise(e.stderr, target_stderr)

    def check_monotone(g1: float, e1: Estimate, g2: float, e2: Estimate) -> None:
        if e1.mean - e2.mean > 3 * _noise(e1.stderr, e2.stderr):
            raise NonMonotoneError(
                f"U({g1:g})={e1.mean:.4g} exceeds U({g2:g})={e2.mean:.4g} by more than "
                "3 standard errors; increase replicates or horizon")

    grid = sorted({0.0, float(gamma_max), *(g for g in ladder if 0 < g < gamma_max)})
    rungs = [(g, evaluate(g)) for g in grid]
    trace = [TracePoint(g, e.mean, e.stderr, 0.0, float(gamma_max)) for g, e in rungs]
    for (g1, e1), (g2, e2) in zip(rungs, rungs[1:]):
        check_monotone(g1, e1, g2, e2)
    log.info("ladder: %s", ", ".join(f"U({g:g})={e.mean:.4f}" for g, e in rungs))

    means = [e.mean for _, e in rungs]
    if not any(close(e) for _, e in rungs) and not min(means) <= target_u <= max(means):
        raise BracketingError(target_u, min(means), max(means))

    crossing = next(((a, b) for a, b in zip(rungs, rungs[1:])
                     if a[1].mean < target_u < b[1].mean), None)
    nearest = min(rungs, key=lambda r: abs(r[1].mean - target_u))
    if crossing is None or close(nearest[1]):
        g, e = nearest
        return _result(g, (0.0, float(gamma_max)), target_u, e, replicates, 0, "ladder",
                       trace, close)

    (lo, e_lo), (hi, e_hi) = crossing
    iterations = 0
    best_g, best = lo, e_lo
    converged_by = "max_iterations"
    while iterations < max_iterations:
        if hi - lo < tolerance:
            converged_by = "bracket"
            break
        mid = 0.5 * (lo + hi)
        e_mid = evaluate(mid)
        iterations += 1
        check_monotone(lo, e_lo, mid, e_mid)
        check_monotone(mid, e_mid, hi, e_hi)
        best_g, best = mid, e_mid
        if e_mid.mean < target_u:
            lo, e_lo = mid, e_mid
        else:
            hi, e_hi = mid, e_mid
        trace.append(TracePoint(mid, e_mid.mean, e_mid.stderr, lo, hi))
        log.debug("gamma=%.5g U=%.5g±%.2g bracket=[%.5g, %.5g]", mid, e_mid.mean, e_mid.stderr, lo, hi)
        if close(e_mid):
            converged_by = "noise"
            break
    else:
        if hi - lo < tolerance:
            converged_by = "bracket"

    if converged_by == "bracket":
        # report the bracket end whose estimate is closest to the target
        best_g, best = min(((lo, e_lo), (hi, e_hi)), key=lambda p: abs(p[1].mean - target_u))
    return _result(best_g, (lo, hi), target_u, best, replicates, iterations, converged_by,
                   trace, close)


def _result(gamma_hat, bracket, target_u, est, replicates, iterations, converged_by,
            trace, close) -> CalibrationResult:
    ok = [p.gamma for p in trace if close(Estimate(p.u, p.stderr))] or [gamma_hat]
    return CalibrationResult(
        gamma_hat=gamma_hat,
        bracket=bracket,
        target_u=target_u,
        achieved_u=est.mean,
        achieved_stderr=est.stderr,
        replicates=replicates,
        iterations=iterations,
        converged_by=converged_by,
        consistent_interval=(min(ok), max(ok)),
        trace=tuple(trace),
    )
