"""
Successive job-hunting stages within a year, and repeated annual markets.

Within a year the market shrinks stage by stage: matched students leave and
filled seats are removed from the quotas. Students are zero-intelligence
agents, so γ, β and the letter count never change between stages. Across
years the market is rebuilt at full size and only the application counts
carry over as market history.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.random import Generator

from laborsim.market import MarketConfig, MarketState, StepSummary, initial_state, market_step


@dataclass(frozen=True)
class StageRecord:
    """Stage-wise and cumulative quantities of one simulated stage ``n``.

    ``students``/``vacancies`` are N⁽ⁿ⁾ and V⁽ⁿ⁾ entering the stage,
    ``remaining_*`` the same counts after it. ``matched`` counts students,
    ``seats`` the quota consumed, ``offers`` all acceptances issued.
    """

    stage: int
    alpha_stage: float
    u_stage: float
    omega_stage: float
    cum_employment: float
    error: float
    remaining_students: int
    remaining_vacancies: int
    students: int = 0
    vacancies: int = 0
    matched: int = 0
    seats: int = 0
    offers: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def learning_error(alpha0: float, cum_employment: float) -> float:
    """Residual ``1 − (1−U)_n`` in a seller's market, ``α − (1−U)_n`` otherwise."""
    return (1.0 if alpha0 >= 1 else alpha0) - cum_employment


def run_stages(config: MarketConfig, n_max: int, rng: Generator,
               history: np.ndarray | None = None,
               observer: Callable[[MarketState, StepSummary], None] | None = None,
               ) -> list[StageRecord]:
    """Drive one year of job hunting through at most ``n_max`` stages.

    ``history`` is the application count vector carried over from the
    previous year; ``None`` means a cold start. The list is truncated as soon
    as no student or no vacancy is left. ``observer`` is called with the
    stage's entering state and its step summary, e.g. to audit fill counts.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    state = initial_state(config, history)
    N = config.n_students
    V0 = state.total_vacancy
    alpha0 = V0 / N
    hired = 0
    records: list[StageRecord] = []
    for n in range(n_max):
        students, vacancies = state.active_students, state.total_vacancy
        if students == 0 or vacancies == 0:
            break
        alpha_n = vacancies / students
        nxt, step = market_step(state, config, rng)
        if observer is not None:
            observer(state, step)
        hired += step.matched
        u_n = 1.0 - step.matched / students
        cum = hired / N
        records.append(StageRecord(
            stage=n,
            alpha_stage=alpha_n,
            u_stage=u_n,
            omega_stage=(u_n + alpha_n - 1.0) / alpha_n,
            cum_employment=cum,
            error=learning_error(alpha0, cum),
            remaining_students=students - step.matched,
            remaining_vacancies=vacancies - step.seats,
            students=students,
            vacancies=vacancies,
            matched=step.matched,
            seats=step.seats,
            offers=step.offers,
        ))
        state = MarketState(
            quotas=state.quotas - step.filled,
            prev_applications=nxt.prev_applications,
            active_students=students - step.matched,
            older_applications=nxt.older_applications,
        )
    return records


@dataclass(frozen=True)
class AnnualTrace:
    """Yearly unemployment rates and their time average after burn-in."""

    u_values: np.ndarray
    burn_in: int
    average: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "average", float(np.mean(self.u_values[self.burn_in:])))

    @property
    def horizon(self) -> int:
        return len(self.u_values)


def run_annual(config: MarketConfig, horizon: int, rng: Generator,
               burn_in: int | None = None) -> AnnualTrace:
    """Run ``horizon`` yearly markets and average U_t after ``burn_in`` years.

    Every year starts with all ``N`` students and the full quotas; the
    previous year's application counts feed the mismatch term. ``burn_in``
    defaults to ``horizon // 10``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if burn_in is None:
        burn_in = horizon // 10
    if not 0 <= burn_in < horizon:
        raise ValueError("burn_in must lie in [0, horizon)")
    state = initial_state(config)
    u = np.empty(horizon)
    for t in range(horizon):
        state, step = market_step(state, config, rng)
        u[t] = step.unemployment
    return AnnualTrace(u_values=u, burn_in=burn_in)
