"""
Microscopic graduate labor market.

Each company ``k`` has a fixed ranking factor ``1 + k/K`` and a quota. Every
job-seeking student posts ``a`` application letters, choosing companies with
the softmax (MaxEnt) aggregation probability

    P_k ∝ exp[γ log(1 + k/K) − β |v*_k − v_k(t−1)|]

and companies that are over-subscribed select their quota uniformly at random
from the applicants. Companies are indexed ``0..K-1`` in arrays; the public
scalar helpers take the 1-based rank ``k`` used in the formulas.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from numpy.random import Generator

from laborsim.errors import ConfigError, DomainError

log = logging.getLogger(__name__)

MismatchMode = Literal["raw", "by_total_vacancy"]
AcceptanceMode = Literal["single", "multiple"]


@dataclass(frozen=True)
class MarketConfig:
    """All parameters of one simulated market.

    Quotas default to the uniform ``η = round(α N / K)`` with the rounding
    residual spread over the lowest-index companies so that the total vacancy
    equals ``round(α N)``. ``quotas`` overrides this entirely (entries may be 0,
    which closes the company).

    The mismatch entering the energy is ``|v*_k − v_k| / V`` by default;
    ``mismatch_normalization="raw"`` drops the ``1/V`` factor, which lets the
    history term swamp the ranking term for realistic market sizes.

    ``acceptance`` decides how a student holding several offers in one step
    is booked: ``"single"`` (default) has the student join the highest ranked
    offering company and leaves the other seats open; ``"multiple"`` consumes
    a seat at every accepting company.
    """

    n_students: int = 2000
    n_companies: int = 100
    job_offer_ratio: float = 1.0
    gamma: float = 1.0
    beta: float = 1.0
    letters_per_student: int = 10
    mismatch_normalization: MismatchMode = "by_total_vacancy"
    seed: int = 0
    history_depth: int = 1
    history_weights: tuple[float, ...] | None = None
    quota_per_company: int | None = None
    quotas: tuple[int, ...] | None = None
    acceptance: AcceptanceMode = "single"

    def __post_init__(self) -> None:
        if self.n_students < 1 or self.n_companies < 1:
            raise ConfigError("n_students and n_companies must be >= 1")
        if not 1 <= self.letters_per_student <= self.n_companies:
            raise ConfigError(
                f"letters_per_student must lie in [1, K={self.n_companies}], "
                f"got {self.letters_per_student}")
        if not self.job_offer_ratio > 0:
            raise ConfigError("job_offer_ratio must be positive")
        if self.gamma < 0 or self.beta < 0:
            raise ConfigError("gamma and beta must be non-negative")
        if self.history_depth < 1:
            raise ConfigError("history_depth must be >= 1")
        if self.history_weights is not None and len(self.history_weights) != self.history_depth:
            raise ConfigError("history_weights must have history_depth entries")
        if self.mismatch_normalization not in ("raw", "by_total_vacancy"):
            raise ConfigError(f"unknown mismatch_normalization {self.mismatch_normalization!r}")
        if self.acceptance not in ("single", "multiple"):
            raise ConfigError(f"unknown acceptance mode {self.acceptance!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.quota_per_company is not None and self.quota_per_company < 1:
            raise ConfigError("quota_per_company must be >= 1")
        if self.quotas is not None:
            if len(self.quotas) != self.n_companies:
                raise ConfigError("quotas must have one entry per company")
            if any(q < 0 for q in self.quotas):
                raise ConfigError("quotas must be non-negative")

    def quota_vector(self) -> np.ndarray:
        """Per-company quotas ``v*_k`` as an int64 array."""
        K = self.n_companies
        if self.quotas is not None:
            return np.asarray(self.quotas, dtype=np.int64)
        if self.quota_per_company is not None:
            return np.full(K, self.quota_per_company, dtype=np.int64)
        eta = max(1, round(self.n_students * self.job_offer_ratio / K))
        q = np.full(K, eta, dtype=np.int64)
        residual = max(round(self.job_offer_ratio * self.n_students), K) - eta * K
        # residual is bounded by K/2 in magnitude; keep every quota >= 1
        step = 1 if residual > 0 else -1
        for k in range(abs(residual)):
            q[k % K] += step
        return q

    def beta_vector(self) -> np.ndarray:
        """Market-history weights ``(β, 0, ..., 0)`` unless overridden."""
        if self.history_weights is not None:
            return np.asarray(self.history_weights, dtype=float)
        w = np.zeros(self.history_depth)
        w[0] = self.beta
        return w


@dataclass
class MarketState:
    """Market at one step or stage.

    Students are exchangeable, so the surviving sub-market is fully described
    by its head count; ``student_matched`` refers to the students active in
    the step that produced this state.
    """

    quotas: np.ndarray
    prev_applications: np.ndarray
    active_students: int
    filled: np.ndarray = field(default=None)  # type: ignore[assignment]
    student_matched: np.ndarray = field(default=None)  # type: ignore[assignment]
    # older application counts v_k(t-2), v_k(t-3), ...
    older_applications: tuple[np.ndarray, ...] = ()

    def __post_init__(self) -> None:
        K = len(self.quotas)
        if self.filled is None:
            self.filled = np.zeros(K, dtype=np.int64)
        if self.student_matched is None:
            self.student_matched = np.zeros(0, dtype=bool)

    @property
    def n_companies(self) -> int:
        return len(self.quotas)

    @property
    def total_vacancy(self) -> int:
        return int(self.quotas.sum())

    def application_history(self, depth: int) -> np.ndarray:
        """``(depth, K)`` array of v_k(t-1), v_k(t-2), ...; missing years repeat the oldest."""
        rows = [self.prev_applications, *self.older_applications][:depth]
        while len(rows) < depth:
            rows.append(rows[-1])
        return np.vstack(rows)


def initial_state(config: MarketConfig, history: np.ndarray | None = None) -> MarketState:
    """Fresh full-size market; cold start sets v_k(−1) = v*_k (zero mismatch)."""
    quotas = config.quota_vector()
    prev = quotas.copy() if history is None else np.asarray(history, dtype=np.int64).copy()
    if prev.shape != quotas.shape:
        raise ConfigError("history must have one entry per company")
    return MarketState(quotas=quotas, prev_applications=prev,
                       active_students=config.n_students)


# --------------------------------------------------------------------------
# scalar building blocks


def ranking_factor(k: int, K: int) -> float:
    """Ranking factor ``1 + k/K`` of the 1-based company rank ``k``."""
    if not 1 <= k <= K:
        raise DomainError(f"company rank k={k} outside 1..{K}")
    return 1.0 + k / K


def local_mismatch(quota: int, applications: int, total_vacancy: int | None = None,
                   mode: MismatchMode = "raw") -> float:
    """Gap between a company's applications and its quota.

    ``mode="raw"`` gives ``|v* − v|`` (the form entering the softmax);
    ``mode="by_total_vacancy"`` divides by the total vacancy ``V``.
    """
    gap = abs(quota - applications)
    if mode == "raw":
        return float(gap)
    if mode == "by_total_vacancy":
        if not total_vacancy or total_vacancy <= 0:
            raise DomainError("total_vacancy must be positive for by_total_vacancy")
        return gap / total_vacancy
    raise DomainError(f"unknown mismatch mode {mode!r}")


def energy(k: int, K: int, gamma: float, beta: float | np.ndarray,
           mismatch_history) -> float:
    """Energy ``−γ log(1 + k/K) + Σ_l β_l h_k(t−l)`` of company ``k``.

    A scalar ``beta`` is the history vector ``(β, 0, ..., 0)``.
    """
    h = np.atleast_1d(np.asarray(mismatch_history, dtype=float))
    if np.ndim(beta) == 0:
        weights = np.zeros(len(h))
        weights[0] = beta
    else:
        weights = np.asarray(beta, dtype=float)
        if weights.shape != h.shape:
            raise DomainError("beta vector and mismatch history differ in length")
    return float(-gamma * np.log(ranking_factor(k, K)) + weights @ h)


# --------------------------------------------------------------------------
# vectorised market mechanics


def company_energies(state: MarketState, config: MarketConfig) -> np.ndarray:
    K = state.n_companies
    log_rank = np.log1p(np.arange(1, K + 1) / K)
    gaps = np.abs(state.quotas[None, :] - state.application_history(config.history_depth))
    gaps = gaps.astype(float)
    if config.mismatch_normalization == "by_total_vacancy":
        gaps /= max(state.total_vacancy, 1)
    return -config.gamma * log_rank + config.beta_vector() @ gaps


def softmax(x: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
    """Max-shifted softmax; entries where ``mask`` is False get probability 0."""
    x = np.asarray(x, dtype=float)
    if mask is not None:
        x = np.where(mask, x, -np.inf)
    z = x - np.max(x)
    w = np.exp(z)
    return w / w.sum()


def aggregation_logits(state: MarketState, config: MarketConfig,
                       open_mask: np.ndarray | None = None) -> np.ndarray:
    """``−E_k`` for open companies, ``-inf`` for closed ones."""
    x = -company_energies(state, config)
    if open_mask is not None:
        if not np.any(open_mask):
            raise DomainError("no open company to apply to")
        x = np.where(open_mask, x, -np.inf)
    return x


def aggregation_probabilities(state: MarketState, config: MarketConfig,
                              open_mask: np.ndarray | None = None) -> np.ndarray:
    """Probability that a letter targets each company, ``softmax(−E)``.

    Companies outside ``open_mask`` are excluded and the rest renormalised.
    """
    return softmax(aggregation_logits(state, config, open_mask))


@dataclass(frozen=True)
class Applications:
    """Realised letters: ``choices[i]`` lists the distinct companies of student ``i``."""

    choices: np.ndarray
    counts: np.ndarray

    @property
    def n_students(self) -> int:
        return self.choices.shape[0]


def sample_applications(probabilities: np.ndarray, active_students: int, letters: int,
                        rng: Generator) -> Applications:
    """Each student draws ``letters`` distinct companies without replacement.

    Companies are drawn one at a time proportionally to ``probabilities``,
    each pick being removed from the urn. Zero-probability companies are
    never drawn.
    """
    p = np.asarray(probabilities, dtype=float)
    with np.errstate(divide="ignore"):
        return sample_applications_from_logits(np.log(p), active_students, letters, rng)


def sample_applications_from_logits(logits: np.ndarray, active_students: int, letters: int,
                                    rng: Generator) -> Applications:
    """:func:`sample_applications` driven by unnormalised log-weights.

    Each (student, company) pair gets the key ``log E − logit`` with
    ``E ~ Exp(1)`` and the ``letters`` smallest keys win. This exponential
    race has the law of successive weighted draws without replacement and,
    working in log space, never underflows for very unattractive companies.
    ``-inf`` logits mark closed companies.
    """
    x = np.asarray(logits, dtype=float)
    K = len(x)
    n_support = int(np.count_nonzero(np.isfinite(x)))
    if letters > n_support:
        raise ConfigError(f"cannot post {letters} letters to {n_support} open companies")
    if active_students == 0:
        return Applications(np.zeros((0, letters), dtype=np.int64), np.zeros(K, dtype=np.int64))
    if letters == K:
        choices = np.broadcast_to(np.arange(K), (active_students, K)).copy()
    else:
        keys = rng.standard_exponential(size=(active_students, K))
        np.log(keys, out=keys)
        keys -= x - np.max(x)
        choices = np.argpartition(keys, letters - 1, axis=1)[:, :letters]
    counts = np.bincount(choices.ravel(), minlength=K).astype(np.int64)
    return Applications(choices=choices.astype(np.int64), counts=counts)


@dataclass(frozen=True)
class Selection:
    """Outcome of company-side selection for one step.

    ``offers[i, j]`` is True when company ``choices[i, j]`` accepted student
    ``i``. ``joined[i]`` is the company the student is booked at (−1 when
    unmatched); ``filled`` is m_k under the configured accounting.
    """

    offers: np.ndarray
    offer_counts: np.ndarray
    joined: np.ndarray
    filled: np.ndarray

    @property
    def matched(self) -> np.ndarray:
        return self.joined >= 0


def resolve_selection(applications: Applications, quotas: np.ndarray, rng: Generator,
                      acceptance: AcceptanceMode = "single") -> Selection:
    """Companies accept all applicants up to quota, else a uniform random ``v*_k`` of them."""
    quotas = np.asarray(quotas, dtype=np.int64)
    K = len(quotas)
    n, a = applications.choices.shape
    flat = applications.choices.ravel()
    # uniform shuffle within each company: sort by company + U[0, 1)
    order = np.argsort(flat + rng.random(flat.size))
    by_company = flat[order]
    starts = np.cumsum(applications.counts) - applications.counts
    rank = np.arange(flat.size) - starts[by_company]
    accepted = np.empty(flat.size, dtype=bool)
    accepted[order] = rank < quotas[by_company]
    offers = accepted.reshape(n, a)
    offer_counts = np.bincount(flat[accepted], minlength=K).astype(np.int64)

    # a student with several offers joins the highest ranked one
    ranked = np.where(offers, applications.choices, -1)
    joined = ranked.max(axis=1) if a else np.full(n, -1, dtype=np.int64)
    if acceptance == "single":
        filled = np.bincount(joined[joined >= 0], minlength=K).astype(np.int64)
    else:
        filled = offer_counts.copy()
    return Selection(offers=offers, offer_counts=offer_counts, joined=joined, filled=filled)


@dataclass(frozen=True)
class StepSummary:
    active: int
    matched: int
    seats: int
    offers: int
    applications: np.ndarray
    offer_counts: np.ndarray
    filled: np.ndarray

    @property
    def unemployment(self) -> float:
        """U_t among the students active in this step (1 when nobody was active)."""
        if self.active == 0:
            return 1.0
        return 1.0 - self.matched / self.active


def market_step(state: MarketState, config: MarketConfig,
                rng: Generator) -> tuple[MarketState, StepSummary]:
    """Aggregation probabilities, letters, then company selection.

    Companies with no remaining quota are closed; students post
    ``min(a, #open)`` letters. The returned state carries this step's
    application counts as the new market history and leaves quotas untouched.
    """
    K = state.n_companies
    n = state.active_students
    open_mask = state.quotas > 0
    n_open = int(open_mask.sum())
    letters = min(config.letters_per_student, n_open)

    if n == 0 or n_open == 0:
        apps = Applications(np.zeros((n, 0), dtype=np.int64), np.zeros(K, dtype=np.int64))
        sel = Selection(offers=np.zeros((n, 0), dtype=bool),
                        offer_counts=np.zeros(K, dtype=np.int64),
                        joined=np.full(n, -1, dtype=np.int64),
                        filled=np.zeros(K, dtype=np.int64))
    else:
        x = aggregation_logits(state, config, open_mask)
        apps = sample_applications_from_logits(x, n, letters, rng)
        sel = resolve_selection(apps, state.quotas, rng, config.acceptance)

    matched = sel.matched
    summary = StepSummary(
        active=n,
        matched=int(matched.sum()),
        seats=int(sel.filled.sum()),
        offers=int(sel.offer_counts.sum()),
        applications=apps.counts,
        offer_counts=sel.offer_counts,
        filled=sel.filled,
    )
    older = (state.prev_applications, *state.older_applications)[: config.history_depth - 1]
    nxt = replace(state, prev_applications=apps.counts, filled=sel.filled,
                  student_matched=matched, older_applications=older)
    log.debug("step: active=%d matched=%d seats=%d", n, summary.matched, summary.seats)
    return nxt, summary
