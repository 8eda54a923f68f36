"""Regenerate the self-golden regression files under tests/golden/.

Run only after a change that is meant to alter simulated output, and review
the diff before committing it.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from laborsim.data_io import write_results
from laborsim.market import MarketConfig, initial_state, market_step
from laborsim.stages import run_annual, run_stages

GOLDEN = Path(__file__).parent / "golden"
LEARNING_SEED = 20
LEARNING_STAGES = 21  # stages n = 0..20


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    cfg = MarketConfig(seed=2024)
    _, step = market_step(initial_state(cfg), cfg, np.random.default_rng(cfg.seed))
    (GOLDEN / "market_step.json").write_text(
        json.dumps({"u_t": step.unemployment, "matched": step.matched}, indent=2) + "\n")

    trace = run_annual(cfg, 200, np.random.default_rng(cfg.seed))
    (GOLDEN / "annual.json").write_text(
        json.dumps({"average": trace.average, "u_values": trace.u_values.tolist()}, indent=2) + "\n")

    cfg = MarketConfig(job_offer_ratio=2.0, seed=7)
    records = run_stages(cfg, 20, np.random.default_rng(cfg.seed))
    (GOLDEN / "stages_alpha2_seed7.csv").write_bytes(write_results(records, "csv"))
    (GOLDEN / "stages_alpha2_seed7.json").write_bytes(write_results(records, "json"))

    curves = {}
    for alpha in (0.5, 2.0):
        cfg = MarketConfig(job_offer_ratio=alpha, seed=LEARNING_SEED)
        recs = run_stages(cfg, LEARNING_STAGES, np.random.default_rng(cfg.seed))
        curves[str(alpha)] = [r.cum_employment for r in recs]
    (GOLDEN / "learning_curves.json").write_text(json.dumps(curves, indent=2) + "\n")


if __name__ == "__main__":
    main()
