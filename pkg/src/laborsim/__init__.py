"""Agent-based simulation and stage-wise analytics of a graduate labor market."""

from __future__ import annotations

__version__ = "0.1.0"

from laborsim.analytics import (
    AsymptoticLimits,
    CumulativeSeries,
    Limit,
    StageTriple,
    StagewiseResult,
    Trajectory,
    asymptotic_limits,
    cumulative_from_stagewise,
    labor_shortage,
    learning_curve,
    stage_alpha_gap,
    stagewise_from_cumulative,
    uv_trajectory,
)
from laborsim.calibration import CalibrationResult, calibrate_gamma, estimate_u
from laborsim.data_io import YearDataset, parse_employment_csv, write_results
from laborsim.errors import (
    BracketingError,
    ConfigError,
    DataFormatError,
    DomainError,
    LaborSimError,
    NonMonotoneError,
    SaturationError,
    SeriesValidationError,
)
from laborsim.market import MarketConfig, MarketState, initial_state, market_step
from laborsim.stages import StageRecord, run_annual, run_stages

__all__ = [
    "AsymptoticLimits", "BracketingError", "CalibrationResult", "ConfigError",
    "CumulativeSeries", "DataFormatError", "DomainError", "LaborSimError", "Limit",
    "MarketConfig", "MarketState", "NonMonotoneError", "SaturationError",
    "SeriesValidationError", "StageRecord", "StageTriple", "StagewiseResult", "Trajectory",
    "YearDataset", "asymptotic_limits", "calibrate_gamma", "cumulative_from_stagewise",
    "estimate_u", "initial_state", "labor_shortage", "learning_curve", "market_step",
    "parse_employment_csv", "run_annual", "run_stages", "stage_alpha_gap",
    "stagewise_from_cumulative", "sample_data_path", "uv_trajectory", "write_results",
]


def sample_data_path():
    """Path of the bundled illustrative employment CSV."""
    from importlib.resources import files

    return files("laborsim") / "data" / "sample_employment.csv"
