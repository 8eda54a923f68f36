"""
Command-line entry point: ``laborsim {simulate,analyze,calibrate,limits,replay}``.

Settings resolve as flags > ``--config`` JSON file > built-in defaults; the
seed falls back to ``$LABORSIM_SEED`` and then 0. Every file written is
accompanied by ``<path>.manifest.json`` holding the resolved settings, and
``laborsim replay <manifest>`` reproduces the outputs byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from laborsim import __version__
from laborsim.analytics import (
    asymptotic_limits,
    learning_curve,
    stagewise_from_cumulative,
    uv_trajectory,
)
from laborsim.calibration import calibrate_gamma
from laborsim.data_io import dumps_json, parse_employment_csv, write_results, write_table
from laborsim.errors import (
    BracketingError,
    ConfigError,
    DataFormatError,
    DomainError,
    NonMonotoneError,
)
from laborsim.market import MarketConfig
from laborsim.stages import run_stages

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_NONMONOTONE = 5

MARKET_DEFAULTS = {
    "students": 2000,
    "companies": 100,
    "alpha": 1.0,
    "gamma": 1.0,
    "beta": 1.0,
    "letters": 10,
    "mismatch": "by_total_vacancy",
    "acceptance": "single",
    "quotas": None,
}

DEFAULTS = {
    "simulate": {**MARKET_DEFAULTS, "stages": 4, "format": "csv", "out": None},
    "analyze": {"input": None, "mode": "stagewise", "stage": 0,
                "trajectory_mode": "cumulative", "format": "csv", "out": None},
    "calibrate": {**MARKET_DEFAULTS, "target_u": None, "replicates": 8, "tolerance": 0.05,
                  "gamma_max": 20.0, "horizon": 30, "out": None},
    "limits": {"alpha": None},
}
SEEDED = {"simulate", "calibrate"}


class UsageError(Exception):
    pass


def _market_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--students", type=int, help="number of students N (2000)")
    p.add_argument("--companies", type=int, help="number of companies K (100)")
    p.add_argument("--alpha", type=float, help="job-offer ratio V/N (1.0)")
    p.add_argument("--gamma", type=float, help="ranking preference (1.0)")
    p.add_argument("--beta", type=float, help="market-history preference (1.0)")
    p.add_argument("--letters", type=int, help="application letters per student (10)")
    p.add_argument("--mismatch", choices=["raw", "by_total_vacancy"],
                   help="mismatch normalisation (by_total_vacancy)")
    p.add_argument("--acceptance", choices=["single", "multiple"],
                   help="booking of students with several offers (single)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="laborsim", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"laborsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run successive job-hunting stages")
    _market_flags(p)
    p.add_argument("--stages", type=int, help="maximum number of stages (4)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--config", help="JSON file with default settings")

    p = sub.add_parser("analyze", help="stage-wise transforms of an employment CSV")
    p.add_argument("--input", help="employment CSV file")
    p.add_argument("--mode", choices=["stagewise", "trajectory", "learning-curve"])
    p.add_argument("--stage", type=int, help="stage for --mode trajectory (0)")
    p.add_argument("--trajectory-mode", choices=["cumulative", "stagewise"])
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--config")

    p = sub.add_parser("calibrate", help="fit gamma to a target unemployment rate")
    _market_flags(p)
    p.add_argument("--target-u", type=float)
    p.add_argument("--replicates", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--gamma-max", type=float)
    p.add_argument("--horizon", type=int, help="years per replicate (30)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config")

    p = sub.add_parser("limits", help="asymptotic stage-wise limits for a job-offer ratio")
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    return parser


def resolve(command: str, args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS[command])
    config_file = getattr(args, "config", None)
    if config_file:
        with open(config_file, encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(settings) - {"seed"}
        if unknown:
            raise UsageError(f"unknown settings in {config_file}: {sorted(unknown)}")
        settings.update(loaded)
    for key in list(settings) + ["seed"]:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if command in SEEDED and settings.get("seed") is None:
        env = os.environ.get("LABORSIM_SEED")
        try:
            settings["seed"] = int(env) if env else 0
        except ValueError:
            raise UsageError(f"LABORSIM_SEED must be an integer, got {env!r}") from None
    return settings


def market_config(s: dict) -> MarketConfig:
    return MarketConfig(
        n_students=s["students"], n_companies=s["companies"], job_offer_ratio=s["alpha"],
        gamma=s["gamma"], beta=s["beta"], letters_per_student=s["letters"],
        mismatch_normalization=s["mismatch"], acceptance=s["acceptance"], seed=s["seed"],
        quotas=None if s.get("quotas") is None else tuple(int(q) for q in s["quotas"]))


def emit(data: bytes, out: str | None, command: str, settings: dict) -> None:
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
        return
    Path(out).write_bytes(data)
    manifest = {"command": command, "version": __version__, "seed": settings.get("seed"),
                "config": dict(sorted(settings.items())), "outputs": [out]}
    Path(out + ".manifest.json").write_bytes(dumps_json(manifest))


# --------------------------------------------------------------------------
# commands


def cmd_simulate(s: dict) -> int:
    if s["stages"] < 1:
        raise UsageError("--stages must be >= 1")
    cfg = market_config(s)
    records = run_stages(cfg, s["stages"], np.random.default_rng(cfg.seed))
    emit(write_results(records, s["format"]), s["out"], "simulate", s)
    if s["out"] is not None:
        print(f"{'n':>3} {'alpha_n':>10} {'U_n':>8} {'Omega_n':>8} {'(1-U)_n':>8} {'eps_n':>8}")
        for r in records:
            print(f"{r.stage:>3} {r.alpha_stage:>10.4f} {r.u_stage:>8.4f} {r.omega_stage:>8.4f} "
                  f"{r.cum_employment:>8.4f} {r.error:>8.4f}")
    return EXIT_OK


def cmd_analyze(s: dict) -> int:
    if not s["input"]:
        raise UsageError("--input is required")
    with open(s["input"], "rb") as fh:
        dataset = parse_employment_csv(fh)
    mode, fmt = s["mode"], s["format"]
    if mode == "trajectory":
        traj = uv_trajectory(dataset.records, s["stage"], s["trajectory_mode"])
        data = write_results(traj, fmt)
    elif mode == "stagewise":
        cols = ("year_label", "stage", "alpha_stage", "u_stage", "omega_stage", "identity_residual")
        rows, saturated = [], {}
        for series in dataset.records:
            res = stagewise_from_cumulative(series)
            rows += [[series.year_label, t.stage, t.alpha_stage, t.u_stage, t.omega_stage,
                      t.identity_residual] for t in res]
            if res.saturated_at is not None:
                saturated[series.year_label] = {"stage": res.saturated_at, "reason": res.saturation}
        if fmt == "json":
            data = dumps_json({"rows": [dict(zip(cols, r)) for r in rows], "saturated": saturated})
        else:
            data = write_table(cols, rows)
    else:
        cols = ("year_label", "stage", "error")
        rows = [[series.year_label, n, e]
                for series in dataset.records for n, e in enumerate(learning_curve(series))]
        data = dumps_json([dict(zip(cols, r)) for r in rows]) if fmt == "json" else write_table(cols, rows)
    emit(data, s["out"], "analyze", s)
    return EXIT_OK


def cmd_calibrate(s: dict) -> int:
    if s["target_u"] is None:
        raise UsageError("--target-u is required")
    cfg = market_config(s)
    result = calibrate_gamma(s["target_u"], cfg, gamma_max=s["gamma_max"],
                             tolerance=s["tolerance"], replicates=s["replicates"],
                             horizon=s["horizon"])
    emit(write_results(result, "json"), s["out"], "calibrate", s)
    if s["out"] is not None:
        print(f"gamma = {result.gamma_hat:.6g}  U = {result.achieved_u:.6g} ± "
              f"{result.achieved_stderr:.2g}  ({result.converged_by})")
    return EXIT_OK


def cmd_limits(s: dict) -> int:
    alpha = s["alpha"]
    if alpha is None or not alpha > 0:
        raise UsageError("--alpha must be a positive number")
    lim = asymptotic_limits(alpha)
    print(f"alpha = {alpha:g}: {lim.regime}")
    print(f"  lim alpha_n = {lim.alpha_limit}")
    print(f"  lim U_n     = {lim.u_limit}")
    print(f"  lim Omega_n = {lim.omega_limit}")
    print(f"  lim Omega (cumulative) = {lim.omega_cumulative_limit:g}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "analyze": cmd_analyze,
            "calibrate": cmd_calibrate, "limits": cmd_limits}


def run(command: str, settings: dict) -> int:
    try:
        return COMMANDS[command](settings)
    except (UsageError, ConfigError) as exc:
        print(f"laborsim {command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, DomainError, OSError) as exc:
        print(f"laborsim {command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BracketingError as exc:
        print(f"laborsim {command}: infeasible target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NonMonotoneError as exc:
        print(f"laborsim {command}: {exc}", file=sys.stderr)
        return EXIT_NONMONOTONE


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        return run(manifest["command"], manifest["config"])
    try:
        settings = resolve(args.command, args)
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"laborsim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(args.command, settings)


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
