from __future__ import annotations

import io
import json

import numpy as np
import pytest

import laborsim
from laborsim.analytics import (
    CumulativeSeries,
    Trajectory,
    TrajectoryPoint,
    TrajectoryWarning,
    uv_trajectory,
)
from laborsim.calibration import CalibrationResult, TracePoint
from laborsim.data_io import (
    STAGE_COLUMNS,
    YearDataset,
    dataset_to_dict,
    fmt_float,
    parse_employment_csv,
    read_calibration,
    read_stage_records,
    read_trajectory,
    write_dataset,
    write_results,
)
from laborsim.errors import DataFormatError
from laborsim.market import MarketConfig
from laborsim.stages import StageRecord, run_stages

HEADER = "year,alpha0,cum_emp_0,cum_emp_1,cum_emp_2,cum_emp_3\n"


def diagnostics(text):
    with pytest.raises(DataFormatError) as info:
        parse_employment_csv(text.encode())
    return [(d.row, d.column) for d in info.value.diagnostics]


# ---------------------------------------------------------------- parsing


def test_parse_headline_row():
    ds = parse_employment_csv((HEADER + "2012,1.28,0.60,0.75,0.85,0.94\n").encode())
    assert len(ds) == 1
    s = ds["2012"]
    assert s.alpha0 == 1.28 and s.cum_employment == (0.6, 0.75, 0.85, 0.94)


def test_rate_above_alpha_rejected():
    assert diagnostics(HEADER + "2000,0.99,0.60,0.80,0.995,0.995\n") == [
        (1, "cum_emp_2"), (1, "cum_emp_3")]


def test_non_monotone_rejected_with_location():
    assert diagnostics(HEADER + "2012,1.28,0.6,0.75,0.85,0.94\n2013,1.3,0.7,0.65,0.8,0.9\n") == [
        (2, "cum_emp_1")]


@pytest.mark.parametrize("text,where", [
    ("year,alpha,cum_emp_0\n2012,1.2,0.5\n", (0, "year,alpha,cum_emp_0")),
    ("year,alpha0\n2012,1.2\n", (0, "year,alpha0")),
    ("year,alpha0,cum_emp_0,cum_emp_2\n2012,1.2,0.5,0.6\n", (0, "cum_emp_2")),
    (HEADER + "2012,abc,0.5\n", (1, "alpha0")),
    (HEADER + "2012,1.2,0.5,x\n", (1, "cum_emp_1")),
    (HEADER + "2012,0,0.5\n", (1, "alpha0")),
    (HEADER + "2012,-1.2,0.5\n", (1, "alpha0")),
    (HEADER + "2012,1.2,0.5,,0.7\n", (1, "cum_emp_2")),
    (HEADER + "2012,1.2,0.5,0.6,0.7,0.8,0.9\n", (1, "cum_emp_3")),
    (HEADER + ",1.2,0.5\n", (1, "year")),
    (HEADER + "2012,1.2\n", (1, "cum_emp_0")),
    (HEADER + "2012,1.2,nan\n", (1, "cum_emp_0")),
    (HEADER + "2012,1.2,0.5\n2012,1.3,0.6\n", (2, "year")),
    ("", (0, "")),
])
def test_malformed_inputs_are_located(text, where):
    assert where in diagnostics(text)


def test_percent_columns_detected_independently():
    text = HEADER + "2000,0.99,55.0,0.70\n2012,1.28,60,0.75\n"
    ds = parse_employment_csv(text.encode())
    assert ds["2000"].cum_employment == (0.55, 0.70)
    assert ds["2012"].cum_employment == (0.6, 0.75)


def test_short_rows_and_provenance():
    text = "# source: illustrative\n# second line\n" + HEADER + "2012,1.28,0.6\n2013,1.3,0.5,0.7\n"
    ds = parse_employment_csv(io.StringIO(text))
    assert ds.provenance == "source: illustrative\nsecond line"
    assert len(ds["2012"]) == 1 and len(ds["2013"]) == 2
    assert parse_employment_csv(io.BytesIO(("﻿" + HEADER + "1,1.0,0.5\n").encode())).records


def test_dataset_invariants():
    s = CumulativeSeries("a", 1.0, (0.5,))
    with pytest.raises(ValueError):
        YearDataset((s, s))
    with pytest.raises(KeyError):
        YearDataset((s,))["b"]


def test_bundled_sample_roundtrip():
    raw = laborsim.sample_data_path().read_bytes()
    ds = parse_employment_csv(raw)
    assert ds["2012"].alpha0 == 1.28 and ds["2000"].alpha0 == 0.99
    assert "Illustrative" in ds.provenance
    once = write_dataset(ds)
    again = parse_employment_csv(once)
    assert write_dataset(again) == once
    assert again.provenance == ds.provenance
    for a, b in zip(ds.records, again.records):
        assert a.year_label == b.year_label and a.alpha0 == b.alpha0
        np.testing.assert_allclose(a.cum_employment, b.cum_employment, rtol=1e-12)
    assert dataset_to_dict(again)["records"][0]["year_label"] == "2000"


# ---------------------------------------------------------------- writing


def test_empty_records_header_only():
    assert write_results([], "csv") == (",".join(STAGE_COLUMNS) + "\n").encode()
    assert write_results([], "json") == b"[]\n"


def test_stage_record_json_roundtrip():
    rec = StageRecord(stage=2, alpha_stage=1.7, u_stage=0.5, omega_stage=0.705882352941,
                      cum_employment=0.8, error=0.2, remaining_students=400,
                      remaining_vacancies=960, students=800, vacancies=1360, matched=400,
                      seats=400, offers=412)
    assert read_stage_records(write_results([rec], "json"), "json") == [rec]


def test_stage_records_csv_roundtrip_and_stability():
    cfg = MarketConfig(job_offer_ratio=0.7, seed=4)
    recs = run_stages(cfg, 6, np.random.default_rng(4))
    data = write_results(recs, "csv")
    assert data == write_results(run_stages(cfg, 6, np.random.default_rng(4)), "csv")
    back = read_stage_records(data)
    for a, b in zip(recs, back):
        for col in STAGE_COLUMNS:
            assert getattr(b, col) == pytest.approx(getattr(a, col), rel=1e-11)


def test_float_rendering():
    assert fmt_float(0.1 + 0.2) == "0.3"
    assert fmt_float(2.0) == "2"
    assert fmt_float(1 / 3) == "0.333333333333"


def test_trajectory_and_calibration_roundtrip():
    traj = uv_trajectory([CumulativeSeries("2012", 1.28, (0.6, 0.75))], 1, "stagewise")
    assert read_trajectory(write_results(traj, "json")).points[0].year_label == "2012"
    csv = write_results(traj, "csv").decode()
    assert csv.splitlines()[0] == "year_label,stage,omega,u"
    t2 = Trajectory((TrajectoryPoint("a", 0, 0.25, 0.5),), (TrajectoryWarning("b", 0, "series too short"),))
    assert read_trajectory(write_results(t2, "json")) == t2

    res = CalibrationResult(gamma_hat=2.5, bracket=(2.0, 3.0), target_u=0.4, achieved_u=0.401,
                            achieved_stderr=0.002, replicates=8, iterations=3,
                            converged_by="noise", consistent_interval=(2.0, 2.5),
                            trace=(TracePoint(0.0, 0.35, 0.001, 0.0, 20.0),
                                   TracePoint(2.5, 0.401, 0.002, 2.0, 3.0)))
    assert read_calibration(write_results(res, "json")) == res
    assert write_results(res, "csv").decode().splitlines()[0] == "gamma,u,stderr,low,high"
    assert json.loads(write_results(res, "json"))["converged_by"] == "noise"
    with pytest.raises(ValueError):
        write_results(res, "xml")
