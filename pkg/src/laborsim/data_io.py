"""
Employment CSV ingestion and stable CSV/JSON result serialisation.

Input schema (UTF-8, one year per row)::

    year,alpha0,cum_emp_0,cum_emp_1,cum_emp_2,cum_emp_3

Trailing ``cum_emp_*`` columns are optional but must be contiguous; rows may
leave trailing stage cells empty. A rate column whose largest value exceeds
1.5 is read as percentages. Leading ``#`` lines are kept as provenance.

Every float is written with 12 significant digits, so identical inputs give
byte-identical outputs.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import re
from collections.abc import Sequence
from dataclasses import asdict, dataclass, fields, is_dataclass
from typing import IO, Any, Literal, Union

from laborsim.analytics import (
    CumulativeSeries,
    Trajectory,
    TrajectoryPoint,
    TrajectoryWarning,
    validate_series,
)
from laborsim.calibration import CalibrationResult, TracePoint
from laborsim.errors import DataFormatError, Diagnostic
from laborsim.stages import StageRecord

Format = Literal["csv", "json"]
Source = Union[bytes, str, IO[bytes], IO[str]]

STAGE_COLUMNS = ("stage", "alpha_stage", "u_stage", "omega_stage", "cum_employment",
                 "error", "remaining_students", "remaining_vacancies")
TRAJECTORY_COLUMNS = ("year_label", "stage", "omega", "u")
TRACE_COLUMNS = ("gamma", "u", "stderr", "low", "high")
PERCENT_THRESHOLD = 1.5

_STAGE_COL = re.compile(r"cum_emp_(\d+)$")


@dataclass(frozen=True)
class YearDataset:
    records: tuple[CumulativeSeries, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        labels = [r.year_label for r in self.records]
        if len(set(labels)) != len(labels):
            raise ValueError("year labels must be unique")

    def __getitem__(self, year: str) -> CumulativeSeries:
        for r in self.records:
            if r.year_label == year:
                return r
        raise KeyError(year)

    def __len__(self) -> int:
        return len(self.records)


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8-sig")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8-sig") if isinstance(data, bytes) else data


def parse_employment_csv(source: Source) -> YearDataset:
    """Parse and validate an employment CSV; raises :class:`DataFormatError`.

    Diagnostics use 1-based data row numbers (the header is row 0).
    """
    text = _read_text(source)
    lines = text.splitlines()
    provenance = []
    while lines and lines[0].startswith("#"):
        provenance.append(lines.pop(0)[1:].strip())
    rows = list(csv.reader(lines))
    if not rows:
        raise DataFormatError([Diagnostic(0, "", "empty input")])

    header = [h.strip() for h in rows[0]]
    if header[:2] != ["year", "alpha0"] or len(header) < 3:
        raise DataFormatError([Diagnostic(0, ",".join(header),
                                          "header must start with year,alpha0,cum_emp_0")])
    for j, name in enumerate(header[2:]):
        m = _STAGE_COL.match(name)
        if not m or int(m.group(1)) != j:
            raise DataFormatError([Diagnostic(0, name, f"expected column cum_emp_{j}")])
    stage_cols = header[2:]

    diags: list[Diagnostic] = []
    parsed: list[tuple[int, str, float | None, list[float]]] = []
    for i, raw in enumerate(rows[1:], start=1):
        if not any(cell.strip() for cell in raw):
            continue
        if len(raw) > len(header):
            diags.append(Diagnostic(i, header[-1], f"{len(raw)} cells for {len(header)} columns"))
            continue
        cells = [c.strip() for c in raw] + [""] * (len(header) - len(raw))
        year = cells[0]
        if not year:
            diags.append(Diagnostic(i, "year", "missing year label"))
        alpha = _number(cells[1], i, "alpha0", diags)
        if alpha is not None and not alpha > 0:
            diags.append(Diagnostic(i, "alpha0", f"job-offer ratio must be positive, got {cells[1]}"))
            alpha = None
        rates: list[float] = []
        seen_gap = False
        for name, cell in zip(stage_cols, cells[2:]):
            if not cell:
                seen_gap = True
                continue
            if seen_gap:
                diags.append(Diagnostic(i, name, "stage value after an empty stage cell"))
                break
            v = _number(cell, i, name, diags)
            if v is None:
                break
            rates.append(v)
        if not rates:
            diags.append(Diagnostic(i, "cum_emp_0", "at least one stage rate is required"))
        parsed.append((i, year, alpha, rates))

    # percentage detection, column by column
    for j, name in enumerate(stage_cols):
        col = [rates[j] for _, _, _, rates in parsed if len(rates) > j]
        if col and max(col) > PERCENT_THRESHOLD:
            for row, _, _, rates in parsed:
                if len(rates) > j:
                    if not 0 <= rates[j] <= 100:
                        diags.append(Diagnostic(row, name, f"percentage {rates[j]} outside [0, 100]"))
                    rates[j] /= 100.0

    seen: dict[str, int] = {}
    records = []
    for row, year, alpha, rates in parsed:
        if year in seen:
            diags.append(Diagnostic(row, "year", f"duplicate year {year!r} (first on row {seen[year]})"))
            continue
        seen[year] = row
        if alpha is None or not rates or not year:
            continue
        problems = validate_series(alpha, rates)
        for stage, msg in problems:
            diags.append(Diagnostic(row, "alpha0" if stage is None else stage_cols[stage], msg))
        if not problems:
            records.append(CumulativeSeries(year, alpha, tuple(rates)))
    if diags:
        raise DataFormatError(diags)
    return YearDataset(tuple(records), "\n".join(provenance))


def _number(cell: str, row: int, column: str, diags: list[Diagnostic]) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        diags.append(Diagnostic(row, column, f"not a number: {cell!r}"))
        return None
    if not math.isfinite(v):
        diags.append(Diagnostic(row, column, f"not a finite number: {cell!r}"))
        return None
    return v


# --------------------------------------------------------------------------
# serialisation


def fmt_float(x: float) -> str:
    return format(x, ".12g")


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, enum.Enum):
        return str(v.value)
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return float(fmt_float(v)) if math.isfinite(v) else fmt_float(v)
    if isinstance(v, enum.Enum):
        return v.value
    if is_dataclass(v):
        return {f.name: _jsonable(getattr(v, f.name)) for f in fields(v)}
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "tolist"):
        return _jsonable(v.tolist())
    raise TypeError(f"cannot serialise {type(v).__name__}")


def dumps_json(obj: Any) -> bytes:
    return (json.dumps(_jsonable(obj), indent=2) + "\n").encode("utf-8")


def write_table(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue().encode("utf-8")


def write_results(obj: Sequence[StageRecord] | Trajectory | CalibrationResult,
                  format: Format = "csv") -> bytes:
    """Serialise stage records, a U–Ω trajectory or a calibration result.

    Stage records in CSV use the fixed column set :data:`STAGE_COLUMNS`; JSON
    output carries every field. A calibration result in CSV is its trace.
    """
    if format not in ("csv", "json"):
        raise ValueError(f"unknown format {format!r}")
    if isinstance(obj, CalibrationResult):
        if format == "json":
            return dumps_json(obj)
        return write_table(TRACE_COLUMNS, [[getattr(p, c) for c in TRACE_COLUMNS] for p in obj.trace])
    if isinstance(obj, Trajectory):
        if format == "json":
            return dumps_json(obj)
        return write_table(TRAJECTORY_COLUMNS,
                           [[getattr(p, c) for c in TRAJECTORY_COLUMNS] for p in obj.points])
    records = list(obj)
    if format == "json":
        return dumps_json(records)
    return write_table(STAGE_COLUMNS, [[getattr(r, c) for c in STAGE_COLUMNS] for r in records])


def read_stage_records(data: bytes, format: Format = "csv") -> list[StageRecord]:
    """Inverse of :func:`write_results` for stage records.

    CSV only carries :data:`STAGE_COLUMNS`; the raw counts come back as 0.
    """
    if format == "json":
        return [StageRecord(**d) for d in json.loads(data)]
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    int_cols = {"stage", "remaining_students", "remaining_vacancies"}
    return [StageRecord(**{k: (int(v) if k in int_cols else float(v)) for k, v in row.items()})
            for row in reader]


def read_trajectory(data: bytes) -> Trajectory:
    d = json.loads(data)
    return Trajectory(tuple(TrajectoryPoint(**p) for p in d["points"]),
                      tuple(TrajectoryWarning(**w) for w in d.get("warnings", ())))


def read_calibration(data: bytes) -> CalibrationResult:
    d = json.loads(data)
    d["bracket"] = tuple(d["bracket"])
    d["consistent_interval"] = tuple(d["consistent_interval"])
    d["trace"] = tuple(TracePoint(**p) for p in d["trace"])
    return CalibrationResult(**d)


def write_dataset(dataset: YearDataset) -> bytes:
    """Write a dataset back in the input schema (rates as fractions)."""
    width = max((len(r) for r in dataset.records), default=1)
    columns = ["year", "alpha0", *(f"cum_emp_{j}" for j in range(width))]
    rows = []
    for r in dataset.records:
        rates = list(r.cum_employment) + [""] * (width - len(r))
        rows.append([r.year_label, float(r.alpha0), *rates])
    body = write_table(columns, rows)
    head = "".join(f"# {line}\n" for line in dataset.provenance.splitlines())
    return head.encode("utf-8") + body


def dataset_to_dict(dataset: YearDataset) -> dict:
    return {"provenance": dataset.provenance, "records": [asdict(r) for r in dataset.records]}
