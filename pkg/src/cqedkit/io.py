"""File formats: CSV readers and writers, JSON reports, schema access.

All CSV writers emit the shortest round-trip decimal representation of
each value (Python repr) with LF line endings, so a given dataset always
serializes to identical bytes. Readers reject wrong headers and report
malformed cells with their 1-based line number. Lines starting with '#'
and blank lines are ignored on input.

Relative output paths are resolved against the CQEDKIT_OUTDIR environment
variable when it is set.
"""

from __future__ import annotations

import json
import math
import os
from importlib import resources
from pathlib import Path

import numpy as np

from .coupling import SweepPoint, SweepResult
from .errors import InputDataError
from .fitters import ComplexTrace
from .synth import Map2D

OUTDIR_ENV = "CQEDKIT_OUTDIR"

TRACE_HEADER = ("freq_ghz", "re", "im")
MAG_HEADER = ("freq_ghz", "mag_db")
RABI_HEADER = ("t_ns", "y")
GATE_HEADER = ("V_G", "value")


def resolve_out_path(path) -> Path:
    """Resolve an output path, honoring CQEDKIT_OUTDIR for relative ones."""
    p = Path(path)
    if not p.is_absolute():
        base = os.environ.get(OUTDIR_ENV)
        if base:
            p = Path(base) / p
    return p


def _fmt(x) -> str:
    return repr(float(x))


def _write_rows(path, header, rows) -> Path:
    p = resolve_out_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(c) for c in row) + "\n")
    return p


def _data_lines(path):
    """Yield (1-based line number, stripped text) skipping blanks and comments."""
    try:
        with open(path) as fh:
            for no, raw in enumerate(fh, start=1):
                text = raw.strip()
                if not text or text.startswith("#"):
                    continue
                yield no, text
    except OSError as exc:
        raise InputDataError(f"cannot read {path}: {exc}") from exc


def _read_table(path, header) -> np.ndarray:
    """Read a numeric CSV with an exact expected header; returns (n, k)."""
    want = ",".join(header)
    rows = []
    lines = _data_lines(path)
    try:
        no, first = next(lines)
    except StopIteration:
        raise InputDataError(f"{path} is empty") from None
    if first != want:
        raise InputDataError(
            f"expected header {want!r}, got {first!r}", line=no
        )
    for no, text in lines:
        cells = text.split(",")
        if len(cells) != len(header):
            raise InputDataError(
                f"expected {len(header)} columns, got {len(cells)}", line=no
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise InputDataError(f"non-numeric cell in {text!r}", line=no) from None
    if not rows:
        raise InputDataError(f"{path} has a header but no data rows")
    return np.asarray(rows, dtype=float)


def read_complex_trace(path, power_dbm: float | None = None) -> ComplexTrace:
    table = _read_table(path, TRACE_HEADER)
    return ComplexTrace(table[:, 0], table[:, 1] + 1j * table[:, 2], power_dbm)


def write_complex_trace(path, trace: ComplexTrace) -> Path:
    rows = zip(trace.freqs_ghz, trace.values.real, trace.values.imag)
    return _write_rows(path, TRACE_HEADER, rows)


def read_magnitude_trace(path):
    table = _read_table(path, MAG_HEADER)
    return table[:, 0], table[:, 1]


def write_magnitude_trace(path, freqs_ghz, mags_db) -> Path:
    return _write_rows(path, MAG_HEADER, zip(freqs_ghz, mags_db))


def read_rabi_trace(path):
    table = _read_table(path, RABI_HEADER)
    return table[:, 0], table[:, 1]


def write_rabi_trace(path, t_ns, y) -> Path:
    return _write_rows(path, RABI_HEADER, zip(t_ns, y))


def read_gate_table(path):
    """Gate response table: V_G,value rows for a GateSweepModel."""
    table = _read_table(path, GATE_HEADER)
    return table[:, 0], table[:, 1]


def write_gate_table(path, voltages, values) -> Path:
    return _write_rows(path, GATE_HEADER, zip(voltages, values))


def write_sweep_csv(path, sweep: SweepResult) -> Path:
    rows = (
        (p.vg, p.f_q_mhz, p.chi_mhz, p.f_c_ghz, p.f_plus_ghz, p.f_minus_ghz)
        for p in sweep.points
    )
    return _write_rows(path, SweepResult.CSV_COLUMNS, rows)


def read_sweep_csv(path) -> SweepResult:
    """Rebuild a sweep from its CSV; regimes are re-derived from the NaN
    pattern (chi NaN means hybridized, f_Q NaN means pinch-off)."""
    table = _read_table(path, SweepResult.CSV_COLUMNS)
    points = []
    for vg, f_q, chi, f_c, f_p, f_m in table:
        if math.isnan(f_q):
            regime = "pinch_off"
        elif math.isnan(chi):
            regime = "hybridized"
        else:
            regime = "dispersive"
        points.append(SweepPoint(vg, f_q, chi, f_c, f_p, f_m, regime))
    return SweepResult(points=points)


def write_map_csv(path, m: Map2D) -> Path:
    p = resolve_out_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", newline="\n") as fh:
        corner = f"{m.slow_name}\\{m.fast_name}"
        fh.write(",".join([corner] + [_fmt(v) for v in m.fast_values]) + "\n")
        for sv, row in zip(m.slow_values, m.grid):
            fh.write(",".join([_fmt(sv)] + [_fmt(v) for v in row]) + "\n")
    return p


def read_map_csv(path) -> Map2D:
    lines = _data_lines(path)
    try:
        no, first = next(lines)
    except StopIteration:
        raise InputDataError(f"{path} is empty") from None
    cells = first.split(",")
    if "\\" not in cells[0]:
        raise InputDataError(
            f"map corner cell must be 'slow\\fast', got {cells[0]!r}", line=no
        )
    slow_name, fast_name = cells[0].split("\\", 1)
    try:
        fast = np.array([float(c) for c in cells[1:]], dtype=float)
    except ValueError:
        raise InputDataError("non-numeric fast-axis value in header", line=no) from None
    if fast.size < 1:
        raise InputDataError("map header has no fast-axis values", line=no)
    slow, rows = [], []
    for no, text in lines:
        cells = text.split(",")
        if len(cells) != fast.size + 1:
            raise InputDataError(
                f"expected {fast.size + 1} columns, got {len(cells)}", line=no
            )
        try:
            slow.append(float(cells[0]))
            rows.append([float(c) for c in cells[1:]])
        except ValueError:
            raise InputDataError(f"non-numeric cell in {text!r}", line=no) from None
    if not rows:
        raise InputDataError(f"{path} has a header but no data rows")
    return Map2D(slow_name, np.array(slow), fast_name, fast, np.array(rows))


def sanitize_json(obj):
    """Convert numpy scalars/arrays and replace non-finite floats by None."""
    if isinstance(obj, dict):
        return {str(k): sanitize_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize_json(v) for v in obj.tolist()]
    # bool before int: Python bools are ints and must stay JSON booleans
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": sanitize_json(obj.real), "im": sanitize_json(obj.imag)}
    return obj


def write_json(path, payload: dict) -> Path:
    p = resolve_out_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", newline="\n") as fh:
        json.dump(sanitize_json(payload), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return p


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputDataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputDataError(f"invalid JSON in {path}: {exc}", line=exc.lineno) from exc


def load_schema(name: str) -> dict:
    """Load one of the bundled JSON schemas by stem name."""
    ref = resources.files("cqedkit").joinpath("schemas", f"{name}.json")
    try:
        return json.loads(ref.read_text())
    except FileNotFoundError:
        raise KeyError(f"no schema named {name!r}") from None
