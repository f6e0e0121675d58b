"""Serialization of diagnostics, error tables, and field snapshots.

All formats are stable, documented contracts consumed by tests and by the
out-of-process plotting tools:

* diagnostics CSV: ``step,t,energy,kinetic_energy,grad_max,iterations,residual``
* error-table CSV: ``h,err_d,err_w,err_energy,rate_d,rate_w,rate_energy``
  (rates blank on the first row)
* error-series CSV: ``step,t,err_d,err_w,err_energy``
* snapshot: the binary layout below, lossless for doubles.

Numeric CSV fields are printed with 17 significant digits so doubles
round-trip exactly.

Snapshot layout (little endian, 72-byte header)::

    offset  size  field
    0       8     magic "WAVEMAPS"
    8       4     format version (currently 1)
    12      4     spatial dimension
    16      4     spacings per axis M
    20      4     boundary rule (0 periodic, 1 neumann)
    24      8     step index
    32      8     time t (f64)
    40      24    origin, 3 x f64 (unused axes zero)
    64      8     extent (f64)
    72      -     director values, row-major f64 triples, then the
                  angular momentum in the same order
"""

from __future__ import annotations

import csv
import struct

import numpy as np

from .fixedpoint import SolverState
from .grid import BoundaryRule, Grid, VectorField
from .integrator import Diagnostics
from .scenario import ErrorTable, ErrorTableRow

SNAPSHOT_MAGIC = b"WAVEMAPS"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<8sIIIIQd3dd")

DIAGNOSTICS_COLUMNS = ("step", "t", "energy", "kinetic_energy", "grad_max",
                       "iterations", "residual")
ERROR_TABLE_COLUMNS = ("h", "err_d", "err_w", "err_energy",
                       "rate_d", "rate_w", "rate_energy")
ERROR_SERIES_COLUMNS = ("step", "t", "err_d", "err_w", "err_energy")


class SnapshotFormatError(ValueError):
    """A snapshot file does not follow the documented layout."""


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_diagnostics_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DIAGNOSTICS_COLUMNS)
        for row in rows:
            writer.writerow([row.step, _fmt(row.t), _fmt(row.energy),
                             _fmt(row.kinetic_energy), _fmt(row.grad_max),
                             row.iterations, _fmt(row.residual)])


def read_diagnostics_csv(path) -> list:
    rows = []
    cumulative = 0.0
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != DIAGNOSTICS_COLUMNS:
            raise ValueError(f"{path}: expected columns {DIAGNOSTICS_COLUMNS}, "
                             f"got {reader.fieldnames}")
        for rec in reader:
            residual = float(rec["residual"])
            cumulative += residual
            rows.append(Diagnostics(step=int(rec["step"]), t=float(rec["t"]),
                                    energy=float(rec["energy"]),
                                    kinetic_energy=float(rec["kinetic_energy"]),
                                    grad_max=float(rec["grad_max"]),
                                    iterations=int(rec["iterations"]),
                                    residual=residual,
                                    cumulative_residual=cumulative))
    return rows


def write_error_table_csv(table: ErrorTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ERROR_TABLE_COLUMNS)
        for row in table.rows:
            writer.writerow([_fmt(row.h), _fmt(row.err_d), _fmt(row.err_w),
                             _fmt(row.err_energy)]
                            + ["" if r is None else _fmt(r)
                               for r in (row.rate_d, row.rate_w, row.rate_energy)])


def read_error_table_csv(path) -> ErrorTable:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != ERROR_TABLE_COLUMNS:
            raise ValueError(f"{path}: expected columns {ERROR_TABLE_COLUMNS}, "
                             f"got {reader.fieldnames}")
        for rec in reader:
            rows.append(ErrorTableRow(
                h=float(rec["h"]), err_d=float(rec["err_d"]),
                err_w=float(rec["err_w"]), err_energy=float(rec["err_energy"]),
                rate_d=float(rec["rate_d"]) if rec["rate_d"] else None,
                rate_w=float(rec["rate_w"]) if rec["rate_w"] else None,
                rate_energy=float(rec["rate_energy"]) if rec["rate_energy"] else None))
    return ErrorTable(rows)


def write_error_series_csv(series, path) -> None:
    """Per-step error rows ``(step, t, err_d, err_w, err_energy)``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ERROR_SERIES_COLUMNS)
        for step, t, e_d, e_w, e_e in series:
            writer.writerow([int(step), _fmt(t), _fmt(e_d), _fmt(e_w), _fmt(e_e)])


def read_error_series_csv(path) -> list:
    series = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != ERROR_SERIES_COLUMNS:
            raise ValueError(f"{path}: expected columns {ERROR_SERIES_COLUMNS}, "
                             f"got {reader.fieldnames}")
        for rec in reader:
            series.append((int(rec["step"]), float(rec["t"]), float(rec["err_d"]),
                           float(rec["err_w"]), float(rec["err_energy"])))
    return series


def write_snapshot(state: SolverState, path) -> None:
    grid = state.grid
    bc_code = 0 if grid.bc is BoundaryRule.PERIODIC else 1
    origin = list(grid.origin) + [0.0] * (3 - grid.dim)
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, grid.dim,
                          grid.m_per_axis, bc_code, state.step_index,
                          state.t, *origin, grid.extent)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(state.d.values, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(state.w.values, dtype="<f8").tobytes())


def read_snapshot(path) -> SolverState:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(
            f"{path}: truncated header, {len(raw)} bytes < {_HEADER.size} (byte offset 0)")
    (magic, version, dim, m, bc_code, step_index, t,
     o0, o1, o2, extent) = _HEADER.unpack_from(raw, 0)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r} (byte offset 0)")
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version} (byte offset 8)")
    if bc_code not in (0, 1):
        raise SnapshotFormatError(f"{path}: bad boundary code {bc_code} (byte offset 20)")
    try:
        grid = Grid(dim, m, BoundaryRule.PERIODIC if bc_code == 0 else BoundaryRule.NEUMANN,
                    (o0, o1, o2)[:dim], extent)
    except ValueError as exc:
        raise SnapshotFormatError(f"{path}: invalid grid header: {exc}") from exc
    count = grid.num_nodes * 3
    expected = _HEADER.size + 2 * count * 8
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"{path}: payload ends at byte {len(raw)}, expected {expected}")
    d_vals = np.frombuffer(raw, dtype="<f8", count=count, offset=_HEADER.size)
    w_vals = np.frombuffer(raw, dtype="<f8", count=count, offset=_HEADER.size + count * 8)
    shape = grid.shape + (3,)
    return SolverState(VectorField(grid, d_vals.reshape(shape).copy()),
                       VectorField(grid, w_vals.reshape(shape).copy()),
                       step_index=int(step_index), t=float(t))
