import numpy as np
import pytest

from wavemaps import io as wio
from wavemaps.grid import BoundaryRule, Grid, VectorField
from wavemaps.fixedpoint import SolverState
from wavemaps.integrator import Diagnostics
from wavemaps.scenario import ErrorTable, ErrorTableRow


def random_state(bc=BoundaryRule.PERIODIC, dim=2, m=6, seed=0, step=17, t=0.53125):
    grid = Grid(dim, m, bc, origin=-0.5 if bc is BoundaryRule.NEUMANN else 0.0)
    rng = np.random.default_rng(seed)
    d = VectorField(grid, rng.normal(size=grid.shape + (3,)))
    w = VectorField(grid, rng.normal(size=grid.shape + (3,)))
    return SolverState(d, w, step_index=step, t=t)


@pytest.mark.parametrize("bc", [BoundaryRule.PERIODIC, BoundaryRule.NEUMANN])
@pytest.mark.parametrize("dim", [2, 3])
def test_snapshot_roundtrip_is_bitwise(tmp_path, bc, dim):
    state = random_state(bc, dim)
    path = tmp_path / "state.snap"
    wio.write_snapshot(state, path)
    back = wio.read_snapshot(path)
    assert np.array_equal(back.d.values, state.d.values)
    assert np.array_equal(back.w.values, state.w.values)
    assert back.grid == state.grid
    assert back.step_index == state.step_index
    assert back.t == state.t


def test_snapshot_bad_magic_reports_offset(tmp_path):
    state = random_state()
    path = tmp_path / "state.snap"
    wio.write_snapshot(state, path)
    raw = bytearray(path.read_bytes())
    raw[:8] = b"NOTMAGIC"
    path.write_bytes(bytes(raw))
    with pytest.raises(wio.SnapshotFormatError, match="byte offset 0"):
        wio.read_snapshot(path)


def test_snapshot_truncation_detected(tmp_path):
    state = random_state()
    path = tmp_path / "state.snap"
    wio.write_snapshot(state, path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) - 16])
    with pytest.raises(wio.SnapshotFormatError, match="expected"):
        wio.read_snapshot(path)
    path.write_bytes(raw[:40])
    with pytest.raises(wio.SnapshotFormatError):
        wio.read_snapshot(path)


def test_snapshot_bad_version_reports_offset(tmp_path):
    state = random_state()
    path = tmp_path / "state.snap"
    wio.write_snapshot(state, path)
    raw = bytearray(path.read_bytes())
    raw[8:12] = (99).to_bytes(4, "little")
    path.write_bytes(bytes(raw))
    with pytest.raises(wio.SnapshotFormatError, match="byte offset 8"):
        wio.read_snapshot(path)


def make_rows(n):
    rows = []
    for m in range(n):
        rows.append(Diagnostics(step=m, t=m * 0.1, energy=1.0 + m,
                                kinetic_energy=2.0 + m, grad_max=3.0 + m,
                                iterations=4 + m, residual=10.0 ** -(m + 3)))
    return rows


def test_diagnostics_csv_rowcount_and_roundtrip(tmp_path):
    path = tmp_path / "diag.csv"
    wio.write_diagnostics_csv(make_rows(3), path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 4  # header + 3 data rows
    assert lines[0] == ",".join(wio.DIAGNOSTICS_COLUMNS)
    back = wio.read_diagnostics_csv(path)
    assert [r.step for r in back] == [0, 1, 2]
    assert back[2].energy == 3.0
    assert back[2].cumulative_residual == pytest.approx(sum(10.0 ** -(m + 3) for m in range(3)))


def test_csv_doubles_roundtrip_exactly(tmp_path):
    value = np.nextafter(1.0 / 3.0, 1.0)
    rows = [Diagnostics(step=0, t=value, energy=np.pi, kinetic_energy=np.e,
                        grad_max=np.sqrt(2), iterations=5, residual=value)]
    path = tmp_path / "diag.csv"
    wio.write_diagnostics_csv(rows, path)
    back = wio.read_diagnostics_csv(path)[0]
    assert back.t == value
    assert back.energy == np.pi
    assert back.residual == value


def test_error_table_csv_roundtrip_blank_rates(tmp_path):
    table = ErrorTable([
        ErrorTableRow(2 ** -6, 1.7, 40.0, 46.0),
        ErrorTableRow(2 ** -7, 1.2, 13.0, 38.0, rate_d=0.5, rate_w=1.6, rate_energy=0.3),
    ])
    path = tmp_path / "table.csv"
    wio.write_error_table_csv(table, path)
    lines = path.read_text().strip().splitlines()
    assert lines[1].endswith(",,,")
    back = wio.read_error_table_csv(path)
    assert back.rows[0].rate_d is None
    assert back.rows[1].rate_w == 1.6
    assert back.rows[0].err_d == 1.7


def test_error_series_roundtrip(tmp_path):
    series = [(0, 0.0, 0.1, 0.2, 0.3), (1, 0.5, 0.4, 0.5, 0.6)]
    path = tmp_path / "series.csv"
    wio.write_error_series_csv(series, path)
    assert wio.read_error_series_csv(path) == series


def test_csv_schema_mismatch_names_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("alpha,beta\n1,2\n")
    with pytest.raises(ValueError, match="expected columns"):
        wio.read_diagnostics_csv(path)
    with pytest.raises(ValueError, match="expected columns"):
        wio.read_error_table_csv(path)
    with pytest.raises(ValueError, match="expected columns"):
        wio.read_error_series_csv(path)


def test_snapshot_missing_file_has_path_context(tmp_path):
    with pytest.raises(OSError):
        wio.read_snapshot(tmp_path / "missing.snap")
