"""Shared fixtures: the expensive production runs are computed once per
session and shared across the acceptance criteria."""

import subprocess
import sys

import pytest

import wavemaps as wm
from wavemaps import io as wio

_ACCEPTANCE_LINES = []


@pytest.fixture()
def acceptance():
    """Record one acceptance-criterion verdict for the terminal summary."""

    def record(name: str, ok: bool, detail: str = ""):
        _ACCEPTANCE_LINES.append((name, bool(ok), detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE_LINES:
        status = "PASS" if ok else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


def _benchmark_config(**kw) -> wm.ScenarioConfig:
    defaults = dict(m_list=(64,), t_final=20.0, kappa=0.5, tol_rule="h^2")
    defaults.update(kw)
    return wm.ScenarioConfig(**defaults)


@pytest.fixture(scope="session")
def case64_tracked():
    """Benchmark run at M=64 with per-step length tracking."""
    cfg = _benchmark_config(m_list=(64,))
    return wm.run_convergence_case(64, cfg, track_length=True)


@pytest.fixture(scope="session")
def case64_half_tol():
    """Benchmark run at M=64 with the tolerance halved."""
    cfg = _benchmark_config(m_list=(64,), tol_rule="h^2/2")
    return wm.run_convergence_case(64, cfg)


@pytest.fixture(scope="session")
def cli_convergence(tmp_path_factory):
    """End-to-end `wavemaps converge` sweep at M = 32..256 (zero-setup config)."""
    out = tmp_path_factory.mktemp("cli_converge")
    cmd = [sys.executable, "-m", "wavemaps", "converge",
           "--m", "32,64,128,256", "--out-dir", str(out)]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=3600)
    assert proc.returncode == 0, f"converge failed:\n{proc.stderr}"
    table = wio.read_error_table_csv(out / "torus-waves_error_table.csv")
    diagnostics = {m: wio.read_diagnostics_csv(out / f"torus-waves_m{m}_diagnostics.csv")
                   for m in (32, 64, 128, 256)}
    return {"table": table, "diagnostics": diagnostics, "out": out,
            "stdout": proc.stdout}


@pytest.fixture(scope="session")
def blowup_cases():
    """Blow-up study at M = 32, 64, 128 on the centered Neumann box."""
    cfg = wm.ScenarioConfig(name="bubble", m_list=(32, 64, 128), bc="neumann",
                            origin=-0.5, extent=1.0, t_final=2.0,
                            initial_kind="blowup")
    return wm.run_blowup(cfg)
