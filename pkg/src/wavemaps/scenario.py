"""Named experiment definitions and resolution sweeps.

Two production scenarios are built in: the torus convergence study against
the plane-wave reference solution, and the Neumann-box blow-up study whose
equator-winding initial bubble develops a gradient singularity near
``t = 0.3``.  Sweeps run one resolution after another; each case owns its
state, so callers may also distribute cases over processes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .analytic import DAlembertCoeffs, ErrorTracker, analytic_state
from .fixedpoint import SolverState
from .grid import BoundaryRule, Grid
from .integrator import initialize, run, state_norms

CONVERGENCE_M_CAP = 256
BLOWUP_M_CAP = 128


def default_wave_coeffs() -> DAlembertCoeffs:
    """Amplitude set of the standard convergence benchmark."""
    return DAlembertCoeffs.from_modes(
        a_plus={1: 0.25, 2: 0.1},
        a_minus={1: 0.25, 2: 0.1},
        b_plus={1: -2.0, 2: 0.01},
        b_minus={1: 2.0, 2: -0.01},
    )


def tolerance_for(rule, h: float) -> float:
    """Evaluate a tolerance rule like ``h^2``, ``h^2/2`` or a literal number."""
    if isinstance(rule, (int, float)):
        value = float(rule)
    else:
        text = str(rule).strip().lower().replace(" ", "")
        factor = 1.0
        if "/" in text:
            text, div = text.split("/", 1)
            factor = 1.0 / float(div)
        elif "*" in text:
            text, mul = text.split("*", 1)
            factor = float(mul)
        if text.startswith("h^"):
            value = factor * h ** float(text[2:])
        elif text == "h":
            value = factor * h
        else:
            value = factor * float(text)
    if not value > 0:
        raise ValueError(f"tolerance rule {rule!r} gives a nonpositive value")
    return value


@dataclass
class ScenarioConfig:
    """Fully parameterized experiment description."""

    name: str = "scenario"
    dim: int = 2
    m_list: tuple = (64,)
    bc: BoundaryRule = BoundaryRule.PERIODIC
    origin: object = 0.0
    extent: float = 1.0
    kappa: float = 0.5
    t_final: float = 20.0
    tol_rule: object = "h^2"
    max_iter: int = 200
    initial_kind: str = "dalembert"
    coeffs: DAlembertCoeffs = dc_field(default_factory=default_wave_coeffs)
    snapshot_path: str = ""
    out_dir: str = "out"
    stride: object = None
    snapshot_every: int = 0
    full_sweep: bool = False

    def __post_init__(self):
        self.bc = BoundaryRule.coerce(self.bc)
        self.m_list = tuple(int(m) for m in np.atleast_1d(self.m_list))
        if not self.m_list:
            raise ValueError("m_list must not be empty")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.kappa > 0.5:
            warnings.warn(f"kappa={self.kappa} exceeds 1/2; the fixed point may "
                          "stop contracting", RuntimeWarning, stacklevel=2)
        if self.t_final < 0:
            raise ValueError("t_final must be nonnegative")
        if self.initial_kind not in ("dalembert", "blowup", "snapshot"):
            raise ValueError(f"unknown initial data kind {self.initial_kind!r}")

    def grid_for(self, m: int) -> Grid:
        return Grid(self.dim, m, self.bc, self.origin, self.extent)


def build_dalembert_initial(grid: Grid, coeffs: DAlembertCoeffs) -> SolverState:
    """Reference solution at t = 0, sampled on the nodes and renormalized."""
    ref = analytic_state(0.0, coeffs, grid)
    return initialize(grid, ref.d.values, w0=ref.w.values)


def build_blowup_initial(grid: Grid) -> SolverState:
    """Equator-winding bubble on the centered unit box, at rest.

    Inside radius 1/2 the director is
    ``(2 x a, 2 y a, a^2 - r^2) / (a^2 + r^2)`` with ``a = (1 - 2 r)^4``;
    outside it is the south pole.  The formula is a unit vector by
    construction and continuous across ``r = 1/2``; nodes are renormalized
    to absorb rounding.  The angular momentum starts at zero.
    """
    if grid.dim != 2:
        raise ValueError("blow-up initial data is 2-D")
    if grid.origin != (-0.5, -0.5) or abs(grid.extent - 1.0) > 1e-12:
        raise ValueError("blow-up data lives on the centered unit box "
                         "(origin -0.5, extent 1)")
    xg, yg = grid.meshgrid()
    r = np.sqrt(xg * xg + yg * yg)
    a = (1.0 - 2.0 * r) ** 4
    denom = a * a + r * r
    inside = r < 0.5
    d = np.zeros(grid.shape + (3,))
    d[..., 2] = -1.0
    d[inside, 0] = (2.0 * xg * a / denom)[inside]
    d[inside, 1] = (2.0 * yg * a / denom)[inside]
    d[inside, 2] = ((a * a - r * r) / denom)[inside]
    return initialize(grid, d)


def make_initial_state(config: ScenarioConfig, grid: Grid) -> SolverState:
    if config.initial_kind == "dalembert":
        return build_dalembert_initial(grid, config.coeffs)
    if config.initial_kind == "blowup":
        return build_blowup_initial(grid)
    raise ValueError("snapshot initial data must be loaded by the caller")


@dataclass
class CaseResult:
    """One resolution of the convergence study."""

    m: int
    h: float
    err_d: float
    err_w: float
    err_energy: float
    mean_iterations: float
    max_iterations: int
    energy_drift_max: float
    length_drift_max: float
    diagnostics: list
    error_series: list
    final_state: SolverState


@dataclass
class ErrorTableRow:
    h: float
    err_d: float
    err_w: float
    err_energy: float
    rate_d: float = None
    rate_w: float = None
    rate_energy: float = None


@dataclass
class ErrorTable:
    """Error table over a resolution sweep, with pairwise dyadic rates."""

    rows: list

    @staticmethod
    def from_results(results) -> "ErrorTable":
        rows = []
        prev = None
        for res in results:
            row = ErrorTableRow(res.h, res.err_d, res.err_w, res.err_energy)
            if prev is not None:
                scale = np.log(prev.h / res.h)
                row.rate_d = float(np.log(prev.err_d / res.err_d) / scale)
                row.rate_w = float(np.log(prev.err_w / res.err_w) / scale)
                row.rate_energy = float(np.log(prev.err_energy / res.err_energy) / scale)
            rows.append(row)
            prev = row
        return ErrorTable(rows)

    def _mean_rate(self, attr: str) -> float:
        rates = [getattr(r, attr) for r in self.rows if getattr(r, attr) is not None]
        if not rates:
            raise ValueError("rates need at least two resolutions")
        return float(np.mean(rates))

    @property
    def average_rate_d(self) -> float:
        return self._mean_rate("rate_d")

    @property
    def average_rate_w(self) -> float:
        return self._mean_rate("rate_w")

    @property
    def average_rate_energy(self) -> float:
        return self._mean_rate("rate_energy")


def run_convergence_case(m: int, config: ScenarioConfig, *, track_length: bool = False,
                         progress=None, use_fast_path=None) -> CaseResult:
    """Run one resolution against the reference solution, errors at every step."""
    grid = config.grid_for(m)
    h = grid.h
    dt = config.kappa * h
    tol = tolerance_for(config.tol_rule, h)
    state0 = build_dalembert_initial(grid, config.coeffs)
    tracker = ErrorTracker(grid, config.coeffs, dt)
    rows = []
    e0, _ = state_norms(state0)
    stats = {"iters": 0, "steps": 0, "max_iters": 0, "e_drift": 0.0, "len_drift": 0.0}

    def on_step(prev, new, report):
        tracker.observe(prev, new.d.values)
        e_new, _ = state_norms(new)
        stats["e_drift"] = max(stats["e_drift"], abs(e_new - e0))
        stats["iters"] += report.iterations
        stats["steps"] += 1
        stats["max_iters"] = max(stats["max_iters"], report.iterations)
        if track_length:
            norms = np.sqrt(np.sum(new.d.values ** 2, axis=-1))
            stats["len_drift"] = max(stats["len_drift"],
                                     float(np.max(np.abs(norms - 1.0))))
        if progress is not None:
            progress(prev, new, report)

    final = run(state0, dt, config.t_final, tol, max_iter=config.max_iter,
                sink=rows.append, stride=config.stride, on_step=on_step,
                use_fast_path=use_fast_path)
    tracker.observe(final)
    mean_iters = stats["iters"] / stats["steps"] if stats["steps"] else 0.0
    return CaseResult(m=m, h=h, err_d=tracker.error_d, err_w=tracker.error_w,
                      err_energy=tracker.error_energy, mean_iterations=mean_iters,
                      max_iterations=stats["max_iters"],
                      energy_drift_max=stats["e_drift"],
                      length_drift_max=stats["len_drift"] if track_length else float("nan"),
                      diagnostics=rows, error_series=list(tracker.series),
                      final_state=final)


def _check_sweep_cap(m_list, cap: int, full_sweep: bool, what: str):
    oversize = [m for m in m_list if m > cap]
    if oversize and not full_sweep:
        raise ValueError(f"{what} caps at M={cap} by default; pass full_sweep "
                         f"(--full-sweep) to run M={max(oversize)}")
    if oversize:
        warnings.warn(f"{what} at M={max(oversize)} is a long-running job",
                      RuntimeWarning, stacklevel=3)


def run_convergence_suite(config: ScenarioConfig, *, progress=None,
                          case_hook=None) -> tuple:
    """Sweep the configured resolutions; returns (results, ErrorTable)."""
    _check_sweep_cap(config.m_list, CONVERGENCE_M_CAP, config.full_sweep,
                     "convergence sweep")
    results = []
    for m in config.m_list:
        case_progress = progress(m) if progress is not None else None
        res = run_convergence_case(m, config, progress=case_progress)
        results.append(res)
        if case_hook is not None:
            case_hook(res)
    return results, ErrorTable.from_results(results)


@dataclass
class BlowupCase:
    """One resolution of the blow-up study."""

    m: int
    h: float
    diagnostics: list
    spike_time: float
    peak_grad_max: float
    peak_time: float
    initial_energy: float
    initial_kinetic: float
    max_kinetic: float
    energy_drift_max: float
    final_state: SolverState


def steepest_growth_time(times, values) -> float:
    """Time at which the forward difference of ``values`` is largest."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if times.size < 2:
        raise ValueError("need at least two samples")
    slopes = np.diff(values) / np.diff(times)
    return float(times[int(np.argmax(slopes))])


def run_blowup_case(m: int, config: ScenarioConfig, *, progress=None,
                    snapshot_hook=None, use_fast_path=None) -> BlowupCase:
    """Run the blow-up scenario at one resolution and report the spike."""
    grid = config.grid_for(m)
    h = grid.h
    dt = config.kappa * h
    tol = tolerance_for(config.tol_rule, h)
    state0 = build_blowup_initial(grid)
    rows = []
    if snapshot_hook is not None:
        snapshot_hook(state0)

    def on_step(prev, new, report):
        if progress is not None:
            progress(prev, new, report)
        if snapshot_hook is not None:
            snapshot_hook(new)

    final = run(state0, dt, config.t_final, tol, max_iter=config.max_iter,
                sink=rows.append, stride=config.stride, on_step=on_step,
                use_fast_path=use_fast_path)
    times = [row.t for row in rows]
    gmax = [row.grad_max for row in rows]
    peak_idx = int(np.argmax(gmax))
    # the post-peak collapse jitters node to node; the spike is located on
    # the rise towards the global maximum
    rise = max(peak_idx + 1, 2)
    e0 = rows[0].energy
    h0 = rows[0].kinetic_energy
    return BlowupCase(m=m, h=h, diagnostics=rows,
                      spike_time=steepest_growth_time(times[:rise], gmax[:rise]),
                      peak_grad_max=gmax[peak_idx], peak_time=times[peak_idx],
                      initial_energy=e0, initial_kinetic=h0,
                      max_kinetic=max(row.kinetic_energy for row in rows),
                      energy_drift_max=max(abs(row.energy - e0) for row in rows),
                      final_state=final)


def run_blowup(config: ScenarioConfig, *, progress=None, snapshot_hook=None,
               case_hook=None) -> list:
    """Blow-up study over the configured resolutions."""
    _check_sweep_cap(config.m_list, BLOWUP_M_CAP, config.full_sweep, "blow-up sweep")
    cases = []
    for m in config.m_list:
        case_progress = progress(m) if progress is not None else None
        hook = snapshot_hook(m) if snapshot_hook is not None else None
        case = run_blowup_case(m, config, progress=case_progress, snapshot_hook=hook)
        cases.append(case)
        if case_hook is not None:
            case_hook(case)
    return cases
