"""Command-line entry point.

Subcommands: ``run`` (single run), ``converge`` (resolution sweep plus
error table), ``blowup`` (gradient blow-up study), ``validate`` (property
self-checks on a tiny grid).  Scenario parameters come from an INI-style
config file (sections/keys documented in the README); every run-relevant
key can be overridden by a flag.  Without a config file an embedded
default reproduces the torus convergence benchmark at M=64.

Exit codes: 0 success, 1 solver non-convergence or numerical failure,
2 configuration/usage errors.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import time

import numpy as np

from . import _kernels
from . import io as wio
from .analytic import DAlembertCoeffs
from .fixedpoint import NumericalBlowupError, fixed_point_step
from .grid import (BoundaryRule, Grid, ScalarField, VectorField,
                   backward_diff_values, divergence, forward_diff, gradient,
                   inner_product, laplacian)
from .integrator import ConvergenceFailure, run, state_norms
from .rotation import RotationParams, cross3, v_matrix
from .scenario import (ScenarioConfig, build_dalembert_initial,
                       default_wave_coeffs, make_initial_state, run_blowup,
                       run_convergence_suite, tolerance_for)

DEFAULT_CONFIG = """\
[scenario]
name = torus-waves

[grid]
dim = 2
m_list = 64
bc = periodic
origin = 0.0
extent = 1.0

[time]
kappa = 0.5
t_final = 20.0

[solver]
tolerance = h^2
max_iter = 200

[initial]
kind = dalembert
a_plus = 1:0.25 2:0.1
a_minus = 1:0.25 2:0.1
b_plus = 1:-2 2:0.01
b_minus = 1:2 2:-0.01

[output]
out_dir = out
stride = auto
snapshot_every = 0
"""

BLOWUP_CONFIG = """\
[scenario]
name = bubble-blowup

[grid]
dim = 2
m_list = 32 64 128
bc = neumann
origin = -0.5
extent = 1.0

[time]
kappa = 0.5
t_final = 2.0

[solver]
tolerance = h^2
max_iter = 200

[initial]
kind = blowup

[output]
out_dir = out
stride = auto
snapshot_every = 0
"""


class ConfigError(Exception):
    pass


def _parse_mode_table(text: str) -> dict:
    table = {}
    for token in text.replace(",", " ").split():
        if ":" not in token:
            raise ConfigError(f"bad mode entry {token!r}; expected j:amplitude")
        j, amp = token.split(":", 1)
        try:
            table[int(j)] = float(amp)
        except ValueError as exc:
            raise ConfigError(f"bad mode entry {token!r}: {exc}") from None
    return table


def _coeffs_from_section(section) -> DAlembertCoeffs:
    tables = {}
    for key in ("a_plus", "a_minus", "b_plus", "b_minus",
                "c_plus", "c_minus", "d_plus", "d_minus"):
        tables[key] = _parse_mode_table(section.get(key, ""))
    if not any(tables.values()):
        return default_wave_coeffs()
    return DAlembertCoeffs.from_modes(**tables)


def load_config(path=None, command: str = "run") -> ScenarioConfig:
    """Parse a scenario config file; embedded defaults when ``path`` is None."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string(BLOWUP_CONFIG if command == "blowup" else DEFAULT_CONFIG)
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    try:
        grid_s = parser["grid"]
        time_s = parser["time"]
        solver_s = parser["solver"]
        init_s = parser["initial"]
        out_s = parser["output"]
        m_text = grid_s.get("m_list", grid_s.get("m", "64"))
        m_list = tuple(int(tok) for tok in m_text.replace(",", " ").split())
        origin_text = grid_s.get("origin", "0.0")
        origin_vals = [float(tok) for tok in origin_text.replace(",", " ").split()]
        origin = origin_vals[0] if len(origin_vals) == 1 else tuple(origin_vals)
        stride_text = out_s.get("stride", "auto").strip().lower()
        cfg = ScenarioConfig(
            name=parser.get("scenario", "name", fallback="scenario"),
            dim=grid_s.getint("dim", 2),
            m_list=m_list,
            bc=grid_s.get("bc", "periodic"),
            origin=origin,
            extent=grid_s.getfloat("extent", 1.0),
            kappa=time_s.getfloat("kappa", 0.5),
            t_final=time_s.getfloat("t_final", 20.0),
            tol_rule=solver_s.get("tolerance", "h^2"),
            max_iter=solver_s.getint("max_iter", 200),
            initial_kind=init_s.get("kind", "dalembert"),
            coeffs=_coeffs_from_section(init_s),
            snapshot_path=init_s.get("snapshot", ""),
            out_dir=out_s.get("out_dir", "out"),
            stride=None if stride_text in ("auto", "") else int(stride_text),
            snapshot_every=out_s.getint("snapshot_every", 0),
        )
    except (ValueError, KeyError, configparser.Error) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    # sanity-check the tolerance rule early so typos exit with code 2
    try:
        tolerance_for(cfg.tol_rule, 0.1)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid tolerance rule {cfg.tol_rule!r}: {exc}") from exc
    return cfg


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if args.m is not None:
        cfg.m_list = tuple(int(tok) for tok in str(args.m).replace(",", " ").split())
    if args.kappa is not None:
        cfg.kappa = args.kappa
    if args.t_final is not None:
        cfg.t_final = args.t_final
    if args.tol is not None:
        cfg.tol_rule = args.tol
    if args.bc is not None:
        cfg.bc = BoundaryRule.coerce(args.bc)
    if args.out_dir is not None:
        cfg.out_dir = args.out_dir
    if args.snapshot_every is not None:
        cfg.snapshot_every = args.snapshot_every
    if getattr(args, "full_sweep", False):
        cfg.full_sweep = True
    try:
        cfg.__post_init__()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


class _Progress:
    """One stderr liveness line per `every` steps."""

    def __init__(self, label: str, every: int = 100):
        self.label = label
        self.every = every
        self.count = 0
        self.iter_sum = 0
        self.e0 = None

    def __call__(self, prev, new, report):
        if self.e0 is None:
            self.e0, _ = state_norms(prev)
        self.count += 1
        self.iter_sum += report.iterations
        if self.count % self.every == 0:
            energy, _ = state_norms(new)
            print(f"[{self.label}] step {new.step_index} t={new.t:.4f} "
                  f"E-drift={energy - self.e0:+.3e} "
                  f"mean-iters={self.iter_sum / self.count:.2f}",
                  file=sys.stderr, flush=True)


def _snapshot_writer(cfg: ScenarioConfig, m: int):
    if cfg.snapshot_every <= 0:
        return None
    prefix = os.path.join(cfg.out_dir, f"{cfg.name}_m{m}")

    def hook(state):
        if state.step_index % cfg.snapshot_every == 0:
            wio.write_snapshot(state, f"{prefix}_step{state.step_index:06d}.snap")
    return hook


def _cmd_run(cfg: ScenarioConfig) -> int:
    m = cfg.m_list[0]
    if cfg.initial_kind == "snapshot":
        if not cfg.snapshot_path:
            raise ConfigError("initial kind 'snapshot' needs [initial] snapshot = <path>")
        state0 = wio.read_snapshot(cfg.snapshot_path)
        grid = state0.grid
        m = grid.m_per_axis
    else:
        grid = cfg.grid_for(m)
        state0 = make_initial_state(cfg, grid)
    dt = cfg.kappa * grid.h
    tol = tolerance_for(cfg.tol_rule, grid.h)
    os.makedirs(cfg.out_dir, exist_ok=True)
    rows = []
    hook = _snapshot_writer(cfg, m)
    if hook is not None:
        hook(state0)
    progress = _Progress(f"{cfg.name} m={m}")

    def on_step(prev, new, report):
        progress(prev, new, report)
        if hook is not None:
            hook(new)

    t0 = time.perf_counter()
    final = run(state0, dt, cfg.t_final, tol, max_iter=cfg.max_iter,
                sink=rows.append, stride=cfg.stride, on_step=on_step)
    elapsed = time.perf_counter() - t0
    diag_path = os.path.join(cfg.out_dir, f"{cfg.name}_m{m}_diagnostics.csv")
    wio.write_diagnostics_csv(rows, diag_path)
    e_final, gmax = state_norms(final)
    mean_iters = progress.iter_sum / progress.count if progress.count else 0.0
    print(f"{cfg.name}: m={m} steps={final.step_index - state0.step_index} "
          f"t={final.t:.6g} energy={e_final:.9g} grad_max={gmax:.6g} "
          f"mean-iters={mean_iters:.2f} [{elapsed:.1f}s]")
    print(f"diagnostics -> {diag_path}")
    return 0


def _cmd_converge(cfg: ScenarioConfig) -> int:
    if cfg.initial_kind != "dalembert":
        raise ConfigError("converge needs d'Alembert initial data")
    os.makedirs(cfg.out_dir, exist_ok=True)

    def case_hook(res):
        base = os.path.join(cfg.out_dir, f"{cfg.name}_m{res.m}")
        wio.write_diagnostics_csv(res.diagnostics, base + "_diagnostics.csv")
        wio.write_error_series_csv(res.error_series, base + "_errors.csv")
        print(f"  m={res.m:5d} h=2^{np.log2(res.h):.0f} err_d={res.err_d:.4g} "
              f"err_w={res.err_w:.4g} err_E={res.err_energy:.4g} "
              f"mean-iters={res.mean_iterations:.2f}")

    results, table = run_convergence_suite(
        cfg, progress=lambda m: _Progress(f"{cfg.name} m={m}"), case_hook=case_hook)
    table_path = os.path.join(cfg.out_dir, f"{cfg.name}_error_table.csv")
    wio.write_error_table_csv(table, table_path)
    header = f"{'h':>12} {'err_d':>10} {'err_w':>10} {'err_E':>10} " \
             f"{'rate_d':>7} {'rate_w':>7} {'rate_E':>7}"
    print(header)
    for row in table.rows:
        rates = ["      -" if r is None else f"{r:7.3f}"
                 for r in (row.rate_d, row.rate_w, row.rate_energy)]
        print(f"{row.h:12.6g} {row.err_d:10.4g} {row.err_w:10.4g} "
              f"{row.err_energy:10.4g} {' '.join(rates)}")
    if len(table.rows) > 1:
        print(f"average rates: d={table.average_rate_d:.3f} "
              f"w={table.average_rate_w:.3f} E={table.average_rate_energy:.3f}")
    print(f"error table -> {table_path}")
    return 0


def _cmd_blowup(cfg: ScenarioConfig) -> int:
    if cfg.initial_kind != "blowup":
        raise ConfigError("blowup needs the blow-up initial data")
    os.makedirs(cfg.out_dir, exist_ok=True)

    def case_hook(case):
        path = os.path.join(cfg.out_dir, f"{cfg.name}_m{case.m}_diagnostics.csv")
        wio.write_diagnostics_csv(case.diagnostics, path)
        print(f"  m={case.m:5d} peak |grad d| = {case.peak_grad_max:.4g} at "
              f"t={case.peak_time:.4f}; steepest growth at t={case.spike_time:.4f}; "
              f"max H = {case.max_kinetic:.6g} (E0={case.initial_energy:.6g})")

    run_blowup(cfg, progress=lambda m: _Progress(f"{cfg.name} m={m}"),
               snapshot_hook=lambda m: _snapshot_writer(cfg, m),
               case_hook=case_hook)
    print(f"diagnostics -> {cfg.out_dir}")
    return 0


def _validation_checks(seed: int) -> list:
    rng = np.random.default_rng(seed)
    checks = []

    def record(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    for bc in (BoundaryRule.PERIODIC, BoundaryRule.NEUMANN):
        grid = Grid(2, 12, bc)
        f = ScalarField(grid, rng.normal(size=grid.shape))
        g = ScalarField(grid, rng.normal(size=grid.shape))
        v = VectorField(grid, rng.normal(size=grid.shape + (3,)))
        comp = np.max(np.abs(laplacian(f).values - divergence(gradient(f)).values))
        record(f"laplacian = div(grad) [{bc.value}]", comp <= 1e-13, f"max diff {comp:.2e}")
        dual = abs(inner_product(divergence(v), f) + inner_product(v, gradient(f)))
        record(f"summation by parts [{bc.value}]", dual <= 1e-12, f"|defect| {dual:.2e}")
        lin = np.max(np.abs(forward_diff(ScalarField(grid, 2.0 * f.values - 3.0 * g.values), 1).values
                            - 2.0 * forward_diff(f, 1).values + 3.0 * forward_diff(g, 1).values))
        record(f"stencil linearity [{bc.value}]", lin <= 1e-12, f"max diff {lin:.2e}")

    ortho_worst = 0.0
    implicit_worst = 0.0
    for _ in range(1000):
        dt = 10.0 ** rng.uniform(-3, 0)
        w = rng.normal(size=3) * 10.0 ** rng.uniform(-2, 4)
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        vm = v_matrix(RotationParams(dt, w))
        ortho_worst = max(ortho_worst, np.max(np.abs(vm.T @ vm - np.eye(3))))
        d_new = vm @ d
        res = np.linalg.norm((d_new - d) - 0.5 * dt * np.cross(d + d_new, w))
        implicit_worst = max(implicit_worst, res / max(1.0, np.linalg.norm(w) * dt))
    record("rotation orthogonality", ortho_worst <= 1e-14, f"max {ortho_worst:.2e}")
    record("implicit midpoint relation", implicit_worst <= 1e-13, f"max {implicit_worst:.2e}")

    grid = Grid(2, 8, BoundaryRule.PERIODIC)
    worst = 0.0
    for _ in range(20):
        d_vals = rng.normal(size=grid.shape + (3,))
        d_vals /= np.linalg.norm(d_vals, axis=-1, keepdims=True)
        d = VectorField(grid, d_vals)
        lhs = cross3(d.values, laplacian(d).values)
        rhs = np.zeros_like(lhs)
        pairs = ((1, 2), (2, 0), (0, 1))
        for comp_idx, (k, l) in enumerate(pairs):
            flux = VectorField.zeros(grid)
            for ax in range(grid.dim):
                flux.values[..., ax] = (d.values[..., k] * backward_diff_values(d.values[..., l], ax, grid)
                                        - d.values[..., l] * backward_diff_values(d.values[..., k], ax, grid))
            rhs[..., comp_idx] = divergence(flux).values
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    record("cross-product divergence identity", worst <= 1e-12, f"max diff {worst:.2e}")

    coeffs = default_wave_coeffs()
    grid16 = Grid(2, 16, BoundaryRule.PERIODIC)
    state = build_dalembert_initial(grid16, coeffs)
    e0, _ = state_norms(state)
    dt = 0.5 * grid16.h
    len_drift = 0.0
    e_drift = 0.0
    for _ in range(20):
        state, report = fixed_point_step(state, dt, 1e-12, 400)
        if not report.converged:
            record("conservation run", False, "fixed point did not converge")
            break
        norms = np.sqrt(np.sum(state.d.values ** 2, axis=-1))
        len_drift = max(len_drift, float(np.max(np.abs(norms - 1.0))))
        e, _ = state_norms(state)
        e_drift = max(e_drift, abs(e - e0))
    else:
        record("unit-length preservation", len_drift <= 1e-12, f"max drift {len_drift:.2e}")
        record("energy conservation", e_drift <= 1e-9 * e0, f"max drift {e_drift:.2e}")
    return checks


def _cmd_validate(seed: int) -> int:
    checks = _validation_checks(seed)
    failures = 0
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {name}" + (f" ({detail})" if detail else ""))
        failures += 0 if ok else 1
    print(f"{len(checks) - failures}/{len(checks)} checks passed (seed={seed})")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavemaps",
        description="Structure-preserving angular-momentum solver for wave maps "
                    "into the unit sphere.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_config=True):
        if with_config:
            p.add_argument("config", nargs="?", default=None,
                           help="scenario config file (INI); embedded defaults if omitted")
        p.add_argument("--m", help="override mesh resolution(s), e.g. 64 or 64,128")
        p.add_argument("--kappa", type=float, help="CFL ratio dt/h")
        p.add_argument("--t-final", type=float, dest="t_final", help="time horizon")
        p.add_argument("--tol", type=float, help="fixed solver tolerance (default rule h^2)")
        p.add_argument("--bc", choices=("periodic", "neumann"), help="boundary rule")
        p.add_argument("--out-dir", dest="out_dir", help="output directory")
        p.add_argument("--snapshot-every", type=int, dest="snapshot_every",
                       help="write a field snapshot every N steps (0 = off)")
        p.add_argument("--threads", type=int, help="cap the node-parallel worker pool")
        p.add_argument("--seed", type=int, default=1234,
                       help="seed for randomized property checks")
        p.add_argument("--full-sweep", action="store_true", dest="full_sweep",
                       help="allow resolutions beyond the desk-scale caps")

    add_common(sub.add_parser("run", help="run a single scenario"))
    add_common(sub.add_parser("converge", help="resolution sweep with error table"))
    add_common(sub.add_parser("blowup", help="gradient blow-up study"))
    val = sub.add_parser("validate", help="run property self-checks on a tiny grid")
    val.add_argument("--seed", type=int, default=1234)
    val.add_argument("--threads", type=int)
    return parser


def _set_threads(requested) -> None:
    if requested is None or not _kernels.AVAILABLE:
        return
    import numba
    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(int(requested), limit)))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _set_threads(getattr(args, "threads", None))
        if args.command == "validate":
            return _cmd_validate(args.seed)
        cfg = load_config(args.config, args.command)
        cfg = _apply_overrides(cfg, args)
        if args.command == "run":
            return _cmd_run(cfg)
        if args.command == "converge":
            return _cmd_converge(cfg)
        if args.command == "blowup":
            return _cmd_blowup(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceFailure, NumericalBlowupError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
