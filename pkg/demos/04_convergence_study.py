"""Desk-scale convergence study against the exact plane-wave solution.

Runs the torus benchmark at M = 16/32/64 over a shortened horizon and
prints the error table with dyadic rates.  The full-horizon study
(t_final = 20, M up to 256) is one command away:

    wavemaps converge --m 64,128,256
"""

from wavemaps import ScenarioConfig, run_convergence_suite

config = ScenarioConfig(name="demo", m_list=(16, 32, 64), t_final=2.0)
results, table = run_convergence_suite(config)

print(f"{'h':>10} {'err_d':>10} {'err_w':>10} {'err_E':>10} {'rate_d':>7} {'rate_w':>7}")
for row in table.rows:
    rd = "-" if row.rate_d is None else f"{row.rate_d:.2f}"
    rw = "-" if row.rate_w is None else f"{row.rate_w:.2f}"
    print(f"{row.h:10.5f} {row.err_d:10.4f} {row.err_w:10.4f} "
          f"{row.err_energy:10.4f} {rd:>7} {rw:>7}")
print(f"average rates: d = {table.average_rate_d:.2f}, "
      f"w = {table.average_rate_w:.2f}, E = {table.average_rate_energy:.2f}")
print(f"mean fixed-point iterations: "
      + ", ".join(f"M={r.m}: {r.mean_iterations:.1f}" for r in results))
