# # Pollution: does the error grow with k at fixed kh?
#
# Along a line kh = const the error of a pollution-free method stays flat.
# Here we scan a short k range at kh = 0.5, then sweep meshes at k = 30 to see
# the plateau near 100% error on very coarse meshes and the knee after it.

from wghelmholtz.harness import (RunConfig, format_table, run_pollution_scan,
                                 run_resolution_sweep, solve_case, trace_plot_data)
from wghelmholtz.mesh import hexagon_mesh
from wghelmholtz.problems import get_case

rows = run_pollution_scan(RunConfig(case="pollution", k_waves=(5, 10, 20, 30, 40),
                                    kh_targets=(0.5,)))
print(format_table(rows))
e = [r.h1_err for r in rows]
print("max/min along the line:", round(max(e) / min(e), 2))

print(format_table(run_resolution_sweep(RunConfig(case="pollution", k_waves=(30.0,)),
                                        [3, 6, 12, 24, 48, 96])))

# ## A trace along y = 0
#
# Real parts of u_h (interior values) and u at 20 points.

case = get_case("pollution", 30.0)
uh, _, _ = solve_case(case, hexagon_mesh(60), 0)
for pt in trace_plot_data(uh, case, n_samples=20):
    print(f"{pt.x:+.3f}  {pt.re_uh:+.4f}  {pt.re_exact:+.4f}")
