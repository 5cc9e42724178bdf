# # Convergence on the unit hexagon
#
# Homogeneous medium, Robin boundary, exact solution
# u = cos(kr)/k - C J0(kr).  The mesh is the hexagon with h = 1/N, so the
# rows line up level by level with the reference tables.

import logging

from wghelmholtz.harness import RunConfig, format_table, run_convergence, write_csv

logging.basicConfig(level=logging.WARNING)

# ## Lowest order, k = 1
#
# Expect order 1 in the H1-like seminorm and order 2 in L2.

rows = run_convergence(RunConfig(case="convex", order=0, levels=5, k_waves=(1.0,)))
print(format_table(rows))

# ## First order, k = 5
#
# One order higher in both norms.

rows = run_convergence(RunConfig(case="convex", order=1, levels=4, k_waves=(5.0,)))
print(format_table(rows))

# The same table as CSV (three significant digits) plus a full-precision copy.

write_csv(rows, "convex_p1.csv")
print(open("convex_p1.csv").read())
