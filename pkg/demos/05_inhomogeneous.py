# # A smoothly varying medium
#
# The coefficient d = 1/eps goes from 1/2 inside r = 1 to 1/80 outside r = 3
# with a C^1 cubic blend.  The exact solution is J0(kr) and the source
# absorbs the variation of d.

import numpy as np

from wghelmholtz.harness import RunConfig, format_table, run_convergence
from wghelmholtz.problems import DielectricProfile

p = DielectricProfile()
r = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
print("d(r):", p.d(r).round(4))

# Local wavelength is 2 pi sqrt(d) / k, about 0.35 in the outer shell, so
# the first meshes are coarse there and the observed rates settle late.

print(format_table(run_convergence(RunConfig(case="inhomogeneous", order=0, levels=4))))
