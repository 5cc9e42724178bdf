"""Weak Galerkin finite elements for the 2-D Helmholtz equation.

Solves  -div(d grad u) - k^2 u = f  with Robin or Dirichlet boundary data
using piecewise P0 or P1 WG elements with Raviart-Thomas weak gradients.
"""
from .assembly import (BoundaryCondition, LinearSystem, SolveOptions, SolveReport,
                       SolverError, assemble, residual, solve, write_matrix_market)
from .harness import (ConfigError, ConvergenceRow, RunConfig, ScanRow, TracePoint,
                      run_convergence, run_pollution_scan, run_resolution_sweep,
                      solve_case, trace_plot_data, write_csv)
from .mesh import (DomainSpec, Mesh, cracked_disk_mesh, disk_mesh, hexagon_mesh,
                   mesh_size, refine_uniform, validate)
from .problems import (CASE_IDS, DielectricProfile, HelmholtzCase, case_convex,
                       case_inhomogeneous, case_nonconvex, case_pollution, get_case)
from .wg import (QuadConfig, WGSpace, WgFunction, project_Qh, relative_H1_error,
                 relative_L2_error)

__version__ = "0.1.0"
