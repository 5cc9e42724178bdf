"""
Convergence studies, wave-number scans and trace data for the benchmark cases.

Everything here is plain plumbing around :mod:`wghelmholtz.assembly`: build
meshes, solve, measure relative errors against the exact solution and write
the tables as CSV.
"""
import csv
import logging
import math
import os
from dataclasses import astuple, dataclass, field, fields
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from .assembly import SolveOptions, SolverError, assemble, solve
from .mesh import hexagon_mesh, mesh_size, refine_uniform
from .problems import CASE_IDS, get_case
from .quadrature import triangle_quadrature
from .wg import QuadConfig, WGSpace, project_Qh, relative_H1_error, relative_L2_error

__all__ = [
    "ConfigError",
    "RunConfig",
    "ConvergenceRow",
    "ScanRow",
    "TracePoint",
    "StudyRows",
    "run_convergence",
    "run_pollution_scan",
    "run_resolution_sweep",
    "solve_case",
    "trace_plot_data",
    "write_csv",
    "format_table",
    "DEFAULT_SCAN_K",
    "MAX_K_OVER_KH",
]

log = logging.getLogger(__name__)

# k grid of the kh = const lines
DEFAULT_SCAN_K = (5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0)
# hexagon N above which a scan needs force=True (6 N^2 triangles)
MAX_K_OVER_KH = 400


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """One study.

    ``levels`` is either a count of successive refinements or an explicit
    list.  On the hexagon an explicit list gives the values of N (h = 1/N);
    on the disks it gives refinement counts of the initial mesh.
    """

    case: str = "convex"
    order: int = 0
    levels: Union[int, Sequence[int]] = 6
    k_waves: Sequence[float] = ()
    kh_targets: Sequence[float] = (0.25,)
    kmax: Optional[float] = None
    n0: Optional[int] = None
    quad_degree: Optional[int] = None
    solver: SolveOptions = field(default_factory=SolveOptions)
    out: Optional[str] = None
    force: bool = False

    def __post_init__(self):
        if self.case not in CASE_IDS:
            raise ConfigError(f"unknown case {self.case!r}; expected one of {', '.join(CASE_IDS)}")
        if self.order not in (0, 1):
            raise ConfigError(f"element order must be 0 or 1, got {self.order}")
        lv = self.levels
        if isinstance(lv, (int, np.integer)):
            if lv < 1:
                raise ConfigError("need at least one level")
        else:
            lv = tuple(int(v) for v in lv)
            if not lv or min(lv) < 0:
                raise ConfigError("level list must be nonempty and nonnegative")
            object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "k_waves", tuple(float(k) for k in self.k_waves))
        object.__setattr__(self, "kh_targets", tuple(float(v) for v in self.kh_targets))
        if any(not (k > 0 and math.isfinite(k)) for k in self.k_waves):
            raise ConfigError("wave numbers must be positive")
        if any(not (v > 0 and math.isfinite(v)) for v in self.kh_targets):
            raise ConfigError("kh targets must be positive")
        if self.kmax is not None and not self.kmax > 0:
            raise ConfigError("kmax must be positive")
        if self.n0 is not None and self.n0 < 1:
            raise ConfigError("n0 must be positive")
        if self.quad_degree is not None:
            try:
                triangle_quadrature(self.quad_degree)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.solver.method not in ("direct", "bicgstab"):
            raise ConfigError(f"unknown solver {self.solver.method!r}")

    @property
    def k_wave(self):
        return self.k_waves[0] if self.k_waves else None

    def quad(self):
        return QuadConfig.default(self.order, rhs_degree=self.quad_degree)


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    h1_err: float
    h1_order: Optional[float]
    l2_err: float
    l2_order: Optional[float]
    n_dofs: int = 0


@dataclass(frozen=True)
class ScanRow:
    k: float
    h: float
    kh: float
    h1_err: float
    N: int = 0
    kh_target: Optional[float] = None


@dataclass(frozen=True)
class TracePoint:
    x: float
    re_uh: float
    re_exact: float


class StudyRows(list):
    """List of result rows with the levels that failed to solve."""

    def __init__(self, rows=(), failures=None):
        super().__init__(rows)
        self.failures = list(failures or [])


def _observed_order(e_prev, e, h_prev, h):
    if not (e_prev > 0 and e > 0 and h_prev > 0 and h > 0 and h_prev != h):
        return None
    r = math.log(e_prev / e) / math.log(h_prev / h)
    return r if math.isfinite(r) else None


def _case(cfg, k_wave=None):
    k = k_wave if k_wave is not None else cfg.k_wave
    try:
        return get_case(cfg.case, k_wave=k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _meshes(case, cfg):
    """(mesh, label) pairs for the configured levels."""
    dom = case.domain
    if dom.kind == "hexagon":
        n0 = cfg.n0 or (2 if cfg.order == 0 else 4)
        if isinstance(cfg.levels, tuple):
            Ns = cfg.levels
        else:
            Ns = [n0 << i for i in range(cfg.levels)]
        for N in Ns:
            if N < 1:
                raise ConfigError("hexagon N must be positive")
            yield hexagon_mesh(N)
        return
    counts = cfg.levels if isinstance(cfg.levels, tuple) else tuple(range(cfg.levels))
    m = case.initial_mesh()
    done = 0
    for c in sorted(counts):
        while done < c:
            m = refine_uniform(m)
            done += 1
        yield m


def solve_case(case, mesh, order, quad=None, opts=None, solve_fn=None):
    """Assemble and solve ``case`` on ``mesh``; returns ``(uh, space, report)``."""
    space = WGSpace(mesh, order, quad)
    system = assemble(space, case.d, case.k_wave, case.f, case.bc)
    if solve_fn is not None:
        return solve_fn(system), space, None
    uh, report = solve(system, opts)
    return uh, space, report


def run_convergence(cfg, solve_fn=None):
    """Relative H1 and L2 errors over successive refinements.

    ``solve_fn(system) -> WgFunction`` replaces the linear solver; used to
    inject known discrete solutions.  A level whose solve fails is skipped and
    listed in ``rows.failures``.
    """
    case = _case(cfg)
    rows = StudyRows()
    prev = None
    for mesh in _meshes(case, cfg):
        h = 1.0 / round(1.0 / mesh_size(mesh)) if case.domain.kind == "hexagon" else mesh_size(mesh)
        try:
            uh, space, report = solve_case(case, mesh, cfg.order, cfg.quad(), cfg.solver, solve_fn)
        except SolverError as exc:
            log.error("level h=%.3e failed: %s", h, exc)
            rows.failures.append((h, str(exc)))
            continue
        qh = project_Qh(case.exact, space)
        e1 = relative_H1_error(uh, qh)
        e2 = relative_L2_error(uh, qh)
        o1 = o2 = None
        if prev is not None:
            o1 = _observed_order(prev.h1_err, e1, prev.h, h)
            o2 = _observed_order(prev.l2_err, e2, prev.h, h)
        row = ConvergenceRow(h, e1, o1, e2, o2, space.n_dofs)
        log.info("h=%.3e  H1 %.3e  L2 %.3e  dofs %d", h, e1, e2, space.n_dofs)
        rows.append(row)
        prev = row
    return rows


def _scan_pairs(cfg):
    kmax = cfg.kmax if cfg.kmax is not None else 100.0
    ks = cfg.k_waves or tuple(k for k in DEFAULT_SCAN_K if k <= kmax + 1e-12)
    if cfg.k_waves == () and kmax > DEFAULT_SCAN_K[-1]:
        ks = ks + tuple(float(k) for k in range(110, int(kmax) + 1, 10))
    pairs = []
    for kh in cfg.kh_targets:
        for k in ks:
            N = max(1, round(k / kh))
            pairs.append((k, kh, N))
    return pairs


def _check_guardrail(Ns, force):
    big = [N for N in Ns if N > MAX_K_OVER_KH]
    if big and not force:
        raise ConfigError(f"mesh with N={max(big)} (k/kh > {MAX_K_OVER_KH}) needs force")


def _scan_row(cfg, k, N, kh_target=None, solve_fn=None):
    case = get_case("pollution", k_wave=k)
    uh, space, _ = solve_case(case, hexagon_mesh(N), cfg.order, cfg.quad(), cfg.solver, solve_fn)
    err = relative_H1_error(uh, case.exact)
    h = 1.0 / N
    log.info("k=%g N=%d kh=%.4f  H1 %.3e", k, N, k * h, err)
    return ScanRow(k, h, k * h, err, N, kh_target)


def run_pollution_scan(cfg, solve_fn=None):
    """Relative H1 error along lines kh = const on the unit hexagon.

    N = round(k / kh_target); the realized kh = k / N is reported.
    """
    pairs = _scan_pairs(cfg)
    _check_guardrail([N for _, _, N in pairs], cfg.force)
    rows = StudyRows()
    for k, kh, N in pairs:
        try:
            rows.append(_scan_row(cfg, k, N, kh, solve_fn))
        except SolverError as exc:
            log.error("k=%g N=%d failed: %s", k, N, exc)
            rows.failures.append((k, N, str(exc)))
    return rows


def run_resolution_sweep(cfg, Ns, solve_fn=None):
    """Relative H1 error for fixed wave numbers over the hexagon meshes ``Ns``."""
    if not cfg.k_waves:
        raise ConfigError("resolution sweep needs at least one wave number")
    Ns = [int(N) for N in Ns]
    _check_guardrail(Ns, cfg.force)
    rows = StudyRows()
    for k in cfg.k_waves:
        for N in Ns:
            try:
                rows.append(_scan_row(cfg, k, N, None, solve_fn))
            except SolverError as exc:
                log.error("k=%g N=%d failed: %s", k, N, exc)
                rows.failures.append((k, N, str(exc)))
    return rows


def _locate(mesh, pts, tol=1e-10):
    """Index of a triangle containing each point, -1 if none."""
    tree = cKDTree(mesh.centroids)
    nn = min(12, mesh.n_triangles)
    _, cand = tree.query(pts, k=nn)
    cand = np.atleast_2d(cand.reshape(len(pts), nn))
    P = mesh.tri_points[cand]                                  # (n, nn, 3, 2)
    a, b, c = P[..., 0, :], P[..., 1, :], P[..., 2, :]
    p = pts[:, None, :]

    def cross(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    area = cross(b - a, c - a)
    l1 = cross(c - b, p - b) / area
    l2 = cross(a - c, p - c) / area
    l3 = 1.0 - l1 - l2
    inside = (l1 >= -tol) & (l2 >= -tol) & (l3 >= -tol)
    first = np.argmax(inside, axis=1)
    found = inside[np.arange(len(pts)), first]
    return np.where(found, cand[np.arange(len(pts)), first], -1)


def trace_plot_data(uh, case, n_samples=400, axis="y=0"):
    """Sample ``Re u_h`` and ``Re u`` along the x-axis.

    Samples sit at the midpoints of ``n_samples`` equal cells of
    ``[-R, R]``; each takes the interior value of the triangle containing
    it.  Points outside the mesh are skipped.
    """
    if axis not in ("y=0", "x"):
        raise ValueError(f"unsupported trace axis {axis!r}")
    if n_samples < 1:
        return []
    R = case.domain.radius
    x = -R + (np.arange(n_samples) + 0.5) * (2.0 * R / n_samples)
    pts = np.column_stack([x, np.zeros_like(x)])
    tri = _locate(uh.mesh, pts)
    ok = tri >= 0
    if not np.all(ok):
        log.warning("trace: %d of %d samples outside the mesh skipped", int((~ok).sum()), n_samples)
    vals = uh.interior_values(tri[ok], pts[ok])
    exact = np.asarray(case.exact(pts[ok, 0], pts[ok, 1]))
    return [TracePoint(float(a), float(np.real(b)), float(np.real(c)))
            for a, b, c in zip(x[ok], vals, exact)]


def _fmt_short(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.2e}"


def _fmt_full(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def _full_path(path):
    root, ext = os.path.splitext(os.fspath(path))
    return root + ".full" + (ext or ".csv")


def write_csv(rows, path, row_type=None):
    """Write ``rows`` as CSV with 3 significant digits, plus a full-precision copy.

    The full-precision file sits next to ``path`` with ``.full`` before the
    extension.  ``row_type`` fixes the header when ``rows`` is empty.
    """
    rows = list(rows)
    row_type = row_type or (type(rows[0]) if rows else ConvergenceRow)
    names = [f.name for f in fields(row_type)]
    for target, fmt in ((os.fspath(path), _fmt_short), (_full_path(path), _fmt_full)):
        try:
            with open(target, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(names)
                for r in rows:
                    w.writerow([fmt(v) for v in astuple(r)])
        except OSError as exc:
            raise OSError(f"cannot write {target}: {exc.strerror or exc}") from exc


def format_table(rows):
    """Plain-text table in the usual error/order layout."""
    if not rows:
        return ""
    names = [f.name for f in fields(type(rows[0]))]
    lines = ["  ".join(f"{n:>10}" for n in names)]
    for r in rows:
        cells = []
        for v in astuple(r):
            if v is None:
                cells.append(f"{'':>10}")
            elif isinstance(v, (int, np.integer)):
                cells.append(f"{int(v):>10d}")
            elif names[len(cells)].endswith("order"):
                cells.append(f"{v:>10.2f}")
            else:
                cells.append(f"{v:>10.2e}")
        lines.append("  ".join(cells))
    return "\n".join(lines)
