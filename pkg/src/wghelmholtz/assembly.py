"""
Global assembly and solution of the WG Helmholtz system.

Robin problems assemble

    A = S - k^2 M + i k B,    b = (f, v0) + <g, vb>_{boundary}

where ``S`` is the coefficient-weighted weak-gradient stiffness, ``M`` the
interior mass and ``B`` the boundary-edge mass.  Dirichlet problems fix the
boundary edge dofs to ``Qb g`` and eliminate them, moving the coupling to the
right-hand side.  ``A`` is complex symmetric (``A == A.T``) by construction.
"""
import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import nested_dissection_edges
from .quadrature import edge_quadrature, triangle_quadrature
from .wg import WgFunction, edge_basis, edge_mass, local_stiffness, project_Q0, project_Qb

__all__ = [
    "BoundaryCondition",
    "LinearSystem",
    "SolveOptions",
    "SolveReport",
    "SolverError",
    "assemble",
    "solve",
    "residual",
    "write_matrix_market",
]

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Factorization failure or residual above tolerance."""


@dataclass(frozen=True)
class BoundaryCondition:
    """Robin ``d du/dn + i k u = g`` or Dirichlet ``u = g``.

    Robin data is called as ``g(x, y, nx, ny)`` with the outward unit normal;
    Dirichlet data as ``g(x, y)``.
    """

    kind: str
    g: object

    def __post_init__(self):
        if self.kind not in ("robin", "dirichlet"):
            raise ValueError(f"unknown boundary condition {self.kind!r}")

    @classmethod
    def robin(cls, g):
        return cls("robin", g)

    @classmethod
    def dirichlet(cls, g):
        return cls("dirichlet", g)


@dataclass
class LinearSystem:
    """Assembled system on the free dofs of ``space``."""

    A: sp.csr_matrix
    b: np.ndarray
    space: object
    free: np.ndarray
    constrained: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    constrained_values: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    @property
    def dofmap(self):
        return self.space.dofmap

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class SolveOptions:
    method: str = "direct"          # "direct" | "bicgstab"
    rtol: float = 1e-10
    condense: bool = True           # eliminate interior dofs before factoring
    permc_spec: str = "ND"          # "ND" or any SuperLU column ordering
    maxiter: int = 20000


@dataclass
class SolveReport:
    method: str
    relative_residual: float
    fill: int
    wall_time: float


def _scatter(local_dofs, blocks, n):
    nloc = local_dofs.shape[1]
    rows = np.repeat(local_dofs, nloc, axis=1).ravel()
    cols = np.tile(local_dofs, (1, nloc)).ravel()
    return sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def _check_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise ValueError(f"non-finite values in {what}")


def assemble(space, d, k_wave, f, bc):
    """Assemble the WG system of order ``space.k``.

    Parameters
    ----------
    space : WGSpace
    d : float or callable ``d(x, y)``
    k_wave : float
        Wave number.
    f : callable ``f(x, y)``
    bc : BoundaryCondition
    """
    mesh = space.mesh
    k = space.k
    dm = space.dofmap
    n = dm.n_total
    nI = dm.n_tri_dofs
    if space.local_dofs.max() >= n:
        raise ValueError("dof map does not match the mesh")

    P = mesh.tri_points
    S = local_stiffness(P, d, space.table, k,
                        rule=triangle_quadrature(space.quad.rhs_degree))
    _check_finite(S, "stiffness")
    A_loc = S.copy()
    A_loc[:, :nI, :nI] -= k_wave ** 2 * space.mass_interior
    A = _scatter(space.local_dofs, A_loc, n).astype(complex)

    b = np.zeros(n, dtype=complex)
    b[:dm.n_interior_total] = project_Q0(f, space, load_only=True).ravel()

    bnd = mesh.boundary_edges
    bdofs = dm.edge_dofs(bnd)
    erule = edge_quadrature(space.quad.rhs_edge_points)

    if bc.kind == "robin":
        Bm = edge_mass(mesh.edge_length[bnd], k, edge_quadrature(space.quad.matrix_edge_points))
        B = _scatter(bdofs, Bm, n)
        A = (A + (1j * k_wave) * B).tocsr()
        pts = mesh.edge_points(erule.points)[bnd]
        owner = mesh.edge_tris[bnd, 0]
        j = np.argmax(mesh.tri_edges[owner] == bnd[:, None], axis=1)
        nrm = mesh.outward_normals[owner, j]
        gv = np.asarray(bc.g(pts[..., 0], pts[..., 1],
                             nrm[:, None, 0] * np.ones_like(pts[..., 0]),
                             nrm[:, None, 1] * np.ones_like(pts[..., 0])))
        _check_finite(gv, "Robin data g")
        psi = edge_basis(k, erule.points)
        load = mesh.edge_length[bnd, None] * np.einsum("q,nq,qa->na", erule.weights, gv, psi)
        b[bdofs.ravel()] += load.ravel()
        return LinearSystem(A, b, space, np.arange(n))

    values = project_Qb(bc.g, mesh, k, erule, edges=bnd)
    _check_finite(values, "Dirichlet data g")
    constrained = bdofs.ravel()
    xc = values.ravel().astype(complex)
    mask = np.ones(n, dtype=bool)
    mask[constrained] = False
    free = np.flatnonzero(mask)
    A_fc = A[free][:, constrained]
    A_ff = A[free][:, free].tocsr()
    b_f = b[free] - A_fc @ xc
    return LinearSystem(A_ff, b_f, space, free, constrained, xc)


def residual(system, x):
    """Relative residual ||b - A x|| / ||b||."""
    x = np.asarray(x)
    if x.shape != system.b.shape:
        raise ValueError("dimension mismatch")
    r = system.b - system.A @ x
    nb = np.linalg.norm(system.b)
    if nb == 0.0:
        return float(np.linalg.norm(r))
    return float(np.linalg.norm(r) / nb)


def _condense(system):
    """Split free dofs into per-element interior blocks and the rest.

    Returns ``None`` when the interior blocks are not all free or are too
    close to singular to eliminate safely.
    """
    dm = system.dofmap
    nI = dm.n_tri_dofs
    n_int = dm.n_interior_total
    free = system.free
    if len(free) < n_int or not np.array_equal(free[:n_int], np.arange(n_int)):
        return None
    A = system.A
    nT = dm.n_triangles
    # interior rows only couple within their own element
    idx = np.arange(n_int).reshape(nT, nI)
    blocks = np.zeros((nT, nI, nI), dtype=complex)
    A_ii = A[:n_int][:, :n_int].tocoo()
    blocks[A_ii.row // nI, A_ii.row % nI, A_ii.col % nI] = A_ii.data
    if nI == 1:
        piv = np.abs(blocks[:, 0, 0])
    else:
        piv = np.abs(np.linalg.det(blocks)) ** (1.0 / nI)
    scale = np.abs(A_ii.data).max() if A_ii.nnz else 1.0
    if np.any(piv < 1e-10 * scale):
        return None
    inv = np.linalg.inv(blocks)
    rows = np.repeat(idx, nI, axis=1).ravel()
    cols = np.tile(idx, (1, nI)).ravel()
    Ainv = sp.csr_matrix((inv.ravel(), (rows, cols)), shape=(n_int, n_int))
    A_ib = A[:n_int][:, n_int:]
    A_bi = A[n_int:][:, :n_int]
    A_bb = A[n_int:][:, n_int:]
    schur = (A_bb - A_bi @ (Ainv @ A_ib)).tocsc()
    return n_int, Ainv, A_ib, A_bi, schur


def solve(system, opts=None):
    """Solve ``system``; returns the full WG function and a :class:`SolveReport`."""
    opts = opts or SolveOptions()
    t0 = time.perf_counter()
    A, b = system.A, system.b
    fill = 0
    if opts.method == "direct":
        parts = _condense(system) if opts.condense else None
        if parts is not None:
            n_int, Ainv, A_ib, A_bi, schur = parts
            parts = None
            perm = _edge_permutation(system, n_int) if opts.permc_spec == "ND" else None
            b_i, b_b = b[:n_int], b[n_int:]
            rhs = b_b - A_bi @ (Ainv @ b_i)
            if perm is None:
                lu = _factor(schur, opts)
                x_b = lu.solve(rhs)
            else:
                schur = schur[perm][:, perm].tocsc()
                lu = _factor(schur, opts, symmetric=True)
                x_b = np.empty_like(rhs)
                x_b[perm] = lu.solve(rhs[perm])
            del schur
            x_i = Ainv @ (b_i - A_ib @ x_b)
            x = np.concatenate([x_i, x_b])
            method = "direct-condensed"
        else:
            lu = _factor(A.tocsc(), opts)
            x = lu.solve(b)
            method = "direct"
        fill = int(lu.nnz)
    elif opts.method == "bicgstab":
        diag = A.diagonal()
        diag[diag == 0] = 1.0
        M = sp.diags(1.0 / diag)
        x, info = spla.bicgstab(A, b, M=M, rtol=opts.rtol * 0.1, maxiter=opts.maxiter)
        if info != 0:
            raise SolverError(f"BiCGStab did not converge (info={info})")
        method = "bicgstab"
        fill = int(info)
    else:
        raise ValueError(f"unknown solver {opts.method!r}")

    rel = residual(system, x)
    wall = time.perf_counter() - t0
    log.debug("%s solve: n=%d residual=%.3e time=%.2fs", method, len(b), rel, wall)
    if not rel <= opts.rtol:
        raise SolverError(f"relative residual {rel:.3e} exceeds {opts.rtol:.1e}")

    full = np.zeros(system.space.n_dofs, dtype=complex)
    full[system.free] = x
    full[system.constrained] = system.constrained_values
    return WgFunction(system.space, full), SolveReport(method, rel, fill, wall)


def _edge_permutation(system, n_int):
    """Nested-dissection order of the free edge dofs of a condensed system."""
    dm = system.dofmap
    ne = dm.n_edge_dofs
    local = system.free[n_int:] - dm.n_interior_total
    rank = np.empty(dm.n_edges, dtype=np.int64)
    rank[nested_dissection_edges(system.space.mesh)] = np.arange(dm.n_edges)
    return np.lexsort((local % ne, rank[local // ne]))


def _factor(A, opts, symmetric=False):
    try:
        if symmetric:
            # keep the symmetric pre-ordering; pivot off the diagonal only when needed
            return spla.splu(A, permc_spec="NATURAL", diag_pivot_thresh=0.1,
                             options=dict(SymmetricMode=True))
        spec = "COLAMD" if opts.permc_spec == "ND" else opts.permc_spec
        return spla.splu(A, permc_spec=spec)
    except RuntimeError as exc:
        raise SolverError(f"sparse LU failed: {exc}") from exc


def write_matrix_market(system, path):
    """Dump ``A`` in Matrix Market coordinate format (complex general)."""
    scipy.io.mmwrite(path, system.A.tocoo(), field="complex", symmetry="general")
