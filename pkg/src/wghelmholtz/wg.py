"""
Weak Galerkin discretization kernel.

A WG function is a pair ``{v0, vb}``: a polynomial of degree ``k`` inside
each triangle and a polynomial of degree ``k`` on each edge, with no
continuity between them.  Its discrete weak gradient on a triangle ``T`` is
the element ``g`` of the Raviart-Thomas space RT_k(T) with

    (g, q)_T = -(v0, div q)_T + <vb, q.n>_{dT}    for all q in RT_k(T).

All element quantities are computed in local coordinates
``xh = (x - centroid) / (LOCAL_SCALE * diam(T))``, which leaves the
polynomial spaces unchanged but keeps the local Gram matrices well
conditioned.  Local points are formed from centroid-shifted vertices so
that no digits are lost on small elements far from the origin.

Local degrees of freedom of a triangle are ordered as
``[interior (n_int) | edge 0 (n_edge) | edge 1 | edge 2]`` where local edge
``j`` joins local vertices ``j`` and ``j+1``.  Edge basis functions are
``{1}`` (k=0) or ``{1, t - 1/2}`` (k=1), ``t`` being the parameter along the
edge in its global orientation, so an edge coefficient means the same
function on both adjacent triangles.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .quadrature import edge_quadrature, triangle_quadrature

__all__ = [
    "ElementOrder",
    "QuadConfig",
    "DofMap",
    "LocalDofs",
    "RTBasis",
    "LocalGradTable",
    "WGSpace",
    "WgFunction",
    "DegenerateElementError",
    "LOCAL_SCALE",
    "interior_basis",
    "edge_basis",
    "rt_values",
    "rt_divergence",
    "rt_basis",
    "weak_gradient_table",
    "local_stiffness",
    "local_mass_interior",
    "edge_mass",
    "project_Q0",
    "project_Qb",
    "project_Qh",
    "relative_L2_error",
    "relative_H1_error",
    "stabilizer_seminorm",
    "weak_gradient_norm",
]


# fraction of the element diameter used as the local length unit; a quarter
# keeps the RT_1 Gram condition number in the low hundreds
LOCAL_SCALE = 0.25


class DegenerateElementError(ValueError):
    """A triangle whose Gram matrix cannot be factored."""


def ElementOrder(k):
    """Validate a WG element order (0 or 1)."""
    k = int(k)
    if k not in (0, 1):
        raise ValueError(f"element order must be 0 or 1, got {k}")
    return k


@dataclass(frozen=True)
class LocalDofs:
    n_interior: int
    n_edge: int

    @property
    def total(self):
        return self.n_interior + 3 * self.n_edge

    @classmethod
    def for_order(cls, k):
        k = ElementOrder(k)
        return cls((k + 1) * (k + 2) // 2, k + 1)


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature used for element matrices and for data integrals.

    ``matrix_degree``/``matrix_edge_points`` integrate polynomial products;
    ``rhs_degree``/``rhs_edge_points`` integrate (possibly oscillatory) data
    such as sources, boundary data and exact solutions.
    """

    matrix_degree: int
    matrix_edge_points: int
    rhs_degree: int = 8
    rhs_edge_points: int = 4

    @classmethod
    def default(cls, k, rhs_degree=None):
        k = ElementOrder(k)
        base = cls(2, 2) if k == 0 else cls(5, 4)
        if rhs_degree is not None:
            base = cls(base.matrix_degree, base.matrix_edge_points, int(rhs_degree),
                       max(base.rhs_edge_points, (int(rhs_degree) + 2) // 2))
        return base


@dataclass(frozen=True)
class DofMap:
    """Global numbering: all interior dofs first, then all edge dofs."""

    n_triangles: int
    n_edges: int
    n_tri_dofs: int
    n_edge_dofs: int

    @property
    def n_interior_total(self):
        return self.n_triangles * self.n_tri_dofs

    @property
    def n_total(self):
        return self.n_interior_total + self.n_edges * self.n_edge_dofs

    def tri_offset(self, t):
        return np.asarray(t) * self.n_tri_dofs

    def edge_offset(self, e):
        return self.n_interior_total + np.asarray(e) * self.n_edge_dofs

    def edge_dofs(self, edges):
        """Global indices of all dofs on ``edges``, shape (len(edges), n_edge_dofs)."""
        edges = np.asarray(edges)
        return self.edge_offset(edges)[:, None] + np.arange(self.n_edge_dofs)


# -- polynomial bases in local coordinates ----------------------------------

def interior_basis(k, xh):
    """Interior basis {1} or {1, x, y} at local points ``xh`` (..., 2)."""
    xh = np.asarray(xh)
    one = np.ones(xh.shape[:-1])
    if k == 0:
        return one[..., None]
    return np.stack([one, xh[..., 0], xh[..., 1]], axis=-1)


def edge_basis(k, t):
    """Edge basis {1} or {1, t - 1/2} at parameters ``t``."""
    t = np.asarray(t, dtype=float)
    one = np.ones_like(t)
    if k == 0:
        return one[..., None]
    return np.stack([one, t - 0.5], axis=-1)


def rt_values(k, xh):
    """RT_k basis values at local points, shape (..., dim, 2)."""
    xh = np.asarray(xh)
    x, y = xh[..., 0], xh[..., 1]
    one = np.ones_like(x)
    zero = np.zeros_like(x)
    if k == 0:
        comps = [(one, zero), (zero, one), (x, y)]
    else:
        comps = [(one, zero), (x, zero), (y, zero),
                 (zero, one), (zero, x), (zero, y),
                 (x * x, x * y), (x * y, y * y)]
    return np.stack([np.stack(c, axis=-1) for c in comps], axis=-2)


def rt_divergence(k, xh, scale):
    """Physical divergence of the RT_k basis, shape (..., dim).

    ``scale`` is the length unit of the local coordinates and must broadcast against ``xh[..., 0]``.
    """
    xh = np.asarray(xh)
    x, y = xh[..., 0], xh[..., 1]
    inv = 1.0 / np.asarray(scale, dtype=float) * np.ones_like(x)
    zero = np.zeros_like(x)
    if k == 0:
        d = [zero, zero, 2.0 * inv]
    else:
        d = [zero, inv, zero, zero, zero, inv, 3.0 * x * inv, 3.0 * y * inv]
    return np.stack(d, axis=-1)


@dataclass(frozen=True)
class RTBasis:
    """RT_k basis of one triangle, in centroid-shifted scaled coordinates."""

    centroid: np.ndarray
    scale: float
    k: int

    @property
    def dim(self):
        return 3 if self.k == 0 else 8

    def local(self, points):
        return (np.asarray(points, dtype=float) - self.centroid) / self.scale

    def evaluate(self, points):
        """Values at physical ``points`` (n, 2), shape (n, dim, 2)."""
        return rt_values(self.k, self.local(points))

    def divergence(self, points):
        return rt_divergence(self.k, self.local(points), self.scale)


def _triangle_geometry(P):
    P = np.asarray(P, dtype=float)
    c = P.mean(axis=-2)
    d = np.roll(P, -1, axis=-2) - P
    lengths = np.hypot(d[..., 0], d[..., 1])
    area2 = d[..., 0, 0] * d[..., 1, 1] - d[..., 0, 1] * d[..., 1, 0]
    return c, lengths, 0.5 * area2, d


def rt_basis(tri_points, k):
    """RT_k basis for the triangle with vertex coordinates ``tri_points`` (3, 2)."""
    k = ElementOrder(k)
    c, lengths, _, _ = _triangle_geometry(tri_points)
    return RTBasis(c, LOCAL_SCALE * float(lengths.max()), k)


# -- element tables -----------------------------------------------------------

@dataclass
class LocalGradTable:
    """Per-element weak-gradient data, batched over ``n`` triangles.

    gram : (n, m, m)      RT Gram matrices (theta_j, theta_i)_T
    rhs : (n, m, nloc)    right-hand sides of the defining system, one column
                          per local basis function
    coeffs : (n, m, nloc) RT coefficients of the weak gradient of each local
                          basis function
    """

    gram: np.ndarray
    rhs: np.ndarray
    coeffs: np.ndarray


def _local_frame(P):
    """Centroids, local length units and local vertex coordinates of triangles ``P``."""
    c, lengths, _, _ = _triangle_geometry(P)
    s = LOCAL_SCALE * lengths.max(axis=-1)
    return c, s, (P - c[..., None, :]) / s[..., None, None]


def _edge_local_points(Pl, j, t):
    """Local coordinates of parameters ``t`` along local edge ``j``, shape (n, nq, 2)."""
    a, b = Pl[:, j], Pl[:, (j + 1) % 3]
    return (1.0 - t)[None, :, None] * a[:, None] + t[None, :, None] * b[:, None]


def _tri_quad_points(P, rule):
    """Physical points (n, nq, 2) and weights (n, nq) of ``rule`` on triangles ``P``."""
    X = np.einsum("qi,nid->nqd", rule.points, P)
    _, _, area, _ = _triangle_geometry(P)
    W = 2.0 * np.abs(area)[:, None] * rule.weights[None, :]
    return X, W


def weak_gradient_table(P, edge_sign, k, matrix_degree=None, edge_points=None):
    """Weak-gradient tables for triangles with vertex coordinates ``P``.

    Parameters
    ----------
    P : (n, 3, 2) or (3, 2) array
        Counterclockwise vertex coordinates.
    edge_sign : (n, 3) or (3,) array
        +1 where local edge ``j`` is traversed in its global direction.
    k : int
        Element order.
    """
    k = ElementOrder(k)
    P = np.asarray(P, dtype=float)
    single = P.ndim == 2
    if single:
        P = P[None]
        edge_sign = np.asarray(edge_sign)[None]
    edge_sign = np.asarray(edge_sign, dtype=float)
    cfg = QuadConfig.default(k)
    trule = triangle_quadrature(matrix_degree or cfg.matrix_degree)
    erule = edge_quadrature(edge_points or cfg.matrix_edge_points)
    dofs = LocalDofs.for_order(k)

    c, lengths, area, d = _triangle_geometry(P)
    if np.any(area <= 1e-14 * lengths.max(axis=-1) ** 2):
        bad = np.flatnonzero(area <= 1e-14 * lengths.max(axis=-1) ** 2)
        raise DegenerateElementError(f"degenerate or inverted triangle(s) {bad[:10].tolist()}")
    _, h, Pl = _local_frame(P)
    n = len(P)

    W = 2.0 * np.abs(area)[:, None] * trule.weights[None, :]
    xh = np.einsum("qi,nid->nqd", trule.points, Pl)
    th = rt_values(k, xh)                          # (n, nq, m, 2)
    gram = np.einsum("nq,nqid,nqjd->nij", W, th, th)
    m = gram.shape[-1]

    rhs = np.zeros((n, m, dofs.total))
    div = rt_divergence(k, xh, h[:, None])          # (n, nq, m)
    phi = interior_basis(k, xh)                     # (n, nq, n_int)
    rhs[:, :, :dofs.n_interior] = -np.einsum("nq,nqi,nqa->nia", W, div, phi)

    normals = np.stack([d[..., 1], -d[..., 0]], axis=-1) / lengths[..., None]
    t = erule.points
    for j in range(3):
        the = rt_values(k, _edge_local_points(Pl, j, t))           # (n, nq, m, 2)
        qn = np.einsum("nqid,nd->nqi", the, normals[:, j])
        # local basis expressed in the edge's global orientation
        tg = np.where(edge_sign[:, j, None] > 0, t[None, :], 1.0 - t[None, :])
        psi = edge_basis(k, tg)                                     # (n, nq, n_edge)
        col = dofs.n_interior + j * dofs.n_edge
        rhs[:, :, col:col + dofs.n_edge] = lengths[:, j, None, None] * np.einsum(
            "q,nqi,nqb->nib", erule.weights, qn, psi)

    try:
        coeffs = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateElementError("singular RT Gram matrix") from exc
    if single:
        return LocalGradTable(gram[0], rhs[0], coeffs[0])
    return LocalGradTable(gram, rhs, coeffs)


def _weighted_gram(P, k, d, rule):
    """(d theta_i, theta_j)_T for a coefficient function ``d``."""
    _, _, Pl = _local_frame(P)
    X, W = _tri_quad_points(P, rule)
    dv = np.asarray(d(X[..., 0], X[..., 1]), dtype=float)
    if not np.all(np.isfinite(dv)):
        raise ValueError("coefficient d is not finite at some quadrature points")
    th = rt_values(k, np.einsum("qi,nid->nqd", rule.points, Pl))
    return np.einsum("nq,nqid,nqjd->nij", W * dv, th, th)


def local_stiffness(P, d, table, k, rule=None):
    """Element matrices (d grad_d phi_j, grad_d phi_i)_T.

    ``d`` is either a positive number (constant coefficient) or a callable
    ``d(x, y)`` integrated with ``rule``.
    """
    C = table.coeffs
    if callable(d):
        P = np.asarray(P, dtype=float)
        single = P.ndim == 2
        Pb = P[None] if single else P
        D = _weighted_gram(Pb, k, d, rule or triangle_quadrature(8))
        if single:
            D = D[0]
    else:
        D = float(d) * table.gram
    S = np.einsum("...ia,...ij,...jb->...ab", C, D, C)
    return 0.5 * (S + np.swapaxes(S, -1, -2))


def local_mass_interior(P, k, rule=None):
    """Gram matrix of the interior basis on each triangle."""
    k = ElementOrder(k)
    P = np.asarray(P, dtype=float)
    single = P.ndim == 2
    if single:
        P = P[None]
    rule = rule or triangle_quadrature(2)
    _, _, Pl = _local_frame(P)
    _, W = _tri_quad_points(P, rule)
    phi = interior_basis(k, np.einsum("qi,nid->nqd", rule.points, Pl))
    M = np.einsum("nq,nqa,nqb->nab", W, phi, phi)
    return M[0] if single else M


def edge_mass(length, k, rule=None):
    """Gram matrix of the edge basis scaled by the edge length."""
    k = ElementOrder(k)
    rule = rule or edge_quadrature(2)
    psi = edge_basis(k, rule.points)
    ref = np.einsum("q,qa,qb->ab", rule.weights, psi, psi)
    length = np.asarray(length, dtype=float)
    return length[..., None, None] * ref


# -- spaces and functions ---------------------------------------------------

class WGSpace:
    """WG finite element space of order ``k`` on a mesh, with cached element data."""

    def __init__(self, mesh, k, quad=None):
        self.mesh = mesh
        self.k = ElementOrder(k)
        self.quad = quad or QuadConfig.default(self.k)
        self.local = LocalDofs.for_order(self.k)
        self.dofmap = DofMap(mesh.n_triangles, mesh.n_edges,
                             self.local.n_interior, self.local.n_edge)

    @property
    def n_dofs(self):
        return self.dofmap.n_total

    @cached_property
    def local_dofs(self):
        """(nT, nloc) global dof indices in local order."""
        dm = self.dofmap
        nT = self.mesh.n_triangles
        interior = dm.tri_offset(np.arange(nT))[:, None] + np.arange(dm.n_tri_dofs)
        edge = dm.edge_offset(self.mesh.tri_edges)[..., None] + np.arange(dm.n_edge_dofs)
        return np.concatenate([interior, edge.reshape(nT, -1)], axis=1)

    @cached_property
    def table(self):
        return weak_gradient_table(self.mesh.tri_points, self.mesh.tri_edge_sign, self.k,
                                   self.quad.matrix_degree, self.quad.matrix_edge_points)

    @cached_property
    def mass_interior(self):
        return local_mass_interior(self.mesh.tri_points, self.k,
                                   triangle_quadrature(self.quad.matrix_degree))

    @cached_property
    def diameters(self):
        p = self.mesh.tri_points
        d = np.roll(p, -1, axis=1) - p
        return np.hypot(d[..., 0], d[..., 1]).max(axis=1)

    @cached_property
    def scales(self):
        """Local length unit of every triangle."""
        return LOCAL_SCALE * self.diameters

    @cached_property
    def local_vertices(self):
        """(nT, 3, 2) vertex coordinates in the local frame of each triangle."""
        m = self.mesh
        return (m.tri_points - m.centroids[:, None, :]) / self.scales[:, None, None]

    def local_coords(self, X):
        """Map physical points (nT, nq, 2) to local coordinates."""
        return (X - self.mesh.centroids[:, None, :]) / self.scales[:, None, None]

    def rhs_points(self):
        """Physical points (nT, nq, 2) and weights (nT, nq) of the data rule."""
        return _tri_quad_points(self.mesh.tri_points, triangle_quadrature(self.quad.rhs_degree))

    def zero(self, dtype=complex):
        return WgFunction(self, np.zeros(self.n_dofs, dtype=dtype))

    def function(self, dofs):
        return WgFunction(self, np.asarray(dofs))


@dataclass
class WgFunction:
    """A WG function: coefficient vector on a :class:`WGSpace`."""

    space: WGSpace
    dofs: np.ndarray

    def __post_init__(self):
        if len(self.dofs) != self.space.n_dofs:
            raise ValueError(f"expected {self.space.n_dofs} dofs, got {len(self.dofs)}")

    @property
    def order(self):
        return self.space.k

    @property
    def mesh(self):
        return self.space.mesh

    @property
    def u0(self):
        dm = self.space.dofmap
        return self.dofs[:dm.n_interior_total].reshape(dm.n_triangles, dm.n_tri_dofs)

    @property
    def ub(self):
        dm = self.space.dofmap
        return self.dofs[dm.n_interior_total:].reshape(dm.n_edges, dm.n_edge_dofs)

    def local(self):
        """(nT, nloc) local coefficient vectors."""
        return self.dofs[self.space.local_dofs]

    def interior_values(self, tri, points):
        """Interior polynomial of triangle(s) ``tri`` evaluated at ``points`` (n, 2)."""
        tri = np.asarray(tri)
        xh = (np.asarray(points) - self.mesh.centroids[tri]) / self.space.scales[tri, None]
        phi = interior_basis(self.order, xh)
        return np.einsum("na,na->n", phi, self.u0[tri])

    def __sub__(self, other):
        return WgFunction(self.space, self.dofs - other.dofs)

    def __add__(self, other):
        return WgFunction(self.space, self.dofs + other.dofs)

    def __mul__(self, s):
        return WgFunction(self.space, self.dofs * s)

    __rmul__ = __mul__


_BLOCK = 1 << 16


# -- projections --------------------------------------------------------------

def project_Q0(u, space, rule=None, load_only=False):
    """L2 projection of ``u(x, y)`` onto P_k of every triangle, shape (nT, n_int).

    With ``load_only`` the moments ``(u, phi_a)_T`` are returned instead.
    Triangles are processed in blocks to bound the memory of the point data.
    """
    rule = rule or triangle_quadrature(space.quad.rhs_degree)
    P = space.mesh.tri_points
    nT = len(P)
    load = None
    for s in range(0, nT, _BLOCK):
        sl = slice(s, min(s + _BLOCK, nT))
        X, W = _tri_quad_points(P[sl], rule)
        vals = np.asarray(u(X[..., 0], X[..., 1]))
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite function values at quadrature points")
        xh = np.einsum("qi,nid->nqd", rule.points, space.local_vertices[sl])
        part = np.einsum("nq,nq,nqa->na", W, vals, interior_basis(space.k, xh))
        if load is None:
            load = np.zeros((nT, part.shape[1]), dtype=part.dtype)
        load[sl] = part
    if load_only:
        return load
    if space.k == 0:
        return load / space.mesh.areas[:, None]
    return np.linalg.solve(space.mass_interior, load[..., None])[..., 0]


def project_Qb(u, mesh, k, rule=None, edges=None):
    """L2 projection of ``u(x, y)`` onto P_k of each edge, shape (nE, n_edge)."""
    k = ElementOrder(k)
    rule = rule or edge_quadrature(4)
    pts = mesh.edge_points(rule.points)
    if edges is not None:
        pts = pts[edges]
    vals = np.asarray(u(pts[..., 0], pts[..., 1]))
    psi = edge_basis(k, rule.points)
    load = np.einsum("q,nq,qa->na", rule.weights, vals, psi)
    ref = np.einsum("q,qa,qb->ab", rule.weights, psi, psi)
    return load @ np.linalg.inv(ref).T


def project_Qh(u, space):
    """The WG function {Q0 u, Qb u}."""
    q0 = project_Q0(u, space)
    qb = project_Qb(u, space.mesh, space.k, edge_quadrature(space.quad.rhs_edge_points))
    dofs = np.concatenate([q0.ravel(), qb.ravel()])
    return WgFunction(space, dofs)


# -- error norms --------------------------------------------------------------

def _as_projection(u, space):
    if isinstance(u, WgFunction):
        return u
    return project_Qh(u, space)


def _interior_l2(v, space):
    u0 = v.u0
    M = space.mass_interior
    if space.k == 0:
        return float(np.sum(M[:, 0, 0] * np.abs(u0[:, 0]) ** 2))
    return float(np.real(np.einsum("na,nab,nb->", u0.conj(), M, u0)))


def stabilizer_seminorm(v, rule=None):
    """sum_T sum_{e in dT} h_e^{-1} ||v0 - vb||_e^2, returned squared.

    Interior edges are counted once from each side.
    """
    space = v.space
    rule = rule or edge_quadrature(space.quad.matrix_edge_points)
    mesh = space.mesh
    Pl = space.local_vertices
    t = rule.points
    total = 0.0
    u0 = v.u0
    ub = v.ub
    for j in range(3):
        v0 = np.einsum("nqa,na->nq", interior_basis(space.k, _edge_local_points(Pl, j, t)), u0)
        sign = mesh.tri_edge_sign[:, j]
        tg = np.where(sign[:, None] > 0, t[None, :], 1.0 - t[None, :])
        e = mesh.tri_edges[:, j]
        vb = np.einsum("nqb,nb->nq", edge_basis(space.k, tg), ub[e])
        # h_e^{-1} * |e| * sum_q w_q |jump|^2
        total += float(np.sum(np.abs(v0 - vb) ** 2 @ rule.weights))
    return total


def weak_gradient_norm(v):
    """||grad_d v||^2 summed over all triangles."""
    space = v.space
    tab = space.table
    c = np.einsum("nia,na->ni", tab.coeffs, v.local())
    return float(np.real(np.einsum("ni,nij,nj->", c.conj(), tab.gram, c)))


def relative_L2_error(uh, u_exact, rule=None):
    """||u0 - Q0 u|| / ||Q0 u||.

    ``u_exact`` is a callable ``u(x, y)`` or its precomputed projection.
    """
    space = uh.space
    qh = _as_projection(u_exact, space)
    den = _interior_l2(qh, space)
    if den == 0.0:
        raise ZeroDivisionError("reference function has zero L2 norm")
    return float(np.sqrt(_interior_l2(uh - qh, space) / den))


def relative_H1_error(uh, u_exact, k=None, rule=None):
    """Relative discrete H1 error.

    Order 0 uses the edge-jump seminorm; order 1 uses ``||grad_d (uh - Qh u)||``.
    """
    space = uh.space
    k = space.k if k is None else ElementOrder(k)
    qh = _as_projection(u_exact, space)
    norm = stabilizer_seminorm if k == 0 else weak_gradient_norm
    den = norm(qh)
    if den == 0.0:
        raise ZeroDivisionError("reference function has zero H1 seminorm")
    return float(np.sqrt(norm(uh - qh) / den))
