"""
Conforming triangle meshes for the benchmark domains.

Three domains are supported: the unit regular hexagon, a disk of radius R
and a disk with a slit along the negative x-axis ("cracked disk").  All three
are built from the same triangular lattice: the hexagon directly, the disks
by mapping hexagonal ring ``j`` of the lattice onto the circle of radius
``R*j/M``.  Meshes are stored as numpy arrays and are treated as immutable.

On the cracked disk the vertices on the slit are duplicated.  The copy used
by triangles above the slit carries ``sheet = +1`` and ``y = +0.0``; the copy
below carries ``sheet = -1`` and ``y = -0.0``, so ``atan2`` evaluated at those
points (and at any convex combination of them) returns +pi or -pi
consistently with the side of the slit.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "DomainSpec",
    "Mesh",
    "MeshDiagnostics",
    "hexagon_mesh",
    "disk_mesh",
    "cracked_disk_mesh",
    "refine_uniform",
    "mesh_size",
    "nested_dissection_edges",
    "validate",
    "write_wgmesh",
    "read_wgmesh",
]

SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class DomainSpec:
    """Description of a benchmark domain.

    kind is one of ``"hexagon"``, ``"disk"``, ``"cracked_disk"``.
    """

    kind: str
    N: int = 1
    R: float = 1.0
    n_boundary: int = 6

    def __post_init__(self):
        if self.kind not in ("hexagon", "disk", "cracked_disk"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "hexagon" and self.N < 1:
            raise ValueError("hexagon needs N >= 1")
        if self.R <= 0:
            raise ValueError("radius must be positive")
        if self.kind != "hexagon" and (self.n_boundary < 6 or self.n_boundary % 6):
            raise ValueError("n_boundary must be a positive multiple of 6")

    @classmethod
    def hexagon(cls, N):
        return cls("hexagon", N=int(N), R=1.0, n_boundary=6 * int(N))

    @classmethod
    def disk(cls, R, n_boundary):
        return cls("disk", R=float(R), n_boundary=int(n_boundary))

    @classmethod
    def cracked_disk(cls, R, n_boundary):
        return cls("cracked_disk", R=float(R), n_boundary=int(n_boundary))

    @property
    def curved(self):
        return self.kind != "hexagon"

    @property
    def radius(self):
        return self.R


class Mesh:
    """Triangle mesh with edge topology.

    Parameters
    ----------
    vertices : (nV, 2) float array
    triangles : (nT, 3) int array, counterclockwise vertex order
    domain : DomainSpec
    sheet : (nV,) int array, optional
        +1/-1 for the two copies of a slit vertex, 0 elsewhere.

    Attributes
    ----------
    edges : (nE, 2) int array
        Vertex pairs with ``edges[:, 0] < edges[:, 1]``.  The global
        orientation of an edge runs from ``edges[e, 0]`` to ``edges[e, 1]``.
    edge_tris : (nE, 2) int array
        Adjacent triangles, ``-1`` in the second column for boundary edges.
    tri_edges : (nT, 3) int array
        Local edge ``j`` joins local vertices ``j`` and ``j+1 (mod 3)``.
    tri_edge_sign : (nT, 3) int array
        +1 when the local direction of the edge agrees with the global one.
    """

    def __init__(self, vertices, triangles, domain, sheet=None):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        self.domain = domain
        if sheet is None:
            sheet = np.zeros(len(self.vertices), dtype=np.int8)
        self.sheet = np.asarray(sheet, dtype=np.int8)
        self._build_topology()
        for arr in (self.vertices, self.triangles, self.sheet, self.edges,
                    self.edge_tris, self.tri_edges, self.tri_edge_sign,
                    self.boundary, self.edge_count):
            arr.flags.writeable = False

    def _build_topology(self):
        t = self.triangles
        nT = len(t)
        local = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)
        local = local.reshape(-1, 2)
        lo = local.min(axis=1)
        hi = local.max(axis=1)
        key = lo * (len(self.vertices) + 1) + hi
        uniq, first, inverse, counts = np.unique(
            key, return_index=True, return_inverse=True, return_counts=True)
        self.edges = np.stack([lo[first], hi[first]], axis=1)
        self.tri_edges = inverse.reshape(nT, 3)
        self.tri_edge_sign = np.where(local[:, 0] < local[:, 1], 1, -1).reshape(nT, 3)
        self.edge_count = counts

        owner = np.repeat(np.arange(nT), 3)
        order = np.argsort(inverse, kind="stable")
        sorted_e = inverse[order]
        edge_tris = -np.ones((len(uniq), 2), dtype=np.int64)
        starts = np.searchsorted(sorted_e, np.arange(len(uniq)))
        edge_tris[:, 0] = owner[order[starts]]
        two = counts >= 2
        edge_tris[two, 1] = owner[order[starts[two] + 1]]
        self.edge_tris = edge_tris
        self.boundary = counts == 1

    # -- sizes -------------------------------------------------------------
    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    # -- geometry ----------------------------------------------------------
    @cached_property
    def tri_points(self):
        """(nT, 3, 2) vertex coordinates of every triangle."""
        return self.vertices[self.triangles]

    @cached_property
    def signed_areas(self):
        p = self.tri_points
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def areas(self):
        return np.abs(self.signed_areas)

    @cached_property
    def centroids(self):
        return self.tri_points.mean(axis=1)

    @cached_property
    def edge_length(self):
        d = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    @cached_property
    def outward_normals(self):
        """(nT, 3, 2) unit outward normal of each local edge."""
        p = self.tri_points
        d = np.roll(p, -1, axis=1) - p
        n = np.stack([d[..., 1], -d[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    @cached_property
    def boundary_edges(self):
        return np.flatnonzero(self.boundary)

    @cached_property
    def edge_sheet(self):
        """+1/-1 for boundary edges on the upper/lower face of the slit."""
        out = np.zeros(self.n_edges, dtype=np.int8)
        if self.domain is None or self.domain.kind != "cracked_disk":
            return out
        a, b = self.edges[:, 0], self.edges[:, 1]
        sa, sb = self.sheet[a], self.sheet[b]
        on_slit = self.boundary & ((sa != 0) | (sb != 0))
        on_slit &= (self.vertices[a, 1] == 0) & (self.vertices[b, 1] == 0)
        out[on_slit] = np.where(sa[on_slit] != 0, sa[on_slit], sb[on_slit])
        return out

    def edge_points(self, t):
        """Points at parameters ``t`` along every edge, shape (nE, len(t), 2).

        Uses the convex-combination form so the sign of a zero y coordinate
        on the slit survives.
        """
        t = np.asarray(t, dtype=float)
        pa = self.vertices[self.edges[:, 0]][:, None, :]
        pb = self.vertices[self.edges[:, 1]][:, None, :]
        pts = (1.0 - t)[None, :, None] * pa + t[None, :, None] * pb
        sheet = self.edge_sheet
        if np.any(sheet):
            slit = sheet != 0
            pts[slit, :, 1] = np.copysign(0.0, sheet[slit])[:, None].astype(float)
        return pts

    def edge_normal(self, e, side=0):
        """Unit normal of edge ``e`` pointing out of its adjacent triangle ``side``."""
        t = self.edge_tris[e, side]
        if t < 0:
            raise ValueError(f"edge {e} has no triangle on side {side}")
        j = int(np.flatnonzero(self.tri_edges[t] == e)[0])
        return self.outward_normals[t, j]

    def __repr__(self):
        return (f"Mesh({self.domain.kind if self.domain else None}, "
                f"nV={self.n_vertices}, nT={self.n_triangles}, nE={self.n_edges})")


# -- lattice construction ---------------------------------------------------

def _hex_lattice(N):
    """Lattice points (i, j) with hexagonal norm <= N and the 6N^2 triangles."""
    rng = np.arange(-N, N + 1)
    I, J = np.meshgrid(rng, rng, indexing="ij")
    I, J = I.ravel(), J.ravel()
    inside = np.maximum(np.maximum(np.abs(I), np.abs(J)), np.abs(I + J)) <= N
    I, J = I[inside], J[inside]
    index = -np.ones((2 * N + 1, 2 * N + 1), dtype=np.int64)
    index[I + N, J + N] = np.arange(len(I))

    def idx(i, j):
        ok = (np.abs(i) <= N) & (np.abs(j) <= N) & (np.abs(i + j) <= N)
        out = -np.ones(i.shape, dtype=np.int64)
        out[ok] = index[i[ok] + N, j[ok] + N]
        return out

    # anchors range over the whole square: a down triangle may lie inside
    # the hexagon while its anchor does not
    A, B = np.meshgrid(np.arange(-N - 1, N + 1), np.arange(-N - 1, N + 1), indexing="ij")
    A, B = A.ravel(), B.ravel()
    up = np.stack([idx(A, B), idx(A + 1, B), idx(A, B + 1)], axis=1)
    down = np.stack([idx(A + 1, B), idx(A + 1, B + 1), idx(A, B + 1)], axis=1)
    tris = np.concatenate([up, down])
    tris = tris[(tris >= 0).all(axis=1)]
    return I, J, tris


def hexagon_mesh(N):
    """Regular triangulation of the unit hexagon with 6N^2 triangles of side 1/N."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    I, J, tris = _hex_lattice(N)
    verts = np.stack([(I + 0.5 * J) / N, (0.5 * SQRT3) * J / N], axis=1)
    return Mesh(verts, tris, DomainSpec.hexagon(N))


def _ring_angles(I, J):
    """Ring index and polar angle of lattice points mapped onto circles."""
    rho = np.maximum(np.maximum(np.abs(I), np.abs(J)), np.abs(I + J))
    i, j = I.copy(), J.copy()
    sector = np.zeros_like(I)
    for _ in range(6):
        done = (i > 0) & (j >= 0) | (rho == 0)
        # rotate the remaining points by -60 degrees: (i, j) -> (i + j, -i)
        i, j = np.where(done, i, i + j), np.where(done, j, -i)
        sector += ~done
    tau = np.divide(j, rho, out=np.zeros(len(I)), where=rho > 0)
    return rho, (sector + tau) * (np.pi / 3.0)


def _disk_arrays(R, n_boundary):
    if R <= 0:
        raise ValueError("radius must be positive")
    if n_boundary < 6 or n_boundary % 6:
        raise ValueError("n_boundary must be a positive multiple of 6")
    M = n_boundary // 6
    I, J, tris = _hex_lattice(M)
    rho, phi = _ring_angles(I, J)
    r = R * rho / M
    verts = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)
    # exact coordinates on the axes keep the slit and symmetry tests exact
    verts[(J == 0), 1] = 0.0
    return M, I, J, tris, verts


def disk_mesh(R=1.0, n_boundary=24):
    """Disk of radius ``R`` with ``n_boundary`` vertices on the circle."""
    M, I, J, tris, verts = _disk_arrays(R, n_boundary)
    return Mesh(verts, tris, DomainSpec.disk(R, n_boundary))


def cracked_disk_mesh(R=1.0, n_boundary=24):
    """Disk of radius ``R`` slit along the negative x-axis."""
    M, I, J, tris, verts = _disk_arrays(R, n_boundary)
    slit = np.flatnonzero((J == 0) & (I < 0))
    nV = len(verts)
    lower = np.arange(nV, nV + len(slit))
    verts = np.concatenate([verts, verts[slit]])
    verts[slit, 1] = 0.0
    verts[lower, 1] = -0.0
    sheet = np.zeros(len(verts), dtype=np.int8)
    sheet[slit] = 1
    sheet[lower] = -1

    below = J[tris].sum(axis=1) < 0
    remap = np.arange(nV)
    remap_lower = remap.copy()
    remap_lower[slit] = lower
    tris = np.where(below[:, None], remap_lower[tris], tris)
    return Mesh(verts, tris, DomainSpec.cracked_disk(R, n_boundary), sheet=sheet)


def refine_uniform(m):
    """Split every triangle into four through its edge midpoints.

    Midpoints of edges lying on a circular boundary are moved radially onto
    the circle.  Slit edges keep their sheet tag.
    """
    verts = m.vertices
    e = m.edges
    mid = 0.5 * (verts[e[:, 0]] + verts[e[:, 1]])
    mid_sheet = m.edge_sheet.copy()
    dom = m.domain
    if dom is not None and dom.curved:
        R = dom.R
        tol = 1e-9 * R
        ra = np.hypot(*verts[e[:, 0]].T)
        rb = np.hypot(*verts[e[:, 1]].T)
        on_circle = m.boundary & (np.abs(ra - R) < tol) & (np.abs(rb - R) < tol)
        rm = np.hypot(*mid[on_circle].T)
        mid[on_circle] *= (R / rm)[:, None]
    slit = mid_sheet != 0
    mid[slit, 1] = np.copysign(0.0, mid_sheet[slit]).astype(float)

    nV = m.n_vertices
    new_verts = np.concatenate([verts, mid])
    new_sheet = np.concatenate([m.sheet, mid_sheet])
    t = m.triangles
    mids = nV + m.tri_edges
    m0, m1, m2 = mids[:, 0], mids[:, 1], mids[:, 2]
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    children = np.concatenate([
        np.stack([a, m0, m2], axis=1),
        np.stack([m0, b, m1], axis=1),
        np.stack([m2, m1, c], axis=1),
        np.stack([m0, m1, m2], axis=1),
    ])
    return Mesh(new_verts, children, dom, sheet=new_sheet)


def mesh_size(m):
    """Largest edge length."""
    return float(m.edge_length.max())


def _bisection_labels(points, depth):
    """Recursive median bisection along the longer extent of each group."""
    n = len(points)
    lab = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    for level in range(depth):
        ng = 1 << level
        lo = np.full((ng, 2), np.inf)
        hi = np.full((ng, 2), -np.inf)
        np.minimum.at(lo, lab, points)
        np.maximum.at(hi, lab, points)
        axis = np.argmax(hi - lo, axis=1)[lab]
        order = np.lexsort((points[rows, axis], lab))
        sl = lab[order]
        start = np.searchsorted(sl, np.arange(ng))
        count = np.bincount(sl, minlength=ng)
        upper = (rows - start[sl]) >= count[sl] // 2
        lab[order] = 2 * sl + upper
    return lab


def nested_dissection_edges(m, leaf=4):
    """Fill-reducing elimination order of the mesh edges.

    Triangles are bisected recursively at the centroid median; an edge shared
    by two triangles on different sides of a cut belongs to that cut's
    separator.  Two edges only couple through a common triangle, so the
    separators are exact.  Each subtree is ordered before its separator.
    """
    nT = m.n_triangles
    depth = max(0, int(np.floor(np.log2(max(nT / leaf, 1.0)))))
    lab = _bisection_labels(m.centroids, depth)
    et = m.edge_tris
    a = lab[et[:, 0]]
    b = np.where(et[:, 1] >= 0, lab[np.maximum(et[:, 1], 0)], a)
    diff = a ^ b
    # depth of the tree node where the two triangles part ways
    split = np.zeros_like(diff)
    nz = diff > 0
    split[nz] = np.floor(np.log2(diff[nz])).astype(np.int64) + 1
    level = depth - split
    last_leaf = ((a >> split) + 1 << split) - 1
    return np.lexsort((-level, last_leaf))


@dataclass
class MeshDiagnostics:
    orientation_violations: list = field(default_factory=list)
    nonconforming_edges: list = field(default_factory=list)
    duplicate_vertices: list = field(default_factory=list)
    euler_characteristic: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


def validate(m):
    """Collect topology and geometry problems.  Never raises."""
    diag = MeshDiagnostics()
    try:
        diag.orientation_violations = np.flatnonzero(m.signed_areas <= 0).tolist()
        diag.nonconforming_edges = np.flatnonzero(m.edge_count > 2).tolist()
        diag.euler_characteristic = int(m.n_vertices - m.n_edges + m.n_triangles)
        R = m.domain.R if m.domain is not None else 1.0
        pairs = cKDTree(m.vertices).query_pairs(1e-12 * R, output_type="ndarray")
        if len(pairs):
            s = m.sheet[pairs]
            slit_copy = s[:, 0] * s[:, 1] < 0
            pairs = pairs[~slit_copy]
        diag.duplicate_vertices = [tuple(p) for p in pairs.tolist()]
    except Exception as exc:  # diagnostics must not abort
        diag.failures.append(f"validation crashed: {exc!r}")
        return diag

    if diag.orientation_violations:
        diag.failures.append(
            f"{len(diag.orientation_violations)} triangle(s) with non-positive area")
    if diag.nonconforming_edges:
        diag.failures.append(
            f"{len(diag.nonconforming_edges)} edge(s) shared by more than two triangles")
    if diag.duplicate_vertices:
        diag.failures.append(f"{len(diag.duplicate_vertices)} duplicate vertex pair(s)")
    if diag.euler_characteristic != 1:
        diag.failures.append(f"Euler characteristic {diag.euler_characteristic} != 1")
    return diag


def write_wgmesh(m, path):
    """Write the plain-text ``WGMESH v1`` format."""
    with open(path, "w") as fh:
        fh.write(f"WGMESH v1 {m.n_vertices} {m.n_triangles}\n")
        np.savetxt(fh, m.vertices, fmt="%.17g")
        np.savetxt(fh, m.triangles, fmt="%d")


def read_wgmesh(path, domain=None):
    with open(path) as fh:
        header = fh.readline().split()
        if header[:2] != ["WGMESH", "v1"]:
            raise ValueError(f"{path}: not a WGMESH v1 file")
        nv, nt = int(header[2]), int(header[3])
        data = fh.read().split()
    xy = np.array(data[:2 * nv], dtype=float).reshape(nv, 2)
    tri = np.array(data[2 * nv:2 * nv + 3 * nt], dtype=np.int64).reshape(nt, 3)
    return Mesh(xy, tri, domain)
