import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wghelmholtz.mesh import (Mesh, cracked_disk_mesh, disk_mesh, hexagon_mesh,
                              mesh_size, nested_dissection_edges, read_wgmesh,
                              refine_uniform, validate, write_wgmesh)


def _brute_edges(tris):
    s = set()
    for t in tris:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            s.add((min(a, b), max(a, b)))
    return s


def _vertex_set(verts, nd=12):
    return {(round(x, nd) + 0.0, round(y, nd) + 0.0) for x, y in verts}


@pytest.mark.parametrize("N", [1, 2, 3, 5, 8])
def test_hexagon_counts(N):
    m = hexagon_mesh(N)
    assert m.n_triangles == 6 * N * N
    assert m.n_vertices == 3 * N * N + 3 * N + 1
    assert m.n_edges == 9 * N * N + 3 * N
    assert len(_brute_edges(m.triangles)) == m.n_edges
    assert m.n_vertices - m.n_edges + m.n_triangles == 1


def test_hexagon_counts_large():
    for N in (16, 64):
        m = hexagon_mesh(N)
        assert (m.n_triangles, m.n_vertices, m.n_edges) == (
            6 * N * N, 3 * N * N + 3 * N + 1, 9 * N * N + 3 * N)


def test_hexagon_geometry():
    m = hexagon_mesh(2)
    assert (m.n_triangles, m.n_vertices, m.n_edges) == (24, 19, 42)
    assert mesh_size(m) == pytest.approx(0.5, abs=1e-15)
    assert mesh_size(hexagon_mesh(4)) == pytest.approx(0.25, abs=1e-15)
    np.testing.assert_allclose(m.edge_length, 0.5, atol=1e-14)
    r = np.hypot(*m.vertices.T)
    assert r.max() == pytest.approx(1.0, abs=1e-14)
    assert np.all(m.signed_areas > 0)


def test_hexagon_symmetry():
    m = hexagon_mesh(5)
    V = _vertex_set(m.vertices)
    assert _vertex_set(m.vertices * [1, -1]) == V
    c, s = np.cos(np.pi / 3), np.sin(np.pi / 3)
    rot = m.vertices @ np.array([[c, s], [-s, c]])
    assert _vertex_set(rot) == V


def test_refine_hexagon_matches_direct():
    m1 = refine_uniform(hexagon_mesh(1))
    m2 = hexagon_mesh(2)
    assert m1.n_triangles == 24
    assert _vertex_set(m1.vertices) == _vertex_set(m2.vertices)


def test_refine_conserves_area_and_halves_h():
    m = hexagon_mesh(3)
    r = refine_uniform(m)
    assert r.n_triangles == 4 * m.n_triangles
    assert len(r.boundary_edges) == 2 * len(m.boundary_edges)
    assert r.areas.sum() == pytest.approx(m.areas.sum(), rel=1e-14)
    assert mesh_size(r) == pytest.approx(0.5 * mesh_size(m), rel=1e-14)
    # children of triangle t are t, t + nT, t + 2nT, t + 3nT
    nT = m.n_triangles
    child_area = r.areas.reshape(4, nT).sum(axis=0)
    np.testing.assert_allclose(child_area, m.areas, rtol=1e-13)


def test_disk_minimal_fan():
    m = disk_mesh(1.0, 6)
    assert m.n_triangles == 6
    assert np.sum(np.hypot(*m.vertices.T) < 1e-15) == 1


def test_disk_boundary_on_circle():
    m = disk_mesh(5.0, 24)
    bv = np.unique(m.edges[m.boundary_edges])
    assert len(bv) == 24
    np.testing.assert_allclose(np.sum(m.vertices[bv] ** 2, axis=1), 25.0, atol=1e-12)
    # refinement keeps boundary vertices on the circle
    r = refine_uniform(m)
    bv = np.unique(r.edges[r.boundary_edges])
    np.testing.assert_allclose(np.hypot(*r.vertices[bv].T), 5.0, atol=1e-12)


def test_disk_mesh_size_brute_force():
    m = disk_mesh(5.0, 24)
    best = 0.0
    for a, b in m.edges:
        best = max(best, float(np.linalg.norm(m.vertices[a] - m.vertices[b])))
    assert mesh_size(m) == best


@pytest.mark.parametrize("nb", [6, 12, 18, 24, 36])
def test_disk_topology(nb):
    for m in (disk_mesh(1.0, nb), cracked_disk_mesh(1.0, nb)):
        d = validate(m)
        assert d.ok, d.failures
        assert d.euler_characteristic == 1
        interior = ~m.boundary
        assert np.all(m.edge_tris[interior, 1] >= 0)
        assert np.all(m.edge_count <= 2)


def test_disk_rejects_bad_boundary_count():
    with pytest.raises(ValueError):
        disk_mesh(1.0, 20)
    with pytest.raises(ValueError):
        cracked_disk_mesh(1.0, 4)


def _slit_edges(m):
    return np.flatnonzero(m.edge_sheet != 0)


def test_cracked_disk_slit():
    m = cracked_disk_mesh(1.0, 36)
    # no interior edge lies on the slit
    a, b = m.edges[:, 0], m.edges[:, 1]
    on_axis = (m.vertices[a, 1] == 0) & (m.vertices[b, 1] == 0) & \
              (m.vertices[a, 0] < 0) & (m.vertices[b, 0] < 0)
    assert np.all(m.boundary[on_axis])
    th = np.arctan2(m.centroids[:, 1], m.centroids[:, 0])
    assert np.all(np.abs(th) < np.pi)
    s = _slit_edges(m)
    assert len(s) == 2 * 6       # M = 6 segments, two faces
    assert set(m.edge_sheet[s].tolist()) == {-1, 1}
    # the lower face evaluates at theta = -pi
    pts = m.edge_points(np.array([0.25, 0.75]))
    lower = s[m.edge_sheet[s] < 0]
    assert np.all(np.arctan2(pts[lower, :, 1], pts[lower, :, 0]) == -np.pi)
    upper = s[m.edge_sheet[s] > 0]
    assert np.all(np.arctan2(pts[upper, :, 1], pts[upper, :, 0]) == np.pi)


def test_cracked_refinement_doubles_slit():
    m = cracked_disk_mesh(1.0, 36)
    r = refine_uniform(m)
    assert len(_slit_edges(r)) == 2 * len(_slit_edges(m))
    assert validate(r).ok


def test_initial_cracked_mesh_size_near_target():
    h = mesh_size(cracked_disk_mesh(1.0, 36))
    assert abs(h - 0.244) / 0.244 < 0.10


def test_validate_flags_flipped_triangle():
    m = hexagon_mesh(3)
    assert validate(m).ok
    tris = m.triangles.copy()
    tris[5] = tris[5][[0, 2, 1]]
    d = validate(Mesh(m.vertices, tris, m.domain))
    assert d.orientation_violations == [5]
    assert not d.ok


def test_validate_duplicate_vertex_and_never_raises():
    m = hexagon_mesh(1)
    verts = np.vstack([m.vertices, m.vertices[:1]])
    d = validate(Mesh(verts, m.triangles, m.domain))
    assert len(d.duplicate_vertices) == 1
    assert not d.ok
    d = validate(object())
    assert d.failures


def test_wgmesh_roundtrip(tmp_path):
    m = cracked_disk_mesh(1.0, 12)
    p = tmp_path / "m.txt"
    write_wgmesh(m, p)
    assert p.read_text().splitlines()[0] == f"WGMESH v1 {m.n_vertices} {m.n_triangles}"
    r = read_wgmesh(p, m.domain)
    np.testing.assert_array_equal(r.vertices, m.vertices)
    np.testing.assert_array_equal(r.triangles, m.triangles)


def test_nested_dissection_is_permutation():
    for m in (hexagon_mesh(7), cracked_disk_mesh(1.0, 24)):
        o = nested_dissection_edges(m)
        assert np.array_equal(np.sort(o), np.arange(m.n_edges))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=12))
def test_hexagon_normals_outward(N):
    m = hexagon_mesh(N)
    b = m.boundary_edges
    t = m.edge_tris[b, 0]
    j = np.argmax(m.tri_edges[t] == b[:, None], axis=1)
    n = m.outward_normals[t, j]
    mid = m.vertices[m.edges[b]].mean(axis=1)
    assert np.all(np.einsum("ij,ij->i", n, mid) > 0)
