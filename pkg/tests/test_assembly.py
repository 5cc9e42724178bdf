import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp

from wghelmholtz.assembly import (BoundaryCondition, LinearSystem, SolveOptions, SolverError,
                                  assemble, residual, solve, write_matrix_market)
from wghelmholtz.mesh import disk_mesh, hexagon_mesh
from wghelmholtz.problems import case_convex
from wghelmholtz.wg import WGSpace, local_stiffness, project_Qh


def zero(x, y, *rest):
    return np.zeros(np.shape(x), dtype=complex)


def poly_case(order, k_wave, rng):
    """Polynomial u reproduced exactly by the scheme: affine for P0, quadratic for P1."""
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    if order == 0:
        c[3:] = 0

    def u(x, y):
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y

    def grad(x, y):
        return c[1] + 2 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2 * c[5] * y

    lap = 2 * c[3] + 2 * c[5]

    def f(x, y):
        return -lap - k_wave ** 2 * u(x, y)

    def g_robin(x, y, nx, ny):
        gx, gy = grad(x, y)
        return gx * nx + gy * ny + 1j * k_wave * u(x, y)

    return u, f, g_robin


def test_dimension_small_hexagon():
    V = WGSpace(hexagon_mesh(2), 0)
    sysm = assemble(V, 1.0, 1.0, zero, BoundaryCondition.robin(zero))
    assert sysm.n == 66
    assert sysm.A.shape == (66, 66)
    V1 = WGSpace(hexagon_mesh(2), 1)
    assert assemble(V1, 1.0, 1.0, zero, BoundaryCondition.robin(zero)).n == 24 * 3 + 42 * 2


@pytest.mark.parametrize("order", [0, 1])
@pytest.mark.parametrize("bc", ["robin", "dirichlet"])
def test_complex_symmetric(order, bc):
    case = case_convex(5.0)
    V = WGSpace(hexagon_mesh(4), order)
    g = case.bc.g if bc == "robin" else case.exact
    sysm = assemble(V, 1.0, 5.0, case.f, BoundaryCondition(bc, g))
    A = sysm.A
    assert abs(A - A.T).max() <= 1e-14 * abs(A).max()
    # not Hermitian once the Robin term is present
    if bc == "robin":
        assert abs(A - A.conj().T).max() > 1e-3


def test_homogeneous_data_gives_zero():
    V = WGSpace(hexagon_mesh(3), 1)
    uh, rep = solve(assemble(V, 1.0, 2.0, zero, BoundaryCondition.robin(zero)))
    assert np.all(uh.dofs == 0)
    assert rep.relative_residual == 0.0


def test_dense_oracle():
    """Sparse assembly against an element-by-element dense sum."""
    V = WGSpace(hexagon_mesh(2), 1)
    k = 3.0
    d = lambda x, y: 1.0 + x * x
    sysm = assemble(V, d, k, zero, BoundaryCondition.dirichlet(zero))
    n = V.dofmap.n_total
    S = local_stiffness(V.mesh.tri_points, d, V.table, 1)
    dense = np.zeros((n, n), dtype=complex)
    nI = V.dofmap.n_tri_dofs
    for t in range(V.mesh.n_triangles):
        loc = S[t].astype(complex)
        loc[:nI, :nI] -= k * k * V.mass_interior[t]
        idx = V.local_dofs[t]
        for a in range(len(idx)):
            for b in range(len(idx)):
                dense[idx[a], idx[b]] += loc[a, b]
    free = sysm.free
    np.testing.assert_allclose(sysm.A.toarray(), dense[np.ix_(free, free)],
                               atol=1e-13 * np.abs(dense).max())


def test_hpd_at_zero_wave_number():
    for N in (2, 4, 8):
        V = WGSpace(hexagon_mesh(N), 0)
        A = assemble(V, 1.0, 0.0, zero, BoundaryCondition.dirichlet(zero)).A.toarray()
        np.testing.assert_allclose(A, A.conj().T, atol=1e-14)
        assert np.linalg.eigvalsh(A).min() > 0


@pytest.mark.parametrize("order", [0, 1])
@pytest.mark.parametrize("bc", ["robin", "dirichlet"])
@pytest.mark.parametrize("k_wave", [0.0, 3.0])
def test_polynomial_patch(order, bc, k_wave):
    if bc == "robin" and k_wave == 0.0:
        pytest.skip("pure Neumann problem is singular")
    rng = np.random.default_rng(order * 10 + int(k_wave))
    u, f, g = poly_case(order, k_wave, rng)
    m = disk_mesh(1.0, 12)
    V = WGSpace(m, order)
    cond = BoundaryCondition.robin(g) if bc == "robin" else BoundaryCondition.dirichlet(u)
    uh, rep = solve(assemble(V, 1.0, k_wave, f, cond))
    ref = project_Qh(u, V)
    assert np.abs(uh.dofs - ref.dofs).max() <= 1e-10 * np.abs(ref.dofs).max()


def test_solver_paths_agree():
    case = case_convex(8.0)
    V = WGSpace(hexagon_mesh(6), 1)
    sysm = assemble(V, 1.0, 8.0, case.f, case.bc)
    ref, _ = solve(sysm, SolveOptions(condense=False))
    for opts in (SolveOptions(), SolveOptions(permc_spec="COLAMD"),
                 SolveOptions(permc_spec="MMD_AT_PLUS_A")):
        uh, rep = solve(sysm, opts)
        assert rep.relative_residual <= 1e-10
        np.testing.assert_allclose(uh.dofs, ref.dofs, atol=1e-10 * np.abs(ref.dofs).max())


def test_dirichlet_values_imposed():
    case = case_convex(2.0)
    V = WGSpace(hexagon_mesh(4), 1)
    sysm = assemble(V, 1.0, 2.0, case.f, BoundaryCondition.dirichlet(case.exact))
    uh, _ = solve(sysm)
    assert len(sysm.free) + len(sysm.constrained) == V.dofmap.n_total
    np.testing.assert_array_equal(uh.dofs[sysm.constrained], sysm.constrained_values)


def test_residual_examples():
    V = WGSpace(hexagon_mesh(1), 0)
    n = V.dofmap.n_total
    b = np.arange(1.0, n + 1).astype(complex)
    ident = LinearSystem(sp.identity(n, dtype=complex, format="csr"), b, V, np.arange(n))
    assert residual(ident, b) == 0.0
    assert residual(ident, np.zeros(n)) == pytest.approx(1.0)
    assert residual(ident, 0.5 * b) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        residual(ident, np.zeros(n + 1))
    uh, rep = solve(ident)
    np.testing.assert_allclose(uh.dofs, b)


def test_non_finite_data_rejected():
    V = WGSpace(hexagon_mesh(2), 0)
    bad = lambda x, y: np.full(np.shape(x), np.nan)
    with pytest.raises(ValueError):
        assemble(V, 1.0, 1.0, bad, BoundaryCondition.robin(zero))
    with pytest.raises(ValueError):
        BoundaryCondition("neumann", zero)


def test_matrix_market_roundtrip(tmp_path):
    case = case_convex(1.0)
    sysm = assemble(WGSpace(hexagon_mesh(2), 0), 1.0, 1.0, case.f, case.bc)
    p = tmp_path / "A.mtx"
    write_matrix_market(sysm, p)
    B = scipy.io.mmread(p).tocsr()
    assert B.shape == (66, 66)
    np.testing.assert_allclose(B.toarray(), sysm.A.toarray(), rtol=1e-15)


def test_bicgstab_small_and_failure():
    case = case_convex(1.0)
    sysm = assemble(WGSpace(hexagon_mesh(4), 0), 1.0, 1.0, case.f, case.bc)
    ref, _ = solve(sysm)
    uh, rep = solve(sysm, SolveOptions(method="bicgstab", rtol=1e-9))
    assert rep.relative_residual <= 1e-9
    np.testing.assert_allclose(uh.dofs, ref.dofs, atol=1e-7 * np.abs(ref.dofs).max())
    with pytest.raises(SolverError):
        solve(sysm, SolveOptions(method="bicgstab", maxiter=2))
    with pytest.raises(ValueError):
        solve(sysm, SolveOptions(method="gmres"))
