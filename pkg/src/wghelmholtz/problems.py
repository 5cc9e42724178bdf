"""
Benchmark Helmholtz problems  -div(d grad u) - k^2 u = f  with known solutions.

Each case bundles the coefficient, source, boundary data, exact solution
and the domain with its initial mesh.  All functions take numpy arrays
``x, y`` and are evaluated elementwise.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .assembly import BoundaryCondition
from .mesh import DomainSpec, cracked_disk_mesh, disk_mesh, hexagon_mesh, refine_uniform
from .specfun import bessel_j0, bessel_j1, bessel_j_nu

__all__ = [
    "HelmholtzCase",
    "DielectricProfile",
    "case_convex",
    "case_nonconvex",
    "case_inhomogeneous",
    "case_pollution",
    "get_case",
    "CASE_IDS",
]

CASE_IDS = ("convex", "nonconvex-xi1", "nonconvex-xi32", "nonconvex-xi23",
            "inhomogeneous", "pollution")


@dataclass(frozen=True)
class HelmholtzCase:
    name: str
    domain: DomainSpec
    k_wave: float
    d: Union[float, Callable]
    f: Callable
    bc: BoundaryCondition
    exact: Callable
    exact_grad: Optional[Callable] = None
    extra: dict = field(default_factory=dict)

    def coefficient(self, x, y):
        if callable(self.d):
            return self.d(x, y)
        return np.full(np.shape(x), float(self.d))

    def initial_mesh(self):
        dom = self.domain
        if dom.kind == "hexagon":
            return hexagon_mesh(dom.N)
        if dom.kind == "disk":
            return disk_mesh(dom.R, dom.n_boundary)
        return cracked_disk_mesh(dom.R, dom.n_boundary)

    def meshes(self, levels):
        """Initial mesh followed by ``levels - 1`` uniform refinements."""
        m = self.initial_mesh()
        out = [m]
        for _ in range(levels - 1):
            m = refine_uniform(m)
            out.append(m)
        return out

    def with_domain(self, domain):
        return replace(self, domain=domain)


def _radius(x, y):
    return np.hypot(x, y)


# -- convex hexagon with Robin data ------------------------------------------

def case_convex(k_wave=1.0, N=2):
    """Homogeneous medium on the unit hexagon with the Robin condition.

    The boundary data is g = du/dn + i k u, the convention matching the
    +i k <ub, vb> term of the discrete scheme (u satisfies u_r + i k u = 0 on
    the unit circle).

    u = cos(kr)/k - C J0(kr),  C = e^{ik} / (k (J0(k) + i J1(k))),  f = sin(kr)/r.
    """
    k = float(k_wave)
    if k <= 0:
        raise ValueError("wave number must be positive")
    C = (np.cos(k) + 1j * np.sin(k)) / (k * (bessel_j0(k) + 1j * bessel_j1(k)))

    def exact(x, y):
        r = _radius(x, y)
        return np.cos(k * r) / k - C * bessel_j0(k * r)

    def du_dr(r):
        return -np.sin(k * r) + C * k * bessel_j1(k * r)

    def exact_grad(x, y):
        r = _radius(x, y)
        g = du_dr(r)
        rs = np.where(r > 0, r, 1.0)
        return np.where(r > 0, g * x / rs, 0.0), np.where(r > 0, g * y / rs, 0.0)

    def f(x, y):
        r = _radius(x, y)
        kr = k * r
        rs = np.where(r < 1e-8, 1.0, r)
        return np.where(r < 1e-8, k * (1.0 - kr ** 2 / 6.0 + kr ** 4 / 120.0),
                        np.sin(kr) / rs)

    def g(x, y, nx, ny):
        gx, gy = exact_grad(x, y)
        return gx * nx + gy * ny + 1j * k * exact(x, y)

    return HelmholtzCase("convex", DomainSpec.hexagon(N), k, 1.0, f,
                         BoundaryCondition.robin(g), exact, exact_grad,
                         extra={"C": C})


def case_pollution(k_wave, N=2):
    """The convex case reused for large wave numbers."""
    case = case_convex(k_wave, N)
    return replace(case, name="pollution")


# -- cracked disk, Dirichlet --------------------------------------------------

def case_nonconvex(xi=1.0, k_wave=4.0, R=1.0, n_boundary=36):
    """u = J_xi(k r) cos(xi * theta) on the disk slit along the negative x-axis.

    theta = atan2(y, x) lies in (-pi, pi]; points on the lower slit face carry
    ``y = -0.0`` so that they evaluate at theta = -pi.
    """
    xi = float(xi)
    k = float(k_wave)
    if xi <= 0 or k <= 0:
        raise ValueError("xi and the wave number must be positive")

    def exact(x, y):
        r = _radius(x, y)
        return bessel_j_nu(xi, k * r) * np.cos(xi * np.arctan2(y, x))

    def exact_grad(x, y):
        r = _radius(x, y)
        th = np.arctan2(y, x)
        kr = k * r
        J = bessel_j_nu(xi, kr)
        # J'_nu(z) = (nu / z) J_nu(z) - J_{nu+1}(z)
        krs = np.where(kr > 0, kr, 1.0)
        dJ = np.where(kr > 0, xi / krs * J, 0.0) - bessel_j_nu(xi + 1.0, kr)
        ur = k * dJ * np.cos(xi * th)
        rs = np.where(r > 0, r, 1.0)
        uth = -xi * J * np.sin(xi * th) / rs
        c, s = np.cos(th), np.sin(th)
        return ur * c - uth * s, ur * s + uth * c

    def f(x, y):
        return np.zeros(np.shape(x))

    name = {1.0: "nonconvex-xi1", 1.5: "nonconvex-xi32"}.get(xi, "nonconvex")
    if abs(xi - 2.0 / 3.0) < 1e-14:
        name = "nonconvex-xi23"
    return HelmholtzCase(name, DomainSpec.cracked_disk(R, n_boundary), k, 1.0, f,
                         BoundaryCondition.dirichlet(exact), exact, exact_grad,
                         extra={"xi": xi})


# -- inhomogeneous disk -----------------------------------------------------

@dataclass(frozen=True)
class DielectricProfile:
    """Smoothed two-material permittivity profile, d = 1/eps."""

    eps1: float = 2.0
    eps2: float = 80.0
    a: float = 1.0
    b: float = 3.0
    R: float = 5.0

    def __post_init__(self):
        if not 0 < self.a < self.b < self.R:
            raise ValueError("need 0 < a < b < R")
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("permittivities must be positive")

    def _s(self, r):
        return (self.b - r) / (self.b - self.a)

    def S(self, r):
        r = np.asarray(r, dtype=float)
        s = self._s(r)
        blend = -2.0 * s ** 3 + 3.0 * s ** 2
        return np.where(r < self.a, 1.0, np.where(r > self.b, 0.0, blend))

    def dS(self, r):
        """dS/dr, including the 1/(b - a) factor of the chain rule."""
        r = np.asarray(r, dtype=float)
        s = self._s(r)
        blend = (6.0 * s ** 2 - 6.0 * s) / (self.b - self.a)
        return np.where((r < self.a) | (r > self.b), 0.0, blend)

    def d(self, r):
        S = self.S(r)
        return S / self.eps1 + (1.0 - S) / self.eps2

    def dd(self, r):
        return (1.0 / self.eps1 - 1.0 / self.eps2) * self.dS(r)


def case_inhomogeneous(profile=None, k_wave=2.0, n_boundary=30):
    """u = J0(k r) in the medium d(r) on the disk of radius ``profile.R``."""
    p = profile or DielectricProfile()
    k = float(k_wave)

    def d(x, y):
        return p.d(_radius(x, y))

    def f(x, y):
        r = _radius(x, y)
        return k ** 2 * (p.d(r) - 1.0) * bessel_j0(k * r) + k * p.dd(r) * bessel_j1(k * r)

    def exact(x, y):
        return bessel_j0(k * _radius(x, y))

    def exact_grad(x, y):
        r = _radius(x, y)
        rs = np.where(r > 0, r, 1.0)
        g = -k * bessel_j1(k * r) / rs
        return g * x, g * y

    return HelmholtzCase("inhomogeneous", DomainSpec.disk(p.R, n_boundary), k, d, f,
                         BoundaryCondition.dirichlet(exact), exact, exact_grad,
                         extra={"profile": p})


def get_case(case_id, k_wave=None, **kwargs):
    """Build a case from its string id."""
    if case_id == "convex":
        return case_convex(k_wave or 1.0, **kwargs)
    if case_id == "pollution":
        return case_pollution(k_wave or 100.0, **kwargs)
    if case_id == "inhomogeneous":
        return case_inhomogeneous(k_wave=k_wave or 2.0, **kwargs)
    xis = {"nonconvex-xi1": 1.0, "nonconvex-xi32": 1.5, "nonconvex-xi23": 2.0 / 3.0}
    if case_id in xis:
        return case_nonconvex(xis[case_id], k_wave or 4.0, **kwargs)
    raise KeyError(f"unknown case {case_id!r}; expected one of {', '.join(CASE_IDS)}")
