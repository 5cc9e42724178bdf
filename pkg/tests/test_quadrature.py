from fractions import Fraction
from itertools import product
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wghelmholtz.quadrature import edge_quadrature, triangle_quadrature


def exact_monomial(a, b):
    """Integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!."""
    return Fraction(factorial(a) * factorial(b), factorial(a + b + 2))


def integrate(rule, a, b):
    x, y = rule.points[:, 1], rule.points[:, 2]
    return float(np.sum(rule.weights * x ** a * y ** b))


@pytest.mark.parametrize("degree", [2, 5, 8, 10])
def test_triangle_exact_on_monomials(degree):
    rule = triangle_quadrature(degree)
    assert rule.weights.sum() == pytest.approx(0.5, abs=1e-15)
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            ref = float(exact_monomial(a, b))
            assert integrate(rule, a, b) == pytest.approx(ref, rel=1e-13, abs=1e-16)


def test_triangle_examples():
    assert integrate(triangle_quadrature(5), 2, 2) == pytest.approx(1 / 180, rel=1e-14)
    ref = float(exact_monomial(4, 4))
    assert abs(integrate(triangle_quadrature(8), 4, 4) - ref) <= 1e-14
    # a degree-2 rule is not exact for degree 3 in general
    assert integrate(triangle_quadrature(2), 3, 0) != pytest.approx(float(exact_monomial(3, 0)),
                                                                    rel=1e-6)


def test_triangle_points_inside():
    for d in (2, 5, 8):
        p = triangle_quadrature(d).points
        assert np.all(p > 0) and np.allclose(p.sum(axis=1), 1.0)


def test_unsupported_degree():
    with pytest.raises(ValueError):
        triangle_quadrature(3)
    with pytest.raises(ValueError):
        edge_quadrature(0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_edge_gauss(n):
    r = edge_quadrature(n)
    assert r.weights.sum() == pytest.approx(1.0, abs=1e-15)
    for p in range(2 * n):
        assert np.sum(r.weights * r.points ** p) == pytest.approx(1 / (p + 1), rel=1e-14)


def test_edge_examples():
    assert np.sum(edge_quadrature(2).weights * edge_quadrature(2).points ** 3) == \
        pytest.approx(0.25, rel=1e-15)
    r = edge_quadrature(4)
    assert np.sum(r.weights * r.points ** 7) == pytest.approx(1 / 8, rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6),
       st.integers(0, 4), st.integers(0, 4))
def test_affine_mapped_triangles(coords, a, b):
    """Physical-triangle integrals of x^a y^b against an exact Fraction oracle."""
    P = np.array(coords).reshape(3, 2)
    J = np.array([P[1] - P[0], P[2] - P[0]]).T
    det = np.linalg.det(J)
    if abs(det) < 1e-2:
        return
    rule = triangle_quadrature(8)
    X = rule.points @ P
    val = abs(det) * np.sum(rule.weights * X[:, 0] ** a * X[:, 1] ** b)
    # exact: expand (p0 + J s)^a (..)^b in reference monomials
    Pf = [[Fraction(v) for v in row] for row in P]
    Jf = [[Pf[1][0] - Pf[0][0], Pf[2][0] - Pf[0][0]], [Pf[1][1] - Pf[0][1], Pf[2][1] - Pf[0][1]]]

    def poly_pow(c0, cs, cr, n):
        # (c0 + cs s + cr r)^n as dict {(i, j): coeff}
        out = {(0, 0): Fraction(1)}
        for _ in range(n):
            nxt = {}
            for (i, j), v in out.items():
                for (di, dj, c) in ((0, 0, c0), (1, 0, cs), (0, 1, cr)):
                    nxt[(i + di, j + dj)] = nxt.get((i + di, j + dj), 0) + v * c
            out = nxt
        return out

    px = poly_pow(Pf[0][0], Jf[0][0], Jf[0][1], a)
    py = poly_pow(Pf[0][1], Jf[1][0], Jf[1][1], b)
    total = Fraction(0)
    for ((i1, j1), v1), ((i2, j2), v2) in product(px.items(), py.items()):
        total += v1 * v2 * exact_monomial(i1 + i2, j1 + j2)
    ref = float(abs(Jf[0][0] * Jf[1][1] - Jf[0][1] * Jf[1][0]) * total)
    assert val == pytest.approx(ref, rel=1e-12, abs=1e-12 * max(1.0, abs(ref)))
