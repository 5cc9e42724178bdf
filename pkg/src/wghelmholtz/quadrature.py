"""Quadrature rules on the reference triangle and the unit interval."""
from dataclasses import dataclass

import numpy as np

__all__ = ["QuadRule", "triangle_quadrature", "edge_quadrature"]


@dataclass(frozen=True)
class QuadRule:
    """Points and weights of a quadrature rule.

    For triangle rules ``points`` holds barycentric coordinates (n, 3) on the
    reference triangle conv{(0,0), (1,0), (0,1)} and the weights sum to 1/2.
    For edge rules ``points`` holds parameters in [0, 1] and the weights
    sum to 1.
    """

    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __len__(self):
        return len(self.weights)


def _radon7():
    s = np.sqrt(15.0)
    a1, a2 = (6.0 - s) / 21.0, (6.0 + s) / 21.0
    w1, w2 = (155.0 - s) / 1200.0, (155.0 + s) / 1200.0
    xy = [(1 / 3, 1 / 3),
          (a1, a1), (1 - 2 * a1, a1), (a1, 1 - 2 * a1),
          (a2, a2), (1 - 2 * a2, a2), (a2, 1 - 2 * a2)]
    w = [9 / 40] + [w1] * 3 + [w2] * 3
    return np.array(xy), 0.5 * np.array(w)


def _collapsed_gauss(n):
    # Duffy map of an n x n Gauss-Legendre product rule; exact to degree 2n - 2
    g, w = np.polynomial.legendre.leggauss(n)
    u, wu = 0.5 * (g + 1.0), 0.5 * w
    U, V = np.meshgrid(u, u, indexing="ij")
    WU, WV = np.meshgrid(wu, wu, indexing="ij")
    x = U.ravel()
    y = (V * (1.0 - U)).ravel()
    return np.stack([x, y], axis=1), (WU * WV * (1.0 - U)).ravel()


_TRIANGLE_CACHE = {}


def triangle_quadrature(degree):
    """Rule on the reference triangle exact for polynomials of total ``degree``.

    Supported degrees are 2 (3 points), 5 (7-point Radon rule) and 8
    (25-point collapsed Gauss rule).  Higher degrees use collapsed Gauss
    rules as well.
    """
    degree = int(degree)
    if degree in _TRIANGLE_CACHE:
        return _TRIANGLE_CACHE[degree]
    if degree == 2:
        xy = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
        w = np.full(3, 1 / 6)
    elif degree == 5:
        xy, w = _radon7()
    elif degree == 8 or degree > 8:
        xy, w = _collapsed_gauss((degree + 3) // 2)
    else:
        raise ValueError(f"unsupported triangle quadrature degree {degree}")
    bary = np.column_stack([1.0 - xy[:, 0] - xy[:, 1], xy[:, 0], xy[:, 1]])
    rule = QuadRule(bary, w, degree)
    _TRIANGLE_CACHE[degree] = rule
    return rule


def edge_quadrature(n_points):
    """Gauss-Legendre rule on [0, 1], exact to degree ``2 * n_points - 1``."""
    n_points = int(n_points)
    if n_points < 1 or n_points > 20:
        raise ValueError(f"unsupported edge rule with {n_points} points")
    g, w = np.polynomial.legendre.leggauss(n_points)
    return QuadRule(0.5 * (g + 1.0), 0.5 * w, 2 * n_points - 1)
