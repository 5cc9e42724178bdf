"""
Bessel functions of the first kind and the Gamma function.

``bessel_j0``/``bessel_j1`` and large-argument ``bessel_j_nu`` delegate to
:mod:`scipy.special`; fractional orders at moderate arguments (the range the
cracked-disk benchmark needs) are summed from the ascending series.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "SeriesControl",
    "SeriesConvergenceError",
    "bessel_j0",
    "bessel_j1",
    "bessel_j_nu",
    "gamma_fn",
]

# beyond this argument the alternating series loses more than ~1e-13
SERIES_MAX_X = 8.0


class SeriesConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-14
    max_terms: int = 200

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 10:
            raise ValueError("max_terms must be at least 10")


def bessel_j0(x):
    return special.j0(x)


def bessel_j1(x):
    return special.j1(x)


def gamma_fn(x):
    """Gamma function for positive arguments."""
    if np.ndim(x) == 0:
        return math.gamma(float(x))
    return special.gamma(np.asarray(x, dtype=float))


def _jv_series(nu, x, ctl):
    half = 0.5 * x
    # log form keeps (x/2)^nu accurate for subnormal x, where x/2 underflows
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.exp(nu * (np.log(x) - math.log(2.0)) - special.gammaln(nu + 1.0))
    term = np.where(x > 0, lead, 1.0 if nu == 0 else 0.0)
    total = term.copy()
    q = -half * half
    for m in range(1, ctl.max_terms + 1):
        term = term * q / (m * (nu + m))
        total = total + term
        if np.all(np.abs(term) <= ctl.rel_tol * np.abs(total)) and m > half.max():
            return total
    raise SeriesConvergenceError(
        f"J_{nu} series not converged after {ctl.max_terms} terms")


def bessel_j_nu(nu, x, ctl=None):
    """J_nu(x) for real ``nu >= 0`` and ``x >= 0``."""
    ctl = ctl or SeriesControl()
    nu = float(nu)
    if nu < 0:
        raise ValueError("negative orders are not supported")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if np.any(xa < 0):
        raise ValueError("negative arguments are not supported")
    out = np.empty_like(xa)
    small = xa <= SERIES_MAX_X
    if np.any(small):
        out[small] = _jv_series(nu, xa[small], ctl)
    if np.any(~small):
        out[~small] = special.jv(nu, xa[~small])
    return out[0] if scalar else out
