"""Dimension-dependent constants entering the Hot Spots bound.

For a domain ``D`` in ``R^d`` the argument needs

* ``alpha_d = (p_{d/2,1} / j_{d/2-1,1})^2``, the best constant in
  ``mu_1 <= alpha_d * lambda_1`` (Faber-Krahn plus Szego-Weinberger),
* ``c_d``, the volume of the unit ball,
* ``M_d = c_d^(2/d) p_{d/2,1}^2``, the scale-free Szego-Weinberger bound on
  ``mu_1 |D|^(2/d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericalFailure
from .specfun import first_bessel_zero, log_gamma, neumann_ball_root

__all__ = [
    "MAX_DIMENSION",
    "DimensionConstants",
    "ball_volume",
    "log_ball_volume",
    "dimension_constants",
    "sw_dimensionless_limit",
    "sw_sequence",
    "closed_form_ratio_bound",
    "rayleigh_upper_check",
]

MAX_DIMENSION = 500
PLANAR_RATIO_BOUND = 0.587


def _check_dimension(d: int, dmax: int = MAX_DIMENSION) -> int:
    if isinstance(d, bool) or int(d) != d or not 2 <= d <= dmax:
        raise DomainError(f"dimension must be an integer in [2, {dmax}], got {d!r}")
    return int(d)


@dataclass(frozen=True)
class DimensionConstants:
    d: int
    p_sq: float
    j_first: float
    alpha_d: float
    ball_volume: float
    sw_coeff: float
    alpha_d_closed_form: float


def log_ball_volume(d: int) -> float:
    d = _check_dimension(d)
    return 0.5 * d * math.log(math.pi) - log_gamma(0.5 * d + 1.0)


def ball_volume(d: int) -> float:
    """Volume ``pi^(d/2) / Gamma(d/2 + 1)`` of the unit ball in ``R^d``.

    Falls into the subnormal range for ``d >= 436``; use
    :func:`log_ball_volume` there.
    """
    return math.exp(log_ball_volume(d))


def closed_form_ratio_bound(d: int) -> float:
    """``min{0.587, (d+2) / (d/2 - 2/d)^2}``; for ``d = 2`` just 0.587."""
    d = _check_dimension(d)
    if d == 2:
        return PLANAR_RATIO_BOUND
    return min(PLANAR_RATIO_BOUND, (d + 2.0) / (0.5 * d - 2.0 / d) ** 2)


@lru_cache(maxsize=None)
def dimension_constants(d: int) -> DimensionConstants:
    d = _check_dimension(d)
    p = neumann_ball_root(d).value
    j = first_bessel_zero(0.5 * d - 1.0).value
    p_sq = p * p
    log_volume = log_ball_volume(d)
    return DimensionConstants(
        d=d,
        p_sq=p_sq,
        j_first=j,
        alpha_d=(p / j) ** 2,
        ball_volume=math.exp(log_volume),
        sw_coeff=math.exp(2.0 / d * log_volume) * p_sq,
        alpha_d_closed_form=closed_form_ratio_bound(d),
    )


def sw_dimensionless_limit() -> float:
    """Limit ``2 e pi`` of ``pi (d+2) / Gamma(d/2+1)^(2/d)`` as ``d -> inf``."""
    return 2.0 * math.e * math.pi


def sw_sequence(d: int) -> float:
    """``pi (d+2) / Gamma(d/2+1)^(2/d)``, i.e. ``c_d^(2/d) (d+2)``."""
    d = _check_dimension(d)
    return math.pi * (d + 2.0) * math.exp(-2.0 / d * log_gamma(0.5 * d + 1.0))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _gauss_legendre(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    return half * float(np.dot(_GL_WEIGHTS, f(0.5 * (a + b) + half * _GL_NODES)))


def _adaptive_quad(f, a: float, b: float, rtol: float = 1e-13, max_depth: int = 40) -> float:
    """Adaptive composite 20-point Gauss-Legendre on ``[a, b]``."""
    whole = _gauss_legendre(f, a, b)
    total_scale = abs(whole)

    def refine(a: float, b: float, whole: float, depth: int) -> float:
        mid = 0.5 * (a + b)
        left, right = _gauss_legendre(f, a, mid), _gauss_legendre(f, mid, b)
        if abs(left + right - whole) <= rtol * total_scale:
            return left + right
        if depth >= max_depth:
            raise NumericalFailure(f"quadrature did not converge on [{a}, {b}]")
        return refine(a, mid, left, depth + 1) + refine(mid, b, right, depth + 1)

    return refine(a, b, whole, 0)


def rayleigh_upper_check(d: int) -> float:
    """Rayleigh quotient of ``f(x) = x_1`` on the unit ball of ``R^d``.

    Reduces by Fubini to
    ``int (1-t^2)^((d-1)/2) dt / int (1-t^2)^((d-1)/2) t^2 dt`` over
    ``[-1, 1]``, which equals ``d + 2`` and therefore bounds ``p_{d/2,1}^2``.
    With ``t = sin(theta)`` the integrands become ``cos^d`` and
    ``cos^d sin^2``, smooth on ``[-pi/2, pi/2]``.
    """
    d = _check_dimension(d, dmax=200)
    gradient = _adaptive_quad(lambda th: np.cos(th) ** d, -0.5 * math.pi, 0.5 * math.pi)
    mass = _adaptive_quad(lambda th: np.cos(th) ** d * np.sin(th) ** 2, -0.5 * math.pi, 0.5 * math.pi)
    return gradient / mass
