"""Minimization of the heat-kernel bound over rescaled time.

With ``alpha = t |D|^(-2/d)``, ``beta = mu / lambda_1`` and ``M`` an upper
bound for ``mu |D|^(2/d)``, the inequality

    1 <= K + (E - K) * ratio,   K = (4 (1 - beta) pi alpha)^(-d/2),  E = exp(M alpha)

holds for every ``alpha`` where ``ratio = max_bd u / max_D u``.  Whenever
``K < 1`` this gives ``max_D u <= (E - K) / (1 - K) * max_bd u``; the best
constant is the minimum of that quotient over ``alpha``.

Everything is computed on the log scale so that large ``d``, ``beta`` near 1
or large ``alpha`` never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import _check_dimension, dimension_constants
from .errors import DomainError, NumericalFailure

__all__ = [
    "BoundEvaluation",
    "BoundResult",
    "evaluate",
    "log_constant",
    "optimize",
    "hot_spots_constant",
    "general_constant",
    "asymptotic_limit",
    "golden_section",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
EDGE_TOL = 1e-14
SCAN_POINTS = 1024
SCAN_SPAN = 10.0
ALPHA_TOL = 1e-10


@dataclass(frozen=True)
class BoundEvaluation:
    """The bound at one rescaled time; ``constant`` is ``inf`` when infeasible."""

    alpha: float
    survival_bound: float
    growth: float
    ratio_lower_bound: float
    constant: float
    feasible: bool


@dataclass(frozen=True)
class BoundResult:
    d: int
    beta: float
    M: float
    alpha_star: float
    constant_star: float
    feasible_from: float
    evaluations: int


def _check_params(d: int, beta: float, M: float) -> tuple[int, float, float]:
    d = _check_dimension(d)
    beta, M = float(beta), float(M)
    if not (0.0 < beta < 1.0):
        raise DomainError(f"eigenvalue ratio beta must lie in (0, 1), got {beta!r}")
    if not (M > 0.0 and math.isfinite(M)):
        raise DomainError(f"eigenvalue bound M must be positive and finite, got {M!r}")
    return d, beta, M


def _log_survival_bound(d: int, beta: float, alpha: float) -> float:
    return -0.5 * d * math.log(4.0 * (1.0 - beta) * math.pi * alpha)


def feasible_from(beta: float) -> float:
    """Rescaled time at which the survival bound ``K`` equals one."""
    return 1.0 / (4.0 * math.pi * (1.0 - beta))


def log_constant(d: int, beta: float, M: float, alpha: float) -> float:
    """``log((E - K) / (1 - K))``, or ``inf`` where ``K >= 1``."""
    log_k = _log_survival_bound(d, beta, alpha)
    if log_k >= 0.0 or -math.expm1(log_k) < EDGE_TOL:
        return math.inf
    growth = M * alpha
    return growth + math.log1p(-math.exp(log_k - growth)) - math.log1p(-math.exp(log_k))


def _dlog_constant(d: int, beta: float, M: float, alpha: float) -> float:
    """Derivative of :func:`log_constant` in ``alpha`` on the feasible side."""
    k = math.exp(_log_survival_bound(d, beta, alpha))
    growth = M * alpha
    k_over_e = math.exp(math.log(k) - growth) if k > 0 else 0.0
    inv_e_minus_k = math.exp(-growth) / (1.0 - k_over_e)
    dk = 0.5 * d * k / alpha  # equals -dK/dalpha
    return M / (1.0 - k_over_e) + dk * (inv_e_minus_k - 1.0 / (1.0 - k))


def evaluate(d: int, beta: float, M: float, alpha: float) -> BoundEvaluation:
    d, beta, M = _check_params(d, beta, M)
    alpha = float(alpha)
    if not alpha > 0.0:
        raise DomainError(f"rescaled time must be positive, got {alpha!r}")
    log_k = _log_survival_bound(d, beta, alpha)
    k = math.exp(min(log_k, 700.0))
    e = math.exp(min(M * alpha, 709.0))
    if log_k >= 0.0 or -math.expm1(log_k) < EDGE_TOL:
        return BoundEvaluation(alpha, k, e, 0.0, math.inf, False)
    constant = math.exp(min(log_constant(d, beta, M, alpha), 709.0))
    return BoundEvaluation(alpha, k, e, 1.0 / constant, constant, True)


def golden_section(f, a: float, b: float, tol: float) -> tuple[float, float, int]:
    """Shrink ``[a, b]`` around a minimum of ``f`` until ``b - a <= tol``.

    Returns the final bracket and the number of evaluations of ``f``.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evaluations = 2
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        evaluations += 1
        if evaluations > 500:
            break
    return a, b, evaluations


def optimize(d: int, beta: float, M: float) -> BoundResult:
    """Minimize the Hot Spots bound over rescaled time.

    A log-spaced scan of ``alpha - feasible_from`` over ``[1e-6 af, 10]``
    locates the best bracket without assuming unimodality; golden-section
    search narrows it, and bisection on the sign of the analytic derivative
    pins ``alpha_star`` below the resolution of function comparisons.
    """
    d, beta, M = _check_params(d, beta, M)
    edge = feasible_from(beta)
    offsets = np.geomspace(edge * 1e-6, SCAN_SPAN, SCAN_POINTS)
    alphas = [edge + float(o) for o in offsets]
    values = np.array([log_constant(d, beta, M, a) for a in alphas])
    evaluations = len(alphas)
    if not np.isfinite(values).any():
        raise NumericalFailure(f"empty feasible region for d={d}, beta={beta}, M={M}")

    best = int(np.argmin(values))
    lo = alphas[best - 1] if best > 0 else edge * (1.0 + 1e-9)
    hi = alphas[min(best + 1, len(alphas) - 1)]
    f = lambda a: log_constant(d, beta, M, a)  # noqa: E731
    lo, hi, n_golden = golden_section(f, lo, hi, ALPHA_TOL)
    evaluations += n_golden
    alpha_star = 0.5 * (lo + hi)

    # derivative polish: the minimum is a sign change of the slope
    g = lambda a: _dlog_constant(d, beta, M, a)  # noqa: E731
    width = max(1e-6 * alpha_star, 1e-9)
    a0, a1 = max(alpha_star - width, edge * (1.0 + 1e-9)), alpha_star + width
    g0, g1 = g(a0), g(a1)
    evaluations += 2
    if g0 < 0.0 < g1:
        while a1 - a0 > 4.0 * math.ulp(alpha_star):
            mid = 0.5 * (a0 + a1)
            evaluations += 1
            if g(mid) < 0.0:
                a0 = mid
            else:
                a1 = mid
        candidate = 0.5 * (a0 + a1)
        evaluations += 1
        if f(candidate) <= f(alpha_star) * (1.0 + 1e-15):
            alpha_star = candidate

    log_star = f(alpha_star)
    if log_star > 709.0:
        raise NumericalFailure(f"optimal constant exp({log_star:.6g}) overflows a double")
    constant_star = math.exp(log_star)
    return BoundResult(d, beta, M, alpha_star, constant_star, edge, evaluations)


def hot_spots_constant(d: int) -> BoundResult:
    """Uniform constant ``c(d)`` with ``max_D u <= c(d) max_bd u`` for ``mu_1``."""
    consts = dimension_constants(d)
    return optimize(consts.d, consts.alpha_d, consts.sw_coeff)


def general_constant(d: int, beta: float, M: float) -> BoundResult:
    """Constant for any Neumann eigenvalue ``mu < lambda_1``.

    ``beta = mu / lambda_1`` and ``M >= mu |D|^(2/d)`` must both be supplied.
    """
    if not float(beta) < 1.0:
        raise DomainError(f"the bound requires mu < lambda_1, got beta={beta!r}")
    return optimize(d, beta, M)


def asymptotic_limit() -> float:
    """Large-dimension limit ``e^(e/2) = sqrt(e^e)`` of the constant."""
    return math.exp(0.5 * math.e)
