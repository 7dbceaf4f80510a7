"""Bessel functions of real order and their first positive roots.

Only what the eigenvalue constants need: ``J_nu`` on ``[0, 2(nu + 10)]`` via
the ascending series, the first zero ``j_{nu,1}``, and the first root
``p_{d/2,1}`` of ``d/dx [x^(1-d/2) J_{d/2}(x)]``, which is the square root of
the first nontrivial Neumann eigenvalue of the unit ball in ``R^d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

from .errors import DomainError, NumericalFailure, RangeError

__all__ = [
    "RootResult",
    "log_gamma",
    "bessel_j",
    "first_bessel_zero",
    "neumann_ball_root",
    "neumann_root_function",
]

# above this order the prefactor (x/2)^nu / Gamma(nu+1) is formed in log space
_LOG_SPACE_ORDER = 30.0
_SCAN_STEP = 0.1
_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class RootResult:
    """A bracketed root with its normalized residual."""

    value: float
    bracket_lo: float
    bracket_hi: float
    residual: float
    iterations: int


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or nu < 0:
        raise DomainError(f"Bessel order must be finite and nonnegative, got {nu!r}")
    return nu


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"log_gamma requires a positive finite argument, got {x!r}")
    return math.lgamma(x)


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind ``J_nu(x)`` from its power series.

    The alternating sum is accumulated in decimal arithmetic with enough
    guard digits to absorb the cancellation (at most ``x / ln 10`` digits),
    so the absolute error stays near double rounding on the whole supported
    range ``0 <= x <= 2 (nu + 10)``.
    """
    nu = _check_order(nu)
    x = float(x)
    if not math.isfinite(x) or x < 0 or x > 2.0 * (nu + 10.0):
        raise RangeError(f"x={x!r} outside supported range [0, {2.0 * (nu + 10.0)}] for nu={nu}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0

    prec = 30 + int(x / math.log(10.0))
    with localcontext() as ctx:
        ctx.prec = prec
        y = (Decimal(x) / 2) ** 2
        dnu = Decimal(nu)
        term = Decimal(1)
        total = Decimal(1)
        eps = Decimal(10) ** (-prec)
        m = 0
        while True:
            m += 1
            term = -term * y / (m * (m + dnu))
            total += term
            # terms shrink monotonically once m(m+nu) exceeds y
            if m * (m + nu) > float(y) and abs(term) <= eps * max(abs(total), eps):
                break
            if m > 10000:
                raise NumericalFailure(f"Bessel series did not converge for nu={nu}, x={x}")

        if nu > _LOG_SPACE_ORDER:
            log_pref = nu * math.log(x / 2.0) - log_gamma(nu + 1.0)
            value = total * Decimal(log_pref).exp()
        else:
            value = total * Decimal((x / 2.0) ** nu / math.gamma(nu + 1.0))
        return float(value)


def _bisect(f, lo: float, hi: float, f_lo: float, f_hi: float) -> tuple[float, int]:
    """Bisection to machine bracket width followed by one secant step."""
    iterations = 0
    while iterations < 200:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        iterations += 1
        if f_mid == 0.0:
            return mid, iterations
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    if f_hi != f_lo:
        root = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        if lo <= root <= hi:
            return root, iterations
    return (lo if abs(f_lo) <= abs(f_hi) else hi), iterations


def first_bessel_zero(nu: float) -> RootResult:
    """Smallest positive zero ``j_{nu,1}`` of ``J_nu``.

    The scan starts at ``sqrt(nu (nu + 2))``, a lower bound for the zero, and
    walks upward in steps of 0.1 until ``J_nu`` changes sign.
    """
    nu = _check_order(nu)
    start = math.sqrt(nu * (nu + 2.0)) if nu > 0 else _SCAN_STEP
    f = lambda x: bessel_j(nu, x)  # noqa: E731

    lo, f_lo = start, f(start)
    limit = 2.0 * (nu + 10.0)
    while True:
        hi = lo + _SCAN_STEP
        if hi > limit:
            raise NumericalFailure(f"no sign change of J_{nu} on [{start}, {limit}]")
        f_hi = f(hi)
        if (f_hi > 0) != (f_lo > 0) or f_hi == 0.0:
            break
        lo, f_lo = hi, f_hi

    root, iterations = _bisect(f, lo, hi, f_lo, f_hi)
    residual = f(root)
    if abs(residual) > _RESIDUAL_TOL:
        raise NumericalFailure(f"j_({nu},1) residual {residual:.3e} above tolerance")
    return RootResult(root, start, hi, residual, iterations)


def neumann_root_function(d: int, x: float) -> float:
    """Normalized ``x J_{d/2-1}(x) - (d-1) J_{d/2}(x)``.

    Its zeros are those of ``d/dx [x^(1-d/2) J_{d/2}(x)]`` for ``x > 0``.
    """
    lead = x * bessel_j(d / 2.0 - 1.0, x)
    g = lead - (d - 1) * bessel_j(d / 2.0, x)
    return g / max(1.0, abs(lead))


def neumann_ball_root(d: int) -> RootResult:
    """First positive root ``p_{d/2,1}`` bracketed by the Lorch-Szego bounds.

    ``d + 8/(d+6) < p^2 < d + 2`` for every ``d >= 2``.
    """
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    lo = math.sqrt(d + 8.0 / (d + 6.0))
    hi = math.sqrt(d + 2.0)
    f = lambda x: neumann_root_function(d, x)  # noqa: E731
    f_lo, f_hi = f(lo), f(hi)
    if (f_lo > 0) == (f_hi > 0):
        raise NumericalFailure(f"no sign change of the ball Neumann condition on [{lo}, {hi}] for d={d}")
    root, iterations = _bisect(f, lo, hi, f_lo, f_hi)
    residual = f(root)
    if abs(residual) > _RESIDUAL_TOL:
        raise NumericalFailure(f"p_(d/2,1) residual {residual:.3e} above tolerance for d={d}")
    return RootResult(root, lo, hi, residual, iterations)
