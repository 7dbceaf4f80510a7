"""Independent reference computations used by the tests.

Nothing here calls into the code under test except for plain data types.
"""

import math

import mpmath
import numpy as np


def bound_constant(d, beta, M, alpha):
    """(E - K) / (1 - K) straight from the definition."""
    k = (4.0 * (1.0 - beta) * math.pi * alpha) ** (-d / 2.0)
    e = math.exp(M * alpha)
    return (e - k) / (1.0 - k)


def grid_scan_minimum(d, beta, M, step=1e-4, span=2.0, fine_step=1e-7):
    """Brute-force minimum of the bound over a uniform alpha grid.

    A uniform pass of width ``span`` above the feasibility edge, then a
    second uniform pass of ``fine_step`` around the best coarse point.
    """
    edge = 1.0 / (4.0 * math.pi * (1.0 - beta))
    alphas = edge + np.arange(1, int(span / step) + 1) * step
    values = [bound_constant(d, beta, M, a) for a in alphas]
    k = int(np.argmin(values))
    lo = alphas[k - 1] if k > 0 else edge + fine_step
    hi = alphas[min(k + 1, len(alphas) - 1)]
    fine = np.arange(lo, hi, fine_step)
    fine = fine[fine > edge]
    fine_values = [bound_constant(d, beta, M, a) for a in fine]
    j = int(np.argmin(fine_values))
    return float(fine[j]), float(fine_values[j])


def bessel_j(nu, x):
    return float(mpmath.besselj(nu, x))


def bessel_zero(nu):
    return float(mpmath.besseljzero(nu, 1))


def neumann_ball_root(d):
    """First positive zero of d/dx [x^(1-d/2) J_{d/2}(x)] by mpmath."""
    mpmath.mp.dps = 30
    nu = mpmath.mpf(d) / 2
    f = lambda x: mpmath.diff(lambda s: s ** (1 - nu) * mpmath.besselj(nu, s), x)
    root = mpmath.findroot(f, (mpmath.sqrt(d + mpmath.mpf(8) / (d + 6)), mpmath.sqrt(d + 2)), solver="anderson")
    mpmath.mp.dps = 15
    return float(root)


def square_survival(t, terms=401):
    """Survival from the center of the unit square, product of 1-D series."""
    n = np.arange(1, terms, 2)
    one_d = np.sum(4.0 / (n * math.pi) * np.sin(n * math.pi / 2.0) * np.exp(-(n**2) * math.pi**2 * t))
    return float(one_d**2)


def count_holes(mask):
    """Number of bounded components of the complement (4-connected)."""
    from collections import deque

    padded = np.pad(~np.asarray(mask, dtype=bool), 1, constant_values=True)
    seen = np.zeros_like(padded)
    rows, cols = padded.shape
    components = 0
    for r in range(rows):
        for c in range(cols):
            if padded[r, c] and not seen[r, c]:
                components += 1
                queue = deque([(r, c)])
                seen[r, c] = True
                while queue:
                    i, j = queue.popleft()
                    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                        a, b = i + di, j + dj
                        if 0 <= a < rows and 0 <= b < cols and padded[a, b] and not seen[a, b]:
                            seen[a, b] = True
                            queue.append((a, b))
    return components - 1
