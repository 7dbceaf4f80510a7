"""Monte-Carlo estimates from reflected and absorbed Brownian motion.

The walks have generator ``Delta`` (not ``Delta / 2``), so each coordinate
increment over a step ``dt`` is normal with variance ``2 dt``.

Paths are simulated in fixed blocks of ``BLOCK_SIZE``; block ``b`` draws from
a Philox stream keyed by ``(seed, b)``.  The block layout does not depend on
the number of worker threads, so estimates are bit-identical for any
``threads`` value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .grid import GridDomain
from .pde_verify import EigenPair, Lemma1Report, argmax_cell, lemma1_rhs, neumann_eigenpair

__all__ = [
    "WalkConfig",
    "McEstimate",
    "reflected_positions_rectangle",
    "reflected_expectation_rectangle",
    "absorption_steps",
    "absorbed_survival",
    "survival_curve",
    "lemma1_mc",
    "fold",
]

BLOCK_SIZE = 16384
MIN_REPORT_PATHS = 1000


@dataclass(frozen=True)
class WalkConfig:
    n_paths: int
    dt: float
    seed: int
    t: float

    def __post_init__(self):
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise DomainError(f"n_paths must be a positive integer, got {self.n_paths!r}")
        if not (self.t > 0 and math.isfinite(self.t)):
            raise DomainError(f"horizon must be positive, got {self.t!r}")
        if not (0 < self.dt <= self.t):
            raise DomainError(f"time step must lie in (0, t], got {self.dt!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t / self.dt)))

    @property
    def step(self) -> float:
        return self.t / self.n_steps

    @property
    def reportable(self) -> bool:
        """Resolution required for published estimates."""
        return self.dt <= self.t / 16 and self.n_paths >= MIN_REPORT_PATHS


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_effective: int


def _generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(block << 64) | int(seed)))


def _run_blocks(fn, cfg: WalkConfig, threads: int) -> np.ndarray:
    """Apply ``fn(rng, n)`` to every block and concatenate in block order."""
    sizes = [min(BLOCK_SIZE, cfg.n_paths - start) for start in range(0, cfg.n_paths, BLOCK_SIZE)]
    jobs = [(b, n) for b, n in enumerate(sizes)]
    work = lambda job: fn(_generator(cfg.seed, job[0]), job[1])  # noqa: E731
    if threads <= 1:
        parts = [work(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, jobs))
    return np.concatenate(parts)


def _estimate(values: np.ndarray) -> McEstimate:
    n = len(values)
    std = float(values.std(ddof=1)) if n > 1 else 0.0
    return McEstimate(float(values.mean()), std / math.sqrt(n), n)


def fold(x: np.ndarray, length: float) -> np.ndarray:
    """Reflection map of the real line onto ``[0, length]``."""
    y = np.mod(x, 2.0 * length)
    return np.where(y > length, 2.0 * length - y, y)


def reflected_positions_rectangle(a: float, b: float, x0, cfg: WalkConfig, threads: int = 1) -> np.ndarray:
    """Final positions (n_paths x 2) of reflected Brownian motion in ``(0,a) x (0,b)``."""
    x0 = np.asarray(x0, dtype=float)
    if not (0 < x0[0] < a and 0 < x0[1] < b):
        raise DomainError(f"start point {tuple(x0)} is not inside (0,{a}) x (0,{b})")
    scale = math.sqrt(2.0 * cfg.step)
    sides = np.array([a, b])

    def block(rng: np.random.Generator, n: int) -> np.ndarray:
        pos = np.tile(x0, (n, 1))
        for _ in range(cfg.n_steps):
            pos = fold(pos + scale * rng.standard_normal((n, 2)), sides)
        return pos

    return _run_blocks(block, cfg, threads)


def reflected_expectation_rectangle(a: float, b: float, x0, cfg: WalkConfig, threads: int = 1) -> McEstimate:
    """Monte-Carlo ``E u(w(t))`` for ``u(x, y) = cos(pi x / a)``.

    The exact value is ``exp(-pi^2 t / a^2) cos(pi x0 / a)``.
    """
    pos = reflected_positions_rectangle(a, b, x0, cfg, threads)
    return _estimate(np.cos(math.pi * pos[:, 0] / a))


def _check_cell(dom: GridDomain, x0) -> tuple[int, int]:
    r, c = int(x0[0]), int(x0[1])
    if not (0 <= r < dom.shape[0] and 0 <= c < dom.shape[1]) or not dom.mask[r, c]:
        raise DomainError(f"start cell {(r, c)} is not inside the domain")
    return r, c


def absorption_steps(dom: GridDomain, x0, cfg: WalkConfig, threads: int = 1) -> np.ndarray:
    """Index of the first step landing in an outside cell, per path.

    Paths that survive all ``cfg.n_steps`` steps get ``n_steps + 1``.
    Crossings between step endpoints are not detected, which biases
    survival upward by ``O(sqrt(dt))``.
    """
    r0, c0 = _check_cell(dom, x0)
    h = dom.h
    start = np.array([(c0 + 0.5) * h, (r0 + 0.5) * h])
    scale = math.sqrt(2.0 * cfg.step)
    padded = np.pad(dom.mask, 1)
    n_steps = cfg.n_steps

    def block(rng: np.random.Generator, n: int) -> np.ndarray:
        absorbed_at = np.full(n, n_steps + 1, dtype=np.int64)
        alive = np.arange(n)
        # positions in cell units, shifted by the one-cell padding
        pos = np.tile(start / h + 1.0, (n, 1))
        for k in range(1, n_steps + 1):
            pos += scale / h * rng.standard_normal((alive.size, 2))
            cell = pos.astype(np.int64)
            np.clip(cell, 0, (padded.shape[1] - 1, padded.shape[0] - 1), out=cell)
            out = ~padded[cell[:, 1], cell[:, 0]]
            if out.any():
                absorbed_at[alive[out]] = k
                keep = ~out
                alive, pos = alive[keep], pos[keep]
                if alive.size == 0:
                    break
        return absorbed_at

    return _run_blocks(block, cfg, threads)


def absorbed_survival(dom: GridDomain, x0, cfg: WalkConfig, threads: int = 1) -> McEstimate:
    """Fraction of absorbed walks from cell ``x0`` still alive at ``cfg.t``."""
    steps = absorption_steps(dom, x0, cfg, threads)
    return _estimate((steps > cfg.n_steps).astype(float))


def survival_curve(dom: GridDomain, x0, cfg: WalkConfig, times, threads: int = 1) -> list[McEstimate]:
    """Survival at several horizons ``<= cfg.t`` from one set of paths."""
    steps = absorption_steps(dom, x0, cfg, threads)
    out = []
    for t in times:
        if not 0 < t <= cfg.t * (1 + 1e-12):
            raise DomainError(f"horizon {t} outside (0, {cfg.t}]")
        k = int(math.floor(t / cfg.step + 1e-9))
        out.append(_estimate((steps > k).astype(float)))
    return out


def lemma1_mc(
    dom: GridDomain, t: float, cfg: WalkConfig, neumann: EigenPair | None = None, threads: int = 1
) -> Lemma1Report:
    """Survival inequality with the survival probability sampled by walks.

    ``std_error`` is that of ``rhs``, i.e. ``e^(mu t) (1 - ratio)`` times the
    standard error of the survival estimate.
    """
    neumann = neumann or neumann_eigenpair(dom)
    u = neumann.field
    x0 = argmax_cell(dom, u)
    boundary_ratio = float(u[dom.boundary[dom.mask]].max() / u.max())
    est = absorbed_survival(dom, x0, replace(cfg, t=t), threads)
    rhs = lemma1_rhs(neumann.eigenvalue, t, est.mean, boundary_ratio)
    std = math.exp(neumann.eigenvalue * t) * (1.0 - boundary_ratio) * est.std_error
    return Lemma1Report(float(t), est.mean, rhs, rhs - 1.0, std)
