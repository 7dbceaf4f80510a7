"""Rasterized planar domains and their 5-point Laplacians.

A domain is a boolean mask of cells of side ``h``; cell ``(row, col)`` has
its center at ``((col + 0.5) h, (row + 0.5) h)``.  The mask file format is::

    hotspots-mask v1
    h 0.015625
    ##########...
    ...

with ``#`` for inside cells and ``.`` for outside cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .errors import ValidationError

__all__ = [
    "GridDomain",
    "load_domain",
    "dump_domain",
    "make_domain",
    "parse_generator",
    "laplacian",
    "MASK_HEADER",
]

MASK_HEADER = "hotspots-mask v1"
MIN_EXTENT = 9

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Cell mask with spacing ``h``; validated on construction."""

    mask: np.ndarray
    h: float
    name: str = "domain"
    boundary: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2:
            raise ValidationError("mask must be two-dimensional")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValidationError(f"grid spacing must be positive, got {self.h!r}")
        if not mask.any():
            raise ValidationError("domain has no inside cells")
        rows, cols = np.nonzero(mask)
        if np.ptp(rows) + 1 < MIN_EXTENT or np.ptp(cols) + 1 < MIN_EXTENT:
            raise ValidationError(
                f"domain spans {np.ptp(rows) + 1}x{np.ptp(cols) + 1} cells; at least {MIN_EXTENT}x{MIN_EXTENT} required"
            )
        _, n_components = ndimage.label(mask, structure=_CROSS)
        if n_components != 1:
            raise ValidationError(f"domain is not 4-connected ({n_components} components)")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

        padded = np.pad(mask, 1)
        all_neighbors_in = padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
        boundary = mask & ~all_neighbors_in
        boundary.setflags(write=False)
        object.__setattr__(self, "boundary", boundary)

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    @property
    def n_cells(self) -> int:
        return int(self.mask.sum())

    @property
    def area(self) -> float:
        return self.n_cells * self.h**2

    @property
    def cell_index(self) -> np.ndarray:
        """Map from (row, col) to unknown index; -1 for outside cells."""
        index = np.full(self.mask.shape, -1, dtype=np.int64)
        index[self.mask] = np.arange(self.n_cells)
        return index

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Center coordinates ``(x, y)`` of the inside cells in unknown order."""
        rows, cols = np.nonzero(self.mask)
        return (cols + 0.5) * self.h, (rows + 0.5) * self.h

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        return int(math.floor(y / self.h)), int(math.floor(x / self.h))

    def center_cell(self) -> tuple[int, int]:
        """Inside cell closest to the centroid of the bounding box."""
        ny, nx = self.mask.shape
        return self.nearest_inside_cell(0.5 * nx * self.h, 0.5 * ny * self.h)

    def nearest_inside_cell(self, x: float, y: float) -> tuple[int, int]:
        rows, cols = np.nonzero(self.mask)
        dist = ((cols + 0.5) * self.h - x) ** 2 + ((rows + 0.5) * self.h - y) ** 2
        k = int(np.argmin(dist))
        return int(rows[k]), int(cols[k])


def load_domain(text: str, name: str = "file") -> GridDomain:
    """Parse a mask file; errors name the offending line."""
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].strip() != MASK_HEADER:
        raise ValidationError(f"line 1: expected header '{MASK_HEADER}'")
    if len(lines) < 2:
        raise ValidationError("line 2: missing grid spacing")
    parts = lines[1].split()
    if len(parts) != 2 or parts[0] != "h":
        raise ValidationError("line 2: expected 'h <positive decimal>'")
    try:
        h = float(parts[1])
    except ValueError:
        raise ValidationError(f"line 2: cannot parse grid spacing {parts[1]!r}") from None
    if not (h > 0 and math.isfinite(h)):
        raise ValidationError(f"line 2: grid spacing must be positive, got {parts[1]!r}")

    rows = [line.rstrip() for line in lines[2:]]
    if not rows:
        raise ValidationError("line 3: no mask rows")
    width = len(rows[0])
    for k, row in enumerate(rows, start=3):
        if len(row) != width:
            raise ValidationError(f"line {k}: row length {len(row)} differs from {width}")
        bad = set(row) - {"#", "."}
        if bad:
            raise ValidationError(f"line {k}: unexpected characters {''.join(sorted(bad))!r}")
    mask = np.array([[c == "#" for c in row] for row in rows], dtype=bool)
    return GridDomain(mask, h, name)


def dump_domain(dom: GridDomain) -> str:
    body = "\n".join("".join("#" if v else "." for v in row) for row in dom.mask)
    return f"{MASK_HEADER}\nh {dom.h!r}\n{body}\n"


def _centers(nx: int, ny: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    x = (np.arange(nx) + 0.5) * h
    y = (np.arange(ny) + 0.5) * h
    return np.meshgrid(x, y)


def _cells(length: float, h: float) -> int:
    return int(round(length / h))


def make_domain(kind: str, params, h: float) -> GridDomain:
    """Rasterize a named shape: a cell is inside iff its center is.

    ``rectangle(a, b)``, ``disk(r)``, ``annulus(r_in, r_out)`` and
    ``dumbbell(chamber, neck_w, neck_len, hole_r)``: two square chambers of
    side ``chamber`` joined along their mid-line by a neck, each with a
    centered square hole of half-side ``hole_r``.
    """
    params = [float(p) for p in params]
    if not (h > 0 and math.isfinite(h)):
        raise ValidationError(f"grid spacing must be positive, got {h!r}")
    if any(not (p > 0 and math.isfinite(p)) for p in params):
        raise ValidationError(f"{kind}: parameters must be positive, got {params}")

    if kind == "rectangle":
        _expect(kind, params, 2)
        a, b = params
        mask = np.ones((_cells(b, h), _cells(a, h)), dtype=bool)
        name = f"rectangle:{a:g},{b:g}"
    elif kind == "disk":
        _expect(kind, params, 1)
        (r,) = params
        n = int(math.ceil(2 * r / h))
        x, y = _centers(n, n, h)
        mask = (x - n * h / 2) ** 2 + (y - n * h / 2) ** 2 < r * r
        name = f"disk:{r:g}"
    elif kind == "annulus":
        _expect(kind, params, 2)
        r_in, r_out = params
        if r_in >= r_out:
            raise ValidationError("annulus: inner radius must be below outer radius")
        n = int(math.ceil(2 * r_out / h))
        x, y = _centers(n, n, h)
        rho2 = (x - n * h / 2) ** 2 + (y - n * h / 2) ** 2
        mask = (rho2 < r_out * r_out) & (rho2 > r_in * r_in)
        name = f"annulus:{r_in:g},{r_out:g}"
    elif kind == "dumbbell":
        _expect(kind, params, 4)
        chamber, neck_w, neck_len, hole_r = params
        if neck_w >= chamber:
            raise ValidationError("dumbbell: neck must be narrower than the chamber")
        if 2 * hole_r >= chamber:
            raise ValidationError("dumbbell: hole must fit inside the chamber")
        width = 2 * chamber + neck_len
        x, y = _centers(_cells(width, h), _cells(chamber, h), h)
        mid = chamber / 2
        left = x < chamber
        right = x > chamber + neck_len
        neck = ~left & ~right & (np.abs(y - mid) < neck_w / 2)
        cx = np.where(left, mid, chamber + neck_len + mid)
        hole = (np.abs(x - cx) < hole_r) & (np.abs(y - mid) < hole_r)
        mask = ((left | right) & ~hole) | neck
        name = f"dumbbell:{chamber:g},{neck_w:g},{neck_len:g},{hole_r:g}"
    else:
        raise ValidationError(f"unknown domain kind {kind!r}")
    return GridDomain(mask, h, name)


def _expect(kind: str, params: list, n: int) -> None:
    if len(params) != n:
        raise ValidationError(f"{kind} takes {n} parameters, got {len(params)}")


def parse_generator(spec: str, h: float) -> GridDomain:
    """Build a domain from the ``kind:p1,p2,...`` mini-syntax."""
    kind, sep, rest = spec.partition(":")
    if not sep or not rest:
        raise ValidationError(f"generator spec {spec!r} must look like kind:p1,p2,...")
    try:
        params = [float(p) for p in rest.split(",")]
    except ValueError:
        raise ValidationError(f"generator spec {spec!r} has non-numeric parameters") from None
    return make_domain(kind.strip(), params, h)


def laplacian(dom: GridDomain, kind: str) -> sp.csr_matrix:
    """Cell-centered 5-point ``-Laplacian`` on the inside cells.

    ``kind="neumann"`` mirrors ghost cells (zero flux across every outside
    face), so constants span the null space.  ``kind="dirichlet"`` sets each
    ghost to minus its neighbor, placing the zero boundary value on the
    cell face.  Both matrices are symmetric.
    """
    mask = dom.mask
    index = dom.cell_index
    padded = np.pad(mask, 1)
    n = dom.n_cells
    rows, cols = [], []
    n_out = np.zeros(n)
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        nb_in = padded[1 + dr : 1 + dr + mask.shape[0], 1 + dc : 1 + dc + mask.shape[1]] & mask
        src = index[nb_in]
        shifted = np.roll(np.roll(index, -dr, axis=0), -dc, axis=1)
        rows.append(src)
        cols.append(shifted[nb_in])
        n_out += ~nb_in[mask]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    degree = np.bincount(rows, minlength=n).astype(float)
    diag = degree.copy()
    if kind == "dirichlet":
        diag += 2.0 * n_out
    elif kind != "neumann":
        raise ValueError(f"unknown boundary condition {kind!r}")
    off = sp.csr_matrix((-np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return ((off + sp.diags(diag)) / dom.h**2).tocsr()
