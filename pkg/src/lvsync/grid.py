"""Uniform Dirichlet grids on intervals and rectangles, discrete fields, and
the weighted Laplacian Δ + m(x).

Only interior nodes are represented: the homogeneous Dirichlet boundary is
structural (boundary values are identically zero and never stored). Spacing
along an axis of extent L with n interior nodes is h = L/(n+1); nodes sit at
h, 2h, ..., nh. Node ordering is lexicographic with the x index fastest, so
in 2D node k maps to (ix, iy) = (k % nx, k // nx).

The weighted operator Δ + diag(m) uses the standard second-order 3-point
(1D) / 5-point (2D) stencil. Norms and inner products use the uniform
quadrature weight h1*...*hd with no boundary correction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Domain",
    "Grid",
    "Field",
    "WeightedOperator",
    "GridMismatchError",
    "build_grid",
    "assemble_operator",
    "l2_norm",
    "l2_inner",
    "interpolate",
    "write_field_csv",
    "read_field_csv",
    "field_from_csv",
    "fmt_g17",
]

_KIND_NDIM = {"interval": 1, "rectangle": 2}


class GridMismatchError(ValueError):
    """Two fields/operators built on different grids were combined."""


def fmt_g17(x: float) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box anchored at the origin.

    extents are the side lengths per axis, resolution the interior node
    counts. A 1D interval has one entry each, a rectangle two.
    """

    kind: str
    extents: tuple[float, ...]
    resolution: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in _KIND_NDIM:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        object.__setattr__(self, "extents", tuple(float(e) for e in self.extents))
        object.__setattr__(self, "resolution", tuple(int(n) for n in self.resolution))
        ndim = _KIND_NDIM[self.kind]
        if len(self.extents) != ndim or len(self.resolution) != ndim:
            raise ValueError(
                f"{self.kind} domain needs {ndim} extent(s) and resolution(s), "
                f"got {len(self.extents)} and {len(self.resolution)}"
            )
        if any(not math.isfinite(e) or e <= 0 for e in self.extents):
            raise ValueError(f"extents must be positive, got {self.extents}")
        if any(n < 3 for n in self.resolution):
            raise ValueError(f"resolution too small: need >= 3 interior nodes per axis, got {self.resolution}")

    @property
    def ndim(self) -> int:
        return _KIND_NDIM[self.kind]


class Grid:
    """Discretized domain: interior node coordinates and spacing.

    Equality and hashing are by Domain; coordinates are derived
    deterministically from it.
    """

    def __init__(self, domain: Domain):
        self.domain = domain
        self.spacing = tuple(
            e / (n + 1) for e, n in zip(domain.extents, domain.resolution)
        )
        # interior coordinates per axis: h, 2h, ..., nh
        self.axes = tuple(
            h * np.arange(1, n + 1) for h, n in zip(self.spacing, domain.resolution)
        )
        for ax in self.axes:
            ax.flags.writeable = False

    @property
    def shape(self) -> tuple[int, ...]:
        return self.domain.resolution

    @property
    def ndim(self) -> int:
        return self.domain.ndim

    @property
    def size(self) -> int:
        return int(np.prod(self.domain.resolution))

    @property
    def cell_volume(self) -> float:
        """Quadrature weight h1*...*hd shared by every interior node."""
        return float(np.prod(self.spacing))

    def coords(self) -> np.ndarray:
        """(size, ndim) array of node coordinates in lexicographic order (x fastest)."""
        if self.ndim == 1:
            return self.axes[0][:, None]
        x, y = self.axes
        nx = len(x)
        ny = len(y)
        out = np.empty((nx * ny, 2))
        out[:, 0] = np.tile(x, ny)
        out[:, 1] = np.repeat(y, nx)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and self.domain == other.domain

    def __hash__(self) -> int:
        return hash(self.domain)

    def __repr__(self) -> str:
        return f"Grid({self.domain.kind}, extents={self.domain.extents}, n={self.domain.resolution})"


def build_grid(domain: Domain) -> Grid:
    """Construct the grid for a validated domain."""
    return Grid(domain)


def _check_same_grid(a: "Field | WeightedOperator", b: "Field | WeightedOperator"):
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid!r} vs {b.grid!r}")


class Field:
    """Real values at the interior nodes of a grid (boundary is implicitly 0).

    Values are immutable; arithmetic with scalars and same-grid fields is
    supported and returns new fields.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        vals = np.ascontiguousarray(values, dtype=float)
        if vals.shape == ():
            vals = np.full(grid.size, float(vals))
        if vals.ndim != 1 or vals.size != grid.size:
            raise ValueError(
                f"field needs {grid.size} values for grid {grid!r}, got shape {vals.shape}"
            )
        vals = vals.copy()
        vals.flags.writeable = False
        self.grid = grid
        self.values = vals

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "Field":
        return cls(grid, np.full(grid.size, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        """Sample fn(x) (1D) or fn(x, y) (2D) at the interior nodes."""
        pts = grid.coords()
        if grid.ndim == 1:
            return cls(grid, fn(pts[:, 0]))
        return cls(grid, fn(pts[:, 0], pts[:, 1]))

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def _coerce(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return other.values
        if np.isscalar(other):
            return float(other)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Field(self.grid, self.values + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Field(self.grid, self.values - v)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Field(self.grid, v - self.values)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Field(self.grid, self.values * v)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __repr__(self) -> str:
        return f"Field({self.grid!r}, min={self.values.min():.3g}, max={self.values.max():.3g})"


@lru_cache(maxsize=32)
def _laplacian(domain: Domain) -> sp.csr_matrix:
    """Discrete Dirichlet Laplacian (negative definite), cached per domain."""
    mats = []
    for h, n in zip(
        tuple(e / (r + 1) for e, r in zip(domain.extents, domain.resolution)),
        domain.resolution,
    ):
        main = np.full(n, -2.0 / h**2)
        off = np.full(n - 1, 1.0 / h**2)
        mats.append(sp.diags([off, main, off], [-1, 0, 1], format="csr"))
    if len(mats) == 1:
        lap = mats[0]
    else:
        ax, ay = mats
        ix = sp.identity(domain.resolution[0], format="csr")
        iy = sp.identity(domain.resolution[1], format="csr")
        # x index fastest -> x block is the inner Kronecker factor
        lap = sp.kron(iy, ax, format="csr") + sp.kron(ay, ix, format="csr")
    lap = lap.tocsr()
    lap.sort_indices()
    return lap


class WeightedOperator:
    """Discrete Δ + diag(m) with structural Dirichlet boundary.

    The Laplacian and the weight are stored separately; `matrix` materializes
    their sum on demand. `shifted(m0)` rebuilds from weight+m0 so that
    assemble_operator(g, m + m0) and assemble_operator(g, m).shifted(m0)
    produce bitwise-identical matrices.
    """

    __slots__ = ("grid", "weight", "_matrix")

    def __init__(self, grid: Grid, weight: Field):
        if weight.grid != grid:
            raise GridMismatchError("weight lives on a different grid")
        self.grid = grid
        self.weight = weight
        self._matrix = None

    @property
    def matrix(self) -> sp.csr_matrix:
        """Sparse symmetric matrix of Δ + diag(weight)."""
        if self._matrix is None:
            m = (_laplacian(self.grid.domain) + sp.diags(self.weight.values)).tocsr()
            m.sort_indices()
            self._matrix = m
        return self._matrix

    def shifted(self, m0: float) -> "WeightedOperator":
        """Operator with weight + m0 (exact diagonal shift by construction)."""
        return WeightedOperator(self.grid, self.weight + float(m0))

    def apply(self, f: Field) -> Field:
        _check_same_grid(self, f)
        return Field(self.grid, self.matrix @ f.values)

    def __repr__(self) -> str:
        return f"WeightedOperator({self.grid!r})"


def assemble_operator(grid: Grid, weight: Field) -> WeightedOperator:
    """Discrete Δ + diag(weight) on the interior nodes of grid."""
    if weight.grid != grid:
        raise GridMismatchError("weight lives on a different grid")
    return WeightedOperator(grid, weight)


def l2_norm(f: Field) -> float:
    """Discrete L2 norm sqrt(sum f_i^2 * h1*...*hd)."""
    return float(np.linalg.norm(f.values) * math.sqrt(f.grid.cell_volume))


def l2_inner(f: Field, g: Field) -> float:
    """Discrete L2 inner product, consistent with l2_norm."""
    _check_same_grid(f, g)
    return float(np.dot(f.values, g.values) * f.grid.cell_volume)


def interpolate(f: Field, point) -> float:
    """Multilinear interpolation of a field at an interior point.

    Uses the implicit zero boundary, so points anywhere in the closed box
    are valid.
    """
    pt = np.atleast_1d(np.asarray(point, dtype=float))
    grid = f.grid
    if pt.size != grid.ndim:
        raise ValueError(f"point must have {grid.ndim} coordinate(s)")
    for x, e in zip(pt, grid.domain.extents):
        if x < 0 or x > e:
            raise ValueError(f"point {pt} outside domain")

    # per-axis cell index and barycentric weight, boundary nodes = 0
    def axis_weights(x, h, n):
        i = int(math.floor(x / h))  # node i at i*h, i ranges 0..n+1 incl. boundary
        i = min(i, n)
        t = x / h - i
        return i, t

    shape = grid.shape
    if grid.ndim == 1:
        (n,) = shape
        h = grid.spacing[0]
        i, t = axis_weights(pt[0], h, n)
        left = f.values[i - 1] if 1 <= i <= n else 0.0
        right = f.values[i] if 0 <= i < n else 0.0
        return float((1 - t) * left + t * right)

    nx, ny = shape
    hx, hy = grid.spacing
    ix, tx = axis_weights(pt[0], hx, nx)
    iy, ty = axis_weights(pt[1], hy, ny)

    def node(jx, jy):
        if 1 <= jx <= nx and 1 <= jy <= ny:
            return f.values[(jx - 1) + nx * (jy - 1)]
        return 0.0

    return float(
        (1 - tx) * (1 - ty) * node(ix, iy)
        + tx * (1 - ty) * node(ix + 1, iy)
        + (1 - tx) * ty * node(ix, iy + 1)
        + tx * ty * node(ix + 1, iy + 1)
    )


def write_field_csv(f: Field, path):
    """Field file format: index,coord1[,coord2],value with 17 significant digits."""
    coords = f.grid.coords()
    header = ["index", "coord1", "value"] if f.grid.ndim == 1 else ["index", "coord1", "coord2", "value"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k in range(f.grid.size):
            row = [str(k)] + [fmt_g17(c) for c in coords[k]] + [fmt_g17(f.values[k])]
            w.writerow(row)


def read_field_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a field file; returns (coords, values) without grid reconstruction."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        ncoord = len(header) - 2
        coords, values = [], []
        for row in r:
            coords.append([float(c) for c in row[1 : 1 + ncoord]])
            values.append(float(row[1 + ncoord]))
    return np.asarray(coords), np.asarray(values)


def field_from_csv(path, grid: Grid) -> Field:
    """Load a field file onto a known grid, validating node count and coordinates."""
    coords, values = read_field_csv(path)
    if values.size != grid.size:
        raise ValueError(
            f"field file {path} has {values.size} nodes, grid expects {grid.size}"
        )
    if coords.shape[1] != grid.ndim:
        raise ValueError(f"field file {path} is {coords.shape[1]}D, grid is {grid.ndim}D")
    if not np.allclose(coords, grid.coords(), rtol=1e-12, atol=1e-12):
        raise ValueError(f"field file {path} coordinates do not match the grid")
    return Field(grid, values)
