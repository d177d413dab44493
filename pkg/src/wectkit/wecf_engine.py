"""Vectorized computation of weighted Euler characteristic functions.

The pipeline, for ``m`` vertex filters sampled at ``numvals`` heights:

1. map every filter value to a height index with ``alpha``;
2. scatter each vertex weight into the row of its filter at its index;
3. for each dimension ``i >= 1``, gather the indices of each cell's vertices,
   take their maximum (the index at which the cell enters the lower-star
   filtration) and scatter ``(-1)**i`` times the cell weight there;
4. a running sum along each row turns the per-index increments into the
   sampled functions.

Heights are sampled on the evenly spaced grid ``heights[q]`` from
``-maxheight`` to ``+maxheight``. ``alpha(t)`` is the smallest ``q`` with
``t <= heights[q]``, so row ``p`` column ``q`` of the result is the weighted
Euler characteristic of the cells whose maximum filter value is at most
``heights[q]``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import tensor_core as tc
from .complex_model import WeightedComplex
from .errors import InputError, RangeError

RANGE_TOLERANCE = 1e-9
# target number of gathered index entries per chunk of cells
CHUNK_ELEMENTS = 1 << 17


@dataclass(frozen=True, eq=False)
class FilterSet:
    """``fvals[a, p]`` is the value of filter ``p`` on vertex ``a``."""

    fvals: np.ndarray

    def __post_init__(self):
        if np.ndim(self.fvals) != 2:
            raise InputError(f"filter values must be a (k0, m) matrix, got shape {np.shape(self.fvals)}")
        fv = tc.as_tensor(self.fvals, ndim=2)
        if not np.all(np.isfinite(fv)):
            raise InputError("filter values must be finite")
        object.__setattr__(self, "fvals", fv)

    @property
    def num_vertices(self) -> int:
        return self.fvals.shape[0]

    @property
    def num_filters(self) -> int:
        return self.fvals.shape[1]


@dataclass(frozen=True)
class DiscretizationGrid:
    maxheight: float
    numvals: int
    _heights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.numvals) != self.numvals or self.numvals < 2:
            raise InputError(f"numvals must be an integer >= 2, got {self.numvals}")
        if not np.isfinite(self.maxheight) or self.maxheight < 0:
            raise InputError(f"maxheight must be finite and >= 0, got {self.maxheight}")
        object.__setattr__(self, "numvals", int(self.numvals))
        object.__setattr__(self, "maxheight", float(self.maxheight))

        mh, nv = self.maxheight, self.numvals
        if mh == 0.0:
            heights = np.zeros(nv)
        else:
            heights = np.arange(nv) * (2.0 * mh) / (nv - 1) - mh
            heights[0], heights[-1] = -mh, mh
            if np.any(np.diff(heights) <= 0):
                raise RangeError(f"{nv} heights cannot be resolved on [-{mh}, {mh}]")
        heights.setflags(write=False)
        object.__setattr__(self, "_heights", heights)

    @property
    def heights(self) -> np.ndarray:
        """``heights[q] == beta(q)`` for every grid index."""
        return self._heights

    def beta(self, q: int) -> float:
        if not 0 <= q < self.numvals:
            raise RangeError(f"grid index {q} outside [0, {self.numvals})")
        return float(self._heights[q])

    def alpha(self, t):
        """Index of the first grid height at or above ``t``.

        Accepts a scalar or an array; values up to ``RANGE_TOLERANCE`` outside
        ``[-maxheight, maxheight]`` are clamped, anything further is an error.
        The closed-form ceiling is corrected against the stored heights, so
        ``alpha(t) <= q`` holds exactly when ``t <= heights[q]``.
        """
        arr = np.asarray(t, dtype=np.float64)
        shape = arr.shape
        arr = arr.reshape(-1)
        mh, nv = self.maxheight, self.numvals
        if arr.size and not (np.all(arr >= -mh - RANGE_TOLERANCE)
                             and np.all(arr <= mh + RANGE_TOLERANCE)):
            raise RangeError(f"height outside [-{mh}, {mh}]")
        if mh == 0.0:
            q = np.zeros(arr.shape, dtype=np.int64)
        else:
            arr = np.clip(arr, -mh, mh)
            x = arr + mh
            x *= (nv - 1) / (2.0 * mh)
            q = np.ceil(x).astype(np.int64)
            np.clip(q, 0, nv - 1, out=q)
            # the candidate is at most one step off; settle it on the stored heights
            hs = self._heights
            q += arr > hs[q]
            q -= (q > 0) & (arr <= hs[q - 1])
        return int(q[0]) if shape == () else q.reshape(shape)


def alpha(grid: DiscretizationGrid, t):
    return grid.alpha(t)


def beta(grid: DiscretizationGrid, q: int) -> float:
    return grid.beta(q)


def make_grid(fs: FilterSet, numvals: int, maxheight: float | None = None) -> DiscretizationGrid:
    """Grid over ``[-M, M]`` with ``M`` the largest absolute filter value.

    ``maxheight`` overrides ``M`` (for a grid shared across inputs); it must
    cover every filter value.
    """
    if fs.fvals.size == 0:
        raise InputError("cannot size a grid from an empty filter set")
    data_max = float(np.max(np.abs(fs.fvals)))
    if maxheight is None:
        return DiscretizationGrid(data_max, numvals)
    if data_max > maxheight + RANGE_TOLERANCE:
        raise RangeError(f"filter value {data_max} exceeds maxheight {maxheight}")
    return DiscretizationGrid(maxheight, numvals)


@dataclass(frozen=True, eq=False)
class WecfMatrix:
    """``values[p, q]`` is the WECF of filter ``p`` at height ``grid.heights[q]``."""

    values: np.ndarray
    grid: DiscretizationGrid

    @property
    def heights(self) -> np.ndarray:
        return self.grid.heights

    @property
    def num_filters(self) -> int:
        return self.values.shape[0]


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``ECT_THREADS``; 0 means one per CPU."""
    if threads is None:
        raw = os.environ.get("ECT_THREADS", "0")
        try:
            threads = int(raw)
        except ValueError:
            raise InputError(f"ECT_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise InputError(f"thread count must be >= 0, got {threads}")
    return threads or os.cpu_count() or 1


def _check_complex(c: WeightedComplex, fs: FilterSet) -> None:
    if fs.num_vertices != c.num_vertices:
        raise InputError(
            f"filter set has {fs.num_vertices} rows, complex has {c.num_vertices} vertices")
    for dim, table in enumerate(c.cells, start=1):
        v = table.vertices
        if v.size and (v.min() < 0 or v.max() >= c.num_vertices):
            raise InputError(f"dimension-{dim} cells reference vertices outside [0, {c.num_vertices})")


def _wecf_block(c: WeightedComplex, fvals: np.ndarray, grid: DiscretizationGrid) -> np.ndarray:
    m = fvals.shape[1]
    diff = tc.zeros((m, grid.numvals))
    vindices = tc.map_elementwise(fvals, grid.alpha)
    tc.scatter_add(diff, np.ascontiguousarray(tc.transpose(vindices)), c.vertex_weights)

    for dim, table in enumerate(c.cells, start=1):
        if len(table) == 0:
            continue
        signed = -table.weights if dim % 2 else table.weights
        width = table.vertices.shape[1]
        step = max(1, CHUNK_ELEMENTS // (width * m))
        # chunks run in ascending cell order, preserving the scatter order
        for start in range(0, len(table), step):
            simp_indices = tc.advanced_index(vindices, table.vertices[start:start + step])
            msi = tc.rmax(simp_indices, 1)
            msi_t = np.ascontiguousarray(tc.transpose(msi))
            tc.scatter_add(diff, msi_t, signed[start:start + step])
    return tc.cumsum(diff)


def wecfs_on_grid(c: WeightedComplex, fs: FilterSet, grid: DiscretizationGrid,
                  threads: int | None = None) -> WecfMatrix:
    """Sample every filter's WECF on a given grid.

    Rows are independent, so with several workers the filters are split into
    column blocks; each row's arithmetic is unchanged by the split.
    """
    _check_complex(c, fs)
    m = fs.num_filters
    workers = min(resolve_threads(threads), m)
    if workers <= 1:
        values = _wecf_block(c, fs.fvals, grid) if m else np.zeros((0, grid.numvals))
    else:
        blocks = np.array_split(np.arange(m), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda cols: _wecf_block(c, fs.fvals[:, cols], grid), blocks)
            values = np.concatenate(list(parts), axis=0)
    return WecfMatrix(values, grid)


def compute_wecfs(c: WeightedComplex, fs: FilterSet, numvals: int, *,
                  maxheight: float | None = None, threads: int | None = None) -> WecfMatrix:
    _check_complex(c, fs)
    grid = make_grid(fs, numvals, maxheight)
    return wecfs_on_grid(c, fs, grid, threads)


def height_filters(c: WeightedComplex, dirs) -> FilterSet:
    """Height of every vertex in every direction: ``coords * directions^T``."""
    d = np.asarray(getattr(dirs, "directions", dirs), dtype=np.float64)
    if c.vertex_coords is None:
        raise InputError("complex has no vertex coordinates")
    if d.ndim != 2 or d.shape[1] != c.ambient_dim:
        raise InputError(
            f"directions live in R^{d.shape[-1]}, complex is embedded in R^{c.ambient_dim}")
    return FilterSet(tc.matmul(c.vertex_coords, tc.transpose(d)))


def compute_wect(c: WeightedComplex, dirs, numvals: int, *,
                 maxheight: float | None = None, threads: int | None = None) -> WecfMatrix:
    """Directional WECFs; row ``p`` is the WECF of the height function along ``dirs[p]``."""
    return compute_wecfs(c, height_filters(c, dirs), numvals,
                         maxheight=maxheight, threads=threads)
