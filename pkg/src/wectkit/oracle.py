"""Brute-force reference for WECFs and WECTs.

For every filter and every grid height this walks all cells, recomputes
nothing it shares with the vectorized engine, and adds the signed weight of
each cell whose largest vertex value is at most the height. The loops are
plain scalar loops compiled with numba so the reference stays usable on
images of a few hundred pixels per side.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .complex_model import WeightedComplex
from .errors import InputError
from .wecf_engine import DiscretizationGrid, FilterSet, WecfMatrix


@njit(cache=True)
def _accumulate(fvals, cells, signed_weights, heights, out):
    k, width = cells.shape
    m = fvals.shape[1]
    top = np.empty(k)
    for p in range(m):
        for b in range(k):
            best = fvals[cells[b, 0], p]
            for j in range(1, width):
                v = fvals[cells[b, j], p]
                if v > best:
                    best = v
            top[b] = best
        for q in range(heights.shape[0]):
            t = heights[q]
            total = 0.0
            for b in range(k):
                if top[b] <= t:
                    total += signed_weights[b]
            out[p, q] += total


@njit(cache=True)
def _dot_heights(coords, dirs):
    k0, n = coords.shape
    d = dirs.shape[0]
    out = np.empty((k0, d))
    for a in range(k0):
        for p in range(d):
            acc = 0.0
            for j in range(n):
                acc += coords[a, j] * dirs[p, j]
            out[a, p] = acc
    return out


def _check(c: WeightedComplex, fvals: np.ndarray) -> None:
    if fvals.shape[0] != c.num_vertices:
        raise InputError(
            f"filter set has {fvals.shape[0]} rows, complex has {c.num_vertices} vertices")
    for dim, table in enumerate(c.cells, start=1):
        v = table.vertices
        if v.size and (v.min() < 0 or v.max() >= c.num_vertices):
            raise InputError(f"dimension-{dim} cells reference vertices outside [0, {c.num_vertices})")


def _naive(c: WeightedComplex, fvals: np.ndarray, grid: DiscretizationGrid) -> WecfMatrix:
    _check(c, fvals)
    fvals = np.ascontiguousarray(fvals, dtype=np.float64)
    heights = np.ascontiguousarray(grid.heights)
    out = np.zeros((fvals.shape[1], grid.numvals))
    for dim, cells, weights in c.tables():
        if len(cells) == 0 or fvals.shape[1] == 0:
            continue
        signed = weights * (-1.0) ** dim
        _accumulate(fvals, cells, np.ascontiguousarray(signed), heights, out)
    return WecfMatrix(out, grid)


def naive_wecfs(c: WeightedComplex, fs: FilterSet, grid: DiscretizationGrid) -> WecfMatrix:
    return _naive(c, fs.fvals, grid)


def scalar_heights(c: WeightedComplex, dirs) -> np.ndarray:
    """Per-vertex dot products with each direction, one scalar at a time."""
    d = np.ascontiguousarray(getattr(dirs, "directions", dirs), dtype=np.float64)
    if c.vertex_coords is None:
        raise InputError("complex has no vertex coordinates")
    if d.ndim != 2 or d.shape[1] != c.ambient_dim:
        raise InputError(
            f"directions live in R^{d.shape[-1]}, complex is embedded in R^{c.ambient_dim}")
    return _dot_heights(c.vertex_coords, d)


def naive_wect(c: WeightedComplex, dirs, grid: DiscretizationGrid) -> WecfMatrix:
    return _naive(c, scalar_heights(c, dirs), grid)
