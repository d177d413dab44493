"""Image-to-complex builders, the intensity filter, and direction sets.

Pixels become vertices. Pixel ``(r, c)`` is vertex ``r * C + c``; its
coordinates are ``x = (c - (C-1)/2) * s`` and ``y = (r - (R-1)/2) * s`` with
``s = 1 / max(R-1, C-1, 1)``, so column index runs along axis 0 (rightward),
row index along axis 1 (downward), the grid is centred on the origin and
fits inside ``[-0.5, 0.5]^2``.

Vertex weight is the pixel intensity; every higher cell takes the maximum
weight of its vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex_model import CUBICAL, SIMPLICIAL, CellTable, WeightedComplex
from .errors import InputError
from .wecf_engine import FilterSet


@dataclass(frozen=True, eq=False)
class GrayscaleImage:
    intensities: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.intensities, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"image must be a non-empty 2-d array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise InputError("image intensities must lie in [0, 1]")
        object.__setattr__(self, "intensities", arr)

    @classmethod
    def from_uint8(cls, pixels) -> "GrayscaleImage":
        return cls(np.asarray(pixels, dtype=np.float64) / 255.0)

    @property
    def rows(self) -> int:
        return self.intensities.shape[0]

    @property
    def cols(self) -> int:
        return self.intensities.shape[1]


@dataclass(frozen=True, eq=False)
class DirectionSet:
    directions: np.ndarray   # (d, n), unit rows

    def __post_init__(self):
        dirs = np.ascontiguousarray(self.directions, dtype=np.float64)
        if dirs.ndim != 2:
            raise InputError(f"directions must be a (d, n) array, got shape {dirs.shape}")
        if dirs.shape[0] and np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > 1e-12):
            raise InputError("every direction must have unit length")
        object.__setattr__(self, "directions", dirs)

    def __len__(self) -> int:
        return self.directions.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.directions.shape[1]


def directions(n: int, d: int, seed: int = 0) -> DirectionSet:
    """``d`` unit directions in R^n.

    In the plane the directions are evenly spaced angles starting at (1, 0).
    For ``n >= 3`` they are normalised standard-normal draws from a generator
    seeded with ``seed``.
    """
    if n < 2:
        raise InputError(f"directions need ambient dimension >= 2, got {n}")
    if d < 1:
        raise InputError(f"direction count must be >= 1, got {d}")
    if n == 2:
        theta = 2.0 * np.pi * np.arange(d) / d
        return DirectionSet(np.column_stack([np.cos(theta), np.sin(theta)]))
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((d, n))
    norms = np.linalg.norm(samples, axis=1)
    while np.any(norms == 0.0):  # measure-zero, but keep rows well defined
        bad = norms == 0.0
        samples[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(samples, axis=1)
    return DirectionSet(samples / norms[:, None])


def pixel_coordinates(rows: int, cols: int) -> np.ndarray:
    scale = 1.0 / max(rows - 1, cols - 1, 1)
    r, c = np.divmod(np.arange(rows * cols), cols)
    x = (c - (cols - 1) / 2.0) * scale
    y = (r - (rows - 1) / 2.0) * scale
    return np.column_stack([x, y])


def _pairs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.column_stack([a.ravel(), b.ravel()])


def _grid_edges(idx: np.ndarray) -> list[np.ndarray]:
    return [_pairs(idx[:, :-1], idx[:, 1:]),    # horizontal
            _pairs(idx[:-1, :], idx[1:, :])]    # vertical


def _assemble(img: GrayscaleImage, tables: list[np.ndarray], kind: str,
              threshold: float | None) -> WeightedComplex:
    weights = img.intensities.ravel()
    coords = pixel_coordinates(img.rows, img.cols)
    source = np.arange(weights.shape[0], dtype=np.int64)

    if threshold is not None:
        keep = weights >= threshold
        remap = np.full(weights.shape[0], -1, dtype=np.int64)
        remap[keep] = np.arange(int(keep.sum()))
        tables = [remap[t[np.all(keep[t], axis=1)]] for t in tables]
        weights, coords, source = weights[keep], coords[keep], source[keep]

    cells = tuple(CellTable(t, weights[t].max(axis=1) if len(t) else np.zeros(0))
                  for t in tables)
    return WeightedComplex(weights, cells, coords, kind, source_index=source)


def freudenthal_from_image(img: GrayscaleImage, threshold: float | None = None) -> WeightedComplex:
    """Triangulated grid: each unit square is split along its (r, c)-(r+1, c+1) diagonal.

    With ``threshold``, pixels darker than it are removed together with every
    cell that touches them.
    """
    idx = np.arange(img.rows * img.cols, dtype=np.int64).reshape(img.rows, img.cols)
    nw, ne = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
    sw, se = idx[1:, :-1].ravel(), idx[1:, 1:].ravel()
    edges = np.concatenate(_grid_edges(idx) + [np.column_stack([nw, se])])
    triangles = np.concatenate([np.column_stack([nw, ne, se]),
                                np.column_stack([nw, sw, se])])
    return _assemble(img, [edges, triangles], SIMPLICIAL, threshold)


def cubical_from_image(img: GrayscaleImage, threshold: float | None = None) -> WeightedComplex:
    """Cubical grid: axis-aligned edges and unit squares (4 corners each)."""
    idx = np.arange(img.rows * img.cols, dtype=np.int64).reshape(img.rows, img.cols)
    edges = np.concatenate(_grid_edges(idx))
    squares = np.column_stack([idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel(),
                               idx[1:, :-1].ravel(), idx[1:, 1:].ravel()])
    return _assemble(img, [edges, squares], CUBICAL, threshold)


def intensity_filter(img: GrayscaleImage, c: WeightedComplex) -> FilterSet:
    """Single vertex filter: the intensity of each vertex's source pixel."""
    flat = img.intensities.ravel()
    if c.source_index is not None:
        if c.source_index.size and c.source_index.max() >= flat.shape[0]:
            raise InputError("complex was not built from this image")
        values = flat[c.source_index]
    elif c.num_vertices == flat.shape[0]:
        values = flat
    else:
        raise InputError(
            f"complex has {c.num_vertices} vertices, image has {flat.shape[0]} pixels")
    return FilterSet(values.reshape(-1, 1))
