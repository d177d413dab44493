"""Weighted simplicial and cubical complexes in the layout the engine reads.

A complex is a list of per-dimension cell tables. Dimension 0 is implicit
(vertex ``a`` is row ``a`` of the coordinate/weight arrays); dimension ``i >= 1``
is an ``(k_i, width)`` int64 table of vertex indices plus a length-``k_i``
weight vector. ``width`` is ``i + 1`` for simplices and ``2**i`` for cubes.

Cubical cells list their corners in binary corner order: corner ``j`` of an
``i``-cube has offset bit ``b`` equal to ``(j >> b) & 1``. For grid cubes
built from row-major pixels this is ascending vertex order.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .errors import InputError, ParseError, ShapeError

SIMPLICIAL = "simplicial"
CUBICAL = "cubical"


def cell_width(kind: str, dim: int) -> int:
    if kind == CUBICAL:
        return 2 ** dim
    return dim + 1


@dataclass(frozen=True)
class CellTable:
    vertices: np.ndarray   # (k_i, width) int64
    weights: np.ndarray    # (k_i,) float64

    def __len__(self) -> int:
        return self.vertices.shape[0]


@dataclass(frozen=True, eq=False)
class WeightedComplex:
    """Weighted complex with optional vertex embedding.

    ``cells`` holds dimensions 1..D in order; ``cells[i - 1]`` is dimension
    ``i``. Empty intermediate dimensions are allowed as zero-row tables.
    ``source_index`` optionally maps each vertex back to the flat pixel it
    came from (set by the image builders).
    """

    vertex_weights: np.ndarray
    cells: tuple[CellTable, ...] = ()
    vertex_coords: np.ndarray | None = None
    kind: str = SIMPLICIAL
    source_index: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in (SIMPLICIAL, CUBICAL):
            raise InputError(f"unknown complex kind {self.kind!r}")
        w = np.ascontiguousarray(self.vertex_weights, dtype=np.float64)
        if w.ndim != 1:
            raise ShapeError("vertex weights must be one-dimensional")
        object.__setattr__(self, "vertex_weights", w)
        k0 = w.shape[0]

        if self.vertex_coords is not None:
            coords = np.ascontiguousarray(self.vertex_coords, dtype=np.float64)
            if coords.ndim != 2 or coords.shape[0] != k0:
                raise ShapeError(f"vertex coords must have shape ({k0}, n), got {coords.shape}")
            if coords.shape[1] == 0:
                coords = None
            object.__setattr__(self, "vertex_coords", coords)

        tables = []
        for dim, table in enumerate(self.cells, start=1):
            if not isinstance(table, CellTable):
                table = CellTable(*table)
            width = cell_width(self.kind, dim)
            verts = np.asarray(table.vertices)
            if verts.size == 0:
                verts = verts.reshape(0, width)
            verts = np.ascontiguousarray(verts, dtype=np.int64)
            weights = np.ascontiguousarray(table.weights, dtype=np.float64).reshape(-1)
            if verts.ndim != 2 or verts.shape[1] != width:
                raise ShapeError(
                    f"dimension-{dim} {self.kind} cells need {width} vertices per row, "
                    f"got shape {verts.shape}")
            if weights.shape[0] != verts.shape[0]:
                raise ShapeError(
                    f"dimension-{dim}: {verts.shape[0]} cells but {weights.shape[0]} weights")
            tables.append(CellTable(verts, weights))
        # trailing empty dimensions carry no cells
        while tables and len(tables[-1]) == 0:
            tables.pop()
        object.__setattr__(self, "cells", tuple(tables))

        if self.source_index is not None:
            src = np.ascontiguousarray(self.source_index, dtype=np.int64)
            if src.shape != (k0,):
                raise ShapeError("source_index must have one entry per vertex")
            object.__setattr__(self, "source_index", src)

    @property
    def num_vertices(self) -> int:
        return self.vertex_weights.shape[0]

    @property
    def dim(self) -> int:
        if self.cells:
            return len(self.cells)
        return 0 if self.num_vertices else -1

    @property
    def ambient_dim(self) -> int:
        return 0 if self.vertex_coords is None else self.vertex_coords.shape[1]

    def counts(self) -> list[int]:
        """``[k_0, k_1, ..., k_D]``."""
        return [self.num_vertices] + [len(t) for t in self.cells]

    def num_cells(self) -> int:
        return sum(self.counts())

    def tables(self) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
        """Yield ``(dim, vertex_table, weights)`` for every dimension, vertices included."""
        k0 = self.num_vertices
        yield 0, np.arange(k0, dtype=np.int64).reshape(k0, 1), self.vertex_weights
        for dim, table in enumerate(self.cells, start=1):
            yield dim, table.vertices, table.weights


@dataclass(frozen=True)
class EulerSummary:
    chi: float


def weighted_euler_characteristic(c: WeightedComplex) -> EulerSummary:
    chi = 0.0
    for dim, _, weights in c.tables():
        chi += (-1) ** dim * float(np.sum(weights))
    return EulerSummary(chi)


def unit_weights(c: WeightedComplex) -> WeightedComplex:
    """Same cells, every weight replaced by 1 (turns a WECF into an ECF)."""
    return replace(
        c,
        vertex_weights=np.ones_like(c.vertex_weights),
        cells=tuple(CellTable(t.vertices, np.ones_like(t.weights)) for t in c.cells),
    )


def _faces(kind: str, dim: int, row: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    if kind == CUBICAL:
        for bit in range(dim):
            for value in (0, 1):
                yield tuple(row[j] for j in range(len(row)) if (j >> bit) & 1 == value)
    else:
        yield from itertools.combinations(row, len(row) - 1)


def validate(c: WeightedComplex) -> list[str]:
    """Check index bounds, distinct vertices per cell, and face closure.

    Returns human-readable violations; an empty list means the complex is a
    proper (face-closed) complex.
    """
    problems = []
    k0 = c.num_vertices
    present: list[set[tuple[int, ...]]] = [set(range(k0))]
    for dim, table in enumerate(c.cells, start=1):
        keys = set()
        for b, row in enumerate(table.vertices.tolist()):
            bad = [v for v in row if not 0 <= v < k0]
            if bad:
                problems.append(f"bounds: {dim}-cell {b} references vertex {bad[0]} (k0={k0})")
            if len(set(row)) != len(row):
                problems.append(f"distinct: {dim}-cell {b} repeats a vertex {row}")
            keys.add(tuple(sorted(row)))
        present.append(keys)

    for dim, table in enumerate(c.cells, start=1):
        if dim == 1:
            continue  # vertex faces are covered by the bounds check
        below = present[dim - 1]
        for b, row in enumerate(table.vertices.tolist()):
            for face in _faces(c.kind, dim, tuple(row)):
                if tuple(sorted(face)) not in below:
                    problems.append(f"closure: {dim}-cell {b} is missing face {face}")
    return problems


# -- text interchange -------------------------------------------------------
#
# header: D n k0 k1 ... kD
# k0 lines: n coordinates, then the vertex weight
# per dimension i: k_i lines of vertex indices, then the cell weight
# '#' starts a comment; blank lines are ignored.

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_complex(c: WeightedComplex, path: str | os.PathLike) -> None:
    counts = c.counts()
    lines = [f"# {c.kind} complex", " ".join(str(v) for v in [max(c.dim, 0), c.ambient_dim] + counts)]
    coords = c.vertex_coords
    for a in range(c.num_vertices):
        fields = [] if coords is None else [_fmt(x) for x in coords[a]]
        fields.append(_fmt(c.vertex_weights[a]))
        lines.append(" ".join(fields))
    for table in c.cells:
        for row, w in zip(table.vertices.tolist(), table.weights):
            lines.append(" ".join([str(v) for v in row] + [_fmt(w)]))
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _content_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield lineno, body


def read_complex(path: str | os.PathLike) -> WeightedComplex:
    try:
        with open(path, encoding="ascii") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not ASCII text") from exc
    return parse_complex(text)


def parse_complex(text: str) -> WeightedComplex:
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty complex file") from None
    try:
        nums = [int(tok) for tok in header]
    except ValueError:
        raise ParseError("header must be integers 'D n k0 ... kD'", f"line {lineno}") from None
    if len(nums) < 3 or len(nums) != nums[0] + 3 or min(nums) < 0:
        raise ParseError("header must be 'D n k0 k1 ... kD'", f"line {lineno}")
    top, n, counts = nums[0], nums[1], nums[2:]

    def take(count, width_ok, what):
        rows = []
        for _ in range(count):
            try:
                ln, toks = next(lines)
            except StopIteration:
                raise ParseError(f"file ends inside the {what} block") from None
            if not width_ok(len(toks) - 1):
                raise ParseError(f"{what} row has {len(toks)} fields", f"line {ln}")
            rows.append((ln, toks))
        return rows

    def number(tok, ln, conv):
        try:
            return conv(tok)
        except ValueError:
            raise ParseError(f"bad number {tok!r}", f"line {ln}") from None

    vrows = take(counts[0], lambda w: w == n, "vertex")
    coords = np.array([[number(t, ln, float) for t in toks[:-1]] for ln, toks in vrows],
                      dtype=np.float64).reshape(counts[0], n)
    vweights = np.array([number(toks[-1], ln, float) for ln, toks in vrows], dtype=np.float64)

    blocks = []
    kind = None
    for dim in range(1, top + 1):
        widths = {dim + 1, 2 ** dim}
        rows = take(counts[dim], lambda w: w in widths, f"dimension-{dim}")
        row_widths = {len(toks) - 1 for _, toks in rows}
        if len(row_widths) > 1:
            raise ParseError(f"dimension-{dim} rows have differing lengths")
        if dim >= 2 and rows:
            row_kind = CUBICAL if row_widths == {2 ** dim} else SIMPLICIAL
            if kind is not None and row_kind != kind:
                raise ParseError(f"mixed simplicial and cubical cells (dimension {dim})")
            kind = row_kind
        blocks.append((dim, rows))
    kind = kind or SIMPLICIAL

    leftover = next(lines, None)
    if leftover is not None:
        raise ParseError("unexpected data after the last cell block", f"line {leftover[0]}")

    cells = []
    for dim, rows in blocks:
        verts = np.array([[number(t, ln, int) for t in toks[:-1]] for ln, toks in rows],
                         dtype=np.int64).reshape(len(rows), cell_width(kind, dim))
        weights = np.array([number(toks[-1], ln, float) for ln, toks in rows], dtype=np.float64)
        cells.append(CellTable(verts, weights))
    return WeightedComplex(vweights, tuple(cells), coords if n else None, kind)
