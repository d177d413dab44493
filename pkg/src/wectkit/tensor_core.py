"""Dense tensor kernel: the seven operations the WECF pipeline is built from.

Tensors are plain row-major numpy arrays, ``float64`` for values and
``int64`` for index tensors. Only dimensions 1 to 3 are supported. The
functions here validate shapes and index bounds up front and never leave a
target half-written.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import AxisError, IndexRangeError, ShapeError

MAX_DIM = 3


def as_tensor(data, *, ndim: int | None = None) -> np.ndarray:
    """Coerce ``data`` to a contiguous float64 tensor."""
    t = np.ascontiguousarray(data, dtype=np.float64)
    _check_dims(t, ndim)
    return t


def as_index(data, bound: int, *, ndim: int | None = None) -> np.ndarray:
    """Coerce ``data`` to an int64 index tensor with values in ``[0, bound)``."""
    arr = np.asarray(data)
    if arr.size and arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise ShapeError("index tensor must hold integers")
    t = np.ascontiguousarray(arr, dtype=np.int64)
    _check_dims(t, ndim)
    check_bounds(t, bound)
    return t


def check_bounds(index: np.ndarray, bound: int) -> None:
    if index.size == 0:
        return
    lo, hi = int(index.min()), int(index.max())
    if lo < 0 or hi >= bound:
        bad = lo if lo < 0 else hi
        raise IndexRangeError(f"index value {bad} outside [0, {bound})")


def _check_dims(t: np.ndarray, ndim: int | None) -> None:
    if ndim is not None and t.ndim != ndim:
        raise ShapeError(f"expected a {ndim}-dimensional tensor, got shape {t.shape}")
    if not 1 <= t.ndim <= MAX_DIM:
        raise ShapeError(f"tensor dimension must be 1..{MAX_DIM}, got {t.ndim}")


def zeros(shape: Sequence[int]) -> np.ndarray:
    shape = tuple(int(s) for s in shape)
    if not shape or len(shape) > MAX_DIM or any(s < 1 for s in shape):
        raise ShapeError(f"invalid shape {shape}")
    return np.zeros(shape, dtype=np.float64)


def map_elementwise(t: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``f`` elementwise.

    ``f`` receives the whole array and must act elementwise (a numpy ufunc or
    an array-aware callable). Wrap pure scalar functions with ``np.vectorize``.
    """
    out = np.asarray(f(t))
    if out.shape != t.shape:
        raise ShapeError(f"map changed shape {t.shape} -> {out.shape}")
    return out


def transpose(t: np.ndarray) -> np.ndarray:
    if t.ndim != 2:
        raise ShapeError(f"transpose needs a 2-dimensional tensor, got shape {t.shape}")
    return t.T


def matmul(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Matrix product ``t * s``.

    The inner axis is accumulated left to right with separate multiply and
    add roundings, so each entry is bit-identical to the scalar loop
    ``acc = 0.0; for j: acc += t[i, j] * s[j, k]``. The inner dimension here is
    the ambient dimension of an embedding (2 or 3), so no BLAS is needed.
    """
    if t.ndim != 2 or s.ndim != 2:
        raise ShapeError("matmul needs two 2-dimensional tensors")
    if t.shape[1] != s.shape[0]:
        raise ShapeError(f"matmul inner dimensions differ: {t.shape} * {s.shape}")
    out = np.zeros((t.shape[0], s.shape[1]), dtype=np.result_type(t, s, np.float64))
    for j in range(t.shape[1]):
        out += t[:, j, None] * s[None, j, :]
    return out


def cumsum(t: np.ndarray) -> np.ndarray:
    """Running sum of each row (over the second axis)."""
    if t.ndim != 2:
        raise ShapeError(f"cumsum needs a 2-dimensional tensor, got shape {t.shape}")
    return np.cumsum(t, axis=1)


def rmax(t: np.ndarray, axis: int) -> np.ndarray:
    """Maximum over ``axis``; the result drops that axis."""
    if not 0 <= axis < t.ndim:
        raise AxisError(f"axis {axis} out of range for shape {t.shape}")
    if t.shape[axis] < 1:
        raise ShapeError("cannot reduce over an empty axis")
    if t.ndim == 1 or t.shape[axis] > 8:
        return np.max(t, axis=axis)
    # short axes: pairwise maxima over slices beat numpy's strided reduction
    lead = (slice(None),) * axis
    out = t[lead + (0,)].copy()
    for j in range(1, t.shape[axis]):
        np.maximum(out, t[lead + (j,)], out=out)
    return out


def advanced_index(t: np.ndarray, index: np.ndarray) -> np.ndarray:
    """Gather rows: ``out[i, j, k] = t[index[i, j], k]``."""
    if t.ndim != 2:
        raise ShapeError(f"indexed tensor must be 2-dimensional, got shape {t.shape}")
    if index.ndim != 2:
        raise ShapeError(f"index tensor must be 2-dimensional, got shape {index.shape}")
    check_bounds(index, t.shape[0])
    return t[index]


def scatter_add(target: np.ndarray, index: np.ndarray, values: np.ndarray,
                *, return_diff: bool = False) -> np.ndarray | None:
    """Add ``values[k]`` to ``target[i, index[i, k]]`` in place.

    Row ``i`` of ``target`` receives its contributions in ascending ``k``
    order, one rounding per addition, which makes the result reproducible
    and splitting ``values`` into consecutive pieces exact.

    With ``return_diff`` the difference tensor is also built and returned
    (debugging aid; the normal path never materialises it).
    """
    if target.ndim != 2 or index.ndim != 2 or values.ndim != 1:
        raise ShapeError("scatter_add needs a 2-d target, 2-d index and 1-d values")
    if index.shape[0] != target.shape[0]:
        raise ShapeError(f"index has {index.shape[0]} rows, target has {target.shape[0]}")
    if index.shape[1] != values.shape[0]:
        raise ShapeError(f"index has {index.shape[1]} columns, values has {values.shape[0]}")
    if not target.flags.writeable:
        raise ShapeError("scatter_add target is read-only")
    check_bounds(index, target.shape[1])

    diff = np.zeros_like(target) if return_diff else None
    for i in range(target.shape[0]):
        np.add.at(target[i], index[i], values)
        if diff is not None:
            np.add.at(diff[i], index[i], values)
    return diff
