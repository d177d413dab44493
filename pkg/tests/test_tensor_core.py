import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wectkit import tensor_core as tc
from wectkit.errors import AxisError, IndexRangeError, ShapeError

T = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
U = np.array([[1], [2]])
V = np.array([5.0])

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_zeros():
    assert tc.zeros((2, 3)).shape == (2, 3)
    assert not tc.zeros((2, 3)).any()
    np.testing.assert_array_equal(tc.zeros((1,)), [0.0])
    assert tc.zeros((2, 2, 2)).size == 8


@pytest.mark.parametrize("shape", [(), (0, 2), (2, -1), (1, 1, 1, 1)])
def test_zeros_rejects_bad_shape(shape):
    with pytest.raises(ShapeError):
        tc.zeros(shape)


def test_map_elementwise():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(tc.map_elementwise(a, np.negative), -a)
    np.testing.assert_array_equal(tc.map_elementwise(a, lambda x: x), a)


def test_map_rejects_shape_change():
    with pytest.raises(ShapeError):
        tc.map_elementwise(np.ones((2, 2)), np.ravel)


def test_matmul():
    a, b, c, d = 2.0, 3.0, 5.0, 7.0
    np.testing.assert_array_equal(tc.matmul(np.eye(2), np.array([[a, b], [c, d]])), [[a, b], [c, d]])
    np.testing.assert_array_equal(tc.matmul(np.array([[1.0, 2.0]]), np.array([[3.0], [4.0]])), [[11.0]])
    with pytest.raises(ShapeError):
        tc.matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_matmul_matches_scalar_loop_bitwise(rng):
    a = rng.normal(size=(50, 3))
    b = rng.normal(size=(3, 7))
    expected = np.empty((50, 7))
    for i in range(50):
        for k in range(7):
            acc = 0.0
            for j in range(3):
                acc += a[i, j] * b[j, k]
            expected[i, k] = acc
    np.testing.assert_array_equal(tc.matmul(a, b), expected)


def test_golden_cumsum():
    np.testing.assert_array_equal(tc.cumsum(T), [[1, 3], [3, 7], [5, 11]])
    np.testing.assert_array_equal(tc.cumsum(np.zeros((2, 2))), np.zeros((2, 2)))
    np.testing.assert_array_equal(tc.cumsum(np.ones((1, 3))), [[1, 2, 3]])
    with pytest.raises(ShapeError):
        tc.cumsum(np.ones(3))


def test_golden_rmax():
    np.testing.assert_array_equal(tc.rmax(T, 1), [2, 4, 6])
    np.testing.assert_array_equal(tc.rmax(T[:, :1], 1), [1, 3, 5])
    np.testing.assert_array_equal(tc.rmax(np.zeros((2, 3)), 0), [0, 0, 0])
    with pytest.raises(AxisError):
        tc.rmax(T, 2)


def test_rmax_long_axis_matches_numpy(rng):
    a = rng.normal(size=(4, 20, 3))
    np.testing.assert_array_equal(tc.rmax(a, 1), a.max(axis=1))
    np.testing.assert_array_equal(tc.rmax(a, 2), a.max(axis=2))


def test_golden_advanced_index():
    out = tc.advanced_index(T, U)
    assert out.shape == (2, 1, 2)
    np.testing.assert_array_equal(out, [[[3, 4]], [[5, 6]]])


def test_advanced_index_constant_and_identity():
    zero_idx = np.zeros((4, 2), dtype=np.int64)
    out = tc.advanced_index(T, zero_idx)
    assert (out == T[0]).all()
    sq = np.arange(9.0).reshape(3, 3)
    np.testing.assert_array_equal(tc.advanced_index(sq, np.arange(3).reshape(3, 1)), sq[:, None, :])


def test_advanced_index_out_of_range():
    with pytest.raises(IndexRangeError):
        tc.advanced_index(T, np.array([[3]]))


def test_golden_scatter_add():
    s = T.T.copy()
    tc.scatter_add(s, U, V)
    np.testing.assert_array_equal(s, [[1, 8, 5], [2, 4, 11]])


def test_scatter_add_debug_diff():
    s = T.T.copy()
    diff = tc.scatter_add(s, U, V, return_diff=True)
    np.testing.assert_array_equal(diff, [[0, 5, 0], [0, 0, 5]])


def test_scatter_add_zero_values_leave_target():
    s = T.T.copy()
    tc.scatter_add(s, U, np.zeros(1))
    np.testing.assert_array_equal(s, T.T)


def test_scatter_add_repeated_index():
    # every index is column 1, so the whole of a + b + c lands there
    s = np.zeros((1, 3))
    tc.scatter_add(s, np.array([[1, 1, 1]]), np.array([0.5, 1.25, -2.0]))
    np.testing.assert_array_equal(s, [[0.0, -0.25, 0.0]])


def test_scatter_add_error_leaves_target_untouched():
    s = T.T.copy()
    with pytest.raises(IndexRangeError):
        tc.scatter_add(s, np.array([[0, 1], [2, 3]]), np.ones(2))
    np.testing.assert_array_equal(s, T.T)
    with pytest.raises(ShapeError):
        tc.scatter_add(s, U, np.ones(2))


def test_as_index_bounds():
    with pytest.raises(IndexRangeError):
        tc.as_index([[0, 5]], 5)
    with pytest.raises(ShapeError):
        tc.as_index([[0.5]], 5)
    assert tc.as_index([[1.0, 2.0]], 3).dtype == np.int64


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 9), st.data())
def test_cumsum_linear(rows, cols, data):
    a = data.draw(arrays(np.float64, (rows, cols), elements=finite))
    b = data.draw(arrays(np.float64, (rows, cols), elements=finite))
    np.testing.assert_allclose(tc.cumsum(a + b), tc.cumsum(a) + tc.cumsum(b),
                               rtol=1e-12, atol=1e-12 * max(1.0, np.abs(a).sum() + np.abs(b).sum()))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 6), st.integers(1, 12), st.data())
def test_scatter_add_split_is_exact(rows, cols, k, data):
    idx = data.draw(arrays(np.int64, (rows, k), elements=st.integers(0, cols - 1)))
    vals = data.draw(arrays(np.float64, (k,), elements=finite))
    start = data.draw(arrays(np.float64, (rows, cols), elements=finite))
    cut = data.draw(st.integers(0, k))
    whole = start.copy()
    tc.scatter_add(whole, idx, vals)
    parts = start.copy()
    tc.scatter_add(parts, idx[:, :cut], vals[:cut])
    tc.scatter_add(parts, idx[:, cut:], vals[cut:])
    np.testing.assert_array_equal(whole, parts)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 6), st.integers(1, 12), st.data())
def test_scatter_add_matches_definition(rows, cols, k, data):
    idx = data.draw(arrays(np.int64, (rows, k), elements=st.integers(0, cols - 1)))
    vals = data.draw(arrays(np.float64, (k,), elements=st.integers(-50, 50).map(float)))
    s = np.zeros((rows, cols))
    tc.scatter_add(s, idx, vals)
    expected = np.zeros((rows, cols))
    for i in range(rows):
        for j in range(cols):
            expected[i, j] = sum(vals[kk] for kk in range(k) if idx[i, kk] == j)
    np.testing.assert_array_equal(s, expected)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=3), st.data())
def test_rmax_commutes_with_monotone_map(shape, data):
    t = data.draw(arrays(np.float64, tuple(shape), elements=finite))
    axis = data.draw(st.integers(0, len(shape) - 1))
    g = lambda x: np.floor(x / 3.0)  # noqa: E731  monotone, many ties
    np.testing.assert_array_equal(g(tc.rmax(t, axis)), tc.rmax(tc.map_elementwise(t, g), axis))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(1, 4), st.integers(1, 10), st.integers(1, 4), st.data())
def test_gather_then_rmax_is_rowwise_max(src_rows, cols, k, width, data):
    src = data.draw(arrays(np.int64, (src_rows, cols), elements=st.integers(0, 100)))
    idx = data.draw(arrays(np.int64, (k, width), elements=st.integers(0, src_rows - 1)))
    out = tc.rmax(tc.advanced_index(src, idx), 1)
    for b in range(k):
        for p in range(cols):
            assert out[b, p] == max(src[idx[b, j], p] for j in range(width))
