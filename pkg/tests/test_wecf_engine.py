import statistics
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexes import (from_simplices, octahedron, random_complex, random_filters, segment)
from wectkit import (DiscretizationGrid, FilterSet, GrayscaleImage, WeightedComplex, alpha, beta,
                     compute_wecfs, compute_wect, directions, freudenthal_from_image,
                     height_filters, make_grid, unit_weights, weighted_euler_characteristic)
from wectkit import tensor_core as tc
from wectkit.errors import InputError, RangeError
from wectkit.oracle import naive_wecfs


def chi(c):
    return weighted_euler_characteristic(c).chi


# -- grid --------------------------------------------------------------------

def test_make_grid_example():
    g = make_grid(FilterSet([[-2.0], [1.2]]), 5)
    assert g.maxheight == 2.0
    np.testing.assert_array_equal(g.heights, [-2, -1, 0, 1, 2])
    assert make_grid(FilterSet([[3.0]]), 4).maxheight == 3.0


def test_alpha_examples():
    g = DiscretizationGrid(2.0, 5)
    assert alpha(g, -2.0) == 0
    assert alpha(g, 2.0) == 4
    # ceil((5 - 1) * (2 + 1.2) / 4) = ceil(3.2) = 4
    assert alpha(g, 1.2) == 4
    np.testing.assert_array_equal(tc.map_elementwise(np.array([-2.0, 1.2, 2.0]), g.alpha), [0, 4, 4])


def test_beta_examples():
    g = DiscretizationGrid(2.0, 5)
    assert beta(g, 0) == -2.0 and beta(g, 4) == 2.0 and beta(g, 3) == 1.0
    with pytest.raises(RangeError):
        beta(g, 5)


def test_alpha_range():
    g = DiscretizationGrid(1.0, 11)
    assert alpha(g, 1.0 + 5e-10) == 10
    assert alpha(g, -1.0 - 5e-10) == 0
    with pytest.raises(RangeError):
        alpha(g, 1.01)


def test_degenerate_grid():
    g = make_grid(FilterSet(np.zeros((3, 2))), 6)
    assert g.maxheight == 0.0
    assert alpha(g, 0.0) == 0
    assert all(beta(g, q) == 0.0 for q in range(6))


def test_grid_rejects_bad_numvals():
    with pytest.raises(InputError):
        make_grid(FilterSet([[1.0]]), 1)


def test_grid_override():
    fs = FilterSet([[0.5], [-0.25]])
    assert make_grid(fs, 3, maxheight=4.0).maxheight == 4.0
    with pytest.raises(RangeError):
        make_grid(fs, 3, maxheight=0.1)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1e6), st.integers(2, 5000), st.data())
def test_galois_connection(maxheight, numvals, data):
    g = DiscretizationGrid(maxheight, numvals)
    t = data.draw(st.floats(-maxheight, maxheight))
    q = data.draw(st.integers(0, numvals - 1))
    assert (alpha(g, t) <= q) == (t <= beta(g, q))
    assert alpha(g, beta(g, q)) == q


def test_galois_at_grid_points_and_neighbours(rng):
    for _ in range(50):
        g = DiscretizationGrid(rng.uniform(0.01, 100), int(rng.integers(2, 3000)))
        hs = g.heights
        t = np.concatenate([hs, np.nextafter(hs, np.inf), np.nextafter(hs, -np.inf)])
        t = np.clip(t, -g.maxheight, g.maxheight)
        a = g.alpha(t)
        for q in rng.integers(0, g.numvals, 20):
            np.testing.assert_array_equal(a <= q, t <= hs[q])


# -- algorithm ---------------------------------------------------------------

def test_segment_trace():
    # filter 0 and 1 on heights (-1, 0, 1): vertex 0 enters at index 1, vertex 1
    # and the edge at index 2, so increments (0, 1, 1 - 1) sum to (0, 1, 1)
    w = compute_wecfs(segment(), FilterSet([[0.0], [1.0]]), 3)
    np.testing.assert_array_equal(w.values, [[0.0, 1.0, 1.0]])
    np.testing.assert_array_equal(w.heights, [-1.0, 0.0, 1.0])


def test_zero_filter_gives_chi_everywhere(rng):
    c = random_complex(rng)
    w = compute_wecfs(c, FilterSet(np.zeros((c.num_vertices, 3))), 7)
    np.testing.assert_allclose(w.values, chi(c), atol=1e-9)


def test_octahedron_last_column(rng):
    c = octahedron()
    w = compute_wecfs(c, FilterSet(rng.normal(size=(6, 5))), 16)
    np.testing.assert_array_equal(w.values[:, -1], 2.0)


def test_last_column_law(rng):
    for _ in range(30):
        c = random_complex(rng)
        m = int(rng.integers(1, 9))
        w = compute_wecfs(c, FilterSet(random_filters(rng, c.num_vertices, m)), 9)
        np.testing.assert_allclose(w.values[:, -1], chi(c), atol=1e-9)


def test_refined_grid_nests(rng):
    for _ in range(20):
        c = random_complex(rng)
        fs = FilterSet(random_filters(rng, c.num_vertices, 4))
        nv = int(rng.integers(2, 40))
        coarse = compute_wecfs(c, fs, nv).values
        fine = compute_wecfs(c, fs, 2 * nv - 1).values
        np.testing.assert_allclose(coarse, fine[:, ::2], atol=1e-9)


def test_unit_weights_give_integer_counts(rng):
    for _ in range(10):
        c = unit_weights(random_complex(rng))
        w = compute_wecfs(c, FilterSet(random_filters(rng, c.num_vertices, 3)), 11)
        np.testing.assert_array_equal(w.values, np.round(w.values))


def test_works_without_face_closure():
    # a lone triangle row with no edges is still counted
    c = WeightedComplex(np.ones(3), [(np.zeros((0, 2)), []), ([[0, 1, 2]], [2.0])])
    fs = FilterSet([[0.0], [1.0], [2.0]])
    w = compute_wecfs(c, fs, 3)
    g = make_grid(fs, 3)
    np.testing.assert_array_equal(w.values, naive_wecfs(c, fs, g).values)
    np.testing.assert_array_equal(w.values, [[0.0, 1.0, 5.0]])


def test_threads_do_not_change_results(rng):
    c = random_complex(rng)
    fs = FilterSet(random_filters(rng, c.num_vertices, 7))
    one = compute_wecfs(c, fs, 33, threads=1).values
    three = compute_wecfs(c, fs, 33, threads=3).values
    np.testing.assert_array_equal(one, three)


def test_env_thread_setting(monkeypatch, rng):
    c = random_complex(rng)
    fs = FilterSet(random_filters(rng, c.num_vertices, 3))
    monkeypatch.setenv("ECT_THREADS", "2")
    a = compute_wecfs(c, fs, 5).values
    monkeypatch.setenv("ECT_THREADS", "nope")
    with pytest.raises(InputError):
        compute_wecfs(c, fs, 5)
    monkeypatch.setenv("ECT_THREADS", "0")
    np.testing.assert_array_equal(a, compute_wecfs(c, fs, 5).values)


def test_chunking_does_not_change_results(monkeypatch, rng):
    import wectkit.wecf_engine as engine
    img = GrayscaleImage(rng.random((20, 30)))
    c = freudenthal_from_image(img)
    dirs = directions(2, 6)
    whole = compute_wect(c, dirs, 50).values
    monkeypatch.setattr(engine, "CHUNK_ELEMENTS", 7)
    np.testing.assert_array_equal(whole, compute_wect(c, dirs, 50).values)


def test_input_errors(rng):
    c = random_complex(rng, embed_dim=2)
    with pytest.raises(InputError):
        compute_wecfs(c, FilterSet(np.zeros((c.num_vertices + 1, 1))), 4)
    with pytest.raises(InputError):
        compute_wect(c, directions(3, 2), 4)
    with pytest.raises(InputError):
        compute_wect(unit_weights(random_complex(rng)), directions(2, 2), 4)
    bad = WeightedComplex([1.0, 1.0], [([[0, 2]], [1.0])])
    with pytest.raises(InputError):
        compute_wecfs(bad, FilterSet([[0.0], [1.0]]), 3)
    with pytest.raises(InputError):
        FilterSet(np.array([1.0, 2.0]))


# -- transform ---------------------------------------------------------------

def test_wect_segment():
    w = compute_wect(segment(), directions(2, 1), 3)
    np.testing.assert_array_equal(w.values, [[0.0, 1.0, 1.0]])


def test_opposite_directions_on_symmetric_complex(rng):
    base = octahedron()
    # weights depend only on |coordinates|, so they are symmetric under v -> -v
    key = np.abs(base.vertex_coords) @ np.array([1.0, 2.0, 3.0])
    vw = 0.25 * key
    cells = tuple((t.vertices, vw[t.vertices].max(axis=1)) for t in base.cells)
    c = WeightedComplex(vw, cells, base.vertex_coords)
    s = directions(3, 10, seed=3).directions
    w = compute_wect(c, np.vstack([s, -s]), 21).values
    np.testing.assert_array_equal(w[:10], w[10:])


def test_height_filters_match_scalar_loop(rng):
    c = random_complex(rng, embed_dim=3)
    dirs = directions(3, 9, seed=1).directions
    fv = height_filters(c, dirs).fvals
    for a in range(c.num_vertices):
        for p in range(9):
            acc = 0.0
            for j in range(3):
                acc += c.vertex_coords[a, j] * dirs[p, j]
            assert abs(fv[a, p] - acc) <= 1e-12


def test_figure_style_complex_rows(rng):
    from complexes import figure_one
    c = figure_one()
    w = compute_wect(c, directions(2, 1), 5).values
    e = compute_wect(unit_weights(c), directions(2, 1), 5).values
    # heights 0, 1, 1, 2 on the grid (-2, -1, 0, 1, 2); the whole complex has
    # chi = 4 - 5 + 1 = 0, weighted 3 - 4.5 + 1 at the top
    np.testing.assert_array_equal(e, [[0, 0, 1, 1, 0]])
    np.testing.assert_array_equal(w, [[0, 0, 1, 0.5, -0.5]])


@pytest.mark.slow
def test_runtime_doubles_with_cell_count():
    """Doubling the cell count at fixed m and numvals roughly doubles runtime."""
    dirs = directions(2, 25)
    shapes = [(184, 184), (184, 368), (368, 368), (368, 724)]
    times, cells = [], []
    for shape in shapes:
        c = freudenthal_from_image(GrayscaleImage(np.random.default_rng(1).random(shape)))
        compute_wect(c, dirs, 256)
        runs = []
        for _ in range(5):
            start = time.perf_counter()
            compute_wect(c, dirs, 256)
            runs.append(time.perf_counter() - start)
        times.append(statistics.median(runs))
        cells.append(c.num_cells())
    assert 2e5 <= cells[0] and cells[-1] <= 1.6e6
    ratios = [b / a for a, b in zip(times, times[1:])]
    assert all(1.5 <= r <= 3.0 for r in ratios), (cells, times, ratios)


def test_from_simplices_helper_is_closed():
    c = from_simplices([(0, 1, 2, 3)])
    assert c.counts() == [4, 6, 4, 1]
