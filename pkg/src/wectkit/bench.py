"""Runtime comparison of the vectorized engine against the brute-force oracle."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .builders import GrayscaleImage, cubical_from_image, directions, freudenthal_from_image
from .oracle import naive_wect
from .wecf_engine import compute_wect, height_filters, make_grid

ENGINES = ("vectorized", "naive")


@dataclass
class BenchRow:
    size: int
    cells: int
    engine: str
    baseline: str | None
    engine_s: float
    baseline_s: float | None

    @property
    def speedup(self) -> float | None:
        if self.baseline_s is None:
            return None
        return self.baseline_s / self.engine_s


def median_runtime(fn: Callable[[], object], repeats: int, warmup: int = 1) -> float:
    """Median wall time of ``repeats`` calls after ``warmup`` discarded calls."""
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(max(1, repeats)):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def synthetic_image(size: int, seed: int = 0) -> GrayscaleImage:
    return GrayscaleImage(np.random.default_rng(seed).random((size, size)))


def bench(sizes, d: int = 25, numvals: int = 256, repeats: int = 3, *,
          seed: int = 0, engine: str = "vectorized", baseline: str | None = "naive",
          baseline_max_size: int | None = None, complex_type: str = "freudenthal",
          threads: int | None = None) -> list[BenchRow]:
    """Time WECT computation on random ``size x size`` images.

    The baseline is skipped (``baseline_s`` is None) for sizes above
    ``baseline_max_size``.
    """
    build = freudenthal_from_image if complex_type == "freudenthal" else cubical_from_image
    dirs = directions(2, d, seed)
    rows = []
    for size in sizes:
        c = build(synthetic_image(size, seed))
        grid = make_grid(height_filters(c, dirs), numvals)
        runners = {
            "vectorized": lambda: compute_wect(c, dirs, numvals, threads=threads),
            "naive": lambda: naive_wect(c, dirs, grid),
        }
        engine_s = median_runtime(runners[engine], repeats)
        baseline_s = None
        if baseline and (baseline_max_size is None or size <= baseline_max_size):
            baseline_s = median_runtime(runners[baseline], repeats)
        rows.append(BenchRow(size, c.num_cells(), engine, baseline, engine_s, baseline_s))
    return rows


def format_report(rows: list[BenchRow]) -> str:
    out = ["size,cells,engine,baseline,engine_s,baseline_s,speedup"]
    for r in rows:
        base = "" if r.baseline_s is None else f"{r.baseline_s:.6g}"
        speed = "" if r.speedup is None else f"{r.speedup:.6g}"
        out.append(f"{r.size},{r.cells},{r.engine},{r.baseline or ''},{r.engine_s:.6g},{base},{speed}")
    return "\n".join(out) + "\n"
