"""Command-line front end.

Modes:
  ecf    image -> complex, unit weights, pixel intensity as the vertex filter
  wect   image (intensity weights) or embedded complex, height filters per direction
  wecf   complex file plus an explicit vertex-filter matrix
  bench  runtime of the vectorized engine against the brute-force oracle

Image pixels map to coordinates with columns along axis 0 (rightward) and rows
along axis 1 (downward), centred on the origin and scaled into [-0.5, 0.5].
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bench as bench_mod
from .builders import (DirectionSet, cubical_from_image, directions, freudenthal_from_image,
                       intensity_filter)
from .complex_model import read_complex, unit_weights, write_complex
from .errors import InputError, WectError
from .formats import CSV_GRID, PGM, format_csv, load_image, raw64_bytes
from .oracle import naive_wecfs, naive_wect, scalar_heights
from .wecf_engine import FilterSet, WecfMatrix, compute_wecfs, compute_wect, make_grid

COMPLEX_TEXT = "complex-text"
MODES = ("wect", "ecf", "wecf", "bench")
EXIT_CODES = {"input": 3, "parse": 4, "range": 5, "shape": 6, "index": 6, "axis": 6, "error": 1}


@dataclass
class RunConfig:
    mode: str = "wect"
    input: str | None = None
    input_kind: str | None = None
    complex_type: str | None = None
    directions: int = 16
    heights: int = 64
    seed: int = 0
    threshold: float | None = None
    engine: str = "vectorized"
    output: str | None = None
    format: str = "csv"
    max_height: float | None = None
    filters: str | None = None
    direction_file: str | None = None
    emit_complex: str | None = None
    bench_sizes: list[int] = field(default_factory=lambda: [64, 128, 256])
    repeats: int = 3


def _input_kind(cfg: RunConfig) -> str:
    if cfg.input_kind:
        return cfg.input_kind
    name = (cfg.input or "").lower()
    if name.endswith(".pgm"):
        return PGM
    if name.endswith(".csv"):
        return CSV_GRID
    return COMPLEX_TEXT


def _load_matrix(path: str, what: str) -> np.ndarray:
    try:
        arr = np.loadtxt(path, dtype=np.float64, comments="#", ndmin=2,
                         delimiter="," if path.lower().endswith(".csv") else None)
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"malformed {what} file {path}: {exc}") from exc
    return arr


def _build(cfg: RunConfig):
    """Return ``(complex, image or None)`` according to the input settings."""
    if not cfg.input:
        raise InputError("--input is required")
    kind = _input_kind(cfg)
    if kind == COMPLEX_TEXT:
        if cfg.complex_type not in (None, "as-given"):
            raise InputError("complex files are used as given (--complex-type as-given)")
        return read_complex(cfg.input), None
    img = load_image(cfg.input, kind)
    ctype = cfg.complex_type or "freudenthal"
    if ctype == "freudenthal":
        return freudenthal_from_image(img, cfg.threshold), img
    if ctype == "cubical":
        return cubical_from_image(img, cfg.threshold), img
    raise InputError(f"image input needs --complex-type freudenthal or cubical, not {ctype}")


def _filters_result(c, fs: FilterSet, cfg: RunConfig) -> WecfMatrix:
    if cfg.engine == "naive":
        return naive_wecfs(c, fs, make_grid(fs, cfg.heights, cfg.max_height))
    return compute_wecfs(c, fs, cfg.heights, maxheight=cfg.max_height)


def _wect_result(c, dirs: DirectionSet, cfg: RunConfig) -> WecfMatrix:
    if cfg.engine == "naive":
        grid = make_grid(FilterSet(scalar_heights(c, dirs)), cfg.heights, cfg.max_height)
        return naive_wect(c, dirs, grid)
    return compute_wect(c, dirs, cfg.heights, maxheight=cfg.max_height)


def _emit(payload: bytes, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
        return
    try:
        with open(output, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise InputError(f"cannot write {output}: {exc}") from exc


def execute(cfg: RunConfig) -> None:
    """Run a configuration, raising on any error."""
    if cfg.mode not in MODES:
        raise InputError(f"unknown mode {cfg.mode!r}")
    if cfg.engine not in bench_mod.ENGINES:
        raise InputError(f"unknown engine {cfg.engine!r}")
    if cfg.format not in ("csv", "raw64"):
        raise InputError(f"unknown output format {cfg.format!r}")

    if cfg.mode == "bench":
        rows = bench_mod.bench(cfg.bench_sizes, cfg.directions, cfg.heights, cfg.repeats,
                               seed=cfg.seed, engine=cfg.engine)
        _emit(bench_mod.format_report(rows).encode("ascii"), cfg.output)
        return

    c, img = _build(cfg)
    if cfg.emit_complex:
        write_complex(c, cfg.emit_complex)

    dirs = None
    if cfg.mode == "ecf":
        if img is None:
            raise InputError("ecf mode needs an image input")
        result = _filters_result(unit_weights(c), intensity_filter(img, c), cfg)
    elif cfg.mode == "wecf":
        if not cfg.filters:
            raise InputError("wecf mode needs --filters")
        result = _filters_result(c, FilterSet(_load_matrix(cfg.filters, "filter")), cfg)
    else:
        if c.vertex_coords is None:
            raise InputError("wect mode needs a complex with vertex coordinates")
        if cfg.direction_file:
            dirs = DirectionSet(_load_matrix(cfg.direction_file, "direction"))
        else:
            dirs = directions(c.ambient_dim, cfg.directions, cfg.seed)
        result = _wect_result(c, dirs, cfg)

    if cfg.format == "csv":
        payload = format_csv(result, directions=dirs).encode("ascii")
    else:
        payload = raw64_bytes(result, directions=dirs)
    _emit(payload, cfg.output)


def run(cfg: RunConfig) -> int:
    """Run a configuration; return a process exit status.

    Failures print one line ``error: <category>: <message>`` to stderr.
    """
    try:
        execute(cfg)
    except WectError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    return 0


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wectkit", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--mode", choices=MODES, default="wect")
    p.add_argument("--input", help="image (.pgm/.csv) or complex text file")
    p.add_argument("--input-kind", choices=(PGM, CSV_GRID, COMPLEX_TEXT),
                   help="default: from the file extension")
    p.add_argument("--complex-type", choices=("freudenthal", "cubical", "as-given"),
                   help="default: freudenthal for images, as-given for complex files")
    p.add_argument("--directions", type=int, default=16, help="number of directions (wect, bench)")
    p.add_argument("--direction-file", help="whitespace matrix of unit directions, one per row")
    p.add_argument("--filters", help="vertex-filter matrix (k0 rows, m columns) for wecf mode")
    p.add_argument("--heights", type=int, default=64, help="number of sampled heights")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, help="drop pixels with intensity below this")
    p.add_argument("--engine", choices=bench_mod.ENGINES, default="vectorized")
    p.add_argument("--output", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "raw64"), default="csv")
    p.add_argument("--max-height", type=float, help="override the grid half-width")
    p.add_argument("--emit-complex", help="also write the built complex in text form")
    p.add_argument("--bench-sizes", type=_sizes, default=[64, 128, 256],
                   help="comma-separated image side lengths for bench mode")
    p.add_argument("--repeats", type=int, default=3)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(RunConfig(**vars(args)))


if __name__ == "__main__":
    sys.exit(main())
