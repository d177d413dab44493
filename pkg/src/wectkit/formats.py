"""Image loaders (PGM, CSV grid) and WECF result files (CSV, raw64).

raw64 layout, all little-endian::

    u64 m, u64 numvals
    m * numvals float64 values, row-major
    m * n float64 direction components (WECT results only)
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .builders import GrayscaleImage
from .errors import InputError, ParseError
from .wecf_engine import WecfMatrix

PGM = "pgm"
CSV_GRID = "csv-grid"
_WHITESPACE = b" \t\n\r\v\f"
_RAW64_HEADER = struct.Struct("<QQ")


def _read_bytes(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_image(path: str | os.PathLike, kind: str | None = None) -> GrayscaleImage:
    """Load a grayscale image; ``kind`` defaults from the file extension."""
    if kind is None:
        kind = PGM if str(path).lower().endswith(".pgm") else CSV_GRID
    data = _read_bytes(path)
    if kind == PGM:
        return parse_pgm(data)
    if kind == CSV_GRID:
        return parse_csv_grid(data)
    raise InputError(f"unknown image kind {kind!r}")


class _Cursor:
    """Header tokenizer for netpbm files (whitespace separated, '#' comments)."""

    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos

    def line(self, pos: int | None = None) -> str:
        newlines = self.data.count(b"\n", 0, self.pos if pos is None else pos)
        return f"line {newlines + 1}"

    def skip(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            ch = data[self.pos:self.pos + 1]
            if ch in _WHITESPACE:
                self.pos += 1
            elif ch == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = n if end < 0 else end + 1
            else:
                break

    def integer(self, what: str) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos:self.pos + 1].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError(f"expected {what}", f"byte {start} ({self.line(start)})")
        return int(self.data[start:self.pos])


def parse_pgm(data: bytes) -> GrayscaleImage:
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"not a PGM file (magic {magic!r})", "byte 0")
    cur = _Cursor(data, 2)
    width = cur.integer("width")
    height = cur.integer("height")
    maxval = cur.integer("maxval")
    if width < 1 or height < 1:
        raise ParseError(f"image size {width}x{height} must be positive", cur.line())
    if not 1 <= maxval <= 255:
        raise ParseError(f"unsupported maxval {maxval} (8-bit only)", cur.line())
    need = width * height

    if magic == b"P5":
        if cur.pos >= len(data) or data[cur.pos:cur.pos + 1] not in _WHITESPACE:
            raise ParseError("missing whitespace after maxval", f"byte {cur.pos}")
        start = cur.pos + 1
        raster = data[start:start + need]
        if len(raster) < need:
            raise ParseError(f"truncated raster: expected {need} bytes, found {len(raster)}",
                             f"byte {start}")
        pixels = np.frombuffer(raster, dtype=np.uint8)
        over = np.flatnonzero(pixels > maxval)
        if over.size:
            raise ParseError(f"sample {pixels[over[0]]} exceeds maxval {maxval}",
                             f"byte {start + int(over[0])}")
    else:
        samples = []
        while True:
            cur.skip()
            if cur.pos >= len(data):
                break
            line = cur.line()
            value = cur.integer("sample")
            if value > maxval:
                raise ParseError(f"sample {value} exceeds maxval {maxval}", line)
            samples.append(value)
            if len(samples) > need:
                raise ParseError(f"more than {need} samples for a {width}x{height} image", line)
        if len(samples) != need:
            raise ParseError(f"expected {need} samples, found {len(samples)}", cur.line())
        pixels = np.array(samples, dtype=np.float64)

    return GrayscaleImage(pixels.reshape(height, width) / float(maxval))


def parse_csv_grid(data: bytes | str) -> GrayscaleImage:
    """Comma-separated rows of numbers in [0, 1] or [0, 255].

    A grid whose largest value exceeds 1 is read as 8-bit and divided by 255.
    """
    text = data.decode("ascii", errors="strict") if isinstance(data, bytes) else data
    rows, width = [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            row = [float(tok) for tok in body.split(",")]
        except ValueError:
            raise ParseError(f"non-numeric entry in {body!r}", f"line {lineno}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"row has {len(row)} values, expected {width}", f"line {lineno}")
        if any(not (0.0 <= v <= 255.0) for v in row):
            raise ParseError("values must lie in [0, 255]", f"line {lineno}")
        rows.append(row)
    if not rows:
        raise ParseError("empty image grid")
    grid = np.array(rows, dtype=np.float64)
    if grid.max() > 1.0:
        grid = grid / 255.0
    return GrayscaleImage(grid)


def write_pgm(path, pixels: np.ndarray, binary: bool = True) -> None:
    """Write 8-bit samples as P5 (or P2 when ``binary`` is false)."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    height, width = pixels.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(b"P5\n%d %d\n255\n" % (width, height))
            fh.write(pixels.tobytes())
        else:
            fh.write(b"P2\n%d %d\n255\n" % (width, height))
            for row in pixels:
                fh.write(" ".join(str(v) for v in row).encode() + b"\n")


# -- results -----------------------------------------------------------------

def _g17(x: float) -> str:
    return format(float(x), ".17g")


def _row_labels(m: int, directions, labels) -> list[str]:
    if directions is not None:
        dirs = np.asarray(getattr(directions, "directions", directions), dtype=np.float64)
        if dirs.shape[0] != m:
            raise InputError(f"{dirs.shape[0]} directions for {m} result rows")
        return [";".join(_g17(x) for x in row) for row in dirs]
    if labels is not None:
        if len(labels) != m:
            raise InputError(f"{len(labels)} labels for {m} result rows")
        return [str(x) for x in labels]
    return [str(p) for p in range(m)]


def format_csv(w: WecfMatrix, directions=None, labels=None) -> str:
    out = [",".join(["height"] + [_g17(h) for h in w.heights])]
    for label, row in zip(_row_labels(w.num_filters, directions, labels), w.values):
        out.append(",".join([label] + [_g17(v) for v in row]))
    return "\n".join(out) + "\n"


def raw64_bytes(w: WecfMatrix, directions=None) -> bytes:
    m, nv = w.values.shape
    parts = [_RAW64_HEADER.pack(m, nv), np.ascontiguousarray(w.values, dtype="<f8").tobytes()]
    if directions is not None:
        dirs = np.asarray(getattr(directions, "directions", directions), dtype="<f8")
        if dirs.shape[0] != m:
            raise InputError(f"{dirs.shape[0]} directions for {m} result rows")
        parts.append(np.ascontiguousarray(dirs).tobytes())
    return b"".join(parts)


def write_result(w: WecfMatrix, path: str | os.PathLike, fmt: str = "csv", *,
                 directions=None, labels=None) -> None:
    """Write ``w`` as CSV (17 significant digits) or raw64.

    CSV rows are labelled by their direction (components joined by ``;``),
    by ``labels``, or by filter index.
    """
    if fmt == "csv":
        payload = format_csv(w, directions, labels).encode("ascii")
    elif fmt == "raw64":
        payload = raw64_bytes(w, directions)
    else:
        raise InputError(f"unknown output format {fmt!r}")
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def read_csv_result(path) -> tuple[np.ndarray, list[str], np.ndarray]:
    """Return ``(heights, row_labels, values)``."""
    lines = _read_bytes(path).decode("ascii").splitlines()
    if not lines or not lines[0].startswith("height,"):
        raise ParseError("missing 'height' header row", "line 1")
    heights = np.array([float(x) for x in lines[0].split(",")[1:]])
    labels, rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != heights.shape[0] + 1:
            raise ParseError(f"row has {len(fields) - 1} values", f"line {lineno}")
        labels.append(fields[0])
        rows.append([float(x) for x in fields[1:]])
    return heights, labels, np.array(rows, dtype=np.float64).reshape(len(rows), heights.shape[0])


def read_raw64(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Return ``(values, directions)``; ``directions`` is None if absent."""
    data = _read_bytes(path)
    if len(data) < _RAW64_HEADER.size:
        raise ParseError(f"raw64 header needs {_RAW64_HEADER.size} bytes, found {len(data)}")
    m, nv = _RAW64_HEADER.unpack_from(data)
    body = _RAW64_HEADER.size + 8 * m * nv
    if len(data) < body:
        raise ParseError(f"expected {body} bytes of values, found {len(data)}")
    values = np.frombuffer(data, dtype="<f8", count=m * nv, offset=_RAW64_HEADER.size)
    values = values.astype(np.float64).reshape(m, nv)
    extra = len(data) - body
    if extra == 0 or m == 0:
        return values, None
    if extra % (8 * m):
        raise ParseError(f"trailing {extra} bytes do not form {m} direction rows")
    dirs = np.frombuffer(data, dtype="<f8", offset=body).astype(np.float64).reshape(m, -1)
    return values, dirs
