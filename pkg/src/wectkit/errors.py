"""Exception types shared across the package.

Every error carries a short ``category`` string; the CLI prints it as the
first field of its one-line error report and maps it to an exit status.
"""

from __future__ import annotations


class WectError(Exception):
    category = "error"


class ShapeError(WectError, ValueError):
    category = "shape"


class AxisError(WectError, ValueError):
    category = "axis"


class IndexRangeError(WectError, IndexError):
    category = "index"


class RangeError(WectError, ValueError):
    category = "range"


class InputError(WectError, ValueError):
    category = "input"


class ParseError(InputError):
    """Malformed input file. ``location`` is e.g. ``"line 3"`` or ``"byte 17"``."""

    category = "parse"

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
