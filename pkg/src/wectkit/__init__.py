"""Vectorized weighted Euler characteristic functions and transforms."""

from .builders import (DirectionSet, GrayscaleImage, cubical_from_image, directions,
                       freudenthal_from_image, intensity_filter)
from .complex_model import (CellTable, EulerSummary, WeightedComplex, read_complex,
                            unit_weights, validate, weighted_euler_characteristic,
                            write_complex)
from .errors import (AxisError, IndexRangeError, InputError, ParseError, RangeError,
                     ShapeError, WectError)
from .wecf_engine import (DiscretizationGrid, FilterSet, WecfMatrix, alpha, beta,
                          compute_wecfs, compute_wect, height_filters, make_grid,
                          wecfs_on_grid)

__version__ = "0.1.0"
