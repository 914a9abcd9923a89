"""Depth grid containers and validity semantics.

A depth grid is an H x W float32 array of non-negative meters where 0
encodes "no measurement". Grids are treated as immutable values: every
function here returns a new array and never writes to its inputs.
"""

import numpy as np
from scipy import ndimage

from .validation import as_depth_grid, check_positive_int


def make_grid(height, width, fill=0.0):
    """Create a constant-valued depth grid.

    fill must be finite and >= 0 (0 produces an all-invalid grid).
    """
    check_positive_int(height, "height")
    check_positive_int(width, "width")
    fill = float(fill)
    if not np.isfinite(fill) or fill < 0:
        raise ValueError(f"fill must be finite and non-negative, got {fill}")
    return np.full((height, width), fill, dtype=np.float32)


def valid_mask(depth):
    """Boolean mask, True exactly where a depth measurement exists (> 0)."""
    depth = as_depth_grid(depth)
    return depth > 0


def nearest_fill(depth):
    """Densify a sparse grid by copying each invalid pixel's nearest valid value.

    Nearest is Euclidean on pixel coordinates with deterministic tie
    breaking, so repeated calls give identical output. Raises if the grid
    has no valid pixel to copy from.
    """
    depth = as_depth_grid(depth)
    if not np.any(depth > 0):
        raise ValueError("cannot fill a grid with no valid pixels")
    rows, cols = ndimage.distance_transform_edt(
        depth == 0, return_distances=False, return_indices=True
    )
    return depth[rows, cols]
