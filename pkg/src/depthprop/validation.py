"""Input validation helpers shared across the package.

All planes and depth grids are plain 2-D numpy arrays in float32 working
precision. Validators coerce, check, and return the array so call sites
can stay one-liners, sklearn style.
"""

import numpy as np


def as_plane(values, name="plane", dtype=np.float32):
    """Coerce to a finite 2-D plane (float32 unless told otherwise).

    Raises ValueError on wrong dimensionality, empty axes, or any
    NaN/Inf (including values that overflow the target dtype).
    """
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have positive height and width, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_depth_grid(values, name="depth"):
    """Coerce to a valid depth grid: finite 2-D float32, all values >= 0.

    A value of 0 marks a pixel with no measurement.
    """
    arr = as_plane(values, name=name)
    if np.any(arr < 0):
        raise ValueError(f"{name} contains negative depths")
    return arr


def check_same_shape(first, second, first_name="first", second_name="second"):
    """Raise if two planes differ in shape, naming both shapes."""
    if first.shape != second.shape:
        raise ValueError(
            f"shape mismatch: {first_name} is {first.shape}, "
            f"{second_name} is {second.shape}"
        )


def check_positive_int(value, name):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_odd_kernel(kernel_size):
    check_positive_int(kernel_size, "kernel_size")
    if kernel_size < 3 or kernel_size % 2 == 0:
        raise ValueError(f"kernel_size must be an odd integer >= 3, got {kernel_size}")
    return int(kernel_size)
