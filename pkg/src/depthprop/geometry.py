"""Pinhole geometry: back-projection to 3D position maps and multi-scale
min-pooling of sparse depth.

Pixel coordinates are 0-based with u horizontal (columns) and v vertical
(rows); pixel centers sit at integer coordinates with no half-pixel offset.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .validation import as_depth_grid, check_positive_int


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters in pixels: focal lengths fx, fy and principal
    point (u0, v0)."""

    fx: float
    fy: float
    u0: float
    v0: float

    def __post_init__(self):
        for name in ("fx", "fy", "u0", "v0"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(
                f"focal lengths must be strictly positive, got fx={self.fx}, fy={self.fy}"
            )


class PositionMap(NamedTuple):
    """Per-pixel 3D coordinates in meters; (0, 0, 0) where depth is invalid."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray


def back_project(depth, intrinsics):
    """Lift a depth grid to a 3D position map.

    Z = depth, X = (u - u0) * Z / fx, Y = (v - v0) * Z / fy. Invalid pixels
    (depth 0) map to the origin.
    """
    depth = as_depth_grid(depth)
    height, width = depth.shape
    u = np.arange(width, dtype=np.float32)[None, :]
    v = np.arange(height, dtype=np.float32)[:, None]
    z = depth.copy()
    x = (u - np.float32(intrinsics.u0)) * z / np.float32(intrinsics.fx)
    y = (v - np.float32(intrinsics.v0)) * z / np.float32(intrinsics.fy)
    return PositionMap(x=x, y=y, z=z)


def project(position, intrinsics):
    """Inverse of back_project for valid pixels: recover (u, v) planes.

    Pixels with z == 0 yield (0, 0).
    """
    z = position.z
    u = np.zeros_like(z)
    v = np.zeros_like(z)
    valid = z > 0
    u[valid] = intrinsics.u0 + position.x[valid] * intrinsics.fx / z[valid]
    v[valid] = intrinsics.v0 + position.y[valid] * intrinsics.fy / z[valid]
    return u, v


def min_pool(depth, factor):
    """Downsample by taking the minimum valid depth in each factor x factor
    window; a window with no valid value yields 0.

    The grid shape must be divisible by factor.
    """
    depth = as_depth_grid(depth)
    check_positive_int(factor, "factor")
    if factor == 1:
        return depth.copy()
    height, width = depth.shape
    if height % factor != 0:
        raise ValueError(f"height {height} is not divisible by factor {factor}")
    if width % factor != 0:
        raise ValueError(f"width {width} is not divisible by factor {factor}")
    windows = depth.reshape(height // factor, factor, width // factor, factor)
    masked = np.where(windows > 0, windows, np.float32(np.inf))
    pooled = masked.min(axis=(1, 3))
    return np.where(np.isfinite(pooled), pooled, np.float32(0.0)).astype(np.float32)


def scale_intrinsics(intrinsics, factor):
    """Intrinsics matching a grid min-pooled (or otherwise decimated) by factor."""
    check_positive_int(factor, "factor")
    return CameraIntrinsics(
        fx=intrinsics.fx / factor,
        fy=intrinsics.fy / factor,
        u0=intrinsics.u0 / factor,
        v0=intrinsics.v0 / factor,
    )
