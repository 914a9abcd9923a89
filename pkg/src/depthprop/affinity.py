"""Per-neighbor affinity fields for spatial propagation.

An affinity field stores one H x W weight plane per non-self neighbor of a
k x k stencil (k*k - 1 planes). Planes are receiver-indexed: the plane for
offset (dy, dx), read at pixel (v, u), is the weight with which the
neighbor at (v + dy*rate, u + dx*rate) contributes to (v, u) during a
propagation phase with dilation rate `rate`. The stencil's center weight
(self weight) is never stored; it is defined per pixel as one minus the
stored neighbor weights, so a normalized field encodes a convex
combination everywhere.
"""

from dataclasses import dataclass

import numpy as np

from .validation import as_plane, check_odd_kernel


def neighbor_offsets(kernel_size):
    """Unit-dilation neighbor offsets (dy, dx) of a k x k stencil, row-major
    ascending, self (0, 0) omitted."""
    check_odd_kernel(kernel_size)
    radius = (kernel_size - 1) // 2
    return tuple(
        (dy, dx)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
        if (dy, dx) != (0, 0)
    )


@dataclass(frozen=True)
class AffinityField:
    """kernel_size: odd int >= 3; planes: (k*k - 1, H, W) float32 stack,
    ordered like neighbor_offsets(kernel_size)."""

    kernel_size: int
    planes: np.ndarray

    def __post_init__(self):
        check_odd_kernel(self.kernel_size)
        planes = np.asarray(self.planes, dtype=np.float32)
        expected = self.kernel_size * self.kernel_size - 1
        if planes.ndim != 3 or planes.shape[0] != expected:
            raise ValueError(
                f"expected {expected} planes of shape (H, W) for a "
                f"{self.kernel_size}x{self.kernel_size} stencil, got array of shape "
                f"{planes.shape}"
            )
        if not np.all(np.isfinite(planes)):
            raise ValueError("affinity planes contain non-finite values")
        object.__setattr__(self, "planes", planes)

    @property
    def shape(self):
        return self.planes.shape[1:]

    @property
    def offsets(self):
        return neighbor_offsets(self.kernel_size)


def normalize(field):
    """Rescale a raw field into convex-combination form.

    Per pixel: w_hat = |w| / max(1, sum |w|). The neighbor sum then never
    exceeds 1 and the deficit is the implicit self weight. Pixels already
    below the unit sum pass through untouched, which makes the operation
    exactly idempotent.
    """
    magnitudes = np.abs(field.planes).astype(np.float64)
    totals = magnitudes.sum(axis=0)
    scale = np.maximum(totals, 1.0)
    normalized = (magnitudes / scale[None, :, :]).astype(np.float32)
    # float32 rounding can push a scaled pixel's sum a few ulps past 1,
    # which would break the sum <= 1 contract and idempotence; nudge the
    # largest weights down one ulp until the float64 sum is back under 1.
    sums = normalized.sum(axis=0, dtype=np.float64)
    for v, u in np.argwhere(sums > 1.0):
        column = normalized[:, v, u]
        while column.sum(dtype=np.float64) > 1.0:
            k = int(column.argmax())
            column[k] = np.nextafter(column[k], np.float32(0.0))
        normalized[:, v, u] = column
    return AffinityField(kernel_size=field.kernel_size, planes=normalized)


def self_weight(field):
    """Per-pixel self weight implied by the deficit rule: 1 - sum of stored
    neighbor weights (before any boundary folding)."""
    return (1.0 - field.planes.sum(axis=0, dtype=np.float64)).astype(np.float32)


def guided_affinity(image, kernel_size=3, sigma=0.1):
    """Color-similarity affinities from an RGB guidance image.

    Raw weight toward the neighbor at offset (dy, dx) is
    exp(-||color(i) - color(j)||^2 / (2 sigma^2)); out-of-bounds neighbors
    get 0. The result is passed through normalize(), so it is ready for
    propagation. A standalone substitute for weights produced upstream.
    """
    check_odd_kernel(kernel_size)
    sigma = float(sigma)
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    image = np.asarray(image, dtype=np.float32)
    if image.ndim == 2:
        image = image[:, :, None]
    if image.ndim != 3:
        raise ValueError(f"image must be H x W x C, got shape {image.shape}")
    if not np.all(np.isfinite(image)):
        raise ValueError("image contains non-finite values")

    height, width = image.shape[:2]
    offsets = neighbor_offsets(kernel_size)
    planes = np.zeros((len(offsets), height, width), dtype=np.float32)
    inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma)
    for index, (dy, dx) in enumerate(offsets):
        rows = slice(max(0, -dy), min(height, height - dy))
        cols = slice(max(0, -dx), min(width, width - dx))
        src_rows = slice(rows.start + dy, rows.stop + dy)
        src_cols = slice(cols.start + dx, cols.stop + dx)
        diff = image[rows, cols] - image[src_rows, src_cols]
        sq_dist = np.sum(diff.astype(np.float64) ** 2, axis=-1)
        planes[index, rows, cols] = np.exp(-sq_dist * inv_two_sigma_sq).astype(
            np.float32
        )
    return normalize(AffinityField(kernel_size=kernel_size, planes=planes))
