"""Confidence-weighted fusion of two dense depth predictions.

Each pixel blends the two inputs with a two-way softmax over their
confidence logits. The per-pixel maximum is subtracted before
exponentiation, so arbitrarily large logits are safe. Unlike depth planes,
the logits are carried in float64 throughout: rounding a shifted logit to
float32 would already perturb the softmax by more than the blend's
shift-invariance tolerance, so the narrowing never happens.
"""

import numpy as np

from .validation import as_depth_grid, as_plane, check_same_shape


def _weights64(c_primary, c_secondary):
    top = np.maximum(c_primary, c_secondary)
    e_primary = np.exp(c_primary - top)
    e_secondary = np.exp(c_secondary - top)
    w_primary = e_primary / (e_primary + e_secondary)
    return w_primary, 1.0 - w_primary


def fusion_weights(c_cd, c_dd):
    """Per-pixel softmax coefficients for the two confidence planes.

    Returns two planes in (0, 1) that sum to 1 per pixel.
    """
    c_cd = as_plane(c_cd, "c_cd", dtype=np.float64)
    c_dd = as_plane(c_dd, "c_dd", dtype=np.float64)
    check_same_shape(c_cd, c_dd, "c_cd", "c_dd")
    w_cd, w_dd = _weights64(c_cd, c_dd)
    return w_cd.astype(np.float32), w_dd.astype(np.float32)


def fuse(d_cd, d_dd, c_cd, c_dd):
    """Blend two depth grids: (e^C_cd * D_cd + e^C_dd * D_dd) / (e^C_cd + e^C_dd).

    Applied at every pixel, including invalid (0) ones; validity handling is
    the caller's concern. The output is a per-pixel convex combination, so
    it always lies between the two inputs.
    """
    d_cd = as_depth_grid(d_cd, "d_cd")
    d_dd = as_depth_grid(d_dd, "d_dd")
    c_cd = as_plane(c_cd, "c_cd", dtype=np.float64)
    c_dd = as_plane(c_dd, "c_dd", dtype=np.float64)
    check_same_shape(d_cd, d_dd, "d_cd", "d_dd")
    check_same_shape(d_cd, c_cd, "d_cd", "c_cd")
    check_same_shape(d_cd, c_dd, "d_cd", "c_dd")
    w_cd, w_dd = _weights64(c_cd, c_dd)
    fused = w_cd * d_cd.astype(np.float64) + w_dd * d_dd.astype(np.float64)
    return fused.astype(np.float32)
