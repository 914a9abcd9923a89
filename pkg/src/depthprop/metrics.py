"""KITTI-style depth completion metrics.

Depths are stored in meters; reports follow the benchmark's conventions:
RMSE and MAE in millimeters, inverse-depth metrics in 1/km (inverse depth
of d meters is 1000/d per km). All reductions run in float64 with numpy's
deterministic summation order, so reports are reproducible bit for bit.
"""

from dataclasses import dataclass

import numpy as np

from .validation import as_depth_grid, check_same_shape


@dataclass(frozen=True)
class MetricReport:
    rmse: float  # mm
    mae: float  # mm
    irmse: float  # 1/km
    imae: float  # 1/km
    valid_count: int

    def as_dict(self):
        return {
            "rmse_mm": self.rmse,
            "mae_mm": self.mae,
            "irmse_per_km": self.irmse,
            "imae_per_km": self.imae,
            "valid_count": self.valid_count,
        }


def masked_l2(pred, gt):
    """Sum of squared prediction errors over ground-truth-valid pixels.

    Units follow the grids (square meters); an all-invalid ground truth
    yields 0.
    """
    pred = as_depth_grid(pred, "pred")
    gt = as_depth_grid(gt, "gt")
    check_same_shape(pred, gt, "pred", "gt")
    mask = gt > 0
    diff = pred[mask].astype(np.float64) - gt[mask].astype(np.float64)
    return float(np.sum(diff * diff))


def evaluate(pred, gt):
    """Compute RMSE/MAE and their inverse-depth counterparts over gt-valid pixels.

    The prediction must be positive at every evaluated pixel (inverse depth
    is undefined otherwise); the first offending coordinate is reported.
    An empty ground truth yields a report of zeros.
    """
    pred = as_depth_grid(pred, "pred")
    gt = as_depth_grid(gt, "gt")
    check_same_shape(pred, gt, "pred", "gt")
    mask = gt > 0
    count = int(mask.sum())
    if count == 0:
        return MetricReport(rmse=0.0, mae=0.0, irmse=0.0, imae=0.0, valid_count=0)

    bad = mask & (pred <= 0)
    if np.any(bad):
        v, u = map(int, np.argwhere(bad)[0])
        raise ValueError(
            f"prediction is not positive at gt-valid pixel (row={v}, col={u}); "
            "inverse depth is undefined there"
        )

    p = pred[mask].astype(np.float64)
    g = gt[mask].astype(np.float64)
    err_mm = (p - g) * 1000.0
    inv_err_km = 1000.0 / p - 1000.0 / g
    return MetricReport(
        rmse=float(np.sqrt(np.mean(err_mm**2))),
        mae=float(np.mean(np.abs(err_mm))),
        irmse=float(np.sqrt(np.mean(inv_err_km**2))),
        imae=float(np.mean(np.abs(inv_err_km))),
        valid_count=count,
    )
