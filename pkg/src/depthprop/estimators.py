"""sklearn-compatible wrappers around the functional core.

These follow the estimator protocol (get_params/set_params/clone, fit
returning self) so the pieces drop into sklearn pipelines and grid-search
tooling. GuidedAffinity and BackProjector are stateless transformers;
DepthRefiner binds per-scene guidance in fit and refines coarse grids in
transform.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .affinity import AffinityField, guided_affinity
from .geometry import CameraIntrinsics, back_project
from .propagation import (
    DilationSchedule,
    PropagationConfig,
    propagate_accelerated,
    propagate_naive,
    schedule_c,
)
from .validation import as_depth_grid


class GuidedAffinity(TransformerMixin, BaseEstimator):
    """Turn an RGB guidance image into a normalized affinity field."""

    def __init__(self, kernel_size=3, sigma=0.1):
        self.kernel_size = kernel_size
        self.sigma = sigma

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        return guided_affinity(X, kernel_size=self.kernel_size, sigma=self.sigma)


class BackProjector(TransformerMixin, BaseEstimator):
    """Lift depth grids into 3D position maps under fixed pinhole intrinsics."""

    def __init__(self, fx=1.0, fy=1.0, u0=0.0, v0=0.0):
        self.fx = fx
        self.fy = fy
        self.u0 = u0
        self.v0 = v0

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        intrinsics = CameraIntrinsics(fx=self.fx, fy=self.fy, u0=self.u0, v0=self.v0)
        return back_project(X, intrinsics)


class DepthRefiner(BaseEstimator):
    """Spatial-propagation depth refinement with a scikit-learn face.

    fit() binds the per-scene guidance: an affinity field (or a raw
    (k*k-1, H, W) plane stack) and, when anchoring is enabled, the sparse
    measurement grid whose valid pixels must survive refinement untouched.
    transform() then refines any coarse depth grid of the matching shape.

    Parameters
    ----------
    schedule : str or DilationSchedule, default "c2"
        Named dilation schedule (c1, c2, c4) or an explicit one.
    iterations : int, default 12
        Total iterations, split across phases for named schedules.
    engine : {"accelerated", "naive"}, default "accelerated"
        Plane-parallel fast path or the per-pixel reference loop.
    anchor : bool, default False
        Reset sparse-valid pixels to their measured values every iteration.
    """

    def __init__(self, schedule="c2", iterations=12, engine="accelerated", anchor=False):
        self.schedule = schedule
        self.iterations = iterations
        self.engine = engine
        self.anchor = anchor

    def _resolved_schedule(self):
        if isinstance(self.schedule, DilationSchedule):
            return self.schedule
        return schedule_c(self.schedule, self.iterations)

    def fit(self, X, y=None, *, sparse=None):
        """Bind guidance. X is an AffinityField or raw plane stack; sparse is
        the anchor grid (required when anchor=True)."""
        if isinstance(X, AffinityField):
            field = X
        else:
            planes = np.asarray(X, dtype=np.float32)
            kernel_size = int(round((planes.shape[0] + 1) ** 0.5))
            field = AffinityField(kernel_size=kernel_size, planes=planes)
        self.affinity_ = field
        self.anchor_source_ = None if sparse is None else as_depth_grid(sparse, "sparse")
        if self.anchor and self.anchor_source_ is None:
            raise ValueError("anchor=True requires fit(..., sparse=<sparse grid>)")
        return self

    def transform(self, X):
        if not hasattr(self, "affinity_"):
            raise NotFittedError(
                "this DepthRefiner is not fitted yet; call fit with an affinity field"
            )
        config = PropagationConfig(
            schedule=self._resolved_schedule(),
            anchor_valid=self.anchor,
            anchor_source=self.anchor_source_ if self.anchor else None,
        )
        if self.engine == "accelerated":
            return propagate_accelerated(X, self.affinity_, config)
        if self.engine == "naive":
            return propagate_naive(X, self.affinity_, config)
        raise ValueError(f"unknown engine {self.engine!r}")
