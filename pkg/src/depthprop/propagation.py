"""Iterative spatial propagation of depth with dilated stencils.

Two interchangeable engines refine a coarse depth grid by repeatedly
replacing every pixel with a convex combination of its own original value
and its stencil neighbors' current values:

* propagate_naive: the reference engine, a literal per-pixel loop. Slow on
  purpose; it is the oracle the fast path is verified against and the
  baseline the benchmark harness times.
* propagate_accelerated: the same recurrence expressed as whole-plane
  shifts and elementwise products, so each iteration is a handful of
  vectorized passes instead of millions of scalar updates.

Per iteration, pixel i becomes

    d[i] <- w_self(i) * d0[i] + sum_x  A_x(i) * d[i + rate * x]

where A_x are the field's receiver-indexed neighbor planes and the self
weight is the per-pixel deficit 1 - sum of the in-bounds neighbor weights
(weights pointing outside the grid fold into the self term, keeping the
update a convex combination at borders). The self term always references
the original grid d0, not the previous iterate. A dilation schedule runs
the loop in phases, scaling the stencil offsets by each phase's rate.
Optionally, pixels that are valid in an anchor grid are reset to their
anchor values after every iteration so refinement preserves trusted
sparse measurements.
"""

import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .affinity import AffinityField
from .validation import as_depth_grid, check_positive_int, check_same_shape

#: canonical dilation-rate stacks for the named schedule variants
_VARIANT_RATES = {"c1": (1,), "c2": (2, 1), "c4": (4, 2, 1)}


@dataclass(frozen=True)
class DilationSchedule:
    """Ordered propagation phases, each a (dilation rate, iteration count) pair."""

    phases: tuple

    def __post_init__(self):
        phases = tuple((int(rate), int(count)) for rate, count in self.phases)
        if not phases:
            raise ValueError("schedule must contain at least one phase")
        for rate, count in phases:
            check_positive_int(rate, "dilation rate")
            check_positive_int(count, "iteration count")
        rates = [rate for rate, _ in phases]
        if any(b > a for a, b in zip(rates, rates[1:])):
            warnings.warn(
                f"dilation rates increase across phases: {rates}; coarse-to-fine "
                "(non-increasing) ordering is the usual configuration",
                stacklevel=2,
            )
        object.__setattr__(self, "phases", phases)

    @property
    def total_iterations(self):
        return sum(count for _, count in self.phases)

    def __str__(self):
        return "+".join(f"{rate}x{count}" for rate, count in self.phases)


def schedule_c(variant, total_iterations=12):
    """Build one of the named schedules c1, c2, c4.

    c1 runs every iteration at unit dilation; c2 spends the first half at
    rate 2 and the rest at rate 1; c4 steps through rates 4, 2, 1 in equal
    thirds. Totals that do not divide evenly are split with the excess
    going to the earlier (coarser) phases.
    """
    key = str(variant).lower()
    if key not in _VARIANT_RATES:
        known = ", ".join(sorted(_VARIANT_RATES))
        raise ValueError(f"unknown schedule variant {variant!r} (expected one of {known})")
    rates = _VARIANT_RATES[key]
    check_positive_int(total_iterations, "total_iterations")
    if total_iterations < len(rates):
        raise ValueError(
            f"schedule {key} needs at least {len(rates)} iterations, "
            f"got {total_iterations}"
        )
    base, extra = divmod(total_iterations, len(rates))
    counts = [base + (1 if i < extra else 0) for i in range(len(rates))]
    return DilationSchedule(tuple(zip(rates, counts)))


@dataclass(frozen=True)
class PropagationConfig:
    """Propagation run settings.

    anchor_valid resets every pixel that is valid (> 0) in anchor_source to
    its measured value after each iteration; anchor_source is required in
    that case and ignored otherwise.
    """

    schedule: DilationSchedule
    anchor_valid: bool = False
    anchor_source: np.ndarray = dataclass_field(default=None, repr=False)

    def __post_init__(self):
        if self.anchor_valid:
            if self.anchor_source is None:
                raise ValueError("anchor_valid requires an anchor_source grid")
            object.__setattr__(
                self, "anchor_source", as_depth_grid(self.anchor_source, "anchor_source")
            )


def translate(plane, offset, rate=1):
    """Shift a plane so output(p) = input(p + rate * offset), zero-filled.

    This is the one-hot stencil translation the accelerated engine is built
    from: content moves along -offset.
    """
    plane = np.asarray(plane, dtype=np.float32)
    check_positive_int(rate, "rate")
    dy, dx = (int(offset[0]) * rate, int(offset[1]) * rate)
    height, width = plane.shape
    out = np.zeros_like(plane)
    rows = slice(max(0, -dy), min(height, height - dy))
    cols = slice(max(0, -dx), min(width, width - dx))
    if rows.start < rows.stop and cols.start < cols.stop:
        out[rows, cols] = plane[rows.start + dy : rows.stop + dy,
                                cols.start + dx : cols.stop + dx]
    return out


def _check_inputs(d0, field, config, state0):
    d0 = as_depth_grid(d0, "d0")
    if not isinstance(field, AffinityField):
        raise TypeError("expected an AffinityField")
    if field.shape != d0.shape:
        raise ValueError(
            f"shape mismatch: d0 is {d0.shape}, affinity planes are {field.shape}"
        )
    if np.any(field.planes < 0):
        raise ValueError("affinity field is unnormalized: negative weights present")
    sums = field.planes.sum(axis=0, dtype=np.float64)
    worst = float(sums.max())
    if worst > 1.0 + 1e-6:
        raise ValueError(
            f"affinity field is unnormalized: per-pixel neighbor sum up to {worst:.8f}"
        )
    if config.anchor_valid:
        check_same_shape(config.anchor_source, d0, "anchor_source", "d0")
    if state0 is None:
        state0 = d0
    else:
        state0 = as_depth_grid(state0, "state0")
        check_same_shape(state0, d0, "state0", "d0")
    return d0, state0


def _scaled_inbounds_offsets(offsets, rate, shape):
    """(dy, dx) offsets scaled by the dilation rate, with their in-bounds
    destination/source slice pairs; fully out-of-range offsets drop out."""
    height, width = shape
    scaled = []
    for index, (dy, dx) in enumerate(offsets):
        sy, sx = dy * rate, dx * rate
        rows = slice(max(0, -sy), min(height, height - sy))
        cols = slice(max(0, -sx), min(width, width - sx))
        if rows.start >= rows.stop or cols.start >= cols.stop:
            continue
        src = (slice(rows.start + sy, rows.stop + sy), slice(cols.start + sx, cols.stop + sx))
        scaled.append((index, sy, sx, (rows, cols), src))
    return scaled


def propagate_naive(d0, field, config, *, state0=None):
    """Reference propagation: direct per-pixel evaluation of the recurrence.

    state0 optionally seeds the iterate with something other than d0 (the
    self term still references d0), which lets callers split a schedule
    across calls; it defaults to d0.
    """
    d0, state0 = _check_inputs(d0, field, config, state0)
    height, width = d0.shape
    offsets = field.offsets

    # Plain Python floats and nested lists keep the loop honest and the
    # arithmetic in 64-bit; the result is rounded to float32 at the end.
    d0_rows = d0.astype(np.float64).tolist()
    state = state0.astype(np.float64).tolist()
    weight_rows = [plane.astype(np.float64).tolist() for plane in field.planes]

    anchors = []
    if config.anchor_valid:
        for v, u in np.argwhere(config.anchor_source > 0):
            anchors.append((int(v), int(u), float(config.anchor_source[v, u])))

    for rate, iterations in config.schedule.phases:
        scaled = [(dy * rate, dx * rate, weight_rows[i])
                  for i, (dy, dx) in enumerate(offsets)]
        for _ in range(iterations):
            nxt = []
            for v in range(height):
                d0_row = d0_rows[v]
                out_row = [0.0] * width
                for u in range(width):
                    acc = 0.0
                    inbounds_sum = 0.0
                    for sy, sx, wplane in scaled:
                        nv = v + sy
                        if nv < 0 or nv >= height:
                            continue
                        nu = u + sx
                        if nu < 0 or nu >= width:
                            continue
                        w = wplane[v][u]
                        inbounds_sum += w
                        acc += w * state[nv][nu]
                    out_row[u] = (1.0 - inbounds_sum) * d0_row[u] + acc
                nxt.append(out_row)
            state = nxt
            for v, u, value in anchors:
                state[v][u] = value

    return np.asarray(state, dtype=np.float32)


def propagate_accelerated(d0, field, config, *, state0=None):
    """Plane-parallel propagation, numerically equivalent to propagate_naive.

    Each iteration gathers every neighbor's contribution with a single
    translated-plane product and accumulates in float64; the per-phase self
    weight folds out-of-bounds neighbor mass back into the center.
    """
    d0, state0 = _check_inputs(d0, field, config, state0)
    state = state0.copy()

    if config.anchor_valid:
        anchor_mask = config.anchor_source > 0
        anchor_values = config.anchor_source[anchor_mask]

    for rate, iterations in config.schedule.phases:
        scaled = _scaled_inbounds_offsets(field.offsets, rate, d0.shape)
        inbounds_sum = np.zeros(d0.shape, dtype=np.float32)
        for index, _, _, dst, _ in scaled:
            inbounds_sum[dst] += field.planes[index][dst]
        base = (1.0 - inbounds_sum) * d0  # float32, reused every iteration

        for _ in range(iterations):
            acc = base.astype(np.float64)
            for index, _, _, dst, src in scaled:
                acc[dst] += field.planes[index][dst] * state[src]
            state = acc.astype(np.float32)
            if config.anchor_valid:
                state[anchor_mask] = anchor_values

    return state
