"""Benchmark harness comparing the propagation engines.

Inputs are generated once from a fixed seed and reused by both engines, so
a paired run both measures the speedup and cross-checks that the engines
agree at full resolution. Only the propagation itself is timed; input
generation and validation run outside the clock.
"""

import statistics
import time
from dataclasses import dataclass

import numpy as np

from .affinity import AffinityField, normalize
from .propagation import PropagationConfig, propagate_accelerated, propagate_naive

DEFAULT_SEED = 2024


@dataclass(frozen=True)
class BenchResult:
    label: str
    grid_shape: tuple
    schedule: str
    iterations: int
    median_seconds: float
    runs: int

    def as_dict(self):
        return {
            "label": self.label,
            "grid_shape": list(self.grid_shape),
            "schedule": self.schedule,
            "iterations": self.iterations,
            "median_seconds": self.median_seconds,
            "runs": self.runs,
        }


def make_bench_inputs(shape, kernel_size=3, seed=DEFAULT_SEED):
    """Deterministic benchmark instance: a dense coarse grid in [1, 80) m
    and a normalized random affinity field."""
    height, width = shape
    rng = np.random.default_rng(seed)
    d0 = rng.uniform(1.0, 80.0, size=(height, width)).astype(np.float32)
    raw = rng.standard_normal(
        (kernel_size * kernel_size - 1, height, width)
    ).astype(np.float32)
    field = normalize(AffinityField(kernel_size=kernel_size, planes=raw))
    return d0, field


_ENGINES = {"naive": propagate_naive, "accelerated": propagate_accelerated}


def _timed(engine, d0, field, config, warmup, runs):
    times = []
    output = None
    for i in range(warmup + runs):
        start = time.perf_counter()
        output = engine(d0, field, config)
        elapsed = time.perf_counter() - start
        if i >= warmup:
            times.append(elapsed)
    return times, output


def run_bench(shape, schedule, impl="accelerated", *, warmup=2, runs=5, seed=DEFAULT_SEED):
    """Time one engine on a deterministic instance; median of `runs` timed
    runs after `warmup` untimed ones."""
    if shape[0] < 8 or shape[1] < 8:
        raise ValueError(f"benchmark shape must be at least 8x8, got {shape}")
    if impl not in _ENGINES:
        raise ValueError(f"unknown implementation {impl!r}")
    if warmup < 2 or runs < 5:
        raise ValueError("benchmark protocol requires >= 2 warmup and >= 5 timed runs")
    d0, field = make_bench_inputs(shape, seed=seed)
    config = PropagationConfig(schedule=schedule)
    times, _ = _timed(_ENGINES[impl], d0, field, config, warmup, runs)
    return BenchResult(
        label=impl,
        grid_shape=tuple(shape),
        schedule=str(schedule),
        iterations=schedule.total_iterations,
        median_seconds=statistics.median(times),
        runs=runs,
    )


def run_pair(shape, schedule, *, warmup=2, runs=5, seed=DEFAULT_SEED):
    """Time both engines on identical inputs.

    Returns (naive result, accelerated result, max relative output
    difference); the difference doubles as a full-resolution equivalence
    check between the engines.
    """
    d0, field = make_bench_inputs(shape, seed=seed)
    config = PropagationConfig(schedule=schedule)
    naive_times, naive_out = _timed(propagate_naive, d0, field, config, warmup, runs)
    accel_times, accel_out = _timed(propagate_accelerated, d0, field, config, warmup, runs)
    denom = np.maximum(np.abs(naive_out), 1e-12)
    max_rel = float(np.max(np.abs(naive_out - accel_out) / denom))
    common = dict(
        grid_shape=tuple(shape),
        schedule=str(schedule),
        iterations=schedule.total_iterations,
        runs=runs,
    )
    return (
        BenchResult(label="naive", median_seconds=statistics.median(naive_times), **common),
        BenchResult(
            label="accelerated", median_seconds=statistics.median(accel_times), **common
        ),
        max_rel,
    )
