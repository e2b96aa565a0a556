"""Deterministic parallel parameter sweeps over a descending grid.

The outer variable of f(x) = int_a^b g(x, k) dk is discretized on a
descending grid (np points from zmax down to zmax/np), the index range is
partitioned into contiguous chunks, and each chunk is evaluated by one
worker into a shared output buffer.  Chunks are static and writes are
disjoint, so the result is bitwise identical for every worker count.
"""

import multiprocessing
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DeterminismError, EvaluationError, ValidationError

__all__ = [
    "SweepSpec",
    "Grid",
    "IndexRange",
    "SweepReport",
    "make_grid",
    "partition",
    "run_sweep",
    "benchmark_sweep",
    "resolve_workers",
]

WORKERS_ENV_VAR = "GRAVSWEEP_WORKERS"


@dataclass(frozen=True)
class SweepSpec:
    """Grid length, grid start, and worker count for one sweep."""

    np: int
    zmax: float
    workers: int = 1

    def __post_init__(self):
        if self.np < 1:
            raise ValidationError(f"np must be >= 1, got {self.np}")
        if not (self.zmax > 0.0):
            raise ValidationError(f"zmax must be > 0, got {self.zmax}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class Grid:
    """Evaluation points, values[i] = zmax - i * (zmax / np), strictly descending."""

    values: np.ndarray
    descending: bool = True

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class IndexRange:
    """Half-open index range [start, end) owned by one worker."""

    start: int
    end: int


@dataclass
class SweepReport:
    """Wall times and speedups of the same sweep at several worker counts."""

    worker_counts: list
    wall_times: list
    speedups: list = field(default_factory=list)


def make_grid(spec):
    """Build the descending grid defined by spec: np points starting at zmax,
    ending at zmax/np."""
    deltaz = spec.zmax / spec.np
    values = spec.zmax - np.arange(spec.np, dtype=float) * deltaz
    return Grid(values=values, descending=True)


def partition(n, workers):
    """Split [0, n) into min(workers, n) contiguous ranges whose sizes differ
    by at most one; the first n mod workers ranges carry the extra element."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    w = min(workers, n)
    base, extra = divmod(n, w)
    ranges = []
    start = 0
    for i in range(w):
        size = base + (1 if i < extra else 0)
        ranges.append(IndexRange(start, start + size))
        start += size
    return ranges


def resolve_workers(workers=None):
    """Default worker count: explicit argument, else GRAVSWEEP_WORKERS, else
    the number of available processing units."""
    if workers is not None:
        if workers < 1:
            raise ValidationError(f"workers must be >= 1, got {workers}")
        return int(workers)
    env = os.environ.get(WORKERS_ENV_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ValidationError(
                f"{WORKERS_ENV_VAR} must be a positive integer, got {env!r}"
            ) from None
        if value < 1:
            raise ValidationError(
                f"{WORKERS_ENV_VAR} must be a positive integer, got {env!r}"
            )
        return value
    return os.cpu_count() or 1


def _fill_range(evaluator, values, rng, out):
    """Fill out[i] for i in rng.  Each element is computed from a plain float
    so the arithmetic is identical in serial and forked execution.  Returns
    None on success, (index, x, message) on evaluator failure."""
    i = rng.start
    try:
        for i in range(rng.start, rng.end):
            out[i] = float(evaluator(float(values[i])))
    except Exception as exc:
        return (i, float(values[i]), repr(exc))
    return None


def run_sweep(grid, evaluator, workers=None):
    """Evaluate evaluator(x) at every grid point, in parallel.

    The evaluator must be pure: same input, same output, no observable side
    effects.  The output array is bitwise identical for every worker count.
    Evaluator faults abort the sweep and report the failing index and grid
    value.
    """
    values = grid.values
    n = len(values)
    if n < 1:
        raise ValidationError("grid must contain at least one point")
    w = min(resolve_workers(workers), n)

    try:
        ctx = multiprocessing.get_context("fork") if w > 1 else None
    except ValueError:  # no fork on this platform: serial fallback
        ctx = None

    out = np.empty(n, dtype=float)
    if ctx is None:
        fault = _fill_range(evaluator, values, IndexRange(0, n), out)
        if fault is not None:
            index, x, message = fault
            raise EvaluationError(
                f"evaluator failed at index {index} (x={x!r}): {message}",
                where=index,
            )
        return out
    buf = ctx.RawArray("d", n)
    errors = ctx.SimpleQueue()
    procs = []
    for rng in partition(n, w):
        p = ctx.Process(target=_child_fill, args=(evaluator, values, rng, buf, errors))
        p.start()
        procs.append(p)
    for p in procs:
        p.join()

    if not errors.empty():
        index, x, message = errors.get()
        raise EvaluationError(
            f"evaluator failed at index {index} (x={x!r}): {message}", where=index
        )
    out[:] = np.frombuffer(buf, dtype=float, count=n)
    return out


def _child_fill(evaluator, values, rng, buf, errors):
    """Child-process body: fill the owned slice of the shared buffer."""
    fault = _fill_range(evaluator, values, rng, buf)
    if fault is not None:
        errors.put(fault)


def benchmark_sweep(grid, evaluator, worker_counts):
    """Time run_sweep once per worker count after one untimed warm-up.

    Outputs from every worker count are compared bitwise before the report
    is produced; any mismatch is a determinism violation and raises.
    Speedups are relative to the 1-worker time (or the first count's time
    when 1 is not measured).
    """
    if not worker_counts:
        raise ValidationError("worker_counts must be non-empty")
    counts = [int(w) for w in worker_counts]
    for w in counts:
        if w < 1:
            raise ValidationError(f"worker counts must be >= 1, got {w}")

    run_sweep(grid, evaluator, counts[0])  # warm-up, untimed

    times = []
    outputs = []
    for w in counts:
        t0 = time.perf_counter()
        out = run_sweep(grid, evaluator, w)
        times.append(time.perf_counter() - t0)
        outputs.append(out)

    reference = outputs[0].tobytes()
    for w, out in zip(counts[1:], outputs[1:]):
        if out.tobytes() != reference:
            raise DeterminismError(
                f"sweep output with workers={w} differs bitwise from "
                f"workers={counts[0]}"
            )

    baseline = times[counts.index(1)] if 1 in counts else times[0]
    speedups = [baseline / t for t in times]
    return SweepReport(worker_counts=counts, wall_times=times, speedups=speedups)
