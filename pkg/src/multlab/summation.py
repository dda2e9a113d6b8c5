"""Compensated summation helpers and geometric checkpoint schedules.

Partial sums at desk scale run over up to ~10^8 terms; naive left-to-right
float accumulation can drift by far more than the tolerances used in the
verification suite.  Everything here funnels through ``math.fsum`` (exactly
rounded sums), applied per segment, so that checkpointed prefix sums carry
at most a couple of ulps of error regardless of length -- and are
deterministic no matter how the caller parallelises upstream work.
"""

from __future__ import annotations

import math

import numpy as np

#: default growth ratio between consecutive checkpoints (quarter-octave grid)
DEFAULT_CHECKPOINT_RATIO = 2.0 ** 0.25

#: default first checkpoint
DEFAULT_CHECKPOINT_X0 = 10


def checkpoint_schedule(
    x_max: int,
    x0: int = DEFAULT_CHECKPOINT_X0,
    ratio: float = DEFAULT_CHECKPOINT_RATIO,
) -> np.ndarray:
    """Geometric grid of integer checkpoints ``x = ceil(x0 * ratio**k)``.

    The grid is strictly increasing, starts at ``min(x0, x_max)`` and always
    ends exactly at ``x_max``.  Dense enough for log-log exponent fitting,
    sparse enough (a few dozen points per decade at the default ratio) to
    keep traces cheap.

    Parameters
    ----------
    x_max : int
        Last checkpoint, inclusive.  Must be >= 1.
    x0 : int
        First checkpoint (clipped to ``x_max``).
    ratio : float
        Multiplicative step, must be > 1.

    Returns
    -------
    np.ndarray of int64, ascending, ending at ``x_max``.
    """
    if x_max < 1:
        raise ValueError(f"x_max must be >= 1, got {x_max}")
    if x0 < 1:
        raise ValueError(f"x0 must be >= 1, got {x0}")
    if not ratio > 1.0:
        raise ValueError(f"checkpoint ratio must be > 1, got {ratio}")
    points = []
    value = float(min(x0, x_max))
    x = int(math.ceil(value))
    while x < x_max:
        if not points or x > points[-1]:
            points.append(x)
        value *= ratio
        x = int(math.ceil(value))
    points.append(int(x_max))
    return np.asarray(points, dtype=np.int64)


def fsum_array(values: np.ndarray) -> float:
    """Exactly rounded sum of a float array (thin ``math.fsum`` wrapper)."""
    return math.fsum(values.tolist())


def prefix_sums_at(values: np.ndarray, boundaries: np.ndarray) -> np.ndarray:
    """Compensated prefix sums of ``values`` evaluated at index boundaries.

    ``boundaries`` are *counts*: entry ``b`` yields ``sum(values[:b])``.
    Each segment between consecutive boundaries is reduced with
    ``math.fsum``; every prefix is then itself an ``fsum`` over the exactly
    rounded segment sums, so each reported prefix carries two correctly
    rounded reductions rather than one rounding per term.

    For nonnegative inputs the outputs are nondecreasing.
    """
    bounds = np.asarray(boundaries, dtype=np.int64)
    if bounds.size == 0:
        return np.empty(0, dtype=np.float64)
    if np.any(bounds < 0) or np.any(bounds > len(values)):
        raise ValueError("boundaries out of range for values array")
    if np.any(np.diff(bounds) < 0):
        raise ValueError("boundaries must be nondecreasing")
    data = np.asarray(values, dtype=np.float64)
    segment_sums = []
    prev = 0
    for b in bounds:
        segment_sums.append(math.fsum(data[prev:b].tolist()))
        prev = int(b)
    out = np.empty(len(segment_sums), dtype=np.float64)
    for i in range(len(segment_sums)):
        out[i] = math.fsum(segment_sums[: i + 1])
    return out


def exact_prefix_sums_at(values: np.ndarray, boundaries: np.ndarray) -> np.ndarray:
    """Exact integer prefix sums (int64 values) at index boundaries.

    Intended for +/-1/0-valued coefficient streams: segment sums are exact
    in int64 (no segment exceeds 2^63 terms at desk scale) and are combined
    with Python integers, so the result is exact for any realistic length.
    """
    bounds = np.asarray(boundaries, dtype=np.int64)
    data = np.asarray(values)
    if data.dtype.kind not in "iu":
        raise TypeError("exact_prefix_sums_at requires an integer array")
    if bounds.size == 0:
        return np.empty(0, dtype=np.int64)
    if np.any(bounds < 0) or np.any(bounds > len(data)):
        raise ValueError("boundaries out of range for values array")
    if np.any(np.diff(bounds) < 0):
        raise ValueError("boundaries must be nondecreasing")
    out = np.empty(bounds.size, dtype=np.int64)
    total = 0
    prev = 0
    for i, b in enumerate(bounds):
        total += int(np.sum(data[prev:b], dtype=np.int64))
        prev = int(b)
        out[i] = total
    return out
