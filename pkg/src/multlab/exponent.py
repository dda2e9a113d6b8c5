"""Growth-exponent machinery: checkpointed partial sums, envelope fits,
and the normalized-partial-sum (Kronecker-style) decay check.

The object of interest is the hypothesis "partial sums grow like x^alpha
for some alpha < 1".  Raw partial sums oscillate through zero, so the
exponent is fitted on the running-maximum envelope M(x) = max_{y<=x} |S(y)|
in log-log coordinates; the slope estimates alpha.  Verdicts are
three-valued with fixed thresholds -- finite data cannot decide an
asymptotic claim, and the reports say only what the trace shows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .multfunc import (
    DerivedFunctionKind,
    PrimeFunctionSpec,
    coefficient_stream,
    integer_coefficient_stream,
    spec_is_pm1,
)
from .primesums import (
    DECAY_FACTOR,
    FLAT_FACTOR,
    FLOOR,
    VERDICT_WINDOW,
)
from .sieve import FactorSieve
from .summation import (
    checkpoint_schedule,
    exact_prefix_sums_at,
    prefix_sums_at,
)

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_INCONCLUSIVE = "inconclusive"


class InsufficientDataError(ValueError):
    """Too few usable checkpoints inside the fitting window."""


@dataclass(frozen=True)
class PartialSumSeries:
    """Checkpointed partial sums sum_{n<=x} a(n) of one coefficient stream.

    ``exact`` marks series accumulated on the integer path (coefficient
    values all in {-1, 0, 1}), where every reported sum is exact.
    """

    x: np.ndarray
    sums: np.ndarray
    kind: DerivedFunctionKind
    spec_id: str
    exact: bool

    def __post_init__(self) -> None:
        if len(self.x) != len(self.sums):
            raise ValueError("checkpoint and sum arrays must align")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("checkpoints must be strictly ascending")


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares exponent of the envelope: log M(x) ~ alpha log x + c."""

    alpha_hat: float
    stderr: float
    window: tuple[int, int]
    points_used: int
    epsilon_slack: float


def checkpoint_partial_sums(
    spec: PrimeFunctionSpec,
    kind: DerivedFunctionKind,
    x_max: int,
    sieve: FactorSieve,
    schedule: np.ndarray | None = None,
) -> PartialSumSeries:
    """Partial sums of the selected stream at a geometric checkpoint grid.

    Streams with all values in {-1, 0, 1} take the exact int64 path; other
    streams are accumulated with compensated segment sums.  Both paths are
    deterministic and independent of any upstream parallelism.
    """
    if not 1 <= x_max <= sieve.limit:
        raise ValueError(f"x_max={x_max} outside [1, sieve limit {sieve.limit}]")
    if schedule is None:
        schedule = checkpoint_schedule(x_max)
    schedule = np.asarray(schedule, dtype=np.int64)
    if schedule.size and (schedule[0] < 1 or schedule[-1] > x_max):
        raise ValueError("schedule must lie within [1, x_max]")
    exact = spec_is_pm1(spec)
    if exact:
        coeffs = integer_coefficient_stream(spec, kind, x_max, sieve)
        sums = exact_prefix_sums_at(coeffs, schedule).astype(np.float64)
    else:
        coeffs = coefficient_stream(spec, kind, x_max, sieve)
        sums = prefix_sums_at(coeffs, schedule)
    return PartialSumSeries(
        x=schedule.copy(),
        sums=sums,
        kind=kind,
        spec_id=spec.spec_id(),
        exact=exact,
    )


def running_max_envelope(series: PartialSumSeries) -> np.ndarray:
    """M(x) = running maximum of |sum| over checkpoints up to x."""
    return np.maximum.accumulate(np.abs(series.sums))


def fit_exponent(
    series: PartialSumSeries,
    window: tuple[int, int] | None = None,
    epsilon_slack: float = 0.05,
) -> ExponentFit:
    """Fit alpha in M(x) ~ C x^alpha on the running-max envelope.

    The default window drops the first decade of checkpoints (small-x
    transients otherwise dominate the fit).  Checkpoints where the envelope
    is still zero are excluded -- log of zero carries no information.

    Raises
    ------
    InsufficientDataError
        Fewer than 8 usable checkpoints in the window.
    """
    envelope = running_max_envelope(series)
    x = series.x.astype(np.float64)
    if window is None:
        x_lo = float(series.x[0]) * 10.0
        window = (int(x_lo), int(series.x[-1]))
    lo, hi = window
    mask = (x >= lo) & (x <= hi) & (envelope > 0.0)
    used = int(np.count_nonzero(mask))
    if used < 8:
        raise InsufficientDataError(
            f"only {used} usable checkpoints in window [{lo}, {hi}]; "
            "need >= 8 -- widen the window or extend x_max"
        )
    result = stats.linregress(np.log(x[mask]), np.log(envelope[mask]))
    return ExponentFit(
        alpha_hat=float(result.slope),
        stderr=float(result.stderr),
        window=(int(lo), int(hi)),
        points_used=used,
        epsilon_slack=float(epsilon_slack),
    )


def kronecker_check(
    coefficients: np.ndarray,
    sigma: float,
    x_max: int,
    schedule: np.ndarray | None = None,
) -> tuple[PartialSumSeries, np.ndarray, str]:
    """Trace of sum_{n<=x} a(n) / x^sigma with a three-valued decay verdict.

    ``coefficients[i]`` is a(i+1).  If the weighted series sum a(n) n^-sigma
    converges, the normalized partial sums must tend to zero; the verdict
    says whether the trace is consistent with that at desk scale: trailing
    dyadic-window maxima of |sum|/x^sigma must each drop below DECAY_FACTOR
    times the previous window's to pass, stay above FLAT_FACTOR to fail,
    anything in between is inconclusive.

    Returns (series, normalized values, verdict).
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    coeffs = np.asarray(coefficients, dtype=np.float64)
    if len(coeffs) < x_max:
        raise ValueError(
            f"coefficient array has {len(coeffs)} entries, needs >= x_max={x_max}"
        )
    if schedule is None:
        schedule = checkpoint_schedule(x_max)
    schedule = np.asarray(schedule, dtype=np.int64)
    sums = prefix_sums_at(coeffs[:x_max], schedule)
    series = PartialSumSeries(
        x=schedule.copy(),
        sums=sums,
        kind=DerivedFunctionKind.F_PLAIN,
        spec_id="external-coefficients",
        exact=False,
    )
    normalized = np.abs(sums) / schedule.astype(np.float64) ** sigma

    # group checkpoints into trailing dyadic windows (x halving each step)
    scale = max(1.0, float(np.max(normalized))) if normalized.size else 1.0
    floor = FLOOR * scale
    window_maxima: list[float] = []
    hi = float(x_max)
    while hi >= schedule[0] and len(window_maxima) < VERDICT_WINDOW + 1:
        lo = hi / 2.0
        in_window = (schedule.astype(np.float64) > lo) & (
            schedule.astype(np.float64) <= hi
        )
        if np.any(in_window):
            window_maxima.append(float(np.max(normalized[in_window])))
        hi = lo
    window_maxima.reverse()  # chronological: small x first
    if len(window_maxima) < 3:
        return series, normalized, VERDICT_INCONCLUSIVE
    if all(m <= floor for m in window_maxima):
        return series, normalized, VERDICT_PASS
    steps = list(zip(window_maxima[:-1], window_maxima[1:]))
    decaying = sum(
        1 for before, after in steps if after <= max(DECAY_FACTOR * before, floor)
    )
    flat = sum(
        1 for before, after in steps if after > floor and after >= FLAT_FACTOR * before
    )
    if decaying == len(steps):
        return series, normalized, VERDICT_PASS
    if flat == len(steps):
        return series, normalized, VERDICT_FAIL
    return series, normalized, VERDICT_INCONCLUSIVE
