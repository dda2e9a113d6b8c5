"""Completely multiplicative functions defined by their values at primes.

A :class:`PrimeFunctionSpec` pins down f: it is a base rule (constant -1,
a constant c, or a power-decay family) plus a finite map of per-prime
exceptions.  Everything else is derived from f by closed forms on prime
powers -- never by explicit divisor-sum convolution:

* ``F_plain``  -- f itself, f(p^a) = f(p)^a;
* ``H_conv``   -- the divisor-sum transform 1*f, with
  h(p^a) = 1 + f(p) + ... + f(p)^a (always nonnegative for f in [-1,1]);
* ``G_conv``   -- the squarefree-kernel transform 1*(f mu^2), with
  g(p^a) = 1 + f(p) for every a >= 1;
* ``F_mu2``    -- f restricted to squarefree integers.

Bulk evaluation (``coefficient_stream``) walks the smallest-prime-factor
table once, peeling one prime power per pass over the surviving indices,
so a full stream to 10^7 costs a few seconds and no Python-level per-n
loop.  Streams whose values are provably integers (all f(p) in {-1,0,1})
also have an exact int64 path used by the partial-sum machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .sieve import FactorSieve, _check_range

BASE_LIOUVILLE = "liouville"
BASE_CONSTANT = "constant"
BASE_POWER_DECAY = "power_decay"

#: switch h(p^a) from the geometric closed form to direct summation when
#: f(p) is this close to 1, avoiding catastrophic cancellation in
#: (1 - f^( a+1)) / (1 - f)
_NEAR_ONE = 1e-8


class DerivedFunctionKind(Enum):
    """The four coefficient streams derived from one prime spec."""

    F_PLAIN = "F_plain"
    H_CONV = "H_conv"
    G_CONV = "G_conv"
    F_MU2 = "F_mu2"


def _is_prime_int(n: int) -> bool:
    """Deterministic trial-division primality check (fine for spec keys)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeFunctionSpec:
    """Defines a completely multiplicative f: N -> [-1, 1] via its primes.

    Attributes
    ----------
    base : str
        One of ``liouville`` (f(p) = -1), ``constant`` (f(p) = c),
        ``power_decay`` (f(p) = clamp(-1 + c * p^(-a), -1, 1)).
    c, a : float or None
        Parameters for the parametric bases; None where unused.
    exceptions : tuple of (prime, value)
        Per-prime overrides, sorted by prime; values constrained to [-1, 1].
    """

    base: str
    c: float | None = None
    a: float | None = None
    exceptions: tuple[tuple[int, float], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.base not in (BASE_LIOUVILLE, BASE_CONSTANT, BASE_POWER_DECAY):
            raise ValueError(f"unknown base rule {self.base!r}")
        if self.base == BASE_CONSTANT:
            if self.c is None or not -1.0 <= self.c <= 1.0:
                raise ValueError(f"constant base needs c in [-1, 1], got {self.c}")
        if self.base == BASE_POWER_DECAY:
            if self.c is None or self.a is None or not self.a > 0:
                raise ValueError(
                    f"power_decay base needs finite c and a > 0, got c={self.c} a={self.a}"
                )
        seen = set()
        for p, v in self.exceptions:
            if not _is_prime_int(p):
                raise ValueError(f"exception key {p} is not prime")
            if p in seen:
                raise ValueError(f"duplicate exception key {p}")
            seen.add(p)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"exception value for p={p} outside [-1, 1]: {v}")
        object.__setattr__(self, "exceptions", tuple(sorted(self.exceptions)))

    # -- construction helpers -------------------------------------------

    @staticmethod
    def _normalize_exceptions(
        exceptions: Mapping[int, float] | Iterable[tuple[int, float]] | None,
    ) -> tuple[tuple[int, float], ...]:
        if exceptions is None:
            return ()
        items = exceptions.items() if isinstance(exceptions, Mapping) else exceptions
        return tuple(sorted((int(p), float(v)) for p, v in items))

    @property
    def exception_map(self) -> dict[int, float]:
        return dict(self.exceptions)

    def spec_id(self) -> str:
        """Stable short identifier (used in CSV reports and filenames)."""
        parts = [self.base]
        if self.base == BASE_CONSTANT:
            parts.append(f"c={self.c:g}")
        elif self.base == BASE_POWER_DECAY:
            parts.append(f"c={self.c:g}")
            parts.append(f"a={self.a:g}")
        for p, v in self.exceptions:
            parts.append(f"{p}:{v:g}")
        return "+".join(parts)


def liouville_spec(
    exceptions: Mapping[int, float] | Iterable[tuple[int, float]] | None = None,
) -> PrimeFunctionSpec:
    """f(p) = -1 at every prime, modulo explicit exceptions."""
    return PrimeFunctionSpec(
        base=BASE_LIOUVILLE,
        exceptions=PrimeFunctionSpec._normalize_exceptions(exceptions),
    )


def constant_spec(
    c: float,
    exceptions: Mapping[int, float] | Iterable[tuple[int, float]] | None = None,
) -> PrimeFunctionSpec:
    """f(p) = c at every prime, c in [-1, 1]."""
    return PrimeFunctionSpec(
        base=BASE_CONSTANT,
        c=float(c),
        exceptions=PrimeFunctionSpec._normalize_exceptions(exceptions),
    )


def power_decay_spec(
    c: float,
    a: float,
    exceptions: Mapping[int, float] | Iterable[tuple[int, float]] | None = None,
) -> PrimeFunctionSpec:
    """f(p) = clamp(-1 + c * p^(-a), -1, 1); drifts toward -1 as p grows."""
    return PrimeFunctionSpec(
        base=BASE_POWER_DECAY,
        c=float(c),
        a=float(a),
        exceptions=PrimeFunctionSpec._normalize_exceptions(exceptions),
    )


# ---------------------------------------------------------------------------
# values at primes
# ---------------------------------------------------------------------------


def f_at_prime(spec: PrimeFunctionSpec, p: int) -> float:
    """Value of f at the prime p (exceptions override the base rule)."""
    if not _is_prime_int(p):
        raise ValueError(f"{p} is not prime")
    for q, v in spec.exceptions:
        if q == p:
            return v
    if spec.base == BASE_LIOUVILLE:
        return -1.0
    if spec.base == BASE_CONSTANT:
        return float(spec.c)
    return float(min(1.0, max(-1.0, -1.0 + spec.c * p ** (-spec.a))))


def f_at_primes(spec: PrimeFunctionSpec, primes: np.ndarray) -> np.ndarray:
    """Vectorized f(p) over an array of primes (assumed prime, not checked)."""
    p = np.asarray(primes, dtype=np.float64)
    if spec.base == BASE_LIOUVILLE:
        out = np.full(p.shape, -1.0)
    elif spec.base == BASE_CONSTANT:
        out = np.full(p.shape, float(spec.c))
    else:
        out = np.clip(-1.0 + spec.c * p ** (-spec.a), -1.0, 1.0)
    for q, v in spec.exceptions:
        out[np.asarray(primes) == q] = v
    return out


def spec_is_pm1(spec: PrimeFunctionSpec) -> bool:
    """True when every f(p) is provably in {-1, 0, +1}.

    Such specs admit exact integer coefficient streams for all four derived
    functions (h(p^a) is then 0, 1 or a+1; g(p^a) is 0, 1 or 2).
    """
    if any(v not in (-1.0, 0.0, 1.0) for _, v in spec.exceptions):
        return False
    if spec.base == BASE_LIOUVILLE:
        return True
    if spec.base == BASE_CONSTANT:
        return spec.c in (-1.0, 0.0, 1.0)
    return spec.c == 0.0  # power decay collapses to constant -1


# ---------------------------------------------------------------------------
# pointwise evaluation via closed forms on prime powers
# ---------------------------------------------------------------------------


def _h_prime_power(fp: float, a: int) -> float:
    """h(p^a) = 1 + fp + ... + fp^a, guarded against cancellation at fp ~ 1."""
    if abs(1.0 - fp) < _NEAR_ONE:
        total = 1.0
        term = 1.0
        for _ in range(a):
            term *= fp
            total += term
        return total
    return (1.0 - fp ** (a + 1)) / (1.0 - fp)


def _weight(kind: DerivedFunctionKind, fp: float, a: int) -> float:
    if kind is DerivedFunctionKind.F_PLAIN:
        return fp ** a
    if kind is DerivedFunctionKind.H_CONV:
        return _h_prime_power(fp, a)
    if kind is DerivedFunctionKind.G_CONV:
        return 1.0 + fp
    return fp if a == 1 else 0.0  # F_MU2


def _eval_pointwise(
    spec: PrimeFunctionSpec, kind: DerivedFunctionKind, n: int, sieve: FactorSieve
) -> float:
    _check_range(n, sieve)
    spf = sieve.spf
    result = 1.0
    m = n
    while m > 1:
        p = int(spf[m])
        a = 0
        while m % p == 0:
            m //= p
            a += 1
        result *= _weight(kind, f_at_prime(spec, p), a)
    return result


def eval_f(spec: PrimeFunctionSpec, n: int, sieve: FactorSieve) -> float:
    """f(n) = product of f(p)^a over the factorization of n; f(1) = 1."""
    return _eval_pointwise(spec, DerivedFunctionKind.F_PLAIN, n, sieve)


def eval_h(spec: PrimeFunctionSpec, n: int, sieve: FactorSieve) -> float:
    """(1*f)(n) via the geometric closed form on each prime power; >= 0."""
    return _eval_pointwise(spec, DerivedFunctionKind.H_CONV, n, sieve)


def eval_g(spec: PrimeFunctionSpec, n: int, sieve: FactorSieve) -> float:
    """(1*(f mu^2))(n): multiplicative with g(p^a) = 1 + f(p); >= 0."""
    return _eval_pointwise(spec, DerivedFunctionKind.G_CONV, n, sieve)


def eval_f_mu2(spec: PrimeFunctionSpec, n: int, sieve: FactorSieve) -> float:
    """f(n) * mu^2(n): kills every non-squarefree n."""
    return _eval_pointwise(spec, DerivedFunctionKind.F_MU2, n, sieve)


# ---------------------------------------------------------------------------
# bulk evaluation: one pass of strip-mining over the spf table
# ---------------------------------------------------------------------------


def _strip_factors(spf: np.ndarray, limit: int):
    """Yield (indices, primes, exponents, none_left) layer by layer.

    Every composite index surrenders one full prime power per iteration:
    ``indices`` is the slice of 2..limit still carrying factors, ``primes``
    and ``exponents`` describe the smallest prime power of each survivor.
    """
    rest = np.arange(limit + 1, dtype=np.int64)
    if limit >= 1:
        rest[0] = 1
    idx = np.nonzero(rest > 1)[0]
    while idx.size:
        r = rest[idx]
        p = spf[r].astype(np.int64)
        r = r // p
        a = np.ones(idx.size, dtype=np.int64)
        cur = np.nonzero(r % p == 0)[0]
        while cur.size:
            r[cur] //= p[cur]
            a[cur] += 1
            cur = cur[r[cur] % p[cur] == 0]
        yield idx, p, a
        rest[idx] = r
        idx = idx[r > 1]


def _weights_float(
    spec: PrimeFunctionSpec, kind: DerivedFunctionKind, p: np.ndarray, a: np.ndarray
) -> np.ndarray:
    """Vectorized w(p, a) for one strip layer (float path)."""
    fp = f_at_primes(spec, p)
    if kind is DerivedFunctionKind.F_PLAIN:
        return fp ** a
    if kind is DerivedFunctionKind.G_CONV:
        return 1.0 + fp
    if kind is DerivedFunctionKind.F_MU2:
        return np.where(a == 1, fp, 0.0)
    # H_CONV: geometric closed form, with the near-1 rescue branch
    near = np.abs(1.0 - fp) < _NEAR_ONE
    denom = np.where(near, 1.0, 1.0 - fp)
    w = (1.0 - fp ** (a + 1)) / denom
    if np.any(near):
        sub = np.nonzero(near)[0]
        fps, exps = fp[sub], a[sub]
        total = np.ones(sub.size)
        term = np.ones(sub.size)
        for j in range(1, int(exps.max()) + 1):
            term *= fps
            total += term * (exps >= j)
        w[sub] = total
    return w


def _weights_int(
    spec: PrimeFunctionSpec, kind: DerivedFunctionKind, p: np.ndarray, a: np.ndarray
) -> np.ndarray:
    """Vectorized w(p, a) on the exact integer path (f(p) in {-1, 0, 1})."""
    fp = f_at_primes(spec, p).astype(np.int64)
    if kind is DerivedFunctionKind.F_PLAIN:
        odd = (a & 1).astype(np.int64)
        return np.where(fp == 0, 0, np.where(fp == 1, 1, 1 - 2 * odd))
    if kind is DerivedFunctionKind.G_CONV:
        return 1 + fp
    if kind is DerivedFunctionKind.F_MU2:
        return np.where(a == 1, fp, 0)
    even = 1 - (a & 1).astype(np.int64)
    return np.where(fp == 0, 1, np.where(fp == 1, a + 1, even))  # H_CONV


def coefficient_stream(
    spec: PrimeFunctionSpec,
    kind: DerivedFunctionKind,
    limit: int,
    sieve: FactorSieve,
) -> np.ndarray:
    """Array of the selected function at n = 1..limit (index i holds a(i+1)).

    Identical to pointwise evaluation; computed in bulk by strip-mining the
    spf table (one prime power per layer, ~log log scaling of layer count).
    """
    if not 1 <= limit <= sieve.limit:
        raise ValueError(f"limit {limit} outside [1, sieve limit {sieve.limit}]")
    vals = np.ones(limit + 1, dtype=np.float64)
    vals[0] = 0.0
    for idx, p, a in _strip_factors(sieve.spf, limit):
        vals[idx] *= _weights_float(spec, kind, p, a)
    return vals[1:]


def integer_coefficient_stream(
    spec: PrimeFunctionSpec,
    kind: DerivedFunctionKind,
    limit: int,
    sieve: FactorSieve,
) -> np.ndarray:
    """Exact int64 stream for specs with f(p) in {-1, 0, 1}.

    Raises ValueError when the spec is not integer-valued; callers decide
    between this and the float stream via :func:`spec_is_pm1`.
    """
    if not spec_is_pm1(spec):
        raise ValueError("integer stream requires f(p) in {-1, 0, 1} everywhere")
    if not 1 <= limit <= sieve.limit:
        raise ValueError(f"limit {limit} outside [1, sieve limit {sieve.limit}]")
    vals = np.ones(limit + 1, dtype=np.int64)
    vals[0] = 0
    for idx, p, a in _strip_factors(sieve.spf, limit):
        vals[idx] *= _weights_int(spec, kind, p, a)
    return vals[1:]


LIOUVILLE = liouville_spec()
