"""Smallest-prime-factor sieve and the classical arithmetic functions.

The central object is :class:`FactorSieve`: a table ``spf[n]`` holding the
smallest prime factor of every ``n`` up to a limit.  Factorization is then
repeated division by ``spf``, giving lambda(n), mu(n), mu^2(n) and Omega(n)
in O(log n) per query with no per-call allocation beyond the result.

Construction is segmented (fixed-size blocks) and may be internally
thread-parallel: segments are disjoint slices of the output array, so the
result is byte-identical regardless of thread count or scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

#: segment length for the sieve construction loop (elements, ~4 MiB of u32)
_SEGMENT = 1 << 20


@dataclass(frozen=True)
class FactorSieve:
    """Smallest-prime-factor table for 1..limit.

    Attributes
    ----------
    limit : int
        Inclusive upper bound N.
    spf : np.ndarray
        uint32 array of length N+1; ``spf[n]`` is the smallest prime factor
        of n for 2 <= n <= N.  ``spf[1] = 1`` is a sentinel so factorization
        loops need no special case; ``spf[0] = 0`` is unused.
    """

    limit: int
    spf: np.ndarray

    def __post_init__(self) -> None:
        if self.spf.shape != (self.limit + 1,):
            raise ValueError("spf length must equal limit + 1")


def _check_range(n: int, sieve: FactorSieve, lo: int = 1) -> None:
    if not lo <= n <= sieve.limit:
        raise ValueError(f"argument {n} outside [{lo}, sieve limit {sieve.limit}]")


def _sieve_segment(spf: np.ndarray, small_primes_desc: np.ndarray, lo: int, hi: int) -> None:
    """Fill spf[lo:hi) -- writes touch only this slice, safe to run in parallel."""
    view = spf[lo:hi]
    for p in small_primes_desc:
        p = int(p)
        start = max(2 * p, ((lo + p - 1) // p) * p)
        if start >= hi:
            continue
        # descending prime order: the last (smallest) write wins
        view[start - lo :: p] = p
    idx = np.nonzero(view == 0)[0]
    view[idx] = (idx + lo).astype(np.uint32)


def build_sieve(limit: int, threads: int = 0) -> FactorSieve:
    """Build the smallest-prime-factor table for 1..limit.

    Parameters
    ----------
    limit : int
        Inclusive bound, >= 2.  Practical maximum is set by memory
        (4 bytes per integer: 4 GB at 10^9) and by the uint32 cell type
        (limit < 2^32); the segmented loop itself scales past 10^9.
    threads : int
        0 = auto (cpu count), 1 = sequential, k > 1 = worker threads.
        Output is byte-identical for every setting: workers own disjoint
        segments of the output array.

    Returns
    -------
    FactorSieve
    """
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    if limit >= 2 ** 32:
        raise ValueError(f"limit {limit} exceeds uint32 cell capacity")
    try:
        spf = np.zeros(limit + 1, dtype=np.uint32)
    except MemoryError as exc:  # pragma: no cover - depends on host memory
        raise MemoryError(
            f"cannot allocate {(limit + 1) * 4} bytes for spf table (limit={limit})"
        ) from exc

    root = math.isqrt(limit)
    # boolean sieve of the small primes used to mark composites
    small = np.ones(root + 1, dtype=bool)
    small[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if small[p]:
            small[p * p :: p] = False
    small_primes_desc = np.nonzero(small)[0][::-1].astype(np.uint32)

    starts = list(range(0, limit + 1, _SEGMENT))
    if threads == 0:
        threads = min(len(starts), os.cpu_count() or 1)
    if threads <= 1 or len(starts) <= 1:
        for lo in starts:
            _sieve_segment(spf, small_primes_desc, lo, min(lo + _SEGMENT, limit + 1))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(
                pool.map(
                    lambda lo: _sieve_segment(
                        spf, small_primes_desc, lo, min(lo + _SEGMENT, limit + 1)
                    ),
                    starts,
                )
            )

    spf[0] = 0
    spf[1] = 1
    return FactorSieve(limit=limit, spf=spf)


def factorize(n: int, sieve: FactorSieve) -> list[tuple[int, int]]:
    """Canonical factorization of n as [(p, a), ...] with ascending primes.

    ``factorize(1)`` is the empty list.
    """
    _check_range(n, sieve)
    spf = sieve.spf
    out: list[tuple[int, int]] = []
    m = n
    while m > 1:
        p = int(spf[m])
        a = 0
        while m % p == 0:
            m //= p
            a += 1
        out.append((p, a))
    return out


def big_omega(n: int, sieve: FactorSieve) -> int:
    """Omega(n): number of prime factors counted with multiplicity."""
    _check_range(n, sieve)
    spf = sieve.spf
    count = 0
    m = n
    while m > 1:
        m //= int(spf[m])
        count += 1
    return count


def liouville(n: int, sieve: FactorSieve) -> int:
    """(-1)^Omega(n); completely multiplicative, -1 at every prime."""
    return -1 if big_omega(n, sieve) & 1 else 1


def moebius(n: int, sieve: FactorSieve) -> int:
    """mu(n): 0 unless n is squarefree, else (-1)^(number of prime factors)."""
    _check_range(n, sieve)
    spf = sieve.spf
    m = n
    sign = 1
    while m > 1:
        p = int(spf[m])
        m //= p
        if m % p == 0:
            return 0
        sign = -sign
    return sign


def is_squarefree(n: int, sieve: FactorSieve) -> bool:
    """True iff no prime divides n twice."""
    return moebius(n, sieve) != 0


def primes_up_to(x: int, sieve: FactorSieve) -> np.ndarray:
    """Ascending int64 array of the primes in [2, x]."""
    if x > sieve.limit:
        raise ValueError(f"x={x} exceeds sieve limit {sieve.limit}")
    if x < 2:
        return np.empty(0, dtype=np.int64)
    n = np.arange(x + 1, dtype=np.uint32)
    mask = sieve.spf[: x + 1] == n
    mask[:2] = False
    return np.nonzero(mask)[0].astype(np.int64)
