"""Segmented sieves for the B-free indicator and the generalized Moebius data.

Arrays are indexed from ``lo``: position 0 holds the value at n = lo.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DeltaSaturated, NotRootedFamily, Overflow, RangeEmpty
from .family import BFamily
from .primes import primes_upto

MAX_N = 2**62
SEGMENT = 1 << 22


@dataclass(frozen=True)
class SieveSegment:
    lo: int
    hi: int
    eta: np.ndarray
    delta: np.ndarray | None = None
    pi: np.ndarray | None = None
    mu: np.ndarray | None = None

    def __len__(self) -> int:
        return self.hi - self.lo

    def at(self, n: int) -> dict:
        i = n - self.lo
        if not 0 <= i < len(self):
            raise IndexError(n)
        rec = {"n": n, "eta": int(self.eta[i])}
        if self.delta is not None:
            rec.update(delta=int(self.delta[i]), pi=int(self.pi[i]), mu=int(self.mu[i]))
        return rec

    def hex(self) -> str:
        """eta as a packed big-endian bitstream, first bit = n = lo."""
        return np.packbits(self.eta.astype(bool)).tobytes().hex()


def _check_range(lo: int, hi: int) -> None:
    if lo < 1 or hi <= lo:
        raise RangeEmpty(f"need 1 <= lo < hi, got [{lo}, {hi})")
    if hi > MAX_N:
        raise Overflow(f"hi={hi} exceeds {MAX_N}")


def _mark_eta(moduli, lo: int, hi: int) -> np.ndarray:
    eta = np.ones(hi - lo, dtype=np.uint8)
    for b in moduli:
        if b >= hi:
            break
        eta[(-lo) % b :: b] = 0
    return eta


def _count_roots(roots, lo: int, hi: int) -> np.ndarray:
    delta = np.zeros(hi - lo, dtype=np.uint16)
    for a in roots:
        if a >= hi:
            break
        delta[(-lo) % a :: a] += 1
    return delta


def _count_prime_factors(primes, base_min: int, lo: int, hi: int) -> np.ndarray:
    """Distinct prime factors p >= base_min of each n in [lo, hi).

    Only primes up to sqrt(hi) are sieved; whatever cofactor survives is a
    single larger prime.
    """
    delta = np.zeros(hi - lo, dtype=np.uint16)
    rest = np.arange(lo, hi, dtype=np.int64)
    for p in primes:
        start = (-lo) % p
        if start >= hi - lo:
            continue
        if p >= base_min:
            delta[start::p] += 1
        q = p
        while q < hi:
            rest[(-lo) % q :: q] //= p
            q *= p
    delta += (rest > 1) & (rest >= base_min)
    return delta


def _split(lo: int, hi: int, segment: int):
    return [(s, min(s + segment, hi)) for s in range(lo, hi, segment)]


def _map_segments(fn, lo, hi, threads, segment):
    parts = _split(lo, hi, segment)
    if threads is None:
        threads = int(os.environ.get("BFREE_THREADS", "1"))
    if threads <= 1 or len(parts) == 1:
        return [fn(a, b) for a, b in parts]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda ab: fn(*ab), parts))


def sieve_eta(family: BFamily, lo: int, hi: int, *, threads: int | None = None,
              segment: int = SEGMENT) -> SieveSegment:
    """eta over the half-open range [lo, hi)."""
    _check_range(lo, hi)
    moduli = family.moduli_upto(hi - 1)
    parts = _map_segments(lambda a, b: _mark_eta(moduli, a, b), lo, hi, threads, segment)
    return SieveSegment(lo, hi, np.concatenate(parts))


def sieve_mu(family: BFamily, lo: int, hi: int, *, threads: int | None = None,
             segment: int = SEGMENT) -> SieveSegment:
    """eta, delta, pi and mu over [lo, hi) for a rooted family."""
    if not family.rooted:
        raise NotRootedFamily("sieve_mu needs a family of squares b_k = a_k^2")
    _check_range(lo, hi)
    moduli = family.moduli_upto(hi - 1)
    if family.finite:
        roots = family.roots_upto(hi - 1)
        count = lambda a, b: _count_roots(roots, a, b)  # noqa: E731
    else:
        # infinite rooted families are the primes >= base_min
        small = primes_upto(math.isqrt(hi - 1))
        count = lambda a, b: _count_prime_factors(small, family.base_min, a, b)  # noqa: E731

    def work(a, b):
        return _mark_eta(moduli, a, b), count(a, b)

    parts = _map_segments(work, lo, hi, threads, segment)
    eta = np.concatenate([p[0] for p in parts])
    wide = np.concatenate([p[1] for p in parts])
    if wide.size and int(wide.max()) > 255:
        raise DeltaSaturated("root-divisor count exceeds 255")
    delta = wide.astype(np.uint8)
    pi = (1 - 2 * (delta & 1).astype(np.int8)).astype(np.int8)
    mu = (eta.astype(np.int8) * pi).astype(np.int8)
    return SieveSegment(lo, hi, eta, delta, pi, mu)


def eta_prefix(family: BFamily, length: int, **kw) -> np.ndarray:
    """eta_1 .. eta_length as a uint8 array (index 0 is n = 1)."""
    return sieve_eta(family, 1, length + 1, **kw).eta


def twin_count(family: BFamily, N: int, gap: int, **kw) -> int:
    """Number of n <= N with eta_n = eta_{n+gap} = 1."""
    if N < 1 or gap < 1:
        raise RangeEmpty("need N >= 1 and gap >= 1")
    eta = sieve_eta(family, 1, N + gap + 1, **kw).eta
    return int(np.count_nonzero(eta[:N] & eta[gap : gap + N]))
