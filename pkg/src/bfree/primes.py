"""Prime generation and deterministic primality for 64-bit inputs."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> tuple[int, ...]:
    return tuple(simple_sieve(limit).tolist())


def primes_upto(limit: int) -> tuple[int, ...]:
    # round the cache key up so nearby limits share one sieve
    key = 1 << max(limit, 1).bit_length()
    ps = _cached_primes(key)
    if limit >= key:
        return ps
    import bisect

    return ps[: bisect.bisect_right(ps, limit)]


def first_primes(count: int) -> tuple[int, ...]:
    if count <= 0:
        return ()
    # p_n < n (ln n + ln ln n) for n >= 6
    n = max(count, 6)
    bound = int(n * (math.log(n) + math.log(math.log(n)))) + 10
    ps = primes_upto(bound)
    return ps[:count]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def iroot(n: int, r: int) -> int:
    """Largest integer x with x**r <= n."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2:
        return n
    x = int(round(n ** (1.0 / r)))
    while x**r > n:
        x -= 1
    while (x + 1) ** r <= n:
        x += 1
    return x
