"""Slow, independent reference implementations used only by the tests."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product


def factorize(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_r_free(n: int, r: int) -> bool:
    return all(e < r for e in factorize(n).values())


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def eta(n: int, moduli) -> int:
    return int(all(n % b for b in moduli))


def signed_mu(n: int, roots) -> tuple[int, int, int]:
    """(delta, pi, mu) for a rooted family, from the definition."""
    delta = sum(1 for a in roots if n % a == 0)
    pi = (-1) ** delta
    return delta, pi, pi * eta(n, [a * a for a in roots])


def period_frequency(cells: str, moduli) -> Fraction:
    """Frequency of a 1/0/* pattern in eta over one full period, by direct counting."""
    P = math.prod(moduli)
    w = len(cells)
    seq = [eta(n, moduli) for n in range(1, P + w + 1)]
    hits = 0
    for o in range(P):
        if all(c == "*" or seq[o + j] == int(c) for j, c in enumerate(cells)):
            hits += 1
    return Fraction(hits, P)


def windows(moduli, n: int):
    """Every length-n coding window x_1..x_n over all points of the finite group."""
    for w in product(*(range(b) for b in moduli)):
        yield tuple(int(all((wk + j) % b for wk, b in zip(w, moduli))) for j in range(1, n + 1))


def admissible_count_by_orbit(moduli, n: int) -> int:
    """Words dominated coordinatewise by some coding window (the hereditary closure)."""
    seen = set()
    for win in set(windows(moduli, n)):
        ones = [j for j, x in enumerate(win) if x]
        for mask in range(1 << len(ones)):
            seen.add(sum(1 << ones[i] for i in range(len(ones)) if mask >> i & 1))
    return len(seen)


def primes_by_trial(limit: int) -> list[int]:
    return [p for p in range(2, limit + 1) if all(p % q for q in range(2, math.isqrt(p) + 1))]


def sign_period_frequency(signs: str, roots) -> Fraction:
    """Frequency of a +/-/* pattern in pi over one full period prod(a)."""
    P = math.prod(roots)
    w = len(signs)
    pi = [signed_mu(n, roots)[1] for n in range(1, P + w + 1)]
    want = {"+": 1, "-": -1}
    hits = sum(
        all(c == "*" or pi[o + j] == want[c] for j, c in enumerate(signs)) for o in range(P)
    )
    return Fraction(hits, P)
