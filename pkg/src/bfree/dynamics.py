"""The odometer-like rotation, its coding map, and frequency experiments on eta."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInput, NotPrime, RangeEmpty, WindowTooShort
from .family import BFamily
from .interval import IntervalValue
from .measure import nu_cylinder
from .patterns import ETA_VALUES, Pattern, match_mask
from .primes import is_prime
from .sieve import eta_prefix, sieve_eta


@dataclass(frozen=True)
class GroupPoint:
    moduli: tuple[int, ...]
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.moduli) != len(self.coords):
            raise InvalidInput("one coordinate per modulus")
        for w, b in zip(self.coords, self.moduli):
            if not 0 <= w < b:
                raise InvalidInput(f"coordinate {w} outside Z/{b}Z")

    @classmethod
    def origin(cls, moduli) -> "GroupPoint":
        moduli = tuple(moduli)
        return cls(moduli, (0,) * len(moduli))

    @classmethod
    def random(cls, moduli, rng: np.random.Generator) -> "GroupPoint":
        """Haar-uniform point of the truncated group."""
        moduli = tuple(moduli)
        return cls(moduli, tuple(int(rng.integers(b)) for b in moduli))

    @property
    def K(self) -> int:
        return len(self.moduli)


def advance(p: GroupPoint, steps: int) -> GroupPoint:
    if steps < 0:
        raise InvalidInput("steps must be >= 0")
    return GroupPoint(p.moduli, tuple((w + steps) % b for w, b in zip(p.coords, p.moduli)))


def phi_window(p: GroupPoint, length: int) -> np.ndarray:
    """x_1..x_length of the coding of p: x_n = 0 iff w_k + n = 0 mod b_k for some k."""
    x = np.ones(length, dtype=np.uint8)
    for w, b in zip(p.coords, p.moduli):
        first = (-w) % b or b
        x[first - 1 :: b] = 0
    return x


# -- frequency reports -------------------------------------------------------

@dataclass
class FrequencyReport:
    pattern: str
    params: dict
    count: int
    total: int
    reference: IntervalValue | None = None
    supported: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def empirical(self) -> Fraction:
        return Fraction(self.count, self.total)

    @property
    def gap(self) -> Fraction | None:
        if self.reference is None:
            return None
        return self.reference.distance(self.empirical)


def _reference(family, pattern, K, reference):
    if reference is not None:
        return reference
    return nu_cylinder(pattern, family, K)


def empirical_frequency(family: BFamily, pattern: Pattern, N: int, K: int | None = None,
                        reference: IntervalValue | None = None, **kw) -> FrequencyReport:
    """(1/N) #{0 <= n < N : eta_{n+1..n+m} matches the pattern}."""
    if N < pattern.width:
        raise RangeEmpty("N must be at least the pattern width")
    eta = eta_prefix(family, N + pattern.width - 1, **kw)
    count = int(np.count_nonzero(match_mask(eta, pattern.cells, ETA_VALUES, N)))
    return FrequencyReport(str(pattern), {"N": N}, count, N, _reference(family, pattern, K, reference))


def short_interval_counts(family: BFamily, pattern: Pattern, N: int) -> tuple[int, int]:
    """Matches at offsets N <= n < N + isqrt(N), and the number of offsets."""
    if N < 4:
        raise RangeEmpty("short intervals need N >= 4")
    width = math.isqrt(N)
    seg = sieve_eta(family, N + 1, N + width + pattern.width)
    count = int(np.count_nonzero(match_mask(seg.eta, pattern.cells, ETA_VALUES, width)))
    return count, width


def short_interval_frequency(family: BFamily, pattern: Pattern, N: int, K: int | None = None,
                             reference: IntervalValue | None = None,
                             supported: bool = True) -> FrequencyReport:
    count, width = short_interval_counts(family, pattern, N)
    return FrequencyReport(str(pattern), {"N": N, "width": width}, count, width,
                           _reference(family, pattern, K, reference), supported)


def short_interval_mean(family: BFamily, pattern: Pattern, samples: int, lo: int, hi: int,
                        seed: int) -> tuple[Fraction, list[int], list[Fraction]]:
    """Mean short-interval frequency over `samples` seeded uniform N in [lo, hi]."""
    rng = np.random.default_rng(seed)
    starts = [int(n) for n in rng.integers(lo, hi + 1, size=samples)]
    freqs = []
    for n in starts:
        c, w = short_interval_counts(family, pattern, n)
        freqs.append(Fraction(c, w))
    return sum(freqs, Fraction(0)) / samples, starts, freqs


def short_interval_hypothesis_check(family: BFamily, x_lo: int, x_hi: int,
                                    grid: int = 1000) -> tuple[int, int]:
    """Max over x in [x_lo, x_hi] of #{b_k in [x, x + sqrt(x)]}, with a maximizing x.

    Sliding a window right until its left end meets a modulus never loses a
    modulus, so the moduli in range (plus x_lo) are the only candidates that
    matter; a deterministic grid is scanned as well.
    """
    if x_lo < 1 or x_hi < x_lo:
        raise RangeEmpty("need 1 <= x_lo <= x_hi")
    mods = family.moduli_upto(x_hi + math.isqrt(x_hi))
    candidates = {x_lo, x_hi}
    candidates.update(mods[bisect_left(mods, x_lo) : bisect_right(mods, x_hi)])
    step = max(1, (x_hi - x_lo) // grid)
    candidates.update(range(x_lo, x_hi + 1, step))
    best, arg = -1, x_lo
    for x in sorted(candidates):
        c = bisect_right(mods, x + math.isqrt(x)) - bisect_left(mods, x)
        if c > best:
            best, arg = c, x
    return best, arg


def averaging_exponent(family: BFamily, p: int) -> int:
    """p-adic valuation of the (unique) modulus divisible by p, or 0."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if family.finite:
        hits = [b for b in family.moduli if b % p == 0]
    else:
        # infinite families are prime powers q^r
        hits = [p**family.exponent] if p >= family.base_min else []
    if not hits:
        return 0
    b, m = hits[0], 0
    while b % p == 0:
        b //= p
        m += 1
    return m


def arithmetic_average(family: BFamily, pattern: Pattern, p: int, s: int, N: int,
                       K: int | None = None, reference: IntervalValue | None = None) -> FrequencyReport:
    """(1/p^m) sum_{r<p^m} (1/N) #{n < N : pattern matches at offset n p^s + r}."""
    if s < 1 or N < 1:
        raise InvalidInput("need s >= 1 and N >= 1")
    m = averaging_exponent(family, p)
    step, reps = p**s, p**m
    length = (N - 1) * step + reps - 1 + pattern.width
    eta = eta_prefix(family, length)
    count = sum(
        int(np.count_nonzero(match_mask(eta, pattern.cells, ETA_VALUES, N, start=r, step=step)))
        for r in range(reps)
    )
    return FrequencyReport(str(pattern), {"p": p, "s": s, "m": m, "N": N}, count, reps * N,
                           _reference(family, pattern, K, reference), extra={"m": m})


# -- coordinate recovery -----------------------------------------------------

def recover_coordinates(window, family, K: int | None = None) -> list[tuple[int, ...]]:
    """Per modulus b_k (k <= K), the residues z with window_n = 0 whenever z + n = 0 mod b_k.

    ``window[0]`` is x_1.  ``family`` may also be a plain sequence of moduli.
    """
    window = np.asarray(window, dtype=np.uint8)
    if isinstance(family, BFamily):
        moduli = family.prefix(family.default_K if K is None else K)
    else:
        moduli = tuple(family)[:K]
    W = len(window)
    if moduli and W < 2 * max(moduli):
        raise WindowTooShort(f"window length {W} < 2 * {max(moduli)}")
    n = np.arange(1, W + 1)
    ones_at = n[window == 1]
    out = []
    for b in moduli:
        ones = np.bincount(ones_at % b, minlength=b)
        out.append(tuple(sorted(int((-c) % b) for c in np.flatnonzero(ones == 0))))
    return out


@dataclass(frozen=True)
class RecoveryTrial:
    coords: tuple[int, ...]
    candidates: tuple[tuple[int, ...], ...]

    @property
    def contains_truth(self) -> bool:
        return all(w in c for w, c in zip(self.coords, self.candidates))

    @property
    def all_singletons(self) -> bool:
        return all(len(c) == 1 for c in self.candidates)


def recovery_trials(moduli, W: int, trials: int, seed: int) -> list[RecoveryTrial]:
    """Recover random points from their codings; one child seed per trial."""
    moduli = tuple(moduli)
    out = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        point = GroupPoint.random(moduli, np.random.default_rng(child))
        cands = recover_coordinates(phi_window(point, W), moduli)
        out.append(RecoveryTrial(point.coords, tuple(cands)))
    return out
