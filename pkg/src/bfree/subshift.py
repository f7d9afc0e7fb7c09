"""Admissible word counts and the topological entropy of the B-free subshift."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import LengthOverCap, NotMultipleOfPeriod, StateBudgetExceeded
from .family import BFamily
from .interval import IntervalValue, exact_product, fixed_product, weierstrass_floor
from .measure import is_admissible_word

BRUTE_FORCE_CAP = 20
DEFAULT_STATE_BUDGET = 2**24


@dataclass(frozen=True)
class WordCount:
    n: int
    K_effective: int
    count: int

    @property
    def log2_per_symbol(self) -> float:
        return math.log2(self.count) / self.n if self.n else 0.0


def count_words_bruteforce(n: int, family: BFamily, cap: int = BRUTE_FORCE_CAP) -> WordCount:
    """gamma(n) by testing every binary word of length n."""
    if n > cap:
        raise LengthOverCap(f"n={n} exceeds brute-force cap {cap}")
    count = sum(1 for w in product((0, 1), repeat=n) if is_admissible_word(w, family))
    return WordCount(n, family.count_upto(n), count)


def _constraining(n: int, family: BFamily | None, moduli) -> tuple[int, ...]:
    if moduli is None:
        return family.moduli_upto(n)
    # moduli above n cannot have all their classes met by n positions
    return tuple(sorted(b for b in moduli if b <= n))


def count_words_dp(n: int, family: BFamily | None = None, *, moduli=None,
                   state_budget: int = DEFAULT_STATE_BUDGET) -> WordCount:
    """gamma_K(n) when ``moduli`` gives the prefix B_K, otherwise gamma(n).

    The state records, per modulus, which residue classes the support has
    met so far; a word dies as soon as one of those sets becomes full.
    """
    mods = _constraining(n, family, moduli)
    if 2 ** sum(mods) > state_budget:
        raise StateBudgetExceeded(f"2^{sum(mods)} DP states exceed budget {state_budget}")
    offsets, full = [], []
    pos = 0
    for b in mods:
        offsets.append(pos)
        full.append(((1 << b) - 1) << pos)
        pos += b

    counts = {0: 1}
    for j in range(1, n + 1):
        hit = sum(1 << (off + j % b) for off, b in zip(offsets, mods))
        nxt: dict[int, int] = {}
        for state, c in counts.items():
            nxt[state] = nxt.get(state, 0) + c
            s1 = state | hit
            if all(s1 & f != f for f in full):
                nxt[s1] = nxt.get(s1, 0) + c
        counts = nxt
    return WordCount(n, len(mods), sum(counts.values()))


@dataclass(frozen=True)
class BracketReport:
    n: int
    moduli: tuple[int, ...]
    exponent: int
    lower: int
    count: int
    upper: int

    @property
    def holds(self) -> bool:
        return self.lower <= self.count <= self.upper


def gamma_bracket_check(n: int, moduli, state_budget: int = DEFAULT_STATE_BUDGET) -> BracketReport:
    """Check 2^(n prod(1-1/b)) <= gamma_K(n) <= 2^(n prod(1-1/b)) prod(b) for n a multiple of prod(b)."""
    moduli = tuple(sorted(moduli))
    period = math.prod(moduli)
    if n <= 0 or n % period:
        raise NotMultipleOfPeriod(f"n={n} is not a positive multiple of {period}")
    exponent = n // period * math.prod(b - 1 for b in moduli)
    count = count_words_dp(n, moduli=moduli, state_budget=state_budget).count
    lower = 2**exponent
    return BracketReport(n, moduli, exponent, lower, count, lower * period)


def entropy_interval(family: BFamily, K: int | None = None) -> IntervalValue:
    """Enclosure of prod_k (1 - 1/b_k)."""
    if K is None:
        K = family.default_K
    factors = ((b - 1, b) for b in family.prefix(K))
    if family.finite and K >= len(family.moduli):
        return IntervalValue.exact(exact_product(factors))
    if family.finite:
        lo = hi = exact_product(factors)
    else:
        lo, hi = fixed_product(factors)
    return IntervalValue.clamped(weierstrass_floor(lo, family.tail_bound(K)), hi)


def entropy_bounds_from_count(wc: WordCount) -> tuple[Fraction, Fraction]:
    """Rational bracket on log2(count)/n from the bit length of the count."""
    bl = wc.count.bit_length()
    return Fraction(bl - 1, wc.n), Fraction(bl, wc.n)
