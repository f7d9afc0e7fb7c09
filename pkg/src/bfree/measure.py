"""Cylinder measures of the B-free system and of its signed extension."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import InvalidInput, NotRootedFamily, PatternTooWide, PeriodTooLarge
from .family import BFamily
from .interval import IntervalValue, exact_product, fixed_product, weierstrass_floor
from .patterns import ETA_VALUES, Pattern, SignedPattern, match_mask
from .sieve import eta_prefix

DEFAULT_TERM_BUDGET = 2**20
DEFAULT_PERIOD_BUDGET = 10**7


def residue_count(A: Iterable[int], b: int) -> int:
    """Number of residue classes modulo b met by A."""
    return len({n % b for n in A})


def first_violation(A: Iterable[int], family: BFamily) -> int | None:
    """Smallest modulus whose residue classes are all met by A, if any."""
    A = set(A)
    # b > |A| can never be exhausted
    for b in family.moduli_upto(len(A)):
        if residue_count(A, b) == b:
            return b
    return None


def is_admissible_set(A: Iterable[int], family: BFamily) -> bool:
    return first_violation(A, family) is None


def support(word) -> set[int]:
    return {j for j, x in enumerate(word, 1) if int(x) == 1}


def is_admissible_word(word, family: BFamily) -> bool:
    return is_admissible_set(support(word), family)


# -- products over the family ----------------------------------------------

def _resolve_K(family: BFamily, K: int | None, needed: int) -> int:
    if K is None:
        K = family.default_K
    # moduli up to `needed` must be inside the truncation for t() to be right
    return max(K, family.count_upto(needed))


@lru_cache(maxsize=4096)
def _tail_product(family: BFamily, start: int, K: int, d: int) -> tuple[Fraction, Fraction]:
    """Enclosure of prod_{start <= k < K} (1 - d/b_k), 0-based k."""
    factors = ((b - d, b) for b in family.prefix(K)[start:])
    if family.finite:
        v = exact_product(factors)
        return v, v
    return fixed_product(factors)


def _set_product(D: frozenset[int], family: BFamily, K: int) -> tuple[Fraction, Fraction]:
    """Enclosure of prod_k (1 - t(D, b_k)/b_k) over all k, truncated at K plus tail."""
    if not D:
        return Fraction(1), Fraction(1)
    span = max(D) - min(D)
    mods = family.prefix(K)
    # beyond the span every element of D sits in its own residue class
    head_end = 0
    while head_end < len(mods) and mods[head_end] <= span:
        head_end += 1
    head = exact_product((b - residue_count(D, b), b) for b in mods[:head_end])
    if head == 0:
        return Fraction(0), Fraction(0)
    tlo, thi = _tail_product(family, head_end, K, len(D))
    lo, hi = head * tlo, head * thi
    exact_all = family.finite and K >= len(family.moduli)
    if not exact_all:
        lo = weierstrass_floor(lo, len(D) * family.tail_bound(K))
    return lo, hi


def nu_one_cylinder(A: Iterable[int], family: BFamily, K: int | None = None) -> IntervalValue:
    """Measure of the cylinder {x_n = 1 for n in A}.

    K is raised if needed so that every modulus <= max(A) - min(A) is covered.
    """
    A = frozenset(A)
    if not A:
        return IntervalValue.exact(1)
    if not is_admissible_set(A, family):
        return IntervalValue.exact(0)
    K = _resolve_K(family, K, max(A) - min(A) + 1)
    return IntervalValue.clamped(*_set_product(A, family, K))


def nu_cylinder(p: Pattern, family: BFamily, K: int | None = None,
                budget: int = DEFAULT_TERM_BUDGET) -> IntervalValue:
    """Measure of the cylinder with ones at A and zeros at B, by inclusion-exclusion over B."""
    A, B = p.ones, sorted(p.zeros)
    if 2 ** len(B) > budget:
        raise PatternTooWide(f"2^{len(B)} inclusion-exclusion terms exceed budget {budget}")
    if not is_admissible_set(A, family):
        return IntervalValue.exact(0)
    K = _resolve_K(family, K, p.width)
    lo = hi = Fraction(0)
    for size in range(len(B) + 1):
        for extra in combinations(B, size):
            tlo, thi = _set_product(A | frozenset(extra), family, K)
            if size % 2 == 0:
                lo += tlo
                hi += thi
            else:
                lo -= thi
                hi -= tlo
    return IntervalValue.clamped(lo, hi)


def nu_exact_finite(p: Pattern, family: BFamily, budget: int = DEFAULT_PERIOD_BUDGET) -> Fraction:
    """Cylinder measure by counting matches of p in eta over one full period."""
    if not family.finite:
        raise InvalidInput("nu_exact_finite needs a finite family")
    period = 1
    for b in family.moduli:
        period *= b
        if period > budget:
            raise PeriodTooLarge(f"period exceeds budget {budget}")
    eta = eta_prefix(family, period + p.width)
    hits = np.count_nonzero(match_mask(eta, p.cells, ETA_VALUES, period))
    return Fraction(int(hits), period)


# -- signed extension --------------------------------------------------------

def _require_rooted(family: BFamily) -> None:
    if not family.rooted:
        raise NotRootedFamily("operation needs a rooted family (b_k = a_k^2)")


def nu_M_cylinder(s: SignedPattern, family: BFamily, K: int | None = None,
                  budget: int = DEFAULT_TERM_BUDGET) -> IntervalValue:
    _require_rooted(family)
    if all(c == "*" for c in s.cells):
        return IntervalValue.exact(1)
    return nu_cylinder(s.squared(), family, K, budget).scale(Fraction(1, 2**s.weight))


def _check_correlation_args(shifts, exponents) -> None:
    if not shifts:
        raise InvalidInput("need r >= 1 shifts")
    if len(shifts) != len(exponents):
        raise InvalidInput("shifts and exponents differ in length")
    if any(s < 0 for s in shifts) or any(b <= a for a, b in zip(shifts, shifts[1:])):
        raise InvalidInput("shifts must satisfy 0 <= s_1 < ... < s_r")
    if any(i not in (1, 2) for i in exponents):
        raise InvalidInput("exponents must be 1 or 2")


def nu_M_correlation(shifts, exponents, family: BFamily, K: int | None = None) -> IntervalValue:
    """Integral of prod_j z_{s_j+1}^{i_j} against the signed measure.

    Any odd exponent makes the sign sum vanish; all-even reduces to eta.
    """
    shifts, exponents = tuple(shifts), tuple(exponents)
    _check_correlation_args(shifts, exponents)
    if 1 in exponents:
        return IntervalValue.exact(0)
    return nu_one_cylinder({s + 1 for s in shifts}, family, K)


def sign_product(family: BFamily, K: int | None = None) -> IntervalValue:
    """Enclosure of prod_k (1 - 2/a_k)."""
    _require_rooted(family)
    if K is None:
        K = family.default_K
    roots = family.root_prefix(K)
    if 2 in roots:
        return IntervalValue.exact(0)
    factors = ((a - 2, a) for a in roots)
    if family.finite:
        head = exact_product(factors)
        if K >= len(family.moduli):
            return IntervalValue.exact(head)
        rest = family.sigma() - family.sigma_prefix(K)
        return IntervalValue.clamped(weierstrass_floor(head, 2 * rest), head)
    _, hi = fixed_product(factors)
    # every remaining factor lies in [0, 1); the tail of 1/a_k diverges
    return IntervalValue.clamped(0, hi)
