from fractions import Fraction
import math

import pytest

from bfree.errors import LengthOverCap, NotMultipleOfPeriod, StateBudgetExceeded
from bfree.family import explicit, r_free
from bfree.subshift import (count_words_bruteforce, count_words_dp, entropy_bounds_from_count,
                            entropy_interval, gamma_bracket_check)
import oracles


@pytest.mark.parametrize("mods", [(2,), (4,), (4, 9), (3, 5)])
def test_dp_equals_bruteforce(mods):
    f = explicit(*mods)
    for n in range(0, 13):
        assert count_words_dp(n, f).count == count_words_bruteforce(n, f).count


@pytest.mark.parametrize("mods,n", [((2,), 10), ((4, 9), 12), ((3, 5), 11), ((4,), 9)])
def test_dp_equals_orbit_closure(mods, n):
    assert count_words_dp(n, explicit(*mods)).count == oracles.admissible_count_by_orbit(mods, n)


def test_small_counts():
    assert count_words_dp(3, explicit(2)).count == 5  # 000 100 001 101 010
    assert count_words_dp(4, explicit(4)).count == 15


def test_bracket():
    rep = gamma_bracket_check(36, (4, 9))
    assert rep.exponent == 24 and rep.count == 374003761 and rep.holds
    assert gamma_bracket_check(4, (4,)).holds
    with pytest.raises(NotMultipleOfPeriod):
        gamma_bracket_check(35, (4, 9))


def test_entropy():
    assert entropy_interval(explicit(4, 9, 25)).value == Fraction(16, 25)
    iv = entropy_interval(r_free(2), 2000)
    assert iv.lo < Fraction(6 / math.pi**2) < iv.hi


def test_truncated_count_grows_with_K():
    sq = r_free(2)
    a = count_words_dp(12, moduli=sq.prefix(1)).count
    b = count_words_dp(12, moduli=sq.prefix(2)).count
    assert a >= b and count_words_dp(12, sq).count == b


def test_limits():
    with pytest.raises(LengthOverCap):
        count_words_bruteforce(21, explicit(2))
    with pytest.raises(StateBudgetExceeded):
        count_words_dp(60, r_free(2), state_budget=2**20)


def test_count_bounds():
    lo, hi = entropy_bounds_from_count(count_words_dp(12, explicit(4, 9)))
    assert lo <= Fraction(math.log2(1695) / 12) <= hi
