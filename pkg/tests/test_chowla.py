from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from bfree.chowla import (bernoulli_convergence, bias, bias_bound_holds, chowla_correlation,
                          exp_neg_two_sigma, make_context, mu_prefix, nu_prime_empirical,
                          nu_prime_exact, nu_prime_montecarlo, sign_histogram)
from bfree.errors import InvalidInput, NoSamples, SigmaInfinite
from bfree.family import rooted, rooted_primes
from bfree.measure import nu_M_correlation, nu_one_cylinder
from bfree.patterns import SignedPattern
import oracles


@pytest.mark.parametrize("roots", [(2, 3), (3, 5), (3, 5, 7)])
def test_exact_sign_measure_matches_period_count(roots):
    f = rooted(*roots)
    for w in (1, 2, 3):
        for cells in product("+-*", repeat=w):
            cells = "".join(cells)
            assert nu_prime_exact(f, SignedPattern.parse(cells)) == oracles.sign_period_frequency(cells, roots)


def test_orbit_average_over_period_is_exact():
    f = rooted(3, 5)
    a = SignedPattern.parse("+-")
    assert nu_prime_empirical(f, a, 15 * 4) == nu_prime_exact(f, a)


def test_montecarlo_close_and_seeded():
    ctx = make_context(rooted(3, 5))
    a = SignedPattern.parse("-+")
    est = nu_prime_montecarlo(ctx, a, 200_000, seed=3)
    assert abs(float(est.estimate - nu_prime_exact(ctx.family, a))) < 5 * est.standard_error
    assert est.hits == nu_prime_montecarlo(ctx, a, 200_000, seed=3).hits


def test_histogram_independent_of_threads():
    ctx = make_context(rooted_primes(3, 100))
    h1 = sign_histogram(ctx, 2, 300_000, seed=9, threads=1)
    h4 = sign_histogram(ctx, 2, 300_000, seed=9, threads=4)
    assert np.array_equal(h1, h4)


def test_errors():
    with pytest.raises(SigmaInfinite):
        nu_prime_montecarlo(make_context(rooted_primes(), 100), SignedPattern.parse("+"), 10, 0)
    with pytest.raises(NoSamples):
        nu_prime_montecarlo(make_context(rooted(3)), SignedPattern.parse("+"), 0, 0)
    with pytest.raises(InvalidInput):
        nu_prime_exact(rooted(3), SignedPattern.parse("+0"))


def test_bias_values():
    assert bias(make_context(rooted(2, 3))).value == Fraction(1, 2)
    assert bias(make_context(rooted(3, 5))).value == Fraction(3, 5)
    assert bias_bound_holds(make_context(rooted_primes(3, 1000)))


def test_exp_enclosure():
    iv = exp_neg_two_sigma(Fraction(1, 2))
    e_inv = Fraction(0.36787944117144233)
    assert abs(iv.lo - e_inv) < Fraction(1, 10**16) and abs(iv.hi - e_inv) < Fraction(1, 10**16)
    assert 0 < iv.width < Fraction(1, 10**30)


def test_chowla_even_exponents_match_eta_reference():
    f = rooted(2, 3)
    P = 36
    mu = mu_prefix(f, 3 * P + 5)
    assert chowla_correlation(mu, (0, 1), (2, 2), 3 * P) == nu_one_cylinder({1, 2}, f).value
    assert chowla_correlation(mu, (0, 2, 5), (2, 2, 2), P) == nu_M_correlation((0, 2, 5), (2, 2, 2), f).value


def test_bernoulli_m1_exact_and_decreasing():
    ctxs = [make_context(rooted_primes(3, X)) for X in (10, 100, 1000)]
    rows = bernoulli_convergence(ctxs, 1)
    devs = [r.deviation for r in rows]
    assert devs[0] == Fraction(1, 14)
    assert devs == sorted(devs, reverse=True) and len(set(devs)) == 3
