"""Acceptance criteria 1-12, one PASS/FAIL line each.

Run with pytest, or directly (``python3 tests/test_acceptance.py``) for the summary lines only.
"""

from __future__ import annotations

import math
import random
import sys
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

import mpmath
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bfree.chowla import (bernoulli_convergence, bias, bias_bound_holds, chowla_correlation,  # noqa: E402
                          make_context, mu_prefix)
from bfree.dynamics import (GroupPoint, advance, arithmetic_average, empirical_frequency,  # noqa: E402
                            phi_window, recovery_trials, short_interval_hypothesis_check,
                            short_interval_mean)
from bfree.family import explicit, r_free, rooted, rooted_primes  # noqa: E402
from bfree.measure import (nu_cylinder, nu_exact_finite, nu_M_correlation,  # noqa: E402
                           nu_one_cylinder, sign_product)
from bfree.patterns import Pattern  # noqa: E402
from bfree.sieve import sieve_eta, sieve_mu, twin_count  # noqa: E402
from bfree.subshift import (count_words_bruteforce, count_words_dp, entropy_interval,  # noqa: E402
                            gamma_bracket_check)


def _six_over_pi_squared() -> tuple[Fraction, Fraction]:
    """A 1e-40-wide rational bracket around 6/pi^2."""
    with mpmath.workdps(60):
        v = mpmath.mpf(6) / mpmath.pi**2
        num = int(mpmath.floor(v * 10**45))
    return Fraction(num, 10**45), Fraction(num + 1, 10**45)


SIX_PI2 = _six_over_pi_squared()


def within(x: Fraction, target_lo: Fraction, target_hi: Fraction, tol: Fraction) -> bool:
    """|x - t| <= tol for every t in [target_lo, target_hi]."""
    return max(abs(x - target_lo), abs(x - target_hi)) <= tol


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str, seconds: float | None = None, limit: float | None = None):
        timing = ""
        if seconds is not None:
            timing = f" [{seconds:.2f}s / limit {limit:g}s]"
            ok = ok and seconds <= limit
        with capsys.disabled():
            print(f"\nCRITERION {number:2d} {'PASS' if ok else 'FAIL'}: {detail}{timing}")
        assert ok, detail

    return emit


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_01_entropy(report):
    sq = r_free(2)
    iv, dt = timed(lambda: entropy_interval(sq, sq.index_for_base(10**6)))
    ok = iv.width <= Fraction(2, 10**6) and iv.lo <= SIX_PI2[0] and SIX_PI2[1] <= iv.hi
    report(1, ok, f"entropy enclosure [{float(iv.lo):.9f}, {float(iv.hi):.9f}] width {float(iv.width):.2e}",
           dt, 2)


def test_criterion_02_density(report):
    rep, dt = timed(lambda: empirical_frequency(r_free(2), Pattern.parse("1"), 10**7))
    ok = within(rep.empirical, *SIX_PI2, Fraction(1, 10**3))
    report(2, ok, f"frequency of '1' up to 1e7 = {float(rep.empirical):.7f}", dt, 15)


def test_criterion_03_oracle_equivalence(report):
    rng = random.Random(20240601)
    fams = [explicit(4, 9), explicit(4, 9, 25), explicit(2), explicit(3, 4, 5)]
    checked = mismatches = 0
    for fam in fams:
        pats = ["".join(c) for w in range(1, 7) for c in product("01", repeat=w)]
        while len(pats) < 126 + 50:
            cells = "".join(rng.choice("01*") for _ in range(rng.randint(2, 8)))
            if "*" in cells and set(cells) != {"*"}:
                pats.append(cells)
        for cells in pats:
            p = Pattern.parse(cells)
            iv = nu_cylinder(p, fam)
            checked += 1
            if not (iv.is_exact and iv.value == nu_exact_finite(p, fam)):
                mismatches += 1
    report(3, mismatches == 0, f"{checked} patterns over 4 families, {mismatches} mismatches")


def test_criterion_04_word_counts(report):
    bad = [
        (mods, n)
        for mods in [(2,), (4,), (4, 9), (3, 5)]
        for n in range(0, 16)
        if count_words_dp(n, explicit(*mods)).count != count_words_bruteforce(n, explicit(*mods)).count
    ]
    b1, b2 = gamma_bracket_check(36, (4, 9)), gamma_bracket_check(4, (4,))
    ok = not bad and b1.holds and b2.holds
    report(4, ok, f"dp == brute for n <= 15 ({len(bad)} mismatches); "
                  f"bracket {{4,9}},36: {b1.lower} <= {b1.count} <= {b1.upper}; "
                  f"{{4}},4: {b2.lower} <= {b2.count} <= {b2.upper}")


def test_criterion_05_twins(report):
    sq = r_free(2)
    N = 10**7

    def run():
        return twin_count(sq, N, 2), nu_one_cylinder({1, 3}, sq, sq.index_for_base(10**6))

    (count, ref), dt = timed(run)
    freq = Fraction(count, N)
    ok = within(freq, ref.lo, ref.hi, Fraction(1, 10**3))
    report(5, ok, f"twin frequency {float(freq):.7f} vs enclosure [{float(ref.lo):.6f}, {float(ref.hi):.6f}]",
           dt, 20)


def test_criterion_06_short_intervals(report):
    sq = r_free(2)

    def run():
        mean, _, _ = short_interval_mean(sq, Pattern.parse("1"), 1000, 10**6, 10**7, seed=6)
        return mean, short_interval_hypothesis_check(sq, 10**3, 10**6)

    (mean, (hmax, _)), dt = timed(run)
    ok = within(mean, *SIX_PI2, Fraction(5, 10**3)) and hmax <= 1
    report(6, ok, f"short-interval mean {float(mean):.6f}, max moduli per window {hmax}", dt, 60)


def test_criterion_07_arithmetic(report):
    rep, dt = timed(lambda: arithmetic_average(r_free(2), Pattern.parse("1"), 2, 3, 10**6))
    m = rep.params["m"]
    ok = m == 2 and within(rep.empirical, *SIX_PI2, Fraction(1, 10**3))
    report(7, ok, f"m = {m}, averaged frequency {float(rep.empirical):.7f}", dt, 10)


def test_criterion_08_recovery(report):
    trials, dt = timed(lambda: recovery_trials((4, 9, 25, 49), 10**4, 100, seed=8))
    singles = sum(t.all_singletons for t in trials)
    truth = sum(t.contains_truth for t in trials)
    report(8, singles >= 99 and truth == 100, f"{singles}/100 all singletons, {truth}/100 contain truth", dt, 5)


def test_criterion_09_bias(report):
    b23 = bias(make_context(rooted(2, 3)))
    b35 = bias(make_context(rooted(3, 5)))
    bound = bias_bound_holds(make_context(rooted_primes(3, 1000)))
    ok = b23.is_exact and b23.value == Fraction(1, 2) and b35.is_exact and b35.value == Fraction(3, 5) and bound
    report(9, ok, f"bias {{2,3}} = {b23.value}, {{3,5}} = {b35.value}, exp(-2 Sigma) bound on [3,1000]: {bound}")


def test_criterion_10_bernoulli(report):
    Xs = (10, 10**2, 10**3, 10**4)

    def run():
        ctxs = [make_context(rooted_primes(3, X)) for X in Xs]
        return ctxs, bernoulli_convergence(ctxs, 1), bernoulli_convergence(ctxs, 2, "mc", 10**6, seed=10)

    (ctxs, rows1, rows2), dt = timed(run)
    exact_ok = all(
        r.deviation == abs(sign_product(c.family).value) / 2 for r, c in zip(rows1, ctxs)
    )
    d1 = [r.deviation for r in rows1]
    strict = all(a > b for a, b in zip(d1, d1[1:]))
    mono = all(
        b.deviation <= a.deviation + 3 * math.hypot(a.standard_error, b.standard_error)
        for a, b in zip(rows2, rows2[1:])
    )
    detail = ("m=1 " + ", ".join(f"{float(d):.5f}" for d in d1) + "; m=2 "
              + ", ".join(f"{float(r.deviation):.5f}" for r in rows2)
              + f" (SE ~{rows2[0].standard_error:.1e})")
    report(10, exact_ok and strict and mono, detail, dt, 120)


def test_criterion_11_chowla_substitute(report):
    ok, checks = True, 0
    for fam in (rooted(2, 3), rooted(3, 5), rooted(2, 5, 7)):
        P = math.prod(fam.roots) ** 2
        mu = mu_prefix(fam, 2 * P + 10)
        for shifts in [(0,), (0, 1), (0, 2), (0, 1, 3), (1, 4, 6)]:
            even = (2,) * len(shifts)
            emp = chowla_correlation(mu, shifts, even, 2 * P)
            ok &= emp == nu_M_correlation(shifts, even, fam).value
            ok &= emp == nu_one_cylinder({s + 1 for s in shifts}, fam).value
            for odd in product((1, 2), repeat=len(shifts)):
                if 1 in odd:
                    ok &= nu_M_correlation(shifts, odd, fam).value == 0
                    checks += 1
            checks += 1
    report(11, ok, f"{checks} even/odd correlation identities on 3 finite rooted families")


def test_criterion_12_invariants(report):
    def run():
        ok = True
        sq, mob = r_free(2), rooted_primes()
        rng = np.random.default_rng(12)
        for _ in range(20):
            lo = int(rng.integers(1, 10**8))
            n = int(rng.integers(1, 20000))
            seg = int(rng.integers(64, 5000))
            ok &= np.array_equal(sieve_eta(sq, lo, lo + n).eta, sieve_eta(sq, lo, lo + n, segment=seg, threads=4).eta)
            a, b = sieve_mu(mob, lo, lo + n), sieve_mu(mob, lo, lo + n, segment=seg, threads=4)
            ok &= np.array_equal(a.mu, b.mu) and np.array_equal(a.delta, b.delta)
        mods = (4, 9, 25, 49, 121)
        for _ in range(1000):
            p = GroupPoint.random(mods, rng)
            s = int(rng.integers(0, 500))
            ok &= np.array_equal(phi_window(advance(p, s), 300), phi_window(p, 300 + s)[s:])
        for fam in (explicit(4, 9), explicit(4, 9, 25), explicit(2), explicit(3, 4, 5)):
            for w in range(1, 5):
                ok &= sum(nu_cylinder(Pattern("".join(c)), fam).value for c in product("01", repeat=w)) == 1
        return ok

    ok, dt = timed(run)
    report(12, ok, "segment splitting, shift equivariance on 1000 points, partition of unity", dt, 10)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
