"""Statistics of the generalized Moebius sequence mu = eta * pi, pi_n = (-1)^delta_n.

Estimators of the sign-sequence measure come in three independent flavours:
orbit averages along pi itself, Monte Carlo over the truncated rotation
group, and (finite families only) an exact Fourier expansion.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import InvalidInput, NoSamples, NotRootedFamily, SigmaInfinite, WindowTooShort
from .family import BFamily
from .interval import PRECISION_BITS, IntervalValue
from .measure import _check_correlation_args, sign_product
from .patterns import FREE, MINUS, PLUS, SIGN_VALUES, SignedPattern, match_mask
from .sieve import sieve_mu

MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class RootedContext:
    family: BFamily
    K: int
    roots: tuple[int, ...]
    sigma: Fraction | None  # None when the sum of 1/a_k diverges
    tail: Fraction | None   # sum_{k>K} 1/a_k, None when infinite

    @property
    def sigma_finite(self) -> bool:
        return self.sigma is not None

    @property
    def sigma_K(self) -> Fraction:
        return sum((Fraction(1, a) for a in self.roots), Fraction(0))


def make_context(family: BFamily, K: int | None = None) -> RootedContext:
    if not family.rooted:
        raise NotRootedFamily("need a rooted family (b_k = a_k^2)")
    if K is None:
        K = family.default_K
    roots = family.root_prefix(K)
    if family.finite:
        sigma = family.sigma()
        return RootedContext(family, K, roots, sigma, sigma - sum((Fraction(1, a) for a in roots), Fraction(0)))
    return RootedContext(family, K, roots, None, None)


# -- correlations along mu ---------------------------------------------------

def chowla_correlation(mu: np.ndarray, shifts, exponents, N: int) -> Fraction:
    """(1/N) sum_{1<=n<=N} prod_j mu_{n+s_j}^{i_j}; ``mu[0]`` is mu_1."""
    shifts, exponents = tuple(shifts), tuple(exponents)
    _check_correlation_args(shifts, exponents)
    if N < 1:
        raise InvalidInput("N must be >= 1")
    if len(mu) < N + shifts[-1]:
        raise WindowTooShort(f"need mu_1..mu_{N + shifts[-1]}, have {len(mu)} terms")
    acc = np.ones(N, dtype=np.int64)
    for s, i in zip(shifts, exponents):
        acc *= mu[s : s + N].astype(np.int64) ** i
    return Fraction(int(acc.sum()), N)


def mu_prefix(family: BFamily, length: int) -> np.ndarray:
    return sieve_mu(family, 1, length + 1).mu


# -- sign-sequence measure ---------------------------------------------------

def _sign_cells(alpha: SignedPattern) -> None:
    if "0" in alpha.cells:
        raise InvalidInput("pi takes values +1/-1 only; '0' cells are not allowed")


def nu_prime_empirical(family: BFamily, alpha: SignedPattern, N: int) -> Fraction:
    """(1/N) #{0 <= n < N : pi_{n+j} = alpha_j for each constrained j}."""
    _sign_cells(alpha)
    if alpha.width == 0 or all(c == FREE for c in alpha.cells):
        return Fraction(1)
    if N < 1:
        raise InvalidInput("N must be >= 1")
    pi = sieve_mu(family, 1, N + alpha.width).pi
    return Fraction(int(np.count_nonzero(match_mask(pi, alpha.cells, SIGN_VALUES, N))), N)


def nu_prime_exact(family: BFamily, alpha: SignedPattern) -> Fraction:
    """Exact sign-pattern measure for a finite rooted family.

    Expands the indicator in characters: 2^-|J0| sum_{J in J0} alpha^J E[prod_{j in J} pi_j],
    and each expectation factors over the independent coordinates.
    """
    _sign_cells(alpha)
    if not (family.rooted and family.finite):
        raise InvalidInput("exact evaluation needs a finite rooted family")
    cons = [(j, 1 if c == PLUS else -1) for j, c in enumerate(alpha.cells, 1) if c != FREE]
    total = Fraction(0)
    for mask in range(1 << len(cons)):
        J = [cons[i] for i in range(len(cons)) if mask >> i & 1]
        sign = math.prod(a for _, a in J)
        total += sign * _character_mean([j for j, _ in J], family.roots)
    return total / 2 ** len(cons)


def _character_mean(J, roots) -> Fraction:
    num = den = 1
    for a in roots:
        odd = 0
        if J:
            counts: dict[int, int] = {}
            for j in J:
                counts[j % a] = counts.get(j % a, 0) + 1
            odd = sum(1 for c in counts.values() if c % 2)
        num *= a - 2 * odd
        den *= a
    return Fraction(num, den)


@dataclass(frozen=True)
class MonteCarloEstimate:
    hits: int
    samples: int
    tail_slack: float

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.hits, self.samples)

    @property
    def standard_error(self) -> float:
        p = self.hits / self.samples
        return math.sqrt(p * (1 - p) / self.samples)

    @property
    def error(self) -> float:
        return self.standard_error + self.tail_slack


def _mc_chunk(roots, m: int, n: int, seed) -> np.ndarray:
    """Histogram over the 2^m sign patterns of psi_1..psi_m for n Haar samples."""
    rng = np.random.default_rng(seed)
    parity = np.zeros((n, m), dtype=bool)
    for a in roots:
        if a < m:
            w = rng.integers(a, size=n)
            for j in range(1, m + 1):
                parity[:, j - 1] ^= (w + j) % a == 0
        else:
            # classes -1..-m are distinct: at most one position is hit, each w.p. 1/a
            c = int(rng.binomial(n, m / a))
            if c:
                idx = rng.choice(n, c, replace=False)
                parity[idx, rng.integers(m, size=c)] ^= True
    code = parity.astype(np.int64) @ (1 << np.arange(m, dtype=np.int64))
    return np.bincount(code, minlength=1 << m)


def sign_histogram(ctx: RootedContext, m: int, samples: int, seed: int,
                   threads: int | None = None) -> np.ndarray:
    """Counts of each sign pattern of width m among truncated Haar samples.

    Bit j-1 of the pattern index is set when psi_j = -1.  Samples are split
    into fixed-size chunks with spawned seeds, so the thread count never
    changes the result.
    """
    if samples <= 0:
        raise NoSamples("need at least one sample")
    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    if threads is None:
        threads = int(os.environ.get("BFREE_THREADS", "1"))
    jobs = list(zip(sizes, seeds))
    if threads <= 1:
        parts = [_mc_chunk(ctx.roots, m, n, s) for n, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: _mc_chunk(ctx.roots, m, *job), jobs))
    return np.sum(parts, axis=0)


def _pattern_code(alpha: SignedPattern) -> list[int]:
    """Indices of all fully signed patterns compatible with alpha."""
    codes = [0]
    for j, c in enumerate(alpha.cells):
        if c == MINUS:
            codes = [x | 1 << j for x in codes]
        elif c == FREE:
            codes = codes + [x | 1 << j for x in codes]
    return codes


def nu_prime_montecarlo(ctx: RootedContext, alpha: SignedPattern, samples: int, seed: int,
                        threads: int | None = None) -> MonteCarloEstimate:
    """Monte Carlo estimate of the sign-pattern measure over the truncated group.

    The reported error adds m * sum_{k>K} 1/a_k: the chance that an ignored
    coordinate touches one of the m positions.
    """
    _sign_cells(alpha)
    if not ctx.sigma_finite:
        raise SigmaInfinite("sum of 1/a_k diverges: Delta is infinite almost surely")
    if samples <= 0:
        raise NoSamples("need at least one sample")
    m = alpha.width
    if m == 0:
        return MonteCarloEstimate(samples, samples, 0.0)
    hist = sign_histogram(ctx, m, samples, seed, threads)
    hits = int(sum(int(hist[c]) for c in _pattern_code(alpha)))
    return MonteCarloEstimate(hits, samples, float(m * ctx.tail))


# -- bias and the Bernoulli limit -------------------------------------------

def bias(ctx: RootedContext) -> IntervalValue:
    """Enclosure of P'((-1)^Delta = 1) = (1 + prod(1 - 2/a_k)) / 2."""
    if not ctx.sigma_finite:
        raise SigmaInfinite("sum of 1/a_k diverges: Delta is infinite almost surely")
    sp = sign_product(ctx.family, ctx.K)
    return IntervalValue((1 + sp.lo) / 2, (1 + sp.hi) / 2)


def _raw_to_fraction(raw) -> Fraction:
    p, q = mpmath.libmp.to_rational(raw)
    return Fraction(int(p), int(q))


def exp_neg_two_sigma(sigma: Fraction) -> IntervalValue:
    """Certified enclosure of exp(-2 sigma) for sigma >= 0 (mpmath interval arithmetic)."""
    iv = mpmath.iv
    saved, iv.prec = iv.prec, PRECISION_BITS
    try:
        x = iv.exp(-2 * iv.mpf(sigma.numerator) / iv.mpf(sigma.denominator))
    finally:
        iv.prec = saved
    # read the raw endpoint tuples: going through mpf would round to mp.prec
    lo, hi = x._mpi_
    return IntervalValue.clamped(_raw_to_fraction(lo), _raw_to_fraction(hi))


def bias_bound_holds(ctx: RootedContext) -> bool:
    """|2 bias - 1| <= exp(-2 Sigma_K), checked by interval containment."""
    b = bias(ctx)
    dev_hi = max(abs(2 * b.lo - 1), abs(2 * b.hi - 1))
    return dev_hi <= exp_neg_two_sigma(ctx.sigma_K).lo


@dataclass(frozen=True)
class BernoulliRow:
    label: str
    K: int
    sigma: Fraction
    m: int
    method: str
    deviation: Fraction
    standard_error: float
    worst_pattern: str


def _all_patterns(m: int) -> list[SignedPattern]:
    return [SignedPattern(tuple(MINUS if code >> j & 1 else PLUS for j in range(m))) for code in range(1 << m)]


def bernoulli_row(ctx: RootedContext, m: int, method: str = "auto", samples: int = 10**6,
                  seed: int = 0, N: int | None = None, label: str = "",
                  threads: int | None = None) -> BernoulliRow:
    """max over the 2^m sign patterns of |nu'(pattern) - 2^-m| for one context."""
    if not ctx.sigma_finite:
        raise SigmaInfinite("sum of 1/a_k diverges: no reference measure")
    if m < 1:
        raise InvalidInput("m must be >= 1")
    if method == "auto":
        method = "exact" if m == 1 else "mc"
    target = Fraction(1, 2**m)
    se = 0.0
    if method == "exact" and m == 1:
        sp = sign_product(ctx.family, ctx.K)
        if not sp.is_exact:
            raise InvalidInput("exact m=1 deviation needs a finite family")
        devs = {"+": abs(sp.value) / 2, "-": abs(sp.value) / 2}
    elif method == "exact":
        devs = {str(p): abs(nu_prime_exact(ctx.family, p) - target) for p in _all_patterns(m)}
    elif method == "mc":
        hist = sign_histogram(ctx, m, samples, seed, threads)
        devs, ses = {}, []
        for code, p in enumerate(_all_patterns(m)):
            est = MonteCarloEstimate(int(hist[code]), samples, float(m * ctx.tail))
            devs[str(p)] = abs(est.estimate - target)
            ses.append(est.error)
        se = max(ses)
    elif method == "orbit":
        if N is None:
            raise InvalidInput("orbit method needs N")
        devs = {str(p): abs(nu_prime_empirical(ctx.family, p, N) - target) for p in _all_patterns(m)}
    else:
        raise InvalidInput(f"unknown method {method!r}")
    worst = max(devs, key=lambda k: devs[k])
    return BernoulliRow(label, ctx.K, ctx.sigma, m, method, devs[worst], se, worst)


def bernoulli_convergence(contexts, m: int, method: str = "auto", samples: int = 10**6,
                          seed: int = 0, N: int | None = None, labels=None,
                          threads: int | None = None) -> list[BernoulliRow]:
    labels = labels or [str(i) for i in range(len(contexts))]
    seeds = np.random.SeedSequence(seed).generate_state(len(contexts))
    return [
        bernoulli_row(ctx, m, method, samples, int(s), N, lab, threads)
        for ctx, s, lab in zip(contexts, seeds, labels)
    ]
