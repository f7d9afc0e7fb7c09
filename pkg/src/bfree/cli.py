"""``bfree`` command line: one subcommand per operation, NDJSON (or CSV) on stdout.

Exit codes: 0 ok, 2 bad input, 3 budget exceeded, 4 unsupported request.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction

from . import chowla, dynamics, measure, sieve, subshift
from .errors import BFreeError, InvalidInput
from .family import BFamily, load_family, rooted_primes
from .interval import IntervalValue
from .patterns import Pattern, SignedPattern

PROG = "bfree"


# -- argument parsing helpers -------------------------------------------------

def parse_int(text: str) -> int:
    """Integers written as 10000, 10^4, 10**4 or 1e4."""
    t = str(text).strip().replace("_", "")
    m = re.fullmatch(r"(\d+)\s*(?:\^|\*\*)\s*(\d+)", t)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    m = re.fullmatch(r"(\d+)[eE](\d+)", t)
    if m:
        return int(m.group(1)) * 10 ** int(m.group(2))
    try:
        return int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_int_list(text: str) -> list[int]:
    return [parse_int(x) for x in text.split(",") if x.strip()]


def resolve_K(text: str | None, family: BFamily) -> int | None:
    """``--K`` as an index, or ``primes<X`` / ``roots<X`` / ``moduli<=X``."""
    if text is None:
        return None
    t = text.replace(" ", "")
    m = re.fullmatch(r"(?:primes|roots|bases)?<(.+)", t)
    if m:
        return family.index_for_base(parse_int(m.group(1)))
    m = re.fullmatch(r"moduli<=(.+)", t)
    if m:
        return family.count_upto(parse_int(m.group(1)))
    try:
        return parse_int(t)
    except argparse.ArgumentTypeError as exc:
        raise InvalidInput(f"bad --K value {text!r}") from exc


def fmt(x):
    """Exact rationals as "p/q" strings; everything else unchanged."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    return x


def enclosure(iv: IntervalValue) -> dict:
    d = {"lo": fmt(iv.lo), "hi": fmt(iv.hi), "exact": fmt(iv.lo) if iv.is_exact else None,
         "lo_approx": float(iv.lo), "hi_approx": float(iv.hi)}
    return d


class Emitter:
    def __init__(self, args, family: BFamily | None, stream=None):
        self.fmt = args.format
        self.seed = getattr(args, "seed", None)
        self.digest = family.digest() if family is not None else None
        self.stream = stream or sys.stdout
        self.rows: list[dict] = []

    def emit(self, method: str, key, **fields):
        rec = {"key": key, "method": method, "family": self.digest, "seed": self.seed}
        rec.update({k: fmt(v) for k, v in fields.items()})
        self.rows.append(rec)

    def close(self):
        rows = sorted(self.rows, key=lambda r: r["key"])
        if self.fmt == "csv":
            cols = sorted({k for r in rows for k in r})
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
            self.stream.write(buf.getvalue())
        else:
            for r in rows:
                self.stream.write(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n")
        self.stream.flush()


def require_seed(args):
    if args.seed is None:
        raise InvalidInput(f"subcommand {args.command!r} is randomized: --seed is required")
    return args.seed


# -- subcommands --------------------------------------------------------------

def cmd_sieve(args, fam, out):
    if args.mu:
        seg = sieve.sieve_mu(fam, args.lo, args.hi, threads=args.threads)
    else:
        seg = sieve.sieve_eta(fam, args.lo, args.hi, threads=args.threads)
    if args.hex:
        out.emit("sieve", [args.lo], lo=args.lo, hi=args.hi, hex=seg.hex())
        return
    for n in range(args.lo, args.hi):
        out.emit("sieve", [n], **seg.at(n))


def cmd_twins(args, fam, out):
    count = sieve.twin_count(fam, args.N, args.gap, threads=args.threads)
    ref = measure.nu_one_cylinder({1, 1 + args.gap}, fam, resolve_K(args.K, fam))
    freq = Fraction(count, args.N)
    out.emit("twin_count", [args.N, args.gap], N=args.N, gap=args.gap, count=count,
             frequency=freq, frequency_approx=float(freq), reference=enclosure(ref),
             gap_to_reference=ref.distance(freq))


def cmd_measure(args, fam, out):
    K = resolve_K(args.K, fam)
    if any(c in "+-−" for c in args.pattern):
        sp = SignedPattern.parse(args.pattern)
        iv = measure.nu_M_cylinder(sp, fam, K, args.budget_terms)
        out.emit("nu_M_cylinder", [str(sp)], pattern=str(sp), **enclosure(iv))
        return
    p = Pattern.parse(args.pattern)
    iv = measure.nu_cylinder(p, fam, K, args.budget_terms)
    fields = dict(pattern=str(p), **enclosure(iv))
    if args.oracle:
        fields["oracle"] = measure.nu_exact_finite(p, fam, args.budget_period)
    out.emit("nu_cylinder", [str(p)], **fields)


def cmd_admissible(args, fam, out):
    word = args.pattern.strip()
    if set(word) - set("01*."):
        raise InvalidInput("admissibility takes a word over 0, 1 (and * / . as 0)")
    A = {j for j, c in enumerate(word, 1) if c == "1"}
    bad = measure.first_violation(A, fam)
    out.emit("is_admissible_word", [word], pattern=word, admissible=bad is None, first_violation=bad)


def cmd_gamma(args, fam, out):
    if args.method == "brute":
        wc = subshift.count_words_bruteforce(args.n, fam)
    else:
        moduli = fam.prefix(resolve_K(args.K, fam)) if args.K is not None else None
        wc = subshift.count_words_dp(args.n, fam, moduli=moduli, state_budget=args.budget_states)
    lo, hi = subshift.entropy_bounds_from_count(wc)
    out.emit(f"count_words_{args.method}", [args.n], n=args.n, count=str(wc.count),
             K_effective=wc.K_effective, log2_per_symbol=wc.log2_per_symbol,
             log2_per_symbol_lo=lo, log2_per_symbol_hi=hi)


def cmd_bracket(args, fam, out):
    moduli = fam.prefix(resolve_K(args.K, fam)) if args.K is not None else fam.moduli
    rep = subshift.gamma_bracket_check(args.n, moduli, args.budget_states)
    out.emit("gamma_bracket_check", [args.n], n=args.n, moduli=list(rep.moduli), exponent=rep.exponent,
             lower=str(rep.lower), count=str(rep.count), upper=str(rep.upper), holds=rep.holds)


def cmd_entropy(args, fam, out):
    K = resolve_K(args.K, fam)
    iv = subshift.entropy_interval(fam, K)
    out.emit("entropy_interval", [K if K is not None else fam.default_K],
             K=K if K is not None else fam.default_K, width=iv.width, **enclosure(iv))


def _freq_fields(rep: dynamics.FrequencyReport) -> dict:
    d = dict(pattern=rep.pattern, count=rep.count, total=rep.total, empirical=rep.empirical,
             empirical_approx=float(rep.empirical), supported_by_theory=rep.supported)
    d.update(rep.params)
    if rep.reference is not None:
        d["reference"] = enclosure(rep.reference)
        d["gap"] = rep.gap
        d["gap_approx"] = float(rep.gap)
    return d


def cmd_generic(args, fam, out):
    p = Pattern.parse(args.pattern)
    K = resolve_K(args.K, fam)
    rep = dynamics.empirical_frequency(fam, p, args.N, K, threads=args.threads)
    out.emit("empirical_frequency", [args.N], **_freq_fields(rep))
    if args.plot:
        from .report import plot_convergence

        Ns = sorted({max(p.width, args.N >> i) for i in range(0, 12)})
        freqs = [dynamics.empirical_frequency(fam, p, n, reference=rep.reference).empirical for n in Ns]
        plot_convergence(Ns, freqs, rep.reference, args.plot)


def cmd_short(args, fam, out):
    p = Pattern.parse(args.pattern)
    K = resolve_K(args.K, fam)
    hyp_max, _ = dynamics.short_interval_hypothesis_check(fam, args.hyp_lo, args.hyp_hi)
    supported = hyp_max <= args.hyp_bound
    ref = measure.nu_cylinder(p, fam, K)
    if args.samples is None:
        if args.N is None:
            raise InvalidInput("short needs --N, or --samples with --seed")
        rep = dynamics.short_interval_frequency(fam, p, args.N, reference=ref, supported=supported)
        out.emit("short_interval_frequency", [args.N], hypothesis_max=hyp_max, **_freq_fields(rep))
        return
    seed = require_seed(args)
    mean, starts, freqs = dynamics.short_interval_mean(fam, p, args.samples, args.lo, args.hi, seed)
    out.emit("short_interval_mean", [args.samples], pattern=str(p), samples=args.samples,
             lo=args.lo, hi=args.hi, mean=mean, mean_approx=float(mean), reference=enclosure(ref),
             gap=ref.distance(mean), hypothesis_max=hyp_max, supported_by_theory=supported)
    if args.plot:
        from .report import plot_histogram

        plot_histogram(freqs, ref, args.plot)


def cmd_arith(args, fam, out):
    p = Pattern.parse(args.pattern)
    rep = dynamics.arithmetic_average(fam, p, args.p, args.s, args.N, resolve_K(args.K, fam))
    out.emit("arithmetic_average", [args.p, args.s, args.N], **_freq_fields(rep))


def cmd_recover(args, fam, out):
    seed = require_seed(args)
    K = resolve_K(args.K, fam)
    moduli = fam.prefix(fam.default_K if K is None else K)
    trials = dynamics.recovery_trials(moduli, args.W, args.trials, seed)
    for i, t in enumerate(trials):
        out.emit("recover_coordinates", [i], trial=i, coords=list(t.coords),
                 candidates=[list(c) for c in t.candidates], contains_truth=t.contains_truth,
                 all_singletons=t.all_singletons)
    out.emit("recover_summary", [args.trials], moduli=list(moduli), W=args.W, trials=args.trials,
             singleton_trials=sum(t.all_singletons for t in trials),
             truth_contained_trials=sum(t.contains_truth for t in trials))


def cmd_chowla(args, fam, out):
    shifts, exps = args.shifts, args.exponents
    if len(exps) != len(shifts):
        raise InvalidInput("--shifts and --exponents must have the same length")
    mu = chowla.mu_prefix(fam, args.N + shifts[-1])
    value = chowla.chowla_correlation(mu, shifts, exps, args.N)
    fields = dict(shifts=shifts, exponents=exps, N=args.N, value=value, value_approx=float(value))
    if fam.finite:
        ref = measure.nu_M_correlation(shifts, exps, fam)
        fields.update(reference=enclosure(ref), label="reference: signed-extension measure")
    elif 1 in exps:
        fields["label"] = "conjectural - no reference measure"
    else:
        ref = measure.nu_M_correlation(shifts, exps, fam, resolve_K(args.K, fam))
        fields.update(reference=enclosure(ref), label="reference: eta cylinder")
    out.emit("chowla_correlation", [args.N], **fields)


def cmd_nuprime(args, fam, out):
    alpha = SignedPattern.parse(args.pattern)
    ctx = chowla.make_context(fam, resolve_K(args.K, fam))
    fields = dict(pattern=str(alpha))
    if ctx.sigma_finite and fam.finite and alpha.width <= 16:
        fields["reference"] = chowla.nu_prime_exact(fam, alpha)
    if args.method == "orbit":
        if args.N is None:
            raise InvalidInput("orbit method needs --N")
        est = chowla.nu_prime_empirical(fam, alpha, args.N)
        if not ctx.sigma_finite:
            fields["label"] = "conjectural - no reference measure"
        out.emit("nu_prime_empirical", [args.N], N=args.N, estimate=est, estimate_approx=float(est), **fields)
        return
    seed = require_seed(args)
    est = chowla.nu_prime_montecarlo(ctx, alpha, args.samples, seed, args.threads)
    out.emit("nu_prime_montecarlo", [args.samples], samples=args.samples, K=ctx.K,
             estimate=est.estimate, estimate_approx=float(est.estimate),
             standard_error=est.standard_error, tail_slack=est.tail_slack, error=est.error, **fields)


def cmd_bias(args, fam, out):
    ctx = chowla.make_context(fam, resolve_K(args.K, fam))
    b = chowla.bias(ctx)
    bound = chowla.exp_neg_two_sigma(ctx.sigma_K)
    out.emit("bias", [ctx.K], K=ctx.K, sigma_K=ctx.sigma_K, sigma_K_approx=float(ctx.sigma_K),
             sign_product=enclosure(measure.sign_product(fam, ctx.K)),
             exp_bound=enclosure(bound), bound_holds=chowla.bias_bound_holds(ctx), **enclosure(b))


def cmd_bernoulli(args, fam, out):
    sweep = args.roots_sweep
    ctxs = [chowla.make_context(rooted_primes(args.prime_min, X)) for X in sweep]
    ms = args.m
    rows = []
    for m in ms:
        if m > 1 or args.method == "mc":
            require_seed(args)
        rows += chowla.bernoulli_convergence(ctxs, m, args.method, args.samples, args.seed or 0,
                                             args.N, labels=[str(x) for x in sweep], threads=args.threads)
    for r in rows:
        out.emit("bernoulli_convergence", [r.m, int(r.label)], X=int(r.label), m=r.m, K=r.K,
                 sigma=r.sigma, sigma_approx=float(r.sigma), deviation=r.deviation,
                 deviation_approx=float(r.deviation), standard_error=r.standard_error,
                 estimator=r.method, worst_pattern=r.worst_pattern,
                 samples=args.samples if r.method == "mc" else None)
    if args.plot:
        from .report import plot_bernoulli

        plot_bernoulli(rows, args.plot)


COMMANDS = {
    "sieve": cmd_sieve, "twins": cmd_twins, "measure": cmd_measure, "admissible": cmd_admissible,
    "gamma": cmd_gamma, "bracket": cmd_bracket, "entropy": cmd_entropy, "generic": cmd_generic,
    "short": cmd_short, "arith": cmd_arith, "recover": cmd_recover, "chowla": cmd_chowla,
    "nuprime": cmd_nuprime, "bernoulli": cmd_bernoulli, "bias": cmd_bias,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="squarefree",
                        help="family spec JSON file, or a builtin name (squarefree, cubefree, mobius)")
    common.add_argument("--seed", type=parse_int, default=None)
    common.add_argument("--threads", type=parse_int,
                        default=parse_int(os.environ.get("BFREE_THREADS", "1")))
    common.add_argument("--format", choices=("ndjson", "csv"), default="ndjson")
    common.add_argument("--budget-period", type=parse_int, default=measure.DEFAULT_PERIOD_BUDGET)
    common.add_argument("--budget-states", type=parse_int, default=subshift.DEFAULT_STATE_BUDGET)
    common.add_argument("--budget-terms", type=parse_int, default=measure.DEFAULT_TERM_BUDGET)
    common.add_argument("--K", default=None, help="truncation: an index, or primes<X")

    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("sieve", "eta (and delta, pi, mu with --mu) over [lo, hi)")
    p.add_argument("--lo", type=parse_int, required=True)
    p.add_argument("--hi", type=parse_int, required=True)
    p.add_argument("--mu", action="store_true")
    p.add_argument("--hex", action="store_true", help="one record with the packed eta bitstream")

    p = add("twins", "count n <= N with n and n+gap both B-free")
    p.add_argument("--gap", type=parse_int, default=2)
    p.add_argument("--N", type=parse_int, required=True)

    p = add("measure", "cylinder measure of a pattern over 1,0,* (or +,-,0,*)")
    p.add_argument("--pattern", required=True)
    p.add_argument("--oracle", action="store_true", help="also count over one period (finite families)")

    p = add("admissible", "admissibility of a binary word")
    p.add_argument("--pattern", required=True)

    p = add("gamma", "number of admissible words of length n")
    p.add_argument("--n", type=parse_int, required=True)
    p.add_argument("--method", choices=("brute", "dp"), default="dp")

    p = add("bracket", "check the word-count bracket at a multiple of the period")
    p.add_argument("--n", type=parse_int, required=True)

    add("entropy", "enclosure of the topological entropy")

    p = add("generic", "pattern frequency along eta_1..eta_N")
    p.add_argument("--pattern", default="1")
    p.add_argument("--N", type=parse_int, required=True)
    p.add_argument("--plot", default=None, help="write a convergence figure to this path")

    p = add("short", "pattern frequency in [N, N + sqrt N)")
    p.add_argument("--pattern", default="1")
    p.add_argument("--N", type=parse_int, default=None)
    p.add_argument("--samples", type=parse_int, default=None)
    p.add_argument("--lo", type=parse_int, default=10**6)
    p.add_argument("--hi", type=parse_int, default=10**7)
    p.add_argument("--hyp-lo", type=parse_int, default=10**3)
    p.add_argument("--hyp-hi", type=parse_int, default=10**6)
    p.add_argument("--hyp-bound", type=parse_int, default=1)
    p.add_argument("--plot", default=None)

    p = add("arith", "pattern frequency along n p^s + r")
    p.add_argument("--pattern", default="1")
    p.add_argument("--p", type=parse_int, required=True)
    p.add_argument("--s", type=parse_int, default=1)
    p.add_argument("--N", type=parse_int, required=True)

    p = add("recover", "recover group coordinates from codings of random points")
    p.add_argument("--W", type=parse_int, default=10**4)
    p.add_argument("--trials", type=parse_int, default=100)

    p = add("chowla", "correlation of mu with shifts and exponents in {1,2}")
    p.add_argument("--shifts", type=parse_int_list, required=True)
    p.add_argument("--exponents", type=parse_int_list, required=True)
    p.add_argument("--N", type=parse_int, required=True)

    p = add("nuprime", "sign-pattern measure of pi")
    p.add_argument("--pattern", required=True)
    p.add_argument("--method", choices=("orbit", "mc"), default="mc")
    p.add_argument("--samples", type=parse_int, default=10**6)
    p.add_argument("--N", type=parse_int, default=None)

    p = add("bernoulli", "deviation from the uniform sign measure as Sigma grows")
    p.add_argument("--roots-sweep", type=parse_int_list, required=True,
                   help="X1,X2,...: roots are the primes in [prime-min, X]")
    p.add_argument("--prime-min", type=parse_int, default=3)
    p.add_argument("--m", type=parse_int_list, default=[1, 2])
    p.add_argument("--method", choices=("auto", "exact", "mc", "orbit"), default="auto")
    p.add_argument("--samples", type=parse_int, default=10**6)
    p.add_argument("--N", type=parse_int, default=None)
    p.add_argument("--plot", default=None)

    add("bias", "P'((-1)^Delta = 1) and its exponential bound")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise InvalidInput("--threads must be >= 1")
        fam = None if args.command == "bernoulli" else load_family(args.family)
        out = Emitter(args, fam, stdout)
        COMMANDS[args.command](args, fam, out)
        out.close()
    except BFreeError as exc:
        stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                 "exit_code": exc.exit_code}) + "\n")
        return exc.exit_code
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
