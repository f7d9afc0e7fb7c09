"""Families of pairwise coprime moduli and their tail bounds."""

from __future__ import annotations

import bisect
import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import (
    EmptyFamily,
    InvalidInput,
    ModulusTooSmall,
    NoTailBoundAvailable,
    NotCoprime,
    NotRootedFamily,
    SigmaInfinite,
)
from .primes import first_primes, iroot, primes_upto

KINDS = ("explicit", "r-free", "rooted-explicit", "rooted-primes")

# how many leading moduli of an infinite family are materialized by default
DEFAULT_PRIME_LIMIT = 10_000


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    moduli: tuple[int, ...] = ()
    r: int | None = None
    prime_limit: int | None = None
    roots: tuple[int, ...] = ()
    prime_min: int = 2
    prime_max: int | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "FamilySpec":
        if not isinstance(data, dict):
            raise InvalidInput("family spec must be a JSON object")
        kind = data.get("kind")
        if kind not in KINDS:
            raise InvalidInput(f"field 'kind' must be one of {KINDS}, got {kind!r}")
        allowed = {
            "explicit": {"moduli"},
            "r-free": {"r", "prime_limit"},
            "rooted-explicit": {"roots"},
            "rooted-primes": {"prime_min", "prime_max", "prime_limit"},
        }[kind]
        extra = set(data) - allowed - {"kind", "name"}
        if extra:
            raise InvalidInput(f"unexpected field(s) for kind {kind!r}: {sorted(extra)}")

        def integer(name, value):
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidInput(f"field {name!r} must be an integer, got {value!r}")
            return value

        def int_list(name):
            if name not in data:
                raise InvalidInput(f"field {name!r} is required for kind {kind!r}")
            value = data[name]
            if not isinstance(value, list):
                raise InvalidInput(f"field {name!r} must be a list of integers")
            return tuple(integer(name, v) for v in value)

        if kind == "explicit":
            return cls(kind, moduli=int_list("moduli"))
        if kind == "rooted-explicit":
            return cls(kind, roots=int_list("roots"))
        if kind == "r-free":
            if "r" not in data:
                raise InvalidInput("field 'r' is required for kind 'r-free'")
            limit = data.get("prime_limit")
            return cls(
                kind,
                r=integer("r", data["r"]),
                prime_limit=None if limit is None else integer("prime_limit", limit),
            )
        pmax = data.get("prime_max")
        limit = data.get("prime_limit")
        return cls(
            kind,
            prime_min=integer("prime_min", data.get("prime_min", 2)),
            prime_max=None if pmax is None else integer("prime_max", pmax),
            prime_limit=None if limit is None else integer("prime_limit", limit),
        )

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"kind": self.kind, "moduli": list(self.moduli)}
        if self.kind == "rooted-explicit":
            return {"kind": self.kind, "roots": list(self.roots)}
        if self.kind == "r-free":
            d = {"kind": self.kind, "r": self.r}
        else:
            d = {"kind": self.kind, "prime_min": self.prime_min}
            if self.prime_max is not None:
                d["prime_max"] = self.prime_max
        if self.prime_limit is not None:
            d["prime_limit"] = self.prime_limit
        return d


@dataclass(frozen=True, eq=False)
class BFamily:
    """Canonical (ascending) family of pairwise coprime moduli.

    Infinite families (``r-free`` and unbounded ``rooted-primes``) are
    generated from the primes on demand; ``moduli`` then holds only the
    materialized prefix, which is also the default truncation depth.
    """

    spec: FamilySpec
    moduli: tuple[int, ...]
    roots: tuple[int, ...] | None = None
    finite: bool = True
    exponent: int = 1
    base_min: int = 2
    _bases: tuple[int, ...] = field(default=(), repr=False)

    # -- indexing ---------------------------------------------------------
    @property
    def rooted(self) -> bool:
        return self.roots is not None

    @property
    def default_K(self) -> int:
        return len(self.moduli)

    def __len__(self) -> int:
        if not self.finite:
            raise TypeError("infinite family has no length")
        return len(self.moduli)

    def _bases_upto(self, x: int) -> tuple[int, ...]:
        if self.finite:
            return self._bases[: bisect.bisect_right(self._bases, x)]
        ps = primes_upto(x)
        return ps[bisect.bisect_left(ps, self.base_min):]

    def _first_bases(self, count: int) -> tuple[int, ...]:
        if self.finite:
            return self._bases[:count]
        skip = bisect.bisect_left(primes_upto(self.base_min), self.base_min)
        return first_primes(count + skip)[skip:]

    def prefix(self, K: int) -> tuple[int, ...]:
        """The first K moduli."""
        if K <= len(self.moduli):
            return self.moduli[:K]
        return tuple(p**self.exponent for p in self._first_bases(K))

    def root_prefix(self, K: int) -> tuple[int, ...]:
        if not self.rooted:
            raise NotRootedFamily("family is not rooted")
        return self._first_bases(K)

    def modulus(self, k: int) -> int:
        """The k-th modulus, 1-based."""
        if k < 1:
            raise IndexError(k)
        pre = self.prefix(k)
        if len(pre) < k:
            raise IndexError(k)
        return pre[k - 1]

    def moduli_upto(self, limit: int) -> tuple[int, ...]:
        if limit < 2:
            return ()
        if self.finite:
            return self.moduli[: bisect.bisect_right(self.moduli, limit)]
        return tuple(p**self.exponent for p in self._bases_upto(iroot(limit, self.exponent)))

    def roots_upto(self, limit: int) -> tuple[int, ...]:
        if not self.rooted:
            raise NotRootedFamily("family is not rooted")
        if limit < 2:
            return ()
        return self._bases_upto(limit)

    def count_upto(self, limit: int) -> int:
        return len(self.moduli_upto(limit))

    def index_for_base(self, x: int) -> int:
        """Number of moduli whose base (prime, root or modulus) is < x."""
        if x <= 2:
            return 0
        if self.finite:
            return bisect.bisect_left(self._bases, x)
        return len(self._bases_upto(x - 1))

    # -- tails ------------------------------------------------------------
    def tail_bound(self, K: int) -> Fraction:
        """Certified upper bound on sum_{k>K} 1/b_k."""
        if K < 0:
            raise ValueError("K must be >= 0")
        if self.finite:
            return sum((Fraction(1, b) for b in self.moduli[K:]), Fraction(0))
        if self.exponent < 2:
            raise NoTailBoundAvailable("no certified tail bound for this family")
        nxt = self._first_bases(K + 1)[-1]
        return self.tail_bound_beyond(nxt - 1)

    def tail_bound_beyond(self, x: int) -> Fraction:
        """Upper bound on the sum of 1/b over moduli whose base exceeds x >= 1.

        Uses sum_{n>x} n^-r <= x^(1-r)/(r-1).
        """
        if x < 1:
            raise ValueError("x must be >= 1")
        if self.finite:
            return sum(
                (Fraction(1, b) for b, a in zip(self.moduli, self._bases) if a > x),
                Fraction(0),
            )
        r = self.exponent
        return Fraction(1, (r - 1) * x ** (r - 1))

    # -- rooted quantities ------------------------------------------------
    def sigma(self) -> Fraction:
        """Sum of reciprocal roots; raises SigmaInfinite when it diverges."""
        if not self.rooted:
            raise NotRootedFamily("family is not rooted")
        if not self.finite:
            raise SigmaInfinite("sum of reciprocal roots diverges for this family")
        return sum((Fraction(1, a) for a in self.roots), Fraction(0))

    def sigma_prefix(self, K: int) -> Fraction:
        return sum((Fraction(1, a) for a in self.root_prefix(K)), Fraction(0))

    # -- identity ---------------------------------------------------------
    def to_dict(self) -> dict:
        d = self.spec.to_dict()
        for key in ("moduli", "roots"):
            if key in d:
                d[key] = sorted(d[key])
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        head = ", ".join(map(str, self.moduli[:6]))
        more = ", ..." if len(self.moduli) > 6 or not self.finite else ""
        return f"BFamily({self.spec.kind}: {head}{more})"


def _check_coprime(values: tuple[int, ...]) -> None:
    running = 1
    for i, v in enumerate(values):
        if math.gcd(running, v) > 1:
            for u in values[:i]:
                if math.gcd(u, v) > 1:
                    raise NotCoprime(u, v)
        running *= v


def validate_family(spec: FamilySpec) -> BFamily:
    if spec.kind == "explicit":
        mods = tuple(sorted(spec.moduli))
        if not mods:
            raise EmptyFamily("explicit family has no moduli")
        bad = [b for b in mods if b <= 1]
        if bad:
            raise ModulusTooSmall(f"moduli must be >= 2, got {bad[0]}")
        _check_coprime(mods)
        return BFamily(spec, mods, finite=True, _bases=mods)

    if spec.kind == "rooted-explicit":
        roots = tuple(sorted(spec.roots))
        if not roots:
            raise EmptyFamily("rooted family has no roots")
        bad = [a for a in roots if a <= 1]
        if bad:
            raise ModulusTooSmall(f"roots must be >= 2, got {bad[0]}")
        _check_coprime(roots)
        return BFamily(spec, tuple(a * a for a in roots), roots=roots, exponent=2, _bases=roots)

    if spec.kind == "r-free":
        if spec.r is None or spec.r < 2:
            raise InvalidInput("field 'r' must be >= 2")
        limit = DEFAULT_PRIME_LIMIT if spec.prime_limit is None else spec.prime_limit
        if limit < 2:
            raise EmptyFamily("field 'prime_limit' must be >= 2")
        mods = tuple(p**spec.r for p in primes_upto(limit))
        return BFamily(spec, mods, finite=False, exponent=spec.r)

    if spec.kind == "rooted-primes":
        if spec.prime_min < 2:
            raise ModulusTooSmall("field 'prime_min' must be >= 2")
        if spec.prime_max is not None:
            ps = primes_upto(spec.prime_max)
            roots = ps[bisect.bisect_left(ps, spec.prime_min):]
            if not roots:
                raise EmptyFamily("no primes in [prime_min, prime_max]")
            return BFamily(spec, tuple(a * a for a in roots), roots=roots, exponent=2, _bases=roots)
        limit = DEFAULT_PRIME_LIMIT if spec.prime_limit is None else spec.prime_limit
        ps = primes_upto(max(limit, spec.prime_min))
        roots = ps[bisect.bisect_left(ps, spec.prime_min):]
        return BFamily(
            spec,
            tuple(a * a for a in roots),
            roots=roots,
            finite=False,
            exponent=2,
            base_min=spec.prime_min,
        )

    raise InvalidInput(f"unknown family kind {spec.kind!r}")


def tail_sum_bound(family: BFamily, K: int) -> Fraction:
    return family.tail_bound(K)


def enumerate_moduli(family: BFamily, limit: int) -> tuple[int, ...]:
    return family.moduli_upto(limit)


# -- constructors -----------------------------------------------------------

def explicit(*moduli: int) -> BFamily:
    return validate_family(FamilySpec("explicit", moduli=tuple(moduli)))


def rooted(*roots: int) -> BFamily:
    return validate_family(FamilySpec("rooted-explicit", roots=tuple(roots)))


def r_free(r: int, prime_limit: int | None = None) -> BFamily:
    return validate_family(FamilySpec("r-free", r=r, prime_limit=prime_limit))


def squarefree(prime_limit: int | None = None) -> BFamily:
    return r_free(2, prime_limit)


def rooted_primes(prime_min: int = 2, prime_max: int | None = None, prime_limit: int | None = None) -> BFamily:
    return validate_family(
        FamilySpec("rooted-primes", prime_min=prime_min, prime_max=prime_max, prime_limit=prime_limit)
    )


BUILTIN = {
    "squarefree": lambda: squarefree(),
    "cubefree": lambda: r_free(3),
    "mobius": lambda: rooted_primes(),
}


def load_family(source: str | Path) -> BFamily:
    """Load a family from a JSON spec file, or one of the builtin names."""
    path = Path(source)
    if not path.exists():
        if str(source) in BUILTIN:
            return BUILTIN[str(source)]()
        raise InvalidInput(f"family file not found: {source}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"family file {source} is not valid JSON: {exc}") from None
    return validate_family(FamilySpec.from_dict(data))
