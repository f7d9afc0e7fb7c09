"""Exception hierarchy.

Three families map onto the CLI exit codes: bad input (2), budget exceeded (3)
and unsupported requests (4).
"""

import math


class BFreeError(Exception):
    exit_code = 1


class InvalidInput(BFreeError, ValueError):
    exit_code = 2


class BudgetExceeded(BFreeError):
    exit_code = 3


class Unsupported(BFreeError):
    exit_code = 4


class ModulusTooSmall(InvalidInput):
    pass


class NotCoprime(InvalidInput):
    def __init__(self, a, b):
        super().__init__(f"moduli {a} and {b} are not coprime (gcd={math.gcd(a, b)})")
        self.pair = (a, b)


class EmptyFamily(InvalidInput):
    pass


class RangeEmpty(InvalidInput):
    pass


class Overflow(InvalidInput):
    pass


class NotRootedFamily(InvalidInput):
    pass


class NotMultipleOfPeriod(InvalidInput):
    pass


class NotPrime(InvalidInput):
    pass


class WindowTooShort(InvalidInput):
    pass


class NoSamples(InvalidInput):
    pass


class PeriodTooLarge(BudgetExceeded):
    pass


class StateBudgetExceeded(BudgetExceeded):
    pass


class PatternTooWide(BudgetExceeded):
    pass


class LengthOverCap(BudgetExceeded):
    pass


class DeltaSaturated(BudgetExceeded):
    pass


class NoTailBoundAvailable(Unsupported):
    pass


class SigmaInfinite(Unsupported):
    pass
