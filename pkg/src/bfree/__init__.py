"""Tools for B-free integers: sieving, cylinder measures, subshift counts, dynamics and Chowla-type statistics."""

from .errors import BFreeError, BudgetExceeded, InvalidInput, Unsupported
from .family import BFamily, FamilySpec, explicit, load_family, r_free, rooted, rooted_primes, squarefree
from .interval import IntervalValue
from .patterns import Pattern, SignedPattern

__all__ = [
    "BFamily", "BFreeError", "BudgetExceeded", "FamilySpec", "IntervalValue", "InvalidInput",
    "Pattern", "SignedPattern", "Unsupported", "explicit", "load_family", "r_free", "rooted",
    "rooted_primes", "squarefree",
]
__version__ = "0.1.0"
