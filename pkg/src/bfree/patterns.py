"""Cylinder specifications over {0,1} and {-1,0,1} sequences.

Positions are window-relative and 1-based: cell j constrains x_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

ONE, ZERO, FREE = "1", "0", "*"
PLUS, MINUS = "+", "-"


@dataclass(frozen=True)
class Pattern:
    cells: tuple[str, ...]

    def __post_init__(self):
        if not self.cells:
            raise InvalidInput("pattern must have width >= 1")
        bad = [c for c in self.cells if c not in (ONE, ZERO, FREE)]
        if bad:
            raise InvalidInput(f"pattern cells must be '1', '0' or '*', got {bad[0]!r}")
        if all(c == FREE for c in self.cells):
            raise InvalidInput("pattern needs at least one constrained cell")

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        return cls(tuple(text.replace(".", FREE).strip()))

    @classmethod
    def from_sets(cls, ones, zeros=(), width: int | None = None) -> "Pattern":
        ones, zeros = set(ones), set(zeros)
        if ones & zeros:
            raise InvalidInput("a position cannot be forced to both 1 and 0")
        if min(ones | zeros, default=1) < 1:
            raise InvalidInput("positions are 1-based")
        m = max(ones | zeros, default=0) if width is None else width
        return cls(tuple(ONE if j in ones else ZERO if j in zeros else FREE for j in range(1, m + 1)))

    @property
    def width(self) -> int:
        return len(self.cells)

    @property
    def ones(self) -> frozenset[int]:
        return frozenset(j for j, c in enumerate(self.cells, 1) if c == ONE)

    @property
    def zeros(self) -> frozenset[int]:
        return frozenset(j for j, c in enumerate(self.cells, 1) if c == ZERO)

    def __str__(self) -> str:
        return "".join(self.cells)


@dataclass(frozen=True)
class SignedPattern:
    """Cells over {'+', '-', '0', '*'}; the width may be 0."""

    cells: tuple[str, ...]

    def __post_init__(self):
        bad = [c for c in self.cells if c not in (PLUS, MINUS, ZERO, FREE)]
        if bad:
            raise InvalidInput(f"signed pattern cells must be '+', '-', '0' or '*', got {bad[0]!r}")

    @classmethod
    def parse(cls, text: str) -> "SignedPattern":
        text = text.strip().replace("\u2212", MINUS)
        if "," in text:
            tokens = [t.strip() for t in text.split(",") if t.strip()]
            table = {"+1": PLUS, "1": PLUS, "-1": MINUS, "0": ZERO, "*": FREE, "+": PLUS, "-": MINUS}
            try:
                return cls(tuple(table[t] for t in tokens))
            except KeyError as exc:
                raise InvalidInput(f"bad signed cell {exc.args[0]!r}") from None
        if text in ("+1", "-1"):
            return cls((text[0],))
        return cls(tuple(text.replace(".", FREE)))

    @property
    def width(self) -> int:
        return len(self.cells)

    @property
    def weight(self) -> int:
        """Number of cells forced to +1 or -1."""
        return sum(c in (PLUS, MINUS) for c in self.cells)

    def squared(self) -> Pattern:
        table = {PLUS: ONE, MINUS: ONE, ZERO: ZERO, FREE: FREE}
        return Pattern(tuple(table[c] for c in self.cells))

    def signs(self) -> tuple[int, ...]:
        """Values as integers; only meaningful for fully signed patterns."""
        table = {PLUS: 1, MINUS: -1, ZERO: 0}
        return tuple(table[c] for c in self.cells if c != FREE)

    def __str__(self) -> str:
        return "".join(self.cells)


def match_mask(seq: np.ndarray, cells, values: dict, count: int, start: int = 0, step: int = 1) -> np.ndarray:
    """Boolean mask over offsets o = start + i*step, i < count.

    Offset o matches when seq[o + j - 1] equals values[cell_j] for every
    constrained cell j.  ``seq[0]`` is the first term of the sequence.
    """
    mask = np.ones(count, dtype=bool)
    stop = start + (count - 1) * step + 1
    for j, c in enumerate(cells, 1):
        if c == FREE:
            continue
        window = seq[start + j - 1 : stop + j - 1 : step]
        mask &= window == values[c]
    return mask


ETA_VALUES = {ONE: 1, ZERO: 0}
SIGN_VALUES = {PLUS: 1, MINUS: -1, ZERO: 0}
