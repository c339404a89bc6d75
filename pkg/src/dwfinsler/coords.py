"""Coordinate indexing on the slit tangent bundle of a two-factor product.

A point carries four coordinate groups: base positions of each factor (x, u)
and the corresponding fiber vectors (y, v).  Every scalar field handled by the
jet machinery is a function of these 2*(n1+n2) coordinates, addressed through
:class:`CoordIndex`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable

from .errors import CapabilityError

#: Hard bound on the total differentiation order the jet layer supports.
MAX_ORDER = 6


class CoordBlock(IntEnum):
    BASE1 = 0
    BASE2 = 1
    FIBER1 = 2
    FIBER2 = 3


@dataclass(frozen=True, order=True)
class CoordIndex:
    """One coordinate of the slit tangent bundle, e.g. x^2 or v^0."""

    block: CoordBlock
    offset: int

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise ValueError(f"negative coordinate offset {self.offset}")

    @property
    def is_base(self) -> bool:
        return self.block in (CoordBlock.BASE1, CoordBlock.BASE2)

    @property
    def is_fiber(self) -> bool:
        return not self.is_base

    @property
    def factor(self) -> int:
        """1 or 2, the factor manifold this coordinate belongs to."""
        return 1 if self.block in (CoordBlock.BASE1, CoordBlock.FIBER1) else 2

    def __repr__(self) -> str:
        tag = {CoordBlock.BASE1: "x", CoordBlock.BASE2: "u",
               CoordBlock.FIBER1: "y", CoordBlock.FIBER2: "v"}[self.block]
        return f"{tag}{self.offset}"


def base1(i: int) -> CoordIndex:
    return CoordIndex(CoordBlock.BASE1, i)


def base2(i: int) -> CoordIndex:
    return CoordIndex(CoordBlock.BASE2, i)


def fiber1(i: int) -> CoordIndex:
    return CoordIndex(CoordBlock.FIBER1, i)


def fiber2(i: int) -> CoordIndex:
    return CoordIndex(CoordBlock.FIBER2, i)


def base_coords(n1: int, n2: int) -> tuple[CoordIndex, ...]:
    """Combined base coordinates in block order (x then u)."""
    return tuple(base1(i) for i in range(n1)) + tuple(base2(i) for i in range(n2))


def fiber_coords(n1: int, n2: int) -> tuple[CoordIndex, ...]:
    """Combined fiber coordinates in block order (y then v)."""
    return tuple(fiber1(i) for i in range(n1)) + tuple(fiber2(i) for i in range(n2))


@dataclass(frozen=True)
class MultiIndex:
    """A mixed-partial request: distinct coordinates with positive orders.

    Stored canonically (sorted by coordinate), so any permutation of the same
    multi-set of directions maps to one key.
    """

    terms: tuple[tuple[CoordIndex, int], ...]

    def __post_init__(self) -> None:
        coords = [c for c, _ in self.terms]
        if len(set(coords)) != len(coords):
            raise ValueError("multi-index repeats a coordinate; merge the orders")
        if any(k <= 0 for _, k in self.terms):
            raise ValueError("multi-index orders must be positive")
        if list(self.terms) != sorted(self.terms, key=lambda t: t[0]):
            raise ValueError("multi-index terms must be sorted; use MultiIndex.of")
        if self.order > MAX_ORDER:
            raise CapabilityError(
                f"total differentiation order {self.order} exceeds the supported maximum {MAX_ORDER}")

    @classmethod
    def of(cls, dirs: Iterable[CoordIndex]) -> "MultiIndex":
        """Build the canonical multi-index from a sequence of directions."""
        counts: dict[CoordIndex, int] = {}
        for d in dirs:
            counts[d] = counts.get(d, 0) + 1
        return cls(tuple(sorted(counts.items(), key=lambda t: t[0])))

    @property
    def order(self) -> int:
        return sum(k for _, k in self.terms)

    @property
    def directions(self) -> tuple[CoordIndex, ...]:
        """The multi-index expanded to one direction per derivative."""
        out: list[CoordIndex] = []
        for c, k in self.terms:
            out.extend([c] * k)
        return tuple(out)
