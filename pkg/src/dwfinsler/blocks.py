"""Dense tensors over the combined index a in {0..n1+n2-1} with factor blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class BlockTensor:
    """A rank 1-4 tensor over the combined index, tagged with slot variances.

    Indices 0..n1-1 address the first factor, n1..n1+n2-1 the second; the
    factor decomposition is recovered with :meth:`block`, whose pattern holds
    one character per slot: '1' for the first factor, '2' for the second.
    """

    array: np.ndarray
    variance: tuple[str, ...]
    n1: int
    n2: int

    def __post_init__(self) -> None:
        if self.array.ndim != len(self.variance):
            raise ValueError("variance tags must match the tensor rank")
        if not 1 <= self.array.ndim <= 4:
            raise ValueError("supported ranks are 1..4")
        if any(v not in ("up", "low") for v in self.variance):
            raise ValueError("variance tags must be 'up' or 'low'")
        n = self.n1 + self.n2
        if any(s != n for s in self.array.shape):
            raise ValueError("every axis must span the combined index")

    @property
    def rank(self) -> int:
        return self.array.ndim

    def block(self, pattern: str) -> np.ndarray:
        """View of the sub-block selected by a per-slot '1'/'2' pattern."""
        if len(pattern) != self.rank or any(ch not in "12" for ch in pattern):
            raise ValueError(f"block pattern {pattern!r} does not match rank {self.rank}")
        slices = tuple(slice(0, self.n1) if ch == "1" else slice(self.n1, self.n1 + self.n2)
                       for ch in pattern)
        return self.array[slices]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.array)))

    def __repr__(self) -> str:
        return (f"BlockTensor(rank={self.rank}, variance={self.variance}, "
                f"n1={self.n1}, n2={self.n2})")
