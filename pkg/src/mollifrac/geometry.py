"""Axis-aligned boxes and disjoint box unions.

All integration domains in the package are open axis-aligned boxes or finite
disjoint unions of them (an ambient box minus a closed inner box decomposes
into at most 2N slabs).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box ``prod_i (lo_i, hi_i)``."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise DimensionMismatch("box lo/hi length mismatch")
        if not all(a < b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"degenerate box: lo={self.lo}, hi={self.hi}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.hi) - np.asarray(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.widths))

    def contains(self, x, strict: bool = True) -> bool:
        x = np.asarray(x, dtype=float)
        if strict:
            return bool(np.all(x > self.lo) and np.all(x < self.hi))
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def contains_box(self, other: "Box", strict: bool = True) -> bool:
        if strict:
            return all(a < c and d < b for a, b, c, d in
                       zip(self.lo, self.hi, other.lo, other.hi))
        return all(a <= c and d <= b for a, b, c, d in
                   zip(self.lo, self.hi, other.lo, other.hi))

    def intersect(self, other: "Box") -> "Box | None":
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(lo >= hi):
            return None
        return Box(tuple(lo), tuple(hi))

    def shift(self, t) -> "Box":
        t = np.asarray(t, dtype=float)
        return Box(tuple(np.asarray(self.lo) + t), tuple(np.asarray(self.hi) + t))

    def pad(self, margin: float) -> "Box":
        return Box(tuple(np.asarray(self.lo) - margin),
                   tuple(np.asarray(self.hi) + margin))

    def complement_within(self, ambient: "Box") -> list["Box"]:
        """Decompose ``ambient \\ closure(self)`` into <= 2*dim disjoint slabs."""
        if not ambient.contains_box(self, strict=False):
            raise ValueError("inner box must lie inside the ambient box")
        pieces: list[Box] = []
        lo = list(ambient.lo)
        hi = list(ambient.hi)
        for k in range(self.dim):
            if lo[k] < self.lo[k]:
                p_lo, p_hi = lo.copy(), hi.copy()
                p_hi[k] = self.lo[k]
                pieces.append(Box(tuple(p_lo), tuple(p_hi)))
            if self.hi[k] < hi[k]:
                p_lo, p_hi = lo.copy(), hi.copy()
                p_lo[k] = self.hi[k]
                pieces.append(Box(tuple(p_lo), tuple(p_hi)))
            lo[k], hi[k] = self.lo[k], self.hi[k]
        return pieces


@dataclass(frozen=True)
class BoxUnion:
    """Finite union of pairwise-disjoint open boxes."""

    boxes: tuple[Box, ...]

    def __post_init__(self):
        if not self.boxes:
            raise ValueError("empty box union")
        dims = {b.dim for b in self.boxes}
        if len(dims) != 1:
            raise DimensionMismatch("mixed dimensions in box union")

    @property
    def dim(self) -> int:
        return self.boxes[0].dim

    @property
    def volume(self) -> float:
        return sum(b.volume for b in self.boxes)

    def hull(self) -> Box:
        lo = np.min([b.lo for b in self.boxes], axis=0)
        hi = np.max([b.hi for b in self.boxes], axis=0)
        return Box(tuple(lo), tuple(hi))

    @staticmethod
    def of(box: Box) -> "BoxUnion":
        return BoxUnion((box,))
