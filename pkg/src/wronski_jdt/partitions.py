"""Partitions inside the d x (n-d) rectangle and their Vandermonde weights.

Boxes are 1-based ``(row, col)`` pairs in English notation. Partitions are
stored as fixed-length tuples of ``d`` parts, padded with zeros.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

Box = tuple[int, int]


@dataclass(frozen=True)
class RectBound:
    """The rectangle with ``d`` rows and ``n - d`` columns."""

    d: int
    n: int

    def __post_init__(self) -> None:
        if not (isinstance(self.d, int) and isinstance(self.n, int)):
            raise TypeError("d and n must be integers")
        if not 0 < self.d < self.n:
            raise ValueError(f"need 0 < d < n, got d={self.d}, n={self.n}")

    @property
    def width(self) -> int:
        return self.n - self.d

    @property
    def N(self) -> int:
        return self.d * (self.n - self.d)

    def full(self) -> "Partition":
        return Partition((self.width,) * self.d, self)

    def empty(self) -> "Partition":
        return Partition((0,) * self.d, self)


@dataclass(frozen=True)
class Partition:
    """A partition fitting in ``bound``.

    Comparison operators implement containment of diagrams, which is a
    partial order; do not use them as a sort key.
    """

    parts: tuple[int, ...]
    bound: RectBound

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        d = self.bound.d
        if len(parts) > d:
            if any(parts[d:]):
                raise ValueError(f"{parts} has more than {d} nonzero parts")
            parts = parts[:d]
        parts = parts + (0,) * (d - len(parts))
        if any(p < 0 or p > self.bound.width for p in parts):
            raise ValueError(f"{parts} does not fit in {d}x{self.bound.width}")
        if any(parts[i] < parts[i + 1] for i in range(d - 1)):
            raise ValueError(f"{parts} is not weakly decreasing")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, bound: RectBound, parts=()) -> "Partition":
        return cls(tuple(parts), bound)

    @classmethod
    def from_boxes(cls, bound: RectBound, boxes) -> "Partition":
        """Partition whose diagram is exactly ``boxes``; raises if not a diagram."""
        rows = [0] * bound.d
        for r, c in boxes:
            if not 1 <= r <= bound.d:
                raise ValueError(f"box {(r, c)} outside the rectangle")
            rows[r - 1] += 1
        lam = cls(tuple(rows), bound)
        if set(lam.boxes()) != set(boxes):
            raise ValueError("box set is not a partition diagram")
        return lam

    def __len__(self) -> int:
        return len(self.parts)

    def __getitem__(self, i: int) -> int:
        return self.parts[i]

    @property
    def size(self) -> int:
        return sum(self.parts)

    def boxes(self) -> list[Box]:
        return [(r + 1, c + 1) for r, p in enumerate(self.parts) for c in range(p)]

    def contains_box(self, box: Box) -> bool:
        r, c = box
        return 1 <= r <= len(self.parts) and 1 <= c <= self.parts[r - 1]

    def _check(self, other: "Partition") -> None:
        if self.bound != other.bound:
            raise ValueError("partitions live in different rectangles")

    def __le__(self, other: "Partition") -> bool:
        self._check(other)
        return all(a <= b for a, b in zip(self.parts, other.parts))

    def __ge__(self, other: "Partition") -> bool:
        return other <= self

    def __lt__(self, other: "Partition") -> bool:
        return self <= other and self != other

    def __gt__(self, other: "Partition") -> bool:
        return other < self

    def covers(self, other: "Partition") -> bool:
        """True when ``self`` is ``other`` plus one box."""
        return other <= self and self.size == other.size + 1

    def addable(self) -> list[Box]:
        out = []
        for r, p in enumerate(self.parts):
            if p < self.bound.width and (r == 0 or self.parts[r - 1] > p):
                out.append((r + 1, p + 1))
        return out

    def removable(self) -> list[Box]:
        out = []
        d = len(self.parts)
        for r, p in enumerate(self.parts):
            if p > 0 and (r == d - 1 or self.parts[r + 1] < p):
                out.append((r + 1, p))
        return out

    def add_box(self, box: Box) -> "Partition":
        r, c = box
        parts = list(self.parts)
        if parts[r - 1] + 1 != c:
            raise ValueError(f"box {box} is not addable to {self.parts}")
        parts[r - 1] += 1
        return Partition(tuple(parts), self.bound)

    def remove_box(self, box: Box) -> "Partition":
        r, c = box
        parts = list(self.parts)
        if parts[r - 1] != c:
            raise ValueError(f"box {box} is not removable from {self.parts}")
        parts[r - 1] -= 1
        return Partition(tuple(parts), self.bound)

    def to_json(self) -> dict:
        return {"d": self.bound.d, "n": self.bound.n, "parts": list(self.parts)}

    @classmethod
    def from_json(cls, obj: dict) -> "Partition":
        return cls(tuple(obj["parts"]), RectBound(int(obj["d"]), int(obj["n"])))

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


@dataclass(frozen=True)
class SkewShape:
    outer: Partition
    inner: Partition

    def __post_init__(self) -> None:
        if not self.inner <= self.outer:
            raise ValueError(f"{self.inner.parts} is not inside {self.outer.parts}")

    @classmethod
    def straight(cls, lam: Partition) -> "SkewShape":
        return cls(lam, lam.bound.empty())

    @property
    def bound(self) -> RectBound:
        return self.outer.bound

    @property
    def size(self) -> int:
        return self.outer.size - self.inner.size

    @property
    def is_straight(self) -> bool:
        return self.inner.size == 0

    def boxes(self) -> list[Box]:
        return [
            (r + 1, c + 1)
            for r, (p, q) in enumerate(zip(self.outer.parts, self.inner.parts))
            for c in range(q, p)
        ]

    def contains_box(self, box: Box) -> bool:
        return self.outer.contains_box(box) and not self.inner.contains_box(box)

    def to_json(self) -> dict:
        return {"outer": list(self.outer.parts), "inner": list(self.inner.parts)}

    @classmethod
    def from_json(cls, obj: dict, bound: RectBound) -> "SkewShape":
        return cls(Partition(tuple(obj["outer"]), bound), Partition(tuple(obj["inner"]), bound))

    def __repr__(self) -> str:
        return f"SkewShape({self.outer.parts}/{self.inner.parts})"


def all_partitions(bound: RectBound) -> list[Partition]:
    """Every partition in the rectangle, ordered by size then reverse-lex."""
    out = []
    for parts in itertools.product(range(bound.width, -1, -1), repeat=bound.d):
        if all(parts[i] >= parts[i + 1] for i in range(bound.d - 1)):
            out.append(Partition(parts, bound))
    out.sort(key=lambda p: (p.size, tuple(-x for x in p.parts)))
    return out


def partitions_of_size(bound: RectBound, k: int) -> list[Partition]:
    return [p for p in all_partitions(bound) if p.size == k]


def column_set(lam: Partition) -> tuple[int, ...]:
    """The pivot columns ``J(lam) = {j + lam_{d+1-j}}``, sorted."""
    d = lam.bound.d
    return tuple(j + lam.parts[d - j] for j in range(1, d + 1))


def partition_of_columns(bound: RectBound, cols) -> Partition:
    """Inverse of :func:`column_set`."""
    cols = sorted(cols)
    d = bound.d
    if len(cols) != d or len(set(cols)) != d or cols[0] < 1 or cols[-1] > bound.n:
        raise ValueError(f"{cols} is not a {d}-subset of 1..{bound.n}")
    parts = [0] * d
    for j, k in enumerate(cols, start=1):
        parts[d - j] = k - j
    return Partition(tuple(parts), bound)


def q_weight(lam: Partition) -> int:
    """Vandermonde product over the pivot columns of ``lam``."""
    k = column_set(lam)
    return math.prod(k[j] - k[i] for i in range(len(k)) for j in range(i + 1, len(k)))


def meet_join(lam: Partition, mu: Partition) -> tuple[Partition, Partition]:
    lam._check(mu)
    lo = tuple(min(a, b) for a, b in zip(lam.parts, mu.parts))
    hi = tuple(max(a, b) for a, b in zip(lam.parts, mu.parts))
    return Partition(lo, lam.bound), Partition(hi, lam.bound)


def complement_rotate(mu: Partition) -> tuple[SkewShape, Partition]:
    """Return ``(full/mu, mu_vee)`` where ``mu_vee`` is the rotated complement."""
    b = mu.bound
    d = b.d
    vee = tuple(b.width - mu.parts[d - 1 - i] for i in range(d))
    return SkewShape(b.full(), mu), Partition(vee, b)


def hook_length_count(lam: Partition) -> int:
    parts = [p for p in lam.parts if p]
    if not parts:
        return 1
    conj = [sum(1 for p in parts if p > c) for c in range(parts[0])]
    hooks = 1
    for r, p in enumerate(parts):
        for c in range(p):
            hooks *= (p - c - 1) + (conj[c] - r - 1) + 1
    return math.factorial(sum(parts)) // hooks


@lru_cache(maxsize=None)
def _chain_count(outer: tuple[int, ...], inner: tuple[int, ...]) -> int:
    if outer == inner:
        return 1
    total = 0
    d = len(outer)
    for r in range(d):
        if outer[r] > inner[r] and (r == d - 1 or outer[r + 1] < outer[r]):
            smaller = outer[:r] + (outer[r] - 1,) + outer[r + 1 :]
            total += _chain_count(smaller, inner)
    return total


def syt_count(shape: SkewShape | Partition) -> int:
    """Number of standard fillings; hook-length formula for straight shapes."""
    if isinstance(shape, Partition):
        shape = SkewShape.straight(shape)
    if shape.is_straight:
        return hook_length_count(shape.outer)
    return _chain_count(shape.outer.parts, shape.inner.parts)


def box_distance(b1: Box, b2: Box) -> int:
    if b1 == b2:
        raise ValueError("boxes must be distinct")
    return abs(b1[0] - b2[0]) + abs(b1[1] - b2[1])


@dataclass(frozen=True)
class Diamond:
    """Two boxes added to ``bottom`` in distinct rows and columns."""

    bottom: Partition
    left: Partition
    right: Partition
    top: Partition
    box_a: Box
    box_b: Box

    @property
    def distance(self) -> int:
        return box_distance(self.box_a, self.box_b)


def cover_diamonds(bound: RectBound) -> Iterator[Diamond]:
    for mu in all_partitions(bound):
        add = mu.addable()
        for a, b in itertools.combinations(add, 2):
            if a[0] == b[0] or a[1] == b[1]:
                continue
            left, right = mu.add_box(a), mu.add_box(b)
            yield Diamond(mu, left, right, left.add_box(b), a, b)
