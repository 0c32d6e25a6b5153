"""Finitely supported vectors, intervals of indices, and the summing functional.

Coefficients are exact rationals (`fractions.Fraction`) end to end; float
views are derived on demand.  Indices are 1-based and strictly increasing in
iteration order.  All types are immutable and hashable, so they can be shared
freely across workers and used as cache keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Coefficient = Union[Fraction, int, float, str]


def as_fraction(value: Coefficient) -> Fraction:
    """Coerce ints, floats and ``"p/q"`` strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coefficient: {value!r}")
        return Fraction(value).limit_denominator(10**12) if value != int(value) else Fraction(int(value))
    raise TypeError(f"cannot interpret {value!r} as a rational coefficient")


@dataclass(frozen=True)
class FinVec:
    """Finitely supported coefficient vector over the canonical basis.

    Stored as ``((index, coefficient), ...)`` with indices strictly increasing
    and every stored coefficient nonzero.
    """

    coords: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        last = 0
        for idx, coeff in self.coords:
            if idx <= last:
                raise ValueError("indices must be strictly increasing and >= 1")
            if not isinstance(coeff, Fraction):
                raise TypeError("coefficients must be Fractions; use FinVec.make")
            if coeff == 0:
                raise ValueError("stored coefficients must be nonzero")
            last = idx

    # -- constructors ------------------------------------------------------

    @staticmethod
    def make(pairs: Iterable[tuple[int, Coefficient]]) -> "FinVec":
        acc: dict[int, Fraction] = {}
        for idx, val in pairs:
            idx = int(idx)
            acc[idx] = acc.get(idx, Fraction(0)) + as_fraction(val)
        items = tuple(sorted((i, c) for i, c in acc.items() if c != 0))
        return FinVec(items)

    @staticmethod
    def from_coeffs(coeffs: Sequence[Coefficient], start: int = 1) -> "FinVec":
        """Place ``coeffs`` at consecutive positions ``start, start+1, ...``."""
        return FinVec.make((start + i, c) for i, c in enumerate(coeffs))

    @staticmethod
    def zero() -> "FinVec":
        return FinVec(())

    @staticmethod
    def basis(i: int) -> "FinVec":
        return FinVec.make([(i, 1)])

    # -- basic queries -----------------------------------------------------

    def __iter__(self) -> Iterator[tuple[int, Fraction]]:
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __bool__(self) -> bool:
        return bool(self.coords)

    def __getitem__(self, index: int) -> Fraction:
        for idx, coeff in self.coords:
            if idx == index:
                return coeff
            if idx > index:
                break
        return Fraction(0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(idx for idx, _ in self.coords)

    @property
    def min_support(self) -> int | None:
        return self.coords[0][0] if self.coords else None

    @property
    def max_support(self) -> int | None:
        return self.coords[-1][0] if self.coords else None

    def sup_norm(self) -> Fraction:
        return max((abs(c) for _, c in self.coords), default=Fraction(0))

    def l1_norm(self) -> Fraction:
        return sum((abs(c) for _, c in self.coords), Fraction(0))

    def total(self) -> Fraction:
        """Sum of all coefficients (the summing functional)."""
        return sum((c for _, c in self.coords), Fraction(0))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "FinVec") -> "FinVec":
        return FinVec.make(list(self.coords) + list(other.coords))

    def __sub__(self, other: "FinVec") -> "FinVec":
        return self + (-other)

    def __neg__(self) -> "FinVec":
        return FinVec(tuple((i, -c) for i, c in self.coords))

    def scale(self, factor: Coefficient) -> "FinVec":
        f = as_fraction(factor)
        if f == 0:
            return FinVec.zero()
        return FinVec(tuple((i, c * f) for i, c in self.coords))

    def restrict(self, interval: "Interval") -> "FinVec":
        return FinVec(tuple((i, c) for i, c in self.coords if interval.contains(i)))

    def shift(self, offset: int) -> "FinVec":
        return FinVec(tuple((i + offset, c) for i, c in self.coords))

    def spread(self, positions: Sequence[int]) -> "FinVec":
        """Re-place the compacted coefficients at the given increasing positions."""
        comp = self.compact()
        if len(positions) != len(comp):
            raise ValueError("need exactly one position per supported coefficient")
        return FinVec.make(zip(positions, comp))

    def compact(self) -> tuple[Fraction, ...]:
        """Ordered nonzero coefficients, gap positions removed."""
        return tuple(c for _, c in self.coords)

    # -- conversions -------------------------------------------------------

    def to_float_dict(self) -> dict[int, float]:
        return {i: float(c) for i, c in self.coords}

    def dense(self, length: int | None = None) -> list[Fraction]:
        """Coefficients at positions 1..length (length defaults to max support)."""
        n = length if length is not None else (self.max_support or 0)
        out = [Fraction(0)] * n
        for i, c in self.coords:
            if i <= n:
                out[i - 1] = c
        return out

    def __str__(self) -> str:
        if not self.coords:
            return "0"
        return " + ".join(f"({c})e_{i}" for i, c in self.coords).replace("+ (-", "- (")


def compact(x: FinVec) -> tuple[Fraction, ...]:
    """Ordered coefficient tuple of ``x`` with zero gaps removed."""
    return x.compact()


@dataclass(frozen=True)
class Interval:
    """Integer interval ``[lo, hi]`` (inclusive); ``hi=None`` marks [lo, inf)."""

    lo: int
    hi: int | None

    def __post_init__(self):
        if self.lo < 1:
            raise ValueError("interval endpoints are 1-based")
        if self.hi is not None and self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def is_infinite(self) -> bool:
        return self.hi is None

    def contains(self, i: int) -> bool:
        return i >= self.lo and (self.hi is None or i <= self.hi)

    def length(self) -> int:
        if self.hi is None:
            raise ValueError("right-infinite interval has no length")
        return self.hi - self.lo + 1

    def indices(self) -> range:
        if self.hi is None:
            raise ValueError("cannot iterate a right-infinite interval")
        return range(self.lo, self.hi + 1)

    def __str__(self) -> str:
        return f"[{self.lo},{'inf' if self.hi is None else self.hi}]"


def interval_sum(x: FinVec, interval: Interval) -> Fraction:
    """Exact sum of the coefficients of ``x`` with index in ``interval``."""
    return sum((c for i, c in x.coords if interval.contains(i)), Fraction(0))


def _check_finite_intervals(intervals: Sequence[Interval], allow_final_infinite: bool):
    for k, iv in enumerate(intervals):
        if iv.is_infinite and not (allow_final_infinite and k == len(intervals) - 1):
            raise ValueError("only the final interval may be right-infinite")


@dataclass(frozen=True)
class IntervalPartition:
    """Consecutive intervals: ``max I_k + 1 == min I_{k+1}`` for adjacent pairs."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        _check_finite_intervals(self.intervals, allow_final_infinite=True)
        for a, b in zip(self.intervals, self.intervals[1:]):
            if a.hi is None or a.hi + 1 != b.lo:
                raise ValueError(f"intervals {a} and {b} are not consecutive")

    @staticmethod
    def from_cuts(lo: int, cuts: Sequence[int], hi: int) -> "IntervalPartition":
        """Partition of [lo, hi] cut after each position listed in ``cuts``."""
        bounds = [lo] + [c + 1 for c in cuts] + [hi + 1]
        return IntervalPartition(
            tuple(Interval(a, b - 1) for a, b in zip(bounds, bounds[1:]))
        )

    def covers(self, indices: Iterable[int]) -> bool:
        return all(any(iv.contains(i) for iv in self.intervals) for i in indices)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)


@dataclass(frozen=True)
class IntervalSystem:
    """Pairwise disjoint, strictly increasing intervals; gaps permitted."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        _check_finite_intervals(self.intervals, allow_final_infinite=True)
        for a, b in zip(self.intervals, self.intervals[1:]):
            if a.hi is None or a.hi >= b.lo:
                raise ValueError(f"intervals {a} and {b} are not increasing/disjoint")

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)


def interval_sums(x: FinVec, intervals: Iterable[Interval]) -> tuple[Fraction, ...]:
    return tuple(interval_sum(x, iv) for iv in intervals)


@dataclass(frozen=True)
class ConvexBlockSeq:
    """Successive blocks with nonnegative coefficients summing to one each."""

    blocks: tuple[FinVec, ...]

    def __post_init__(self):
        prev_max = 0
        for k, block in enumerate(self.blocks):
            if not block:
                raise ValueError(f"block {k} is empty")
            if block.min_support <= prev_max:
                raise ValueError(f"block {k} does not start after block {k - 1}")
            if any(c < 0 for _, c in block.coords):
                raise ValueError(f"block {k} has a negative coefficient")
            if block.total() != 1:
                raise ValueError(f"block {k} coefficients do not sum to 1 exactly")
            prev_max = block.max_support

    @staticmethod
    def averages(sizes: Sequence[int], start: int = 1) -> "ConvexBlockSeq":
        """Flat averages of the basis with the given block sizes."""
        blocks = []
        pos = start
        for size in sizes:
            if size < 1:
                raise ValueError("block sizes must be positive")
            w = Fraction(1, size)
            blocks.append(FinVec.make((pos + j, w) for j in range(size)))
            pos += size
        return ConvexBlockSeq(tuple(blocks))

    def combine(self, coeffs: Sequence[Coefficient]) -> FinVec:
        """Return ``sum_i coeffs[i] * block_i`` (uses the first len(coeffs) blocks)."""
        if len(coeffs) > len(self.blocks):
            raise ValueError("more coefficients than blocks")
        out = FinVec.zero()
        for c, block in zip(coeffs, self.blocks):
            out = out + block.scale(c)
        return out

    def __iter__(self) -> Iterator[FinVec]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)


def difference_basis_vector(i: int) -> FinVec:
    """``d_1 = e_1`` and ``d_i = e_i - e_{i-1}`` for ``i >= 2``.

    For i >= 2 these vectors sum to zero, which is what makes spans of skipped
    difference blocks behave unconditionally.
    """
    if i < 1:
        raise ValueError("index must be >= 1")
    if i == 1:
        return FinVec.basis(1)
    return FinVec.make([(i, 1), (i - 1, -1)])


@dataclass(frozen=True)
class SkippedDifferenceSpan:
    """Span of difference vectors over skipped intervals (``max E_j + 1 < min E_{j+1}``)."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        _check_finite_intervals(self.intervals, allow_final_infinite=False)
        for a, b in zip(self.intervals, self.intervals[1:]):
            if a.hi + 1 >= b.lo:
                raise ValueError(f"intervals {a} and {b} are not skipped")

    def member(self, coeffs_per_interval: Sequence[Sequence[Coefficient]]) -> FinVec:
        """Combine ``d_i`` for ``i`` in each interval with the given coefficients."""
        if len(coeffs_per_interval) != len(self.intervals):
            raise ValueError("need one coefficient block per interval")
        out = FinVec.zero()
        for iv, coeffs in zip(self.intervals, coeffs_per_interval):
            if len(coeffs) != iv.length():
                raise ValueError(f"interval {iv} needs {iv.length()} coefficients")
            for i, c in zip(iv.indices(), coeffs):
                out = out + difference_basis_vector(i).scale(c)
        return out


def parse_vector_mapping(doc: Mapping) -> FinVec:
    """Build a FinVec from the shared file schema ``{"coords": [[i, c], ...]}``.

    Coefficients may be numbers or strings of the form ``"p/q"``.
    """
    if "coords" not in doc:
        raise ValueError('vector document must have a "coords" field')
    coords = doc["coords"]
    if not isinstance(coords, (list, tuple)):
        raise ValueError('"coords" must be a list of [index, coefficient] pairs')
    pairs = []
    for entry in coords:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ValueError(f"malformed coords entry: {entry!r}")
        pairs.append((int(entry[0]), as_fraction(entry[1])))
    return FinVec.make(pairs)


def vector_to_mapping(x: FinVec) -> dict:
    """Inverse of :func:`parse_vector_mapping`; exact rationals become "p/q" strings."""
    out = []
    for i, c in x.coords:
        out.append([i, int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"])
    return {"coords": out}
