"""Half-open intervals, finite disjoint unions, and point sets in [0,1).

Everything is left-closed right-open, so images under orientation
preserving piecewise translations stay representable and measures add up
with no boundary bookkeeping.  Distances are taken on [0,1] with the
standard metric, never on the circle.
"""

from __future__ import annotations

import bisect
from fractions import Fraction

from .errors import ParseError, VerificationError
from .exactnum import ONE, ZERO, ExactScalar, parse_scalar, scalar


class Interval:
    """The half-open interval [lo, hi) with 0 <= lo < hi <= 1."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = scalar(lo)
        hi = scalar(hi)
        if lo < ZERO or not lo < hi or hi > ONE:
            raise VerificationError(
                "interval endpoints must satisfy 0 <= lo < hi <= 1",
                lo=str(lo),
                hi=str(hi),
            )
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    @property
    def length(self) -> ExactScalar:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x < self.hi

    def translate(self, amount) -> "Interval":
        return Interval(self.lo + amount, self.hi + amount)

    def overlaps(self, other: "Interval") -> bool:
        return self.lo < other.hi and other.lo < self.hi

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"[{self.lo}, {self.hi})"

    def to_json(self):
        return [str(self.lo), str(self.hi)]

    @staticmethod
    def from_json(data) -> "Interval":
        if not isinstance(data, (list, tuple)) or len(data) != 2:
            raise ParseError("interval JSON must be a [lo, hi] pair", data=repr(data))
        return Interval(parse_scalar(data[0]), parse_scalar(data[1]))


UNIT = Interval(ZERO, ONE)


def dyadic(depth: int, index: int) -> Interval:
    """The dyadic interval [index/2**depth, (index+1)/2**depth)."""
    if depth < 0:
        raise ParseError("dyadic depth must be >= 0", depth=depth)
    if not 0 <= index < 2**depth:
        raise ParseError("dyadic index out of range", depth=depth, index=index)
    den = 2**depth
    return Interval(
        ExactScalar(Fraction(index, den)), ExactScalar(Fraction(index + 1, den))
    )


def _normalize(parts):
    """Sort by left endpoint and merge overlapping or touching parts."""
    parts = sorted(parts, key=lambda iv: iv.lo)
    merged: list[Interval] = []
    for iv in parts:
        if merged and not iv.lo > merged[-1].hi:
            if iv.hi > merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, iv.hi)
        else:
            merged.append(iv)
    return tuple(merged)


class IntervalSet:
    """A finite union of disjoint half-open intervals, kept normalized."""

    __slots__ = ("parts",)

    def __init__(self, parts=()):
        object.__setattr__(self, "parts", _normalize(parts))

    def __setattr__(self, name, value):
        raise AttributeError("IntervalSet is immutable")

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(())

    @staticmethod
    def full() -> "IntervalSet":
        return IntervalSet((UNIT,))

    @staticmethod
    def of(*parts) -> "IntervalSet":
        return IntervalSet(parts)

    @staticmethod
    def disjoint_union(parts) -> "IntervalSet":
        """Union of parts that must be pairwise disjoint (touching is fine)."""
        parts = sorted(parts, key=lambda iv: iv.lo)
        for prev, nxt in zip(parts, parts[1:]):
            if nxt.lo < prev.hi:
                raise VerificationError(
                    "intervals overlap where disjointness is required",
                    first=repr(prev),
                    second=repr(nxt),
                )
        return IntervalSet(parts)

    def measure(self) -> ExactScalar:
        total = ZERO
        for iv in self.parts:
            total = total + iv.length
        return total

    def is_empty(self) -> bool:
        return not self.parts

    def contains_point(self, x) -> bool:
        for iv in self.parts:
            if iv.contains(x):
                return True
            if iv.lo > x:
                return False
        return False

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.parts + other.parts)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        a, b = self.parts, other.parts
        while i < len(a) and j < len(b):
            lo = a[i].lo if a[i].lo > b[j].lo else b[j].lo
            hi = a[i].hi if a[i].hi < b[j].hi else b[j].hi
            if lo < hi:
                out.append(Interval(lo, hi))
            if a[i].hi < b[j].hi:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        j = 0
        b = other.parts
        for iv in self.parts:
            lo = iv.lo
            while j < len(b) and not b[j].hi > lo:
                j += 1
            k = j
            while k < len(b) and b[k].lo < iv.hi:
                if b[k].lo > lo:
                    out.append(Interval(lo, b[k].lo))
                if b[k].hi >= iv.hi:
                    lo = None
                    break
                lo = b[k].hi if b[k].hi > lo else lo
                k += 1
            if lo is not None and lo < iv.hi:
                out.append(Interval(lo, iv.hi))
        return IntervalSet(out)

    def complement(self) -> "IntervalSet":
        return IntervalSet.full().difference(self)

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __repr__(self):
        if not self.parts:
            return "IntervalSet(empty)"
        return "IntervalSet(" + " u ".join(repr(iv) for iv in self.parts) + ")"

    def to_json(self):
        return [iv.to_json() for iv in self.parts]

    @staticmethod
    def from_json(data) -> "IntervalSet":
        if not isinstance(data, list):
            raise ParseError("interval set JSON must be a list", data=repr(data))
        return IntervalSet([Interval.from_json(item) for item in data])


class PointSet:
    """Strictly increasing finite set of points in [0,1)."""

    __slots__ = ("points",)

    def __init__(self, points=()):
        pts = sorted(points)
        dedup: list[ExactScalar] = []
        for p in pts:
            p = scalar(p)
            if p < ZERO or not p < ONE:
                raise VerificationError("point outside [0,1)", point=str(p))
            if not dedup or p != dedup[-1]:
                dedup.append(p)
        object.__setattr__(self, "points", tuple(dedup))

    def __setattr__(self, name, value):
        raise AttributeError("PointSet is immutable")

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __contains__(self, x):
        i = bisect.bisect_left(self.points, x)
        return i < len(self.points) and self.points[i] == x

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        return "PointSet{" + ", ".join(str(p) for p in self.points) + "}"

    def union(self, other: "PointSet") -> "PointSet":
        return PointSet(self.points + other.points)

    def max_gap(self) -> ExactScalar:
        """Largest gap between consecutive points of self union {0, 1}.

        A set is eps-dense in [0,1] exactly when max_gap() < eps; the empty
        set has gap 1.
        """
        prev = ZERO
        best = ZERO
        for p in self.points:
            gap = p - prev
            if gap > best:
                best = gap
            prev = p
        gap = ONE - prev
        return gap if gap > best else best

    def to_json(self):
        return [str(p) for p in self.points]

    @staticmethod
    def from_json(data) -> "PointSet":
        if not isinstance(data, list):
            raise ParseError("point set JSON must be a list", data=repr(data))
        return PointSet([parse_scalar(p) for p in data])
