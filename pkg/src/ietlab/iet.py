"""Interval exchange transformations as exact piecewise translations.

An IET is given by d positive lengths summing to 1 and a permutation of
{1..d}: piece i occupies [beta_{i-1}, beta_i) in the domain and is moved,
by a translation, to the slot `perm[i]` of the rearranged order.  Powers
T^n are materialized as explicit piecewise translations so that statements
like "T^n displaces every point of a set by less than eps" reduce to
finitely many exact per-piece checks.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError, PreconditionError, VerificationError
from .exactnum import ONE, ZERO, ExactScalar, parse_scalar, scalar
from .intervals import Interval, IntervalSet, PointSet

SCHEMA = "iet-lab/v1"


class PiecewiseTranslation:
    """A bijection of [0,1) that translates each of finitely many pieces.

    Stored as left endpoints 0 = breaks[0] < ... < breaks[m] = 1 plus one
    shift per piece, with adjacent pieces of equal shift merged, so equal
    maps have equal representations.
    """

    __slots__ = ("breaks", "shifts", "_img_index", "_inv")

    def __init__(self, breaks, shifts, validate=True):
        merged_breaks = [breaks[0]]
        merged_shifts = []
        for i, s in enumerate(shifts):
            if merged_shifts and merged_shifts[-1] == s:
                continue
            if merged_shifts:
                merged_breaks.append(breaks[i])
            merged_shifts.append(s)
        merged_breaks.append(breaks[len(shifts)])
        self.breaks = merged_breaks
        self.shifts = merged_shifts
        self._img_index = None
        self._inv = None
        if validate:
            self._validate()

    def _validate(self):
        if self.breaks[0] != ZERO or self.breaks[-1] != ONE:
            raise VerificationError("pieces must start at 0 and end at 1")
        for a, b in zip(self.breaks, self.breaks[1:]):
            if not a < b:
                raise VerificationError("piece endpoints must increase")
        images = sorted(
            (self.breaks[i] + s, self.breaks[i + 1] + s)
            for i, s in enumerate(self.shifts)
        )
        cursor = ZERO
        for lo, hi in images:
            if lo != cursor:
                raise VerificationError(
                    "image pieces do not tile [0,1)", at=str(cursor)
                )
            cursor = hi
        if cursor != ONE:
            raise VerificationError("image pieces do not reach 1")

    @staticmethod
    def identity() -> "PiecewiseTranslation":
        return PiecewiseTranslation([ZERO, ONE], [ZERO], validate=False)

    @property
    def piece_count(self) -> int:
        return len(self.shifts)

    def pieces(self):
        """Yield (interval, shift) pairs in domain order."""
        for i, s in enumerate(self.shifts):
            yield Interval(self.breaks[i], self.breaks[i + 1]), s

    def apply(self, x) -> ExactScalar:
        if x < ZERO or not x < ONE:
            raise PreconditionError("point outside [0,1)", point=str(x))
        i = bisect.bisect_right(self.breaks, x) - 1
        return x + self.shifts[i]

    def _image_index(self):
        if self._img_index is None:
            order = sorted(
                range(len(self.shifts)), key=lambda i: self.breaks[i] + self.shifts[i]
            )
            self._img_index = (
                [self.breaks[i] + self.shifts[i] for i in order],
                order,
            )
        return self._img_index

    def apply_inverse(self, y) -> ExactScalar:
        if y < ZERO or not y < ONE:
            raise PreconditionError("point outside [0,1)", point=str(y))
        img_los, order = self._image_index()
        i = bisect.bisect_right(img_los, y) - 1
        return y - self.shifts[order[i]]

    def inverse(self) -> "PiecewiseTranslation":
        if self._inv is None:
            img_los, order = self._image_index()
            breaks = list(img_los) + [ONE]
            shifts = [-self.shifts[i] for i in order]
            inv = PiecewiseTranslation(breaks, shifts, validate=False)
            inv._inv = self
            self._inv = inv
        return self._inv

    def translation_on(self, interval: Interval) -> Optional[ExactScalar]:
        """The constant shift on `interval`, or None if a break cuts it."""
        i = bisect.bisect_right(self.breaks, interval.lo) - 1
        if self.breaks[i + 1] >= interval.hi:
            return self.shifts[i]
        return None

    def image_of_set(self, s: IntervalSet) -> IntervalSet:
        out = []
        for part in s.parts:
            i = bisect.bisect_right(self.breaks, part.lo) - 1
            lo = part.lo
            while lo < part.hi:
                hi = self.breaks[i + 1]
                if part.hi < hi:
                    hi = part.hi
                out.append(Interval(lo + self.shifts[i], hi + self.shifts[i]))
                lo = hi
                i += 1
        return IntervalSet(out)

    def preimage_of_set(self, s: IntervalSet) -> IntervalSet:
        return self.inverse().image_of_set(s)

    def refine_against(self, s: IntervalSet):
        """Split `s` at the breaks of self; yield (interval, shift) pairs."""
        for part in s.parts:
            i = bisect.bisect_right(self.breaks, part.lo) - 1
            lo = part.lo
            while lo < part.hi:
                hi = self.breaks[i + 1]
                if part.hi < hi:
                    hi = part.hi
                yield Interval(lo, hi), self.shifts[i]
                lo = hi
                i += 1

    def __eq__(self, other):
        if not isinstance(other, PiecewiseTranslation):
            return NotImplemented
        return self.breaks == other.breaks and self.shifts == other.shifts

    def __hash__(self):
        return hash((tuple(self.breaks), tuple(self.shifts)))

    def __repr__(self):
        return f"PiecewiseTranslation({self.piece_count} pieces)"


def compose(after: PiecewiseTranslation, before: PiecewiseTranslation):
    """The piecewise translation x -> after(before(x))."""
    ab = after.breaks
    ash = after.shifts
    breaks: list[ExactScalar] = []
    shifts: list[ExactScalar] = []

    def push(lo, shift):
        if shifts and shifts[-1] == shift:
            return
        breaks.append(lo)
        shifts.append(shift)

    for idx, s in enumerate(before.shifts):
        u = before.breaks[idx]
        v = before.breaks[idx + 1]
        hi_img = v + s
        i = bisect.bisect_right(ab, u + s) - 1
        cur = u
        while True:
            total = s + ash[i]
            nxt = ab[i + 1]
            if nxt < hi_img:
                push(cur, total)
                cur = nxt - s
                i += 1
            else:
                push(cur, total)
                break
    breaks.append(ONE)
    return PiecewiseTranslation(breaks, shifts, validate=False)


class IET:
    """Interval exchange transformation with exact quadratic-field data."""

    __slots__ = (
        "d",
        "lengths",
        "perm",
        "breaks",
        "shifts",
        "field_d",
        "is_reducible",
        "_disc",
        "_inverse",
        "_pow2",
        "_pow_cache",
    )

    def __init__(self, lengths, perm):
        lengths = [scalar(x) for x in lengths]
        perm = [int(p) for p in perm]
        d = len(lengths)
        if d == 0:
            raise PreconditionError("an IET needs at least one piece")
        if sorted(perm) != list(range(1, d + 1)):
            raise PreconditionError("perm is not a permutation of 1..d", perm=perm)
        field = 0
        for x in lengths:
            if x.sign() <= 0:
                raise PreconditionError("lengths must be positive", length=str(x))
            if x.d:
                if field and x.d != field:
                    raise PreconditionError(
                        "lengths mix distinct quadratic fields",
                        fields=[field, x.d],
                    )
                field = x.d
        total = ZERO
        for x in lengths:
            total = total + x
        if total != ONE:
            raise PreconditionError("lengths must sum to 1", total=str(total))

        breaks = [ZERO]
        for x in lengths:
            breaks.append(breaks[-1] + x)
        inv = [0] * (d + 1)
        for i, p in enumerate(perm):
            inv[p] = i
        image_lo = {}
        acc = ZERO
        for p in range(1, d + 1):
            i = inv[p]
            image_lo[i] = acc
            acc = acc + lengths[i]
        shifts = [image_lo[i] - breaks[i] for i in range(d)]

        self.d = d
        self.lengths = tuple(lengths)
        self.perm = tuple(perm)
        self.breaks = breaks
        self.shifts = shifts
        self.field_d = field
        # a proper invariant prefix [0, beta_k) makes minimality impossible
        self.is_reducible = any(
            max(perm[:k]) == k for k in range(1, d)
        )
        self._disc = None
        self._inverse = None
        self._pow2 = None
        self._pow_cache = {}

    # -- evaluation --------------------------------------------------------

    def apply(self, x) -> ExactScalar:
        if x < ZERO or not x < ONE:
            raise PreconditionError("point outside [0,1)", point=str(x))
        i = bisect.bisect_right(self.breaks, x) - 1
        return x + self.shifts[i]

    def left_limit_apply(self, x) -> ExactScalar:
        """Limit of T at x from the left, defined for 0 < x <= 1."""
        if not ZERO < x or x > ONE:
            raise PreconditionError("point outside (0,1]", point=str(x))
        i = bisect.bisect_left(self.breaks, x) - 1
        return x + self.shifts[i]

    def apply_inverse(self, y) -> ExactScalar:
        return self.inverse().apply(y)

    def left_limit_apply_inverse(self, y) -> ExactScalar:
        return self.inverse().left_limit_apply(y)

    def orbit(self, x, n: int, direction: int = 1):
        """[x, Tx, ..., T^n x] for direction +1, inverse orbit for -1."""
        if n < 0:
            raise PreconditionError("orbit length must be >= 0", n=n)
        if direction not in (1, -1):
            raise PreconditionError("direction must be +1 or -1")
        step = self.apply if direction == 1 else self.apply_inverse
        out = [scalar(x)]
        for _ in range(n):
            out.append(step(out[-1]))
        return out

    # -- structure ---------------------------------------------------------

    def inverse(self) -> "IET":
        if self._inverse is None:
            inv_pos = [0] * (self.d + 1)
            for i, p in enumerate(self.perm):
                inv_pos[p] = i + 1
            lengths = [self.lengths[inv_pos[p] - 1] for p in range(1, self.d + 1)]
            perm = [inv_pos[p] for p in range(1, self.d + 1)]
            other = IET(lengths, perm)
            other._inverse = self
            self._inverse = other
        return self._inverse

    def discontinuity_list(self):
        """Interior breakpoints where the translation genuinely jumps."""
        if self._disc is None:
            self._disc = [
                self.breaks[i]
                for i in range(1, self.d)
                if self.shifts[i] != self.shifts[i - 1]
            ]
        return self._disc

    def discontinuities(self) -> PointSet:
        return PointSet(self.discontinuity_list())

    def as_piecewise(self) -> PiecewiseTranslation:
        return PiecewiseTranslation(list(self.breaks), list(self.shifts))

    def power(self, n: int) -> PiecewiseTranslation:
        """T^n as an explicit piecewise translation (n may be negative)."""
        if n == 0:
            return PiecewiseTranslation.identity()
        if n < 0:
            return self.inverse().power(-n)
        cached = self._pow_cache.get(n)
        if cached is not None:
            return cached
        if self._pow2 is None:
            self._pow2 = [self.as_piecewise()]
        while len(self._pow2) < n.bit_length():
            prev = self._pow2[-1]
            self._pow2.append(compose(prev, prev))
        result = None
        m, bit = n, 0
        while m:
            if m & 1:
                p2 = self._pow2[bit]
                result = p2 if result is None else compose(p2, result)
            m >>= 1
            bit += 1
        self._pow_cache[n] = result
        return result

    def clear_power_cache(self):
        self._pow_cache.clear()
        self._pow2 = None
        if self._inverse is not None:
            self._inverse._pow_cache.clear()
            self._inverse._pow2 = None

    # -- identity/serialization --------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, IET):
            return NotImplemented
        return self.lengths == other.lengths and self.perm == other.perm

    def __hash__(self):
        return hash((self.lengths, self.perm))

    def __repr__(self):
        body = ", ".join(str(x) for x in self.lengths)
        return f"IET(d={self.d}, lengths=({body}), perm={list(self.perm)})"

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": "iet",
            "lengths": [str(x) for x in self.lengths],
            "perm": list(self.perm),
            "field_D": self.field_d,
        }

    @staticmethod
    def from_json(data) -> "IET":
        if not isinstance(data, dict):
            raise ParseError("IET JSON must be an object", data=repr(data)[:200])
        allowed = {"schema", "kind", "lengths", "perm", "field_D"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ParseError("unknown fields in IET JSON", fields=unknown)
        try:
            lengths = [parse_scalar(s) for s in data["lengths"]]
            perm = [int(p) for p in data["perm"]]
        except (KeyError, TypeError) as exc:
            raise ParseError("IET JSON needs 'lengths' and 'perm' lists",
                             cause=str(exc)) from None
        iet = IET(lengths, perm)
        declared = data.get("field_D")
        if declared is not None and int(declared) != iet.field_d:
            raise ParseError(
                "declared field_D does not match lengths",
                declared=int(declared),
                actual=iet.field_d,
            )
        return iet


def make_iet(lengths, perm) -> IET:
    """Validated IET from lengths and a 1-based permutation."""
    return IET(lengths, perm)


def rotation(alpha) -> IET:
    """The rotation x -> x + alpha (mod 1) as a 2-piece exchange."""
    alpha = scalar(alpha)
    if not ZERO < alpha < ONE:
        raise PreconditionError("rotation amount must lie in (0,1)",
                                alpha=str(alpha))
    return IET([ONE - alpha, alpha], [2, 1])


@dataclass(frozen=True)
class MinimalityReport:
    certified: bool
    depth: int
    witness: Optional[tuple]  # (steps, delta, delta_prime) when not certified
    reason: str
    degenerate_breakpoints: bool = False

    @property
    def status(self) -> str:
        return (
            f"certified_minimal_up_to_{self.depth}" if self.certified else "violation"
        )

    def to_json(self):
        witness = None
        if self.witness is not None:
            steps, delta, delta_prime = self.witness
            witness = {
                "steps": steps,
                "delta": str(delta),
                "delta_prime": str(delta_prime),
            }
        return {
            "schema": SCHEMA,
            "kind": "minimality-report",
            "status": self.status,
            "certified": self.certified,
            "depth": self.depth,
            "witness": witness,
            "reason": self.reason,
            "degenerate_breakpoints": self.degenerate_breakpoints,
        }


def check_idoc(iet: IET, depth: int) -> MinimalityReport:
    """Certify Keane's infinite-distinct-orbit condition up to `depth`.

    Scans the forward orbit of every discontinuity for `depth` steps; any
    hit T^i(delta) = delta' is a violation witness.  Certification is a
    sufficient minimality criterion only up to the scanned depth; full
    minimality is never decided at finite depth.
    """
    if depth < 1:
        raise PreconditionError("depth must be >= 1", depth=depth)
    disc = iet.discontinuity_list()
    degenerate = len(disc) < iet.d - 1
    if iet.d == 1:
        return MinimalityReport(
            False, depth, None, "single piece: every orbit is a fixed point"
        )
    if iet.is_reducible:
        return MinimalityReport(
            False, depth, None, "reducible permutation: proper invariant prefix",
            degenerate,
        )
    if not disc:
        return MinimalityReport(
            False, depth, None, "no genuine discontinuity: identity map", degenerate
        )
    for delta in disc:
        x = delta
        for i in range(1, depth + 1):
            x = iet.apply(x)
            j = bisect.bisect_left(disc, x)
            if j < len(disc) and disc[j] == x:
                return MinimalityReport(
                    False,
                    depth,
                    (i, delta, x),
                    "discontinuity orbit returns to a discontinuity",
                    degenerate,
                )
    return MinimalityReport(
        True, depth, None, "no orbit collision within depth", degenerate
    )


def preimage(iet: IET, s: IntervalSet) -> IntervalSet:
    """T^{-1}(s), exactly."""
    return iet.inverse().as_piecewise().image_of_set(s)


def image(iet: IET, s: IntervalSet) -> IntervalSet:
    """T(s), exactly."""
    return iet.as_piecewise().image_of_set(s)
