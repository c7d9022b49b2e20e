"""Poincare first-return maps of an IET to a subinterval.

The construction propagates the whole base interval forward, splitting at
genuine discontinuities and harvesting the parts that land back in the
base.  This yields exact piece boundaries, certifies maximality of the
pieces, and detects non-return within a step cap.  The induced map is
again an interval exchange, on at most d+2 pieces, with the return time
constant on each piece.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .errors import PreconditionError, StepCapError, VerificationError
from .exactnum import ZERO, ExactScalar, scalar
from .iet import IET, SCHEMA
from .intervals import Interval, IntervalSet


@dataclass(frozen=True)
class ReturnPiece:
    part: Interval
    return_time: int
    translation: ExactScalar  # T^return_time acts as x -> x + translation on part

    def to_json(self):
        return {
            "part": self.part.to_json(),
            "return_time": self.return_time,
            "translation": str(self.translation),
        }


@dataclass
class ReturnSystem:
    iet: IET
    base: Interval
    pieces: list
    induced: IET

    def histogram(self):
        """Measure carried by each return time, sorted by time."""
        agg = {}
        for piece in self.pieces:
            t = piece.return_time
            agg[t] = agg.get(t, ZERO) + piece.part.length
        return sorted(agg.items())

    def kac_sum(self) -> ExactScalar:
        """Sum of return_time * piece measure over all pieces."""
        total = ZERO
        for piece in self.pieces:
            total = total + piece.part.length * piece.return_time
        return total

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": "return-system",
            "iet": self.iet.to_json(),
            "base": self.base.to_json(),
            "pieces": [p.to_json() for p in self.pieces],
            "induced": self.induced.to_json(),
            "histogram": [[t, str(m)] for t, m in self.histogram()],
            "kac_sum": str(self.kac_sum()),
        }


def default_step_cap(base: Interval, d: int) -> int:
    """ceil(4/|I|) + 4d: covers useful return times with margin."""
    four_over = scalar(4) / base.length
    return -((-four_over).floor()) + 4 * d


def propagate_returns(iet: IET, base: Interval, step_cap: int):
    """Push `base` forward until return or cap; exact return pieces.

    Returns (pieces, uncovered) where pieces are the merged maximal return
    pieces found within `step_cap` steps and `uncovered` collects the parts
    of the base whose return takes longer.
    """
    if step_cap < 1:
        raise PreconditionError("step cap must be >= 1", step_cap=step_cap)
    disc = iet.discontinuity_list()
    breaks = iet.breaks
    shifts = iet.shifts
    ilo, ihi = base.lo, base.hi

    # active segments: (orig_lo, orig_hi, shift); current position = orig + shift
    active = [(base.lo, base.hi, ZERO)]
    found = []

    for step in range(1, step_cap + 1):
        if not active:
            break
        next_active = []
        for orig_lo, orig_hi, shift in active:
            cur_lo = orig_lo + shift
            cur_hi = orig_hi + shift
            # split the current interval at genuine discontinuities
            cuts = [cur_lo]
            i = bisect.bisect_right(disc, cur_lo)
            while i < len(disc) and disc[i] < cur_hi:
                cuts.append(disc[i])
                i += 1
            cuts.append(cur_hi)
            for c_lo, c_hi in zip(cuts, cuts[1:]):
                piece = bisect.bisect_right(breaks, c_lo) - 1
                t = shifts[piece]
                n_lo = c_lo + t
                n_hi = c_hi + t
                n_shift = shift + t
                ov_lo = n_lo if n_lo > ilo else ilo
                ov_hi = n_hi if n_hi < ihi else ihi
                if ov_lo < ov_hi:
                    found.append(
                        ReturnPiece(
                            Interval(ov_lo - n_shift, ov_hi - n_shift),
                            step,
                            n_shift,
                        )
                    )
                    if n_lo < ov_lo:
                        next_active.append((n_lo - n_shift, ov_lo - n_shift, n_shift))
                    if ov_hi < n_hi:
                        next_active.append((ov_hi - n_shift, n_hi - n_shift, n_shift))
                else:
                    next_active.append((n_lo - n_shift, n_hi - n_shift, n_shift))
        active = next_active

    found.sort(key=lambda p: p.part.lo)
    pieces: list[ReturnPiece] = []
    for p in found:
        if (
            pieces
            and pieces[-1].return_time == p.return_time
            and pieces[-1].translation == p.translation
            and pieces[-1].part.hi == p.part.lo
        ):
            pieces[-1] = ReturnPiece(
                Interval(pieces[-1].part.lo, p.part.hi), p.return_time, p.translation
            )
        else:
            pieces.append(p)
    uncovered = IntervalSet([Interval(lo, hi) for lo, hi, _ in active])
    return pieces, uncovered


def first_return(iet: IET, base: Interval, step_cap: int | None = None) -> ReturnSystem:
    """First-return system of `iet` on `base`.

    Every point of the base must come back within `step_cap` steps;
    otherwise a StepCapError reports the uncovered remainder, which
    signals either non-minimality or a cap that is too low.
    """
    if step_cap is None:
        step_cap = default_step_cap(base, iet.d)
    pieces, uncovered = propagate_returns(iet, base, step_cap)
    if not uncovered.is_empty():
        raise StepCapError(
            "step cap exceeded before the base interval was covered",
            uncovered=uncovered.to_json(),
            step_cap=step_cap,
            covered_measure=str(IntervalSet([p.part for p in pieces]).measure()),
        )

    _check_tiling(pieces, base)
    if len(pieces) > iet.d + 2:
        raise VerificationError(
            "return map has more pieces than the d+2 bound allows",
            pieces=len(pieces),
            bound=iet.d + 2,
        )
    induced = _induced_iet(pieces, base)
    return ReturnSystem(iet, base, pieces, induced)


def _check_tiling(pieces, base):
    cursor = base.lo
    for p in pieces:
        if p.part.lo != cursor:
            raise VerificationError(
                "return pieces do not tile the base interval", at=str(cursor)
            )
        cursor = p.part.hi
    if cursor != base.hi:
        raise VerificationError(
            "return pieces do not reach the end of the base", at=str(cursor)
        )


def _induced_iet(pieces, base) -> IET:
    width = base.length
    lengths = [p.part.length / width for p in pieces]
    image_lo = [(p.part.lo + p.translation - base.lo) for p in pieces]
    order = sorted(range(len(pieces)), key=lambda i: image_lo[i])
    perm = [0] * len(pieces)
    for rank, i in enumerate(order):
        perm[i] = rank + 1
    induced = IET(lengths, perm)
    # the abstract exchange must reproduce the recorded translations exactly
    for i, p in enumerate(pieces):
        rescaled_shift = induced.shifts[i] * width
        if rescaled_shift != p.translation:
            raise VerificationError(
                "induced exchange disagrees with recorded translations",
                piece=i,
                expected=str(p.translation),
                derived=str(rescaled_shift),
            )
    return induced


def return_time_histogram(system: ReturnSystem):
    return system.histogram()


def saturation(iet: IET, base: Interval, max_rounds: int = 10000) -> IntervalSet:
    """Closure of `base` under forward images, as an exact interval set.

    Stabilizes in finitely many rounds for rational data; used as an
    independent oracle for full-coverage (Kac) checks.
    """
    pw = iet.as_piecewise()
    current = IntervalSet.of(base)
    for _ in range(max_rounds):
        nxt = current.union(pw.image_of_set(current))
        if nxt == current:
            return current
        current = nxt
    raise PreconditionError("saturation did not stabilize", rounds=max_rounds)
