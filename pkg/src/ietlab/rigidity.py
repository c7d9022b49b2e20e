"""Partial-rigidity certificates for minimal interval exchanges.

Pipeline: partition [0,1) by the depth-n backward orbit of the
discontinuities, classify the partition elements by the discontinuities
their endpoints map to, pick a class of large total measure, and run a
dichotomy on one of its long members:

* either the member admits a long run of pairwise disjoint images, and a
  first-return tower over it carries a small uniform displacement
  ("return-tower" branch), or
* some small power already overlaps the member, and the overlap drift
  propagates along equally spaced translates ("translation-drift" branch).

Both branches end in a RigidityCertificate: an integer k, a region A of
measure above 1/(10^5 d^5), and a per-piece displacement table showing
|T^k x - x| < eps on all of A.  Certificates are re-verified from scratch
before being returned and are replayable by an independent checker.
"""

from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (
    CertificationFailedError,
    ParseError,
    PreconditionError,
    VerificationError,
)
from .exactnum import ONE, ZERO, ExactScalar, parse_scalar, scalar
from .iet import IET, SCHEMA, check_idoc
from .intervals import Interval, IntervalSet, PointSet
from .return_map import propagate_returns


# ---------------------------------------------------------------------------
# backward-orbit partition


@dataclass
class BackwardPartition:
    """Partition of [0,1) by S = union of T^{-i}(D) for 0 <= i <= n.

    On every element, T^0 .. T^n act as single translations.  Each point of
    S carries its provenance (i, delta) with T^i(point) = delta; right
    endpoints additionally carry left-limit provenance, computed along the
    left-limit inverse orbit, because evaluation at a right endpoint uses
    the branch owning the open interior.
    """

    iet: IET
    n: int
    points: PointSet
    elements: list
    left_labels: dict
    right_labels: dict

    def element_containing(self, x) -> Interval:
        los = [e.lo for e in self.elements]
        i = bisect.bisect_right(los, x) - 1
        return self.elements[i]

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": "backward-partition",
            "iet": self.iet.to_json(),
            "n": self.n,
            "points": self.points.to_json(),
            "elements": [e.to_json() for e in self.elements],
            "left_labels": _labels_json(self.left_labels),
            "right_labels": _labels_json(self.right_labels),
        }


def _labels_json(table):
    return [
        [str(point), [[i, str(delta)] for i, delta in witnesses]]
        for point, witnesses in sorted(table.items())
    ]


def backward_partition(iet: IET, n: int) -> BackwardPartition:
    if n < 0:
        raise PreconditionError("depth must be >= 0", n=n)
    disc = iet.discontinuity_list()
    left: dict = {}
    right: dict = {}
    frontier = [(delta, delta) for delta in disc]
    for point, delta in frontier:
        left.setdefault(point, []).append((0, delta))
        right.setdefault(point, []).append((0, delta))
    lim_frontier = list(frontier)
    inv = iet.inverse()
    for level in range(1, n + 1):
        frontier = [(inv.apply(p), delta) for p, delta in frontier]
        for point, delta in frontier:
            left.setdefault(point, []).append((level, delta))
        lim_frontier = [(inv.left_limit_apply(p), delta) for p, delta in lim_frontier]
        for point, delta in lim_frontier:
            right.setdefault(point, []).append((level, delta))

    points = PointSet(left.keys())
    cuts = [ZERO] + [p for p in points if p != ZERO] + [ONE]
    elements = [Interval(a, b) for a, b in zip(cuts, cuts[1:])]
    return BackwardPartition(iet, n, points, elements, left, right)


# ---------------------------------------------------------------------------
# density depth


def n0_for_density(iet: IET, epsilon, cap: int) -> int:
    """Smallest n0 <= cap whose half-depth backward orbit is epsilon-dense.

    Density of a point set means max_gap < epsilon against [0,1] with both
    endpoints as virtual points.  Raises when the cap is exhausted, which
    signals non-minimality or a cap that is too low.
    """
    eps = scalar(epsilon)
    if eps.sign() <= 0:
        raise PreconditionError("epsilon must be positive", epsilon=str(eps))
    if cap < 0:
        raise PreconditionError("cap must be >= 0", cap=cap)
    disc = iet.discontinuity_list()
    if not disc:
        raise PreconditionError(
            "map has no discontinuities; backward orbits are never dense"
        )
    inv = iet.inverse()
    pts = [ZERO, ONE]
    gaps = {ZERO: ONE}
    heap = [(-(ONE - ZERO), ZERO, ONE)]

    def insert(p):
        i = bisect.bisect_left(pts, p)
        if i < len(pts) and pts[i] == p:
            return
        lo, hi = pts[i - 1], pts[i]
        gaps[lo] = p
        gaps[p] = hi
        heapq.heappush(heap, (-(p - lo), lo, p))
        heapq.heappush(heap, (-(hi - p), p, hi))
        pts.insert(i, p)

    def max_gap():
        while True:
            neg, lo, hi = heap[0]
            if gaps.get(lo) == hi:
                return -neg
            heapq.heappop(heap)

    frontier = list(disc)
    for p in frontier:
        insert(p)
    half_cap = cap // 2
    for h in range(0, half_cap + 1):
        if h > 0:
            frontier = [inv.apply(p) for p in frontier]
            for p in frontier:
                insert(p)
        if max_gap() < eps:
            n0 = 2 * h
            if n0 > cap:
                break
            return n0
    raise PreconditionError(
        "density cap exceeded before the backward orbit became dense",
        cap=cap,
        epsilon=str(eps),
        max_gap=str(max_gap()),
    )


# ---------------------------------------------------------------------------
# pair classes


@dataclass(frozen=True)
class PairMember:
    element: Interval
    left_witness: Optional[tuple]  # (level, delta) or None at the 0 boundary
    right_witness: Optional[tuple]  # (level, delta') or None at the 1 boundary

    @property
    def via_boundary(self) -> bool:
        return self.left_witness is None or self.right_witness is None


@dataclass
class PairClass:
    """Partition elements witnessing one ordered discontinuity pair.

    Elements whose endpoint sits on the boundary of [0,1) with no orbit
    label join every class compatible with their known side; such members
    are flagged so reports can state when a class is sizable only thanks
    to that extension.
    """

    delta: ExactScalar
    delta_prime: ExactScalar
    members: list

    @property
    def total_measure(self) -> ExactScalar:
        total = ZERO
        for m in self.members:
            total = total + m.element.length
        return total

    @property
    def strict_measure(self) -> ExactScalar:
        total = ZERO
        for m in self.members:
            if not m.via_boundary:
                total = total + m.element.length
        return total

    @property
    def uses_boundary_members(self) -> bool:
        return any(m.via_boundary for m in self.members)

    def to_json(self):
        return {
            "delta": str(self.delta),
            "delta_prime": str(self.delta_prime),
            "total_measure": str(self.total_measure),
            "strict_measure": str(self.strict_measure),
            "members": [
                {
                    "element": m.element.to_json(),
                    "left_witness": _witness_json(m.left_witness),
                    "right_witness": _witness_json(m.right_witness),
                }
                for m in self.members
            ],
        }


def _witness_json(w):
    return None if w is None else [w[0], str(w[1])]


def classify_pairs(bp: BackwardPartition, iet: IET) -> list:
    """Assign every partition element to the pair classes it witnesses.

    An element joins class (delta, delta') when its left endpoint maps onto
    delta under some T^i and the left-limit at its right endpoint maps onto
    delta' under some T^j, 0 <= i, j <= n.  Unlabeled endpoints occur only
    at 0 and 1 and act as wildcards.
    """
    disc = iet.discontinuity_list()
    classes: dict = {}
    for element in bp.elements:
        lw = bp.left_labels.get(element.lo)
        if lw is None and element.lo != ZERO:
            raise VerificationError(
                "interior left endpoint with no orbit label",
                endpoint=str(element.lo),
            )
        rw = bp.right_labels.get(element.hi)
        if rw is None and element.hi != ONE:
            raise VerificationError(
                "interior right endpoint with no left-limit label",
                endpoint=str(element.hi),
            )
        left_options = (
            [(min(i for i, dd in lw if dd == d0), d0) for d0 in {dd for _, dd in lw}]
            if lw
            else [(None, d0) for d0 in disc]
        )
        right_options = (
            [(min(j for j, dd in rw if dd == d1), d1) for d1 in {dd for _, dd in rw}]
            if rw
            else [(None, d1) for d1 in disc]
        )
        for li, d0 in left_options:
            for rj, d1 in right_options:
                member = PairMember(
                    element,
                    None if li is None else (li, d0),
                    None if rj is None else (rj, d1),
                )
                classes.setdefault((d0, d1), []).append(member)
    out = [
        PairClass(d0, d1, sorted(members, key=lambda m: m.element.lo))
        for (d0, d1), members in classes.items()
    ]
    out.sort(key=lambda c: (c.delta, c.delta_prime))
    return out


def sizable_pairs(classes: list, d: int) -> list:
    """Classes meeting the 1/(d-1)^2 threshold, best first."""
    if d < 2:
        raise PreconditionError("need at least two pieces", d=d)
    threshold = scalar(Fraction(1, (d - 1) ** 2))
    eligible = [c for c in classes if not c.total_measure < threshold]
    eligible.sort(key=lambda c: (c.delta, c.delta_prime))
    eligible.sort(key=lambda c: c.total_measure, reverse=True)
    return eligible


def find_sizable_pair(classes: list, d: int) -> PairClass:
    """The largest class with total measure >= 1/(d-1)^2.

    Existence is guaranteed by pigeonhole, so coming up empty is a hard
    error pointing at a classification bug.
    """
    eligible = sizable_pairs(classes, d)
    if not eligible:
        raise VerificationError(
            "no sizable pair: pigeonhole guarantee violated",
            classes=[
                [str(c.delta), str(c.delta_prime), str(c.total_measure)]
                for c in classes
            ],
        )
    return eligible[0]


# ---------------------------------------------------------------------------
# dichotomy


@dataclass(frozen=True)
class PossibilityI:
    """An interval of width >= 1/(10 d^2 n) with images disjoint up to n/2 steps.

    The interval starts at the member's left endpoint and is widened to the
    largest admissible width: the smallest orbit displacement seen during
    the scan, capped by the member length.  Wider J means shorter return
    times in the tower construction, keeping k inside its target interval.
    """

    j_interval: Interval
    member: PairMember
    scanned_to: int


@dataclass(frozen=True)
class PossibilityII:
    """A small power k whose translate of J overlaps J with tiny drift."""

    k: int
    direction: str  # "right" or "left"
    drift: ExactScalar  # positive magnitude, < 1/(10 d^2 n)
    j_interval: Interval
    member: PairMember


def sizable_dichotomy(iet: IET, pc: PairClass, n: int):
    """Decide which construction applies to a sizable class at depth n.

    Takes the longest member J' of the class, sets J = [a, a + w) with
    w = 1/(10 d^2 n) at its left end, and walks the orbit of a: since J
    sits inside one partition element, T^i is a single translation there,
    so T^i J meets J exactly when |T^i a - a| < w.  First overlap within
    n/2 steps yields the drift branch; no overlap yields the disjoint
    branch.
    """
    d = iet.d
    if n < 4:
        raise PreconditionError("depth too small for the dichotomy", n=n)
    w = scalar(Fraction(1, 10 * d * d * n))
    threshold = scalar(Fraction(1, (d - 1) ** 2))
    if pc.total_measure < threshold:
        raise PreconditionError(
            "class is not sizable at this depth",
            measure=str(pc.total_measure),
            threshold=str(threshold),
        )
    best = None
    for m in pc.members:
        if m.element.length > w:
            if best is None or m.element.length > best.element.length:
                best = m
    if best is None:
        raise VerificationError(
            "no class member longer than 1/(10 d^2 n): counting argument violated",
            width=str(w),
            members=len(pc.members),
            largest=str(
                max((m.element.length for m in pc.members), default=ZERO)
            ),
        )
    a = best.element.lo
    x = a
    limit = (n - 1) // 2  # strict: 0 < i < n/2
    min_mag = None
    for i in range(1, limit + 1):
        x = iet.apply(x)
        diff = x - a
        s = diff.sign()
        if s == 0:
            raise VerificationError(
                "exact periodic return of a partition endpoint; "
                "the map cannot be minimal",
                steps=i,
                point=str(a),
            )
        mag = diff if s > 0 else -diff
        if mag < w:
            return PossibilityII(
                k=i,
                direction="right" if s > 0 else "left",
                drift=mag,
                j_interval=Interval(a, a + w),
                member=best,
            )
        if min_mag is None or mag < min_mag:
            min_mag = mag
    width = best.element.length
    if min_mag is not None and min_mag < width:
        width = min_mag
    return PossibilityI(
        j_interval=Interval(a, a + width), member=best, scanned_to=limit
    )


# ---------------------------------------------------------------------------
# return-tower construction


@dataclass
class TowerResult:
    region: IntervalSet
    j: int
    displacement: ExactScalar
    base_piece: Interval
    levels: int


def easy_rig_tower(iet: IET, j_interval: Interval, m: int) -> TowerResult:
    """Rigidity region from the first-return tower over a disjoint interval.

    Requires, and re-verifies exactly: T^i is a single translation on J for
    0 <= i <= m, and T^i J does not meet J for 0 < i <= m - 2.  Returns
    A = union of T^i(J') for 0 <= i <= m - 2, where J' is a return piece of
    measure >= |J| / (2(d+2)) with return time j <= 2/|J|; every point of A
    satisfies |T^j x - x| <= |J|.
    """
    if m < 2:
        raise PreconditionError("tower height must be >= 2", m=m)
    length = j_interval.length
    disc = iet.discontinuity_list()
    offsets = [ZERO]
    x = j_interval.lo
    for i in range(1, m + 1):
        idx = bisect.bisect_right(disc, x)
        if idx < len(disc) and disc[idx] < x + length:
            raise PreconditionError(
                "power is not a translation on J",
                step=i,
                cut_at=str(disc[idx]),
            )
        x = iet.apply(x)
        offsets.append(x - j_interval.lo)
    for i in range(1, m - 1):
        off = offsets[i]
        mag = off if off.sign() > 0 else -off
        if mag < length:
            raise PreconditionError(
                "images of J are not disjoint from J",
                step=i,
                offset=str(off),
            )

    # only pieces returning within 2/|J| steps matter; the slow remainder
    # of J may stay uncovered without affecting the construction
    time_bound = scalar(2) / length
    cap = -((-time_bound).floor())
    pieces, _ = propagate_returns(iet, j_interval, cap)
    qualifying = [p for p in pieces if not scalar(p.return_time) > time_bound]
    mass = ZERO
    for p in qualifying:
        mass = mass + p.part.length
    if mass * 2 < length:
        raise VerificationError(
            "points with short return time cover less than |J|/2",
            mass=str(mass),
            needed=str(length / 2),
        )
    measure_floor = length / (2 * (iet.d + 2))
    qualifying.sort(key=lambda p: (p.return_time, p.part.lo))
    chosen = None
    for p in qualifying:
        if not p.part.length < measure_floor:
            chosen = p
            break
    if chosen is None:
        raise VerificationError(
            "no short-return piece reaches measure |J|/(2(d+2))",
            floor=str(measure_floor),
            pieces=[[p.return_time, str(p.part.length)] for p in qualifying],
        )

    levels = m - 1  # T^0 .. T^{m-2}
    towers = [chosen.part.translate(offsets[i]) for i in range(levels)]
    region = IntervalSet.disjoint_union(towers)
    expected = chosen.part.length * levels
    if region.measure() != expected:
        raise VerificationError(
            "tower levels overlap: measure mismatch",
            measure=str(region.measure()),
            expected=str(expected),
        )
    return TowerResult(
        region=region,
        j=chosen.return_time,
        displacement=chosen.translation,
        base_piece=chosen.part,
        levels=levels,
    )


# ---------------------------------------------------------------------------
# translation-drift construction


def possibility2_construct(
    iet: IET,
    pc: PairClass,
    outcome: PossibilityII,
    n: int,
    epsilon,
) -> "RigidityCertificate":
    """Certificate from equally drifting translates of class members.

    Members J with T^k J meeting J slide by the same drift each k steps;
    stacking floor(n/2k) translates gives a region of large measure on
    which T^{k*floor(n/2k)} moves every point by the accumulated drift.
    The translation law T^{ik} J = i*drift + J is verified exactly for
    every accepted member.
    """
    eps = scalar(epsilon)
    d = iet.d
    k = outcome.k
    w = scalar(Fraction(1, 10 * d * d * n))
    if not ZERO < outcome.drift < w:
        raise PreconditionError(
            "drift outside (0, 1/(10 d^2 n))",
            drift=str(outcome.drift),
            bound=str(w),
        )
    longest = max((m.element.length for m in pc.members), default=ZERO)
    if not longest < eps:
        raise PreconditionError(
            "longest class member is not below epsilon",
            longest=str(longest),
            epsilon=str(eps),
        )
    signed = outcome.drift if outcome.direction == "right" else -outcome.drift
    steps = n // (2 * k)
    if steps < 1:
        raise PreconditionError("k exceeds n/2", k=k, n=n)
    power_k = iet.power(k)

    accepted = []
    excluded = []
    for m in pc.members:
        element = m.element
        shift = power_k.translation_on(element)
        if shift is None:
            raise VerificationError(
                "partition element is cut by T^k: partition invariant broken",
                element=repr(element),
                k=k,
            )
        mag = shift if shift.sign() >= 0 else -shift
        if not mag < element.length:
            excluded.append((m, "no overlap"))
            continue
        if shift != signed:
            if m.via_boundary:
                # drift transport is only guaranteed through genuine labels
                excluded.append((m, "boundary member with mismatched drift"))
                continue
            raise VerificationError(
                "member drift disagrees with detected drift",
                member=repr(element),
                member_drift=str(shift),
                detected=str(signed),
            )
        accepted.append(m)
    if not accepted:
        raise VerificationError("no member admits the drift overlap", k=k)

    towers = []
    for m in accepted:
        element = m.element
        current = element
        for i in range(1, steps + 1):
            shift = power_k.translation_on(current)
            if shift != signed:
                raise VerificationError(
                    "translate chain breaks the equal-drift law",
                    member=repr(element),
                    level=i,
                    shift="split" if shift is None else str(shift),
                )
            current = current.translate(signed)
        total = signed * steps
        if outcome.direction == "right":
            towers.append(Interval(element.lo, element.hi + total))
        else:
            towers.append(Interval(element.lo + total, element.hi))
    region = IntervalSet(towers)

    big_k = k * steps
    certificate = _assemble_certificate(
        iet,
        n,
        eps,
        big_k,
        region,
        branch="translation-drift",
        branch_detail={
            "k": k,
            "direction": outcome.direction,
            "drift": str(outcome.drift),
            "stacked_levels": steps,
            "accepted_members": len(accepted),
            "excluded_members": [
                [repr(m.element), reason] for m, reason in excluded
            ],
        },
    )
    floor_measure = scalar(Fraction(1, 10**5 * d**5))
    if not certificate.measure() > floor_measure:
        raise VerificationError(
            "region measure does not clear 1/(10^5 d^5)",
            measure=str(certificate.measure()),
            floor=str(floor_measure),
        )
    return certificate


# ---------------------------------------------------------------------------
# certificates


@dataclass
class RigidityCertificate:
    """Machine-checkable witness that T^k nearly fixes a large region.

    Every field is replayable: an independent verifier recomputes T^k as a
    piecewise translation and confirms each recorded displacement exactly,
    plus the k-range and measure bounds.  Verification never depends on
    which construction branch produced the certificate.
    """

    iet: IET
    n: int
    epsilon: ExactScalar
    k: int
    region: IntervalSet
    displacements: list  # [(Interval, ExactScalar shift)]
    branch: str
    metadata: dict = field(default_factory=dict)

    def measure(self) -> ExactScalar:
        return self.region.measure()

    def max_displacement(self) -> ExactScalar:
        best = ZERO
        for _, shift in self.displacements:
            mag = shift if shift.sign() >= 0 else -shift
            if mag > best:
                best = mag
        return best

    def with_epsilon(self, epsilon) -> "RigidityCertificate":
        """Same certificate re-issued against a tighter epsilon."""
        cert = RigidityCertificate(
            self.iet,
            self.n,
            scalar(epsilon),
            self.k,
            self.region,
            list(self.displacements),
            self.branch,
            dict(self.metadata),
        )
        verify_certificate(cert).ensure()
        return cert

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": "rigidity-certificate",
            "iet": self.iet.to_json(),
            "n": self.n,
            "epsilon": str(self.epsilon),
            "k": self.k,
            "branch": self.branch,
            "region": self.region.to_json(),
            "displacements": [
                {"piece": piece.to_json(), "shift": str(shift)}
                for piece, shift in self.displacements
            ],
            "measure": str(self.measure()),
            "max_displacement": str(self.max_displacement()),
            "metadata": self.metadata,
        }

    @staticmethod
    def from_json(data) -> "RigidityCertificate":
        if not isinstance(data, dict):
            raise ParseError("certificate JSON must be an object")
        allowed = {
            "schema",
            "kind",
            "iet",
            "n",
            "epsilon",
            "k",
            "branch",
            "region",
            "displacements",
            "measure",
            "max_displacement",
            "metadata",
        }
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ParseError("unknown fields in certificate JSON", fields=unknown)
        try:
            return RigidityCertificate(
                iet=IET.from_json(data["iet"]),
                n=int(data["n"]),
                epsilon=parse_scalar(data["epsilon"]),
                k=int(data["k"]),
                region=IntervalSet.from_json(data["region"]),
                displacements=[
                    (Interval.from_json(d["piece"]), parse_scalar(d["shift"]))
                    for d in data["displacements"]
                ],
                branch=str(data["branch"]),
                metadata=data.get("metadata", {}),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError("malformed certificate JSON", cause=str(exc)) from None


def _assemble_certificate(
    iet, n, epsilon, k, region, branch, branch_detail
) -> RigidityCertificate:
    power = iet.power(k)
    displacements = list(power.refine_against(region))
    return RigidityCertificate(
        iet=iet,
        n=n,
        epsilon=epsilon,
        k=k,
        region=region,
        displacements=displacements,
        branch=branch,
        metadata={"branch_detail": branch_detail},
    )


@dataclass
class VerificationReport:
    checks: list  # [(name, ok, detail)]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def ensure(self):
        for name, ok, detail in self.checks:
            if not ok:
                raise VerificationError(
                    f"certificate check failed: {name}", **detail
                )

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": "verification-report",
            "ok": self.ok,
            "checks": [
                {"name": name, "ok": ok, "detail": detail}
                for name, ok, detail in self.checks
            ],
        }


def verify_certificate(cert: RigidityCertificate) -> VerificationReport:
    """Re-check a certificate from scratch using only the recorded map.

    Recomputes T^k as a piecewise translation, confirms the displacement
    table piece by piece, and re-checks the k-interval and the measure
    floor.  Nothing from the construction path is trusted.
    """
    checks = []
    d = cert.iet.d

    ok = cert.epsilon.sign() > 0 and cert.n >= 1 and cert.k >= 1
    checks.append(("well-formed", ok, {"n": cert.n, "k": cert.k}))

    lo = Fraction(cert.n, 20 * d)
    hi = 20 * cert.n * d
    ok = not scalar(lo) > cert.k and cert.k <= hi
    checks.append(
        ("k-range", ok, {"k": cert.k, "low": str(lo), "high": hi})
    )

    floor_measure = scalar(Fraction(1, 10**5 * d**5))
    measure = cert.measure()
    ok = measure > floor_measure
    checks.append(
        ("measure-floor", ok, {"measure": str(measure), "floor": str(floor_measure)})
    )

    covered = IntervalSet([piece for piece, _ in cert.displacements])
    ok = covered == cert.region
    checks.append(("displacements-cover-region", ok, {}))

    power = cert.iet.power(cert.k)
    bad = None
    for piece, shift in cert.displacements:
        actual = power.translation_on(piece)
        if actual != shift:
            bad = {
                "piece": repr(piece),
                "recorded": str(shift),
                "actual": "split" if actual is None else str(actual),
            }
            break
        mag = shift if shift.sign() >= 0 else -shift
        if not mag < cert.epsilon:
            bad = {
                "piece": repr(piece),
                "displacement": str(mag),
                "epsilon": str(cert.epsilon),
            }
            break
    checks.append(("per-piece-displacement", bad is None, bad or {}))

    return VerificationReport(checks)


def spot_check_certificate(cert: RigidityCertificate, points) -> bool:
    """Replay |T^k x - x| < eps by k-fold apply() at the given points.

    Deliberately avoids the piecewise-translation machinery so it can serve
    as an independent oracle.
    """
    for x in points:
        if not cert.region.contains_point(x):
            raise PreconditionError("spot-check point outside region", point=str(x))
        y = x
        for _ in range(cert.k):
            y = cert.iet.apply(y)
        diff = y - x
        mag = diff if diff.sign() >= 0 else -diff
        if not mag < cert.epsilon:
            return False
    return True


# ---------------------------------------------------------------------------
# orchestration


def certify_rigidity(
    iet: IET,
    epsilon,
    n: int,
    assume_minimal: bool = False,
) -> RigidityCertificate:
    """End-to-end certificate construction at depth n.

    Gates: minimality certified to depth n (or explicitly assumed, which is
    recorded in the metadata) and n at least the density depth for epsilon.
    Pair classes are tried best-first; a candidate whose k lands outside
    [n/(20d), 20nd] is skipped; the final certificate is re-verified from
    scratch before being returned.
    """
    eps = scalar(epsilon)
    if eps.sign() <= 0:
        raise PreconditionError("epsilon must be positive", epsilon=str(eps))
    if n < 4:
        raise PreconditionError("n must be at least 4", n=n)
    d = iet.d
    if d < 2:
        raise PreconditionError("need at least two pieces", d=d)

    if assume_minimal:
        minimality = {"mode": "assumed", "depth": n}
    else:
        report = check_idoc(iet, n)
        if not report.certified:
            raise PreconditionError(
                "map is not certified minimal to the requested depth",
                reason=report.reason,
                witness=None
                if report.witness is None
                else [report.witness[0], str(report.witness[1]), str(report.witness[2])],
            )
        minimality = {"mode": "idoc-certified", "depth": n}

    n0 = n0_for_density(iet, eps, cap=n)

    bp = backward_partition(iet, n)
    classes = classify_pairs(bp, iet)
    candidates = sizable_pairs(classes, d)
    if not candidates:
        raise VerificationError(
            "no sizable pair: pigeonhole guarantee violated", n=n
        )

    attempts = []
    for pc in candidates:
        outcome = sizable_dichotomy(iet, pc, n)
        pair_info = {
            "delta": str(pc.delta),
            "delta_prime": str(pc.delta_prime),
            "total_measure": str(pc.total_measure),
            "strict_measure": str(pc.strict_measure),
            "uses_boundary_extension": pc.uses_boundary_members,
        }
        if isinstance(outcome, PossibilityI):
            m = n // 2
            tower = easy_rig_tower(iet, outcome.j_interval, m)
            cert = _assemble_certificate(
                iet,
                n,
                eps,
                tower.j,
                tower.region,
                branch="return-tower",
                branch_detail={
                    "j_interval": outcome.j_interval.to_json(),
                    "tower_levels": tower.levels,
                    "base_piece": tower.base_piece.to_json(),
                    "displacement": str(tower.displacement),
                },
            )
        else:
            try:
                cert = possibility2_construct(iet, pc, outcome, n, eps)
            except PreconditionError as exc:
                attempts.append(
                    {"pair": pair_info, "outcome": "drift-hypothesis-failed",
                     "reason": exc.message}
                )
                continue
        lo = Fraction(n, 20 * d)
        if scalar(lo) > cert.k or cert.k > 20 * n * d:
            attempts.append(
                {"pair": pair_info, "outcome": "k-out-of-range", "k": cert.k}
            )
            continue
        attempts.append({"pair": pair_info, "outcome": "accepted", "k": cert.k})
        cert.metadata = {
            "minimality": minimality,
            "n0": n0,
            "pair": pair_info,
            "attempts": attempts,
            "branch_detail": cert.metadata.get("branch_detail", {}),
        }
        verify_certificate(cert).ensure()
        return cert

    raise CertificationFailedError(
        "every sizable pair was exhausted without an admissible k",
        attempts=attempts,
        n=n,
    )
