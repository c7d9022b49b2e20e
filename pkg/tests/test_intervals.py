from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ietlab import Interval, IntervalSet, PointSet, dyadic, scalar
from ietlab.errors import ParseError, VerificationError
from ietlab.exactnum import ExactScalar, ONE, ZERO


def iv(a, b):
    return Interval(scalar(a), scalar(b))


def test_interval_validation():
    with pytest.raises(VerificationError):
        iv("1/2", "1/2")
    with pytest.raises(VerificationError):
        iv("-1/8", "1/2")
    with pytest.raises(VerificationError):
        iv("1/2", "9/8")


def test_measure_examples():
    assert IntervalSet.full().measure() == ONE
    s = IntervalSet.of(iv(0, "1/4"), iv("1/2", "3/4"))
    assert s.measure() == Fraction(1, 2)
    g = (ExactScalar.sqrt(5) - 1) / 2
    assert IntervalSet.of(Interval(ZERO, g)).measure() == g
    assert IntervalSet.empty().measure() == ZERO


def test_set_op_examples():
    assert IntervalSet.of(iv(0, "1/2")).intersect(
        IntervalSet.of(iv("1/4", "3/4"))
    ) == IntervalSet.of(iv("1/4", "1/2"))
    assert IntervalSet.of(iv(0, "1/2")).union(
        IntervalSet.of(iv("1/2", 1))
    ) == IntervalSet.full()
    assert (
        IntervalSet.of(iv(0, "1/3"), iv("2/3", 1))
        .intersect(IntervalSet.of(iv("1/3", "2/3")))
        .is_empty()
    )


def test_touching_parts_merge():
    s = IntervalSet.of(iv(0, "1/3"), iv("1/3", "1/2"))
    assert len(s) == 1
    assert s.parts[0] == iv(0, "1/2")


def test_disjoint_union_rejects_overlap():
    with pytest.raises(VerificationError):
        IntervalSet.disjoint_union([iv(0, "1/2"), iv("1/4", "3/4")])
    ok = IntervalSet.disjoint_union([iv("1/2", "3/4"), iv(0, "1/2")])
    assert ok.measure() == Fraction(3, 4)


cut = st.fractions(min_value=0, max_value=1, max_denominator=16)


def build_set(fracs):
    cuts = sorted(set(fracs))
    parts = [
        Interval(scalar(a), scalar(b)) for a, b in zip(cuts[::2], cuts[1::2]) if a < b
    ]
    return IntervalSet(parts)


@settings(max_examples=250, deadline=None)
@given(st.lists(cut, max_size=8), st.lists(cut, max_size=8))
def test_inclusion_exclusion(f1, f2):
    a, b = build_set(f1), build_set(f2)
    lhs = a.union(b).measure() + a.intersect(b).measure()
    assert lhs == a.measure() + b.measure()


@settings(max_examples=250, deadline=None)
@given(st.lists(cut, max_size=8), st.lists(cut, max_size=8))
def test_difference_and_identities(f1, f2):
    a, b = build_set(f1), build_set(f2)
    assert a.difference(a).is_empty()
    assert a.intersect(IntervalSet.full()) == a
    # difference decomposes the union
    assert a.difference(b).measure() + a.intersect(b).measure() == a.measure()
    assert a.difference(b).intersect(b).is_empty()


@settings(max_examples=200, deadline=None)
@given(st.lists(cut, max_size=10))
def test_normalization_idempotent(f1):
    a = build_set(f1)
    again = IntervalSet(a.parts)
    assert again == a
    assert IntervalSet(list(a.parts) + list(a.parts)) == a


def test_complement():
    a = IntervalSet.of(iv("1/4", "1/2"))
    c = a.complement()
    assert c == IntervalSet.of(iv(0, "1/4"), iv("1/2", 1))
    assert a.union(c) == IntervalSet.full()


def test_dyadic_examples():
    assert dyadic(0, 0) == iv(0, 1)
    assert dyadic(2, 3) == iv("3/4", 1)
    assert dyadic(3, 1) == iv("1/8", "1/4")
    with pytest.raises(ParseError):
        dyadic(2, 4)
    with pytest.raises(ParseError):
        dyadic(2, -1)


def test_max_gap_examples():
    assert PointSet([scalar("1/2")]).max_gap() == Fraction(1, 2)
    assert PointSet([]).max_gap() == 1
    pts = PointSet([scalar("1/4"), scalar("1/3"), scalar("3/4")])
    assert pts.max_gap() == Fraction(5, 12)


def test_point_set_dedup_and_order():
    pts = PointSet([scalar("1/2"), scalar("1/4"), scalar("1/2")])
    assert [str(p) for p in pts] == ["1/4", "1/2"]
    assert scalar("1/2") in pts
    assert scalar("1/3") not in pts


def test_json_round_trip():
    s = IntervalSet.of(iv(0, "1/4"), Interval(scalar("1/2"), (ExactScalar.sqrt(5) - 1) / 2))
    assert IntervalSet.from_json(s.to_json()) == s
    p = PointSet([scalar("1/4"), (ExactScalar.sqrt(5) - 1) / 2])
    assert PointSet.from_json(p.to_json()) == p
