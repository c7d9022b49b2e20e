import random
from fractions import Fraction

import pytest

from ietlab import IET, Interval, IntervalSet, corpus, make_iet, scalar
from ietlab.exactnum import ExactScalar


@pytest.fixture(scope="session")
def maps():
    return corpus.load_all()


@pytest.fixture()
def rng():
    return random.Random(20240811)


def random_fraction(rng, max_den=60):
    den = rng.randint(2, max_den)
    num = rng.randint(0, den - 1)
    return Fraction(num, den)


def random_point_in(rng, lo, hi, max_den=997):
    """A rational point in [lo, hi), exact."""
    den = rng.randint(7, max_den)
    num = rng.randint(1, den - 1)
    return lo + (hi - lo) * scalar(Fraction(num, den))


def random_interval_set(rng, max_parts=4, max_den=48):
    cuts = sorted({random_fraction(rng, max_den) for _ in range(2 * max_parts)})
    parts = []
    for a, b in zip(cuts[::2], cuts[1::2]):
        if a < b and rng.random() < 0.8:
            parts.append(Interval(scalar(a), scalar(b)))
    return IntervalSet(parts)


def random_rational_iet(rng, d=None, max_den=24) -> IET:
    d = d or rng.choice((2, 3, 4))
    while True:
        den = rng.randint(d + 1, max_den)
        cuts = sorted(rng.sample(range(1, den), d - 1))
        lengths = [Fraction(b - a, den) for a, b in zip([0] + cuts, cuts + [den])]
        perm = list(range(1, d + 1))
        rng.shuffle(perm)
        iet = make_iet([scalar(x) for x in lengths], perm)
        if not iet.is_reducible:
            return iet


def golden_alpha() -> ExactScalar:
    return (scalar(3) - ExactScalar.sqrt(5)) / 2
