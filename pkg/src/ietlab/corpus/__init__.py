"""Bundled example maps: rotations and small exchanges over Q(sqrt 2), Q(sqrt 5).

The rational rotations and the identity are negative controls (periodic,
never minimal); the golden and silver rotations and the three- and
four-piece exchanges satisfy the distinct-orbit condition to every depth
the test suite checks.
"""

import json
from importlib import resources

from ..iet import IET

_NAMES = (
    "identity",
    "rotation_1_3",
    "rotation_1_4",
    "golden_rotation",
    "silver_rotation",
    "three_iet_sqrt2",
    "three_iet_sqrt5",
    "four_iet_sqrt2",
)

MINIMAL = (
    "golden_rotation",
    "silver_rotation",
    "three_iet_sqrt2",
    "three_iet_sqrt5",
    "four_iet_sqrt2",
)

CERTIFICATE_SUITE = (
    "golden_rotation",
    "silver_rotation",
    "three_iet_sqrt2",
    "three_iet_sqrt5",
)


def names():
    return list(_NAMES)


def load(name: str) -> IET:
    if name not in _NAMES:
        raise KeyError(f"unknown corpus map: {name!r}; known: {', '.join(_NAMES)}")
    data = json.loads(
        resources.files(__package__).joinpath(f"{name}.json").read_text()
    )
    return IET.from_json(data)


def load_all():
    return {name: load(name) for name in _NAMES}
