"""Exact-arithmetic interval exchange transformations.

Scalars live in Q or a fixed real quadratic field, so every orbit,
measure, return time, and displacement below is computed without
rounding.  The headline pipeline certifies partial rigidity: for a
minimal exchange it produces a time k and a region A of definite measure
on which T^k moves every point by less than a requested epsilon, as a
replayable machine-checkable certificate; a companion construction turns
any such certificate into an exact correlation witness incompatible with
mixing at time k.
"""

from .errors import (
    CertificationFailedError,
    FieldMismatchError,
    IetLabError,
    ParseError,
    PreconditionError,
    StepCapError,
    VerificationError,
)
from .exactnum import ExactScalar, parse_scalar, scalar
from .iet import (
    IET,
    MinimalityReport,
    PiecewiseTranslation,
    check_idoc,
    compose,
    make_iet,
    rotation,
)
from .intervals import Interval, IntervalSet, PointSet, dyadic
from .mixing import (
    BlockMixingWitness,
    CorrelationReport,
    MixingWindowReport,
    ThicknessReport,
    block_mixing_thresholds,
    correlation,
    mixing_window_check,
    rigidity_blocks_mixing,
    thickness_check,
)
from .return_map import ReturnPiece, ReturnSystem, first_return, return_time_histogram
from .rigidity import (
    BackwardPartition,
    PairClass,
    PossibilityI,
    PossibilityII,
    RigidityCertificate,
    backward_partition,
    certify_rigidity,
    classify_pairs,
    easy_rig_tower,
    find_sizable_pair,
    n0_for_density,
    possibility2_construct,
    sizable_dichotomy,
    spot_check_certificate,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "IET",
    "BackwardPartition",
    "BlockMixingWitness",
    "CertificationFailedError",
    "CorrelationReport",
    "ExactScalar",
    "FieldMismatchError",
    "IetLabError",
    "Interval",
    "IntervalSet",
    "MinimalityReport",
    "MixingWindowReport",
    "PairClass",
    "ParseError",
    "PiecewiseTranslation",
    "PointSet",
    "PossibilityI",
    "PossibilityII",
    "PreconditionError",
    "ReturnPiece",
    "ReturnSystem",
    "RigidityCertificate",
    "StepCapError",
    "ThicknessReport",
    "VerificationError",
    "backward_partition",
    "block_mixing_thresholds",
    "certify_rigidity",
    "check_idoc",
    "classify_pairs",
    "compose",
    "correlation",
    "dyadic",
    "easy_rig_tower",
    "find_sizable_pair",
    "first_return",
    "make_iet",
    "mixing_window_check",
    "n0_for_density",
    "parse_scalar",
    "possibility2_construct",
    "return_time_histogram",
    "rigidity_blocks_mixing",
    "rotation",
    "scalar",
    "sizable_dichotomy",
    "spot_check_certificate",
    "thickness_check",
    "verify_certificate",
]
