"""Exception hierarchy shared across the library and the CLI.

The CLI maps these onto exit codes: parse problems exit 2, violated
preconditions exit 3, failed internal verifications exit 4.
"""


class IetLabError(Exception):
    """Base class for all library errors."""

    def __init__(self, message, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_json(self):
        return {
            "type": type(self).__name__,
            "message": self.message,
            "detail": {k: _jsonable(v) for k, v in sorted(self.detail.items())},
        }


def _jsonable(value):
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return str(value)


class ParseError(IetLabError):
    """Malformed scalar text, JSON artifact, or configuration."""


class FieldMismatchError(IetLabError):
    """Arithmetic attempted between scalars in distinct quadratic fields."""


class PreconditionError(IetLabError):
    """Input violates a documented operation precondition."""


class StepCapError(PreconditionError):
    """Return-map propagation exhausted its step cap before covering the base.

    Carries the uncovered remainder, which is the witness that either the
    map is not minimal or the cap was too low.
    """

    def __init__(self, message, uncovered, **detail):
        super().__init__(message, uncovered=uncovered, **detail)
        self.uncovered = uncovered


class VerificationError(IetLabError):
    """An exact internal check that must hold has failed."""


class CertificationFailedError(VerificationError):
    """No certificate satisfying all verified bounds could be produced."""
