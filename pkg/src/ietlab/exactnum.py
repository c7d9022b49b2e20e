"""Exact scalars a + b*sqrt(D) over the rationals.

Every quantity the library touches (endpoints, lengths, measures,
thresholds, drifts) is one of these.  A scalar is rational when b == 0, in
which case D is stored as 0; otherwise D is a square-free integer >= 2.
Two irrational scalars combine only when their radicands match; mixing
distinct fields is a hard error rather than a silent promotion.

All decisions (signs, comparisons, floors) are made by integer arithmetic.
There is no floating point anywhere in this module; `to_decimal` renders a
correctly rounded decimal string for display only.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import FieldMismatchError, ParseError

_ZERO = Fraction(0)
_ONE = Fraction(1)

_square_split_cache: dict[int, tuple[int, int]] = {}


def _square_split(n: int) -> tuple[int, int]:
    """Write n >= 0 as s * f**2 with s square-free; return (s, f)."""
    if n < 0:
        raise ValueError("radicand must be non-negative")
    hit = _square_split_cache.get(n)
    if hit is not None:
        return hit
    s, f, p = n, 1, 2
    while p * p <= s:
        while s % (p * p) == 0:
            s //= p * p
            f *= p
        p += 1 if p == 2 else 2
    _square_split_cache[n] = (s, f)
    return s, f


class ExactScalar:
    """Immutable element a + b*sqrt(d) of Q or a real quadratic field."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=_ZERO, d=0):
        a = a if isinstance(a, Fraction) else Fraction(a)
        b = b if isinstance(b, Fraction) else Fraction(b)
        if b:
            s, f = _square_split(int(d))
            if s == 0:
                b = _ZERO
            elif s == 1:
                a += b * f
                b = _ZERO
            else:
                b *= f
                d = s
        if not b:
            d = 0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational(value) -> "ExactScalar":
        return ExactScalar(Fraction(value))

    @staticmethod
    def sqrt(d: int) -> "ExactScalar":
        return ExactScalar(_ZERO, _ONE, d)

    @staticmethod
    def parse(text: str) -> "ExactScalar":
        return parse_scalar(text)

    # -- field bookkeeping -------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return not self.b

    def as_fraction(self) -> Fraction:
        if self.b:
            raise FieldMismatchError("scalar is irrational", scalar=str(self))
        return self.a

    def _join(self, other: "ExactScalar") -> int:
        da, db = self.d, other.d
        if da == db:
            return da
        if da == 0:
            return db
        if db == 0:
            return da
        raise FieldMismatchError(
            "scalars live in distinct quadratic fields",
            left=str(self),
            right=str(other),
        )

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        d = self._join(other)
        return _make(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        d = self._join(other)
        return _make(self.a - other.a, self.b - other.b, d)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other.__sub__(self)

    def __neg__(self):
        return _make(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        d = self._join(other)
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return _make(a1 * a2 + b1 * b2 * d, a1 * b2 + b1 * a2, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        d = self._join(other)
        a2, b2 = other.a, other.b
        if not b2:
            if not a2:
                raise ZeroDivisionError("division by zero scalar")
            return _make(self.a / a2, self.b / a2, self.d)
        norm = a2 * a2 - b2 * b2 * d
        # norm == 0 would force sqrt(d) rational, impossible for b2 != 0
        a1, b1 = self.a, self.b
        return _make((a1 * a2 - b1 * b2 * d) / norm, (b1 * a2 - a1 * b2) / norm, d)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other.__truediv__(self)

    # -- exact ordering ----------------------------------------------------

    def sign(self) -> int:
        """Exact sign in {-1, 0, +1}, decided by rational comparisons."""
        a, b = self.a, self.b
        if not b:
            return (a > 0) - (a < 0)
        sb = 1 if b > 0 else -1
        if not a:
            return sb
        sa = 1 if a > 0 else -1
        if sa == sb:
            return sa
        c = a * a - b * b * self.d
        return ((c > 0) - (c < 0)) * sa

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.d == other.d

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __lt__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._cmp(other) >= 0

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # -- integer parts and display ----------------------------------------

    def floor(self) -> int:
        a, b = self.a, self.b
        if not b:
            return a.numerator // a.denominator
        qa, qb = a.denominator, b.denominator
        m = qa * qb // math.gcd(qa, qb)
        big_p = a.numerator * (m // qa)
        big_r = b.numerator * (m // qb)
        s = math.isqrt(big_r * big_r * self.d)
        # floor(R*sqrt(d)); R*sqrt(d) is irrational here, so never exact
        t = s if big_r >= 0 else -s - 1
        n0 = (big_p + t) // m
        if (self - (n0 + 1)).sign() >= 0:
            return n0 + 1
        return n0

    def to_decimal(self, digits: int) -> str:
        """Correctly rounded decimal string with `digits` places.

        Ties (possible only for rational values) round half to even.
        Display-only: never feed the output back into computation.
        """
        if digits < 1:
            raise ValueError("digits must be >= 1")
        scale = 10**digits
        y = self * scale
        n = y.floor()
        c = ((y - n) * 2 - 1).sign()
        if c > 0 or (c == 0 and n % 2):
            n += 1
        sign = "-" if n < 0 else ""
        m = abs(n)
        return f"{sign}{m // scale}.{m % scale:0{digits}d}"

    def __str__(self):
        if not self.b:
            return _fmt_fraction(self.a)
        op = "+" if self.b > 0 else "-"
        return f"{_fmt_fraction(self.a)}{op}{_fmt_fraction(abs(self.b))}*sqrt({self.d})"

    def __repr__(self):
        return f"ExactScalar({self})"


def _make(a: Fraction, b: Fraction, d: int) -> ExactScalar:
    """Fast constructor for values already in canonical field form."""
    self = object.__new__(ExactScalar)
    object.__setattr__(self, "a", a)
    object.__setattr__(self, "b", b)
    object.__setattr__(self, "d", d if b else 0)
    return self


def _coerce(value):
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, int):
        return _make(Fraction(value), _ZERO, 0)
    if isinstance(value, Fraction):
        return _make(value, _ZERO, 0)
    return None


def scalar(value, b=None, d=0) -> ExactScalar:
    """Convenience builder: scalar(x), scalar("1/2"), scalar(a, b, d)."""
    if b is not None:
        return ExactScalar(Fraction(value), Fraction(b), d)
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    return ExactScalar(Fraction(value))


def _fmt_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?P<rat>{_RAT})?\s*"
    rf"(?:(?P<op>[+-])?\s*(?:(?P<coef>{_RAT})\s*\*\s*)?sqrt\(\s*(?P<rad>\d+)\s*\))?\s*$"
)


def parse_scalar(text: str) -> ExactScalar:
    """Parse the canonical text forms "p/q" and "p/q+r/s*sqrt(D)".

    Also accepts the tolerant variants "sqrt(D)", "-sqrt(D)" and
    "r/s*sqrt(D)" without a leading rational part.
    """
    if not isinstance(text, str):
        raise ParseError("scalar text must be a string", value=repr(text))
    m = _SCALAR_RE.match(text)
    if not m or (m.group("rat") is None and m.group("rad") is None):
        raise ParseError("unparsable scalar", text=text)
    try:
        a = Fraction(m.group("rat")) if m.group("rat") is not None else _ZERO
        if m.group("rad") is None:
            if m.group("op") or m.group("coef"):
                raise ParseError("dangling sign or coefficient", text=text)
            return ExactScalar(a)
        coef = Fraction(m.group("coef")) if m.group("coef") is not None else _ONE
        if m.group("op") == "-":
            coef = -coef
        elif m.group("op") is None and m.group("rat") is not None and coef >= 0:
            raise ParseError("missing sign between terms", text=text)
        return ExactScalar(a, coef, int(m.group("rad")))
    except ZeroDivisionError:
        raise ParseError("zero denominator", text=text) from None


ZERO = ExactScalar(_ZERO)
ONE = ExactScalar(_ONE)
