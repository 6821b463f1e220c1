"""Extended-precision real and complex arithmetic on top of :mod:`decimal`.

Real scalars are plain :class:`decimal.Decimal` values.  Precision is a
property of the active decimal context, not of the value: every public
function takes a ``digits`` argument and runs under :func:`working_precision`.
Inside such a block the ordinary operators round to ``digits`` significant
decimal digits, and the exponent range is effectively unbounded so that
``xexp(-1e6)`` does not underflow.

There are no NaNs or infinities; invalid operations raise.
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from decimal import (
    MAX_EMAX,
    MIN_EMIN,
    ROUND_HALF_EVEN,
    Context,
    Decimal,
    DivisionByZero,
    InvalidOperation,
    Overflow,
    localcontext,
)
from typing import NamedTuple, Union

from .errors import DomainError, ParseError

XReal = Decimal

DEFAULT_DIGITS = 64
MIN_DIGITS = 30
MAX_DIGITS = 256

# |x| bound accepted by xexp; keeps 2**m representable and the reduction cheap.
EXP_ARG_LIMIT = Decimal(10) ** 6

# 310 significant digits; enough guard for 256-digit results at |x| = 1e6.
LN2 = Decimal(
    "0.6931471805599453094172321214581765680755001343602552541206800094933936"
    "2196969471560586332699641868754200148102057068573368552023575813055703267"
    "0751635075961930727570828371435190307038623891673471123350115364497955239"
    "1204751726815749320651555247341395258829504530070953263666426541042391578"
    "149520437404303855008"
)

_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")

ZERO = Decimal(0)
ONE = Decimal(1)
TWO = Decimal(2)


def make_context(digits: int) -> Context:
    return Context(
        prec=digits,
        rounding=ROUND_HALF_EVEN,
        Emax=MAX_EMAX,
        Emin=MIN_EMIN,
        traps=[InvalidOperation, DivisionByZero, Overflow],
    )


def check_digits(digits: int) -> int:
    if not isinstance(digits, int) or not MIN_DIGITS <= digits <= MAX_DIGITS:
        raise DomainError(
            f"precision must be an integer in [{MIN_DIGITS}, {MAX_DIGITS}], got {digits!r}"
        )
    return digits


@contextmanager
def working_precision(digits: int):
    """Run the enclosed block with ``digits`` significant decimal digits."""
    check_digits(digits)
    with localcontext(make_context(digits)) as ctx:
        yield ctx


def xmake(text: str, digits: int = DEFAULT_DIGITS) -> Decimal:
    """Parse a decimal literal and round it to ``digits`` significant digits.

    Only plain literals are accepted: optional sign, digits with an optional
    point, optional ``e`` exponent.  No NaN, infinity or underscores.
    """
    if not isinstance(text, str) or not _DECIMAL_RE.match(text.strip()):
        raise ParseError(f"malformed decimal literal: {text!r}")
    return make_context(check_digits(digits)).create_decimal(text.strip())


def xstr(x: Decimal, digits: int | None = None) -> str:
    """Scientific-notation string, e.g. ``-8.8977731864688888199e+0``.

    With ``digits`` given the significand is rounded to that many digits,
    otherwise every stored digit is kept.
    """
    if digits is None:
        return f"{x:e}"
    return f"{x:.{digits - 1}e}"


def xarith(op: str, a: Decimal, b: Decimal, digits: int = DEFAULT_DIGITS) -> Decimal:
    with working_precision(digits):
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        if op == "div":
            if b == 0:
                raise DomainError("division by zero")
            return a / b
    raise ValueError(f"unknown operation {op!r}")


def xexp(x: Decimal, digits: int = DEFAULT_DIGITS) -> Decimal:
    """exp(x) with relative error below 10**(2 - digits).

    Writes x = m*ln2 + s with |s| <= ln2/2 and sums the Taylor series of
    exp(s) until the next term drops below 10**(-digits-2).
    """
    check_digits(digits)
    x = Decimal(x)
    if not x.is_finite():
        raise DomainError(f"exp argument must be finite, got {x}")
    if abs(x) > EXP_ARG_LIMIT:
        raise DomainError(f"exp argument {x} outside [-1e6, 1e6]")
    if x == 0:
        return ONE
    m_digits = len(str(int(abs(x)))) + 1
    with localcontext(make_context(digits + 10 + m_digits)):
        ln2 = +LN2
        m = int((x / ln2).to_integral_value(rounding=ROUND_HALF_EVEN))
        s = x - m * ln2
        tol = Decimal(10) ** (-digits - 2)
        total = ONE
        term = ONE
        n = 0
        while True:
            n += 1
            term = term * s / n
            total += term
            if abs(term) < tol:
                break
        result = total * TWO**m
    with localcontext(make_context(digits)):
        return +result


class XComplex(NamedTuple):
    """Complex number with :class:`~decimal.Decimal` parts.

    Arithmetic rounds under the active decimal context, like ``Decimal``
    itself.  Instances are immutable tuples.
    """

    re: Decimal
    im: Decimal = ZERO

    @classmethod
    def parse(cls, re_text: str, im_text: str, digits: int = DEFAULT_DIGITS) -> "XComplex":
        return cls(xmake(re_text, digits), xmake(im_text, digits))

    def __add__(self, other):
        if isinstance(other, XComplex):
            return XComplex(self.re + other.re, self.im + other.im)
        if isinstance(other, (Decimal, int)):
            return XComplex(self.re + other, +self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, XComplex):
            return XComplex(self.re - other.re, self.im - other.im)
        if isinstance(other, (Decimal, int)):
            return XComplex(self.re - other, +self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (Decimal, int)):
            return XComplex(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, XComplex):
            return XComplex(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (Decimal, int)):
            return XComplex(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, XComplex):
            den = other.re * other.re + other.im * other.im
            if den == 0:
                raise DomainError("complex division by zero")
            return XComplex(
                (self.re * other.re + self.im * other.im) / den,
                (self.im * other.re - self.re * other.im) / den,
            )
        if isinstance(other, (Decimal, int)):
            if other == 0:
                raise DomainError("complex division by zero")
            return XComplex(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (Decimal, int)):
            return XComplex(Decimal(other)) / self
        return NotImplemented

    def __neg__(self):
        return XComplex(self.re.copy_negate(), self.im.copy_negate())

    def __pos__(self):
        return XComplex(+self.re, +self.im)

    def __abs__(self) -> Decimal:
        return (self.re * self.re + self.im * self.im).sqrt()

    def abs2(self) -> Decimal:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "XComplex":
        return XComplex(self.re, self.im.copy_negate())

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"XComplex({xstr(self.re)}, {xstr(self.im)})"


Number = Union[Decimal, XComplex]


def xcomplex_arith(op: str, a: XComplex, b: XComplex | None = None, digits: int = DEFAULT_DIGITS):
    """Functional front end to :class:`XComplex` arithmetic.

    ``op`` is one of add, sub, mul, div (binary) or conj, abs (unary).
    ``abs`` returns a real ``Decimal``.
    """
    with working_precision(digits):
        if op == "conj":
            return a.conjugate()
        if op == "abs":
            return abs(a)
        if b is None:
            raise ValueError(f"operation {op!r} needs two operands")
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        if op == "div":
            return a / b
    raise ValueError(f"unknown operation {op!r}")


def as_xcomplex(z) -> XComplex:
    if isinstance(z, XComplex):
        return z
    if isinstance(z, complex):
        return XComplex(Decimal(z.real), Decimal(z.imag))
    return XComplex(Decimal(z), ZERO)
