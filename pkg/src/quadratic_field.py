#!/usr/bin/env python3
"""
Quadratic Field Module

Exact real numbers a + b·√s with rational a, b and a square-free integer
s > 1. Rotation groups of order 3 and 6 have matrix entries and invariant
polygons with vertices in Q(√3), so bodies and matrices use these numbers
alongside fractions.Fraction.

Any arithmetic result with b = 0 comes back as a plain Fraction, so purely
rational bodies never hold a QuadraticNumber. Numbers from two different
fields cannot be combined; mixing a float in gives a float.

Text form is "(A+B√s)/q" with integers A, B and q > 0. Parsing goes through
sympy, so "√3/2", "(1-2√3)/4", "sqrt(3)/2" and "1/√2" are all read.
"""

import math
import re
from fractions import Fraction
from typing import Optional, Tuple, Union

import sympy

try:
    from .utils.exceptions import Unsupported, ValidationError
except ImportError:
    from utils.exceptions import Unsupported, ValidationError

SURD_MARK = re.compile(r"√|sqrt")
_ALLOWED_TEXT = re.compile(r"^[0-9+\-*/().\s√sqrt]+$")
_IMPLICIT_PRODUCT = re.compile(r"([0-9)])\s*(?=√|sqrt)")
_ROOT_OF_INTEGER = re.compile(r"√\s*(\d+)")


def square_free_split(s: int) -> Tuple[int, int]:
    """(m, k) with s = m²·k and k square-free."""
    if s <= 0:
        raise ValidationError(f"Square roots are taken of positive integers, got {s}")
    outer, core = 1, 1
    for prime, exponent in sympy.factorint(s).items():
        outer *= prime ** (exponent // 2)
        core *= prime ** (exponent % 2)
    return outer, core


class QuadraticNumber:
    """
    a + b·√s with b ≠ 0. Build instances with quadratic() or surd(), which
    reduce s and fall back to Fraction when the result is rational.
    """

    __slots__ = ('a', 'b', 's')

    def __init__(self, a: Fraction, b: Fraction, s: int):
        if b == 0:
            raise ValidationError("A quadratic irrational needs a nonzero surd part")
        if s < 2 or square_free_split(s)[0] != 1:
            raise ValidationError(f"The radicand must be a square-free integer above 1, got {s}")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.s = s

    @classmethod
    def _make(cls, a: Fraction, b: Fraction, s: int) -> "Exact":
        if b == 0:
            return a
        number = cls.__new__(cls)
        number.a, number.b, number.s = a, b, s
        return number

    def _parts(self, other) -> Optional[Tuple[Fraction, Fraction]]:
        if isinstance(other, QuadraticNumber):
            if other.s != self.s:
                raise Unsupported(f"Cannot combine numbers from Q(√{self.s}) and Q(√{other.s})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    # arithmetic

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        return self._make(self.a + parts[0], self.b + parts[1], self.s)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        return self._make(self.a - parts[0], self.b - parts[1], self.s)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        a, b = parts
        return self._make(self.a * a + self.b * b * self.s, self.a * b + self.b * a, self.s)

    __rmul__ = __mul__

    def reciprocal(self) -> "Exact":
        norm = self.a * self.a - self.b * self.b * self.s
        return self._make(self.a / norm, -self.b / norm, self.s)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        if isinstance(other, QuadraticNumber):
            return self * other.reciprocal()
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        if parts[0] == 0:
            raise ZeroDivisionError("division by zero")
        return self._make(self.a / parts[0], self.b / parts[0], self.s)

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        if self._parts(other) is None:
            return NotImplemented
        return self.reciprocal() * other

    def __neg__(self):
        return self._make(-self.a, -self.b, self.s)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # order

    def sign(self) -> int:
        """Exact sign; a² = b²s never holds for b ≠ 0 since √s is irrational."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == 0 or sa == sb:
            return sb
        return sa if self.a * self.a > self.b * self.b * self.s else sb

    def _compare(self, other) -> Optional[int]:
        if isinstance(other, float):
            x = float(self)
            return (x > other) - (x < other)
        if self._parts(other) is None:
            return None
        return exact_sign(self - other)

    def __lt__(self, other):
        c = self._compare(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._compare(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._compare(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._compare(other)
        return NotImplemented if c is None else c >= 0

    def __eq__(self, other):
        if isinstance(other, QuadraticNumber):
            return (self.a, self.b, self.s) == (other.a, other.b, other.s)
        if isinstance(other, float):
            return float(self) == other
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.s))

    def __bool__(self) -> bool:
        return True

    # conversions

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.s)

    def to_sympy(self) -> sympy.Expr:
        return sympy.Rational(self.a.numerator, self.a.denominator) + \
            sympy.Rational(self.b.numerator, self.b.denominator) * sympy.sqrt(self.s)

    def __str__(self) -> str:
        q = math.lcm(self.a.denominator, self.b.denominator)
        A, B = int(self.a * q), int(self.b * q)
        return f"({A}{'+' if B > 0 else '-'}{abs(B)}√{self.s})/{q}"

    def __repr__(self) -> str:
        return f"QuadraticNumber({self})"


Exact = Union[Fraction, QuadraticNumber]


def quadratic(a, b=0, s: int = 1) -> Exact:
    """a + b·√s, reduced; a Fraction when the value is rational."""
    a, b = Fraction(a), Fraction(b)
    outer, core = square_free_split(s)
    b *= outer
    if core == 1:
        return a + b
    return QuadraticNumber._make(a, b, core)


def surd(s: int) -> Exact:
    """√s."""
    return quadratic(0, 1, s)


def exact_sign(x: Exact) -> int:
    if isinstance(x, QuadraticNumber):
        return x.sign()
    return (x > 0) - (x < 0)


def from_sympy(expr: sympy.Expr) -> Exact:
    """
    Exact value of a sympy expression in Q or a single Q(√s).

    Raises:
        ValidationError: If the value is not of that form
    """
    expr = sympy.expand(sympy.radsimp(sympy.sympify(expr)))
    a, b, s = Fraction(0), Fraction(0), None
    for term in sympy.Add.make_args(expr):
        coeff, rest = term.as_coeff_Mul()
        if not coeff.is_Rational:
            raise ValidationError(f"Cannot read {expr} as an exact number")
        value = Fraction(int(coeff.p), int(coeff.q))
        if rest == 1:
            a += value
        elif rest.is_Pow and rest.exp == sympy.S.Half and rest.base.is_Integer and s in (None, int(rest.base)):
            s = int(rest.base)
            b += value
        else:
            raise ValidationError(f"{expr} is not in a single quadratic field")
    return quadratic(a, b, s or 1)


def parse_exact(text: str) -> Exact:
    """
    Read "p/q", "(a+b√s)/q" and the other forms listed in the module docstring.

    Raises:
        ValidationError: For anything else
    """
    text = text.strip()
    if not text or not _ALLOWED_TEXT.match(text):
        raise ValidationError(f"Cannot read exact number '{text}'")
    if not SURD_MARK.search(text):
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"Cannot read exact number '{text}'")
    rewritten = _IMPLICIT_PRODUCT.sub(r"\1*", text)
    rewritten = _ROOT_OF_INTEGER.sub(r"sqrt(\1)", rewritten).replace("√", "sqrt")
    try:
        expr = sympy.sympify(rewritten, rational=True)
    except (sympy.SympifyError, SyntaxError, TypeError, ValueError, ZeroDivisionError):
        raise ValidationError(f"Cannot read exact number '{text}'")
    return from_sympy(expr)


def exact_value(value) -> Exact:
    """
    Exact number from an int, Fraction, QuadraticNumber, sympy expression or
    text. Floats are rejected.
    """
    if isinstance(value, QuadraticNumber):
        return value
    if isinstance(value, float):
        raise ValidationError("Coordinates must be exact; got a float", details={'value': value})
    if isinstance(value, str):
        return parse_exact(value)
    if isinstance(value, sympy.Basic):
        return from_sympy(value)
    try:
        return Fraction(value)
    except (ValueError, TypeError):
        raise ValidationError(f"Cannot read coordinate {value!r}")


def format_exact(value: Exact) -> str:
    """Text form read back by parse_exact: "p/q" or "n" for rationals, "(A+B√s)/q" otherwise."""
    return str(value)
