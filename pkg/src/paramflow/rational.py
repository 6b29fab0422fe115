"""Exact scalars: rational complex numbers a + b*i with a, b in Q.

Every coefficient in this package is one of these.  They form a field,
so all series-level algorithms (inversion, division, elimination) run
without any floating-point tolerance.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

Rationalish = Union["GaussianRational", Fraction, int, str, tuple]


class GaussianRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def coerce(value: Rationalish) -> "GaussianRational":
        """Coerce ints, Fractions, strings like '2/3', or (re, im) pairs."""
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, tuple):
            re, im = value
            return GaussianRational(Fraction(re), Fraction(im))
        return GaussianRational(Fraction(value))

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        if not self.im and not other.im:
            return GaussianRational(self.re * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if not self.im:
            return GaussianRational(1 / self.re)
        n = self.re * self.re + self.im * self.im
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __pow__(self, n: int) -> "GaussianRational":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if not self.im:
            return GaussianRational(self.re ** n)
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    # -- predicates and conversions ------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_real(self) -> bool:
        return not self.im

    def is_rational(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    # -- formatting -----------------------------------------------------

    def to_strings(self) -> list:
        """Serialize as a pair of canonical 'num/den' strings."""
        return [
            f"{self.re.numerator}/{self.re.denominator}",
            f"{self.im.numerator}/{self.im.denominator}",
        ]

    @staticmethod
    def from_strings(pair) -> "GaussianRational":
        if isinstance(pair, str):
            return GaussianRational(Fraction(pair))
        re, im = pair
        return GaussianRational(Fraction(re), Fraction(im))

    def __repr__(self):
        if not self.im:
            return f"GR({self.re})"
        return f"GR({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def gr(value, im=None) -> GaussianRational:
    """Shorthand constructor: gr(2), gr('1/3'), gr(0, 1) for i."""
    if im is not None:
        return GaussianRational(Fraction(value), Fraction(im))
    return GaussianRational.coerce(value)
