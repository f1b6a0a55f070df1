"""Exact arithmetic in Q[i], the coefficient field of the whole pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc

from .hp import from_fraction


@dataclass(frozen=True)
class GaussianRational:
    """a + b*i with exact rational a, b.  Immutable and hashable."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise TypeError("float complex not accepted; use Fractions")
            return GaussianRational(Fraction(int(x.real)), Fraction(int(x.imag)))
        return GaussianRational(Fraction(x))

    def __add__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.of(other) - self

    def __mul__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.of(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by Gaussian zero")
        return GaussianRational((self.re * o.re + self.im * o.im) / n,
                                (self.im * o.re - self.re * o.im) / n)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def inverse(self):
        return GaussianRational(1) / self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_rational(self) -> bool:
        return self.im == 0

    def to_mpc(self) -> mpc:
        return mpc(from_fraction(self.re), from_fraction(self.im))

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    __repr__ = __str__


ZERO = GaussianRational()
ONE = GaussianRational(Fraction(1))
I = GaussianRational(Fraction(0), Fraction(1))
MINUS_I = GaussianRational(Fraction(0), Fraction(-1))
MINUS_ONE = GaussianRational(Fraction(-1))

FOURTH_ROOTS = (ONE, I, MINUS_ONE, MINUS_I)


def is_fourth_root(g: GaussianRational) -> bool:
    return g in FOURTH_ROOTS
