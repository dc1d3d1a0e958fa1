"""Exact arithmetic in the cyclotomic field Q(zeta_M)."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import flint

__all__ = ["Cyclo", "root_of_unity", "to_cyclo"]


@lru_cache(maxsize=None)
def _phi(m: int) -> flint.fmpq_poly:
    return flint.fmpq_poly(flint.fmpz_poly.cyclotomic(m).coeffs())


def _fq(x) -> flint.fmpq:
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    return flint.fmpq(x)


class Cyclo:
    """An element of Q(zeta_M), stored as a polynomial in zeta reduced mod Phi_M."""

    __slots__ = ("m", "poly")

    def __init__(self, m: int, poly):
        self.m = m
        if not isinstance(poly, flint.fmpq_poly):
            poly = flint.fmpq_poly(poly)
        self.poly = poly % _phi(m) if poly.degree() >= _phi(m).degree() else poly

    def _lift(self, other) -> "Cyclo":
        if isinstance(other, Cyclo):
            if other.m == self.m:
                return other
            raise ValueError(f"cyclotomic orders differ: {self.m} vs {other.m}")
        return Cyclo(self.m, flint.fmpq_poly([_fq(other)]))

    def __add__(self, other):
        if not isinstance(other, (Cyclo, int, Fraction)):
            return NotImplemented
        return Cyclo(self.m, self.poly + self._lift(other).poly)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.m, -self.poly)

    def __sub__(self, other):
        if not isinstance(other, (Cyclo, int, Fraction)):
            return NotImplemented
        return Cyclo(self.m, self.poly - self._lift(other).poly)

    def __rsub__(self, other):
        return Cyclo(self.m, self._lift(other).poly - self.poly)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclo(self.m, self.poly * _fq(other))
        if not isinstance(other, Cyclo):
            return NotImplemented
        return Cyclo(self.m, self.poly * self._lift(other).poly)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        g, s, _ = self.poly.xgcd(_phi(self.m))
        # g is a nonzero constant since Phi_M is irreducible
        return Cyclo(self.m, s / g[0])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __bool__(self):
        return not self.poly.is_zero()

    def is_rational(self) -> bool:
        return self.poly.degree() <= 0

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        c = self.poly[0]
        return Fraction(int(c.p), int(c.q))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.rational() == other
        if isinstance(other, Cyclo):
            return self.m == other.m and self.poly == other.poly
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational())
        return hash((self.m, str(self.poly)))

    def __str__(self):
        if self.is_rational():
            return str(self.rational())
        return str(self.poly).replace("x", f"z{self.m}")

    __repr__ = __str__


def root_of_unity(m: int, k: int = 1) -> Cyclo:
    """zeta_m^k with zeta_m = exp(2 pi i / m)."""
    coeffs = [0] * (k % m) + [1]
    return Cyclo(m, flint.fmpq_poly(coeffs))


def to_cyclo(x, m: int) -> Cyclo:
    if isinstance(x, Cyclo):
        return x
    return Cyclo(m, flint.fmpq_poly([_fq(x)]))
