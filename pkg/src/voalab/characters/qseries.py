"""Truncated formal series in q (and z) with rational exponents and exact coefficients.

A ``QSeries`` knows every coefficient of q^e for e < order.  Products keep
only what is determined by both factors: the order of a*b is
min(order(a) + val(b), order(b) + val(a)).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable

__all__ = ["QSeries", "JacobiSeries", "euler_product", "as_fraction"]


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _nonzero(c) -> bool:
    return bool(c)


class QSeries:
    __slots__ = ("terms", "order")

    def __init__(self, terms: dict | None = None, order=0):
        self.order = as_fraction(order)
        self.terms = {as_fraction(e): c for e, c in (terms or {}).items() if _nonzero(c) and e < self.order}

    @classmethod
    def one(cls, order) -> "QSeries":
        return cls({Fraction(0): Fraction(1)}, order)

    @classmethod
    def monomial(cls, exponent, coeff, order) -> "QSeries":
        return cls({as_fraction(exponent): coeff}, order)

    def valuation(self) -> Fraction:
        """Smallest exponent present (the order itself for the zero series)."""
        return min(self.terms, default=self.order)

    def leading(self):
        v = self.valuation()
        return v, self.terms.get(v, 0)

    def coefficient(self, e):
        e = as_fraction(e)
        if e >= self.order:
            raise ValueError(f"q^{e} lies beyond the truncation order {self.order}")
        return self.terms.get(e, 0)

    def items(self):
        return sorted(self.terms.items())

    def truncate(self, order) -> "QSeries":
        order = min(as_fraction(order), self.order)
        return QSeries(self.terms, order)

    def shift(self, e) -> "QSeries":
        """Multiply by q^e."""
        e = as_fraction(e)
        return QSeries({k + e: c for k, c in self.terms.items()}, self.order + e)

    def map_coefficients(self, f: Callable) -> "QSeries":
        return QSeries({e: f(c) for e, c in self.terms.items()}, self.order)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        order = min(self.order, other.order)
        acc = {e: c for e, c in self.terms.items() if e < order}
        for e, c in other.terms.items():
            if e < order:
                acc[e] = acc[e] + c if e in acc else c
        return QSeries(acc, order)

    def __neg__(self):
        return QSeries({e: -c for e, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return QSeries({e: c * other for e, c in self.terms.items()}, self.order)
        order = min(self.order + other.valuation(), other.order + self.valuation())
        acc: dict = {}
        b_items = sorted(other.terms.items())
        for e1, c1 in self.terms.items():
            for e2, c2 in b_items:
                e = e1 + e2
                if e >= order:
                    break
                acc[e] = acc[e] + c1 * c2 if e in acc else c1 * c2
        return QSeries(acc, order)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        v, c0 = self.leading()
        if not _nonzero(c0):
            raise ZeroDivisionError("series has no leading term below its order")
        rel = self.order - v
        inv0 = 1 / c0 if not isinstance(c0, (int, Fraction)) else Fraction(1) / c0
        # self = c0 q^v (1 + r); 1/(1 + r) = sum (-r)^k
        r = QSeries({e - v: c * inv0 for e, c in self.terms.items() if e != v}, rel)
        out = QSeries.one(rel)
        power = QSeries.one(rel)
        while power.terms:
            power = (power * r).truncate(rel) * -1
            out = out + power
        return out.shift(-v) * inv0

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.inverse()
        return self * (Fraction(1) / other if isinstance(other, (int, Fraction)) else 1 / other)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return QSeries.one(self.order - self.valuation())
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def agrees_with(self, other: "QSeries", order=None) -> bool:
        order = min(self.order, other.order) if order is None else as_fraction(order)
        keys = {e for e in self.terms if e < order} | {e for e in other.terms if e < order}
        return all(self.terms.get(e, 0) == other.terms.get(e, 0) for e in keys)

    def first_mismatch(self, other: "QSeries", order=None):
        order = min(self.order, other.order) if order is None else as_fraction(order)
        keys = sorted({e for e in self.terms if e < order} | {e for e in other.terms if e < order})
        for e in keys:
            if self.terms.get(e, 0) != other.terms.get(e, 0):
                return e
        return None

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self.agrees_with(other)

    def __str__(self):
        out = []
        for e, c in self.items():
            out.append(f"({c})*q^({e})" if e else f"({c})")
        out.append(f"O(q^({self.order}))")
        return " + ".join(out)

    def __repr__(self):
        return f"QSeries({self})"


def euler_product(factors: Iterable[tuple], order) -> QSeries:
    """prod (1 - c q^e) over (e, c) pairs with e > 0, truncated at ``order``."""
    out = QSeries.one(order)
    for e, c in factors:
        e = as_fraction(e)
        if e >= order:
            continue
        out = out * QSeries({Fraction(0): Fraction(1), e: -c}, order)
    return out


class JacobiSeries:
    """Truncated series in q with Laurent dependence on z (rational z-exponents).

    Terms are keyed by (z-exponent, q-exponent); the q-truncation is global.
    """

    __slots__ = ("terms", "order")

    def __init__(self, terms: dict | None = None, order=0):
        self.order = as_fraction(order)
        self.terms = {
            (as_fraction(z), as_fraction(e)): c for (z, e), c in (terms or {}).items() if _nonzero(c) and e < self.order
        }

    @classmethod
    def from_qseries(cls, s: QSeries, z=0) -> "JacobiSeries":
        return cls({(z, e): c for e, c in s.terms.items()}, s.order)

    def valuation(self) -> Fraction:
        return min((e for _, e in self.terms), default=self.order)

    def z_exponents(self) -> list[Fraction]:
        return sorted({z for z, _ in self.terms})

    def z_component(self, z) -> QSeries:
        z = as_fraction(z)
        return QSeries({e: c for (zz, e), c in self.terms.items() if zz == z}, self.order)

    def coefficient(self, z, e):
        return self.terms.get((as_fraction(z), as_fraction(e)), 0)

    def shift(self, e, z=0) -> "JacobiSeries":
        e, z = as_fraction(e), as_fraction(z)
        return JacobiSeries({(zz + z, ee + e): c for (zz, ee), c in self.terms.items()}, self.order + e)

    def truncate(self, order) -> "JacobiSeries":
        return JacobiSeries(self.terms, min(as_fraction(order), self.order))

    def __add__(self, other):
        if not isinstance(other, JacobiSeries):
            return NotImplemented
        order = min(self.order, other.order)
        acc = {k: c for k, c in self.terms.items() if k[1] < order}
        for k, c in other.terms.items():
            if k[1] < order:
                acc[k] = acc[k] + c if k in acc else c
        return JacobiSeries(acc, order)

    def __neg__(self):
        return JacobiSeries({k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            other = JacobiSeries.from_qseries(other)
        if not isinstance(other, JacobiSeries):
            return JacobiSeries({k: c * other for k, c in self.terms.items()}, self.order)
        order = min(self.order + other.valuation(), other.order + self.valuation())
        acc: dict = {}
        b_items = sorted(other.terms.items(), key=lambda t: t[0][1])
        for (z1, e1), c1 in self.terms.items():
            for (z2, e2), c2 in b_items:
                e = e1 + e2
                if e >= order:
                    break
                k = (z1 + z2, e)
                acc[k] = acc[k] + c1 * c2 if k in acc else c1 * c2
        return JacobiSeries(acc, order)

    __rmul__ = __mul__

    def specialize_z(self, value: Callable) -> QSeries:
        """Substitute z; ``value(zexp)`` returns the number z^zexp."""
        acc: dict = {}
        for (z, e), c in self.terms.items():
            t = c * value(z)
            acc[e] = acc[e] + t if e in acc else t
        return QSeries(acc, self.order)

    def at_one(self) -> QSeries:
        return self.specialize_z(lambda z: 1)

    def invariant_under_z_inversion(self) -> bool:
        return all(self.terms.get((-z, e), 0) == c for (z, e), c in self.terms.items())

    def agrees_with(self, other: "JacobiSeries", order=None) -> bool:
        return self.first_mismatch(other, order) is None

    def first_mismatch(self, other: "JacobiSeries", order=None):
        order = min(self.order, other.order) if order is None else as_fraction(order)
        keys = sorted(
            {k for k in self.terms if k[1] < order} | {k for k in other.terms if k[1] < order}, key=lambda k: (k[1], k[0])
        )
        for k in keys:
            if self.terms.get(k, 0) != other.terms.get(k, 0):
                return k
        return None

    def __eq__(self, other):
        if not isinstance(other, JacobiSeries):
            return NotImplemented
        return self.order == other.order and self.agrees_with(other)

    def __str__(self):
        out = []
        for (z, e), c in sorted(self.terms.items(), key=lambda t: (t[0][1], t[0][0])):
            out.append(f"({c})*z^({z})*q^({e})")
        out.append(f"O(q^({self.order}))")
        return " + ".join(out)

    def __repr__(self):
        return f"JacobiSeries({self})"
