"""Immutable linear combinations of normal monomials."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from ..scalars import ONE, RatFuncL, as_ratfunc
from .engine import lin_add, lin_scale
from .presentation import VACUUM, AlgebraPresentation, Lin, Monomial


class FieldExpr:
    """A field in normal form: ``{NormalMonomial: RatFuncL}`` over one presentation."""

    __slots__ = ("algebra", "terms", "_hash")

    def __init__(self, algebra: AlgebraPresentation, terms: Lin | None = None):
        self.algebra = algebra
        self.terms: Lin = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None

    # construction
    @classmethod
    def zero(cls, algebra):
        return cls(algebra, {})

    def _wrap(self, terms: Lin) -> "FieldExpr":
        return FieldExpr(self.algebra, terms)

    def _same(self, other: "FieldExpr"):
        if other.algebra is not self.algebra:
            raise ValueError("fields live in different presentations")

    # queries
    def __iter__(self) -> Iterator[tuple[Monomial, RatFuncL]]:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, mono: Monomial) -> RatFuncL:
        return self.terms.get(mono, RatFuncL(0))

    def vacuum_coeff(self) -> RatFuncL:
        return self.coeff(VACUUM)

    def weights(self) -> set[Fraction]:
        return {self.algebra.weight(m) for m in self.terms}

    def charges(self) -> set[Fraction]:
        return {self.algebra.charge(m) for m in self.terms}

    def weight(self) -> Fraction:
        ws = self.weights()
        if len(ws) != 1:
            raise ValueError(f"field is not homogeneous in weight: {sorted(ws)}")
        return ws.pop()

    def degree(self) -> int:
        return max((self.algebra.degree(m) for m in self.terms), default=0)

    def weight_component(self, w) -> "FieldExpr":
        w = Fraction(w)
        return self._wrap({m: c for m, c in self.terms.items() if self.algebra.weight(m) == w})

    def charge_component(self, q) -> "FieldExpr":
        q = Fraction(q)
        return self._wrap({m: c for m, c in self.terms.items() if self.algebra.charge(m) == q})

    def parity(self) -> int:
        ps = {self.algebra.parity(m) for m in self.terms}
        if len(ps) > 1:
            raise ValueError("field has mixed parity")
        return ps.pop() if ps else 0

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, FieldExpr):
            return NotImplemented
        self._same(other)
        acc = dict(self.terms)
        lin_add(acc, other.terms)
        return self._wrap(acc)

    def __sub__(self, other):
        if not isinstance(other, FieldExpr):
            return NotImplemented
        self._same(other)
        acc = dict(self.terms)
        lin_add(acc, other.terms, -1)
        return self._wrap(acc)

    def __neg__(self):
        return self._wrap(lin_scale(self.terms, -1))

    def __mul__(self, c):
        if isinstance(c, FieldExpr):
            return NotImplemented
        if isinstance(c, str):
            c = as_ratfunc(c)
        return self._wrap(lin_scale(self.terms, c))

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = as_ratfunc(c) if isinstance(c, str) else c
        return self._wrap(lin_scale(self.terms, RatFuncL(1) / c))

    def __eq__(self, other):
        if isinstance(other, FieldExpr):
            return self.algebra is other.algebra and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # vertex algebra operations
    def nth(self, other: "FieldExpr", n: int) -> "FieldExpr":
        self._same(other)
        return self._wrap(self.algebra.engine.prod_lin(self.terms, other.terms, n))

    def wick(self, other: "FieldExpr") -> "FieldExpr":
        return self.nth(other, -1)

    def derivative(self, k: int = 1) -> "FieldExpr":
        return self._wrap(self.algebra.engine.deriv_lin(self.terms, k))

    def specialize(self, value) -> "FieldExpr":
        alg = self.algebra.specialize(value)
        terms = {m: RatFuncL(c.specialize(value)) for m, c in self.terms.items()}
        return FieldExpr(alg, terms)

    # text
    def __str__(self):
        from .grammar import format_field

        return format_field(self)

    def __repr__(self):
        return f"FieldExpr({self})"


def nth_product(a: FieldExpr, b: FieldExpr, n: int) -> FieldExpr:
    return a.nth(b, n)


def wick(a: FieldExpr, b: FieldExpr) -> FieldExpr:
    return a.nth(b, -1)


def derivative(a: FieldExpr, k: int = 1) -> FieldExpr:
    return a.derivative(k)


def normalize(a: FieldExpr) -> FieldExpr:
    """Re-normalise a field; the identity on canonical FieldExprs."""
    eng = a.algebra.engine
    acc: dict = {}
    for m, c in a.terms.items():
        lin_add(acc, eng.normalize_word(m), c)
    return FieldExpr(a.algebra, acc)


def monomial_field(alg: AlgebraPresentation, letters) -> FieldExpr:
    """Normal form of the right-nested Wick word of the given letters."""
    return FieldExpr(alg, alg.engine.normalize_word(letters))


def weight_basis(alg: AlgebraPresentation, weight, charge=0, max_degree: int | None = None) -> list[Monomial]:
    """All normal monomials of the given weight and charge, in monomial order.

    Repeated odd letters are excluded since they normalise away.
    """
    weight = Fraction(weight)
    charge = Fraction(charge)
    gens = alg.generators
    # candidate letters sorted by the monomial order
    letters = []
    for gi, g in enumerate(gens):
        d = 0
        while g.weight + d <= weight:
            letters.append((gi, d))
            d += 1
    letters.sort(key=lambda x: (x[0], -x[1]))
    out = []

    def rec(start, w, q, deg, acc):
        if w == weight:
            if q == charge:
                out.append(tuple(acc))
            return
        for idx in range(start, len(letters)):
            g, d = letters[idx]
            info = gens[g]
            lw = info.weight + d
            if lw <= 0:
                raise ValueError("weight_basis needs generators of positive weight")
            if w + lw > weight:
                continue
            ndeg = deg + (1 if info.filtered else 0)
            if max_degree is not None and ndeg > max_degree:
                continue
            acc.append((g, d))
            rec(idx + 1 if info.is_odd else idx, w + lw, q + info.charge, ndeg, acc)
            acc.pop()

    rec(0, Fraction(0), Fraction(0), 0, [])
    out.sort(key=monomial_sort_key)
    return out


def monomial_sort_key(mono: Monomial):
    """Deterministic monomial order used for printing and enumeration."""
    return (len(mono), tuple((g, -d) for g, d in mono))
