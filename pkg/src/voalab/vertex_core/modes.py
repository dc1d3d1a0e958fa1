"""Mode brackets with symbolic mode indices.

A field ``a`` of weight D is expanded as a(z) = sum_m a_m z^{-m-D}.  With
``shifted=True`` a charged field uses a(z) = sum_m a_m z^{-m-D-q/2}, which
puts the modes of weight-3/2 fields of charge +-1 on the integers.

Indices are polynomials in named symbols over Q(l) (``IndexPoly``).  A
bracket is returned as a ``ModeSum``: fields placed at one common mode index
with polynomial coefficients, plus the coefficient of the vacuum, which is
the central term multiplying delta_{index,0}.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from ..scalars import ONE, ZERO, RatFuncL, as_ratfunc
from .fieldexpr import FieldExpr
from .grammar import format_monomial, format_scaled
from .presentation import VACUUM

__all__ = ["IndexPoly", "ModeSum", "falling_binomial", "mode_bracket", "field_weight", "jacobi_modes", "reduce_derivatives"]


class IndexPoly:
    """Polynomial in index symbols with Q(l) coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Iterable[str], terms: dict | None = None):
        self.vars = tuple(vars)
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, vars, c) -> "IndexPoly":
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): as_ratfunc(c)})

    @classmethod
    def var(cls, vars, name: str) -> "IndexPoly":
        vars = tuple(vars)
        e = tuple(1 if v == name else 0 for v in vars)
        if sum(e) != 1:
            raise ValueError(f"unknown index symbol {name!r}")
        return cls(vars, {e: ONE})

    def _coerce(self, other) -> "IndexPoly":
        if isinstance(other, IndexPoly):
            if other.vars != self.vars:
                raise ValueError("index polynomials over different symbols")
            return other
        return IndexPoly.const(self.vars, other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            acc[e] = acc.get(e, ZERO) + c
        return IndexPoly(self.vars, acc)

    __radd__ = __add__

    def __neg__(self):
        return IndexPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, IndexPoly):
            c = as_ratfunc(other)
            return IndexPoly(self.vars, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        acc: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                acc[e] = acc.get(e, ZERO) + c1 * c2
        return IndexPoly(self.vars, acc)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, IndexPoly):
            return self.vars == other.vars and self.terms == other.terms
        return self == self._coerce(other)

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def evaluate(self, **values) -> RatFuncL:
        out = ZERO
        for e, c in self.terms.items():
            t = c
            for v, k in zip(self.vars, e):
                if k:
                    t = t * as_ratfunc(values[v]) ** k
            out = out + t
        return out

    def substitute(self, **polys) -> "IndexPoly":
        """Replace symbols by index polynomials over the same symbols."""
        out = IndexPoly(self.vars)
        for e, c in self.terms.items():
            t = IndexPoly.const(self.vars, c)
            for v, k in zip(self.vars, e):
                base = polys.get(v, IndexPoly.var(self.vars, v))
                for _ in range(k):
                    t = t * base
            out = out + t
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda e: (-sum(e), [-x for x in e]))
        out = []
        for k, e in enumerate(keys):
            mono = "*".join(v if p == 1 else f"{v}^{p}" for v, p in zip(self.vars, e) if p)
            out.append(format_scaled(self.terms[e], mono or None, k == 0))
        return "".join(out)

    def __repr__(self):
        return f"IndexPoly({self})"


def falling_binomial(x: IndexPoly, j: int) -> IndexPoly:
    """binom(x, j) = x (x-1) ... (x-j+1) / j!."""
    out = IndexPoly.const(x.vars, 1)
    for i in range(j):
        out = out * (x - i) * RatFuncL(Fraction(1, i + 1))
    return out


def field_weight(a: FieldExpr) -> Fraction:
    ws = a.weights()
    if len(ws) != 1:
        raise ValueError("mode expansion needs a field of homogeneous weight")
    return next(iter(ws))


def _field_charge(a: FieldExpr) -> Fraction:
    qs = a.charges()
    if len(qs) != 1:
        raise ValueError("shifted modes need a field of homogeneous charge")
    return next(iter(qs))


class ModeSum:
    """sum_X coeff_X * X_{index} + central * delta_{index,0}."""

    def __init__(self, algebra, index: IndexPoly, terms: dict, central: IndexPoly, shifted: bool = False):
        self.algebra = algebra
        self.index = index
        self.terms = {m: p for m, p in terms.items() if p}
        self.central = central
        self.shifted = shifted

    def field_at(self, point: dict) -> FieldExpr:
        """The field whose mode at ``index`` the sum is, with symbols evaluated."""
        return FieldExpr(self.algebra, {m: p.evaluate(**point) for m, p in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, ModeSum):
            return NotImplemented
        return self.index == other.index and self.terms == other.terms and self.central == other.central

    def __sub__(self, other: "ModeSum") -> "ModeSum":
        if self.index != other.index:
            raise ValueError("mode sums at different indices")
        acc = dict(self.terms)
        zero = IndexPoly(self.index.vars)
        for m, p in other.terms.items():
            acc[m] = acc.get(m, zero) - p
        return ModeSum(self.algebra, self.index, acc, self.central - other.central, self.shifted)

    def __add__(self, other: "ModeSum") -> "ModeSum":
        return self - ModeSum(other.algebra, other.index, {m: -p for m, p in other.terms.items()}, -other.central)

    def is_zero(self) -> bool:
        return not self.terms and not self.central

    def text(self) -> str:
        idx = str(self.index)
        out = []
        for k, (m, p) in enumerate(sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))):
            body = format_monomial(self.algebra, m)
            if len(m) != 1 or m[0][1]:
                body = f"({body})"
            out.append(_poly_times(p, f"{body}_{{{idx}}}", k == 0))
        if self.central:
            out.append(_poly_times(self.central, f"delta({idx})", not out))
        return "".join(out) if out else "0"

    def __str__(self):
        return self.text()


def _poly_times(p: IndexPoly, body: str, first: bool) -> str:
    if len(p.terms) == 1:
        (e, c), = p.terms.items()
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(p.vars, e) if k)
        return format_scaled(c, f"{mono}*{body}" if mono else body, first)
    s = str(p)
    return (f"({s})*{body}" if first else f" + ({s})*{body}")


def _shift(a: FieldExpr, shifted: bool) -> Fraction:
    return _field_charge(a) / 2 if shifted else Fraction(0)


def _bracket(a: FieldExpr, b: FieldExpr, ma: IndexPoly, mb: IndexPoly, shifted: bool) -> dict:
    """[a_{ma}, b_{mb}] as {monomial: IndexPoly}; vacuum included."""
    da = field_weight(a)
    field_weight(b)
    top = int(da + max(b.weights())) + 1
    x = ma + (da - 1 + _shift(a, shifted))
    out: dict = {}
    for j in range(0, top):
        prod = a.nth(b, j)
        if prod.is_zero():
            continue
        coef = falling_binomial(x, j)
        for mono, c in prod.terms.items():
            out[mono] = out.get(mono, IndexPoly(ma.vars)) + coef * c
    return out


def mode_bracket(a: FieldExpr, b: FieldExpr, m: str = "m", n: str = "n", shifted: bool = False) -> ModeSum:
    """[a_m, b_n] = sum_j binom(m + D_a - 1, j) (a o_j b)_{m+n}, exactly."""
    vars = (m, n)
    mi, ni = IndexPoly.var(vars, m), IndexPoly.var(vars, n)
    raw = _bracket(a, b, mi, ni, shifted)
    central = raw.pop(VACUUM, IndexPoly(vars))
    return ModeSum(a.algebra, mi + ni, raw, central, shifted)


def reduce_derivatives(ms: ModeSum) -> ModeSum:
    """Rewrite (d^k g)_p = (-1)^k (p + D_g + s)(p + D_g + s + 1)...(p + D_g + s + k - 1) g_p for single letters."""
    alg = ms.algebra
    acc: dict = {}
    zero = IndexPoly(ms.index.vars)
    for mono, p in ms.terms.items():
        if len(mono) == 1 and mono[0][1] > 0:
            g, k = mono[0]
            base = (g, 0)
            info = alg.generators[g]
            s = info.charge / 2 if ms.shifted else Fraction(0)
            f = IndexPoly.const(ms.index.vars, (-1) ** k)
            for i in range(k):
                f = f * (ms.index + (info.weight + s + i))
            acc[(base,)] = acc.get((base,), zero) + p * f
        else:
            acc[mono] = acc.get(mono, zero) + p
    return ModeSum(alg, ms.index, acc, ms.central, ms.shifted)


def jacobi_modes(a: FieldExpr, b: FieldExpr, c: FieldExpr) -> ModeSum:
    """[a_k,[b_m,c_n]] - [[a_k,b_m],c_n] - (-1)^{|a||b|} [b_m,[a_k,c_n]] at mode k+m+n.

    All three fields must be homogeneous; the result is zero exactly when the
    Jacobi identity holds as a polynomial identity in k, m, n.
    """
    alg = a.algebra
    vars = ("k", "m", "n")
    k, m, n = (IndexPoly.var(vars, v) for v in vars)
    sign = -1 if a.parity() and b.parity() else 1
    acc: dict = {}
    zero = IndexPoly(vars)

    def add(terms: dict, s):
        for mono, p in terms.items():
            acc[mono] = acc.get(mono, zero) + p * s

    def nested(x, y, z, ix, iy, iz, s):
        # s * [x_ix, [y_iy, z_iz]]; the vacuum is central and drops out
        for mono, p in _bracket(y, z, iy, iz, False).items():
            if mono != VACUUM:
                inner = FieldExpr(alg, {mono: ONE})
                add({m2: p2 * p for m2, p2 in _bracket(x, inner, ix, iy + iz, False).items()}, s)

    nested(a, b, c, k, m, n, 1)
    # [[a_k, b_m], c_n]: group the inner bracket by weight so each piece is homogeneous
    da = field_weight(a)
    db = field_weight(b)
    for j in range(0, int(da + db) + 1):
        y = a.nth(b, j)
        if y.is_zero() or y.terms.keys() == {VACUUM}:
            continue
        y = FieldExpr(alg, {mm: cc for mm, cc in y.terms.items() if mm != VACUUM})
        coef = falling_binomial(k + (da - 1), j)
        for mono, p in _bracket(y, c, k + m, n, False).items():
            add({mono: p * coef}, -1)
    nested(b, a, c, m, k, n, -sign)
    central = acc.pop(VACUUM, zero)
    return ModeSum(alg, k + m + n, acc, central)
