"""Exact arithmetic in the rational function field Q(l).

Polynomials are python-flint ``fmpq_poly`` objects; :class:`RatFuncL` keeps
a reduced fraction of two of them with a monic denominator, so equality is
structural equality of the stored pair.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import lcm
from typing import Union

import flint

PolyL = flint.fmpq_poly

_ONE_POLY = PolyL([1])
_ZERO_POLY = PolyL([])

Rational = Union[int, Fraction]


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a root of its denominator."""

    def __init__(self, value, factor):
        self.value = value
        self.factor = factor
        super().__init__(f"pole at l = {value}: denominator factor {factor} vanishes")


def to_fraction(c) -> Fraction:
    """Convert an fmpq / int / Fraction to a Python Fraction."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    return Fraction(int(c.p), int(c.q))


def _fmpq(c):
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def poly_coeffs(p: PolyL) -> tuple[Fraction, ...]:
    return tuple(to_fraction(c) for c in p.coeffs())


def poly_from_coeffs(coeffs) -> PolyL:
    return PolyL([_fmpq(c) for c in coeffs])


class RatFuncL:
    """An element of Q(l), stored as numerator / monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=None, _reduced=False):
        if not isinstance(num, PolyL):
            num = PolyL([_fmpq(num)]) if num else PolyL([])
        if den is None:
            self.num = num
            self.den = _ONE_POLY
            self._hash = None
            return
        if not isinstance(den, PolyL):
            den = PolyL([_fmpq(den)])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if num.is_zero():
                den = _ONE_POLY
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num // g
                    den = den // g
                lc = den.leading_coefficient()
                if lc != 1:
                    inv = 1 / lc
                    num = num * inv
                    den = den * inv
        self.num = num
        self.den = den
        self._hash = None

    # construction helpers
    @classmethod
    def from_poly(cls, p: PolyL) -> "RatFuncL":
        return cls(p)

    @classmethod
    def level(cls) -> "RatFuncL":
        """The indeterminate l."""
        return cls(PolyL([0, 1]))

    @classmethod
    def const(cls, c: Rational) -> "RatFuncL":
        return cls(c)

    # predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_one() and self.num.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.degree() <= 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return to_fraction(self.num[0])

    def degree(self) -> int:
        """Total degree used for pivot selection: deg(num) + deg(den)."""
        if self.num.is_zero():
            return -1
        return self.num.degree() + self.den.degree()

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, RatFuncL):
            return other
        if isinstance(other, (int, Fraction)):
            return RatFuncL(other)
        if isinstance(other, PolyL):
            return RatFuncL(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den.is_one() and other.den.is_one():
            return RatFuncL(self.num + other.num)
        if self.den == other.den:
            return RatFuncL(self.num + other.num, self.den)
        return RatFuncL(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFuncL(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return RatFuncL(self.num * _fmpq(other), self.den, _reduced=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den.is_one() and other.den.is_one():
            return RatFuncL(self.num * other.num)
        return RatFuncL(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFuncL":
        if self.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFuncL(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return RatFuncL(self.num * _fmpq(1 / Fraction(other)), self.den, _reduced=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RatFuncL(self.num**k, self.den**k, _reduced=True)

    def __eq__(self, other):
        if isinstance(other, RatFuncL):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.den.is_one() and self.num == PolyL([_fmpq(other)]) if other else self.num.is_zero()
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((poly_coeffs(self.num), poly_coeffs(self.den)))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    def is_negative(self) -> bool:
        """True when the leading numerator coefficient is negative (printing sign)."""
        return not self.num.is_zero() and self.num.leading_coefficient() < 0

    # evaluation
    def specialize(self, value: Rational) -> Fraction:
        """Evaluate at l = value; raise :class:`PoleError` at a pole."""
        v = _fmpq(value)
        d = self.den(v)
        if d == 0:
            raise PoleError(Fraction(value), _pole_factor(self.den, Fraction(value)))
        return to_fraction(self.num(v)) / to_fraction(d)

    def __call__(self, value):
        return self.specialize(value)

    def denominator_factors(self) -> list[PolyL]:
        """Monic irreducible factors of the denominator."""
        if self.den.is_one():
            return []
        _, facs = self.den.factor()
        out = []
        for f, _ in facs:
            out.append(f * (1 / f.leading_coefficient()))
        return out

    # text form
    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFuncL({format_ratfunc(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "RatFuncL":
        return parse_ratfunc(text)


ZERO = RatFuncL(0)
ONE = RatFuncL(1)
L = RatFuncL.level()


def as_ratfunc(x) -> RatFuncL:
    if isinstance(x, RatFuncL):
        return x
    if isinstance(x, str):
        return parse_ratfunc(x)
    return RatFuncL(x)


def ratfunc_arith(a: RatFuncL, b: RatFuncL, op: str) -> RatFuncL:
    """Exact field arithmetic; ``op`` is one of add, sub, mul, div."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def specialize(a: RatFuncL, value: Rational) -> Fraction:
    return as_ratfunc(a).specialize(value)


def _pole_factor(den: PolyL, value: Fraction) -> str:
    _, facs = den.factor()
    for f, _ in facs:
        if f(_fmpq(value)) == 0:
            f = f * (1 / f.leading_coefficient())
            return format_poly(_integer_poly(f)[0])
    return format_poly(_integer_poly(den)[0])


# -- printing -----------------------------------------------------------------


def _integer_poly(p: PolyL) -> tuple[list[int], Fraction]:
    """Return (primitive integer coefficients, scale) with p = scale * poly."""
    coeffs = poly_coeffs(p)
    if not coeffs:
        return [], Fraction(0)
    m = lcm(*(c.denominator for c in coeffs))
    ints = [int(c * m) for c in coeffs]
    from math import gcd

    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    return ints, Fraction(g, m)


def format_poly(ints) -> str:
    """Format an integer coefficient list (low degree first) in the l syntax."""
    if isinstance(ints, PolyL):
        ints = [int(to_fraction(c)) for c in ints.coeffs()]
    terms = []
    for deg in range(len(ints) - 1, -1, -1):
        c = ints[deg]
        if c == 0:
            continue
        if deg == 0:
            body = str(abs(c))
        else:
            mono = "l" if deg == 1 else f"l^{deg}"
            body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _needs_parens(s: str) -> bool:
    body = s[1:] if s.startswith("-") else s
    return any(ch in body for ch in " +-*^/")


def format_ratfunc(a: RatFuncL) -> str:
    if a.num.is_zero():
        return "0"
    n_ints, n_scale = _integer_poly(a.num)
    d_ints, d_scale = _integer_poly(a.den)
    scale = n_scale / d_scale
    n_ints = [c * scale.numerator for c in n_ints]
    d_ints = [c * scale.denominator for c in d_ints]
    num_s = format_poly(n_ints)
    if d_ints == [1]:
        return num_s
    den_s = format_poly(d_ints)
    if _needs_parens(num_s):
        num_s = f"({num_s})"
    if _needs_parens(den_s):
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"


# -- parsing ------------------------------------------------------------------

_SCALAR_TOKEN = re.compile(r"\s*(?:(\d+)|(l)\b|([-+*/^()]))")


class ScalarSyntaxError(ValueError):
    def __init__(self, message, pos):
        self.pos = pos
        super().__init__(f"{message} at column {pos + 1}")


def parse_ratfunc(text: str) -> RatFuncL:
    """Parse the textual form: integers, ``l``, ``+ - * / ^`` and parentheses."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _SCALAR_TOKEN.match(text, pos)
        if not m:
            raise ScalarSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("", len(text)))
    i = 0

    def peek():
        return tokens[i][0]

    def take():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def expr():
        val = term()
        while peek() in ("+", "-"):
            op, _ = take()
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = unary()
        while peek() in ("*", "/"):
            op, p = take()
            rhs = unary()
            if op == "*":
                val = val * rhs
            else:
                if rhs.is_zero():
                    raise ScalarSyntaxError("division by zero", p)
                val = val / rhs
        return val

    def unary():
        if peek() == "-":
            take()
            return -unary()
        if peek() == "+":
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == "^":
            take()
            tok, p = take()
            neg = False
            if tok == "-":
                neg = True
                tok, p = take()
            if not tok.isdigit():
                raise ScalarSyntaxError("expected integer exponent", p)
            k = int(tok)
            return base ** (-k if neg else k)
        return base

    def atom():
        tok, p = take()
        if tok.isdigit():
            return RatFuncL(int(tok))
        if tok == "l":
            return L
        if tok == "(":
            val = expr()
            close, p2 = take()
            if close != ")":
                raise ScalarSyntaxError("expected ')'", p2)
            return val
        raise ScalarSyntaxError(f"unexpected token {tok!r}" if tok else "unexpected end of input", p)

    result = expr()
    if peek() != "":
        raise ScalarSyntaxError(f"unexpected token {peek()!r}", tokens[i][1])
    return result
