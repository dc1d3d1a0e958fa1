"""Expression language for fields.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | nprod
    nprod  := power ('_' INT '_' power)*
    power  := atom ('^' INT)?
    atom   := INT | 'l' | NAME | 'd' ('^' INT)? atom | '(' expr ')' | ':' atom+ ':'

Names are matched longest-first against the generators of the presentation
and any extra names supplied by the caller; indexed names such as
``U_{0,3}`` are matched by shape and resolved through a callback.  A ``:``
inside a Wick group closes the group when it is followed by something that
cannot start an atom (or by another ``:``); otherwise it opens a nested
group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from ..scalars import ONE, RatFuncL, format_ratfunc
from .engine import lin_add
from .fieldexpr import FieldExpr, monomial_sort_key
from .presentation import VACUUM, AlgebraPresentation, Monomial


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line = line
        self.column = col
        self.message = message
        super().__init__(f"line {line}, column {col}: {message}")


class UnknownNameError(KeyError):
    def __init__(self, name: str, line: int = 1, column: int = 1):
        self.name = name
        self.line = line
        self.column = column
        super().__init__(f"unknown generator or field {name!r} at line {line}, column {column}")

    def __str__(self):
        return self.args[0]


# -- syntax tree ----------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Level:
    pass


@dataclass(frozen=True)
class Name:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Deriv:
    k: int
    arg: "Node"


@dataclass(frozen=True)
class WickGroup:
    items: tuple


@dataclass(frozen=True)
class NProd:
    left: "Node"
    n: int
    right: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    k: int


Node = Union[Num, Level, Name, Deriv, WickGroup, NProd, BinOp, Neg, Pow]

_INDEXED = re.compile(r"[A-Za-z][A-Za-z0-9]*_\{-?\d+(?:,-?\d+)*\}")
_INT = re.compile(r"\d+")
_NPROD = re.compile(r"_(-?\d+)_")
_WORDCHAR = re.compile(r"[A-Za-z0-9]")


class _Parser:
    def __init__(self, text: str, names):
        self.text = text
        self.names = sorted(names, key=len, reverse=True)
        self.toks = self._tokenize()
        self.i = 0

    # tokens are (kind, value, pos)
    def _tokenize(self):
        text = self.text
        out = []
        pos = 0
        n = len(text)
        while pos < n:
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            m = _NPROD.match(text, pos)
            if m:
                out.append(("nprod", int(m.group(1)), pos))
                pos = m.end()
                continue
            m = _INDEXED.match(text, pos)
            if m:
                out.append(("name", m.group(0), pos))
                pos = m.end()
                continue
            hit = None
            for name in self.names:
                if text.startswith(name, pos):
                    end = pos + len(name)
                    # an alphanumeric name must not run into further word characters
                    if _WORDCHAR.match(name[-1]) and end < n and _WORDCHAR.match(text[end]):
                        continue
                    hit = name
                    break
            if hit is not None:
                out.append(("name", hit, pos))
                pos += len(hit)
                continue
            if ch.isdigit():
                m = _INT.match(text, pos)
                out.append(("int", int(m.group(0)), pos))
                pos = m.end()
                continue
            if ch in "ld" and (pos + 1 >= n or not _WORDCHAR.match(text[pos + 1])):
                out.append(("l" if ch == "l" else "d", ch, pos))
                pos += 1
                continue
            if ch in "+-*/^():":
                out.append((ch, ch, pos))
                pos += 1
                continue
            m = re.match(r"[A-Za-z][A-Za-z0-9+\-]*", text[pos:])
            word = m.group(0) if m else ch
            raise UnknownNameError(word, *_linecol(text, pos)) if m else ExpressionSyntaxError(
                f"unexpected character {ch!r}", text, pos
            )
        out.append(("end", None, n))
        return out

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.take()
        if t[0] != kind:
            raise ExpressionSyntaxError(f"expected {kind!r}, found {t[1]!r}", self.text, t[2])
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ExpressionSyntaxError(msg, self.text, tok[2])

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[0] == "+":
            self.take()
            return self.unary()
        return self.nprod()

    def nprod(self):
        node = self.power()
        while self.peek()[0] == "nprod":
            n = self.take()[1]
            node = NProd(node, n, self.power())
        return node

    def power(self):
        node = self.atom()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            k = self.expect("int")[1]
            node = Pow(node, -k if neg else k)
        return node

    _ATOM_START = ("int", "l", "name", "d", "(", ":")

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            return Num(val)
        if kind == "l":
            self.take()
            return Level()
        if kind == "name":
            self.take()
            return Name(val, pos)
        if kind == "d":
            self.take()
            k = 1
            if self.peek()[0] == "^":
                self.take()
                k = self.expect("int")[1]
            return Deriv(k, self.atom())
        if kind == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if kind == ":":
            self.take()
            return self.wick_group()
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {val!r}")

    def wick_group(self):
        items = []
        while True:
            kind = self.peek()[0]
            if kind == ":":
                nxt = self.peek(1)[0]
                if items and (nxt not in self._ATOM_START or nxt == ":"):
                    self.take()
                    break
                self.take()
                items.append(self.wick_group())
                continue
            if kind == "end":
                raise self.error("unterminated Wick group")
            items.append(self.power())
        if not items:
            raise self.error("empty Wick group")
        return WickGroup(tuple(items))


def _linecol(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def parse_expression(text: str, names) -> Node:
    """Parse text into a syntax tree; ``names`` is the set of known field names."""
    return _Parser(text, names).parse()


# -- evaluation -----------------------------------------------------------

Resolver = Callable[[str], "FieldExpr | None"]


class Evaluator:
    def __init__(self, alg: AlgebraPresentation, resolver: Resolver | None = None, text: str = ""):
        self.alg = alg
        self.resolver = resolver
        self.text = text

    def field_of(self, v) -> FieldExpr:
        if isinstance(v, FieldExpr):
            return v
        return FieldExpr(self.alg, {VACUUM: v})

    def eval(self, node):
        if isinstance(node, Num):
            return RatFuncL(node.value)
        if isinstance(node, Level):
            return RatFuncL.level()
        if isinstance(node, Name):
            return self.lookup(node)
        if isinstance(node, Neg):
            return -self.eval(node.arg)
        if isinstance(node, Pow):
            base = self.eval(node.base)
            if isinstance(base, FieldExpr):
                raise ValueError("powers of fields are written with power_field or Wick groups")
            return base ** node.k
        if isinstance(node, Deriv):
            return self.field_of(self.eval(node.arg)).derivative(node.k)
        if isinstance(node, WickGroup):
            vals = [self.field_of(self.eval(x)) for x in node.items]
            out = vals[-1]
            for v in reversed(vals[:-1]):
                out = v.wick(out)
            return out
        if isinstance(node, NProd):
            return self.field_of(self.eval(node.left)).nth(self.field_of(self.eval(node.right)), node.n)
        if isinstance(node, BinOp):
            a = self.eval(node.left)
            b = self.eval(node.right)
            if node.op in "+-":
                if isinstance(a, FieldExpr) or isinstance(b, FieldExpr):
                    a, b = self.field_of(a), self.field_of(b)
                return a + b if node.op == "+" else a - b
            if node.op == "*":
                if isinstance(a, FieldExpr) and isinstance(b, FieldExpr):
                    raise ValueError("'*' multiplies a field by a scalar; use ':A B:' for Wick products")
                return a * b
            if isinstance(b, FieldExpr):
                raise ValueError("cannot divide by a field")
            return a / b
        raise TypeError(f"unknown node {node!r}")

    def lookup(self, node: Name) -> FieldExpr:
        name = node.name
        if name in self.alg.index:
            return self.alg.generator_field(name)
        if self.resolver is not None:
            got = self.resolver(name)
            if got is not None:
                return got
        raise UnknownNameError(name, *_linecol(self.text, node.pos))


def known_names(alg: AlgebraPresentation, extra=()) -> list[str]:
    return list(alg.index) + [n for n in extra if n not in alg.index]


def parse_field(text: str, alg: AlgebraPresentation, resolver: Resolver | None = None, extra_names=()) -> FieldExpr:
    """Parse and evaluate to a normal-form FieldExpr."""
    tree = parse_expression(text, known_names(alg, extra_names))
    val = Evaluator(alg, resolver, text).eval(tree)
    return val if isinstance(val, FieldExpr) else FieldExpr(alg, {VACUUM: val} if val else {})


# -- printing -------------------------------------------------------------


def format_letter(alg: AlgebraPresentation, letter, wrap: bool = False) -> str:
    g, d = letter
    name = alg.generators[g].name
    if d == 0:
        return name
    s = f"d {name}" if d == 1 else f"d^{d} {name}"
    return f"({s})" if wrap else s


def format_monomial(alg: AlgebraPresentation, mono: Monomial) -> str:
    if not mono:
        return "1"
    if len(mono) == 1:
        return format_letter(alg, mono[0])
    return ":" + " ".join(format_letter(alg, x, wrap=True) for x in mono) + ":"


def _top_level_sum(s: str) -> bool:
    depth = 0
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == " " and depth == 0:
            return True
    return False


def format_scaled(c: RatFuncL, body: str | None, first: bool) -> str:
    """Render c*body as one term of a sum (body None means a bare scalar)."""
    neg = c.is_negative()
    a = -c if neg else c
    cs = format_ratfunc(a)
    if _top_level_sum(cs) and (body is not None or neg or not first):
        cs = f"({cs})"
    if body is None:
        out = cs
    else:
        out = body if a.is_one() else f"{cs}*{body}"
    if first:
        return f"-{out}" if neg else out
    return f" - {out}" if neg else f" + {out}"


def format_term(alg, mono, c: RatFuncL, first: bool) -> str:
    return format_scaled(c, format_monomial(alg, mono) if mono else None, first)


def format_field(f: FieldExpr) -> str:
    if not f.terms:
        return "0"
    out = []
    for k, mono in enumerate(sorted(f.terms, key=monomial_sort_key)):
        out.append(format_term(f.algebra, mono, f.terms[mono], k == 0))
    return "".join(out)


def format_lin(alg, lin) -> str:
    return format_field(FieldExpr(alg, lin))
