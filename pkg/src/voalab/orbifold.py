"""Charge-zero fields of W^l: the C_n invariant, relation search and coset corrections."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Sequence

from .algebras import Catalog, bp_algebra, catalog, data_text
from .scalars import L, ONE, ZERO, PolyL, RatFuncL, format_ratfunc, parse_ratfunc, poly_from_coeffs, solve_linear
from .vertex_core import AlgebraPresentation, FieldExpr, weight_basis
from .vertex_core.engine import lin_add
from .vertex_core.grammar import format_scaled

__all__ = [
    "GeneratorSet",
    "Word",
    "Expression",
    "ExpressionFailure",
    "DecouplingResult",
    "CorrectionResult",
    "u_field",
    "standard_generators",
    "cn_coefficients",
    "cn_closed_form",
    "telescoping_terms",
    "telescoping_formulas",
    "express_in_generators",
    "relation_source",
    "solve_decoupling",
    "solve_correction",
    "commutant_check",
    "CORRECTION_QUADRATICS",
    "divides_allowed",
    "parse_word_terms",
    "weight8_comparison",
]


def u_field(alg: AlgebraPresentation, i: int, j: int) -> FieldExpr:
    """U_{i,j} = :(d^i G+)(d^j G-):."""
    return catalog(alg)[f"U_{{{i},{j}}}"]


# -- generator sets and words ---------------------------------------------


@dataclass
class GeneratorSet:
    """Named homogeneous fields used as letters of normally ordered polynomials."""

    algebra: AlgebraPresentation
    names: list[str]
    fields: list[FieldExpr]
    weights: list[Fraction]
    degrees: list[int]

    @classmethod
    def build(cls, alg: AlgebraPresentation, names: Sequence[str]) -> "GeneratorSet":
        cat = catalog(alg)
        fields, weights, degrees = [], [], []
        for n in names:
            f = alg[n] if n in alg.index else cat[n]
            if f.is_zero():
                raise ValueError(f"generator {n} is zero")
            if f.charges() != {Fraction(0)}:
                raise ValueError(f"generator {n} does not have charge 0")
            fields.append(f)
            weights.append(f.weight())
            degrees.append(f.degree())
        return cls(alg, list(names), fields, weights, degrees)


def standard_generators(alg: AlgebraPresentation, top: int) -> GeneratorSet:
    """{T, J, U_{0,0}, ..., U_{0,top}} in that order."""
    return GeneratorSet.build(alg, ["T", "J"] + [f"U_{{0,{m}}}" for m in range(top + 1)])


Word = tuple  # tuple of (generator position, derivative order)


def _word_text(gens: GeneratorSet, word: Word) -> str:
    parts = []
    for g, d in word:
        name = gens.names[g]
        if d == 0:
            parts.append(name)
        elif len(word) == 1:
            parts.append(f"d {name}" if d == 1 else f"d^{d} {name}")
        else:
            parts.append(f"(d {name})" if d == 1 else f"(d^{d} {name})")
    if len(word) == 1:
        return parts[0]
    return ":" + " ".join(parts) + ":"


def enumerate_words(gens: GeneratorSet, weight, max_filtration: int, order: Sequence[int] | None = None) -> list[Word]:
    """Normally ordered words of the given weight.

    Letters follow ``order`` (positions into ``gens``; default: as listed),
    derivative orders are non-increasing within one generator.  Words are
    listed by (filtration degree, letters).
    """
    weight = Fraction(weight)
    order = list(order) if order is not None else list(range(len(gens.names)))
    rank = {g: r for r, g in enumerate(order)}
    letters = []
    for g in order:
        top = floor(weight - gens.weights[g])
        letters.extend((g, d) for d in range(top, -1, -1))
    out = []

    def rec(start, w, deg, acc):
        if w == weight:
            out.append(tuple(acc))
            return
        for k in range(start, len(letters)):
            g, d = letters[k]
            lw = gens.weights[g] + d
            nd = deg + gens.degrees[g]
            if w + lw > weight or nd > max_filtration:
                continue
            acc.append((g, d))
            rec(k, w + lw, nd, acc)
            acc.pop()

    rec(0, Fraction(0), 0, [])
    out.sort(key=lambda wd: (sum(gens.degrees[g] for g, _ in wd), len(wd), [(rank[g], -d) for g, d in wd]))
    return out


def word_field(gens: GeneratorSet, word: Word, _cache: dict | None = None) -> FieldExpr:
    """Right-nested Wick product of the derivatives of generators in ``word``."""
    if _cache is not None and word in _cache:
        return _cache[word]
    g, d = word[-1]
    f = gens.fields[g].derivative(d) if d else gens.fields[g]
    for g, d in reversed(word[:-1]):
        x = gens.fields[g].derivative(d) if d else gens.fields[g]
        f = x.wick(f)
    if _cache is not None:
        _cache[word] = f
    return f


@dataclass
class Expression:
    """A normally ordered polynomial sum(coefficient * word) over a generator set."""

    gens: GeneratorSet
    terms: dict  # Word -> RatFuncL
    nullity: int = 0

    def coeff_of(self, name: str, d: int = 0) -> RatFuncL:
        g = self.gens.names.index(name)
        return self.terms.get(((g, d),), ZERO)

    def evaluate(self) -> FieldExpr:
        acc: dict = {}
        for w, c in self.terms.items():
            lin_add(acc, word_field(self.gens, w).terms, c)
        return FieldExpr(self.gens.algebra, acc)

    def text(self) -> str:
        out = [format_scaled(c, _word_text(self.gens, w), k == 0) for k, (w, c) in enumerate(self.terms.items())]
        return "".join(out) if out else "0"

    def word_texts(self) -> dict[str, RatFuncL]:
        return {_word_text(self.gens, w): c for w, c in self.terms.items()}

    def __str__(self):
        return self.text()


@dataclass
class ExpressionFailure:
    """No combination of words reproduces the target.

    ``functional`` is a linear form on normal monomials that vanishes on every
    candidate word but not on the target; ``value`` is its value on the target.
    """

    gens: GeneratorSet
    functional: dict
    value: RatFuncL
    rank: int
    ncols: int

    def __bool__(self):
        return False


def express_in_generators(
    omega: FieldExpr,
    gens: GeneratorSet,
    max_filtration: int = 2,
    order: Sequence[int] | None = None,
    method: str = "sparse",
) -> Expression | ExpressionFailure:
    """Write ``omega`` as a normally ordered polynomial in ``gens``."""
    alg = omega.algebra
    if omega.is_zero():
        return Expression(gens, {})
    w = omega.weight()
    if omega.charges() != {Fraction(0)}:
        raise ValueError("express_in_generators needs a charge-0 field")
    words = enumerate_words(gens, w, max_filtration, order)
    cache: dict = {}
    cols = [word_field(gens, wd, cache) for wd in words]
    row_of: dict = {}
    rows: list[dict] = []
    for j, f in enumerate(cols):
        for m, c in f.terms.items():
            r = row_of.get(m)
            if r is None:
                r = row_of[m] = len(rows)
                rows.append({})
            rows[r][j] = c
    rhs = [ZERO] * len(rows)
    for m, c in omega.terms.items():
        r = row_of.get(m)
        if r is None:
            r = row_of[m] = len(rows)
            rows.append({})
            rhs.append(ZERO)
        rhs[r] = c
    ncols = len(words)
    sol = solve_linear(rows, rhs, method=method, ncols=ncols) if rows else None
    if sol is None or not sol.consistent:
        inv = {r: m for m, r in row_of.items()}
        cert = sol.certificate if sol is not None else ()
        func = {inv[r]: c for r, c in enumerate(cert) if c}
        val = ZERO
        for m, c in func.items():
            val = val + c * omega.coeff(m)
        return ExpressionFailure(gens, func, val, sol.rank if sol else 0, ncols)
    terms = {wd: sol.solution[j] for j, wd in enumerate(words) if sol.solution[j]}
    nullity = ncols - sol.rank
    return Expression(gens, terms, nullity)


# -- the C_n invariant ------------------------------------------------------


def _check_cn_input(omega: FieldExpr, n: int) -> None:
    alg = omega.algebra
    if omega.is_zero():
        return
    if omega.weights() != {Fraction(n + 7)}:
        raise ValueError(f"C_{n} needs a field of weight {n + 7}, got {sorted(omega.weights())}")
    if omega.charges() != {Fraction(0)}:
        raise ValueError("C_n needs a charge-0 field")
    if omega.degree() > 2:
        raise ValueError("C_n needs filtration degree at most 2")


def cn_coefficients(omega: FieldExpr, n: int) -> tuple[list[RatFuncL], RatFuncL]:
    """(C_{n,0..n+4}, C_n): coefficients of :(d^i G+)(d^{n+4-i} G-): and their alternating sum."""
    if n < 0:
        raise ValueError("n must be non-negative")
    _check_cn_input(omega, n)
    alg = omega.algebra
    gp, gm = alg.gen("G+"), alg.gen("G-")
    table = [omega.coeff(((gp, i), (gm, n + 4 - i))) for i in range(n + 5)]
    total = ZERO
    for i, c in enumerate(table):
        total = total + c if i % 2 == 0 else total - c
    return table, total


def relation_source(alg: AlgebraPresentation, n: int) -> FieldExpr:
    """:U_{0,0} U_{1,n}: - :U_{0,n} U_{1,0}:."""
    return u_field(alg, 0, 0).wick(u_field(alg, 1, n)) - u_field(alg, 0, n).wick(u_field(alg, 1, 0))


def telescoping_terms(n: int, alg: AlgebraPresentation | None = None) -> dict:
    """The reassociation and reordering defects of the weight n+7 relation source.

    Returns ``{"terms": [D1, D2, D3, D4], "vanishing": D0, "tables": [C^1..C^4]}``
    where D0 is the difference with no bilinear G+G- contribution and each
    table lists C^i_{n,j} for j = 0..n+4.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    alg = alg or bp_algebra()
    eng = alg.engine
    gp, gm = alg.gen("G+"), alg.gen("G-")
    a = (gp, 0)
    b = (gm, 0)
    dp = (gp, 1)
    dn = (gm, n)

    def word(*letters):
        return FieldExpr(alg, eng.normalize_word(letters))

    U00 = u_field(alg, 0, 0)
    U1n = u_field(alg, 1, n)
    U0n = u_field(alg, 0, n)
    U10 = u_field(alg, 1, 0)
    d1 = U00.wick(U1n) - word(a, b, dp, dn)
    d2 = word(a, b, dp, dn) - word(a, b, dn, dp)
    d0 = word(a, b, dn, dp) - word(a, dn, b, dp)
    d3 = word(a, dn, b, dp) - word(a, dn, dp, b)
    d4 = word(a, dn, dp, b) - U0n.wick(U10)
    terms = [d1, d2, d3, d4]
    tables = [cn_coefficients(t, n)[0] for t in terms]
    return {"terms": terms, "vanishing": d0, "tables": tables}


def _r(x) -> RatFuncL:
    return x if isinstance(x, RatFuncL) else RatFuncL(x)


def telescoping_formulas(n: int) -> list[dict[int, list[RatFuncL]]]:
    """Closed forms for C^i_{n,j}, i = 1..4.

    Each table maps j to the list of closed forms that apply to that j; for
    small n the generic and the tail formulas can both apply to one index.
    """
    from math import factorial

    l = L
    N = RatFuncL(n)
    s = 3 + 10 * l + 6 * N + 4 * l * N
    t1: dict[int, list] = {}
    t2: dict[int, list] = {}
    t3: dict[int, list] = {}
    t4: dict[int, list] = {}

    def put(t, j, v):
        t.setdefault(j, []).append(_r(v))

    put(t1, 0, 0)
    put(t1, 1, (3 + 2 * l) * (4 + 4 * l + N + 2 * l * N) / (4 * (2 + N) * (3 + N)))
    put(t1, 2, -3 * (3 + 2 * l) / (4 * (N + 2)))
    put(t1, 3, (3 + 2 * l) / (2 * N + 2) - s / (12 * (1 + N)))
    put(t1, 4, -(3 + 2 * l) * (5 + 6 * l) / 48 - s / 48)
    for j in range(5, n + 1):
        put(t1, j, -s * factorial(n) / (2 * factorial(n + 4 - j) * factorial(j)))
    put(t1, n + 1, -s / (12 * (1 + N)))
    put(t1, n + 2, -s / (4 * (1 + N) * (2 + N)))
    put(t1, n + 3, -s / (2 * (1 + N) * (2 + N) * (3 + N)))
    put(t1, n + 4, -3 * (5 + 2 * l + 2 * N) / ((1 + N) * (2 + N) * (3 + N) * (4 + N)))

    q = (1 + N) * (2 + N) * (3 + N) * (4 + N)
    put(t2, 0, (18 - 4 * l + 3 * N + 2 * l * N) / (2 * q))
    for j in range(1, n + 1):
        put(t2, j, RatFuncL(Fraction(-6 * factorial(n), factorial(n + 4 - j) * factorial(j))))
    put(t2, n + 1, -ONE / (1 + N))
    put(t2, n + 2, -3 / ((1 + N) * (2 + N)))
    put(t2, n + 3, -6 / ((1 + N) * (2 + N) * (3 + N)))
    put(t2, n + 4, -(-15 - 2 * l - 6 * N + 4 * l * N) / (2 * q))

    put(t3, 0, -(18 - 4 * l + 3 * N + 2 * l * N) / (2 * q))
    put(t3, 1, 6 / ((1 + N) * (2 + N) * (3 + N)))
    put(t3, 2, 3 / ((1 + N) * (2 + N)))
    put(t3, 3, ONE / (1 + N))
    put(t3, 4, -RatFuncL(Fraction(5, 16)) - l / 24)
    for j in range(5, n + 5):
        put(t3, j, 0)

    sign = (-1) ** n
    put(t4, 0, 0)
    put(
        t4,
        1,
        -3 * (4 + N) / (4 * (2 + N) * (3 + N)) + l * (-30 - 10 * N + N * N) / (6 * (2 + N) * (3 + N)) - l * l / 3,
    )
    put(t4, 2, 3 * (6 + 4 * l - N + 2 * l * N) / (8 * (2 + N)))
    put(t4, 3, -1)
    for j in range(4, n + 3):
        put(t4, j, 0)
    put(t4, n + 3, -sign * (3 + 2 * l) / (4 * (3 + N)))
    poly = (
        45 + 40 * l + 12 * l * l + 25 * N + 47 * l * N + 22 * l * l * N + 14 * l * N * N
        + 12 * l * l * N * N - N**3 + l * N**3 + 2 * l * l * N**3
    )
    put(t4, n + 4, sign * poly / (2 * q))
    return [t1, t2, t3, t4]


def cn_closed_form(n: int) -> RatFuncL:
    """n(n+7)/(4!(n+3)(n+4)) l(2l-1)."""
    return RatFuncL(Fraction(n * (n + 7), 24 * (n + 3) * (n + 4))) * L * (2 * L - 1)


def parse_word_terms(text: str) -> dict[str, RatFuncL]:
    """Read ``+/- [coefficient*]word`` lines into {word text: coefficient}.

    Blank lines and ``#`` comments are skipped.  Words are kept as text with
    single spaces so they can be matched against ``Expression.word_texts``.
    """
    out: dict[str, RatFuncL] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sign = ONE
        if line[0] in "+-":
            sign = ONE if line[0] == "+" else -ONE
            line = line[1:].strip()
        # words never contain '*', so the last one separates the coefficient
        head, star, word = line.rpartition("*")
        coef = parse_ratfunc(head) if star else ONE
        key = " ".join(word.split())
        out[key] = out.get(key, ZERO) + sign * coef
    return out


def weight8_comparison(result: "DecouplingResult | None" = None) -> dict:
    """Compare the weight-8 relation with the shipped transcription, word by word.

    The transcription reads source + rest = 0, so every listed word must carry
    minus the solver's coefficient.  Returns {"matched", "mismatched",
    "missing", "extra"}; mismatched maps a word to (listed, computed).
    """
    text = data_text("weight8_relation.txt")
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    listed = parse_word_terms("\n".join(body[1:]))
    res = result or solve_decoupling(1, reduce=False)
    computed = {k: -c for k, c in res.remainder.word_texts().items()}
    computed[res.target] = -res.leading_coefficient
    report = {"matched": [], "mismatched": {}, "missing": [], "extra": []}
    for k, c in listed.items():
        if k not in computed:
            report["missing"].append(k)
        elif computed[k] == c:
            report["matched"].append(k)
        else:
            report["mismatched"][k] = (c, computed[k])
    report["extra"] = [k for k in computed if k not in listed]
    return report


# -- decoupling relations ----------------------------------------------------


@dataclass
class DecouplingResult:
    n: int
    source: FieldExpr
    target: str
    leading_coefficient: RatFuncL
    remainder: Expression | None
    cn: RatFuncL
    reduced: "GenTree | None" = None
    decoupled: bool = True
    note: str = ""

    def verify(self) -> bool:
        """source == leading * target + remainder, exactly."""
        if not self.decoupled or self.remainder is None:
            return False
        alg = self.source.algebra
        tgt = catalog(alg)[self.target]
        return self.source == tgt * self.leading_coefficient + self.remainder.evaluate()

    def verify_reduced(self) -> bool:
        if self.reduced is None:
            return False
        alg = self.source.algebra
        return self.reduced.evaluate(alg) == catalog(alg)[self.target]


class GenTree:
    """Normally ordered expression tree over named generators.

    Nodes: ("gen", name), ("d", k, node), ("wick", a, b), ("sum", [(coef, node), ...]).
    """

    def __init__(self, node):
        self.node = node

    @staticmethod
    def gen(name):
        return GenTree(("gen", name))

    def names(self) -> set[str]:
        out = set()

        def walk(nd):
            if nd[0] == "gen":
                out.add(nd[1])
            elif nd[0] == "d":
                walk(nd[2])
            elif nd[0] == "wick":
                walk(nd[1])
                walk(nd[2])
            else:
                for _, x in nd[1]:
                    walk(x)

        walk(self.node)
        return out

    def evaluate(self, alg: AlgebraPresentation, memo: dict | None = None) -> FieldExpr:
        cat = catalog(alg)
        memo = {} if memo is None else memo

        def ev(nd):
            key = id(nd)
            if key in memo:
                return memo[key][1]
            kind = nd[0]
            if kind == "gen":
                v = alg[nd[1]] if nd[1] in alg.index else cat[nd[1]]
            elif kind == "d":
                v = ev(nd[2]).derivative(nd[1])
            elif kind == "wick":
                v = ev(nd[1]).wick(ev(nd[2]))
            else:
                acc: dict = {}
                for c, x in nd[1]:
                    lin_add(acc, ev(x).terms, c)
                v = FieldExpr(alg, acc)
            memo[key] = (nd, v)
            return v

        return ev(self.node)


def _word_tree(gens: GeneratorSet, word: Word, subst: dict) -> tuple:
    def letter(g, d):
        name = gens.names[g]
        base = subst.get(name, ("gen", name))
        return base if d == 0 else ("d", d, base)

    g, d = word[-1]
    nd = letter(g, d)
    for g, d in reversed(word[:-1]):
        nd = ("wick", letter(g, d), nd)
    return nd


def _source_tree(n: int, subst: dict) -> tuple:
    def u0(m):
        name = f"U_{{0,{m}}}"
        return subst.get(name, ("gen", name))

    def u1(m):  # U_{1,m} = d U_{0,m} - U_{0,m+1}
        return ("sum", [(ONE, ("d", 1, u0(m))), (-ONE, u0(m + 1))])

    return ("sum", [(ONE, ("wick", u0(0), u1(n))), (-ONE, ("wick", u0(n), u1(0)))])


_relations: dict = {}


def solve_decoupling(n: int, ell=None, reduce: bool = True, alg: AlgebraPresentation | None = None) -> DecouplingResult:
    """Decoupling relation for U_{0,n+4} built from the relation source.

    At a specialised level where the leading coefficient vanishes the result
    has ``decoupled = False``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    base = alg or bp_algebra()
    if ell is not None:
        base = base.specialize(ell)
    key = (id(base), n)
    if key in _relations and (not reduce or _relations[key].reduced is not None):
        return _relations[key]
    src = relation_source(base, n)
    _, cn = cn_coefficients(src, n)
    target = f"U_{{0,{n + 4}}}"
    if not cn:
        res = DecouplingResult(n, src, target, ZERO, None, cn, decoupled=False, note="leading coefficient vanishes: no decoupling")
        _relations[key] = res
        return res
    gens = standard_generators(base, n + 4)
    expr = express_in_generators(src, gens, 2)
    if not expr:
        raise RuntimeError(f"no relation found for n = {n}")
    top = gens.names.index(target)
    lead = expr.terms.get(((top, 0),), ZERO)
    rem_terms = {w: c for w, c in expr.terms.items() if w != ((top, 0),)}
    # the remainder must avoid the target entirely
    if any(g == top for w in rem_terms for g, _ in w):
        raise RuntimeError("remainder involves the target generator")
    rem = Expression(gens, rem_terms, expr.nullity)
    res = DecouplingResult(n, src, target, lead, rem, cn)
    if reduce:
        subst = {}
        for m in range(5, n + 4):
            prev = solve_decoupling(m - 4, ell, reduce=True, alg=alg)
            subst[f"U_{{0,{m}}}"] = prev.reduced.node
        inv = ONE / lead
        parts = [(inv, _source_tree(n, subst))]
        for w, c in rem_terms.items():
            parts.append((-c * inv, _word_tree(gens, w, subst)))
        res.reduced = GenTree(("sum", parts))
    _relations[key] = res
    return res


# -- commutant corrections ---------------------------------------------------

CORRECTION_QUADRATICS = [
    (60, -104, -51),
    (28, -104, -107),
    (4, -20, -23),
    (24, -22, 9),
    (84, -220, -183),
    (6, -29, -33),
    (60, -52, 27),
    (132, -832, -1017),
]


def _allowed_factors() -> list[PolyL]:
    out = [PolyL([0, 1])]
    for a, b, c in CORRECTION_QUADRATICS:
        p = poly_from_coeffs([c, b, a])
        out.append(p * (1 / p.leading_coefficient()))
    return out


def divides_allowed(factor: PolyL) -> bool:
    """True when a monic irreducible factor is l or one of the eight quadratics."""
    f = factor * (1 / factor.leading_coefficient())
    return any(f == g for g in _allowed_factors())


@dataclass
class CorrectionResult:
    i: int
    omega: FieldExpr
    corrected: FieldExpr
    denominators: list[PolyL]
    nullity: int
    unknowns: int
    equations: int

    @property
    def unique(self) -> bool:
        return self.nullity == 0

    def denominators_allowed(self) -> bool:
        return all(divides_allowed(f) for f in self.denominators)


def commutant_check(v: FieldExpr, h: FieldExpr) -> bool:
    """True iff h o_n v = 0 for every n >= 0 below the weight bound."""
    if v.is_zero():
        return True
    wv = max(v.weights())
    wh = max(h.weights())
    for n in range(0, floor(wv + wh)):
        if not h.nth(v, n).is_zero():
            return False
    return True


def solve_correction(i: int, ell=None, alg: AlgebraPresentation | None = None) -> CorrectionResult:
    """Find omega_i with U_{0,i} + omega_i commuting with J and T^C-primary of weight i+3.

    omega_i is a polynomial in lower generators, so it may still touch the
    bilinear monomials U_{j,i-j} through derivatives.  The normalisation that
    survives this is the alternating sum of those coefficients, which is
    pinned to 1 (its value on U_{0,i}).
    """
    if not 0 <= i:
        raise ValueError("i must be non-negative")
    base = alg or bp_algebra()
    if ell is not None:
        base = base.specialize(ell)
    cat = catalog(base)
    J = base["J"]
    TC = cat["TC"]
    u = u_field(base, 0, i)
    w = i + 3
    basis = weight_basis(base, w, 0, max_degree=2)
    col_of = {m: k for k, m in enumerate(basis)}
    # J o_n X = 0 (n >= 0), TC o_1 X = w X, TC o_n X = 0 (n >= 2)
    eqs_rows: dict = {}
    rows: list[dict] = []
    rhs: list[RatFuncL] = []
    for col, m in enumerate(basis):
        x = FieldExpr(base, {m: ONE})
        conds = [(("J", n), J.nth(x, n)) for n in range(0, w + 1)]
        conds.append((("T", 1), TC.nth(x, 1) - x * w))
        conds += [(("T", n), TC.nth(x, n)) for n in range(2, w + 2)]
        for tag, f in conds:
            for mono, c in f.terms.items():
                r = eqs_rows.get((tag, mono))
                if r is None:
                    r = eqs_rows[(tag, mono)] = len(rows)
                    rows.append({})
                    rhs.append(ZERO)
                rows[r][col] = rows[r].get(col, ZERO) + c
    norm = {}
    for j in range(i + 1):
        mono = next(iter(u_field(base, j, i - j).terms))
        norm[col_of[mono]] = RatFuncL((-1) ** j)
    rows.append(norm)
    rhs.append(ONE)
    ncols = len(basis)
    sol = solve_linear(rows, rhs, ncols=ncols)
    if not sol.consistent:
        raise RuntimeError(f"correction system for i = {i} is inconsistent")
    nullity = ncols - sol.rank
    corrected = FieldExpr(base, {m: v for m, v in zip(basis, sol.solution) if v})
    omega = corrected - u
    factors: list[PolyL] = []
    for c in corrected.terms.values():
        for f in c.denominator_factors():
            if not any(f == g for g in factors):
                factors.append(f)
    factors.sort(key=lambda p: (p.degree(), [str(x) for x in p.coeffs()]))
    res = CorrectionResult(i, omega, corrected, factors, nullity, ncols, len(rows))
    cat.register(f"UC_{{{i}}}", corrected)
    return res
