"""Concrete presentations and the catalogue of named composite fields."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .scalars import L, RatFuncL
from .vertex_core import (
    AlgebraPresentation,
    FieldExpr,
    GeneratorInfo,
    loads_algebra,
    monomial_field,
    parse_field,
    tensor as _tensor,
)

__all__ = [
    "bp_algebra",
    "bc_system",
    "heisenberg",
    "bp_bc_algebra",
    "tensor",
    "power_field",
    "Catalog",
    "catalog",
    "data_text",
    "embed",
]


def data_text(name: str) -> str:
    return resources.files("voalab").joinpath("data", name).read_text()


@lru_cache(maxsize=None)
def bp_algebra() -> AlgebraPresentation:
    """W^l with generators T, J, G+, G- over Q(l)."""
    return loads_algebra(data_text("bp.alg"))


@lru_cache(maxsize=None)
def bc_system() -> AlgebraPresentation:
    return loads_algebra(data_text("bc.alg"))


@lru_cache(maxsize=None)
def heisenberg(level: str = "1") -> AlgebraPresentation:
    text = f"[algebra] heisenberg\n[gen] H 1 even 0\n[ope] H H 1 = {level}\n"
    return loads_algebra(text)


def tensor(a: AlgebraPresentation, b: AlgebraPresentation) -> AlgebraPresentation:
    return _tensor(a, b)


@lru_cache(maxsize=None)
def bp_bc_algebra() -> AlgebraPresentation:
    return _tensor(bp_algebra(), bc_system(), name="bp*bc")


def power_field(alg: AlgebraPresentation, g: str, m: int) -> FieldExpr:
    """Right-nested Wick power :g g ... g: (m factors), normalised."""
    if m < 1:
        raise ValueError("power must be positive")
    idx = alg.gen(g)
    return monomial_field(alg, [(idx, 0)] * m)


def embed(field: FieldExpr, target: AlgebraPresentation) -> FieldExpr:
    """Carry a field into a presentation containing its generators by name."""
    src = field.algebra
    remap = [target.gen(g.name) for g in src.generators]
    terms = {}
    for mono, c in field.terms.items():
        letters = [(remap[g], d) for g, d in mono]
        for m2, c2 in target.engine.normalize_word(letters).items():
            terms[m2] = terms.get(m2, 0) + c * c2
    return FieldExpr(target, terms)


_INDEXED = re.compile(r"^([A-Za-z][A-Za-z0-9]*)_\{(-?\d+(?:,-?\d+)*)\}$")


class Catalog:
    """Named composite fields over a presentation, built on demand.

    Names understood (when the needed generators exist):
    ``U_{i,j}``, ``TH``, ``TC``, ``Gp_{m}``, ``Gm_{m}`` for W^l, and
    ``JE``, ``TE``, ``Jdiag``, ``JD``, ``TD``, ``phi+``, ``phi-``,
    ``phip_{n}``, ``phim_{n}``, ``UD`` for W^l tensored with the bc-system.
    Solved correction fields can be registered under ``UC_{i}``.
    """

    simple_names = ("TH", "TC", "JE", "TE", "Jdiag", "JD", "TD", "phi+", "phi-", "UD")

    def __init__(self, alg: AlgebraPresentation):
        self.alg = alg
        self._cache: dict[str, FieldExpr] = {}
        self._extra: dict[str, FieldExpr] = {}

    def register(self, name: str, field: FieldExpr) -> None:
        self._extra[name] = field

    def names(self) -> list[str]:
        return [n for n in self.simple_names] + list(self._extra)

    def __call__(self, name: str):
        return self.get(name)

    def get(self, name: str) -> FieldExpr | None:
        if name in self._extra:
            return self._extra[name]
        if name in self._cache:
            return self._cache[name]
        val = self._build(name)
        if val is not None:
            self._cache[name] = val
        return val

    def __getitem__(self, name: str) -> FieldExpr:
        val = self.get(name)
        if val is None:
            raise KeyError(name)
        return val

    def parse(self, text: str) -> FieldExpr:
        return parse_field(text, self.alg, self.get, extra_names=self.names())

    def _has(self, *gens) -> bool:
        return all(g in self.alg.index for g in gens)

    def _letter(self, g, d=0):
        return (self.alg.gen(g), d)

    def _coef(self, x) -> RatFuncL:
        if self.alg.specialized_at is not None:
            return RatFuncL(x.specialize(self.alg.specialized_at)) if isinstance(x, RatFuncL) else RatFuncL(x)
        return x if isinstance(x, RatFuncL) else RatFuncL(x)

    def _build(self, name: str) -> FieldExpr | None:
        alg = self.alg
        m = _INDEXED.match(name)
        if m:
            base = m.group(1)
            idx = [int(t) for t in m.group(2).split(",")]
            if base == "U" and len(idx) == 2 and self._has("G+", "G-"):
                i, j = idx
                return monomial_field(alg, [self._letter("G+", i), self._letter("G-", j)])
            if base in ("Gp", "Gm") and len(idx) == 1 and self._has("G+"):
                return power_field(alg, "G+" if base == "Gp" else "G-", idx[0])
            if base in ("phip", "phim") and len(idx) == 1 and self._has("b", "G+"):
                if base == "phip":
                    return monomial_field(alg, [self._letter("b"), self._letter("G+", idx[0])])
                return monomial_field(alg, [self._letter("c"), self._letter("G-", idx[0])])
            return None
        if name == "TH" and self._has("J"):
            J = alg["J"]
            return J.wick(J) * self._coef(RatFuncL(3) / (4 * L))
        if name == "TC" and self._has("T", "J"):
            return alg["T"] - self["TH"]
        if name == "JE" and self._has("b", "c"):
            return -alg["b"].wick(alg["c"])
        if name == "TE" and self._has("b", "c"):
            # weight-1/2 normalisation: central charge 1, b and c primary of weight 1/2
            b, c = alg["b"], alg["c"]
            return (b.derivative().wick(c) - b.wick(c.derivative())) * self._coef(RatFuncL(1, 2))
        if name == "Jdiag" and self._has("J", "b"):
            return alg["J"] + self["JE"]
        if name == "JD" and self._has("J", "b"):
            return alg["J"] - self["JE"] * self._coef(2 * L / 3)
        if name == "TD" and self._has("T", "b"):
            jd = self["Jdiag"]
            return alg["T"] + self["TE"] - jd.wick(jd) * self._coef(RatFuncL(3) / (2 * (3 + 2 * L)))
        if name == "phi+" and self._has("b", "G+"):
            return self["phip_{0}"]
        if name == "phi-" and self._has("c", "G-"):
            return self["phim_{0}"]
        if name == "UD" and self._has("b", "G+"):
            from .orbifold import solve_correction

            home = bp_algebra()
            if alg.specialized_at is not None:
                home = home.specialize(alg.specialized_at)
            return embed(solve_correction(0, alg=home).corrected, alg)
        return None


_catalogs: dict[int, Catalog] = {}


def catalog(alg: AlgebraPresentation) -> Catalog:
    cat = _catalogs.get(id(alg))
    if cat is None or cat.alg is not alg:
        cat = Catalog(alg)
        _catalogs[id(alg)] = cat
    return cat
