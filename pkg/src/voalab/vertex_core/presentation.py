"""Generators and singular OPE tables of freely generated vertex superalgebras."""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from ..scalars import RatFuncL

if TYPE_CHECKING:  # pragma: no cover
    from .engine import Engine
    from .fieldexpr import FieldExpr

Letter = tuple[int, int]  # (generator index, derivative order)
Monomial = tuple[Letter, ...]
Lin = dict  # Monomial -> RatFuncL, never containing zero coefficients

VACUUM: Monomial = ()


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorInfo:
    name: str
    weight: Fraction
    parity: int  # 0 even, 1 odd
    charge: Fraction = Fraction(0)
    filtered: bool = False

    @property
    def is_odd(self) -> bool:
        return self.parity == 1


class AlgebraPresentation:
    """A freely generated vertex superalgebra given by its singular OPE table.

    ``ope`` maps ``(i, j, n)`` (generator indices, ``n >= 0``) to a linear
    combination of normal monomials.  Entries that are not stored but whose
    mirror ``(j, i, .)`` is stored are derived by skew-symmetry on demand.
    """

    def __init__(self, name: str, generators, ope: dict, *, source_order=None):
        self.name = name
        self.generators: tuple[GeneratorInfo, ...] = tuple(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise PresentationError(f"duplicate generator names in {names}")
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        self.ope: dict[tuple[int, int, int], Lin] = {k: dict(v) for k, v in ope.items() if v}
        # remember the pairs that were given explicitly (even if all zero)
        self.stored_pairs = set((i, j) for (i, j, _) in ope)
        if source_order is not None:
            self.stored_pairs |= set(source_order)
        self._gen_weight = [g.weight for g in self.generators]
        self._engine = None
        self._lock = threading.Lock()
        self._specialized: dict = {}
        self.specialized_at = None
        for (i, j, n), val in self.ope.items():
            if n < 0:
                raise PresentationError("OPE entries need n >= 0")
            bound = self._gen_weight[i] + self._gen_weight[j]
            if n >= bound:
                raise PresentationError(
                    f"entry {names[i]} {names[j]} {n} violates the locality bound n < {bound}"
                )

    # basic data
    def __repr__(self):
        return f"AlgebraPresentation({self.name!r}, {[g.name for g in self.generators]})"

    def gen(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise PresentationError(f"unknown generator {name!r}") from None

    def weight_of_letter(self, letter: Letter) -> Fraction:
        return self._gen_weight[letter[0]] + letter[1]

    def weight(self, mono: Monomial) -> Fraction:
        w = Fraction(0)
        for g, d in mono:
            w += self._gen_weight[g] + d
        return w

    def charge(self, mono: Monomial) -> Fraction:
        c = Fraction(0)
        for g, _ in mono:
            c += self.generators[g].charge
        return c

    def parity(self, mono: Monomial) -> int:
        p = 0
        for g, _ in mono:
            p ^= self.generators[g].parity
        return p

    def degree(self, mono: Monomial) -> int:
        return sum(1 for g, _ in mono if self.generators[g].filtered)

    @property
    def engine(self) -> "Engine":
        if self._engine is None:
            with self._lock:
                if self._engine is None:
                    from .engine import Engine

                    self._engine = Engine(self)
        return self._engine

    # fields
    def field(self, terms: Lin) -> "FieldExpr":
        from .fieldexpr import FieldExpr

        return FieldExpr(self, terms)

    def generator_field(self, name: str, d: int = 0) -> "FieldExpr":
        return self.field({((self.gen(name), d),): RatFuncL(1)})

    def vacuum(self) -> "FieldExpr":
        return self.field({VACUUM: RatFuncL(1)})

    def __getitem__(self, name: str) -> "FieldExpr":
        return self.generator_field(name)

    # specialisation
    def specialize(self, value) -> "AlgebraPresentation":
        """The same presentation with l replaced by an exact rational."""
        value = Fraction(value)
        if self.specialized_at is not None:
            raise PresentationError("presentation is already specialised")
        with self._lock:
            alg = self._specialized.get(value)
            if alg is None:
                ope = {
                    k: {m: c for m, c in ((m, RatFuncL(c.specialize(value))) for m, c in v.items()) if c}
                    for k, v in self.ope.items()
                }
                alg = AlgebraPresentation(
                    self.name, self.generators, ope, source_order=self.stored_pairs
                )
                alg.specialized_at = value
                alg.parent = self
                self._specialized[value] = alg
        return alg

    def fingerprint(self) -> str:
        from .algfile import dump_algebra

        text = dump_algebra(self)
        if self.specialized_at is not None:
            text += f"# l = {self.specialized_at}\n"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def tensor(a: AlgebraPresentation, b: AlgebraPresentation, name: str | None = None) -> AlgebraPresentation:
    """Tensor product: union of generators, vanishing cross OPEs."""
    clash = set(a.index) & set(b.index)
    if clash:
        raise PresentationError(f"generator names clash: {sorted(clash)}")
    if a.specialized_at != b.specialized_at:
        raise PresentationError("cannot tensor presentations specialised at different levels")
    shift = len(a.generators)
    ope = dict(a.ope)
    for (i, j, n), val in b.ope.items():
        ope[(i + shift, j + shift, n)] = {
            tuple((g + shift, d) for g, d in mono): c for mono, c in val.items()
        }
    pairs = set(a.stored_pairs) | {(i + shift, j + shift) for i, j in b.stored_pairs}
    alg = AlgebraPresentation(name or f"{a.name}*{b.name}", a.generators + b.generators, ope, source_order=pairs)
    alg.specialized_at = a.specialized_at
    alg.factors = (a, b)
    return alg
