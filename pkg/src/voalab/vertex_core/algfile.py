"""Reading and writing algebra-spec files (``.alg``).

Line-oriented format::

    [algebra] bp
    [gen] J 1 even 0
    [filtered] G+ G-
    [ope] J J 1 = (2*l)/3

Blank lines and lines starting with ``#`` are ignored.  OPE right-hand
sides are written in the expression grammar and must already be in normal
form.  ``dump_algebra`` writes the canonical text, so shipped files
round-trip byte for byte.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .grammar import ExpressionSyntaxError, format_lin, parse_field
from .presentation import AlgebraPresentation, GeneratorInfo, PresentationError

_PARITY = {"even": 0, "odd": 1}


def _fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def loads_algebra(text: str, name: str | None = None) -> AlgebraPresentation:
    alg_name = name
    gens: list[GeneratorInfo] = []
    filtered: set[str] = set()
    ope_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[algebra]"):
            alg_name = line[len("[algebra]") :].strip()
        elif line.startswith("[gen]"):
            parts = line[len("[gen]") :].split()
            if len(parts) not in (3, 4) or parts[2] not in _PARITY:
                raise PresentationError(f"line {lineno}: expected '[gen] name weight parity [charge]'")
            charge = Fraction(parts[3]) if len(parts) == 4 else Fraction(0)
            gens.append(GeneratorInfo(parts[0], Fraction(parts[1]), _PARITY[parts[2]], charge))
        elif line.startswith("[filtered]"):
            filtered |= set(line[len("[filtered]") :].split())
        elif line.startswith("[ope]"):
            ope_lines.append((lineno, line[len("[ope]") :]))
        else:
            raise PresentationError(f"line {lineno}: unrecognised directive {line.split()[0]!r}")
    names = {g.name for g in gens}
    unknown = filtered - names
    if unknown:
        raise PresentationError(f"[filtered] names unknown generators {sorted(unknown)}")
    gens = [GeneratorInfo(g.name, g.weight, g.parity, g.charge, g.name in filtered) for g in gens]
    # a table-free copy is enough to read normal-form right-hand sides
    bare = AlgebraPresentation(alg_name or "algebra", gens, {})
    ope = {}
    pairs = set()
    for lineno, body in ope_lines:
        lhs, sep, rhs = body.partition("=")
        parts = lhs.split()
        if not sep or len(parts) != 3:
            raise PresentationError(f"line {lineno}: expected '[ope] A B n = expression'")
        a, b, n = parts[0], parts[1], int(parts[2])
        i, j = bare.gen(a), bare.gen(b)
        try:
            val = parse_field(rhs.strip(), bare)
        except ExpressionSyntaxError as exc:
            raise PresentationError(f"line {lineno}: {exc}") from None
        if (i, j, n) in ope:
            raise PresentationError(f"line {lineno}: duplicate entry {a} {b} {n}")
        pairs.add((i, j))
        ope[(i, j, n)] = dict(val.terms)
    return AlgebraPresentation(alg_name or "algebra", gens, ope, source_order=pairs)


def load_algebra(path) -> AlgebraPresentation:
    return loads_algebra(Path(path).read_text())


def dump_algebra(alg: AlgebraPresentation) -> str:
    lines = [f"[algebra] {alg.name}"]
    for g in alg.generators:
        parity = "odd" if g.parity else "even"
        lines.append(f"[gen] {g.name} {_fmt_rational(g.weight)} {parity} {_fmt_rational(g.charge)}")
    filt = [g.name for g in alg.generators if g.filtered]
    if filt:
        lines.append("[filtered] " + " ".join(filt))
    for (i, j, n) in sorted(alg.ope, key=lambda k: (k[0], k[1], -k[2])):
        a = alg.generators[i].name
        b = alg.generators[j].name
        lines.append(f"[ope] {a} {b} {n} = {format_lin(alg, alg.ope[(i, j, n)])}")
    return "\n".join(lines) + "\n"


def save_algebra(alg: AlgebraPresentation, path) -> None:
    Path(path).write_text(dump_algebra(alg))
