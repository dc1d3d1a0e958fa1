"""Exact linear systems over Q(l).

The default path clears denominators row by row and then runs sparse
fraction-free elimination on polynomial rows, dividing every new row by
its polynomial content.  A dense Bareiss path is available for
cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import flint

from .ratfunc import ONE, ZERO, PolyL, RatFuncL

__all__ = ["LinearSolution", "solve_linear"]


@dataclass(frozen=True)
class LinearSolution:
    rank: int
    consistent: bool
    solution: tuple[RatFuncL, ...] | None
    nullspace: tuple[tuple[RatFuncL, ...], ...] = ()
    pivots: tuple[int, ...] = ()
    # when inconsistent: multipliers y with y^T A = 0 and y^T b != 0
    certificate: tuple[RatFuncL, ...] | None = None

    @property
    def unique(self) -> bool:
        return self.consistent and not self.nullspace


def _poly_content_gcd(polys):
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p if g is None else g.gcd(p)
        if g.degree() == 0:
            break
    return g


def _clear_row(row: dict[int, RatFuncL]) -> dict[int, PolyL]:
    """Scale a row of rational functions to a primitive polynomial row."""
    den = None
    for v in row.values():
        den = v.den if den is None else (den * v.den) // den.gcd(v.den)
    out = {}
    for j, v in row.items():
        out[j] = v.num * (den // v.den)
    return _primitive(out)


def _primitive(row: dict[int, PolyL]) -> dict[int, PolyL]:
    if not row:
        return row
    g = _poly_content_gcd(row.values())
    # normalise to a monic content so that rows are canonical up to units
    lead = row[min(row)]
    scale = g if g is not None else PolyL([1])
    if not scale.is_one() or lead.leading_coefficient() != 1:
        if scale.degree() == 0:
            inv = 1 / lead.leading_coefficient()
            return {j: p * inv for j, p in row.items()}
        out = {j: p // scale for j, p in row.items()}
        inv = 1 / out[min(out)].leading_coefficient()
        return {j: p * inv for j, p in out.items()}
    return row


def solve_linear(
    matrix: Sequence[Sequence], rhs: Sequence | None = None, *, method: str = "sparse", ncols: int | None = None
) -> LinearSolution:
    """Solve ``matrix @ x = rhs`` exactly.

    ``matrix`` may be a list of dense rows or of ``{column: value}`` dicts
    (then ``ncols`` is inferred from the largest index seen).  Returns rank,
    a particular solution with free variables set to zero and a nullspace
    basis, or an inconsistency certificate.
    """
    rows, seen = _normalise_input(matrix)
    ncols = max(seen, ncols or 0)
    if rhs is None:
        rhs = [ZERO] * len(rows)
    rhs = [v if isinstance(v, RatFuncL) else RatFuncL(v) for v in rhs]
    if len(rhs) != len(rows):
        raise ValueError("rhs length does not match the number of rows")
    if method == "sparse":
        return _solve_sparse(rows, rhs, ncols)
    if method == "bareiss":
        return _solve_bareiss(rows, rhs, ncols)
    raise ValueError(f"unknown method {method!r}")


def _normalise_input(matrix):
    rows = []
    ncols = 0
    for r in matrix:
        if isinstance(r, dict):
            d = {j: (v if isinstance(v, RatFuncL) else RatFuncL(v)) for j, v in r.items() if v}
            if r:
                ncols = max(ncols, max(r) + 1)
        else:
            d = {}
            for j, v in enumerate(r):
                if v:
                    d[j] = v if isinstance(v, RatFuncL) else RatFuncL(v)
            ncols = max(ncols, len(r))
        rows.append(d)
    return rows, ncols


def _solve_sparse(rows, rhs, ncols, track: bool = False) -> LinearSolution:
    # augmented column index ncols carries the right-hand side; with track set,
    # a tag column per row records the row combination for the certificate
    m = len(rows)
    work = []
    for i, (r, b) in enumerate(zip(rows, rhs)):
        aug = dict(r)
        if b:
            aug[ncols] = b
        if track:
            aug[ncols + 1 + i] = ONE
        if aug:
            work.append(_clear_row(aug))

    pivots: list[int] = []
    pivot_rows: list[dict[int, PolyL]] = []
    active = work
    for col in range(ncols):
        cands = [(r[col].degree(), idx) for idx, r in enumerate(active) if col in r]
        if not cands:
            continue
        _, pidx = min(cands)
        prow = active[pidx]
        pc = prow[col]
        rest = []
        for idx, r in enumerate(active):
            if idx == pidx:
                continue
            if col not in r:
                rest.append(r)
                continue
            c = r[col]
            g = pc.gcd(c)
            a = pc // g
            bcoef = c // g
            new = {}
            for j in r.keys() | prow.keys():
                v = r.get(j)
                w = prow.get(j)
                if v is None:
                    val = -(bcoef * w)
                elif w is None:
                    val = a * v
                else:
                    val = a * v - bcoef * w
                if not val.is_zero():
                    new[j] = val
            new.pop(col, None)
            if new:
                rest.append(_primitive(new))
        pivots.append(col)
        pivot_rows.append(prow)
        active = rest

    # leftover rows have no structural columns left: check consistency
    for r in active:
        if ncols in r:
            if not track:
                return _solve_sparse(rows, rhs, ncols, track=True)
            cert = [RatFuncL(r.get(ncols + 1 + i, PolyL([]))) for i in range(m)]
            return LinearSolution(
                rank=len(pivots), consistent=False, solution=None, pivots=tuple(pivots), certificate=tuple(cert)
            )

    # back substitution on the echelon rows
    sol: dict[int, RatFuncL] = {}
    free = [j for j in range(ncols) if j not in set(pivots)]

    def back(values: dict[int, RatFuncL], rhs_col: bool, free_col: int | None):
        x = dict(values)
        for col, prow in zip(reversed(pivots), reversed(pivot_rows)):
            acc = ZERO
            if rhs_col and ncols in prow:
                acc = RatFuncL(prow[ncols])
            for j, p in prow.items():
                if j <= col or j >= ncols:
                    continue
                xj = x.get(j)
                if xj:
                    acc = acc - RatFuncL(p) * xj
            x[col] = acc / RatFuncL(prow[col]) if acc else ZERO
        return x

    sol = back({}, True, None)
    solution = tuple(sol.get(j, ZERO) for j in range(ncols))
    null = []
    for f in free:
        vec = back({f: ONE}, False, f)
        null.append(tuple(vec.get(j, ZERO) for j in range(ncols)))
    return LinearSolution(
        rank=len(pivots), consistent=True, solution=solution, nullspace=tuple(null), pivots=tuple(pivots)
    )


def _solve_bareiss(rows, rhs, ncols) -> LinearSolution:
    """Dense one-step Bareiss elimination on the augmented polynomial matrix."""
    m = len(rows)
    width = ncols + 1 + m
    mat = []
    for i, (r, b) in enumerate(zip(rows, rhs)):
        aug = dict(r)
        if b:
            aug[ncols] = b
        aug[ncols + 1 + i] = ONE
        cleared = _clear_row(aug)
        mat.append([cleared.get(j, PolyL([])) for j in range(width)])

    prev = PolyL([1])
    pivots = []
    prow = 0
    for col in range(ncols):
        cands = [(mat[i][col].degree(), i) for i in range(prow, m) if not mat[i][col].is_zero()]
        if not cands:
            continue
        _, piv = min(cands)
        mat[prow], mat[piv] = mat[piv], mat[prow]
        p = mat[prow][col]
        for i in range(prow + 1, m):
            c = mat[i][col]
            for j in range(col, width):
                v = p * mat[i][j] - c * mat[prow][j]
                mat[i][j] = v // prev if not v.is_zero() else v
        prev = p
        pivots.append(col)
        prow += 1
    for i in range(prow, m):
        if not mat[i][ncols].is_zero():
            cert = [RatFuncL(mat[i][ncols + 1 + k]) for k in range(m)]
            return LinearSolution(rank=len(pivots), consistent=False, solution=None, pivots=tuple(pivots), certificate=tuple(cert))

    def back(seed: dict[int, RatFuncL], rhs_col: bool):
        x = dict(seed)
        for k in range(len(pivots) - 1, -1, -1):
            col = pivots[k]
            row = mat[k]
            acc = RatFuncL(row[ncols]) if rhs_col else ZERO
            for j in range(col + 1, ncols):
                if not row[j].is_zero() and x.get(j):
                    acc = acc - RatFuncL(row[j]) * x[j]
            x[col] = acc / RatFuncL(row[col]) if acc else ZERO
        return x

    sol = back({}, True)
    free = [j for j in range(ncols) if j not in set(pivots)]
    null = []
    for f in free:
        v = back({f: ONE}, False)
        null.append(tuple(v.get(j, ZERO) for j in range(ncols)))
    return LinearSolution(
        rank=len(pivots),
        consistent=True,
        solution=tuple(sol.get(j, ZERO) for j in range(ncols)),
        nullspace=tuple(null),
        pivots=tuple(pivots),
    )
