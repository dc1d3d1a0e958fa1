"""Normal-ordering engine.

Everything here works on plain dictionaries ``{monomial: RatFuncL}``
(``Lin``).  A monomial is a sorted tuple of letters ``(generator, d)``
read as the right-nested Wick product of the letters.  Letters are sorted
by generator index and, within one generator, by non-increasing derivative
order.  The recursion follows the usual rules: derivatives are moved out of
the left factor, generator-on-word products use the Borcherds commutator
formula, composite left factors use the non-commutative Wick formula, and
Wick products of a letter with a word are reordered by quasi-commutativity.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb, factorial, floor
from typing import Iterable

from ..scalars import ONE, RatFuncL
from .presentation import VACUUM, AlgebraPresentation, Letter, Lin, Monomial, PresentationError

_FACT_INV = [Fraction(1, factorial(k)) for k in range(64)]


def lin_add(acc: dict, lin: Lin, c=None) -> None:
    """acc += c * lin, in place (acc must be a private dict)."""
    for m, v in lin.items():
        if c is not None:
            v = v * c
        old = acc.get(m)
        if old is None:
            acc[m] = v
        else:
            s = old + v
            if s:
                acc[m] = s
            else:
                del acc[m]


def lin_scale(lin: Lin, c) -> Lin:
    if c == 1:
        return lin
    if not c:
        return {}
    return {m: v * c for m, v in lin.items()}


def _falling(x: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= x - i
    return out


class Engine:
    """Memoised n-th products on one presentation.

    The caches only ever grow; lookups are lock-free dictionary reads and
    insertions go through a lock, so one engine can serve several threads.
    """

    def __init__(self, alg: AlgebraPresentation, use_cache: bool = True):
        self.alg = alg
        self.gw = [g.weight for g in alg.generators]
        self.par = [g.parity for g in alg.generators]
        self.use_cache = use_cache
        self._lock = threading.Lock()
        self._prod: dict = {}
        self._wl: dict = {}
        self._gp: dict = {}
        self._gl: dict = {}
        self._dm: dict = {}
        self._derived: dict = {}
        self._wt: dict = {(): Fraction(0)}
        self.stats = {"prod_hits": 0, "prod_miss": 0}

    # -- bookkeeping -------------------------------------------------------
    def clear_cache(self) -> None:
        with self._lock:
            for c in (self._prod, self._wl, self._gp, self._gl, self._dm, self._derived):
                c.clear()

    def cache_size(self) -> int:
        return len(self._prod) + len(self._wl) + len(self._gp)

    def _store(self, cache: dict, key, value):
        if self.use_cache:
            with self._lock:
                cache.setdefault(key, value)
        return value

    def weight(self, mono: Monomial) -> Fraction:
        w = self._wt.get(mono)
        if w is None:
            w = Fraction(0)
            for g, d in mono:
                w += self.gw[g] + d
            self._wt[mono] = w
        return w

    def lin_weight_ok(self, wa: Fraction, wb: Fraction, n: int) -> bool:
        return wa + wb - n - 1 >= 0

    def parity(self, mono: Monomial) -> int:
        p = 0
        for g, _ in mono:
            p ^= self.par[g]
        return p

    # -- generator table ---------------------------------------------------
    def table(self, i: int, j: int, n: int) -> Lin:
        """Generator i  o_n  generator j for n >= 0, stored or derived."""
        alg = self.alg
        val = alg.ope.get((i, j, n))
        if val is not None:
            return val
        if (i, j) in alg.stored_pairs or (j, i) not in alg.stored_pairs:
            return {}
        key = (i, j, n)
        got = self._derived.get(key)
        if got is not None:
            return got
        # skew-symmetry from the stored mirror entries
        acc: dict = {}
        sign = -1 if (self.par[i] and self.par[j]) else 1
        top = floor(self.gw[i] + self.gw[j]) - 1
        for k in range(0, top - n + 1):
            src = alg.ope.get((j, i, n + k))
            if not src:
                continue
            c = Fraction(sign * (-1) ** (n + k + 1)) * _FACT_INV[k]
            lin_add(acc, self.deriv_lin(src, k), c)
        return self._store(self._derived, key, acc)

    # -- derivatives -------------------------------------------------------
    def deriv_mono(self, mono: Monomial) -> Lin:
        got = self._dm.get(mono)
        if got is not None:
            return got
        acc: dict = {}
        for pos, (g, d) in enumerate(mono):
            new = (g, d + 1)
            prev = mono[pos - 1] if pos else None
            if prev is None or (prev[0] != g) or (prev[1] > d + 1) or (prev[1] == d + 1 and not self.par[g]):
                word = mono[:pos] + (new,) + mono[pos + 1 :]
                lin_add(acc, {word: ONE})
            else:
                lin = self.wick_letter(new, mono[pos + 1 :])
                for x in reversed(mono[:pos]):
                    lin = self.wick_letter_lin(x, lin)
                lin_add(acc, lin)
        return self._store(self._dm, mono, acc)

    def deriv_lin(self, lin: Lin, k: int = 1) -> Lin:
        for _ in range(k):
            acc: dict = {}
            for m, c in lin.items():
                if m:
                    lin_add(acc, self.deriv_mono(m), c)
            lin = acc
        return lin

    # -- Wick products -----------------------------------------------------
    def wick_letter_lin(self, x: Letter, lin: Lin) -> Lin:
        acc: dict = {}
        for m, c in lin.items():
            lin_add(acc, self.wick_letter(x, m), c)
        return acc

    def wick_letter(self, x: Letter, mono: Monomial) -> Lin:
        """Normal form of :x mono: for a letter x and a normal monomial."""
        if not mono:
            return {(x,): ONE}
        y = mono[0]
        if x[0] < y[0] or (x[0] == y[0] and (x[1] > y[1] or (x[1] == y[1] and not self.par[x[0]]))):
            return {(x,) + mono: ONE}
        key = (x, mono)
        got = self._wl.get(key)
        if got is not None:
            return got
        rest = mono[1:]
        acc: dict = {}
        # :x:y R:: - p :y:x R:: = sum_j (-1)^j/(j+1)! :(d^{j+1}(x o_j y)) R:
        top = floor(self.gw[x[0]] + x[1] + self.gw[y[0]] + y[1]) - 1
        for j in range(0, top + 1):
            c = self.prod((x,), (y,), j)
            if not c:
                continue
            coef = Fraction((-1) ** j) * _FACT_INV[j + 1]
            for m, v in self.deriv_lin(c, j + 1).items():
                lin_add(acc, self.prod(m, rest, -1), v * coef)
        if x == y:
            # odd letter repeated: 2 :x:xR:: equals the correction
            acc = lin_scale(acc, Fraction(1, 2))
        else:
            sign = -1 if (self.par[x[0]] and self.par[y[0]]) else 1
            inner = self.wick_letter(x, rest)
            for m, v in inner.items():
                lin_add(acc, self.wick_letter(y, m), v * sign if sign < 0 else v)
        return self._store(self._wl, key, acc)

    def normalize_word(self, letters: Iterable[Letter]) -> Lin:
        """Normal form of the right-nested Wick product of arbitrary letters."""
        lin: Lin = {VACUUM: ONE}
        for x in reversed(tuple(letters)):
            lin = self.wick_letter_lin(x, lin)
        return lin

    # -- n-th products -----------------------------------------------------
    def gen_letter(self, g: int, y: Letter, m: int) -> Lin:
        """Generator g  o_m  (d^e h) for m >= 0."""
        h, e = y
        key = (g, y, m)
        got = self._gl.get(key)
        if got is not None:
            return got
        acc: dict = {}
        for i in range(0, min(e, m) + 1):
            base = self.table(g, h, m - i)
            if not base:
                continue
            c = comb(e, i) * _falling(m, i)
            lin_add(acc, self.deriv_lin(base, e - i), c)
        return self._store(self._gl, key, acc)

    def gen_prod(self, g: int, mono: Monomial, m: int) -> Lin:
        """Generator g  o_m  mono for m >= 0 (Borcherds commutator form)."""
        if not mono:
            return {}
        if self.gw[g] + self.weight(mono) - m - 1 < 0:
            return {}
        y = mono[0]
        rest = mono[1:]
        if not rest:
            return self.gen_letter(g, y, m)
        key = (g, mono, m)
        got = self._gp.get(key)
        if got is not None:
            return got
        acc: dict = {}
        for j in range(0, m + 1):
            c = self.gen_letter(g, y, j)
            if not c:
                continue
            b = comb(m, j)
            for mm, v in c.items():
                lin_add(acc, self.prod(mm, rest, m - 1 - j), v * b)
        inner = self.gen_prod(g, rest, m)
        if inner:
            sign = -1 if (self.par[g] and self.par[y[0]]) else 1
            for mm, v in inner.items():
                lin_add(acc, self.wick_letter(y, mm), v if sign > 0 else -v)
        return self._store(self._gp, key, acc)

    def prod(self, a: Monomial, b: Monomial, n: int) -> Lin:
        """Normal form of a o_n b for normal monomials a, b."""
        wa = self.weight(a)
        wb = self.weight(b)
        if wa + wb - n - 1 < 0:
            return {}
        if not a:
            return {b: ONE} if n == -1 else {}
        if not b:
            if n >= 0:
                return {}
            k = -1 - n
            return lin_scale(self.deriv_lin({a: ONE}, k), _FACT_INV[k])
        key = (a, b, n)
        got = self._prod.get(key)
        if got is not None:
            self.stats["prod_hits"] += 1
            return got
        self.stats["prod_miss"] += 1
        if len(a) == 1:
            g, d = a[0]
            if n < 0:
                k = -1 - n
                res = lin_scale(self.wick_letter((g, d + k), b), _FACT_INV[k])
            elif d > n:
                res = {}
            else:
                c = (-1) ** d * _falling(n, d)
                res = lin_scale(self.gen_prod(g, b, n - d), c)
        else:
            res = self._composite_prod(a, b, n, wa, wb)
        return self._store(self._prod, key, res)

    def _composite_prod(self, a: Monomial, c: Monomial, n: int, wa, wc) -> Lin:
        # (:x A':) o_n C = sum_j x o_{-1-j}(A' o_{n+j} C) + p sum_j A' o_{n-1-j}(x o_j C)
        x = a[0]
        ap = a[1:]
        wap = self.weight(ap)
        wx = wa - wap
        acc: dict = {}
        top = floor(wap + wc - n - 1)
        for j in range(0, top + 1):
            inner = self.prod(ap, c, n + j)
            if not inner:
                continue
            xd = (x[0], x[1] + j)
            f = _FACT_INV[j]
            for m, v in inner.items():
                lin_add(acc, self.wick_letter(xd, m), v * f)
        sign = -1 if (self.par[x[0]] and self.parity(ap)) else 1
        top2 = floor(wx + wc) - 1
        for j in range(0, top2 + 1):
            inner = self.prod((x,), c, j)
            if not inner:
                continue
            for m, v in inner.items():
                lin_add(acc, self.prod(ap, m, n - 1 - j), v if sign > 0 else -v)
        return acc

    def prod_lin(self, a: Lin, b: Lin, n: int) -> Lin:
        acc: dict = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                r = self.prod(ma, mb, n)
                if r:
                    lin_add(acc, r, ca * cb)
        return acc

    # -- consistency of the table ------------------------------------------
    def skew_lin(self, a: Lin, b: Lin, n: int, pab: int) -> Lin:
        """b o_n a computed through skew-symmetry from a o_. b."""
        wa = max((self.weight(m) for m in a), default=0)
        wb = max((self.weight(m) for m in b), default=0)
        acc: dict = {}
        top = floor(wa + wb) - 1
        for j in range(0, top - n + 1):
            inner = self.prod_lin(a, b, n + j)
            if not inner:
                continue
            c = Fraction(pab * (-1) ** (n + j + 1)) * _FACT_INV[j]
            lin_add(acc, self.deriv_lin(inner, j), c)
        return acc

    def check_skew_pair(self, i: int, j: int) -> list[str]:
        """Compare generator j o_n i with the skew transform of i o_. j."""
        errors = []
        pab = -1 if (self.par[i] and self.par[j]) else 1
        a = {((i, 0),): ONE}
        b = {((j, 0),): ONE}
        top = floor(self.gw[i] + self.gw[j]) - 1
        for n in range(0, top + 1):
            direct = self.prod_lin(b, a, n)
            via = self.skew_lin(a, b, n, pab)
            if direct != via:
                names = self.alg.generators
                errors.append(f"skew-symmetry fails for {names[j].name} o_{n} {names[i].name}")
        return errors

    def check_jacobi_triple(self, i: int, j: int, k: int) -> list[str]:
        """Commutator identity a o_m (b o_n c) - p b o_n (a o_m c) = sum binom (a o_j b) o_{m+n-j} c."""
        errors = []
        a = {((i, 0),): ONE}
        b = {((j, 0),): ONE}
        c = {((k, 0),): ONE}
        p = -1 if (self.par[i] and self.par[j]) else 1
        gw = self.gw
        for m in range(0, floor(gw[i] + gw[j] + gw[k])):
            for n in range(0, floor(gw[i] + gw[j] + gw[k])):
                lhs = dict(self.prod_lin(a, self.prod_lin(b, c, n), m))
                lin_add(lhs, self.prod_lin(b, self.prod_lin(a, c, m), n), -p)
                rhs: dict = {}
                for jj in range(0, m + 1):
                    ab = self.prod_lin(a, b, jj)
                    if ab:
                        lin_add(rhs, self.prod_lin(ab, c, m + n - jj), comb(m, jj))
                if lhs != rhs:
                    g = self.alg.generators
                    errors.append(f"commutator identity fails for ({g[i].name},{g[j].name},{g[k].name}) m={m} n={n}")
        return errors

    def check_consistency(self) -> list[str]:
        errors = []
        ngen = len(self.gw)
        for i in range(ngen):
            for j in range(i, ngen):
                errors += self.check_skew_pair(i, j)
        for i in range(ngen):
            for j in range(ngen):
                for k in range(ngen):
                    errors += self.check_jacobi_triple(i, j, k)
        return errors


def check_presentation(alg: AlgebraPresentation) -> list[str]:
    if not isinstance(alg, AlgebraPresentation):
        raise PresentationError("expected a presentation")
    return alg.engine.check_consistency()
