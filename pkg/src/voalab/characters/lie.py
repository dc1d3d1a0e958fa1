"""sl_n weights, finite and affine Weyl groups.

Finite weights are stored in epsilon coordinates: vectors in Q^n with zero
sum, with the standard dot product, so that every root has squared length 2
and the Weyl group acts by permuting coordinates.  The coroot lattice is the
set of integer vectors with zero sum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

__all__ = [
    "Vec",
    "dot",
    "rho",
    "fundamental_weight",
    "simple_root",
    "to_root_coords",
    "from_root_coords",
    "weyl_group",
    "permutation_sign",
    "coroot_vectors",
    "AffineWeight",
    "reduced_length_sl2",
]

Vec = tuple


def dot(x: Sequence, y: Sequence) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(x, y)), Fraction(0))


def _add(x, y):
    return tuple(Fraction(a) + Fraction(b) for a, b in zip(x, y))


def _scale(c, x):
    return tuple(Fraction(c) * Fraction(a) for a in x)


def rho(n: int) -> Vec:
    return tuple(Fraction(n - 1, 2) - i for i in range(n))


def fundamental_weight(n: int, s: int) -> Vec:
    """omega_s in epsilon coordinates; omega_0 = 0."""
    if not 0 <= s < n:
        raise ValueError("fundamental weight index out of range")
    return tuple((Fraction(1) if i < s else Fraction(0)) - Fraction(s, n) for i in range(n))


def simple_root(n: int, i: int) -> Vec:
    """alpha_i = e_i - e_{i+1} for i = 1..n-1."""
    v = [Fraction(0)] * n
    v[i - 1] = Fraction(1)
    v[i] = Fraction(-1)
    return tuple(v)


def to_root_coords(x: Vec) -> tuple:
    """Coordinates in the simple-root basis (partial sums)."""
    out, acc = [], Fraction(0)
    for a in x[:-1]:
        acc += Fraction(a)
        out.append(acc)
    return tuple(out)


def from_root_coords(c: Sequence) -> Vec:
    c = [Fraction(x) for x in c]
    n = len(c) + 1
    return tuple((c[i] if i < n - 1 else 0) - (c[i - 1] if i > 0 else 0) for i in range(n))


def permutation_sign(p: Sequence[int]) -> int:
    sign, seen = 1, set()
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def weyl_group(n: int) -> list[tuple[tuple[int, ...], int]]:
    """All permutations of n coordinates with their signs det(u)."""
    return [(p, permutation_sign(p)) for p in itertools.permutations(range(n))]


def act(p: Sequence[int], x: Vec) -> Vec:
    """u(x) for the permutation u: e_i -> e_{p(i)}."""
    out = [Fraction(0)] * len(x)
    for i, a in enumerate(x):
        out[p[i]] = Fraction(a)
    return tuple(out)


def coroot_vectors(n: int, radius: float) -> Iterator[Vec]:
    """Integer zero-sum vectors beta with |beta|^2 <= radius^2."""
    r2 = radius * radius
    bound = int(math.floor(radius))

    def rec(prefix, partial_sq):
        k = len(prefix)
        if k == n - 1:
            last = -sum(prefix)
            if partial_sq + last * last <= r2 + 1e-9:
                yield tuple(Fraction(a) for a in prefix) + (Fraction(last),)
            return
        for a in range(-bound, bound + 1):
            sq = partial_sq + a * a
            if sq <= r2 + 1e-9:
                yield from rec(prefix + [a], sq)

    yield from rec([], 0)


@dataclass(frozen=True)
class AffineWeight:
    """level * Lambda_0 + finite + delta_coeff * delta for affine sl_n.

    ``finite`` is given in simple-root coordinates, as the type describes;
    ``eps`` returns it in epsilon coordinates.
    """

    level: Fraction
    finite: tuple
    delta: Fraction = Fraction(0)

    @classmethod
    def from_eps(cls, level, x: Vec, delta=0) -> "AffineWeight":
        return cls(Fraction(level), to_root_coords(x), Fraction(delta))

    @property
    def rank(self) -> int:
        return len(self.finite)

    @property
    def eps(self) -> Vec:
        return from_root_coords(self.finite)

    def __add__(self, other: "AffineWeight") -> "AffineWeight":
        return AffineWeight.from_eps(self.level + other.level, _add(self.eps, other.eps), self.delta + other.delta)

    def __sub__(self, other: "AffineWeight") -> "AffineWeight":
        return AffineWeight.from_eps(self.level - other.level, _add(self.eps, _scale(-1, other.eps)), self.delta - other.delta)

    def translate(self, beta: Vec) -> "AffineWeight":
        """t_beta(lam) = lam + m beta - ((lam|beta) + |beta|^2 m / 2) delta, m = level."""
        m = self.level
        x = self.eps
        new = _add(x, _scale(m, beta))
        d = self.delta - (dot(x, beta) + dot(beta, beta) * m / 2)
        return AffineWeight.from_eps(m, new, d)

    def reflect(self, perm: Sequence[int]) -> "AffineWeight":
        return AffineWeight.from_eps(self.level, act(perm, self.eps), self.delta)

    def apply(self, perm: Sequence[int], beta: Vec) -> "AffineWeight":
        """(t_beta u)(lam)."""
        return self.reflect(perm).translate(beta)

    def shifted(self, perm: Sequence[int], beta: Vec) -> "AffineWeight":
        """w o lam = w(lam + rho_hat) - rho_hat with rho_hat = rho + n Lambda_0, w = t_beta u."""
        n = self.rank + 1
        rho_hat = AffineWeight.from_eps(n, rho(n))
        return (self + rho_hat).apply(perm, beta) - rho_hat


def reduced_length_sl2(beta: int) -> int:
    """Length of the translation t_{beta alpha} in the affine Weyl group of sl_2.

    Counts affine roots alpha + k delta (k >= 0) and -alpha + k delta (k >= 1)
    sent to negative roots, which equals 2|beta|.
    """
    count = 0
    # t_{b alpha}(alpha + k delta) = alpha + (k - 2b) delta, and -alpha + k delta -> -alpha + (k + 2b) delta
    for k in range(0, 4 * abs(beta) + 2):
        if k - 2 * beta < 0:
            count += 1
        if k >= 1 and k + 2 * beta <= 0:
            count += 1
    return count
