"""Permutations of ``range(n)``, their action on edges of K_n, and pair weights.

Vertices are 0-based. Edges of K_n are indexed in colex order::

    {0,1} -> 0, {0,2} -> 1, {1,2} -> 2, {0,3} -> 3, ...

so that ``edge_index(u, v) = v*(v-1)/2 + u`` for ``u < v``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

from .errors import InputError

__all__ = [
    "Edge", "Perm", "PairStat", "WeightReport",
    "num_edges", "edge_index", "index_edge", "edges", "apply_to_edge",
    "cycle_stats", "fixed_edge_count", "edge_permutation",
    "weight_report", "perm_count_bound", "perm_count_exact",
    "check_tuple", "identity_tuple",
]


class Edge(NamedTuple):
    u: int
    v: int

    def __str__(self) -> str:
        return f"{{{self.u},{self.v}}}"


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(e: Sequence[int], n: int) -> int:
    """Colex index of the edge ``e`` of K_n."""
    u, v = e
    if u > v:
        u, v = v, u
    if not (0 <= u < v < n):
        raise InputError(f"edge {tuple(e)} is not an edge of K_{n}")
    return v * (v - 1) // 2 + u


def index_edge(i: int, n: int) -> Edge:
    """Inverse of :func:`edge_index`."""
    if not (0 <= i < num_edges(n)):
        raise InputError(f"edge index {i} out of range for K_{n}")
    v = (1 + math.isqrt(1 + 8 * i)) // 2
    u = i - v * (v - 1) // 2
    return Edge(u, v)


def edges(n: int) -> list[Edge]:
    """All edges of K_n in colex order."""
    return [Edge(u, v) for v in range(n) for u in range(v)]


@dataclass(frozen=True)
class Perm:
    """A bijection of ``range(n)`` in one-line notation: ``image[i] = sigma(i)``."""

    image: tuple[int, ...]
    _edge_action: tuple[int, ...] | None = field(
        default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        if sorted(img) != list(range(len(img))):
            raise InputError(f"{img} is not a permutation of range({len(img)})")
        object.__setattr__(self, "image", img)

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> Perm:
        return cls(tuple(range(n)))

    @classmethod
    def parse(cls, text: str) -> Perm:
        """Parse comma-separated 0-based one-line notation, e.g. ``"1,0,2,3"``."""
        text = text.strip()
        if not text:
            return cls(())
        try:
            return cls(tuple(int(tok) for tok in text.split(",")))
        except ValueError as exc:
            raise InputError(f"cannot parse permutation {text!r}") from exc

    def __str__(self) -> str:
        return ",".join(map(str, self.image))

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __len__(self) -> int:
        return len(self.image)

    def inverse(self) -> Perm:
        inv = [0] * self.n
        for i, x in enumerate(self.image):
            inv[x] = i
        return Perm(tuple(inv))

    def compose(self, other: Perm) -> Perm:
        """``self ∘ other``, i.e. ``i -> self(other(i))``."""
        if other.n != self.n:
            raise InputError("cannot compose permutations of different sizes")
        return Perm(tuple(self.image[j] for j in other.image))

    __mul__ = compose

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.image))

    def edge_action(self) -> tuple[int, ...]:
        """The induced permutation of edge indices: ``out[i] = index(sigma(e_i))``."""
        if self._edge_action is None:
            img = self.image
            act = []
            for v in range(self.n):
                for u in range(v):
                    a, b = img[u], img[v]
                    if a > b:
                        a, b = b, a
                    act.append(b * (b - 1) // 2 + a)
            object.__setattr__(self, "_edge_action", tuple(act))
        return self._edge_action

    @classmethod
    def all(cls, n: int) -> Iterator[Perm]:
        """Every permutation of ``range(n)`` in lexicographic order."""
        for img in itertools.permutations(range(n)):
            yield cls(img)


def apply_to_edge(sigma: Perm, e: Sequence[int]) -> Edge:
    """The edge ``{sigma(u), sigma(v)}`` with endpoints in increasing order."""
    u, v = e
    n = sigma.n
    if not (0 <= u < n and 0 <= v < n) or u == v:
        raise InputError(f"edge {tuple(e)} is not an edge of K_{n}")
    a, b = sigma.image[u], sigma.image[v]
    return Edge(a, b) if a < b else Edge(b, a)


def cycle_stats(sigma: Perm) -> tuple[int, int]:
    """Number of fixed points and number of 2-cycles of ``sigma``."""
    img = sigma.image
    f = sum(1 for i, x in enumerate(img) if x == i)
    t = sum(1 for i, x in enumerate(img) if x > i and img[x] == i)
    return f, t


def fixed_edge_count(sigma: Perm) -> int:
    """Number of edges mapped to themselves (as sets) by ``sigma``."""
    return sum(1 for i, j in enumerate(sigma.edge_action()) if i == j)


def edge_permutation(sigma: Perm) -> Perm:
    """``sigma`` acting on the C(n,2) edge indices, as a :class:`Perm`."""
    return Perm(sigma.edge_action())


def check_tuple(perms: Sequence[Perm], min_m: int = 1) -> int:
    """Validate a tuple of permutations sharing one ``n``; return that ``n``."""
    if len(perms) < min_m:
        raise InputError(f"need at least {min_m} permutations, got {len(perms)}")
    ns = {p.n for p in perms}
    if len(ns) > 1:
        raise InputError(f"permutations have mixed sizes {sorted(ns)}")
    return ns.pop() if ns else 0


def identity_tuple(n: int, m: int) -> tuple[Perm, ...]:
    return (Perm.identity(n),) * m


@dataclass(frozen=True)
class PairStat:
    k: int
    k2: int
    f: int
    t: int

    @property
    def wt(self) -> int:
        return math.comb(self.f, 2) + self.t


@dataclass(frozen=True)
class WeightReport:
    pair_stats: tuple[PairStat, ...]   # all pairs k < k2, lexicographic
    total_wt: int
    L: tuple[PairStat, ...]            # pair_stats sorted by wt descending
    p: tuple[PairStat, ...]            # greedy spanning-tree subsequence of L
    tree_bound: int


def weight_report(perms: Sequence[Perm]) -> WeightReport:
    """Fixed-point / 2-cycle statistics of ``pi_k^{-1} pi_k2`` for every pair.

    Ties in the ordering of ``L`` are broken lexicographically on ``(k, k2)``.
    ``p`` is the first subsequence of ``L`` forming a spanning tree on
    ``range(m)``; ``tree_bound = sum_l l * wt(p_l)`` with ``l`` counted from 1.
    """
    check_tuple(perms, min_m=2)
    m = len(perms)
    invs = [p.inverse() for p in perms]
    stats = []
    for k in range(m):
        for k2 in range(k + 1, m):
            f, t = cycle_stats(invs[k].compose(perms[k2]))
            stats.append(PairStat(k, k2, f, t))
    total = sum(s.wt for s in stats)
    L = tuple(sorted(stats, key=lambda s: (-s.wt, s.k, s.k2)))

    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for s in L:
        a, b = find(s.k), find(s.k2)
        if a != b:
            parent[a] = b
            tree.append(s)
            if len(tree) == m - 1:
                break
    bound = sum(ell * s.wt for ell, s in enumerate(tree, start=1))
    return WeightReport(tuple(stats), total, L, tuple(tree), bound)


def _check_ft(n: int, f: int, t: int) -> None:
    if not (0 <= f <= n and 0 <= 2 * t <= n - f):
        raise InputError(f"infeasible (f, t) = ({f}, {t}) for n = {n}")


def perm_count_bound(n: int, f: int, t: int) -> Fraction:
    """``n! / (f! 2^t t!)``, exactly."""
    _check_ft(n, f, t)
    return Fraction(math.factorial(n),
                    math.factorial(f) * 2 ** t * math.factorial(t))


def perm_count_exact(n: int, f: int, t: int) -> int:
    """Brute-force count of permutations of ``range(n)`` with exactly ``f``
    fixed points and exactly ``t`` 2-cycles (``n <= 8``)."""
    _check_ft(n, f, t)
    if n > 8:
        raise InputError("brute-force counter limited to n <= 8")
    return sum(1 for p in Perm.all(n) if cycle_stats(p) == (f, t))
