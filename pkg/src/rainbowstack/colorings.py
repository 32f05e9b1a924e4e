"""Edge-colorings of K_n: random ones, pullbacks, proper ones, and partitions
of the edge set into matchings.

Random colorings use NumPy's PCG64 bit generator. A coloring is a pure
function of ``(n, r, seed)``; per-trial seeds are produced by
:func:`derive_seed`, a SplitMix64-style 64-bit mix of a list of integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapabilityError, InputError
from .perms import Perm, edge_index, edges, index_edge, num_edges

__all__ = [
    "EdgeColoring", "MatchingPartition", "derive_seed", "random_coloring",
    "random_colorings",
    "pullback", "is_proper", "round_robin_coloring", "cayley_sum_pair",
    "enumerate_matching_partitions", "relabel_partition",
    "canonical_partition", "read_coloring", "write_coloring",
    "format_coloring", "parse_coloring",
]

MASK64 = (1 << 64) - 1
MAX_PARTITION_N = 7


@dataclass(frozen=True)
class EdgeColoring:
    n: int
    r: int
    colors: tuple[int, ...]   # colors[edge_index(e)]

    def __post_init__(self):
        cols = tuple(int(c) for c in self.colors)
        if self.n < 0 or self.r < 0:
            raise InputError("n and r must be nonnegative")
        if len(cols) != num_edges(self.n):
            raise InputError(
                f"expected {num_edges(self.n)} colors for K_{self.n}, got {len(cols)}")
        bad = [c for c in cols if not 0 <= c < self.r]
        if bad:
            raise InputError(f"color {bad[0]} outside palette range(0, {self.r})")
        object.__setattr__(self, "colors", cols)

    def __getitem__(self, e) -> int:
        if isinstance(e, int):
            return self.colors[e]
        return self.colors[edge_index(e, self.n)]

    def color_classes(self) -> dict[int, list[int]]:
        classes: dict[int, list[int]] = {}
        for i, c in enumerate(self.colors):
            classes.setdefault(c, []).append(i)
        return classes

    def relabel_colors(self, mapping: Sequence[int], r: int | None = None) -> EdgeColoring:
        return EdgeColoring(self.n, self.r if r is None else r,
                            tuple(mapping[c] for c in self.colors))


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(*parts: int) -> int:
    """Mix integers into one 64-bit seed; order-sensitive and platform-free."""
    h = 0
    for p in parts:
        h = _splitmix64(h ^ (int(p) & MASK64))
    return h


def random_colorings(n: int, r: int, m: int, seed: int) -> tuple[EdgeColoring, ...]:
    """``m`` independent uniform colorings drawn from one PCG64 stream.

    The k-th coloring takes draws ``k C(n,2) .. (k+1) C(n,2) - 1``, so
    ``random_colorings(n, r, 1, s)[0] == random_coloring(n, r, s)``.
    """
    if r < 1:
        raise InputError("palette size r must be at least 1")
    if n < 0 or m < 0:
        raise InputError("n and m must be nonnegative")
    rng = np.random.Generator(np.random.PCG64(int(seed) & MASK64))
    block = rng.integers(0, r, size=(m, num_edges(n)), dtype=np.int64).tolist()
    return tuple(EdgeColoring(n, r, tuple(row)) for row in block)


def random_coloring(n: int, r: int, seed: int) -> EdgeColoring:
    """Independent uniform colors in ``range(r)`` for each edge of K_n."""
    return random_colorings(n, r, 1, seed)[0]


def pullback(chi: EdgeColoring, sigma: Perm) -> EdgeColoring:
    """The coloring ``e -> chi(sigma^{-1}(e))``."""
    if sigma.n != chi.n:
        raise InputError("coloring and permutation disagree on n")
    out = [0] * len(chi.colors)
    for i, j in enumerate(sigma.edge_action()):
        out[j] = chi.colors[i]
    return EdgeColoring(chi.n, chi.r, tuple(out))


def is_proper(chi: EdgeColoring) -> bool:
    """True iff edges sharing a vertex always get different colors."""
    seen = [set() for _ in range(chi.n)]
    for (u, v), c in zip(edges(chi.n), chi.colors):
        if c in seen[u] or c in seen[v]:
            return False
        seen[u].add(c)
        seen[v].add(c)
    return True


def round_robin_coloring(n: int) -> EdgeColoring:
    """A proper coloring of K_n with the minimum number of colors.

    Odd n: ``{i,j} -> (i+j) mod n``. Even n: the circle method, with vertex
    ``n-1`` as the hub: ``{i,j} -> (i+j) mod (n-1)`` and ``{i,n-1} -> 2i mod (n-1)``.
    """
    if n < 2:
        raise InputError("round-robin coloring needs n >= 2")
    if n % 2:
        return EdgeColoring(n, n, tuple((u + v) % n for u, v in edges(n)))
    q = n - 1
    cols = tuple((2 * u if v == q else u + v) % q for u, v in edges(n))
    return EdgeColoring(n, q, cols)


def cayley_sum_pair(k: int, u1: int, v1: int, u2: int, v2: int
                    ) -> tuple[EdgeColoring, EdgeColoring]:
    """The XOR sum-colorings on ``F_2^k`` minus two points.

    Vertices of the i-th coloring are the k-bit integers other than ``u_i``
    and ``v_i``, numbered in increasing order; edge ``{x, y}`` gets color
    ``x ^ y``. Palette size is ``2^k`` (color 0 never occurs).
    """
    if k < 2:
        raise InputError("k must be at least 2")
    size = 1 << k
    for name, x in (("u1", u1), ("v1", v1), ("u2", u2), ("v2", v2)):
        if not 0 <= x < size:
            raise InputError(f"{name}={x} is not a {k}-bit vector")
    if u1 == v1 or u2 == v2:
        raise InputError("need u1 != v1 and u2 != v2")
    if u1 ^ v1 != u2 ^ v2:
        raise InputError("need u1 + v1 == u2 + v2 in F_2^k")
    n = size - 2
    out = []
    for u, v in ((u1, v1), (u2, v2)):
        verts = [z for z in range(size) if z not in (u, v)]
        out.append(EdgeColoring(n, size, tuple(verts[a] ^ verts[b] for a, b in edges(n))))
    return out[0], out[1]


@dataclass(frozen=True)
class MatchingPartition:
    """A partition of the edges of K_n into matchings (edge indices).

    Canonical form: each class sorted ascending, classes sorted by
    (size descending, smallest edge index ascending).
    """

    n: int
    classes: tuple[tuple[int, ...], ...]

    @classmethod
    def from_classes(cls, n: int, classes: Iterable[Iterable[int]]) -> MatchingPartition:
        cl = [tuple(sorted(c)) for c in classes]
        cl.sort(key=lambda c: (-len(c), c[0]))
        return cls(n, tuple(cl))

    @classmethod
    def from_coloring(cls, chi: EdgeColoring) -> MatchingPartition:
        return cls.from_classes(chi.n, chi.color_classes().values())

    def to_coloring(self, labels: Sequence[int] | None = None, r: int | None = None
                    ) -> EdgeColoring:
        """Color class ``i`` with ``labels[i]`` (default ``i``)."""
        labels = list(range(len(self.classes))) if labels is None else list(labels)
        cols = [0] * num_edges(self.n)
        for lab, cl in zip(labels, self.classes):
            for e in cl:
                cols[e] = lab
        if r is None:
            r = max(labels, default=-1) + 1
        return EdgeColoring(self.n, r, tuple(cols))

    def is_valid(self) -> bool:
        seen = sorted(e for cl in self.classes for e in cl)
        if seen != list(range(num_edges(self.n))):
            return False
        for cl in self.classes:
            verts = [x for e in cl for x in index_edge(e, self.n)]
            if len(verts) != len(set(verts)):
                return False
        return True


def enumerate_matching_partitions(n: int, override: bool = False
                                  ) -> Iterator[MatchingPartition]:
    """Every partition of the edges of K_n into matchings, once each.

    The class containing the smallest uncovered edge is chosen at each level,
    so each unordered partition is produced exactly once.
    """
    if n > MAX_PARTITION_N and not override:
        raise CapabilityError(f"matching-partition enumeration guarded to n <= {MAX_PARTITION_N}")
    if n < 0:
        raise InputError("n must be nonnegative")
    return _matching_partitions(n)


def _matching_partitions(n: int) -> Iterator[MatchingPartition]:
    E = edges(n)
    ne = len(E)
    vmask = [(1 << u) | (1 << v) for u, v in E]

    def matchings_from(first: int, remaining: int) -> Iterator[tuple[int, ...]]:
        # all matchings inside `remaining` that contain `first` as smallest edge
        def extend(cur, used, start):
            yield cur
            for j in range(start, ne):
                if remaining >> j & 1 and not used & vmask[j]:
                    yield from extend(cur + (j,), used | vmask[j], j + 1)
        yield from extend((first,), vmask[first], first + 1)

    def rec(remaining: int, acc: list[tuple[int, ...]]):
        if not remaining:
            yield MatchingPartition.from_classes(n, acc)
            return
        first = (remaining & -remaining).bit_length() - 1
        for cl in matchings_from(first, remaining):
            rest = remaining
            for e in cl:
                rest &= ~(1 << e)
            acc.append(cl)
            yield from rec(rest, acc)
            acc.pop()

    yield from rec((1 << ne) - 1, [])


def relabel_partition(P: MatchingPartition, sigma: Perm) -> MatchingPartition:
    """Image of ``P`` under the vertex relabeling ``sigma``."""
    act = sigma.edge_action()
    return MatchingPartition.from_classes(P.n, ([act[e] for e in cl] for cl in P.classes))


def canonical_partition(P: MatchingPartition) -> MatchingPartition:
    """Least relabeling of ``P`` over all vertex permutations (isomorphism class key)."""
    best = None
    for sigma in Perm.all(P.n):
        Q = relabel_partition(P, sigma)
        if best is None or Q.classes < best.classes:
            best = Q
    return best


def format_coloring(chi: EdgeColoring) -> str:
    return f"{chi.n} {chi.r}\n{' '.join(map(str, chi.colors))}\n"


def parse_coloring(header: str, body: str) -> EdgeColoring:
    try:
        n, r = (int(x) for x in header.split())
        cols = tuple(int(x) for x in body.split())
    except ValueError as exc:
        raise InputError(f"malformed coloring header/body: {header!r}") from exc
    return EdgeColoring(n, r, cols)


def write_coloring(chi: EdgeColoring, path) -> None:
    Path(path).write_text(format_coloring(chi), encoding="utf-8", newline="\n")


def read_coloring(path) -> EdgeColoring:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise InputError(f"{path}: empty coloring file")
    return parse_coloring(lines[0], lines[1] if len(lines) > 1 else "")
