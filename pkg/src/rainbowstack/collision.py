"""The collision graph of a permutation tuple and exact proper-coloring counts.

For ``pi = (pi_1..pi_m)`` the graph has a vertex ``beta_k(e)`` for every
layer ``k`` and edge ``e`` of K_n; ``beta_k(e) ~ beta_k2(e2)`` iff
``k != k2`` and either ``e == e2`` or ``pi_k(e) == pi_k2(e2)``. Colorings
``chi_1..chi_m`` induce the vertex coloring ``beta_k(e) -> chi_k(e)``, which
is proper exactly when both ``id`` and ``pi`` are rainbow stackings.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import CapabilityError, InputError
from .colorings import EdgeColoring
from .perms import Perm, check_tuple, index_edge, num_edges, weight_report
from .stacking import MP_DPS, StackingInstance, count_rainbow_stackings

__all__ = [
    "Provenance", "CollisionGraph", "build_collision_graph",
    "chromatic_polynomial", "eval_poly", "count_proper_colorings",
    "count_proper_colorings_brute", "m2_closed_form", "pair_correlation",
    "pair_correlation_exact", "entropy_bound_rhs", "second_moment_exact",
    "second_moment_enumerated", "format_adjlist",
]

COMPONENT_GUARD = 16
TOTAL_GUARD = 20
SECOND_MOMENT_GUARD = 4


class Provenance(str, enum.Enum):
    SAME_EDGE = "SameEdge"
    PI_COLLISION = "PiCollision"
    BOTH = "Both"


@dataclass(frozen=True)
class CollisionGraph:
    n: int
    m: int
    edges: dict[tuple[int, int], Provenance]   # (a, b) with a < b

    @property
    def num_vertices(self) -> int:
        return self.m * num_edges(self.n)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertex(self, k: int, e: int) -> int:
        return k * num_edges(self.n) + e

    def label(self, v: int) -> tuple[int, int]:
        """``(k, edge_index)`` of vertex ``v``."""
        return divmod(v, num_edges(self.n))

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.num_vertices)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for row in adj:
            row.sort()
        return adj

    def components(self) -> list[list[int]]:
        adj = self.adjacency()
        seen = [False] * len(adj)
        comps = []
        for s in range(len(adj)):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_proper_coloring(self, colors: Sequence[int]) -> bool:
        return all(colors[a] != colors[b] for a, b in self.edges)


def build_collision_graph(perms: Sequence[Perm]) -> CollisionGraph:
    n = check_tuple(perms, min_m=2)
    m = len(perms)
    ne = num_edges(n)
    acts = [p.edge_action() for p in perms]
    invs = [p.inverse().edge_action() for p in perms]
    out: dict[tuple[int, int], Provenance] = {}
    for k in range(m):
        for k2 in range(k + 1, m):
            for e in range(ne):
                a = k * ne + e
                e2 = invs[k2][acts[k][e]]
                if e2 == e:
                    out[(a, k2 * ne + e)] = Provenance.BOTH
                else:
                    out[(a, k2 * ne + e)] = Provenance.SAME_EDGE
                    out[(a, k2 * ne + e2)] = Provenance.PI_COLLISION
    return CollisionGraph(n, m, out)


# Polynomials are coefficient lists, lowest degree first.

def _pmul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _psub(p: list[int], q: list[int]) -> list[int]:
    out = [0] * max(len(p), len(q))
    for i, a in enumerate(p):
        out[i] += a
    for i, b in enumerate(q):
        out[i] -= b
    return out


def _ppow(p: list[int], e: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out = _pmul(out, p)
    return out


def eval_poly(p: Sequence[int], x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _relabel(vertices: Sequence[int], edges) -> tuple[int, tuple[tuple[int, int], ...]]:
    idx = {v: i for i, v in enumerate(sorted(vertices))}
    es = set()
    for a, b in edges:
        a, b = idx[a], idx[b]
        es.add((a, b) if a < b else (b, a))
    return len(idx), tuple(sorted(es))


def _split(nv: int, edges) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    adj = [[] for _ in range(nv)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * nv
    parts = []
    for s in range(nv):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        cs = set(comp)
        parts.append(_relabel(comp, [(a, b) for a, b in edges if a in cs]))
    return parts


def _spanning_tree(nv: int, edges) -> set[tuple[int, int]]:
    adj = [[] for _ in range(nv)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    tree, seen, queue = set(), {0}, [0]
    for v in queue:
        for w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                queue.append(w)
                tree.add((v, w) if v < w else (w, v))
    return tree


def _falling(d: int) -> list[int]:
    out = [1]
    for i in range(d):
        out = _pmul(out, [-i, 1])
    return out


def _simplicial(nv: int, adj: list[set[int]]) -> int | None:
    for v in range(nv):
        nb = adj[v]
        if all(nb <= adj[w] | {w} for w in nb):
            return v
    return None


def _connected_poly(nv: int, edges, memo) -> list[int]:
    key = (nv, edges)
    if key in memo:
        return memo[key]
    if not edges:
        res = [0, 1]
    elif len(edges) == nv - 1:
        res = _pmul([0, 1], _ppow([-1, 1], nv - 1))
    elif len(edges) == nv * (nv - 1) // 2:
        res = _falling(nv)
    else:
        adj = [set() for _ in range(nv)]
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        v = _simplicial(nv, adj)
        if v is not None:
            # a vertex whose neighbours form a clique sees |N(v)| distinct colors
            sub = _relabel([w for w in range(nv) if w != v],
                           [e for e in edges if v not in e])
            res = _pmul([-len(adj[v]), 1], _connected_poly(*sub, memo))
        else:
            tree = _spanning_tree(nv, edges)
            a, b = next(e for e in edges if e not in tree)
            rest = tuple(e for e in edges if e != (a, b))
            deleted = _connected_poly(nv, rest, memo)
            merged = [(a if u == b else u, a if w == b else w) for u, w in rest]
            contracted = _graph_poly(*_relabel([w for w in range(nv) if w != b], merged), memo)
            res = _psub(deleted, contracted)
    memo[key] = res
    return res


def _graph_poly(nv: int, edges, memo) -> list[int]:
    res = [1]
    for cnv, cedges in _split(nv, edges):
        res = _pmul(res, _connected_poly(cnv, cedges, memo))
    return res


def chromatic_polynomial(nv: int, edges) -> list[int]:
    """Chromatic polynomial by deletion-contraction.

    Trees, complete graphs and edgeless graphs are base cases and simplicial
    vertices are peeled off; otherwise the lexicographically smallest edge
    outside a BFS spanning tree is deleted and contracted.
    Components are handled separately and memoized for this call only.
    """
    _, es = _relabel(range(nv), edges)
    return _graph_poly(nv, es, {})


def _component_count(nv: int, edges, r: int, method: str) -> int:
    if method == "auto":
        if not edges:
            return r
        degs = [0] * nv
        for a, b in edges:
            degs[a] += 1
            degs[b] += 1
        if nv == 2:
            return r * (r - 1)
        if all(d == 2 for d in degs):
            return (r - 1) ** nv + (-1) ** nv * (r - 1)
    return eval_poly(chromatic_polynomial(nv, edges), r)


def _check_guard(G: CollisionGraph, comps, override: bool) -> None:
    if override or G.m == 2 or G.num_vertices <= TOTAL_GUARD:
        return
    big = max((len(c) for c in comps), default=0)
    if big > COMPONENT_GUARD:
        raise CapabilityError(
            f"collision graph component of size {big} exceeds the guard of "
            f"{COMPONENT_GUARD} vertices (total {G.num_vertices} > {TOTAL_GUARD})")


def count_proper_colorings(G: CollisionGraph, r: int, method: str = "auto",
                           override: bool = False) -> int:
    """Number of proper ``r``-colorings of ``G``, as a product over components.

    ``method="auto"`` uses closed forms for isolated vertices, single edges
    and cycles and deletion-contraction otherwise;
    ``method="deletion_contraction"`` uses deletion-contraction throughout.
    """
    if method not in ("auto", "deletion_contraction"):
        raise InputError(f"unknown method {method!r}")
    if r < 0:
        raise InputError("r must be nonnegative")
    comps = G.components()
    _check_guard(G, comps, override)
    total = 1
    for comp in comps:
        cs = set(comp)
        nv, es = _relabel(comp, [e for e in G.edges if e[0] in cs])
        total *= _component_count(nv, es, r, method)
        if not total:
            break
    return total


def count_proper_colorings_brute(G: CollisionGraph, r: int) -> int:
    """Enumerate all ``r^V`` colorings (tiny graphs only)."""
    return sum(1 for cols in itertools.product(range(r), repeat=G.num_vertices)
               if G.is_proper_coloring(cols))


def m2_closed_form(rho: Perm, n: int, r: int) -> int:
    """Proper ``r``-colorings of the m=2 collision graph from its edge permutation.

    ``rho`` permutes the C(n,2) edge indices (the action of ``pi_1^{-1} pi_2``).
    A fixed edge gives a K_2 factor ``r(r-1)``; an l-cycle with ``l >= 2``
    gives an even cycle ``C_{2l}`` with ``(r-1)^{2l} + (r-1)`` colorings.
    """
    if rho.n != num_edges(n):
        raise InputError(f"edge permutation must act on {num_edges(n)} edges, got {rho.n}")
    seen = [False] * rho.n
    total = 1
    for s in range(rho.n):
        if seen[s]:
            continue
        length, i = 0, s
        while not seen[i]:
            seen[i] = True
            i = rho.image[i]
            length += 1
        total *= r * (r - 1) if length == 1 else (r - 1) ** (2 * length) + (r - 1)
    return total


def _n_pi(perms: Sequence[Perm], r: int, override: bool) -> int:
    if len(perms) == 1:
        return r ** num_edges(perms[0].n)
    return count_proper_colorings(build_collision_graph(perms), r, override=override)


def pair_correlation_exact(perms: Sequence[Perm], r: int, override: bool = False) -> Fraction:
    """``E[Z_id Z_pi] = N_pi / r^{m C(n,2)}`` as an exact rational."""
    n = check_tuple(perms)
    if r < 1:
        raise InputError("palette size r must be at least 1")
    return Fraction(_n_pi(perms, r, override), r ** (len(perms) * num_edges(n)))


def pair_correlation(perms: Sequence[Perm], r: int, override: bool = False) -> mpmath.mpf:
    q = pair_correlation_exact(perms, r, override)
    with mpmath.workdps(MP_DPS):
        return mpmath.mpf(q.numerator) / q.denominator


def entropy_bound_rhs(perms: Sequence[Perm], r) -> mpmath.mpf:
    """``r^{m C(n,2)} E_{n,m,r}^2 exp(wt / (r - (2m-1)/3))``."""
    n = check_tuple(perms, min_m=2)
    m = len(perms)
    r_hat = r - Fraction(2 * m - 1, 3)
    if r_hat <= 0:
        raise InputError(f"need r > (2m-1)/3 = {float(Fraction(2 * m - 1, 3)):.4g}")
    wt = weight_report(perms).total_wt
    with mpmath.workdps(MP_DPS):
        E = mpmath.mpf(1)
        for i in range(1, m):
            E *= (1 - mpmath.mpf(i) / r) ** num_edges(n)
        rh = mpmath.mpf(r) - mpmath.mpf(2 * m - 1) / 3
        return +(mpmath.mpf(r) ** (m * num_edges(n)) * E ** 2 * mpmath.exp(wt / rh))


def second_moment_exact(n: int, m: int, r: int, override: bool = False) -> Fraction:
    """``E[Z^2] = n!^m * sum over pi in S_n^m of E[Z_id Z_pi]`` (exact)."""
    if m < 1 or r < 1:
        raise InputError("need m >= 1 and r >= 1")
    if not override and (n > SECOND_MOMENT_GUARD or m > 2):
        raise CapabilityError(
            f"second moment guarded to n <= {SECOND_MOMENT_GUARD}, m <= 2")
    nf = math.factorial(n)
    if m == 1:
        return Fraction(nf * nf)
    perms = list(Perm.all(n))
    total = Fraction(0)
    for tup in itertools.product(perms, repeat=m):
        total += pair_correlation_exact(tup, r, override=True)
    return nf ** m * total


def second_moment_enumerated(n: int, m: int, r: int) -> Fraction:
    """``E[Z^2]`` by averaging ``Z^2`` over every coloring tuple."""
    ne = num_edges(n)
    total, count = 0, 0
    for cols in itertools.product(range(r), repeat=m * ne):
        chis = tuple(EdgeColoring(n, r, cols[k * ne:(k + 1) * ne]) for k in range(m))
        Z, _ = count_rainbow_stackings(StackingInstance(n, m, r, chis))
        total += Z * Z
        count += 1
    return Fraction(total, count)


def format_adjlist(G: CollisionGraph) -> str:
    """Adjacency list (``v nbr nbr ...``) with provenance in ``#`` comments.

    Readable by ``networkx.read_adjlist``; vertex ``v`` is ``beta_k(e)`` with
    ``(k, edge_index) = divmod(v, C(n,2))``.
    """
    lines = [f"# collision graph n={G.n} m={G.m} vertices={G.num_vertices} "
             f"edges={G.num_edges}"]
    for v in range(G.num_vertices):
        k, e = G.label(v)
        u, w = index_edge(e, G.n)
        lines.append(f"# vertex {v} = beta_{k}({u},{w})")
    for (a, b), prov in sorted(G.edges.items()):
        lines.append(f"# edge {a} {b} {prov.value}")
    for v, nbrs in enumerate(G.adjacency()):
        lines.append(" ".join(map(str, [v, *nbrs])))
    return "\n".join(lines) + "\n"

