"""Deciding, finding and counting rainbow stackings; first-moment formulas.

A stacking of colorings ``chi_1..chi_m`` is a tuple ``(sigma_1..sigma_m)``
where ``sigma_k`` places vertex ``x`` of the k-th copy of K_n at position
``sigma_k(x)``. It is rainbow if every position edge carries ``m`` distinct
colors, i.e. the pullbacks ``chi_k(sigma_k^{-1}(e))`` are pairwise distinct.

Left-multiplying every ``sigma_k`` by the same ``tau`` maps stackings to
stackings, so the search fixes ``sigma_1 = id`` and the full count is
``n!`` times the reduced count.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath

from .colorings import EdgeColoring, format_coloring, parse_coloring, pullback
from .errors import CapabilityError, InputError
from .perms import Perm, check_tuple, num_edges

__all__ = [
    "StackingInstance", "SearchBudget", "SearchStatus", "SearchOutcome",
    "is_rainbow_stacking", "find_rainbow_stacking", "count_rainbow_stackings",
    "count_rainbow_stackings_brute", "first_moment", "first_moment_exact",
    "first_moment_upper_bound", "log_factorial", "threshold_formulas",
    "find_distinct_sum_bijection", "read_instance", "write_instance",
    "format_instance", "parse_instance",
]

# max n for exact counting, by m
COUNT_GUARD = {2: 6, 3: 4}
COUNT_GUARD_DEFAULT = 3
MP_DPS = 40


@dataclass(frozen=True)
class StackingInstance:
    n: int
    m: int
    r: int
    colorings: tuple[EdgeColoring, ...]

    def __post_init__(self):
        cols = tuple(self.colorings)
        object.__setattr__(self, "colorings", cols)
        if self.m < 1 or len(cols) != self.m:
            raise InputError(f"expected m={self.m} >= 1 colorings, got {len(cols)}")
        for chi in cols:
            if chi.n != self.n:
                raise InputError(f"coloring on K_{chi.n} in an instance on K_{self.n}")
            if chi.r > self.r:
                raise InputError(f"coloring palette {chi.r} exceeds instance palette {self.r}")

    @classmethod
    def of(cls, *colorings: EdgeColoring) -> StackingInstance:
        if not colorings:
            raise InputError("need at least one coloring")
        return cls(colorings[0].n, len(colorings), max(c.r for c in colorings), colorings)


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int | None = None
    max_millis: float | None = None

    def __post_init__(self):
        for name in ("max_nodes", "max_millis"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise InputError(f"{name} must be positive when given")


UNLIMITED = SearchBudget()


class SearchStatus(str, enum.Enum):
    FOUND = "Found"
    EXHAUSTED = "ExhaustedNoSolution"
    BUDGET = "BudgetExceeded"


@dataclass(frozen=True)
class SearchOutcome:
    status: SearchStatus
    witness: tuple[Perm, ...] | None
    nodes_expanded: int

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND

    @property
    def complete(self) -> bool:
        return self.status is not SearchStatus.BUDGET


def is_rainbow_stacking(inst: StackingInstance, sigmas: Sequence[Perm]) -> bool:
    if len(sigmas) != inst.m:
        raise InputError(f"expected {inst.m} permutations, got {len(sigmas)}")
    if inst.m and check_tuple(sigmas) != inst.n:
        raise InputError("permutations and instance disagree on n")
    pulled = [pullback(chi, s).colors for chi, s in zip(inst.colorings, sigmas)]
    return all(len(set(cols)) == inst.m for cols in zip(*pulled))


class _BudgetHit(Exception):
    pass


class _Search:
    """Backtracking over vertex images of sigma_2..sigma_m with sigma_1 = id.

    ``occ[b][c]`` is a bitmask of vertices ``a`` such that color ``c`` already
    sits on position edge ``{a, b}``; the legal images of a vertex are read
    off it with a handful of AND operations.
    """

    def __init__(self, inst: StackingInstance, budget: SearchBudget, fail_first: bool):
        n, m = inst.n, inst.m
        self.n, self.m = n, m
        self.budget = budget
        self.fail_first = fail_first
        self.col = []
        for chi in inst.colorings:
            mat = [[-1] * n for _ in range(n)]
            i = 0
            for v in range(n):
                for u in range(v):
                    mat[u][v] = mat[v][u] = chi.colors[i]
                    i += 1
            self.col.append(mat)
        self.occ = [[0] * inst.r for _ in range(n)]
        base = self.col[0]
        for a in range(n):
            for b in range(n):
                if a != b:
                    self.occ[b][base[a][b]] |= 1 << a
        self.sig = [list(range(n))] + [[-1] * n for _ in range(m - 1)]
        self.placed = [list(range(n))] + [[] for _ in range(m - 1)]
        self.used = [(1 << n) - 1] + [0] * (m - 1)
        self.full = (1 << n) - 1
        self.order = [(k, x) for x in range(n) for k in range(1, m)]
        self.nodes = 0
        self.solutions = 0
        self.start = time.perf_counter()

    def domain(self, k: int, x: int) -> int:
        dom = self.full & ~self.used[k]
        row = self.col[k][x]
        sig = self.sig[k]
        occ = self.occ
        for y in self.placed[k]:
            dom &= ~occ[sig[y]][row[y]]
            if not dom:
                break
        return dom

    def assign(self, k: int, x: int, a: int) -> None:
        row = self.col[k][x]
        sig = self.sig[k]
        occ = self.occ
        for y in self.placed[k]:
            b = sig[y]
            c = row[y]
            occ[a][c] |= 1 << b
            occ[b][c] |= 1 << a
        sig[x] = a
        self.placed[k].append(x)
        self.used[k] |= 1 << a

    def unassign(self, k: int, x: int) -> None:
        a = self.sig[k][x]
        self.placed[k].pop()
        self.used[k] &= ~(1 << a)
        self.sig[k][x] = -1
        row = self.col[k][x]
        sig = self.sig[k]
        occ = self.occ
        for y in self.placed[k]:
            b = sig[y]
            c = row[y]
            occ[a][c] &= ~(1 << b)
            occ[b][c] &= ~(1 << a)

    def tick(self) -> None:
        self.nodes += 1
        b = self.budget
        if b.max_nodes is not None and self.nodes > b.max_nodes:
            raise _BudgetHit
        if b.max_millis is not None and not self.nodes & 255:
            if (time.perf_counter() - self.start) * 1000 > b.max_millis:
                raise _BudgetHit

    def pick(self, depth: int) -> tuple[int, int, int]:
        if not self.fail_first:
            k, x = self.order[depth]
            return k, x, self.domain(k, x)
        best = None
        for k, x in self.order:
            if self.sig[k][x] >= 0:
                continue
            dom = self.domain(k, x)
            size = dom.bit_count()
            if best is None or size < best[0]:
                best = (size, k, x, dom)
                if size == 0:
                    break
        return best[1], best[2], best[3]

    def run(self, depth: int, count_all: bool) -> bool:
        if depth == len(self.order):
            self.solutions += 1
            return not count_all
        k, x, dom = self.pick(depth)
        while dom:
            low = dom & -dom
            dom ^= low
            a = low.bit_length() - 1
            self.tick()
            self.assign(k, x, a)
            if self.run(depth + 1, count_all):
                return True
            self.unassign(k, x)
        return False

    def witness(self) -> tuple[Perm, ...]:
        return tuple(Perm(tuple(s)) for s in self.sig)


def _trivial_outcome(inst: StackingInstance) -> SearchOutcome | None:
    if inst.m == 1 or inst.n < 2:
        return SearchOutcome(SearchStatus.FOUND, (Perm.identity(inst.n),) * inst.m, 0)
    if inst.r < inst.m:
        return SearchOutcome(SearchStatus.EXHAUSTED, None, 0)
    return None


def find_rainbow_stacking(inst: StackingInstance, budget: SearchBudget = UNLIMITED,
                          fail_first: bool = False) -> SearchOutcome:
    """Complete backtracking search for a rainbow stacking.

    Variables are the images ``sigma_k(x)``, visited vertex by vertex and,
    within a vertex, layer by layer; values are tried in increasing order.
    ``fail_first`` switches to smallest-domain-first variable selection.
    """
    trivial = _trivial_outcome(inst)
    if trivial is not None:
        return trivial
    s = _Search(inst, budget, fail_first)
    try:
        hit = s.run(0, count_all=False)
    except _BudgetHit:
        return SearchOutcome(SearchStatus.BUDGET, None, s.nodes)
    if hit:
        return SearchOutcome(SearchStatus.FOUND, s.witness(), s.nodes)
    return SearchOutcome(SearchStatus.EXHAUSTED, None, s.nodes)


def count_rainbow_stackings(inst: StackingInstance, override: bool = False
                            ) -> tuple[int, int]:
    """``(Z, reduced)``: all stackings, and those with ``sigma_1 = id``."""
    limit = COUNT_GUARD.get(inst.m, COUNT_GUARD_DEFAULT)
    if inst.m > 1 and inst.n > limit and not override:
        raise CapabilityError(f"exact counting guarded to n <= {limit} for m = {inst.m}")
    nfact = math.factorial(inst.n)
    if inst.m == 1 or inst.n < 2:
        reduced = nfact ** (inst.m - 1)
    elif inst.r < inst.m:
        reduced = 0
    else:
        s = _Search(inst, UNLIMITED, fail_first=False)
        s.run(0, count_all=True)
        reduced = s.solutions
    return nfact * reduced, reduced


def count_rainbow_stackings_brute(inst: StackingInstance) -> int:
    """Z by checking every tuple in ``S_n^m`` (tiny instances only)."""
    perms = list(Perm.all(inst.n))
    return sum(1 for t in itertools.product(perms, repeat=inst.m)
               if is_rainbow_stacking(inst, t))


def _check_nmr(n: int, m: int, r: int) -> None:
    if n < 0 or m < 1:
        raise InputError("need n >= 0 and m >= 1")
    if r < 1:
        raise InputError("palette size r must be at least 1")


def first_moment_exact(n: int, m: int, r: int) -> tuple[Fraction, Fraction]:
    """``(E_{n,m,r}, E[Z])`` as exact rationals."""
    _check_nmr(n, m, r)
    E = Fraction(1)
    for i in range(1, m):
        E *= Fraction(r - i, r) ** num_edges(n)
    return E, math.factorial(n) ** m * E


def first_moment(n: int, m: int, r) -> tuple[mpmath.mpf, mpmath.mpf]:
    """``(E_{n,m,r}, n!^m E_{n,m,r})`` accumulated in log space."""
    _check_nmr(n, m, r)
    ne = num_edges(n)
    with mpmath.workdps(MP_DPS):
        r = mpmath.mpf(r)
        if ne and any(i >= r for i in range(1, m)):
            return mpmath.mpf(0), mpmath.mpf(0)
        logE = ne * mpmath.fsum(mpmath.log1p(-i / r) for i in range(1, m))
        logZ = m * mpmath.loggamma(n + 1) + logE
        return +mpmath.exp(logE), +mpmath.exp(logZ)


def first_moment_upper_bound(n: int, m: int, r) -> mpmath.mpf:
    """``n! exp((m-1) log n! - C(m,2) C(n,2) / r)``."""
    _check_nmr(n, m, r)
    with mpmath.workdps(MP_DPS):
        lf = mpmath.loggamma(n + 1)
        return +mpmath.exp(lf + (m - 1) * lf - math.comb(m, 2) * num_edges(n) / mpmath.mpf(r))


def log_factorial(n: int) -> float:
    """``log n!``; summed term by term (``math.fsum``) up to 10^6."""
    if n < 0:
        raise InputError("n must be nonnegative")
    if n <= 10 ** 6:
        return math.fsum(math.log(i) for i in range(2, n + 1))
    return math.lgamma(n + 1)


def threshold_formulas(n: int, m: int, omega: float = 0.0) -> tuple[float, float, float]:
    """``(r_star, r_lower, r_upper)`` bracketing the existence threshold.

    ``r_star = m C(n,2) / (2 log n!)``; below ``r_lower`` stackings are
    absent w.h.p., above ``r_upper`` they exist w.h.p.
    """
    if n < 2:
        raise InputError("threshold formulas need n >= 2")
    lf = log_factorial(n)
    ln = math.log(n)
    r_star = m * num_edges(n) / (2 * lf)
    slack = omega / ln ** 2
    return r_star, r_star - slack, r_star + (2 * m - 1) / 3 + m / (2 * ln) + slack


def find_distinct_sum_bijection(k: int, A, B) -> dict[int, int] | None:
    """A bijection ``A -> B`` with all ``a ^ sigma(a)`` distinct, or ``None``."""
    A, B = sorted(set(A)), sorted(set(B))
    if len(A) != len(B):
        raise InputError(f"|A| = {len(A)} differs from |B| = {len(B)}")
    for x in A + B:
        if not 0 <= x < 1 << k:
            raise InputError(f"{x} is not a {k}-bit vector")
    assign: dict[int, int] = {}
    used_b: set[int] = set()
    sums: set[int] = set()

    def rec(i: int) -> bool:
        if i == len(A):
            return True
        a = A[i]
        for b in B:
            s = a ^ b
            if b in used_b or s in sums:
                continue
            assign[a] = b
            used_b.add(b)
            sums.add(s)
            if rec(i + 1):
                return True
            del assign[a]
            used_b.discard(b)
            sums.discard(s)
        return False

    return dict(assign) if rec(0) else None


def format_instance(inst: StackingInstance) -> str:
    return f"{inst.n} {inst.m} {inst.r}\n" + "".join(format_coloring(c) for c in inst.colorings)


def parse_instance(text: str) -> StackingInstance:
    """Header ``n m r`` followed by ``m`` colorings, each either as a
    two-line block (``n r`` then colors) or as a bare colors line."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty instance")
    try:
        n, m, r = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise InputError(f"bad instance header {lines[0]!r}") from exc
    body = lines[1:]
    if num_edges(n) == 0:
        # colors lines are empty and were dropped
        cols = [EdgeColoring(n, r, ()) for _ in range(m)]
    elif len(body) == 2 * m:
        cols = [parse_coloring(body[2 * i], body[2 * i + 1]) for i in range(m)]
    elif len(body) == m:
        cols = [parse_coloring(f"{n} {r}", body[i]) for i in range(m)]
    else:
        raise InputError(f"expected {m} colorings after header, found {len(body)} lines")
    return StackingInstance(n, m, r, tuple(cols))


def write_instance(inst: StackingInstance, path) -> None:
    Path(path).write_text(format_instance(inst), encoding="utf-8", newline="\n")


def read_instance(path) -> StackingInstance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    return parse_instance(text)
