"""Deterministic checks on proper edge-colorings.

* The XOR sum-coloring pair on ``F_2^k`` minus two points, ``n = 2^k - 2``,
  admits no rainbow stacking.
* For odd ``n``, every pair of proper colorings of K_n admits one (checked
  exhaustively for small ``n``).

The odd-n check models a pair of proper colorings as two matching partitions
plus an identification of some classes of the first with classes of the
second (classes sharing a color). Writing ``C(sigma)`` for the set of class
pairs ``(A, B)`` that ``sigma`` stacks on a common position, an
identification ``phi`` is defeated exactly when it meets every ``C(sigma)``.
Identifying more classes only adds constraints, so it suffices to decide
whether some partial matching of classes meets all ``n!`` sets; a search over
such matchings replaces a loop over all maximal identifications.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

from .colorings import (
    MatchingPartition, canonical_partition, cayley_sum_pair,
    enumerate_matching_partitions, is_proper,
)
from .errors import CapabilityError, InputError
from .perms import Perm
from .stacking import (
    UNLIMITED, SearchBudget, SearchStatus, StackingInstance,
    find_distinct_sum_bijection, find_rainbow_stacking, format_instance,
)

__all__ = [
    "Verdict", "CayleyReport", "OddReport", "verify_cayley_no_stacking",
    "collision_in_every_bijection", "conflict_masks", "defeating_identification",
    "pair_admits_all_literal", "verify_odd_question", "maximal_identifications",
    "identified_instance",
]


class Verdict(str, enum.Enum):
    NO_STACKING = "no rainbow stacking (exhaustive)"
    STACKING_FOUND = "rainbow stacking found"
    ALL_ADMIT = "all pairs admit stackings"
    COUNTEREXAMPLE = "counterexample found"
    INCONCLUSIVE = "inconclusive (budget exhausted)"


@dataclass
class CayleyReport:
    k: int
    n: int
    verdict: Verdict
    nodes_expanded: int
    both_proper: bool
    colors_avoid_zero: bool
    # exhaustive check that every bijection has x != y with equal x ^ sigma(x)
    bijections_checked: int | None = None
    every_bijection_collides: bool | None = None
    distinct_sum_bijection: dict[int, int] | None = None


def collision_in_every_bijection(k: int, u1: int, v1: int, u2: int, v2: int
                                 ) -> tuple[int, bool]:
    """Check all bijections ``A -> B`` for a repeated sum ``z ^ sigma(z)``."""
    A = [z for z in range(1 << k) if z not in (u1, v1)]
    B = [z for z in range(1 << k) if z not in (u2, v2)]
    count = 0
    for img in itertools.permutations(B):
        count += 1
        if len({a ^ b for a, b in zip(A, img)}) == len(A):
            return count, False
    return count, True


def verify_cayley_no_stacking(k: int, budget: SearchBudget = UNLIMITED,
                              override: bool = False) -> CayleyReport:
    """Complete search on the sum-coloring pair with ``u1=0, v1=1, u2=2, v2=3``."""
    if k < 2:
        raise InputError("k must be at least 2")
    if k > 3 and not override:
        raise CapabilityError("k > 3 (n >= 14) requires an explicit override")
    u1, v1, u2, v2 = 0, 1, 2, 3
    chi1, chi2 = cayley_sum_pair(k, u1, v1, u2, v2)
    out = find_rainbow_stacking(StackingInstance.of(chi1, chi2), budget)
    verdict = {SearchStatus.FOUND: Verdict.STACKING_FOUND,
               SearchStatus.EXHAUSTED: Verdict.NO_STACKING,
               SearchStatus.BUDGET: Verdict.INCONCLUSIVE}[out.status]
    rep = CayleyReport(k, chi1.n, verdict, out.nodes_expanded,
                       is_proper(chi1) and is_proper(chi2),
                       0 not in chi1.colors and 0 not in chi2.colors)
    if k <= 3:
        rep.bijections_checked, rep.every_bijection_collides = \
            collision_in_every_bijection(k, u1, v1, u2, v2)
        A = [z for z in range(1 << k) if z not in (u1, v1)]
        B = [z for z in range(1 << k) if z not in (u2, v2)]
        rep.distinct_sum_bijection = find_distinct_sum_bijection(k, A, B)
    return rep


# -- odd n ------------------------------------------------------------------

def conflict_masks(P1: MatchingPartition, P2: MatchingPartition
                   ) -> tuple[list[list[int]], int]:
    """``masks[i][j]``: bit ``s`` set iff the s-th permutation (lexicographic)
    stacks an edge of class ``j`` of ``P2`` onto an edge of class ``i`` of ``P1``.
    Returns the masks and ``n!``."""
    n = P1.n
    cls1 = [0] * sum(len(c) for c in P1.classes)
    for i, cl in enumerate(P1.classes):
        for e in cl:
            cls1[e] = i
    masks = [[0] * len(P2.classes) for _ in P1.classes]
    count = 0
    for s, sigma in enumerate(Perm.all(n)):
        act = sigma.edge_action()
        for j, cl in enumerate(P2.classes):
            for e in cl:
                masks[cls1[act[e]]][j] |= 1 << s
        count += 1
    return masks, count


def defeating_identification(masks: list[list[int]], num_perms: int
                             ) -> tuple[list[tuple[int, int]] | None, int]:
    """A partial matching of classes whose conflict masks cover every
    permutation, or ``None``; also returns the number of search nodes."""
    p = len(masks)
    q = len(masks[0]) if masks else 0
    full = (1 << num_perms) - 1
    nodes = 0

    def rec(covered: int, used_i: int, used_j: int, chosen: list) -> list | None:
        nonlocal nodes
        nodes += 1
        if covered == full:
            return list(chosen)
        reach = covered
        for i in range(p):
            if not used_i >> i & 1:
                for j in range(q):
                    if not used_j >> j & 1:
                        reach |= masks[i][j]
        if reach != full:
            return None
        missing = ~covered & full
        s = (missing & -missing).bit_length() - 1
        for i in range(p):
            if used_i >> i & 1:
                continue
            for j in range(q):
                if used_j >> j & 1 or not masks[i][j] >> s & 1:
                    continue
                chosen.append((i, j))
                hit = rec(covered | masks[i][j], used_i | 1 << i, used_j | 1 << j, chosen)
                if hit is not None:
                    return hit
                chosen.pop()
        return None

    return rec(0, 0, 0, []), nodes


def maximal_identifications(p: int, q: int):
    """All injections from the smaller class set into the larger, as lists of
    ``(i, j)`` pairs (``i`` indexes the first partition)."""
    if p <= q:
        for js in itertools.permutations(range(q), p):
            yield list(zip(range(p), js))
    else:
        for is_ in itertools.permutations(range(p), q):
            yield list(zip(is_, range(q)))


def identified_instance(P1: MatchingPartition, P2: MatchingPartition,
                        ident: list[tuple[int, int]]) -> StackingInstance:
    """Colorings where class ``i`` of ``P1`` has color ``i`` and class ``j`` of
    ``P2`` shares the color of its partner, or gets a fresh color."""
    p = len(P1.classes)
    partner = {j: i for i, j in ident}
    labels2 = [partner.get(j, p + j) for j in range(len(P2.classes))]
    r = p + len(P2.classes)
    return StackingInstance.of(P1.to_coloring(r=r), P2.to_coloring(labels2, r=r))


def pair_admits_all_literal(P1: MatchingPartition, P2: MatchingPartition
                            ) -> tuple[bool, int, list[tuple[int, int]] | None]:
    """Run a complete stacking search for every maximal identification.

    Returns ``(all_admit, identifications_checked, first_failure)``.
    """
    checked = 0
    for ident in maximal_identifications(len(P1.classes), len(P2.classes)):
        checked += 1
        if not find_rainbow_stacking(identified_instance(P1, P2, ident)).found:
            return False, checked, ident
    return True, checked, None


@dataclass
class OddReport:
    n: int
    verdict: Verdict
    partitions: int
    iso_classes: int
    pairs_checked: int
    search_nodes: int
    counterexample: dict | None = None
    certificate_path: str | None = None
    per_pair: list[dict] = field(default_factory=list)


def _write_certificate(directory, n, P1, P2, ident, masks) -> str:
    inst = identified_instance(P1, P2, ident)
    transcript = json.dumps({"masks": [[hex(x) for x in row] for row in masks],
                             "identification": ident}, sort_keys=True)
    digest = hashlib.sha256(transcript.encode()).hexdigest()
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    stem = d / f"odd_n{n}_counterexample_{digest[:12]}"
    stem.with_suffix(".inst").write_text(format_instance(inst), encoding="utf-8")
    stem.with_suffix(".json").write_text(json.dumps(
        {"n": n, "P1": P1.classes, "P2": P2.classes, "identification": ident,
         "transcript_sha256": digest}, indent=2), encoding="utf-8")
    return str(stem.with_suffix(".inst"))


def verify_odd_question(n: int, override: bool = False,
                        certificate_dir=None) -> OddReport:
    """Check that every pair of proper colorings of K_n admits a stacking.

    Both partitions range over isomorphism classes (relabeling either copy's
    vertices permutes its stackings). All ``n!`` relative permutations are
    enumerated for every pair, so the result is exhaustive.
    """
    if n % 2 == 0 or n < 1:
        raise InputError("the odd-n check needs odd n")
    if n > 5 and not override:
        raise CapabilityError("n > 5 requires an explicit override")
    parts = list(enumerate_matching_partitions(n, override=override))
    reps = sorted({canonical_partition(P) for P in parts}, key=lambda P: P.classes)
    rep = OddReport(n, Verdict.ALL_ADMIT, len(parts), len(reps), 0, 0)
    for P1 in reps:
        for P2 in reps:
            masks, nperm = conflict_masks(P1, P2)
            ident, nodes = defeating_identification(masks, nperm)
            rep.pairs_checked += 1
            rep.search_nodes += nodes
            rep.per_pair.append({"P1": len(P1.classes), "P2": len(P2.classes),
                                 "nodes": nodes, "admits": ident is None})
            if ident is not None:
                rep.verdict = Verdict.COUNTEREXAMPLE
                rep.counterexample = {"P1": P1.classes, "P2": P2.classes,
                                      "identification": ident}
                if certificate_dir is not None:
                    rep.certificate_path = _write_certificate(
                        certificate_dir, n, P1, P2, ident, masks)
                return rep
    return rep
