"""Numerical checks of two inequalities used in the second-moment estimate.

``gamma_lemma_check`` sweeps ``Gamma(h(K-t)+1) 2^t t! >= Gamma(h(K)+1)`` with
``h(x) = (1 + sqrt(1 + 8x)) / 2`` (so that ``h(x)(h(x)-1)/2 = x``).

``phi_concavity_check`` probes ``phi_q(f) = -log Gamma(f+1) + q C(f,2)`` on
the integer grid: discrete concavity, whether the maximum over an integer
interval sits at an endpoint, and the averaging identity in ``q``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import InputError

__all__ = ["h", "phi", "GammaReport", "PhiReport", "gamma_lemma_check",
           "phi_concavity_check"]

GAMMA_RTOL = 1e-9
PHI_ATOL = 1e-9


def h(x: float) -> float:
    return (1 + math.sqrt(1 + 8 * x)) / 2


def phi(q: float, f: float) -> float:
    return -math.lgamma(f + 1) + q * f * (f - 1) / 2


@dataclass
class GammaReport:
    K_max: int
    pairs_checked: int
    passed: bool
    min_log_slack: float          # min over (K, t) of log(LHS / RHS)
    argmin: tuple[int, int]
    failures: list[tuple[int, int]]


def gamma_lemma_check(K_max: int, rtol: float = GAMMA_RTOL) -> GammaReport:
    """Evaluate both sides in log space for all ``0 <= t <= K <= K_max``."""
    if K_max < 0:
        raise InputError("K_max must be nonnegative")
    floor = math.log1p(-rtol)
    best, arg, failures, count = math.inf, (0, 0), [], 0
    for K in range(K_max + 1):
        rhs = math.lgamma(h(K) + 1)
        for t in range(K + 1):
            lhs = math.lgamma(h(K - t) + 1) + t * math.log(2) + math.lgamma(t + 1)
            slack = lhs - rhs
            count += 1
            if slack < best:
                best, arg = slack, (K, t)
            if slack < floor:
                failures.append((K, t))
    return GammaReport(K_max, count, not failures, best, arg, failures)


@dataclass
class PhiReport:
    q: float
    f_max: int
    concave: bool
    max_second_difference: float
    first_convex_point: int | None    # least f with a positive second difference
    endpoint_max: bool
    intervals_checked: int
    merge_identity: bool
    zero_at_origin: bool

    @property
    def passed(self) -> bool:
        return self.concave and self.endpoint_max and self.merge_identity and self.zero_at_origin


def phi_concavity_check(q: float, f_max: int, intervals: int = 2000,
                        seed: int = 0, atol: float = PHI_ATOL) -> PhiReport:
    """Second differences of ``phi_q`` at ``f = 1..f_max-1`` must be ``<= atol``;
    on random integer intervals the maximum must be attained at an endpoint."""
    if q < 0:
        raise InputError("q must be nonnegative")
    if f_max < 2:
        raise InputError("f_max must be at least 2")
    vals = [phi(q, f) for f in range(f_max + 1)]
    worst, first_bad = -math.inf, None
    for f in range(1, f_max):
        d2 = vals[f + 1] - 2 * vals[f] + vals[f - 1]
        worst = max(worst, d2)
        if d2 > atol and first_bad is None:
            first_bad = f
    rng = random.Random(seed)
    endpoint_ok = True
    for _ in range(intervals):
        a = rng.randrange(f_max + 1)
        b = rng.randrange(a, f_max + 1)
        inner = max(vals[a:b + 1])
        if inner > max(vals[a], vals[b]) + atol:
            endpoint_ok = False
            break
    q2 = q + 1.0
    mid = (q + q2) / 2
    merge_ok = all(abs(phi(q, f) + phi(q2, f) - 2 * phi(mid, f)) <= atol * max(1.0, abs(phi(mid, f)))
                   for f in range(0, f_max + 1, max(1, f_max // 1000)))
    return PhiReport(q, f_max, first_bad is None, worst, first_bad, endpoint_ok,
                     intervals, merge_ok, phi(q, 0) == 0)
