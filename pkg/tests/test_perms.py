import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rainbowstack.errors import InputError
from rainbowstack.perms import (
    Edge, Perm, apply_to_edge, cycle_stats, edge_index, edges, fixed_edge_count,
    identity_tuple, index_edge, num_edges, perm_count_bound, perm_count_exact,
    weight_report,
)


@st.composite
def perms(draw, n=None, min_n=1, max_n=8):
    if n is None:
        n = draw(st.integers(min_n, max_n))
    return Perm(tuple(draw(st.permutations(range(n)))))


@st.composite
def perm_tuples(draw, max_n=7, max_m=4):
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(2, max_m))
    return tuple(draw(perms(n=n)) for _ in range(m))


# -- frozen examples ----------------------------------------------------------

def test_edge_index_examples():
    assert edge_index((0, 1), 4) == 0
    assert edge_index((2, 3), 4) == 5
    assert edge_index((0, 2), 4) == 1
    assert edges(4) == [Edge(0, 1), Edge(0, 2), Edge(1, 2), Edge(0, 3), Edge(1, 3), Edge(2, 3)]


def test_apply_to_edge_examples():
    s = Perm((1, 0, 3, 2))
    assert apply_to_edge(Perm.identity(4), (1, 3)) == Edge(1, 3)
    assert apply_to_edge(s, (0, 1)) == Edge(0, 1)
    assert apply_to_edge(s, (0, 2)) == Edge(1, 3)


def test_cycle_stats_examples():
    assert cycle_stats(Perm.identity(4)) == (4, 0)
    assert cycle_stats(Perm((1, 0, 3, 2))) == (0, 2)
    assert cycle_stats(Perm((1, 0, 2, 3))) == (2, 1)


def test_fixed_edge_count_examples():
    assert fixed_edge_count(Perm.identity(4)) == 6
    assert fixed_edge_count(Perm((1, 0, 2, 3))) == 2
    assert fixed_edge_count(Perm((1, 2, 3, 0))) == 0


def test_weight_report_examples():
    assert weight_report(identity_tuple(4, 2)).total_wt == 6
    assert weight_report((Perm.identity(4), Perm((1, 0, 2, 3)))).total_wt == 2
    rep = weight_report(identity_tuple(3, 3))
    assert rep.total_wt == 9
    assert rep.tree_bound == 9
    assert [(s.k, s.k2) for s in rep.p] == [(0, 1), (0, 2)]


def test_perm_count_examples():
    assert perm_count_bound(3, 3, 0) == 1
    assert perm_count_bound(4, 2, 1) == 6 == perm_count_exact(4, 2, 1)
    assert perm_count_bound(4, 0, 2) == 3 == perm_count_exact(4, 0, 2)
    assert isinstance(perm_count_bound(7, 1, 2), Fraction)


def test_perm_count_bound_dominates_exact():
    for n in range(0, 9):
        for f in range(n + 1):
            for t in range((n - f) // 2 + 1):
                bound, exact = perm_count_bound(n, f, t), perm_count_exact(n, f, t)
                assert bound >= exact
                if n - f - 2 * t == 0:
                    assert bound == exact
                if n - f - 2 * t == 1:
                    # one leftover point would be an extra fixed point
                    assert exact == 0


def test_parse_and_errors():
    assert Perm.parse("1,0,2,3") == Perm((1, 0, 2, 3))
    assert str(Perm((2, 0, 1))) == "2,0,1"
    with pytest.raises(InputError):
        Perm((0, 0, 1))
    with pytest.raises(InputError):
        Perm.parse("a,b")
    with pytest.raises(InputError):
        apply_to_edge(Perm.identity(3), (1, 1))
    with pytest.raises(InputError):
        weight_report((Perm.identity(3),))
    with pytest.raises(InputError):
        perm_count_bound(4, 3, 1)


# -- properties ---------------------------------------------------------------

@given(st.integers(0, 64))
@settings(max_examples=30)
def test_edge_index_bijection(n):
    idx = [edge_index(e, n) for e in edges(n)]
    assert idx == list(range(num_edges(n)))
    assert all(index_edge(i, n) == e for i, e in zip(idx, edges(n)))


@given(perms(), st.data())
def test_group_laws(p, data):
    q = data.draw(perms(n=p.n))
    assert p.compose(p.inverse()).is_identity()
    assert p.inverse().inverse() == p
    for e in edges(p.n):
        assert apply_to_edge(p * q, e) == apply_to_edge(p, apply_to_edge(q, e))


@given(perms())
def test_fixed_edges_from_cycle_stats(p):
    f, t = cycle_stats(p)
    assert fixed_edge_count(p) == math.comb(f, 2) + t


@given(perm_tuples())
@settings(max_examples=200)
def test_weight_report_invariants(pi):
    rep = weight_report(pi)
    m = len(pi)
    assert rep.total_wt == sum(s.wt for s in rep.pair_stats)
    assert rep.total_wt <= rep.tree_bound
    assert len(rep.p) == m - 1
    seen = {0}
    changed = True
    while changed:
        changed = False
        for s in rep.p:
            if (s.k in seen) != (s.k2 in seen):
                seen |= {s.k, s.k2}
                changed = True
    assert seen == set(range(m))
    wts = [s.wt for s in rep.L]
    assert wts == sorted(wts, reverse=True)


@given(perm_tuples(), st.data())
@settings(max_examples=100)
def test_weight_invariant_under_common_relabeling(pi, data):
    tau = data.draw(perms(n=pi[0].n))
    shifted = tuple(tau * p for p in pi)
    assert weight_report(shifted).total_wt == weight_report(pi).total_wt
