import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from rainbowstack.colorings import EdgeColoring, cayley_sum_pair, pullback, random_coloring
from rainbowstack.errors import CapabilityError, InputError
from rainbowstack.perms import Perm, num_edges
from rainbowstack.stacking import (
    MP_DPS,    SearchBudget, SearchStatus, StackingInstance, count_rainbow_stackings,
    count_rainbow_stackings_brute, find_distinct_sum_bijection,
    find_rainbow_stacking, first_moment, first_moment_exact,
    first_moment_upper_bound, format_instance, is_rainbow_stacking,
    log_factorial, parse_instance, read_instance, threshold_formulas,
    write_instance,
)

from test_perms import perms


def inst(*cols, n=None, r=None):
    if n is None:
        n = {1: 2, 3: 3, 6: 4, 10: 5}[len(cols[0])]
    if r is None:
        r = max(max(c, default=0) for c in cols) + 1
    return StackingInstance.of(*(EdgeColoring(n, r, tuple(c)) for c in cols))


@st.composite
def instances(draw, max_n=5, max_m=3, max_r=4):
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(1, max_m))
    r = draw(st.integers(1, max_r))
    seed = draw(st.integers(0, 2 ** 32))
    return StackingInstance(n, m, r, tuple(random_coloring(n, r, seed + k) for k in range(m)))


# -- frozen examples ----------------------------------------------------------

def test_is_rainbow_examples():
    one = inst((0, 1, 2))
    assert is_rainbow_stacking(one, (Perm((2, 0, 1)),))
    for s in Perm.all(2):
        for t in Perm.all(2):
            assert is_rainbow_stacking(inst((0,), (1,)), (s, t))
            assert not is_rainbow_stacking(inst((0,), (0,), r=2), (s, t))


def test_find_examples():
    out = find_rainbow_stacking(inst((0, 0, 0), (0, 0, 0), (0, 0, 0), r=2))
    assert out.status is SearchStatus.EXHAUSTED and out.nodes_expanded == 0
    out = find_rainbow_stacking(inst((0,), (1,)))
    assert out.status is SearchStatus.FOUND
    c1, c2 = cayley_sum_pair(3, 0, 1, 2, 3)
    out = find_rainbow_stacking(StackingInstance.of(c1, c2))
    assert out.status is SearchStatus.EXHAUSTED and out.complete


def test_count_examples():
    assert count_rainbow_stackings(inst((0,), (1,))) == (4, 2)
    assert count_rainbow_stackings(inst((0, 1, 2), (0, 1, 2))) == (12, 2)
    assert count_rainbow_stackings(inst((0,), (0,), r=2)) == (0, 0)


def test_small_n_is_trivial():
    # K_0 and K_1 have no edges, so every tuple is rainbow even when r < m
    for n in (0, 1):
        I = StackingInstance.of(*(EdgeColoring(n, 1, ()) for _ in range(3)))
        assert find_rainbow_stacking(I).found
        assert count_rainbow_stackings(I) == (1, 1)


def test_first_moment_examples():
    assert first_moment_exact(3, 2, 3) == (Fraction(8, 27), Fraction(32, 3))
    E, EZ = first_moment(3, 2, 3)
    with mpmath.workdps(MP_DPS):
        assert mpmath.almosteq(E, mpmath.mpf(8) / 27, 1e-35)
        assert mpmath.almosteq(EZ, mpmath.mpf(32) / 3, 1e-35)
    assert first_moment_exact(7, 1, 2) == (1, math.factorial(7))
    assert first_moment_exact(2, 2, 2) == (Fraction(1, 2), 2)
    # mean of Z over all four coloring pairs of K_2 with r = 2
    Zs = [count_rainbow_stackings(inst((a,), (b,), r=2))[0] for a in range(2) for b in range(2)]
    assert Fraction(sum(Zs), 4) == 2
    b = first_moment_upper_bound(3, 2, 3)
    with mpmath.workdps(MP_DPS):
        assert mpmath.almosteq(b, 36 / mpmath.e, 1e-30)
    assert first_moment_upper_bound(5, 1, 3) == pytest.approx(120, rel=1e-15)


def test_first_moment_dominated_by_bound_on_grid():
    for n in range(2, 9):
        for m in range(1, 5):
            for r in range(1, 21):
                assert first_moment(n, m, r)[1] <= first_moment_upper_bound(n, m, r)
                E = first_moment_exact(n, m, r)[0]
                with mpmath.workdps(MP_DPS):
                    assert mpmath.almosteq(first_moment(n, m, r)[0], mpmath.mpf(E.numerator) / E.denominator, 1e-30)


def test_threshold_examples():
    r_star, lo, hi = threshold_formulas(12, 2, 0)
    assert r_star == pytest.approx(66 / math.log(479001600), rel=1e-12)
    assert r_star == pytest.approx(3.302, abs=5e-4)
    assert lo == r_star
    assert hi - lo == pytest.approx(1 + 2 / (2 * math.log(12)), rel=1e-12)
    assert threshold_formulas(2, 2, 0)[0] == pytest.approx(1 / math.log(2), rel=1e-12)
    for m in (2, 3, 5):
        lo, hi = threshold_formulas(20, m, 3.0)[1:]
        assert hi - lo == pytest.approx((2 * m - 1) / 3 + m / (2 * math.log(20)) + 6 / math.log(20) ** 2)


def test_log_factorial():
    for n in (0, 1, 2, 10, 170, 5000):
        assert log_factorial(n) == pytest.approx(math.lgamma(n + 1), rel=1e-13)


def test_distinct_sum_examples():
    sigma = find_distinct_sum_bijection(2, range(4), range(4))
    assert sigma is not None
    assert len({a ^ b for a, b in sigma.items()}) == 4
    assert find_distinct_sum_bijection(3, [5], [2]) == {5: 2}
    assert find_distinct_sum_bijection(2, [0, 1], [0, 1]) is None


def test_budget_reports_inconclusive():
    c1, c2 = cayley_sum_pair(3, 0, 1, 2, 3)
    out = find_rainbow_stacking(StackingInstance.of(c1, c2), SearchBudget(max_nodes=10))
    assert out.status is SearchStatus.BUDGET and not out.complete and out.witness is None


def test_count_guard():
    I = StackingInstance(7, 2, 3, (random_coloring(7, 3, 1), random_coloring(7, 3, 2)))
    with pytest.raises(CapabilityError):
        count_rainbow_stackings(I)


def test_instance_roundtrip(tmp_path):
    I = StackingInstance(5, 3, 4, tuple(random_coloring(5, 4, s) for s in range(3)))
    write_instance(I, tmp_path / "a.inst")
    assert read_instance(tmp_path / "a.inst") == I
    bare = "3 2 3\n0 1 2\n2 1 0\n"
    assert parse_instance(bare) == parse_instance(format_instance(parse_instance(bare)))
    with pytest.raises(InputError):
        parse_instance("3 2 3\n0 1 2\n")
    with pytest.raises(InputError):
        read_instance(tmp_path / "missing.inst")


def test_instance_validation():
    with pytest.raises(InputError):
        StackingInstance.of(EdgeColoring(3, 3, (0, 1, 2)), EdgeColoring(2, 3, (0,)))


# -- oracles and properties ---------------------------------------------------

@given(instances(max_n=4, max_m=3))
@settings(max_examples=80, deadline=None)
def test_count_matches_brute_force(I):
    if I.m == 3 and I.n == 4:
        return
    Z, reduced = count_rainbow_stackings(I)
    assert Z == count_rainbow_stackings_brute(I)
    assert Z == math.factorial(I.n) * reduced


@given(instances())
@settings(max_examples=150, deadline=None)
def test_search_is_complete_and_sound(I):
    out = find_rainbow_stacking(I)
    assert out.complete
    if out.found:
        assert is_rainbow_stacking(I, out.witness)
        assert out.witness[0].is_identity()
    elif I.n <= 4 and I.m <= 2:
        assert count_rainbow_stackings_brute(I) == 0
    ff = find_rainbow_stacking(I, fail_first=True)
    assert ff.found == out.found
    if ff.found:
        assert is_rainbow_stacking(I, ff.witness)


@given(instances(max_n=5, max_m=2), st.data())
@settings(max_examples=60, deadline=None)
def test_orbit_and_pullback_invariance(I, data):
    base = count_rainbow_stackings(I)[0]
    taus = [data.draw(perms(n=I.n)) for _ in range(I.m)]
    moved = StackingInstance(I.n, I.m, I.r, tuple(pullback(c, t) for c, t in zip(I.colorings, taus)))
    assert count_rainbow_stackings(moved)[0] == base
    out = find_rainbow_stacking(I)
    if out.found:
        tau = data.draw(perms(n=I.n))
        assert is_rainbow_stacking(I, tuple(tau * s for s in out.witness))


@given(instances(max_n=5, max_m=2), st.data())
@settings(max_examples=60, deadline=None)
def test_color_relabeling_invariance(I, data):
    mapping = data.draw(st.permutations(range(I.r)))
    # one palette bijection applied to every layer preserves rainbowness
    relabeled = StackingInstance(I.n, I.m, I.r, tuple(c.relabel_colors(mapping) for c in I.colorings))
    assert count_rainbow_stackings(relabeled) == count_rainbow_stackings(I)


def test_mean_count_equals_first_moment():
    # exact enumeration over all coloring pairs, n <= 3, m = 2, r <= 3
    for n in (2, 3):
        ne = num_edges(n)
        for r in (1, 2, 3):
            total = 0
            for cols in itertools.product(range(r), repeat=2 * ne):
                I = StackingInstance(n, 2, r, (EdgeColoring(n, r, cols[:ne]), EdgeColoring(n, r, cols[ne:])))
                total += count_rainbow_stackings(I)[0]
            assert Fraction(total, r ** (2 * ne)) == first_moment_exact(n, 2, r)[1]
