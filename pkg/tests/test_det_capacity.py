import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from icregion import det_capacity as dc
from icregion.det_channel import ManyToOneGains, OneToManyGains, interference_sets
from icregion.region import contains, equals, scale, vertices

from test_det_channel import probe_levels

REF_VERTICES = (
    (0, 0, 0, 0), (0, 0, 0, 3), (0, 0, 1, 0), (0, 0, 1, 3), (0, 3, 0, 0), (0, 3, 0, 3),
    (0, 3, 1, 0), (0, 3, 1, 3), (1, 0, 1, 3), (1, 2, 1, 3), (2, 0, 0, 3), (2, 1, 0, 3),
    (2, 3, 0, 0), (2, 3, 0, 1), (2, 3, 1, 0), (2, 3, 1, 1), (3, 2, 1, 1), (4, 0, 1, 0),
    (4, 1, 0, 1), (4, 1, 1, 0), (5, 0, 0, 0))


def gains(max_k=3, top=5, min_k=0):
    return st.integers(min_k, max_k).flatmap(lambda k: st.builds(
        ManyToOneGains, st.just(k),
        st.lists(st.integers(0, top), min_size=k + 1, max_size=k + 1),
        st.lists(st.integers(0, top), min_size=k, max_size=k)))


def pos(x):
    return max(x, 0)


def rhs_by_counting(g, S):
    """Free levels plus, per shared level, max(1, number of S users probed there)."""
    levels = probe_levels(g)
    free = sum(pos(g.direct(i) - g.cross(i)) + pos(g.cross(i) - g.n00) for i in S)
    return free + sum(max(1, len(U & S)) for U in levels)


def support_outer_lp(g, w):
    """max w.r over the outer H-representation, by LP."""
    A, b = [], []
    for spec, h in dc.outer_constraints(g):
        A.append([float(c) for c in h.coeffs])
        b.append(float(h.rhs))
    res = linprog(-np.asarray(w, float), A_ub=A, b_ub=b, bounds=[(0, None)] * (g.k + 1),
                  method="highs")
    assert res.status == 0
    return -res.fun


def support_achievable_by_hand(g, w):
    """Support of free box + sum of per-level regions: each level gives max(w_0, sum_U w_i)."""
    total = 0
    for U in interference_sets(g).sets:
        total += max(w[0], sum(w[i] for i in U))
    for i in range(1, g.k + 1):
        total += w[i] * min(g.direct(i), pos(g.direct(i) - g.cross(i)) + pos(g.cross(i) - g.n00))
    return total


# ------------------------------------------------------------ building blocks

def test_f_free_examples(ref_channel):
    assert dc.f_free(ref_channel, 2) == 0
    assert dc.f_free(ManyToOneGains(1, (3, 4), (0,)), 1) == 4
    assert dc.f_free(ManyToOneGains(1, (3, 3), (3,)), 1) == 0
    with pytest.raises(dc.CapacityError):
        dc.f_free(ref_channel, 0)


def test_free_levels_caps_at_word_length():
    g = ManyToOneGains(1, (2, 1), (6,))
    assert dc.f_free(g, 1) == 4
    assert dc.free_levels(g, 1) == 1


def test_f_k_examples(ref_channel):
    U = interference_sets(ref_channel)
    assert dc.f_k(U, 4, {1, 2}) == 1
    assert dc.f_k(U, 2, {1, 2}) == 2
    assert dc.f_k(U, 3, {1, 2, 3}) == 2


def test_ref_channel_sum_facet(ref_channel):
    hs = dict(dc.outer_constraints(ref_channel))
    h = hs[dc.ConstraintSpec.sumrate({1, 2, 3})]
    assert h.coeffs == (1, 1, 1, 1) and h.rhs == 7
    assert rhs_by_counting(ref_channel, {1, 2, 3}) == 7


@given(gains(max_k=3, top=4, min_k=1))
def test_sumrate_rhs_matches_level_counting(g):
    for size in range(1, g.k + 1):
        for S in itertools.combinations(range(1, g.k + 1), size):
            assert dc.sumrate_rhs(g, S) == rhs_by_counting(g, frozenset(S))


def test_constraint_spec():
    assert str(dc.ConstraintSpec.sumrate([3, 1])) == "r_0+r_1+r_3"
    assert dc.ConstraintSpec.individual(2).coeffs(3) == (0, 0, 1, 0)
    with pytest.raises(dc.CapacityError):
        dc.ConstraintSpec.sumrate([])
    with pytest.raises(dc.CapacityError):
        dc.ConstraintSpec.sumrate([0, 1])


def test_subset_guard():
    g = ManyToOneGains(17, (1,) * 18, (1,) * 17)
    with pytest.raises(dc.CapacityError):
        dc.outer_constraints(g)


# ------------------------------------------------------------ outer bound / achievable

def test_ref_channel_vertices_frozen(ref_channel):
    assert vertices(dc.outer_bound(ref_channel)) == REF_VERTICES
    assert vertices(dc.achievable_region(ref_channel)) == REF_VERTICES


def test_k0_is_segment():
    g = ManyToOneGains(0, (4,), ())
    assert vertices(dc.outer_bound(g)) == ((0,), (4,))
    assert vertices(dc.achievable_region(g)) == ((0,), (4,))


def test_no_cross_gain_gives_box():
    g = ManyToOneGains(2, (3, 2, 4), (0, 0))
    assert set(vertices(dc.outer_bound(g))) == set(itertools.product((0, 3), (0, 2), (0, 4)))


def test_outer_excludes_overfull_user0(ref_channel):
    assert not contains(dc.outer_bound(ref_channel), (6, 0, 0, 0))


def test_per_level_regions():
    assert vertices(dc.per_level_region(frozenset(), 2)) == ((0, 0, 0), (1, 0, 0))
    assert set(vertices(dc.per_level_region(frozenset({1}), 1))) == {(0, 0), (1, 0), (0, 1)}
    c = dc.per_level_region(frozenset({1, 2}), 2)
    assert contains(c, (0, 1, 1)) and contains(c, (1, 0, 0))
    assert not contains(c, (1, 1, 0))


def test_motivating_example_corners():
    for n in (1, 2, 3):
        g = ManyToOneGains(2, (2 * n, n, n), (2 * n, 2 * n))
        reg = scale(dc.achievable_region(g), F(1, n))
        v = set(vertices(reg))
        assert (2, 0, 0) in v and (1, 1, 1) in v


@given(gains(max_k=3, top=4), st.lists(st.integers(0, 5), min_size=4, max_size=4))
def test_support_functions_agree(g, w):
    w = w[:g.k + 1]
    assert support_outer_lp(g, w) == pytest.approx(support_achievable_by_hand(g, w), abs=1e-7)


@given(gains(max_k=2, top=4))
def test_inner_equals_outer(g):
    assert equals(dc.achievable_region(g), dc.outer_bound(g))


# ------------------------------------------------------------ constraint graph

def test_ref_channel_graph(ref_channel):
    gr = dc.constraint_graph(ref_channel)
    i0, i1 = dc.ConstraintSpec.individual(0), dc.ConstraintSpec.individual(1)
    s123 = dc.ConstraintSpec.sumrate({1, 2, 3})
    assert gr.dashed[i0] == frozenset(range(1, 6)) and not gr.solid[i0]
    assert gr.solid[i1] == frozenset({1, 2, 3}) and not gr.dashed[i1]
    assert gr.solid[s123] == frozenset({2, 3}) and not gr.dashed[s123]
    assert len(gr.left) == 4 + 7


def edge_oracle_compatible(g, chosen):
    U = interference_sets(g).sets
    solid, dashed = set(), set()
    for c in chosen:
        for k, Uk in enumerate(U, 1):
            if c.kind == "individual":
                if c.users[0] == 0:
                    dashed.add(k)
                elif c.users[0] in Uk:
                    solid.add(k)
            else:
                n = len(Uk & set(c.users))
                if n >= 2:
                    solid.add(k)
                elif n == 0:
                    dashed.add(k)
    return not solid & dashed


def test_compatibility_examples(ref_channel):
    gr = dc.constraint_graph(ref_channel)
    s1, s3 = dc.ConstraintSpec.sumrate({1}), dc.ConstraintSpec.sumrate({3})
    assert dc.is_compatible(gr, [s1])
    assert dc.is_compatible(gr, [s1, s3]) == edge_oracle_compatible(ref_channel, [s1, s3])
    bad = [dc.ConstraintSpec.individual(0), dc.ConstraintSpec.sumrate({1, 2})]
    assert not dc.is_compatible(gr, bad)


@given(gains(max_k=3, top=4, min_k=1), st.data())
def test_compatibility_matches_edge_oracle(g, data):
    gr = dc.constraint_graph(g)
    chosen = data.draw(st.lists(st.sampled_from(gr.left), max_size=4, unique=True))
    assert dc.is_compatible(gr, chosen) == edge_oracle_compatible(g, chosen)


def test_consistency(ref_channel):
    outer = dc.outer_bound(ref_channel)
    assert dc.is_consistent(outer, [dc.ConstraintSpec.sumrate({1, 2, 3})])
    # r_0 = 5 forces every interferer sharing a level with user 0 to zero
    assert not dc.is_consistent(outer, [dc.ConstraintSpec.individual(0),
                                        dc.ConstraintSpec.individual(1)])
    for v in vertices(outer):
        assert dc.is_consistent(outer, dc.tight_constraints(ref_channel, v))


@given(gains(max_k=3, top=4))
def test_tight_sets_compatible(g):
    assert dc.incompatible_tight_sets(g) == []


def occluded(U, S, i):
    return all(len(Uk & S) >= 2 for Uk in U if i in Uk)


@given(gains(max_k=3, top=4, min_k=2))
def test_occlusion_reduction(g):
    U = interference_sets(g).sets
    for v in vertices(dc.outer_bound(g)):
        tight = dc.tight_constraints(g, v)
        for c in tight:
            if c.kind != "sumrate" or len(c.users) < 2:
                continue
            S = frozenset(c.users)
            for i in S:
                if occluded(U, S, i):
                    assert dc.ConstraintSpec.sumrate(S - {i}) in tight


# ------------------------------------------------------------ allocations

def test_allocation_all_user0(ref_channel):
    a = dc.allocation_for(ref_channel, [dc.ConstraintSpec.individual(0)])
    assert all(o.owner == dc.USER0 for o in a.owners)
    assert a.free_rates[0] == 0
    assert a.induced_rates(3)[0] == 5


def test_allocation_sum_facet(ref_channel):
    a = dc.allocation_for(ref_channel, [dc.ConstraintSpec.sumrate({1, 2, 3})])
    assert sum(a.induced_rates(3)) == 7


def test_allocation_incompatible(ref_channel):
    with pytest.raises(dc.AllocationError):
        dc.allocation_for(ref_channel, [dc.ConstraintSpec.individual(0), dc.ConstraintSpec.sumrate({1, 2})])


def test_allocation_json_round_trip(ref_channel):
    a = dc.allocation_for(ref_channel, [dc.ConstraintSpec.sumrate({1, 3})])
    d = a.to_json()
    assert {it["owner"] for it in d["levels"]} <= {"user0", "interferers", "silent"}
    assert dc.LevelAllocation.from_json(d) == a


def test_silent_and_full_user0_simulation(ref_channel):
    silent = dc.LevelAllocation((dc.LevelOwner(dc.SILENT),) * 5, (0, 0, 0, 0))
    rep = dc.verify_corner_zero_error(ref_channel, silent, 50, 1)
    assert rep["errors"] == 0 and rep["empirical_rates"] == [0, 0, 0, 0]
    full = dc.LevelAllocation((dc.LevelOwner(dc.USER0),) * 5, (0, 0, 0, 0))
    rep = dc.verify_corner_zero_error(ref_channel, full, 50, 1)
    assert rep["errors"] == 0 and rep["empirical_rates"][0] == 5


def test_invalid_allocation_rejected(ref_channel):
    bad = dc.LevelAllocation((dc.LevelOwner(dc.INTERFERERS, frozenset({2})),) + (dc.LevelOwner(dc.SILENT),) * 4,
                             (0, 0, 0, 0))
    with pytest.raises(dc.AllocationError):
        dc.verify_corner_zero_error(ref_channel, bad)
    with pytest.raises(dc.AllocationError):
        dc.LevelOwner(dc.INTERFERERS)


@given(gains(max_k=3, top=4), st.integers(0, 2**16))
def test_every_vertex_realized_without_error(g, seed):
    for v in vertices(dc.outer_bound(g)):
        a = dc.allocation_for(g, dc.tight_constraints(g, v), target=v)
        assert a.induced_rates(g.k) == v
        rep = dc.verify_corner_zero_error(g, a, 64, seed)
        assert rep["errors"] == 0
        assert tuple(rep["empirical_rates"]) == v


# ------------------------------------------------------------ one-to-many

def test_reversed_ref_channel(ref_channel):
    assert vertices(dc.one_to_many_outer(ref_channel.reversed())) == REF_VERTICES
    assert dc.reciprocity_check(ref_channel)
    assert dc.reciprocity_check(ManyToOneGains(0, (3,), ()))


def test_hk_projection_ref_channel(ref_channel):
    rev = ref_channel.reversed()
    assert equals(dc.one_to_many_hk_region(rev), dc.one_to_many_outer(rev))


def test_hk_single_pair_strong_interference():
    g = OneToManyGains(1, (2, 4), (3,))
    assert set(vertices(dc.one_to_many_hk_region(g))) == {(0, 0), (2, 0), (0, 4), (2, 2)}
    assert equals(dc.one_to_many_hk_region(g), dc.one_to_many_outer(g))


def test_hk_user0_alone():
    g = OneToManyGains(0, (3,), ())
    assert vertices(dc.one_to_many_hk_region(g)) == ((0,), (3,))


def test_hk_structure_fields():
    st_ = dc.hk_structure(OneToManyGains(2, (4, 1, 3), (5, 2)))
    assert st_.perm == (2, 1)
    assert st_.caps == (2, 2, 0)
    assert len(st_.lam) == 2


@given(gains(max_k=2, top=4))
def test_hk_region_equals_outer(g):
    rev = g.reversed()
    assert equals(dc.one_to_many_hk_region(rev), dc.one_to_many_outer(rev))


@given(gains(max_k=3, top=5))
def test_reciprocity(g):
    assert equals(dc.outer_bound(g), dc.one_to_many_outer(g.reversed()))
