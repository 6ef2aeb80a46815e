import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CURVES, kahler, semigroup
from curvelab.errors import ConductorViolation, NotASubset, NotInSet, OutOfBox
from curvelab.valueset import (BoxedValueSet, chain_distance, conductor, distance_diff, fiber, gh_colength, lattice,
                               maximals)
from curvelab.invariants import with_zero


def plane(hi=(4, 4)):
    return lattice(2, (0, 0), hi)


class TestFiber:
    def test_full_lattice(self):
        assert fiber(plane(), (0, 0), {0}) == "infinite"

    def test_semigroup_conductor_tail(self):
        assert fiber(semigroup("cusp_pair_7"), (9, 9), {0}) == "infinite"

    def test_maximal_point_has_empty_fiber(self):
        L = kahler("cusp_pair_7")
        assert maximals(L).maximals
        for m in maximals(L).maximals:
            assert fiber(L, m, {0}) == fiber(L, m, {1}) == "empty"

    def test_out_of_box(self):
        with pytest.raises(OutOfBox):
            fiber(plane(), (9, 0), {0})


class TestConductor:
    def test_lattice(self):
        assert conductor(plane()) == (0, 0)

    def test_semigroup_of_cusp_pair(self):
        assert conductor(semigroup("cusp_pair_7")) == (9, 9)

    def test_kahler_of_cusp_pair(self):
        assert conductor(kahler("cusp_pair_7")) == (6, 6)


class TestMaximals:
    def test_lattice_has_none(self):
        rep = maximals(plane())
        assert rep.maximals == rep.relative_maximals == rep.absolute_maximals == []

    def test_diagonal_pair_maximal(self):
        # I - beta_0 = 5 for the cusp pair with I = 7
        assert (5, 5) in maximals(kahler("cusp_pair_7")).absolute_maximals

    def test_conductor_ideal_has_none(self):
        assert maximals(lattice(2, (9, 9), (12, 12))).maximals == []


class TestChainDistance:
    def test_lattice(self):
        assert chain_distance(plane(), (0, 0), (2, 3)) == 5

    def test_cusp_delta(self):
        assert chain_distance(BoxedValueSet.numerical([2, 3]), (0,), (2,)) == 1

    def test_cusp_pair_delta(self):
        assert chain_distance(semigroup("cusp_pair_7"), (0, 0), (9, 9)) == 9

    def test_not_in_set(self):
        with pytest.raises(NotInSet):
            chain_distance(BoxedValueSet.numerical([2, 3]), (1,), (2,))


class TestDistanceDiff:
    def test_same_set(self):
        assert distance_diff(plane(), plane()) == 0

    def test_lambda_bar_minus_s(self):
        assert distance_diff(with_zero(kahler("cusp_pair_7")), semigroup("cusp_pair_7")) == 2

    def test_shifted_lattice(self):
        assert distance_diff(plane(), lattice(2, (1, 1), (4, 4))) == 2

    def test_not_subset(self):
        with pytest.raises(NotASubset):
            distance_diff(lattice(2, (1, 1), (4, 4)), plane())


class TestGhColength:
    def test_lattice(self):
        assert gh_colength(plane((5, 5)), (2, 3), (0, 0)) == 5

    def test_kahler_of_diagonal_pair(self):
        # I - 2 beta_0 + 1 with I = 7, beta_0 = 2
        assert gh_colength(kahler("cusp_pair_7"), (6, 6), (0, 4)) == 4

    def test_cusp(self):
        assert gh_colength(BoxedValueSet.numerical([2, 3]), (2,), (0,)) == 1

    def test_below_conductor(self):
        with pytest.raises(ConductorViolation):
            gh_colength(semigroup("cusp_pair_7"), (5, 5), (0, 0))


def test_json_round_trip():
    S = semigroup("cusp_triple")
    assert BoxedValueSet.from_json(S.to_json()) == S


# properties over every value set of the small curve catalogue

value_sets = st.sampled_from(sorted(CURVES)).flatmap(
    lambda name: st.sampled_from([semigroup(name), kahler(name)]))


def inner_points(E):
    return [p for p in E.points() if all(v < h for v, h in zip(p, E.box_max))]


@settings(max_examples=30, deadline=None)
@given(value_sets, st.randoms(use_true_random=False))
def test_min_closure(E, rnd):
    pts = E.points()
    for _ in range(20):
        a, b = rnd.choice(pts), rnd.choice(pts)
        assert tuple(min(u, v) for u, v in zip(a, b)) in E


@settings(max_examples=20, deadline=None)
@given(value_sets)
def test_exchange_property(E):
    if E.r == 1:
        return
    pts = inner_points(E)
    for a, b in product(pts, pts):
        if a == b:
            continue
        for j in range(E.r):
            if a[j] != b[j]:
                continue
            lo = [min(u, v) for u, v in zip(a, b)]
            hi = list(E.box_max)
            lo[j] = min(a[j] + 1, E.box_max[j])
            for i in range(E.r):
                if i != j and a[i] != b[i]:
                    hi[i] = lo[i]
            assert E._region(lo, hi).any(), (a, b, j)


@settings(max_examples=30, deadline=None)
@given(value_sets, st.randoms(use_true_random=False))
def test_chain_distance_is_additive(E, rnd):
    top = E.conductor()
    pts = [p for p in E.points() if all(v <= t for v, t in zip(p, top))]
    a = E.minimum()
    mid = rnd.choice(pts)
    if not all(u <= v for u, v in zip(a, mid)):
        return
    assert E.chain_distance(a, top) == E.chain_distance(a, mid) + E.chain_distance(mid, top)


@settings(max_examples=30, deadline=None)
@given(value_sets, st.integers(0, 2 ** 32))
def test_random_chains_have_equal_length(E, seed):
    top = E.conductor()
    assert E.chain_distance(E.minimum(), top) == E.chain_distance(E.minimum(), top, rng=random.Random(seed))


@pytest.mark.parametrize("name", sorted(CURVES))
def test_distance_diff_independent_of_gamma(name):
    S, L = semigroup(name), with_zero(kahler(name))
    c = S.conductor()
    far = tuple(v + 2 for v in S.box_max)
    lo = tuple(min(a, b) for a, b in zip(S.box_min, L.box_min))
    S2, L2 = S.with_box(lo, far), L.with_box(lo, far)
    assert distance_diff(L, S, c) == distance_diff(L2, S2, far)


@pytest.mark.parametrize("name", sorted(CURVES))
def test_gh_colength_matches_chain(name):
    for E in (semigroup(name), kahler(name)):
        c = E.conductor()
        assert E.gh_colength(c, E.theta_from_maximals()) == E.chain_distance(E.minimum(), c)
