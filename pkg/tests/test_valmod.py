import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CURVES, curve, kahler, semigroup
from curvelab.branch import CurveSpec, Parametrization
from curvelab.valmod import (ValuedModule, jacobian_values, kahler_module, kahler_values, residue_values_irreducible,
                             ring_module, semigroup_values, theta, thetas)

P = Parametrization.puiseux


def members_below(E, top):
    return [v for v in range(E.box_min[0], top) if (v,) in E]


class TestValueSets:
    def test_cusp_semigroup(self):
        S = semigroup_values(CurveSpec([P(2, {3: 1})]))
        assert members_below(S, 8) == [0, 2, 3, 4, 5, 6, 7]

    def test_cusp_kahler(self):
        L = kahler_values(CurveSpec([P(2, {3: 1})]))
        assert members_below(L, 8) == [2, 3, 4, 5, 6, 7] and (1,) not in L

    def test_cusp_pair_semigroup(self):
        S = semigroup("cusp_pair_7")
        assert S.conductor() == (9, 9) and (2, 2) in S and (3, 3) in S and (1, 1) not in S

    def test_t34_kahler(self):
        L = kahler_values(CurveSpec([P(3, {4: 1})]))
        assert (5,) not in L
        assert all((v,) in L for v in (3, 4, 6, 7, 8, 9, 10))

    def test_diagonal_pair_kahler_conductor(self):
        assert kahler("cusp_pair_7").conductor() == (6, 6)


class TestJacobian:
    def test_cusp(self):
        J = jacobian_values(CurveSpec([P(2, {3: 1})]))
        assert members_below(J, 9) == [3, 4, 5, 6, 7, 8]

    def test_node(self):
        spec = curve("node")
        assert jacobian_values(spec) == kahler_values(spec).translate((0, 0))

    def test_diagonal_pair(self):
        spec = curve("cusp_pair_7")
        assert jacobian_values(spec) == kahler("cusp_pair_7").translate((8, 8))


class TestKernels:
    def test_log_values_of_diagonal_pair(self):
        N = kahler_module(curve("cusp_pair_7")).kernel_values([0])
        assert N.conductor() == (6,)
        assert [v for v in range(N.box_min[0], 10) if (v,) in N] == [6, 7, 8, 9]

    def test_ring_kernel_contains_shifted_semigroup(self):
        spec = curve("cusp_pair_7")
        N = ring_module(spec).kernel_values([0])
        S2 = semigroup_values(CurveSpec([spec.branches[1]]))
        for s in range(0, 12):
            if (s,) in S2:
                assert (7 + s,) in N


class TestResidues:
    def test_cusp(self):
        D = residue_values_irreducible(P(2, {3: 1}))
        assert (-2,) not in D and all((d,) in D for d in range(-1, 4))

    def test_t34(self):
        assert (-5,) in residue_values_irreducible(P(3, {4: 1}))

    def test_smooth(self):
        D = residue_values_irreducible(Parametrization({1: 1}, {}))
        assert (-1,) not in D and (0,) in D and (1,) in D


class TestTheta:
    def test_diagonal_pair(self):
        assert theta(curve("cusp_pair_7"), 1) == 4

    def test_single_branch(self):
        assert theta(curve("cusp"), 0) == 0

    def test_normalization_and_conductor_have_no_corrections(self):
        from curvelab.valueset import lattice
        assert lattice(2, (0, 0), (4, 4)).theta_from_maximals() == [0, 0]
        assert lattice(2, (9, 9), (12, 12)).theta_from_maximals() == [0, 0]

    def test_node_semigroup(self):
        # delta = 1 forces Theta_2 = 1 in the colength formula
        assert thetas(curve("node"), ring_module(curve("node")), semigroup("node")) == [0, 1]


@pytest.mark.parametrize("name", sorted(CURVES))
def test_relation_jacobian_is_shifted_kahler(name):
    spec = curve(name)
    shift = [c - 1 for c in spec.semigroup_conductor()]
    assert jacobian_values(spec) == kahler(name).translate(shift)


@pytest.mark.parametrize("name", sorted(CURVES))
def test_value_set_stable_under_larger_truncation(name):
    spec = curve(name)
    b0 = max(p.multiplicity for p in spec.branches)
    for base, E in ((ring_module(spec), semigroup(name)), (kahler_module(spec), kahler(name))):
        bigger = ValuedModule(spec, base.generators, [g + b0 for g in base.gamma], tag=base.tag)
        assert bigger.value_set() == E


@pytest.mark.parametrize("name", sorted(CURVES))
def test_theta_from_kernels_matches_maximals(name):
    L = kahler(name)
    assert thetas(curve(name), kahler_module(curve(name)), L) == L.theta_from_maximals()


def test_identical_branches_are_rejected():
    from curvelab.errors import DegenerateInput
    spec = CurveSpec([P(2, {3: 1}), P(2, {3: 1})])
    with pytest.raises(DegenerateInput):
        ring_module(spec)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([(2, 3), (2, 5), (3, 4), (3, 5), (4, 6, 7)]), st.integers(1, 3),
       st.integers(-2, 2).filter(bool))
def test_diagonal_points_in_kahler(beta, shift, a):
    base = {b: 1 for b in beta[1:]}
    k = beta[-1] + shift
    spec = CurveSpec([P(beta[0], base), P(beta[0], {**base, k: a})])
    S, L = ring_module(spec).value_set(), kahler_module(spec).value_set()
    top = min(S.box_max)
    assert all((v, v) in L for v in range(1, top + 1) if (v, v) in S)
