from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CURVES, curve
from curvelab.branch import CurveSpec, Parametrization
from curvelab.exactalg import BivarPoly
from curvelab.experiment import Family, random_pair
from curvelab.invariants import (NotApplicable, branch_tjurina, delta_invariant, milnor, milnor_oracle,
                                 quotient_dimension, ratio_check, tjurina_berger, tjurina_closed, tjurina_oracle,
                                 verify_all)

X, Y = BivarPoly.x(), BivarPoly.y()
P = Parametrization.puiseux
CUSP = Y ** 2 - X ** 3
CUSP2 = (Y - X ** 2) ** 2 - X ** 3


class TestMilnor:
    def test_cusp(self):
        assert milnor(curve("cusp")) == 2

    def test_node(self):
        assert milnor(curve("node")) == 1

    def test_cusp_pair(self):
        assert milnor(curve("cusp_pair_7")) == 17

    @pytest.mark.parametrize("f, mu", [(CUSP, 2), (X * Y, 1), (CUSP * CUSP2, 17)])
    def test_oracle(self, f, mu):
        assert milnor_oracle(f) == mu


class TestDelta:
    def test_cusp(self):
        assert delta_invariant(curve("cusp")) == 1

    def test_cusp_pair(self):
        assert delta_invariant(curve("cusp_pair_7")) == 9

    def test_six_nine_nineteen_pair(self):
        spec = CurveSpec([P(6, {9: 1, 10: 1}), P(6, {9: 1, 10: 1, 11: 1})])
        assert delta_invariant(spec) == 100


class TestTjurina:
    def test_berger_cusp(self):
        assert tjurina_berger(curve("cusp")) == 2

    def test_berger_cusp_pair(self):
        assert tjurina_berger(curve("cusp_pair_7")) == 15

    def test_closed_cusp_pair(self):
        assert tjurina_closed(curve("cusp_pair_7")) == 15

    def test_closed_not_applicable_at_boundary(self):
        spec = CurveSpec([P(10, {14: 1, 15: 1}), P(10, {14: 1, 15: 2})])
        assert spec.intersection(0, 1) == 142
        assert tjurina_closed(spec) is NotApplicable

    def test_closed_not_applicable_for_one_branch(self):
        assert tjurina_closed(curve("cusp")) is NotApplicable

    @pytest.mark.parametrize("f, tau", [(CUSP, 2), (CUSP * CUSP2, 15), (X * Y, 1)])
    def test_oracle(self, f, tau):
        assert tjurina_oracle(f) == tau

    def test_certified_oracle_matches_unweighted(self):
        spec = curve("cusp_pair_7")
        assert tjurina_oracle(spec.equation(), spec) == tjurina_oracle(spec.equation())

    def test_non_quasihomogeneous_branch(self):
        # (t^4, t^6 + t^7) has mu = 16 and tau < mu
        p = P(4, {6: 1, 7: 1})
        tau = branch_tjurina(p)
        assert tau < 16
        assert tau == tjurina_oracle(CurveSpec([p]).equation(), CurveSpec([p]))

    def test_quotient_dimension_of_maximal_ideal_power(self):
        # C[x,y] / (x, y)^3 has dimension 6
        assert quotient_dimension([], (1, 1), 3) == 6


class TestRatio:
    def test_cusp_pair(self):
        rep = verify_all(curve("cusp_pair_7"), oracle=False)
        assert 4 * rep.tau - 3 * rep.mu == 9 == 2 * 7 - 2 * 2 - 1
        assert ratio_check(rep)

    def test_six_nine_nineteen_identity(self):
        spec = CurveSpec([P(6, {9: 1, 10: 1}), P(6, {9: 1, 10: 1, 11: 1})])
        rep = verify_all(spec, oracle=False)
        assert rep.mu == 199 and rep.tau == 157
        assert 4 * rep.tau - 3 * rep.mu == 31 == 2 * 58 - 2 * 42 - 1

    def test_quasihomogeneous_branch(self):
        rep = verify_all(curve("t34"), oracle=False)
        assert rep.ratio == 1


def test_verify_all_cusp_pair_passes():
    rep = verify_all(curve("cusp_pair_7"), branch_oracle=True)
    assert rep.passed
    expected = {"berger_vs_oracle", "closed_vs_berger", "conductor_lambda", "fibers_plus_I", "mu_two_way",
                "relation1", "theta_corollary", "theta_two_way", "delta_two_way", "mu_minus_tau_is_c"}
    assert expected <= set(rep.verdicts)


def test_report_json_is_plain():
    import json
    rep = verify_all(curve("cusp_pair_7"))
    data = rep.to_json()
    assert json.loads(json.dumps(data)) == data
    assert data["tau_closed"] == 15 and data["ratio_mu_tau"] == str(Fraction(17, 15))


@pytest.mark.parametrize("name", sorted(CURVES))
def test_catalogue_verdicts(name):
    rep = verify_all(curve(name), branch_oracle=True)
    assert rep.passed, rep.verdicts


families = st.sampled_from([(2, 3), (2, 5), (3, 4), (3, 5), (4, 6, 13)])


@settings(max_examples=12, deadline=None)
@given(families, st.integers(1, 4), st.integers(0, 10 ** 6))
def test_diagonal_pairs_follow_closed_formula(gens, excess, seed):
    import random
    fam = Family("h", gens, (), 1)
    I = fam.boundary + excess
    p1, p2 = random_pair(fam, I, random.Random(seed))
    spec = CurveSpec([p1, p2])
    rep = verify_all(spec)
    c = fam.conductor
    assert rep.passed, rep.verdicts
    assert rep.tau_berger == rep.tau_closed == rep.tau_oracle == 2 * I + c - 1
    assert rep.mu - rep.tau_berger == c
