from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvelab.branch import Parametrization, char_data, implicitize
from curvelab.errors import NonReducedInput, UnsupportedCoefficientField
from curvelab.exactalg import BivarPoly, poly_eval_series
from curvelab.puiseux import check_reduced, curve_from_polynomial, newton_puiseux, puiseux_branches

X, Y = BivarPoly.x(), BivarPoly.y()


def same_up_to_constant(f, g):
    return f.normalized() == g.normalized()


def exact_equation(p):
    return implicitize(Parametrization(p.x, p.y))


def test_cusp():
    (p,) = newton_puiseux(Y ** 2 - X ** 3)
    assert char_data(p).beta_bar == (2, 3)
    assert same_up_to_constant(exact_equation(p), Y ** 2 - X ** 3)


def test_five_eight_branch():
    (p,) = newton_puiseux(Y ** 5 - X ** 8 + 2 * X ** 5 * Y ** 2)
    swapped, n, _, coeffs = p.puiseux_form
    assert not swapped and n == 5 and min(coeffs) == 8
    assert char_data(p).beta_bar == (5, 8)


def test_node():
    branches = newton_puiseux(X * Y)
    assert sorted((p.orders for p in branches)) == [(1, float("inf")), (float("inf"), 1)]


def test_tangent_and_transverse_branches():
    f = (Y - X ** 2) * (Y ** 2 - X)
    branches = puiseux_branches(f, 12)
    assert len(branches) == 2
    prod = BivarPoly.const(1)
    for p in branches:
        prod = prod * exact_equation(p)
    assert same_up_to_constant(prod, f)


def test_six_nine_nineteen_branch_is_exact():
    f = Y ** 6 - 3 * X ** 3 * Y ** 4 - 2 * X ** 5 * Y ** 3 + 3 * X ** 6 * Y ** 2 - 6 * X ** 8 * Y - X ** 9 + X ** 10
    (p,) = puiseux_branches(f, 60)
    assert p.x == {6: 1} and p.y == {9: 1, 10: 1}


def test_truncated_branch_annihilates_equation_to_its_precision():
    f = (Y ** 2 - X ** 3) ** 2 - X ** 5 * Y
    (p,) = puiseux_branches(f, 40)
    assert poly_eval_series(f, p.x_series(40), p.y_series(40)).is_zero()
    assert poly_eval_series(f, p.x_series(90), p.y_series(90)).order() > 40


def test_irrational_coefficient():
    with pytest.raises(UnsupportedCoefficientField):
        newton_puiseux(Y ** 2 - 2 * X ** 2)


def test_non_reduced():
    with pytest.raises(NonReducedInput):
        check_reduced((Y ** 2 - X ** 3) ** 2)


def test_curve_from_polynomial_reads_intersections():
    f = (Y ** 2 - X ** 3) * ((Y - X ** 2) ** 2 - X ** 3)
    curve = curve_from_polynomial(f)
    assert curve.intersection(0, 1) == 7
    assert curve.equation() == f


branch = st.tuples(
    st.sampled_from([(2, 3), (2, 5), (3, 4), (3, 5), (1,)]),
    st.lists(st.integers(-2, 2).filter(bool), min_size=2, max_size=2),
)


@settings(max_examples=15, deadline=None)
@given(st.lists(branch, min_size=1, max_size=2))
def test_puiseux_then_implicitize_recovers_the_curve(specs):
    params = []
    for beta, cs in specs:
        if beta == (1,):
            params.append(Parametrization({1: 1}, {2: cs[0]}))
        else:
            params.append(Parametrization.puiseux(beta[0], {beta[1]: cs[0], beta[1] + 1: cs[1]}))
    eqs = [implicitize(p) for p in params]
    if len(eqs) == 2 and eqs[0] == eqs[1]:
        return
    f = BivarPoly.const(1)
    for e in eqs:
        f = f * e
    found = puiseux_branches(f, 40)
    assert len(found) == len(eqs)
    g = BivarPoly.const(1)
    for p in found:
        g = g * exact_equation(p)
    assert same_up_to_constant(g, f)
