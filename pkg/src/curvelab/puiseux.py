"""Rational Newton-Puiseux: branch parametrizations of a reduced plane curve over Q.

Each branch is returned once, as (c * t^n, y(t)) or with the roles of x and
y exchanged, truncated at a requested order.  Edge polynomials must split
over Q; otherwise UnsupportedCoefficientField is raised.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, gcd

import sympy

from .branch import CurveSpec, Parametrization
from .errors import NonReducedInput, TruncationTooSmall, UnsupportedCoefficientField
from .exactalg import BivarPoly, TruncSeries, poly_eval_series

_MAX_DEPTH = 64


def _to_sympy(f: BivarPoly):
    x, y = sympy.symbols("x y")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x ** a * y ** b for (a, b), c in f.terms.items())
    return sympy.Poly(expr, x, y, domain="QQ")


def check_reduced(f: BivarPoly) -> None:
    if f.is_zero():
        raise NonReducedInput("the zero polynomial does not define a curve")
    _, factors = _to_sympy(f).sqf_list()
    for fac, mult in factors:
        if mult > 1:
            raise NonReducedInput(f"repeated factor ({fac.as_expr()})^{mult}")


def _rational_roots(coeffs: list) -> list:
    """Nonzero rational roots with multiplicities of sum coeffs[k] T^k."""
    T = sympy.Symbol("T")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], T, domain="QQ")
    _, factors = poly.factor_list()
    roots = []
    for fac, mult in factors:
        if fac.degree() == 0:
            continue
        if fac.degree() > 1:
            raise UnsupportedCoefficientField(
                f"edge polynomial factor {fac.as_expr()} has no rational root; branches need an algebraic extension")
        a, b = fac.all_coeffs()
        root = Fraction(int(sympy.numer(-b / a)), int(sympy.denom(-b / a)))
        if root:
            roots.append((root, mult))
    roots.sort()
    return roots


def _lower_edges(points: set) -> list:
    """Edges (q, m, l) of the Newton polygon with finite positive slope, steepest first.

    Points are (i, j) for X^i Y^j; an edge lies on q*i + m*j = l and the
    branches it carries satisfy Y ~ c * X^(m/q).
    """
    j_min = min(j for _, j in points)
    start = min((i, j) for i, j in points if j == j_min)
    i_min = min(i for i, _ in points)
    end = min(((i, j) for i, j in points if i == i_min), key=lambda p: p[1])
    edges = []
    cur = start
    while cur != end:
        best = None
        for p in points:
            if p[1] <= cur[1] or p[0] >= cur[0]:
                continue
            slope = Fraction(cur[0] - p[0], p[1] - cur[1])
            if best is None or slope > best[0] or (slope == best[0] and p[1] > best[1][1]):
                best = (slope, p)
        slope, nxt = best
        m, q = slope.numerator, slope.denominator
        edges.append((q, m, q * cur[0] + m * cur[1]))
        cur = nxt
    return edges


def _substitute(F: BivarPoly, xi: Fraction, q: int, m: int, l: int, u: int, v: int) -> BivarPoly:
    """F(xi^v X^q, X^m (xi^u + Y)) / X^l."""
    out: dict = {}
    xu = xi ** u
    for (i, j), c in F.terms.items():
        base = c * (xi ** v) ** i
        ex = q * i + m * j - l
        for k in range(j + 1):
            term = base * comb(j, k) * xu ** (j - k)
            if term:
                key = (ex, k)
                out[key] = out.get(key, 0) + term
    return BivarPoly({k: c for k, c in out.items() if c})


def _series_inverse(s: TruncSeries) -> TruncSeries:
    c0 = s[0]
    inv0 = 1 / c0
    out = [inv0]
    for k in range(1, s.T + 1):
        acc = sum((s[i] * out[k - i] for i in range(1, k + 1)), Fraction(0))
        out.append(-acc * inv0)
    return TruncSeries(out, s.T)


def _solve_regular(F: BivarPoly, P: int) -> TruncSeries:
    """The series S(X) = O(X) with F(X, S) = 0, up to X^P; needs dF/dY(0,0) != 0."""
    Fy = F.dy()
    S = TruncSeries.zero(P)
    N = 1
    while True:
        N = min(2 * N, P + 1)
        T = N - 1
        X = TruncSeries.monomial(1, T)
        St = S.truncate(T)
        val = poly_eval_series(F, X, St)
        der = poly_eval_series(Fy, X, St)
        St = St - val * _series_inverse(der)
        S = TruncSeries(St.coeffs, P)
        if N == P + 1:
            return S


class _Chart:
    """x = cx * X^nx and y = A(X) + bc * X^bm * Y for the current chart."""

    def __init__(self, cx=Fraction(1), nx=1, A=None, bc=Fraction(1), bm=0):
        self.cx, self.nx = Fraction(cx), nx
        self.A = dict(A or {})
        self.bc, self.bm = Fraction(bc), bm

    def step(self, xi, q, m, u, v) -> "_Chart":
        s = xi ** v
        A = {e * q: c * s ** e for e, c in self.A.items()}
        bc = self.bc * s ** self.bm
        bm = self.bm * q + m
        A[bm] = A.get(bm, 0) + bc * xi ** u
        return _Chart(self.cx * s ** self.nx, self.nx * q, {e: c for e, c in A.items() if c}, bc, bm)


def _branches(F: BivarPoly, chart: _Chart, K: int, top_filter, depth: int, out: list) -> None:
    if depth > _MAX_DEPTH:
        raise NonReducedInput("Newton-Puiseux did not separate the branches (repeated factor?)")
    points = set(F.terms)
    j_min = min(j for _, j in points)
    if j_min > 1:
        raise NonReducedInput("repeated branch found during Newton-Puiseux")
    if j_min == 1 and (top_filter is None or top_filter(None)):
        out.append((chart, None))
    if j_min == 1:
        F = BivarPoly({(i, j - 1): c for (i, j), c in F.terms.items()})
        points = set(F.terms)
    if (0, 1) in points and (0, 0) not in points and depth > 0:
        out.append((chart, F))
        return
    if all(j == 0 for _, j in points):
        return
    for q, m, l in _lower_edges(points):
        if top_filter is not None and not top_filter(Fraction(m, q)):
            continue
        on_edge = {(i, j): c for (i, j), c in F.terms.items() if q * i + m * j == l}
        j0 = min(j for _, j in on_edge)
        deg = (max(j for _, j in on_edge) - j0) // q
        coeffs = [Fraction(0)] * (deg + 1)
        for (i, j), c in on_edge.items():
            coeffs[(j - j0) // q] += c
        for xi, _mult in _rational_roots(coeffs):
            if m == 1:
                u, v = 1, q - 1
            else:
                u = pow(q, -1, m)
                v = (u * q - 1) // m
            F1 = _substitute(F, xi, q, m, l, u, v)
            _branches(F1, chart.step(xi, q, m, u, v), K, None, depth + 1, out)


def _finish(chart: _Chart, F, K: int, swapped: bool) -> Parametrization:
    y = dict(chart.A)
    precision = None
    if F is not None:
        P = K - chart.bm
        if P >= 1:
            S = _solve_regular(F, P)
            for k, c in S.as_dict().items():
                e = k + chart.bm
                y[e] = y.get(e, 0) + chart.bc * c
        precision = K
    y = {e: c for e, c in y.items() if c and (precision is None or e <= precision)}
    xpart = {chart.nx: chart.cx}
    if swapped:
        return Parametrization(y, xpart, precision)
    return Parametrization(xpart, y, precision)


def puiseux_branches(f: BivarPoly, K: int) -> list:
    """Branches of f = 0 at the origin, each expanded up to t^K."""
    check_reduced(f)
    if f.constant_term():
        return []
    results = []
    for swapped in (False, True):
        F = f if not swapped else BivarPoly({(b, a): c for (a, b), c in f.terms.items()})
        # x-tangent branches are found in the first pass, the rest after swapping
        if swapped:
            keep = lambda s: s is None or s > 1
        else:
            keep = lambda s: s is None or s >= 1
        found: list = []
        _branches(F, _Chart(), K, keep, 0, found)
        for chart, G in found:
            results.append(_finish(chart, G, K, swapped))
    return results


def curve_from_polynomial(f: BivarPoly, precision: int | None = None, name: str = "") -> CurveSpec:
    """A CurveSpec for f = 0 with expansions long enough for the value computations.

    Without an explicit precision the expansion order doubles until every
    intersection multiplicity and twice the semigroup conductor fit.
    """
    K = precision or 64
    while True:
        branches = puiseux_branches(f, K)
        if not branches:
            raise NonReducedInput("the curve does not pass through the origin")
        curve = CurveSpec(branches, name=name, polynomial=f)
        try:
            need = curve.required_precision() + 2 * max(p.multiplicity for p in branches)
        except TruncationTooSmall:
            if precision is not None:
                raise
            K *= 2
            continue
        if precision is not None or K >= need:
            return curve
        K = need


def curve_from_branch_equations(items, precision: int | None = None, name: str = "") -> CurveSpec:
    """A CurveSpec with one branch per item.

    An item is either an exact Parametrization or an equation with a single
    branch at the origin, which is expanded far enough for the value sets.
    """
    items = list(items)
    if all(isinstance(it, Parametrization) for it in items):
        return CurveSpec(items, name=name)
    K = precision or 64
    while True:
        branches, implicit = [], []
        for f in items:
            if isinstance(f, Parametrization):
                branches.append(f)
                implicit.append(None)
                continue
            found = puiseux_branches(f, K)
            if len(found) != 1:
                raise NonReducedInput(f"expected one branch per equation, found {len(found)}")
            branches.append(found[0])
            implicit.append(f)
        curve = CurveSpec(branches, implicit=implicit, name=name)
        try:
            need = curve.required_precision() + 2 * max(p.multiplicity for p in branches)
        except TruncationTooSmall:
            if precision is not None:
                raise
            K *= 2
            continue
        if precision is not None or K >= need:
            return curve
        K = need


def newton_puiseux(f: BivarPoly, K: int | None = None) -> list:
    """Branches of f = 0 at the origin; K defaults to an order that fixes every value set."""
    if K is not None:
        return puiseux_branches(f, K)
    return list(curve_from_polynomial(f).branches)
