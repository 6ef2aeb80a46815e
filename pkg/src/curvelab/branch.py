"""Single-branch data: parametrizations, characteristic exponents, valuations, intersections."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Mapping

from .errors import ConsistencyError, DegenerateInput, InvalidParametrization, TruncationTooSmall
from .exactalg import AboveTruncation, BivarPoly, TruncSeries, berkowitz, poly_eval_series

DEFAULT_T_CAP = 4096


def _clean(coeffs: Mapping[int, object]) -> dict[int, Fraction]:
    out = {}
    for j, c in coeffs.items():
        c = Fraction(c)
        if c:
            if j < 0:
                raise InvalidParametrization("negative exponent in a parametrization")
            out[int(j)] = c
    return out


class Parametrization:
    """A branch t -> (x(t), y(t)) with polynomial coordinates.

    ``precision`` is None for an exact polynomial parametrization.  For a
    truncated Puiseux expansion it is the highest exponent whose coefficient
    is known to be correct; the true branch may differ above it.
    """

    __slots__ = ("x", "y", "precision", "__dict__")

    def __init__(self, x: Mapping[int, object], y: Mapping[int, object], precision: int | None = None):
        self.x = _clean(x)
        self.y = _clean(y)
        self.precision = precision
        if not self.x and not self.y:
            raise InvalidParametrization("both coordinates vanish identically")
        if 0 in self.x or 0 in self.y:
            raise InvalidParametrization("a branch must pass through the origin")
        exps = list(self.x) + list(self.y)
        g = 0
        for e in exps:
            g = gcd(g, e)
        if g != 1 and precision is None:
            raise InvalidParametrization(f"exponents share the common factor {g}; parametrization is not primitive")

    @classmethod
    def puiseux(cls, n: int, y_coeffs: Mapping[int, object], x_scale=1, precision: int | None = None):
        """(x_scale * t^n, sum a_j t^j)."""
        if n < 1:
            raise InvalidParametrization("multiplicity must be positive")
        return cls({n: x_scale}, y_coeffs, precision)

    def __eq__(self, other):
        return (isinstance(other, Parametrization) and self.x == other.x and self.y == other.y
                and self.precision == other.precision)

    def __hash__(self):
        return hash((tuple(sorted(self.x.items())), tuple(sorted(self.y.items())), self.precision))

    def __repr__(self):
        def fmt(d):
            return " + ".join(f"{c}*t^{j}" for j, c in sorted(d.items())) or "0"
        tail = "" if self.precision is None else f", precision={self.precision}"
        return f"Parametrization(x={fmt(self.x)}, y={fmt(self.y)}{tail})"

    @property
    def max_exact_order(self) -> float:
        return float("inf") if self.precision is None else self.precision

    def truncated(self, K: int) -> "Parametrization":
        """Drop terms above t^K; the result is only trusted up to K."""
        if self.precision is not None:
            K = min(K, self.precision)
        x = {j: c for j, c in self.x.items() if j <= K}
        y = {j: c for j, c in self.y.items() if j <= K}
        return Parametrization(x, y, precision=K)

    def x_series(self, T: int) -> TruncSeries:
        return TruncSeries(self.x, T)

    def y_series(self, T: int) -> TruncSeries:
        return TruncSeries(self.y, T)

    @cached_property
    def orders(self) -> tuple:
        ox = min(self.x) if self.x else float("inf")
        oy = min(self.y) if self.y else float("inf")
        return ox, oy

    @property
    def multiplicity(self) -> int:
        return int(min(self.orders))

    @cached_property
    def puiseux_form(self):
        """(swapped, n, scale, coeffs) with the main coordinate equal to scale * t^n.

        ``swapped`` is True when the roles of x and y are exchanged.
        """
        ox, oy = self.orders
        if len(self.x) == 1 and ox <= oy:
            return False, int(ox), self.x[int(ox)], dict(self.y)
        if len(self.y) == 1 and oy <= ox:
            return True, int(oy), self.y[int(oy)], dict(self.x)
        raise InvalidParametrization(
            "parametrization is not in Puiseux form: the lower-order coordinate must be a monomial")


@dataclass(frozen=True)
class CharData:
    beta: tuple
    beta_bar: tuple
    e: tuple
    n_seq: tuple
    conductor: int

    @property
    def g(self) -> int:
        return len(self.beta) - 1

    @property
    def multiplicity(self) -> int:
        return self.beta_bar[0]

    @property
    def delta(self) -> int:
        return self.conductor // 2

    @property
    def ng_betabar_g(self) -> int:
        """n_g * beta_bar_g; zero for a smooth branch, where every pair counts as diagonal."""
        if self.g == 0:
            return 0
        return self.n_seq[-1] * self.beta_bar[-1]

    def as_dict(self) -> dict:
        return {"g": self.g, "beta": list(self.beta), "beta_bar": list(self.beta_bar),
                "e": list(self.e), "n": list(self.n_seq), "conductor": self.conductor}


def char_data(p: Parametrization) -> CharData:
    _, n, _, coeffs = p.puiseux_form
    beta = [n]
    e = [n]
    exps = sorted(j for j, c in coeffs.items() if c)
    while e[-1] > 1:
        nxt = next((j for j in exps if j % e[-1]), None)
        if nxt is None and p.precision is not None:
            raise TruncationTooSmall("characteristic exponents not complete within the known precision", p.precision)
        if nxt is None:
            raise InvalidParametrization("exponents never reach gcd 1 (non-primitive or truncated too early)")
        if p.precision is not None and nxt > p.precision:
            raise TruncationTooSmall("characteristic exponent beyond known precision", p.precision)
        beta.append(nxt)
        e.append(gcd(e[-1], nxt))
    g = len(beta) - 1
    n_seq = [e[i - 1] // e[i] for i in range(1, g + 1)]
    beta_bar = [beta[0]]
    if g >= 1:
        beta_bar.append(beta[1])
    for i in range(1, g):
        beta_bar.append(n_seq[i - 1] * beta_bar[i] + beta[i + 1] - beta[i])
    conductor = sum((n_seq[i - 1] - 1) * beta_bar[i] for i in range(1, g + 1)) - beta_bar[0] + 1
    return CharData(tuple(beta), tuple(beta_bar), tuple(e), tuple(n_seq), conductor)


def valuation(p: Parametrization, h: BivarPoly, T: int):
    """ord_t h(x(t), y(t)), or AboveTruncation when it exceeds the usable order."""
    if T < 1:
        raise ValueError("truncation order must be at least 1")
    T = int(min(T, p.max_exact_order))
    return poly_eval_series(h, p.x_series(T), p.y_series(T)).order()


def implicitize(p: Parametrization) -> BivarPoly:
    """Minimal polynomial of the branch: Res_t(x - x(t), y - y(t)), normalized.

    With the main coordinate s * t^n, the resultant is the characteristic
    polynomial of multiplication by the other coordinate on Q[x][t]/(t^n - x/s).
    """
    swapped, n, scale, coeffs = p.puiseux_form
    X = BivarPoly.x()
    inv_scale = 1 / Fraction(scale)
    zero = BivarPoly()
    M = [[zero] * n for _ in range(n)]
    for k in range(n):
        for j, c in coeffs.items():
            m = k + j
            q, rem = divmod(m, n)
            M[rem][k] = M[rem][k] + (X * inv_scale) ** q * c
    cp = berkowitz(M, BivarPoly.const(1), zero)
    f = BivarPoly()
    for i, ci in enumerate(cp):
        f = f + ci * BivarPoly.monomial(0, n - i)
    if swapped:
        f = BivarPoly({(b, a): c for (a, b), c in f.terms.items()})
    return f.normalized()


@dataclass
class CurveSpec:
    """A reduced curve given branch by branch.

    ``implicit`` optionally carries each branch's own equation; missing
    entries are recovered by implicitization when needed.  ``polynomial``
    is the defining equation when the curve was given as one.
    """

    branches: list
    implicit: list = field(default_factory=list)
    name: str = ""
    polynomial: BivarPoly | None = None

    def __post_init__(self):
        if not self.branches:
            raise InvalidParametrization("a curve needs at least one branch")
        self.implicit = list(self.implicit) + [None] * (len(self.branches) - len(self.implicit))
        self._I: dict = {}

    @property
    def r(self) -> int:
        return len(self.branches)

    @cached_property
    def chars(self) -> list:
        return [char_data(p) for p in self.branches]

    def intersection(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in self._I:
            self._I[key] = intersection(self.branches[key[0]], self.branches[key[1]],
                                        f1=self.implicit[key[0]], f2=self.implicit[key[1]])
        return self._I[key]

    def intersections(self) -> dict:
        return {(i, j): self.intersection(i, j) for i in range(self.r) for j in range(i + 1, self.r)}

    def semigroup_conductor(self) -> tuple:
        """c_S = (c_i + sum_{j != i} I_ij)_i."""
        out = []
        for i in range(self.r):
            out.append(self.chars[i].conductor + sum(self.intersection(i, j) for j in range(self.r) if j != i))
        return tuple(out)

    def branch_equation(self, i: int) -> BivarPoly:
        if self.implicit[i] is None:
            p = self.branches[i]
            if p.precision is not None:
                raise TruncationTooSmall("cannot take the exact equation of a truncated expansion", p.precision)
            self.implicit[i] = implicitize(p)
        return self.implicit[i]

    def equation(self) -> BivarPoly:
        if self.polynomial is not None:
            return self.polynomial
        f = BivarPoly.const(1)
        for i in range(self.r):
            f = f * self.branch_equation(i)
        return f

    def required_precision(self) -> int:
        """Series order needed to read every value up to twice the conductor."""
        return 2 * max(self.semigroup_conductor()) + 2


def intersection(p1: Parametrization, p2: Parametrization, T: int | None = None,
                 f1: BivarPoly | None = None, f2: BivarPoly | None = None,
                 T_cap: int = DEFAULT_T_CAP) -> int:
    """[f1, f2]_0 = ord_t f2(phi1(t)), checked against ord_t f1(phi2(t)).

    With T given, a value above T raises TruncationTooSmall.  Without T the
    truncation starts small and doubles up to ``T_cap``.
    """
    exact_f1, exact_f2 = f1, f2
    if p1.precision is None and p2.precision is None and f1 is None and f2 is None:
        if implicitize(p1) == implicitize(p2):
            raise DegenerateInput("branches are not distinct")
    fixed = T is not None
    T = T or (p1.multiplicity * p2.multiplicity + 8)
    limit = min(p1.max_exact_order, p2.max_exact_order)
    while True:
        Te = int(min(T, limit))
        g2 = exact_f2 if exact_f2 is not None else implicitize(p2 if p2.precision is None else p2.truncated(Te))
        g1 = exact_f1 if exact_f1 is not None else implicitize(p1 if p1.precision is None else p1.truncated(Te))
        a = valuation(p1, g2, Te)
        b = valuation(p2, g1, Te)
        if a is not AboveTruncation and b is not AboveTruncation:
            if a != b:
                raise ConsistencyError(f"intersection multiplicity is not symmetric: {a} != {b}")
            if a >= limit:
                raise TruncationTooSmall("intersection reaches the precision of a truncated expansion", limit)
            return a
        if fixed:
            raise TruncationTooSmall(f"intersection multiplicity exceeds T={T}", T)
        if Te >= limit:
            raise TruncationTooSmall("intersection exceeds the precision of a truncated expansion", limit)
        if T >= T_cap:
            raise DegenerateInput("branches are not distinct (intersection multiplicity beyond the cap)")
        T = min(2 * T, T_cap)


@dataclass(frozen=True)
class DiagonalReport:
    equisingular: bool
    I: int
    ng_betabar_g: int
    diagonal: bool


def diagonal_check(p1: Parametrization, p2: Parametrization, I: int | None = None) -> DiagonalReport:
    c1, c2 = char_data(p1), char_data(p2)
    if I is None:
        I = intersection(p1, p2)
    eq = c1.beta_bar == c2.beta_bar
    bound = c1.ng_betabar_g
    return DiagonalReport(eq, I, bound, eq and I > bound)
