"""Sparse bivariate polynomials over the rationals."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Mapping

from .series import TruncSeries


class BivarPoly:
    """sum c_ab x^a y^b, stored as a map (a, b) -> Fraction with no zero entries."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean = {}
        for (a, b), c in (terms or {}).items():
            if a < 0 or b < 0:
                raise ValueError("negative exponent in a polynomial")
            c = Fraction(c)
            if c:
                clean[(a, b)] = clean.get((a, b), Fraction(0)) + c
        self.terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def x(cls) -> "BivarPoly":
        return cls._raw({(1, 0): Fraction(1)})

    @classmethod
    def y(cls) -> "BivarPoly":
        return cls._raw({(0, 1): Fraction(1)})

    @classmethod
    def const(cls, c) -> "BivarPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, a: int, b: int, c=1) -> "BivarPoly":
        return cls({(a, b): c})

    def is_zero(self) -> bool:
        return not self.terms

    def _coerce(self, other):
        if isinstance(other, BivarPoly):
            return other
        return BivarPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return BivarPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, BivarPoly):
            c = Fraction(other)
            if not c:
                return BivarPoly._raw({})
            return BivarPoly._raw({k: c * v for k, v in self.terms.items()})
        out: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return BivarPoly._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = BivarPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, BivarPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == BivarPoly.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def dx(self) -> "BivarPoly":
        return BivarPoly._raw({(a - 1, b): a * c for (a, b), c in self.terms.items() if a})

    def dy(self) -> "BivarPoly":
        return BivarPoly._raw({(a, b - 1): b * c for (a, b), c in self.terms.items() if b})

    def deg_x(self) -> int:
        return max((a for a, _ in self.terms), default=-1)

    def deg_y(self) -> int:
        return max((b for _, b in self.terms), default=-1)

    def total_degree(self) -> int:
        return max((a + b for a, b in self.terms), default=-1)

    def order(self) -> int:
        """Lowest total degree of a term (the multiplicity at the origin)."""
        return min((a + b for a, b in self.terms), default=-1)

    def weighted_order(self, wx: int, wy: int) -> int:
        return min((wx * a + wy * b for a, b in self.terms), default=-1)

    def constant_term(self) -> Fraction:
        return self.terms.get((0, 0), Fraction(0))

    def coeff_y(self, b: int) -> dict:
        """Coefficient of y^b as a map a -> c (a polynomial in x)."""
        return {a: c for (a, bb), c in self.terms.items() if bb == b}

    def leading_y_coefficient(self) -> dict:
        return self.coeff_y(self.deg_y())

    def normalized(self) -> "BivarPoly":
        """Scale to integer coefficients with content 1 and positive leading y-coefficient.

        The leading y-coefficient's sign is read off its lowest x-power term.
        """
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        ints = {k: int(c * den) for k, c in self.terms.items()}
        g = 0
        for v in ints.values():
            g = gcd(g, v)
        lead = self.leading_y_coefficient()
        sign = 1 if lead[min(lead)] > 0 else -1
        return BivarPoly._raw({k: Fraction(sign * v // g) for k, v in ints.items()})

    def subs_xy(self, xval, yval):
        """Evaluate at arbitrary ring elements supporting +, *, ** (Horner in y)."""
        by_y: dict = {}
        for (a, b), c in self.terms.items():
            by_y.setdefault(b, {})[a] = c
        if not by_y:
            return 0 * xval
        xpow_cache = {}

        def xpow(a):
            if a not in xpow_cache:
                xpow_cache[a] = xval ** a
            return xpow_cache[a]

        def coeff(b):
            total = None
            for a, c in sorted(by_y.get(b, {}).items()):
                term = xpow(a) * c
                total = term if total is None else total + term
            return total

        top = max(by_y)
        acc = None
        for b in range(top, -1, -1):
            cb = coeff(b)
            if acc is None:
                acc = cb
            else:
                acc = acc * yval
                if cb is not None:
                    acc = acc + cb
        return acc

    def __call__(self, xval, yval):
        return self.subs_xy(xval, yval)

    def __repr__(self):
        return f"BivarPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][1])):
            mon = []
            if a:
                mon.append("x" if a == 1 else f"x^{a}")
            if b:
                mon.append("y" if b == 1 else f"y^{b}")
            coef = str(c) if "/" not in str(c) else f"({c})"
            if not mon:
                parts.append(coef)
            elif c == 1:
                parts.append("*".join(mon))
            elif c == -1:
                parts.append("-" + "*".join(mon))
            else:
                parts.append(coef + "*" + "*".join(mon))
        return " + ".join(parts).replace("+ -", "- ")


def poly_eval_series(p: BivarPoly, x: TruncSeries, y: TruncSeries) -> TruncSeries:
    """p(x(t), y(t)) truncated at the common truncation order of x and y."""
    if x.T != y.T:
        raise ValueError("x and y must share a truncation order")
    if p.is_zero():
        return TruncSeries.zero(x.T)
    return p.subs_xy(x, y) + TruncSeries.zero(x.T)
