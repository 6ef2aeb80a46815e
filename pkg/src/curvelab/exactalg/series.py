"""Truncated univariate power series with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class _AboveTruncation:
    """Sentinel returned by order queries that hit the truncation boundary."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AboveTruncation"

    def __reduce__(self):
        return (_AboveTruncation, ())


AboveTruncation = _AboveTruncation()


class TruncSeries:
    """sum c_k t^k for 0 <= k <= T, known exactly up to ``T``.

    Coefficients beyond the truncation order are unknown, not zero.
    Binary operations carry the smaller truncation of their operands.
    """

    __slots__ = ("coeffs", "T")

    def __init__(self, coeffs: Iterable | Mapping[int, object], T: int):
        if T < 0:
            raise ValueError("truncation order must be non-negative")
        dense = [Fraction(0)] * (T + 1)
        items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
        for k, c in items:
            if k < 0:
                raise ValueError("negative exponent in a power series")
            if k <= T:
                dense[k] += Fraction(c)
        self.coeffs = tuple(dense)
        self.T = T

    @classmethod
    def _raw(cls, dense, T):
        s = object.__new__(cls)
        s.coeffs = tuple(dense)
        s.T = T
        return s

    @classmethod
    def zero(cls, T: int) -> "TruncSeries":
        return cls._raw([Fraction(0)] * (T + 1), T)

    @classmethod
    def one(cls, T: int) -> "TruncSeries":
        return cls.monomial(0, T)

    @classmethod
    def monomial(cls, k: int, T: int, c=1) -> "TruncSeries":
        dense = [Fraction(0)] * (T + 1)
        if k <= T:
            dense[k] = Fraction(c)
        return cls._raw(dense, T)

    def truncate(self, T: int) -> "TruncSeries":
        if T > self.T:
            raise ValueError("cannot raise the truncation order of a series")
        return TruncSeries._raw(self.coeffs[: T + 1], T)

    def order(self):
        """Exponent of the first nonzero coefficient, or AboveTruncation."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return AboveTruncation

    def __getitem__(self, k: int) -> Fraction:
        if k > self.T:
            raise IndexError(f"coefficient {k} lies above truncation order {self.T}")
        return self.coeffs[k]

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries({0: Fraction(other)}, self.T)

    def __add__(self, other):
        other = self._coerce(other)
        T = min(self.T, other.T)
        return TruncSeries._raw([a + b for a, b in zip(self.coeffs[: T + 1], other.coeffs)], T)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw([-c for c in self.coeffs], self.T)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            c = Fraction(other)
            return TruncSeries._raw([c * a for a in self.coeffs], self.T)
        T = min(self.T, other.T)
        out = [Fraction(0)] * (T + 1)
        b = other.coeffs
        for i, a in enumerate(self.coeffs[: T + 1]):
            if not a:
                continue
            for j in range(T + 1 - i):
                if b[j]:
                    out[i + j] += a * b[j]
        return TruncSeries._raw(out, T)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a truncated series")
        result = TruncSeries.one(self.T)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def t_derivative(self) -> "TruncSeries":
        """t * d/dt, which keeps the truncation order."""
        return TruncSeries._raw([k * c for k, c in enumerate(self.coeffs)], self.T)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by t^k."""
        dense = [Fraction(0)] * k + list(self.coeffs)
        return TruncSeries._raw(dense[: self.T + 1], self.T)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self.T == other.T and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.T, self.coeffs))

    def as_dict(self) -> dict:
        return {k: c for k, c in enumerate(self.coeffs) if c}

    def __repr__(self):
        terms = [f"{c}*t^{k}" for k, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"TruncSeries({body} + O(t^{self.T + 1}))"


class SeriesTuple(tuple):
    """One truncated series per branch, all with the same truncation order."""

    def __new__(cls, components):
        comps = tuple(components)
        if not comps:
            raise ValueError("a series tuple needs at least one component")
        if len({c.T for c in comps}) != 1:
            raise ValueError("components must share a truncation order")
        return super().__new__(cls, comps)

    @property
    def T(self) -> int:
        return self[0].T

    def orders(self) -> tuple:
        return tuple(c.order() for c in self)

    def __mul__(self, other):
        if isinstance(other, SeriesTuple):
            return SeriesTuple(a * b for a, b in zip(self, other))
        return SeriesTuple(a * other for a in self)

    def __add__(self, other):
        return SeriesTuple(a + b for a, b in zip(self, other))
