"""Dense echelon forms and ranks over Q and over prime fields.

Matrices are numpy arrays.  Over a prime p < 2**31 they are int64 with
entries in [0, p); larger primes and the rationals use object arrays of
Python ints / Fractions.  The same elimination code serves all three.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import sympy

DEFAULT_PRIME_BITS = 31
_SPLIT = 1 << 16


class PrimeField:
    exact = False

    def __init__(self, p: int):
        self.p = int(p)
        self.dtype = np.int64 if self.p < (1 << 31) else object

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def element(self, c) -> int:
        if isinstance(c, Fraction):
            den = c.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator {c.denominator} vanishes mod {self.p}")
            return c.numerator * pow(den, -1, self.p) % self.p
        return int(c) % self.p

    def array(self, values: Iterable) -> np.ndarray:
        return np.array([self.element(v) for v in values], dtype=self.dtype)

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(0)
            return out
        return np.zeros(shape, dtype=np.int64)

    def reduce(self, a):
        return a % self.p

    def inv(self, a) -> int:
        return pow(int(a), -1, self.p)

    def convolve(self, a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
        """Coefficients 0..n-1 of the product of two coefficient arrays."""
        a, b = a[:n], b[:n]
        out = self.zeros(n)
        if len(a) == 0 or len(b) == 0:
            return out
        if self.dtype is object:
            c = np.convolve(a, b) % self.p
        else:
            lo = np.convolve(a, b % _SPLIT)
            hi = np.convolve(a, b // _SPLIT) % self.p
            c = (lo % self.p + hi * _SPLIT) % self.p
        m = min(n, len(c))
        out[:m] = c[:m]
        return out


class RationalField:
    exact = True
    dtype = object
    p = 0

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def element(self, c) -> Fraction:
        return Fraction(c)

    def array(self, values: Iterable) -> np.ndarray:
        vals = [Fraction(v) for v in values]
        out = np.empty(len(vals), dtype=object)
        out[:] = vals
        return out

    def zeros(self, shape) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def reduce(self, a):
        return a

    def inv(self, a) -> Fraction:
        return 1 / Fraction(a)

    def convolve(self, a, b, n):
        out = self.zeros(n)
        for i, ai in enumerate(a[:n]):
            if ai:
                for j in range(min(len(b), n - i)):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return out


QQ = RationalField()


def prime_bits() -> int:
    """Modular prime size, overridable through CURVELAB_PRIME_BITS."""
    return int(os.environ.get("CURVELAB_PRIME_BITS", DEFAULT_PRIME_BITS))


_prime_config = {"seed": 20240611, "primes": None}


def configure_primes(seed: int | None = None, primes=None) -> None:
    """Set the seed for default prime selection, or pin an explicit prime list."""
    if seed is not None:
        _prime_config["seed"] = int(seed)
    _prime_config["primes"] = [int(q) for q in primes] if primes else None


def default_primes(count: int = 3) -> list[int]:
    pinned = _prime_config["primes"]
    if pinned:
        return list(pinned[:count])
    return random_primes(count, seed=_prime_config["seed"])


def random_primes(count: int, bits: int | None = None, seed: int = 0) -> list[int]:
    """``count`` distinct primes in [2**(bits-1), 2**bits), reproducible from ``seed``."""
    bits = bits or prime_bits()
    rng = random.Random(seed)
    primes: list[int] = []
    while len(primes) < count:
        start = rng.randrange(1 << (bits - 1), 1 << bits)
        p = sympy.nextprime(start)
        if p >= (1 << bits):
            p = sympy.prevprime(1 << bits)
        if p not in primes:
            primes.append(int(p))
    return primes


def to_field_matrix(rows: Sequence[Sequence], field) -> np.ndarray:
    rows = list(rows)
    ncols = len(rows[0]) if rows else 0
    M = field.zeros((len(rows), ncols))
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if v:
                M[i, j] = field.element(v)
    return M


def echelon(M: np.ndarray, field, cols: Sequence[int] | None = None, reduced: bool = False):
    """Row echelon form using pivots drawn from ``cols`` in the given order.

    Returns (E, pivots): the first len(pivots) rows of E carry a unit pivot at
    the listed column and vanish on every earlier column of ``cols``; the
    remaining rows vanish on all of ``cols``.  Row operations act on full
    rows, so E spans the same space as M.  ``M`` is not modified.
    """
    E = M.copy()
    nrows = E.shape[0]
    if cols is None:
        cols = range(E.shape[1])
    pivots: list[int] = []
    r = 0
    for c in cols:
        if r >= nrows:
            break
        nz = np.flatnonzero(E[r:, c] != 0)
        if len(nz) == 0:
            continue
        k = r + nz[0]
        if k != r:
            E[[r, k]] = E[[k, r]]
        inv = field.inv(E[r, c])
        E[r] = field.reduce(E[r] * inv)
        if reduced:
            targets = np.flatnonzero(E[:, c] != 0)
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.flatnonzero(E[r + 1:, c] != 0)
        if len(targets):
            E[targets] = field.reduce(E[targets] - np.outer(E[targets, c], E[r]))
        pivots.append(c)
        r += 1
    return E, pivots


def rank_over(M: np.ndarray, field) -> int:
    if M.size == 0:
        return 0
    return len(echelon(M, field)[1])


def rank(rows: Sequence[Sequence], mode: str = "auto", primes: Sequence[int] | None = None, seed: int = 0) -> int:
    """Row rank of a rational matrix.

    mode="exact" eliminates over Q.  mode="modular" returns the rank over the
    first prime (a lower bound for the rational rank).  mode="auto" computes
    it over two independent primes and falls back to exact elimination when
    they disagree.
    """
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    if mode == "exact":
        return rank_over(to_field_matrix(rows, QQ), QQ)
    primes = list(primes or random_primes(2, seed=seed))
    ranks = []
    for p in primes[: 1 if mode == "modular" else 2]:
        F = PrimeField(p)
        try:
            ranks.append(rank_over(to_field_matrix(rows, F), F))
        except ZeroDivisionError:
            ranks.append(None)
    if mode == "modular":
        if ranks[0] is None:
            raise ZeroDivisionError("matrix entry denominator vanishes modulo the chosen prime")
        return ranks[0]
    if len(ranks) == 2 and ranks[0] is not None and ranks[0] == ranks[1]:
        return ranks[0]
    return rank_over(to_field_matrix(rows, QQ), QQ)


class RowReducer:
    """Incrementally maintained reduced row echelon basis of a growing row space."""

    def __init__(self, field, ncols: int):
        self.field = field
        self.ncols = ncols
        self.rows = field.zeros((0, ncols))
        self.pivots: list[int] = []

    def reduce(self, v: np.ndarray) -> np.ndarray:
        if not self.pivots:
            return v.copy()
        coeffs = v[self.pivots]
        if self.field.exact:
            return v - (coeffs[:, None] * self.rows).sum(axis=0)
        return self.field.reduce(v - self.field.reduce(coeffs[:, None] * self.rows).sum(axis=0))

    def insert(self, v: np.ndarray):
        """Add v; returns the new pivot column or None if v was already in the span."""
        w = self.reduce(v)
        nz = np.flatnonzero(w != 0)
        if len(nz) == 0:
            return None
        q = int(nz[0])
        w = self.field.reduce(w * self.field.inv(w[q]))
        if self.pivots:
            self.rows = self.field.reduce(self.rows - np.outer(self.rows[:, q], w))
        self.rows = np.vstack([self.rows, w[None, :]])
        self.pivots.append(q)
        return q
