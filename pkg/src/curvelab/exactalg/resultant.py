"""Division-free determinants and resultants with polynomial entries."""

from __future__ import annotations

from typing import Sequence

from ..errors import InvalidElimination
from .poly import BivarPoly


def berkowitz(A: Sequence[Sequence], one, zero) -> list:
    """Coefficients [1, c1, ..., cn] of det(lambda*I - A), using ring operations only."""
    n = len(A)
    if n == 0:
        return [one]
    vect = [one, zero - A[0][0]]
    for r in range(1, n):
        R = A[r][:r]
        S = [A[i][r] for i in range(r)]
        t = [one, zero - A[r][r]]
        v = list(S)
        for _ in range(r):
            acc = zero
            for Rj, vj in zip(R, v):
                acc = acc + Rj * vj
            t.append(zero - acc)
            v = [_dot(A[i][:r], v, zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                acc = acc + t[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def _dot(row, v, zero):
    acc = zero
    for a, b in zip(row, v):
        acc = acc + a * b
    return acc


def determinant(A: Sequence[Sequence], one, zero):
    n = len(A)
    c = berkowitz(A, one, zero)[-1]
    return c if n % 2 == 0 else zero - c


def _strip(p: Sequence[BivarPoly]) -> list:
    p = [BivarPoly(c.terms) if isinstance(c, BivarPoly) else BivarPoly.const(c) for c in p]
    while p and p[-1].is_zero():
        p.pop()
    return p


def sylvester_matrix(p: Sequence[BivarPoly], q: Sequence[BivarPoly]) -> list:
    """Sylvester matrix of two polynomials in t given as coefficient lists (index = power)."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    zero = BivarPoly()
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(p)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(q)):
            row[i + k] = c
        rows.append(row)
    return rows


def resultant_y(p: Sequence[BivarPoly], q: Sequence[BivarPoly]) -> BivarPoly:
    """Res_t(p, q) for p, q in Q[x, y][t], given as coefficient lists in t.

    The name follows the convention that the result is a polynomial in (x, y).
    """
    p, q = _strip(p), _strip(q)
    if not p or not q:
        raise InvalidElimination("resultant of a zero polynomial")
    if len(p) == 1 and len(q) == 1:
        raise InvalidElimination("both inputs are constant in the elimination variable")
    if len(p) == 1:
        return p[0] ** (len(q) - 1)
    if len(q) == 1:
        return q[0] ** (len(p) - 1)
    return determinant(sylvester_matrix(p, q), BivarPoly.const(1), BivarPoly())
