"""Exact arithmetic substrate: rationals, series, polynomials, resultants, ranks."""

from fractions import Fraction as Rat

from .linalg import (QQ, PrimeField, RationalField, RowReducer, configure_primes, default_primes, echelon,
                     random_primes, rank)
from .poly import BivarPoly, poly_eval_series
from .resultant import berkowitz, determinant, resultant_y, sylvester_matrix
from .series import AboveTruncation, SeriesTuple, TruncSeries


def series_order(s: TruncSeries):
    return s.order()


__all__ = [
    "Rat", "QQ", "PrimeField", "RationalField", "RowReducer", "echelon", "random_primes", "rank",
    "configure_primes", "default_primes",
    "BivarPoly", "poly_eval_series", "berkowitz", "determinant", "resultant_y", "sylvester_matrix",
    "AboveTruncation", "SeriesTuple", "TruncSeries", "series_order",
]
