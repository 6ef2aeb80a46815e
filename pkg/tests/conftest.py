from functools import lru_cache

from curvelab.branch import CurveSpec, Parametrization
from curvelab.valmod import kahler_module, ring_module

P = Parametrization.puiseux

# small curves with r = 1, 2, 3 used by the property tests
CURVES = {
    "cusp": [P(2, {3: 1})],
    "t34": [P(3, {4: 1})],
    "t4_6_7": [P(4, {6: 1, 7: 1})],
    "cusp_pair_7": [P(2, {3: 1}), P(2, {3: 1, 4: 1})],
    "cusp_pair_8": [P(2, {3: 1}), P(2, {3: 1, 5: 2})],
    "cusp_line": [P(2, {3: 1}), Parametrization({1: 1}, {})],
    "node": [Parametrization({1: 1}, {}), Parametrization({}, {1: 1})],
    "t34_pair": [P(3, {4: 1}), P(3, {4: 1, 5: 1})],
    "mixed_pair": [P(2, {3: 1}), P(3, {4: 1})],
    "cusp_triple": [P(2, {3: 1}), P(2, {3: 1, 4: 1}), P(2, {3: 1, 4: 2})],
    "three_lines": [Parametrization({1: 1}, {}), Parametrization({}, {1: 1}), Parametrization({1: 1}, {1: 1})],
}


@lru_cache(maxsize=None)
def curve(name):
    return CurveSpec(CURVES[name], name=name)


@lru_cache(maxsize=None)
def semigroup(name):
    return ring_module(curve(name)).value_set()


@lru_cache(maxsize=None)
def kahler(name):
    return kahler_module(curve(name)).value_set()
