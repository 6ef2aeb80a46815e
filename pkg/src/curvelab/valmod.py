"""Value sets of O-modules inside the normalization, by truncated linear algebra.

A module M is given by generator tuples (one series per branch).  Its image
W in prod_i C[t]/(t^(gamma_i + 1)) is spanned by (monomial pullback) x
(generator) rows.  With U_alpha the tuples of order >= alpha,

    D(alpha) = dim(W cap U_alpha),

and alpha is a value of M iff D(alpha) > D(alpha + e_i) for every i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .branch import CurveSpec, Parametrization, char_data
from .errors import ConsistencyError, TruncationTooSmall
from .exactalg import QQ, BivarPoly, PrimeField, RowReducer, SeriesTuple, TruncSeries, echelon, poly_eval_series
from .exactalg.linalg import default_primes
from .valueset import BoxedValueSet


# generator recipes --------------------------------------------------------

@dataclass(frozen=True)
class PullbackForm:
    """omega = A dx + B dy, pulled back as t * (A(phi) x'(t) + B(phi) y'(t))."""

    A: BivarPoly
    B: BivarPoly

    def pullback(self, p: Parametrization, T: int) -> TruncSeries:
        x, y = p.x_series(T), p.y_series(T)
        return poly_eval_series(self.A, x, y) * x.t_derivative() + poly_eval_series(self.B, x, y) * y.t_derivative()

    def pullback_tuple(self, spec: CurveSpec, T: int) -> SeriesTuple:
        return SeriesTuple(self.pullback(p, T) for p in spec.branches)

    def times(self, h: BivarPoly) -> "PullbackForm":
        return PullbackForm(self.A * h, self.B * h)


DX = PullbackForm(BivarPoly.const(1), BivarPoly())
DY = PullbackForm(BivarPoly(), BivarPoly.const(1))


@dataclass(frozen=True)
class Generator:
    """A generator tuple: either a function h(phi) or a form's pullback."""

    poly: BivarPoly | None = None
    form: PullbackForm | None = None

    def series(self, p: Parametrization, n: int, field) -> np.ndarray:
        xs = _field_series(p.x, n, field)
        ys = _field_series(p.y, n, field)
        if self.form is None:
            return _eval_poly(self.poly, xs, ys, n, field)
        k = np.arange(n, dtype=field.dtype)
        tx = field.reduce(xs * k)
        ty = field.reduce(ys * k)
        a = _eval_poly(self.form.A, xs, ys, n, field)
        b = _eval_poly(self.form.B, xs, ys, n, field)
        return field.reduce(field.convolve(a, tx, n) + field.convolve(b, ty, n))


ONE = Generator(poly=BivarPoly.const(1))


def _field_series(coeffs: dict, n: int, field) -> np.ndarray:
    out = field.zeros(n)
    for j, c in coeffs.items():
        if j < n:
            out[j] = field.element(c)
    return out


def _eval_poly(h: BivarPoly, xs, ys, n: int, field) -> np.ndarray:
    by_y: dict = {}
    for (a, b), c in h.terms.items():
        by_y.setdefault(b, []).append((a, c))
    if not by_y:
        return field.zeros(n)
    xpow = {0: _unit(n, field)}
    need = sorted({a for terms in by_y.values() for a, _ in terms})
    cur, e = xpow[0], 0
    for a in need:
        while e < a:
            cur = field.convolve(cur, xs, n)
            e += 1
        xpow[a] = cur
    acc = None
    for b in range(max(by_y), -1, -1):
        cb = field.zeros(n)
        for a, c in by_y.get(b, []):
            cb = field.reduce(cb + xpow[a] * field.element(c))
        acc = cb if acc is None else field.reduce(field.convolve(acc, ys, n) + cb)
    return acc


def _unit(n, field):
    out = field.zeros(n)
    out[0] = field.element(1)
    return out


def _order(v: np.ndarray):
    nz = np.flatnonzero(v != 0)
    return int(nz[0]) if len(nz) else None


# dimension tables ---------------------------------------------------------

def _dims(M: np.ndarray, lengths: Sequence[int], field) -> np.ndarray:
    """D[alpha] = dim(rowspace(M) cap U_alpha); columns of M are the blocks in order."""
    L0 = lengths[0]
    if len(lengths) == 1:
        _, piv = echelon(M, field, cols=range(L0))
        counts = np.searchsorted(np.array(piv, dtype=np.int64), np.arange(L0 + 1))
        return (len(piv) - counts).astype(np.int32)
    E, piv = echelon(M, field, cols=range(L0))
    k = len(piv)
    rest_len = M.shape[1] - L0
    RR = RowReducer(field, rest_len)
    for row in E[k:]:
        if (row != 0).any():
            RR.insert(row[L0:])
    rest_rank = len(RR.pivots)
    shape = tuple(l + 1 for l in lengths)
    D = np.zeros(shape, dtype=np.int32)
    pivot_row = {c: i for i, c in enumerate(piv)}
    cnt = 0
    for a in range(L0, -1, -1):
        if a < L0 and a in pivot_row:
            RR.insert(E[pivot_row[a], L0:])
            cnt += 1
        dim_w = cnt + rest_rank
        dim_v = len(RR.pivots)
        if len(lengths) == 2:
            counts = np.searchsorted(np.sort(np.array(RR.pivots, dtype=np.int64)), np.arange(lengths[1] + 1))
            D[a] = dim_w - counts
        else:
            basis = RR.rows.copy() if dim_v else field.zeros((0, rest_len))
            D[a] = (dim_w - dim_v) + _dims(basis, lengths[1:], field)
    return D


def _members_from_dims(D: np.ndarray) -> np.ndarray:
    r = D.ndim
    inner = tuple(slice(0, s - 1) for s in D.shape)
    core = D[inner]
    members = np.ones(core.shape, dtype=bool)
    for i in range(r):
        nxt = tuple(slice(1, s) if k == i else slice(0, s - 1) for k, s in enumerate(D.shape))
        step = core - D[nxt]
        if (step < 0).any() or (step > 1).any():
            raise TruncationTooSmall("dimension counts are not monotone; the truncation is inadequate")
        members &= step == 1
    return members


# modules ------------------------------------------------------------------

class ValuedModule:
    """The O-module generated by ``generators`` on the branches of ``spec``.

    ``gamma`` must bound the conductor of the value set from above; values
    are computed exactly on the box [lo, gamma], lo being the componentwise
    minimum order of the generators.
    """

    def __init__(self, spec: CurveSpec, generators: Sequence[Generator], gamma: Sequence[int], tag: str = "",
                 primes: Sequence[int] | None = None):
        if not generators:
            raise ValueError("a module needs at least one generator")
        self.spec = spec
        self.generators = tuple(generators)
        self.r = spec.r
        self.tag = tag
        self.primes = list(primes) if primes else default_primes(3)
        gamma = tuple(int(g) for g in gamma)
        self.lo = self._lower_bounds(gamma)
        self.gamma = tuple(max(g, l) for g, l in zip(gamma, self.lo))

    def _lower_bounds(self, gamma) -> tuple:
        F = PrimeField(self.primes[0])
        lo = []
        for i, p in enumerate(self.spec.branches):
            n = gamma[i] + 1
            while True:
                orders = [o for o in (_order(g.series(p, n, F)) for g in self.generators) if o is not None]
                if orders or n > gamma[i] + 4 * p.multiplicity + 8 or n > p.max_exact_order:
                    break
                n *= 2
            lo.append(min(orders) if orders else gamma[i])
        return tuple(lo)

    # row assembly

    def _monomials(self, top: Sequence[int]) -> list:
        ords = [p.orders for p in self.spec.branches]
        amax = max((t // ox for (ox, _), t in zip(ords, top) if ox != float("inf")), default=0)
        bmax = max((t // oy for (_, oy), t in zip(ords, top) if oy != float("inf")), default=0)
        out = []
        for a in range(int(amax) + 1):
            for b in range(int(bmax) + 1):
                if any((a and ox) * 1 + (b and oy) + l <= t for (ox, oy), l, t in zip(ords, self.lo, top)):
                    out.append((a, b))
        return out

    def rows(self, field, top: Sequence[int]) -> np.ndarray:
        """Rows over columns lo_i..top_i of each branch, concatenated."""
        top = tuple(top)
        for p, t in zip(self.spec.branches, top):
            if p.precision is not None and p.precision < t:
                raise TruncationTooSmall(f"branch expansion known to order {p.precision}, need {t}", p.precision)
        monos = self._monomials(top)
        blocks = []
        for i, p in enumerate(self.spec.branches):
            n = top[i] + 1
            xs, ys = _field_series(p.x, n, field), _field_series(p.y, n, field)
            gens = [g.series(p, n, field) for g in self.generators]
            xpow, ypow = [_unit(n, field)], [_unit(n, field)]
            amax = max(a for a, _ in monos)
            bmax = max(b for _, b in monos)
            for _ in range(amax):
                xpow.append(field.convolve(xpow[-1], xs, n))
            for _ in range(bmax):
                ypow.append(field.convolve(ypow[-1], ys, n))
            block = field.zeros((len(monos) * len(gens), n - self.lo[i]))
            row = 0
            for a, b in monos:
                mono = field.convolve(xpow[a], ypow[b], n)
                for g in gens:
                    block[row] = field.convolve(mono, g, n)[self.lo[i]:]
                    row += 1
            blocks.append(block)
        M = np.hstack(blocks)
        keep = (M != 0).any(axis=1)
        return M[keep]

    def dims(self, field, top: Sequence[int] | None = None) -> np.ndarray:
        top = self.gamma if top is None else tuple(top)
        M = self.rows(field, top)
        lengths = [t - l + 1 for t, l in zip(top, self.lo)]
        if M.shape[0] == 0:
            return np.zeros(tuple(l + 1 for l in lengths), dtype=np.int32)
        return _dims(M, lengths, field)

    # value sets

    def _agreeing(self, compute):
        """Run ``compute(field)`` over two primes; fall back to the rationals on disagreement."""
        results = []
        for p in self.primes:
            try:
                results.append(compute(PrimeField(p)))
            except ZeroDivisionError:
                continue
            if len(results) == 2:
                break
        if len(results) == 2 and _same(results[0], results[1]):
            return results[0]
        return compute(QQ)

    def value_set(self) -> BoxedValueSet:
        members = self._agreeing(lambda F: _members_from_dims(self.dims(F)))
        return BoxedValueSet(self.lo, self.gamma, members, self.gamma, self.tag)

    def kernel_values(self, J: Sequence[int], margin: int | None = None) -> BoxedValueSet:
        """Values on the other branches of the elements vanishing on the branches in J.

        Vanishing is detected up to t^gamma_j and re-checked with ``margin``
        extra terms; a difference raises TruncationTooSmall.
        """
        J = sorted(set(J))
        if not J or len(J) >= self.r:
            raise ValueError("J must be a nonempty proper subset of the branches")
        if margin is None:
            margin = max(p.multiplicity for p in self.spec.branches)
        others = [i for i in range(self.r) if i not in J]

        def compute(F, extra):
            top = [g + (extra if i in J else 0) for i, g in enumerate(self.gamma)]
            M = self.rows(F, top)
            widths = [t - l + 1 for t, l in zip(top, self.lo)]
            starts = np.concatenate([[0], np.cumsum(widths)])
            jcols = np.concatenate([np.arange(starts[j], starts[j + 1]) for j in J])
            ocols = np.concatenate([np.arange(starts[i], starts[i + 1]) for i in others])
            E, piv = echelon(M, F, cols=jcols) if M.shape[0] else (M, [])
            kernel = E[len(piv):][:, ocols]
            kernel = kernel[(kernel != 0).any(axis=1)]
            lengths = [widths[i] for i in others]
            if kernel.shape[0] == 0:
                D = np.zeros(tuple(l + 1 for l in lengths), dtype=np.int32)
            else:
                D = _dims(kernel, lengths, F)
            return _members_from_dims(D)

        first = self._agreeing(lambda F: compute(F, 0))
        second = self._agreeing(lambda F: compute(F, margin))
        if not np.array_equal(first, second):
            raise TruncationTooSmall("kernel values changed when the truncation was raised", max(self.gamma))
        lo = [self.lo[i] for i in others]
        hi = [self.gamma[i] for i in others]
        tag = self.tag + f"|kernel{tuple(J)}"
        if not first[tuple(-1 for _ in others)]:
            raise ConsistencyError(f"kernel value set {tag} has no tail at {tuple(hi)}")
        return BoxedValueSet(lo, hi, first, hi, tag)


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and bool(np.array_equal(a, b))
    return a == b


# curve-level entry points -------------------------------------------------

def _spec_of(spec_or_param) -> CurveSpec:
    if isinstance(spec_or_param, Parametrization):
        return CurveSpec([spec_or_param])
    return spec_or_param


def ring_module(spec: CurveSpec, gamma=None) -> ValuedModule:
    spec = _spec_of(spec)
    return ValuedModule(spec, [ONE], gamma or spec.semigroup_conductor(), tag="S")


def kahler_module(spec: CurveSpec, gamma=None) -> ValuedModule:
    spec = _spec_of(spec)
    return ValuedModule(spec, [Generator(form=DX), Generator(form=DY)], gamma or spec.semigroup_conductor(),
                        tag="Lambda")


def jacobian_module(spec: CurveSpec) -> ValuedModule:
    spec = _spec_of(spec)
    f = spec.equation()
    gens = [Generator(poly=f.dx()), Generator(poly=f.dy())]
    return ValuedModule(spec, gens, jacobian_bound(spec, f), tag="J")


def jacobian_bound(spec: CurveSpec, f: BivarPoly | None = None) -> tuple:
    """v(h) + c_S for an element h of J finite on every branch; J contains h times the conductor ideal.

    h runs over f_y, f_x and f_x + k f_y for small k.
    """
    f = f or spec.equation()
    cS = spec.semigroup_conductor()
    F = PrimeField(default_primes(1)[0])
    best = None
    fx, fy = f.dx(), f.dy()
    for h in [fy, fx] + [fx + fy * k for k in range(1, spec.r + 2)]:
        vals = []
        for p, c in zip(spec.branches, cS):
            n = 2 * c + 4 * p.multiplicity + 8
            if p.precision is not None:
                n = min(n, p.precision + 1)
            o = _order(Generator(poly=h).series(p, n, F))
            if o is None:
                break
            vals.append(o + c)
        else:
            if best is None or sum(vals) < sum(best):
                best = tuple(vals)
    if best is None:
        raise TruncationTooSmall("could not bound the Jacobian conductor within the available precision")
    return best


def value_set(M: ValuedModule) -> BoxedValueSet:
    return M.value_set()


def semigroup_values(spec) -> BoxedValueSet:
    return ring_module(spec).value_set()


def kahler_values(spec) -> BoxedValueSet:
    return kahler_module(spec).value_set()


def jacobian_values(spec) -> BoxedValueSet:
    return jacobian_module(spec).value_set()


def kernel_values(M: ValuedModule, J: Sequence[int]) -> BoxedValueSet:
    return M.kernel_values(J)


def residue_values_irreducible(p: Parametrization, Lambda: BoxedValueSet | None = None) -> BoxedValueSet:
    """Delta = {d : -d not in Lambda} on [-c - b0, b0 + c]; its conductor is 1 - b0."""
    cd = char_data(p)
    c, b0 = cd.conductor, cd.multiplicity
    if Lambda is None:
        Lambda = kahler_values(CurveSpec([p]))
    lo, hi = -c - b0, b0 + c
    bits = np.array([(-d,) not in Lambda for d in range(lo, hi + 1)], dtype=bool)
    delta = BoxedValueSet((lo,), (hi,), bits, (1 - b0,), tag="Delta")
    if delta.conductor() != (1 - b0,):
        raise ConsistencyError(f"residue value conductor {delta.conductor()} differs from {1 - b0}")
    return delta


def theta(spec: CurveSpec, i: int, module: ValuedModule | None = None, E: BoxedValueSet | None = None) -> int:
    """Theta_i = #(pr_i(E) minus v_i(N_[0,i))) for the Kahler module (0-based i; Theta_0 = 0)."""
    spec = _spec_of(spec)
    if i == 0:
        return 0
    module = module or kahler_module(spec)
    E = E or module.value_set()
    N = module.kernel_values(range(i))
    pos = [k for k in range(spec.r) if k >= i].index(i)
    proj_E = E.projection(i)
    proj_N = N.projection(pos)
    lo = E.box_min[i]
    offset = N.box_min[pos] - lo
    aligned = np.zeros_like(proj_E)
    aligned[offset:offset + len(proj_N)] = proj_N
    return int((proj_E & ~aligned).sum())


def thetas(spec: CurveSpec, module: ValuedModule | None = None, E: BoxedValueSet | None = None) -> list:
    spec = _spec_of(spec)
    module = module or kahler_module(spec)
    E = E or module.value_set()
    return [theta(spec, i, module, E) for i in range(spec.r)]


def residue_values_experimental(Lambda: BoxedValueSet) -> BoxedValueSet:
    """alpha in Delta iff the fiber F(Lambda, -alpha) is empty; no guarantees for r >= 2."""
    r = Lambda.r
    K = max(Lambda.box_max) + max(1, min(Lambda.box_min))
    ext_lo = tuple(-K for _ in range(r))
    ext = Lambda.on_box(ext_lo, Lambda.box_max)
    big = BoxedValueSet(ext_lo, Lambda.box_max, ext, Lambda.tail_conductor, Lambda.tag)
    hit = np.zeros(big.shape, dtype=bool)
    for k in range(r):
        hit |= big._fiber_bitmap({k})
    flipped = ~hit[tuple(slice(None, None, -1) for _ in range(r))]
    lo = tuple(-h for h in Lambda.box_max)
    hi = tuple(K for _ in range(r))
    return BoxedValueSet(lo, hi, flipped, hi if flipped[tuple(-1 for _ in range(r))] else None, tag="Delta*")
