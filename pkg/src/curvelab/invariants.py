"""Curve invariants (mu, delta, tau) by formula, by value sets and by colength oracles."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .branch import CharData, CurveSpec, Parametrization, diagonal_check
from .errors import ConsistencyError, OracleInconclusive, TruncationTooSmall
from .exactalg import QQ, BivarPoly, PrimeField
from .exactalg.linalg import default_primes, echelon
from .valmod import jacobian_module, kahler_module, residue_values_irreducible, ring_module
from .valueset import BoxedValueSet, distance_diff


class _NotApplicable:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotApplicable"

    def __bool__(self):
        return False


NotApplicable = _NotApplicable()


# formulas -----------------------------------------------------------------

def milnor(spec: CurveSpec) -> int:
    """mu = sum c_i + 2 sum_{i<j} I_ij - r + 1."""
    return sum(c.conductor for c in spec.chars) + 2 * sum(spec.intersections().values()) - spec.r + 1


def delta_formula(spec: CurveSpec) -> int:
    return sum(c.delta for c in spec.chars) + sum(spec.intersections().values())


def delta_invariant(spec: CurveSpec, S: BoxedValueSet | None = None) -> int:
    """delta = sum delta_i + sum I_ij, checked against d_S(0, c_S)."""
    d = delta_formula(spec)
    S = S or ring_module(spec).value_set()
    chain = S.chain_distance((0,) * spec.r, spec.semigroup_conductor())
    if chain != d:
        raise ConsistencyError(f"delta formula gives {d} but the chain distance in S is {chain}")
    return d


# colength oracles ---------------------------------------------------------

def _weights(spec: CurveSpec | None) -> tuple:
    if spec is None:
        return (1, 1)
    wx = min((p.orders[0] for p in spec.branches if p.orders[0] != float("inf")), default=1)
    wy = min((p.orders[1] for p in spec.branches if p.orders[1] != float("inf")), default=1)
    return int(wx), int(wy)


def quotient_dimension(gens: Sequence[BivarPoly], weights: tuple, N: int, primes: Sequence[int] | None = None) -> int:
    """dim C[x,y]/(gens + monomials of weighted degree >= N).

    Equals the colength of the ideal in C{x,y} once it contains every
    monomial of weighted degree >= N.
    """
    wx, wy = weights
    cols = {}
    for a in range(N // wx + 1):
        for b in range((N - a * wx) // wy + 1):
            if a * wx + b * wy < N:
                cols[(a, b)] = len(cols)
    ncols = len(cols)
    entries = []
    for g in gens:
        if g.is_zero():
            continue
        og = g.weighted_order(wx, wy)
        for (a, b) in cols:
            if a * wx + b * wy + og >= N:
                continue
            row = {}
            for (ga, gb), c in g.terms.items():
                k = cols.get((a + ga, b + gb))
                if k is not None:
                    row[k] = c
            if row:
                entries.append(row)
    if not entries:
        return ncols

    def rank_in(F):
        M = F.zeros((len(entries), ncols))
        for i, row in enumerate(entries):
            for k, c in row.items():
                M[i, k] = F.element(c)
        return len(echelon(M, F)[1])

    primes = list(primes or default_primes(3))
    ranks = []
    for p in primes:
        try:
            ranks.append(rank_in(PrimeField(p)))
        except ZeroDivisionError:
            continue
        if len(ranks) == 2:
            break
    if len(ranks) == 2 and ranks[0] == ranks[1]:
        return ncols - ranks[0]
    return ncols - rank_in(QQ)


def _stabilized(gens, weights, N0, step, cap, what):
    dims = []
    N = N0
    while N <= cap:
        dims.append(quotient_dimension(gens, weights, N))
        if len(dims) >= 3 and dims[-1] == dims[-2] == dims[-3]:
            return dims[-1]
        N += step
    raise OracleInconclusive(f"{what} oracle did not stabilize below weighted degree {cap} (last values {dims[-3:]})")


def tjurina_oracle(f: BivarPoly, spec: CurveSpec | None = None, N: int | None = None) -> int:
    """dim C{x,y}/(f, f_x, f_y) by truncated linear algebra.

    With ``spec`` the truncation N = max(2 c_S - 1) is certified (the
    Jacobian value set has conductor at most 2 c_S - 1), and the result is
    re-checked at N + beta_0.  Without it the dimension must stabilize.
    """
    gens = [f, f.dx(), f.dy()]
    if f.constant_term():
        return 0
    if spec is None and N is None:
        return _stabilized(gens, (1, 1), 2 * f.order() + 2, 2, 8 * (f.total_degree() + 2) ** 2, "Tjurina")
    weights = _weights(spec)
    if N is None:
        N = max(2 * c - 1 for c in spec.semigroup_conductor())
    N = max(N, 1)
    step = min(p.multiplicity for p in spec.branches) if spec else 1
    first = quotient_dimension(gens, weights, N)
    second = quotient_dimension(gens, weights, N + step)
    if first != second:
        raise OracleInconclusive(f"Tjurina oracle changed from {first} to {second} past the certified truncation")
    return first


def milnor_oracle(f: BivarPoly, spec: CurveSpec | None = None) -> int:
    """dim C{x,y}/(f_x, f_y); the truncation must give the same value three times in a row."""
    gens = [f.dx(), f.dy()]
    if spec is None:
        return _stabilized(gens, (1, 1), 2 * f.order() + 2, 2, 8 * (f.total_degree() + 2) ** 2, "Milnor")
    cS = spec.semigroup_conductor()
    step = min(p.multiplicity for p in spec.branches)
    return _stabilized(gens, _weights(spec), max(2 * c - 1 for c in cS) + 1, step, 4 * max(cS) + 4 * step, "Milnor")


# value-set routes ---------------------------------------------------------

def with_zero(Lambda: BoxedValueSet) -> BoxedValueSet:
    return Lambda.with_points([(0,) * Lambda.r], tag="Lambda+0")


def tjurina_berger(spec: CurveSpec, S: BoxedValueSet | None = None, Lambda: BoxedValueSet | None = None) -> int:
    """tau = mu - d(Lambda-bar minus S)."""
    S = S or ring_module(spec).value_set()
    Lambda = Lambda or kahler_module(spec).value_set()
    return milnor(spec) - distance_diff(with_zero(Lambda), S)


def branch_tjurina(p: Parametrization) -> int:
    """tau_i = mu_i - #(Lambda_i minus S_i) for a single branch."""
    spec = CurveSpec([p])
    S = ring_module(spec).value_set()
    L = kahler_module(spec).value_set()
    c = spec.chars[0].conductor
    extra = sum(1 for v in range(L.box_min[0], c) if (v,) in L and (v,) not in S)
    return c - extra


def tjurina_closed(spec: CurveSpec):
    """2I + c - 1 for a diagonal pair; NotApplicable otherwise."""
    if spec.r != 2:
        return NotApplicable
    d = diagonal_check(spec.branches[0], spec.branches[1], spec.intersection(0, 1))
    if not d.diagonal:
        return NotApplicable
    return 2 * d.I + spec.chars[0].conductor - 1


# reports ------------------------------------------------------------------

@dataclass
class InvariantReport:
    name: str
    r: int
    chars: list
    intersections: dict
    mu: int
    delta: int
    c_S: tuple
    mu_branches: list = field(default_factory=list)
    delta_branches: list = field(default_factory=list)
    tau_branches: list = field(default_factory=list)
    tau_branches_oracle: list | None = None
    tau_berger: int | None = None
    tau_closed: object = NotApplicable
    tau_oracle: int | None = None
    mu_oracle: int | None = None
    theta: list = field(default_factory=list)
    conductor_lambda: tuple | None = None
    diagonal: dict | None = None
    verdicts: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)
    value_sets: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def tau(self) -> int | None:
        for v in (self.tau_berger, self.tau_oracle):
            if v is not None:
                return v
        return None

    @property
    def ratio(self) -> Fraction | None:
        t = self.tau
        return None if not t else Fraction(self.mu, t)

    @property
    def passed(self) -> bool:
        return all(v == "pass" for v in self.verdicts.values())

    def to_json(self, timings: bool = False) -> dict:
        closed = self.tau_closed
        out = {
            "name": self.name,
            "r": self.r,
            "branches": [
                {"char_data": c.as_dict(), "mu": m, "delta": d, "tau": t,
                 **({"tau_oracle": self.tau_branches_oracle[i]} if self.tau_branches_oracle else {})}
                for i, (c, m, d, t) in enumerate(zip(self.chars, self.mu_branches, self.delta_branches,
                                                     self.tau_branches or [None] * self.r))
            ],
            "intersections": [{"i": i, "j": j, "I": v} for (i, j), v in sorted(self.intersections.items())],
            "mu": self.mu,
            "delta": self.delta,
            "c_S": list(self.c_S),
            "tau_berger": self.tau_berger,
            "tau_closed": "NotApplicable" if closed is NotApplicable else closed,
            "tau_oracle": self.tau_oracle,
            "mu_oracle": self.mu_oracle,
            "theta": list(self.theta),
            "conductor_lambda": None if self.conductor_lambda is None else list(self.conductor_lambda),
            "ratio_mu_tau": None if self.ratio is None else str(self.ratio),
            "diagonal": self.diagonal,
            "verdicts": dict(sorted(self.verdicts.items())),
            "skipped": dict(sorted(self.skipped.items())),
        }
        if timings:
            out["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        return out


def ratio_check(report: InvariantReport) -> bool:
    """mu/tau < 4/3, and 4 tau - 3 mu = 2I - 2c - 1 for diagonal pairs."""
    tau = report.tau
    if not tau:
        return True
    ok = 3 * report.mu < 4 * tau
    if report.diagonal and report.diagonal.get("diagonal"):
        I = report.diagonal["I"]
        c = report.chars[0].conductor
        ok = ok and 4 * tau - 3 * report.mu == 2 * I - 2 * c - 1
    return ok


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def verify_all(spec: CurveSpec, oracle: bool = True, branch_oracle: bool = False, f: BivarPoly | None = None,
               berger: bool = True, jobs: int = 1) -> InvariantReport:
    """Compute every invariant the curve supports and record a verdict per cross-check.

    Checks that need more series precision than the branches carry are
    listed in ``skipped`` with the reason instead of a verdict.
    """
    t0 = time.perf_counter()
    timings = {}

    def lap(key):
        nonlocal t0
        now = time.perf_counter()
        timings[key] = now - t0
        t0 = now

    cS = spec.semigroup_conductor()
    rep = InvariantReport(
        name=spec.name, r=spec.r, chars=list(spec.chars), intersections=spec.intersections(),
        mu=milnor(spec), delta=delta_formula(spec), c_S=cS,
        mu_branches=[c.conductor for c in spec.chars], delta_branches=[c.delta for c in spec.chars],
        timings=timings,
    )
    V = rep.verdicts
    lap("setup")

    if berger:
        S = ring_module(spec).value_set()
        chain = S.chain_distance((0,) * spec.r, cS)
        V["delta_two_way"] = _verdict(chain == rep.delta)
        V["gh_colength_S"] = _verdict(S.gh_colength(cS, S.theta_from_maximals()) == chain)
        lap("semigroup")

        KM = kahler_module(spec)
        L = KM.value_set()
        rep.value_sets = {"S": S, "Lambda": L}
        rep.conductor_lambda = L.conductor()
        rep.tau_berger = rep.mu - distance_diff(with_zero(L), S)
        lap("kahler")

        rep.theta = [0] + [_theta(KM, L, i) for i in range(1, spec.r)]
        V["theta_two_way"] = _verdict(rep.theta == L.theta_from_maximals())
        cL = rep.conductor_lambda
        V["gh_colength_lambda"] = _verdict(L.gh_colength(cL, rep.theta) == L.chain_distance(L.minimum(), cL))
        lap("theta")

        if _has_equation(spec, f):
            try:
                Jv = jacobian_module(spec).value_set()
            except TruncationTooSmall as exc:
                rep.skipped["relation1"] = str(exc)
            else:
                V["relation1"] = _verdict(Jv == L.translate([c - 1 for c in cS]))
        lap("jacobian")

        if jobs > 1 and spec.r > 1:
            with ProcessPoolExecutor(min(jobs, spec.r)) as pool:
                rep.tau_branches = list(pool.map(branch_tjurina, spec.branches))
        else:
            rep.tau_branches = [branch_tjurina(p) for p in spec.branches]
        lap("branches")

        if spec.r == 2:
            _two_branch_checks(spec, rep, KM, L, S)
            lap("diagonal")
    elif spec.r == 2:
        d = diagonal_check(spec.branches[0], spec.branches[1], spec.intersection(0, 1))
        rep.diagonal = {"equisingular": d.equisingular, "I": d.I, "ng_betabar_g": d.ng_betabar_g,
                        "diagonal": d.diagonal}
    rep.tau_closed = tjurina_closed(spec)
    if rep.tau_closed is not NotApplicable and rep.tau_berger is not None:
        V["closed_vs_berger"] = _verdict(rep.tau_closed == rep.tau_berger)

    if oracle and _has_equation(spec, f):
        poly = f if f is not None else spec.equation()
        rep.tau_oracle = tjurina_oracle(poly, spec)
        lap("tau_oracle")
        try:
            rep.mu_oracle = milnor_oracle(poly, spec)
        except OracleInconclusive as exc:
            rep.skipped["mu_two_way"] = str(exc)
        else:
            V["mu_two_way"] = _verdict(rep.mu_oracle == rep.mu)
        if rep.tau_berger is not None:
            V["berger_vs_oracle"] = _verdict(rep.tau_berger == rep.tau_oracle)
        if rep.tau_closed is not NotApplicable:
            V["closed_vs_oracle"] = _verdict(rep.tau_closed == rep.tau_oracle)
        lap("mu_oracle")
        exact = all(e is not None or p.precision is None for e, p in zip(spec.implicit, spec.branches))
        if branch_oracle and not exact:
            rep.skipped["branch_berger_vs_oracle"] = "branch equations are not known for a single-polynomial input"
        elif branch_oracle:
            rep.tau_branches_oracle = [tjurina_oracle(spec.branch_equation(i), CurveSpec([p]))
                                       for i, p in enumerate(spec.branches)]
            if rep.tau_branches:
                V["branch_berger_vs_oracle"] = _verdict(rep.tau_branches == rep.tau_branches_oracle)
            lap("branch_oracle")

    if rep.tau is not None:
        V["ratio_bound"] = _verdict(ratio_check(rep))
    return rep


def _has_equation(spec: CurveSpec, f) -> bool:
    if f is not None or spec.polynomial is not None:
        return True
    return all(e is not None or p.precision is None for e, p in zip(spec.implicit, spec.branches))


def _theta(KM, L, i) -> int:
    from .valmod import theta
    return theta(KM.spec, i, KM, L)


def _two_branch_checks(spec: CurveSpec, rep: InvariantReport, KM, L: BoxedValueSet, S: BoxedValueSet) -> None:
    V = rep.verdicts
    p1, p2 = spec.branches
    d = diagonal_check(p1, p2, spec.intersection(0, 1))
    rep.diagonal = {"equisingular": d.equisingular, "I": d.I, "ng_betabar_g": d.ng_betabar_g, "diagonal": d.diagonal}
    if not d.diagonal:
        return
    I = d.I
    c = spec.chars[0].conductor
    b0 = spec.chars[0].multiplicity
    V["conductor_lambda"] = _verdict(rep.conductor_lambda == (I - b0 + 1, I - b0 + 1))

    N1 = KM.kernel_values([0])
    delta1 = residue_values_irreducible(p1)
    hi = N1.box_max[0]
    V["fibers_plus_I"] = _verdict(all(((v,) in N1) == ((v - I,) in delta1) for v in range(N1.box_min[0], hi + 1))
                                  and N1.conductor() == (I - b0 + 1,))

    gaps2 = sum(1 for v in range(0, I - b0 + 1) if not _in_proj(L, 1, v))
    above1 = sum(1 for v in range(b0 + 1, L.box_max[0] + 1) if not _in_proj(L, 0, v))
    V["theta_corollary"] = _verdict(rep.theta[1] == I - b0 + 1 - gaps2 - above1)

    V["diagonal_points"] = _verdict(all((a, a) in L for a in range(1, S.box_max[0] + 1) if (a, a) in S))
    V["mu_minus_tau_is_c"] = _verdict(rep.mu - rep.tau_berger == c)


def _in_proj(E: BoxedValueSet, i: int, v: int) -> bool:
    if v < E.box_min[i]:
        return False
    if v >= E.box_max[i]:
        return True
    return bool(E.projection(i)[v - E.box_min[i]])
