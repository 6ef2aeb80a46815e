"""Value sets in Z^r stored as bitmaps over a box.

A point whose i-th coordinate equals box_max[i] stands for every vector
with that coordinate >= box_max[i] (including infinity).  This is sound
because box_max >= the conductor, and above the conductor membership does
not depend on the exact coordinate.  Points below box_min are not members.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import ConductorViolation, ConsistencyError, NotASubset, NotInSet, OutOfBox

INF = float("inf")


def _suffix(a: np.ndarray, axis: int, op) -> np.ndarray:
    """Inclusive suffix accumulation of ``op`` along ``axis``."""
    rev = np.flip(a, axis=axis)
    return np.flip(op.accumulate(rev, axis=axis), axis=axis)


def _strict_suffix_or(a: np.ndarray, axis: int) -> np.ndarray:
    """out[.., k, ..] = OR of a over indices > k, or over the last index when k is last."""
    s = _suffix(a, axis, np.logical_or)
    out = np.empty_like(s)
    n = a.shape[axis]
    lead = [slice(None)] * a.ndim
    src = [slice(None)] * a.ndim
    lead[axis], src[axis] = slice(0, n - 1), slice(1, n)
    out[tuple(lead)] = s[tuple(src)]
    last = [slice(None)] * a.ndim
    last[axis] = slice(n - 1, n)
    out[tuple(last)] = s[tuple(last)]
    return out


class BoxedValueSet:
    __slots__ = ("box_min", "box_max", "members", "tail_conductor", "tag")

    def __init__(self, box_min: Sequence[int], box_max: Sequence[int], members: np.ndarray,
                 tail_conductor: Sequence[int] | None = None, tag: str = ""):
        self.box_min = tuple(int(v) for v in box_min)
        self.box_max = tuple(int(v) for v in box_max)
        if len(self.box_min) != len(self.box_max) or not self.box_min:
            raise ValueError("box corners must have the same positive dimension")
        shape = tuple(h - l + 1 for l, h in zip(self.box_min, self.box_max))
        if any(s <= 0 for s in shape):
            raise ValueError("empty box")
        members = np.asarray(members, dtype=bool)
        if members.shape != shape:
            raise ValueError(f"bitmap shape {members.shape} does not match box shape {shape}")
        members.setflags(write=False)
        self.members = members
        tc = self.box_max if tail_conductor is None else tuple(int(v) for v in tail_conductor)
        if any(c > h for c, h in zip(tc, self.box_max)):
            raise ValueError("tail conductor must lie inside the box")
        if not self._region(tc, self.box_max).all():
            raise ConsistencyError("membership bitmap contradicts the tail certificate")
        self.tail_conductor = tc
        self.tag = tag

    # construction

    @classmethod
    def from_predicate(cls, box_min, box_max, pred, tail_conductor=None, tag=""):
        shape = tuple(h - l + 1 for l, h in zip(box_min, box_max))
        bits = np.zeros(shape, dtype=bool)
        for idx in np.ndindex(*shape):
            bits[idx] = bool(pred(tuple(i + l for i, l in zip(idx, box_min))))
        return cls(box_min, box_max, bits, tail_conductor, tag)

    @classmethod
    def from_points(cls, box_min, box_max, points: Iterable, tail_conductor=None, tag=""):
        shape = tuple(h - l + 1 for l, h in zip(box_min, box_max))
        bits = np.zeros(shape, dtype=bool)
        for p in points:
            bits[tuple(int(v) - l for v, l in zip(p, box_min))] = True
        if tail_conductor is not None:
            bits[tuple(slice(c - l, None) for c, l in zip(tail_conductor, box_min))] = True
        return cls(box_min, box_max, bits, tail_conductor, tag)

    @classmethod
    def numerical(cls, generators: Sequence[int], tag: str = "") -> "BoxedValueSet":
        """The numerical semigroup generated by ``generators`` (gcd 1)."""
        g = sorted(generators)
        bound = g[0] * g[-1] + 1
        reach = np.zeros(bound + 1, dtype=bool)
        reach[0] = True
        for k in range(1, bound + 1):
            reach[k] = any(k >= a and reach[k - a] for a in g)
        c = int(np.flatnonzero(~reach)[-1]) + 1 if (~reach).any() else 0
        if not reach[c:].all():
            raise ValueError("generators do not have gcd 1")
        return cls((0,), (max(c, 1),), reach[: max(c, 1) + 1], (c,), tag)

    # basic queries

    @property
    def r(self) -> int:
        return len(self.box_min)

    @property
    def shape(self) -> tuple:
        return self.members.shape

    def _index(self, alpha) -> tuple | None:
        idx = []
        for a, l, h in zip(alpha, self.box_min, self.box_max):
            if a < l:
                return None
            idx.append(int(min(a, h)) - l)
        return tuple(idx)

    def __contains__(self, alpha) -> bool:
        if len(alpha) != self.r:
            raise ValueError("dimension mismatch")
        idx = self._index(alpha)
        return idx is not None and bool(self.members[idx])

    contains = __contains__

    def _region(self, lo, hi) -> np.ndarray:
        sl = tuple(slice(int(a) - l, int(b) - l + 1) for a, b, l in zip(lo, hi, self.box_min))
        return self.members[sl]

    def points(self) -> list:
        return [tuple(int(i) + l for i, l in zip(idx, self.box_min)) for idx in np.argwhere(self.members)]

    def on_box(self, box_min, box_max) -> np.ndarray:
        """Membership bitmap re-read over another box, using the clamping convention."""
        axes = []
        for l, h, sl, sh in zip(box_min, box_max, self.box_min, self.box_max):
            vals = np.arange(l, h + 1)
            axes.append((np.clip(vals, sl, sh) - sl, vals >= sl))
        out = self.members[np.ix_(*[a for a, _ in axes])].copy()
        for k, (_, ok) in enumerate(axes):
            shape = [1] * len(axes)
            shape[k] = len(ok)
            out &= ok.reshape(shape)
        return out

    def with_box(self, box_min, box_max, tag: str | None = None) -> "BoxedValueSet":
        if any(h < c for h, c in zip(box_max, self.tail_conductor)):
            raise OutOfBox("new box must still contain the tail conductor")
        return BoxedValueSet(box_min, box_max, self.on_box(box_min, box_max), self.tail_conductor,
                             self.tag if tag is None else tag)

    def translate(self, shift: Sequence[int], tag: str = "") -> "BoxedValueSet":
        lo = [l + s for l, s in zip(self.box_min, shift)]
        hi = [h + s for h, s in zip(self.box_max, shift)]
        tc = [c + s for c, s in zip(self.tail_conductor, shift)]
        return BoxedValueSet(lo, hi, self.members.copy(), tc, tag)

    def with_points(self, pts: Iterable, tag: str = "") -> "BoxedValueSet":
        """Union with finitely many points, which may extend the box downwards."""
        pts = [tuple(int(v) for v in p) for p in pts]
        lo = [min([l] + [p[k] for p in pts]) for k, l in enumerate(self.box_min)]
        bits = self.on_box(lo, self.box_max)
        for p in pts:
            idx = tuple(min(v, h) - l for v, l, h in zip(p, lo, self.box_max))
            bits[idx] = True
        return BoxedValueSet(lo, self.box_max, bits, self.tail_conductor, tag)

    def __eq__(self, other):
        if not isinstance(other, BoxedValueSet) or other.r != self.r:
            return NotImplemented
        lo = [min(a, b) for a, b in zip(self.box_min, other.box_min)]
        hi = [max(a, b) for a, b in zip(self.box_max, other.box_max)]
        return bool(np.array_equal(self.on_box(lo, hi), other.on_box(lo, hi)))

    __hash__ = None

    def is_subset_of(self, other: "BoxedValueSet") -> bool:
        lo = [min(a, b) for a, b in zip(self.box_min, other.box_min)]
        hi = [max(a, b) for a, b in zip(self.box_max, other.box_max)]
        return not bool((self.on_box(lo, hi) & ~other.on_box(lo, hi)).any())

    def minimum(self) -> tuple:
        """m_E, the componentwise minimum of E (a member by min-closure)."""
        if not self.members.any():
            raise NotInSet("empty value set")
        idx = np.argwhere(self.members).min(axis=0)
        m = tuple(int(i) + l for i, l in zip(idx, self.box_min))
        if m not in self:
            raise ConsistencyError("value set is not closed under minimum")
        return m

    def projection(self, i: int) -> np.ndarray:
        """pr_i(E) inside [box_min_i, box_max_i] as a boolean vector."""
        axes = tuple(k for k in range(self.r) if k != i)
        return self.members.any(axis=axes) if axes else self.members.copy()

    def project(self, J: Sequence[int], tag: str = "") -> "BoxedValueSet":
        J = list(J)
        drop = tuple(k for k in range(self.r) if k not in J)
        bits = self.members.any(axis=drop) if drop else self.members
        if J != sorted(J):
            bits = np.transpose(bits, [sorted(J).index(j) for j in J])
        return BoxedValueSet([self.box_min[k] for k in J], [self.box_max[k] for k in J], bits,
                             [self.tail_conductor[k] for k in J], tag)

    # conductor, fibers, maximals

    def conductor(self) -> tuple:
        """Minimal gamma with gamma + N^r inside E."""
        up = self.members
        for k in range(self.r):
            up = _suffix(up, k, np.logical_and)
        idx = np.argwhere(up)
        c = tuple(int(i) + l for i, l in zip(idx.min(axis=0), self.box_min))
        if not up[tuple(v - l for v, l in zip(c, self.box_min))]:
            raise ConsistencyError("the set of conductor candidates has no minimum")
        return c

    def _check_in_box(self, alpha):
        if len(alpha) != self.r or any(a < l or a > h for a, l, h in zip(alpha, self.box_min, self.box_max)):
            raise OutOfBox(f"{tuple(alpha)} lies outside the box [{self.box_min}, {self.box_max}]")

    def fiber(self, alpha: Sequence[int], J: Iterable[int]) -> str:
        """Classify F_J(E, alpha) as "empty", "nonempty" or "infinite" (indices are 0-based)."""
        self._check_in_box(alpha)
        J = set(J)
        if not J or not J <= set(range(self.r)):
            raise ValueError("J must be a nonempty set of coordinate indices")
        c = self.conductor()
        lo_inf, lo, hi = [], [], []
        for k in range(self.r):
            if k in J:
                lo_inf.append(alpha[k])
                lo.append(alpha[k])
                hi.append(alpha[k])
            else:
                lo_inf.append(max(alpha[k], c[k]))
                lo.append(min(alpha[k] + 1, self.box_max[k]))
                hi.append(self.box_max[k])
        if len(J) < self.r and self._region(lo_inf, hi).any():
            return "infinite"
        return "nonempty" if self._region(lo, hi).any() else "empty"

    def _fiber_bitmap(self, J: Iterable[int]) -> np.ndarray:
        """For every alpha in the box, whether F_J(E, alpha) is nonempty."""
        J = set(J)
        acc = self.members
        for k in range(self.r):
            if k not in J:
                acc = _strict_suffix_or(acc, k)
        return acc

    def maximals(self) -> "MaximalsReport":
        r = self.r
        if r == 1:
            return MaximalsReport([], [], [])
        hit = np.zeros(self.shape, dtype=bool)
        for i in range(r):
            hit |= self._fiber_bitmap({i})
        mx = self.members & ~hit
        pts = [tuple(int(v) + l for v, l in zip(idx, self.box_min)) for idx in np.argwhere(mx)]
        subsets = [set(J) for s in range(1, r) for J in combinations(range(r), s)]
        bitmaps = {tuple(sorted(J)): self._fiber_bitmap(J) for J in subsets}
        rel, absolute = [], []
        for p in pts:
            idx = tuple(v - l for v, l in zip(p, self.box_min))
            if all(not bitmaps[tuple(sorted(J))][idx] for J in subsets):
                absolute.append(p)
            if all(bitmaps[tuple(sorted(J))][idx] for J in subsets if len(J) >= 2):
                rel.append(p)
        return MaximalsReport(pts, rel, absolute)

    # distances and colength

    def _require_member(self, alpha):
        self._check_in_box(alpha)
        if alpha not in self:
            raise NotInSet(f"{tuple(alpha)} is not in the value set")

    def chain_distance(self, alpha: Sequence[int], beta: Sequence[int], rng: random.Random | None = None) -> int:
        """Length of a saturated chain in E from alpha to beta.

        Each step moves to the lexicographically smallest member in
        (alpha, beta], which is always a minimal one; with ``rng`` a random
        minimal member is chosen instead.
        """
        alpha, beta = tuple(alpha), tuple(beta)
        self._require_member(alpha)
        self._require_member(beta)
        if any(a > b for a, b in zip(alpha, beta)):
            raise ValueError("chain endpoints must satisfy alpha <= beta")
        steps = 0
        cur = alpha
        while cur != beta:
            region = self._region(cur, beta).copy()
            region[(0,) * self.r] = False
            if rng is None:
                flat = int(np.argmax(region.ravel()))
                off = np.unravel_index(flat, region.shape)
            else:
                below = region.copy()
                for k in range(self.r):
                    below = np.logical_or.accumulate(below, axis=k)
                strictly = np.zeros_like(region)
                for k in range(self.r):
                    sl_dst = [slice(None)] * self.r
                    sl_src = [slice(None)] * self.r
                    sl_dst[k], sl_src[k] = slice(1, None), slice(0, -1)
                    strictly[tuple(sl_dst)] |= below[tuple(sl_src)]
                minimal = np.argwhere(region & ~strictly)
                off = tuple(minimal[rng.randrange(len(minimal))])
            if not region[tuple(off)]:
                raise ConsistencyError("no saturated step available inside the box")
            cur = tuple(c + int(o) for c, o in zip(cur, off))
            steps += 1
        return steps

    def gh_colength(self, gamma: Sequence[int], theta: Sequence[int]) -> int:
        """sum_i (gamma_i - m_i - #((N + m_i) \\ pr_i(E)) - theta_i) with m the minimum of E."""
        gamma = tuple(gamma)
        c = self.conductor()
        if any(g < ci for g, ci in zip(gamma, c)):
            raise ConductorViolation(f"{gamma} is not above the conductor {c}")
        if len(theta) != self.r:
            raise ValueError("one theta value per coordinate is required")
        m = self.minimum()
        total = 0
        for i in range(self.r):
            proj = self.projection(i)
            start = m[i] - self.box_min[i]
            gaps = int((~proj[start:]).sum())
            total += gamma[i] - m[i] - gaps - theta[i]
        return total

    def theta_from_maximals(self) -> list:
        """Theta_i as the number of last coordinates of relative maximals of projections."""
        out = [0]
        for i in range(1, self.r):
            values = set()
            for s in range(1, i + 1):
                for rest in combinations(range(i), s):
                    J = list(rest) + [i]
                    for p in self.project(J).maximals().relative_maximals:
                        values.add(p[-1])
            out.append(len(values))
        return out

    # serialization

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "box_min": list(self.box_min),
            "box_max": list(self.box_max),
            "tail_conductor": list(self.tail_conductor),
            "tag": self.tag,
            "members": [list(p) for p in self.points()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BoxedValueSet":
        return cls.from_points(data["box_min"], data["box_max"], data["members"],
                               data.get("tail_conductor"), data.get("tag", ""))

    def __repr__(self):
        return f"BoxedValueSet(r={self.r}, box=[{self.box_min}, {self.box_max}], tail={self.tail_conductor}, tag={self.tag!r})"


@dataclass(frozen=True)
class MaximalsReport:
    maximals: list
    relative_maximals: list
    absolute_maximals: list


def fiber(E: BoxedValueSet, alpha, J) -> str:
    return E.fiber(alpha, J)


def conductor(E: BoxedValueSet) -> tuple:
    return E.conductor()


def maximals(E: BoxedValueSet) -> MaximalsReport:
    return E.maximals()


def chain_distance(E: BoxedValueSet, alpha, beta, rng=None) -> int:
    return E.chain_distance(alpha, beta, rng)


def distance_diff(E1: BoxedValueSet, E2: BoxedValueSet, gamma: Sequence[int] | None = None) -> int:
    """d(E1 \\ E2) = d_E1(m_E1, gamma) - d_E2(m_E2, gamma) for gamma >= c_E2."""
    if E1.r != E2.r:
        raise ValueError("dimension mismatch")
    if not E2.is_subset_of(E1):
        raise NotASubset("the second value set is not contained in the first")
    c2 = E2.conductor()
    gamma = c2 if gamma is None else tuple(gamma)
    if any(g < c for g, c in zip(gamma, c2)):
        raise ConductorViolation(f"{gamma} is not above the conductor {c2}")
    return E1.chain_distance(E1.minimum(), gamma) - E2.chain_distance(E2.minimum(), gamma)


def gh_colength(E: BoxedValueSet, gamma, theta) -> int:
    return E.gh_colength(gamma, theta)


def lattice(r: int, lo: Sequence[int], hi: Sequence[int], tag: str = "") -> BoxedValueSet:
    """lo + N^r, boxed on [lo, hi]."""
    shape = tuple(h - l + 1 for l, h in zip(lo, hi))
    return BoxedValueSet(lo, hi, np.ones(shape, dtype=bool), lo, tag)
