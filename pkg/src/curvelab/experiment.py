"""Random equisingular pairs with a prescribed intersection multiplicity, and their Tjurina numbers."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .branch import CurveSpec, Parametrization
from .errors import CurveLabError, SpecParseError
from .invariants import NotApplicable, verify_all

MAX_RETRIES = 5


def char_exponents(generators) -> tuple:
    """Characteristic exponents (beta_0, ..., beta_g) of a plane-branch semigroup <beta_bar_0, ..., beta_bar_g>."""
    bb = [int(v) for v in generators]
    if not bb or bb[0] < 1:
        raise SpecParseError("semigroup generators must be positive integers")
    beta = [bb[0], *bb[1:2]]
    e = [bb[0]]
    for i in range(1, len(bb)):
        e.append(gcd(e[-1], bb[i]))
        if e[-1] >= e[-2]:
            raise SpecParseError(f"generators {bb} do not form a characteristic sequence (gcds must drop)")
    if e[-1] != 1:
        raise SpecParseError(f"generators {bb} have common factor {e[-1]}")
    for i in range(1, len(bb) - 1):
        n_i = e[i - 1] // e[i]
        if n_i * bb[i] >= bb[i + 1]:
            raise SpecParseError(f"generators {bb} are not the semigroup of a plane branch")
        beta.append(bb[i + 1] - n_i * bb[i] + beta[i])
    return tuple(beta)


def _allowed(beta: tuple, j: int) -> bool:
    """Whether a term t^j leaves the characteristic exponents unchanged."""
    e = beta[0]
    for b in beta[1:]:
        if j < b:
            return j % e == 0
        e = gcd(e, b)
    return True


@dataclass(frozen=True)
class Family:
    name: str
    generators: tuple
    targets: tuple
    samples: int
    coeff_range: int = 5
    extra_terms: int = 2
    oracle: bool = True

    @property
    def beta(self) -> tuple:
        return char_exponents(self.generators)

    @property
    def boundary(self) -> int:
        """n_g * beta_bar_g, the largest intersection outside the diagonal range."""
        if len(self.generators) == 1:
            return 0
        return gcd(*self.generators[:-1]) * self.generators[-1]

    @property
    def conductor(self) -> int:
        b = self.generators
        e = [b[0]]
        for v in b[1:]:
            e.append(gcd(e[-1], v))
        return sum((e[i - 1] // e[i] - 1) * b[i] for i in range(1, len(b))) - b[0] + 1


def parse_family(data: dict) -> Family:
    try:
        gens = tuple(int(v) for v in data["semigroup"])
        targets = data["I"]
        targets = tuple(int(v) for v in (targets if isinstance(targets, list) else [targets]))
        fam = Family(
            name=str(data.get("name", "family")),
            generators=gens,
            targets=targets,
            samples=int(data.get("samples", 5)),
            coeff_range=int(data.get("coeff_range", 5)),
            extra_terms=int(data.get("extra_terms", 2)),
            oracle=str(data.get("oracle", "on")).lower() not in ("off", "false", "0"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecParseError(f"malformed family descriptor ({exc})") from None
    char_exponents(gens)
    for I in fam.targets:
        if I < fam.boundary or (fam.boundary == 0 and I < 1):
            raise SpecParseError(f"I={I} is below n_g*beta_bar_g={fam.boundary}; only I >= that bound is generated")
    return fam


def _coeff(rng: random.Random, R: int, avoid=()) -> Fraction:
    while True:
        c = Fraction(rng.randint(-R, R))
        if c and c not in avoid:
            return c


def random_pair(fam: Family, I: int, rng: random.Random) -> tuple:
    """Two equisingular branches (t^n, y1), (t^n, y2) whose expansions first differ where I requires."""
    beta = fam.beta
    n, R = beta[0], fam.coeff_range
    if len(beta) == 1:
        k = I
    else:
        k = I - fam.boundary + beta[-1]
    top = max(k, beta[-1]) + 3
    y1 = {b: _coeff(rng, R) for b in beta[1:]}
    start = beta[1] + 1 if len(beta) > 1 else 2
    pool = [j for j in range(start, top + 1) if _allowed(beta, j) and j not in y1]
    for j in rng.sample(pool, min(fam.extra_terms, len(pool))):
        y1[j] = _coeff(rng, R)
    y2 = {j: c for j, c in y1.items() if j < k}
    a = y1.get(k, Fraction(0))
    y2[k] = _coeff(rng, R, avoid=(a, -a))
    for j in range(k + 1, top + 1):
        if rng.random() < 0.5:
            y2[j] = _coeff(rng, R)
    return Parametrization.puiseux(n, y1), Parametrization.puiseux(n, y2)


def _instance_seed(seed: int, I: int, s: int) -> str:
    return f"{seed}:{I}:{s}"


def run_instance(fam: Family, I: int, s: int, seed: int) -> dict:
    rng = random.Random(_instance_seed(seed, I, s))
    row = {"instance": f"{fam.name}-I{I}-{s}", "I_target": I}
    last_error = None
    for _ in range(MAX_RETRIES):
        try:
            p1, p2 = random_pair(fam, I, rng)
            curve = CurveSpec([p1, p2], name=row["instance"])
            if curve.intersection(0, 1) != I or curve.chars[0].beta_bar != curve.chars[1].beta_bar:
                last_error = "generated pair missed the target"
                continue
            rep = verify_all(curve, oracle=fam.oracle)
        except CurveLabError as exc:
            last_error = f"{type(exc).__name__}: {exc}"
            continue
        row.update({
            "branches": [repr(p1), repr(p2)],
            "I": I,
            "tau_berger": rep.tau_berger,
            "tau_oracle": rep.tau_oracle,
            "tau_closed": None if rep.tau_closed is NotApplicable else rep.tau_closed,
            "tau_branches": rep.tau_branches,
            "verdicts_pass": rep.passed,
        })
        return row
    row["error"] = f"generation failed after {MAX_RETRIES} attempts: {last_error}"
    return row


def _run_tuple(args):
    return run_instance(*args)


def run_family(fam: Family, seed: int = 0, jobs: int = 1, extra_rows=()) -> dict:
    """Run every (I, sample) instance; rows come back in a fixed order for any ``jobs``."""
    tasks = [(fam, I, s, seed) for I in fam.targets for s in range(fam.samples)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_run_tuple, tasks))
    else:
        rows = [_run_tuple(t) for t in tasks]
    rows.extend(extra_rows)
    c = fam.conductor
    summary = []
    for I in sorted({r.get("I", r["I_target"]) for r in rows}):
        taus = [r["tau_berger"] if r.get("tau_berger") is not None else r.get("tau_oracle")
                for r in rows if r.get("I", r["I_target"]) == I and "error" not in r]
        taus = [t for t in taus if t is not None]
        entry = {"I": I, "count": len(taus), "tau_values": sorted(set(taus)),
                 "tau_min": min(taus) if taus else None, "tau_max": max(taus) if taus else None}
        if I > fam.boundary:
            entry["closed_formula"] = 2 * I + c - 1
            entry["constant"] = len(set(taus)) <= 1
        else:
            entry["conjectured_min"] = 2 * I + c
        summary.append(entry)
    return {
        "family": {"name": fam.name, "semigroup": list(fam.generators), "beta": list(fam.beta),
                   "conductor": c, "ng_betabar_g": fam.boundary, "I": list(fam.targets), "samples": fam.samples},
        "seed": seed,
        "rows": rows,
        "summary": summary,
    }
