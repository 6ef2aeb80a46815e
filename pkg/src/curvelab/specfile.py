"""Curve spec files: JSON input and a small polynomial grammar."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .branch import CurveSpec, Parametrization
from .errors import InvalidParametrization, SpecParseError
from .exactalg import BivarPoly

SPEC_VERSION = "1"


class _PolyParser:
    """expr := term (('+'|'-') term)*, term := unary ('*' unary)*, unary := '-' unary | power,
    power := atom ('^' int)?, atom := int ('/' int)? | x | y | '(' expr ')'."""

    def __init__(self, text: str, line: int = 1, column: int = 1):
        self.text = text.replace("−", "-").replace("**", "^")
        self.pos = 0
        self.line, self.column = line, column

    def error(self, message):
        raise SpecParseError(message, self.line, self.column + self.pos)

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            self.error(f"expected '{ch}'" + (f" but found '{self.peek()}'" if self.peek() else " at end of input"))
        self.pos += 1

    def integer(self) -> int:
        self.peek()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def parse(self) -> BivarPoly:
        if not self.peek():
            self.error("empty polynomial")
        out = self.expr()
        if self.peek():
            self.error(f"unexpected '{self.peek()}'")
        return out

    def expr(self) -> BivarPoly:
        out = self.term()
        while self.peek() in ("+", "-"):
            op = self.peek()
            self.pos += 1
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> BivarPoly:
        out = self.unary()
        while self.peek() == "*":
            self.pos += 1
            out = out * self.unary()
        return out

    def unary(self) -> BivarPoly:
        if self.peek() == "-":
            self.pos += 1
            return -self.unary()
        if self.peek() == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self) -> BivarPoly:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            base = base ** self.integer()
        return base

    def atom(self) -> BivarPoly:
        ch = self.peek()
        if ch.isdigit():
            num = self.integer()
            if self.peek() == "/":
                self.pos += 1
                den = self.integer()
                if den == 0:
                    self.error("zero denominator")
                return BivarPoly.const(Fraction(num, den))
            return BivarPoly.const(num)
        if ch in ("x", "y"):
            self.pos += 1
            return BivarPoly.x() if ch == "x" else BivarPoly.y()
        if ch == "(":
            self.pos += 1
            out = self.expr()
            self.take(")")
            return out
        self.error(f"unexpected '{ch}'" if ch else "unexpected end of input")


def parse_polynomial(text: str, line: int = 1, column: int = 1) -> BivarPoly:
    """Parse e.g. ``"y^2 - x^3 + 1/2*x^2*y"`` into a BivarPoly."""
    return _PolyParser(text, line, column).parse()


def format_polynomial(f: BivarPoly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for (a, b), c in sorted(f.terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][1])):
        mono = "*".join(s for s in (f"x^{a}" if a > 1 else "x" * a, f"y^{b}" if b > 1 else "y" * b) if s)
        mag = abs(c)
        coeff = "" if mag == 1 and mono else str(mag)
        body = "*".join(s for s in (coeff, mono) if s)
        parts.append(("- " if c < 0 else "+ ") + body)
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


def _rational(value, where: str) -> Fraction:
    try:
        return Fraction(value) if not isinstance(value, float) else Fraction(str(value))
    except (ValueError, ZeroDivisionError, TypeError):
        raise SpecParseError(f"{where}: cannot read {value!r} as a rational number") from None


@dataclass
class SpecFile:
    name: str
    items: list  # Parametrization or BivarPoly, one per branch
    implicit: list
    polynomial: BivarPoly | None = None
    options: dict = field(default_factory=dict)

    @property
    def oracle(self) -> bool:
        return str(self.options.get("oracle", "on")).lower() not in ("off", "false", "0")


def _branch(entry, k: int):
    where = f"branch {k}"
    if not isinstance(entry, dict):
        raise SpecParseError(f"{where}: expected an object with 'param' or 'poly'")
    if "param" in entry:
        prm = entry["param"]
        try:
            n = int(prm["n"])
            ys = {int(e): _rational(c, where) for e, c in prm.get("y", [])}
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecParseError(f"{where}: malformed param ({exc})") from None
        scale = _rational(prm.get("x_scale", 1), where)
        try:
            p = Parametrization.puiseux(n, ys, x_scale=scale)
        except InvalidParametrization as exc:
            raise SpecParseError(f"{where}: {exc}") from None
        implicit = entry.get("implicit")
        return p, None if implicit is None else parse_polynomial(implicit)
    if "poly" in entry:
        return parse_polynomial(entry["poly"]), None
    raise SpecParseError(f"{where}: expected 'param' or 'poly'")


def parse_spec(data: dict, name: str = "") -> SpecFile:
    if not isinstance(data, dict):
        raise SpecParseError("spec must be a JSON object")
    version = str(data.get("version", SPEC_VERSION))
    if version != SPEC_VERSION:
        raise SpecParseError(f"unsupported spec version {version!r}")
    options = dict(data.get("options", {}))
    name = data.get("name", name)
    if "poly" in data:
        if "branches" in data:
            raise SpecParseError("give either 'poly' or 'branches', not both")
        return SpecFile(name, [], [], parse_polynomial(data["poly"]), options)
    branches = data.get("branches")
    if not branches:
        raise SpecParseError("at least one branch is required")
    items, implicit = [], []
    for k, entry in enumerate(branches):
        it, imp = _branch(entry, k)
        items.append(it)
        implicit.append(imp)
    return SpecFile(name, items, implicit, None, options)


def load_spec(path: str) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    stem = path.rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return parse_spec(data, stem)


def build_curve(spec: SpecFile, precision: int | None = None) -> CurveSpec:
    """Turn a spec into a CurveSpec, expanding polynomial branches by Newton-Puiseux."""
    from .puiseux import check_reduced, curve_from_branch_equations, curve_from_polynomial

    if spec.polynomial is not None:
        return curve_from_polynomial(spec.polynomial, precision, name=spec.name)
    for f in spec.items:
        if isinstance(f, BivarPoly):
            check_reduced(f)
    curve = curve_from_branch_equations(spec.items, precision, name=spec.name)
    curve.implicit = [imp if imp is not None else cur for imp, cur in zip(spec.implicit, curve.implicit)]
    return curve
