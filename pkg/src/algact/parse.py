"""Text formats: a small expression grammar for group-ring data, and JSON encodings.

Grammar (whitespace ignored)::

    matrix  := "[" row ("," row)* "]"          row := "[" expr ("," expr)* "]"
    vector  := "[" expr ("," expr)* "]" | expr
    expr    := ["+"|"-"] term (("+"|"-") term)*
    term    := factor ((["*"|"·"] factor) | ("/" INT))*
    factor  := atom ["^" ["("] ["-"] INT [")"]]
    atom    := INT | "e" | LABEL | "(" expr ")" | "(" INT ("," INT)+ ")"

Juxtaposition multiplies, so ``3e+(e-a-a^2)b`` and ``2e-g`` parse as expected.
Negative powers are allowed on group elements only.  A parenthesised
integer tuple with a comma is a lattice point, e.g. ``(1,-2)`` in Z^2.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Integral

from .groups import GroupDescriptor, GroupError
from .ring import FinSuppVector, GroupRingMatrix, _ring_product

__all__ = [
    "ParseError",
    "parse_expr",
    "parse_matrix",
    "parse_vector",
    "format_map",
    "format_matrix",
    "format_vector",
    "scalar_to_json",
    "scalar_from_json",
    "map_to_json",
    "map_from_json",
    "matrix_to_json",
    "vector_to_json",
    "vector_from_json",
]


class ParseError(ValueError):
    pass


_INT = re.compile(r"\d+")
_LATTICE_LIT = re.compile(r"\(\s*-?\d+(?:\s*,\s*-?\d+)+\s*\)")


class _Parser:
    def __init__(self, group: GroupDescriptor, text: str):
        self.G = group
        self.text = text
        self.pos = 0

    # -- lexing ---------------------------------------------------------------

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str):
        if not self.take(ch):
            self.fail(f"expected {ch!r}")

    def integer(self) -> int:
        self._skip()
        m = _INT.match(self.text, self.pos)
        if not m:
            self.fail("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def fail(self, msg: str):
        raise ParseError(f"{msg} at position {self.pos} in {self.text!r}")

    def at_end(self) -> bool:
        return self.peek() == ""

    # -- grammar ----------------------------------------------------------------

    def expr(self) -> dict:
        sign = 1
        if self.take("-"):
            sign = -1
        else:
            self.take("+")
        acc = _scale(self.term(), sign)
        while self.peek() in ("+", "-"):
            sign = 1 if self.text[self.pos] == "+" else -1
            self.pos += 1
            acc = _add(acc, _scale(self.term(), sign))
        return acc

    def _starts_factor(self) -> bool:
        c = self.peek()
        return bool(c) and (c.isdigit() or c.isalpha() or c == "(")

    def term(self) -> dict:
        acc = self.factor()
        while True:
            if self.take("/"):
                d = self.integer()
                if d == 0:
                    self.fail("division by zero")
                acc = {g: Fraction(c, d) for g, c in acc.items()}
            elif self.peek() in ("*", "·"):
                self.pos += 1
                acc = _ring_product(self.G, acc, self.factor())
            elif self._starts_factor():
                acc = _ring_product(self.G, acc, self.factor())
            else:
                break
        return {g: c for g, c in acc.items() if c != 0}

    def factor(self) -> dict:
        base = self.atom()
        if not self.take("^"):
            return base
        paren = self.take("(")
        neg = self.take("-")
        k = self.integer()
        if paren:
            self.expect(")")
        if neg:
            if len(base) != 1 or next(iter(base.values())) != 1:
                self.fail("negative powers apply to group elements only")
            (g,) = base
            base = {self.G.inverse(g): 1}
        out = {self.G.identity(): 1}
        for _ in range(k):
            out = _ring_product(self.G, out, base)
        return out

    def atom(self) -> dict:
        c = self.peek()
        if c.isdigit():
            return {self.G.identity(): self.integer()}
        if c == "(":
            m = _LATTICE_LIT.match(self.text, self.pos)
            if m:
                if self.G.kind == "free":
                    self.fail("vector literals need an abelian group")
                self.pos = m.end()
                try:
                    return {self.G.parse_element(m.group().replace(" ", "")): 1}
                except GroupError as exc:
                    raise ParseError(str(exc)) from None
            self.pos += 1
            inner = self.expr()
            self.expect(")")
            return inner
        if c.isalpha():
            self.pos += 1
            if c == "e":
                return {self.G.identity(): 1}
            if c not in self.G.labels:
                self.fail(f"unknown generator {c!r} for {self.G}")
            return {self.G._generator(self.G.labels.index(c)): 1}
        self.fail("expected a term" if c else "unexpected end of input")

    def bracket_list(self, item):
        self.expect("[")
        out = [item()]
        while self.take(","):
            out.append(item())
        self.expect("]")
        return out


def _add(x: dict, y: dict) -> dict:
    out = dict(x)
    for g, c in y.items():
        out[g] = out.get(g, 0) + c
    return {g: c for g, c in out.items() if c != 0}


def _scale(x: dict, s) -> dict:
    return {g: s * c for g, c in x.items()}


def parse_expr(group: GroupDescriptor, text: str) -> dict:
    """Parse a single group-ring element into a ``{element: coeff}`` map."""
    p = _Parser(group, text)
    out = p.expr()
    if not p.at_end():
        p.fail("trailing input")
    return out


def parse_matrix(group: GroupDescriptor, text: str) -> GroupRingMatrix:
    """A bracketed matrix ``[[..],[..]]``, or a bare expression read as 1x1."""
    p = _Parser(group, text)
    if p.peek() == "[":
        rows = p.bracket_list(lambda: p.bracket_list(p.expr))
    else:
        rows = [[p.expr()]]
    if not p.at_end():
        p.fail("trailing input")
    try:
        return GroupRingMatrix(group, rows)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_vector(group: GroupDescriptor, text: str) -> FinSuppVector:
    """A bracketed list ``[x1, x2]`` or a bare expression (length 1)."""
    p = _Parser(group, text)
    comps = p.bracket_list(p.expr) if p.peek() == "[" else [p.expr()]
    if not p.at_end():
        p.fail("trailing input")
    return FinSuppVector(group, comps)


# -- formatting -----------------------------------------------------------------


def _monomial(group: GroupDescriptor, g) -> str:
    return group.format_element(g)


def _coef_str(c) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"({c})"
    if isinstance(c, Fraction):
        return str(c.numerator)
    if isinstance(c, float):
        return repr(c)
    return str(c)


def format_map(group: GroupDescriptor, d: dict) -> str:
    """Render a group-ring element in the input grammar, in canonical element order."""
    if not d:
        return "0"
    out = []
    for g in sorted(d, key=group.sort_key):
        c = d[g]
        neg = (c.real if isinstance(c, complex) else c) < 0
        mag = -c if neg else c
        mono = _monomial(group, g)
        body = mono if mag == 1 else f"{_coef_str(mag)}{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def format_matrix(x: GroupRingMatrix) -> str:
    if x.shape == (1, 1):
        return format_map(x.group, x.entries[0][0])
    return "[" + ", ".join("[" + ", ".join(format_map(x.group, e) for e in row) + "]" for row in x.entries) + "]"


def format_vector(v: FinSuppVector) -> str:
    if len(v) == 1:
        return format_map(v.group, v.components[0])
    return "[" + ", ".join(format_map(v.group, c) for c in v.components) + "]"


# -- JSON -----------------------------------------------------------------------


def scalar_to_json(c):
    """Integers stay integers, rationals become ``"p/q"`` strings, reals stay floats."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, Integral):
        return int(c)
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, complex):
        return [c.real, c.imag]
    return float(c)


def scalar_from_json(v):
    if isinstance(v, str):
        f = Fraction(v)
        return f.numerator if f.denominator == 1 else f
    if isinstance(v, list):
        return complex(v[0], v[1])
    return v


def map_to_json(group: GroupDescriptor, d: dict) -> list:
    return [[group.format_element(g), scalar_to_json(d[g])] for g in sorted(d, key=group.sort_key)]


def map_from_json(group: GroupDescriptor, pairs: list) -> dict:
    out = {}
    for s, c in pairs:
        g = group.parse_element(s)
        out[g] = out.get(g, 0) + scalar_from_json(c)
    return out


def matrix_to_json(x: GroupRingMatrix) -> list:
    return [[map_to_json(x.group, e) for e in row] for row in x.entries]


def vector_to_json(v: FinSuppVector) -> list:
    return [map_to_json(v.group, c) for c in v.components]


def vector_from_json(group: GroupDescriptor, data: list) -> FinSuppVector:
    return FinSuppVector(group, [map_from_json(group, c) for c in data])
