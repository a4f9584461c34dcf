"""Exact scalars in Q(i, sqrt2).

Structure constants of the builtin algebras are Gaussian rationals, but the
ladder generators are defined with a 1/sqrt2 factor, so the coefficient field
is closed under adjoining sqrt2.  An element is stored as x + y*sqrt2 with
x, y Gaussian rationals.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import DSLSyntaxError

_SQRT2 = math.sqrt(2.0)


def _gmul(a, b, c, d):
    # (a + bi)(c + di)
    return a * c - b * d, a * d + b * c


@dataclass(frozen=True)
class Coeff:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)
    re2: Fraction = Fraction(0)
    im2: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("re", "im", "re2", "im2"):
            value = getattr(self, name)
            if not isinstance(value, Fraction):
                object.__setattr__(self, name, Fraction(value))

    @classmethod
    def of(cls, value) -> "Coeff":
        if isinstance(value, Coeff):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        raise TypeError(f"cannot convert {value!r} to an exact coefficient")

    @classmethod
    def parse(cls, text: str) -> "Coeff":
        """Parse a literal such as ``-i``, ``1/2``, ``i/sqrt2`` or ``(1+i)/2``."""
        parser = _LinearParser(text)
        consts, gens = parser.parse_linear()
        if gens:
            raise DSLSyntaxError("generator in coefficient literal", 1, 1)
        return consts

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Coeff):
            try:
                other = Coeff.of(other)
            except TypeError:
                return NotImplemented
        return Coeff(self.re + other.re, self.im + other.im,
                     self.re2 + other.re2, self.im2 + other.im2)

    __radd__ = __add__

    def __neg__(self):
        return Coeff(-self.re, -self.im, -self.re2, -self.im2)

    def __sub__(self, other):
        return self + (-Coeff.of(other) if not isinstance(other, Coeff) else -other)

    def __rsub__(self, other):
        return Coeff.of(other) - self

    def __mul__(self, other):
        if not isinstance(other, Coeff):
            try:
                other = Coeff.of(other)
            except TypeError:
                return NotImplemented
        xr, xi = _gmul(self.re, self.im, other.re, other.im)
        yr, yi = _gmul(self.re2, self.im2, other.re2, other.im2)
        ar, ai = _gmul(self.re, self.im, other.re2, other.im2)
        br, bi = _gmul(self.re2, self.im2, other.re, other.im)
        return Coeff(xr + 2 * yr, xi + 2 * yi, ar + br, ai + bi)

    __rmul__ = __mul__

    def inverse(self) -> "Coeff":
        if not self:
            raise ZeroDivisionError("inverse of zero coefficient")
        # 1/(x + y sqrt2) = (x - y sqrt2) / (x^2 - 2 y^2)
        x2r, x2i = _gmul(self.re, self.im, self.re, self.im)
        y2r, y2i = _gmul(self.re2, self.im2, self.re2, self.im2)
        nr, ni = x2r - 2 * y2r, x2i - 2 * y2i
        mod = nr * nr + ni * ni
        inv_r, inv_i = nr / mod, -ni / mod
        return Coeff(self.re, self.im, -self.re2, -self.im2) * Coeff(inv_r, inv_i)

    def __truediv__(self, other):
        other = other if isinstance(other, Coeff) else Coeff.of(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Coeff.of(other) * self.inverse()

    def conjugate(self) -> "Coeff":
        return Coeff(self.re, -self.im, self.re2, -self.im2)

    def __bool__(self):
        return bool(self.re or self.im or self.re2 or self.im2)

    def __complex__(self):
        return complex(float(self.re) + float(self.re2) * _SQRT2,
                       float(self.im) + float(self.im2) * _SQRT2)

    def __abs__(self):
        return abs(complex(self))

    # text -----------------------------------------------------------------
    def __str__(self):
        parts = []
        for value, unit in ((self.re, ""), (self.im, "i"),
                            (self.re2, "sqrt2"), (self.im2, "i*sqrt2")):
            if not value:
                continue
            sign = "-" if value < 0 else "+"
            mag = abs(value)
            if unit and mag == 1:
                body = unit
            elif unit:
                body = f"{mag}*{unit}"
            else:
                body = str(mag)
            parts.append((sign, body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self):
        return f"Coeff({str(self)!r})"

    @property
    def is_single(self) -> bool:
        """True when only one of the four components is non-zero."""
        return sum(1 for v in (self.re, self.im, self.re2, self.im2) if v) <= 1


ZERO = Coeff()
ONE = Coeff(1)
I = Coeff(0, 1)
SQRT2 = Coeff(0, 0, 1)

# -- linear-expression parsing, shared with the DSL --------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[^\W\d]\w*)|(?P<op>[-+*/()]))")
RESERVED = frozenset({"i", "sqrt2"})


class _LinearParser:
    """Recursive-descent parser for sums of (coefficient * generator) terms.

    Generator names appear as identifiers; ``i`` and ``sqrt2`` are reserved.
    Each product may hold at most one generator and never in a denominator.
    """

    def __init__(self, text, line=1, col_offset=0, scalars=None):
        self.text = text
        self.scalars = scalars or {}
        self.line = line
        self.col_offset = col_offset
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                self._fail("unexpected character", pos + len(stripped[pos:]) - len(stripped[pos:].lstrip()))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def _fail(self, msg, pos):
        raise DSLSyntaxError(msg, self.line, self.col_offset + pos + 1)

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse_linear(self):
        if not self.tokens:
            self._fail("empty expression", 0)
        const, gens = self._sum()
        if self.i != len(self.tokens):
            self._fail("unexpected token", self._peek()[2])
        return const, gens

    def _sum(self):
        const, gens = ZERO, {}
        sign = ONE
        kind, val, pos = self._peek()
        if kind == "op" and val in "+-":
            self._take()
            sign = -ONE if val == "-" else ONE
        while True:
            c, g = self._product()
            if g is None:
                const = const + sign * c
            else:
                gens[g] = gens.get(g, ZERO) + sign * c
            kind, val, pos = self._peek()
            if kind == "op" and val in "+-":
                self._take()
                sign = -ONE if val == "-" else ONE
                continue
            break
        return const, {k: v for k, v in gens.items() if v}

    def _product(self):
        coeff, gen = self._atom()
        while True:
            kind, val, pos = self._peek()
            if kind == "op" and val in "*/":
                self._take()
                c, g = self._atom()
                if val == "/":
                    if g is not None:
                        self._fail("generator in denominator", pos)
                    if not c:
                        self._fail("division by zero", pos)
                    coeff = coeff / c
                else:
                    if g is not None and gen is not None:
                        self._fail("product of two generators", pos)
                    gen = gen if g is None else g
                    coeff = coeff * c
                continue
            return coeff, gen

    def _atom(self):
        kind, val, pos = self._take()
        if kind == "num":
            return Coeff(int(val)), None
        if kind == "name":
            if val == "i":
                return I, None
            if val == "sqrt2":
                return SQRT2, None
            if val in self.scalars:
                return self.scalars[val], None
            return ONE, val
        if kind == "op" and val == "(":
            const, gens = self._sum()
            k2, v2, p2 = self._take()
            if v2 != ")":
                self._fail("expected ')'", p2)
            if gens:
                self._fail("generator inside parentheses", pos)
            return const, None
        if kind == "op" and val == "-":
            c, g = self._atom()
            return -c, g
        self._fail("unexpected end of expression" if kind is None else f"unexpected {val!r}", pos)


def parse_linear(text, line=1, col_offset=0, scalars=None):
    """Parse ``text`` into (constant, {generator: coefficient}).

    ``scalars`` maps extra identifiers (named constants) to coefficient values.
    """
    return _LinearParser(text, line, col_offset, scalars).parse_linear()
