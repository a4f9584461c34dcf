"""Line-oriented text format for Lie algebras, plus a JSON form.

Example::

    algebra iso11
    generators: P Q I Am*Ap Ap
    vacuum: Am=annihilator Ap=creator I=neutral
    symbol: I=cosh_mu
    define: Am = 1/sqrt2*Q + i/sqrt2*P
    [P,Q] = -i*I

``X*Y`` pairs X with its adjoint Y, which is declared separately;
unpaired generators are self-adjoint.  Bracket right-hand sides are linear in the generators, with
coefficients in Q(i, sqrt2); names listed under ``constants`` may appear as
scalar factors.  A constant term is attached to the ``unit`` generator.
Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from ..errors import DSLSyntaxError, InputError
from .coeff import ONE, RESERVED, Coeff, parse_linear
from .spec import VACUUM_CLASSES, GeneratorSymbol, LieAlgebraSpec, complete_definitions

_IDENT = re.compile(r"[^\W\d]\w*\Z")
_BRACKET = re.compile(r"\[\s*(?P<a>[^\s,\]]+)\s*,\s*(?P<b>[^\s,\]]+)\s*\]\s*=(?P<rhs>.*)\Z")
_SYMBOL = re.compile(r"[\w.^]+\Z")
_KEYS = ("algebra", "generators", "central", "unit", "constants", "vacuum", "symbol",
         "label", "define", "alias", "symbol_rule")


def _check_ident(name, line, col):
    if not _IDENT.match(name) or name in RESERVED:
        raise DSLSyntaxError(f"invalid identifier {name!r}", line, col)


def _words(text, offset):
    """Yield (word, column) pairs of whitespace-separated tokens."""
    for m in re.finditer(r"\S+", text):
        yield m.group(0), offset + m.start() + 1


def _pairs(text, offset, line):
    for word, col in _words(text, offset):
        if word.count("=") != 1:
            raise DSLSyntaxError(f"expected name=value, got {word!r}", line, col)
        key, value = word.split("=")
        if not key or not value:
            raise DSLSyntaxError(f"expected name=value, got {word!r}", line, col)
        yield key, value, col


class _Builder:
    def __init__(self):
        self.name = None
        self.order: list = []
        self.adjoint: dict = {}
        self.where: dict = {}
        self.central: list = []
        self.unit = None
        self.constants: dict = {}
        self.vacuum: dict = {}
        self.symbol: dict = {}
        self.label: dict = {}
        self.symbol_rule = False
        self.deferred: list = []   # (kind, line, col, payload)

    def declare(self, token, line, col):
        name, _, adj = token.partition("*")
        _check_ident(name, line, col)
        if adj:
            _check_ident(adj, line, col + len(name) + 1)
        if name in self.where:
            raise DSLSyntaxError(f"duplicate generator {name!r}", line, col)
        self.order.append(name)
        self.where[name] = (line, col)
        if adj:
            self.adjoint[name] = (adj, line, col)

    def known(self, name, line, col):
        if name not in self.where:
            raise DSLSyntaxError(f"undeclared generator {name!r}", line, col)


def _locate(text, name):
    m = re.search(r"(?<!\w)" + re.escape(name) + r"(?!\w)", text)
    return m.start() if m else 0


def parse_algebra(text: str) -> LieAlgebraSpec:
    """Parse DSL text into a LieAlgebraSpec (derived brackets completed)."""
    b = _Builder()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        indent = len(stripped) - len(stripped.lstrip())
        body = stripped.strip()
        if body.startswith("["):
            m = _BRACKET.match(body)
            if not m:
                raise DSLSyntaxError("malformed bracket line", lineno, indent + 1)
            b.deferred.append(("bracket", lineno, indent, m))
            continue
        if body.startswith("algebra") and (len(body) == 7 or body[7].isspace()):
            name = body[7:].strip()
            if not name:
                raise DSLSyntaxError("missing algebra name", lineno, indent + 8)
            if b.name is not None:
                raise DSLSyntaxError("algebra name given twice", lineno, indent + 1)
            b.name = name
            continue
        key, sep, rest = body.partition(":")
        key = key.strip()
        if not sep or key not in _KEYS:
            raise DSLSyntaxError(f"unknown directive {key!r}", lineno, indent + 1)
        offset = indent + len(key) + 1
        if key == "generators":
            for word, col in _words(rest, offset):
                b.declare(word, lineno, col)
        elif key == "central":
            b.deferred.append(("central", lineno, offset, rest))
        elif key == "unit":
            b.deferred.append(("unit", lineno, offset, rest))
        elif key == "constants":
            for name, value, col in _pairs(rest, offset, lineno):
                _check_ident(name, lineno, col)
                c = Coeff.parse(value)
                if c.im or c.re2 or c.im2:
                    raise DSLSyntaxError("constants must be rational", lineno, col)
                b.constants[name] = c.re
        elif key == "symbol_rule":
            flag = rest.strip()
            if flag not in ("on", "off"):
                raise DSLSyntaxError("symbol_rule must be on or off", lineno, offset + 1)
            b.symbol_rule = flag == "on"
        else:
            b.deferred.append((key, lineno, offset, rest))

    if b.name is None:
        raise InputError("missing 'algebra <name>' line")
    if not b.order:
        raise InputError("empty generator block")
    return _finish(b)


def _finish(b: _Builder) -> LieAlgebraSpec:
    scalars = {k: Coeff(v) for k, v in b.constants.items()}
    aliases: dict = {}
    definitions: dict = {}
    brackets: dict = {}
    central: list = []

    def combo_of(rhs, line, col, allow_const):
        const, gens = parse_linear(rhs, line, col, scalars)
        out: dict = {}
        for g, c in gens.items():
            if g in aliases:
                for h, d in aliases[g].items():
                    out[h] = out.get(h, Coeff()) + c * d
                continue
            if g not in b.where:
                raise DSLSyntaxError(f"undeclared generator {g!r}", line, col + _locate(rhs, g) + 1)
            out[g] = out.get(g, Coeff()) + c
        if const:
            if not allow_const or b.unit is None:
                raise DSLSyntaxError("constant term without a unit generator", line, col + 1)
            out[b.unit] = out.get(b.unit, Coeff()) + const
        return {g: c for g, c in out.items() if c}

    # unit first so bracket constants can attach to it
    for kind, line, col, payload in b.deferred:
        if kind == "unit":
            words = list(_words(payload, col))
            if len(words) != 1:
                raise DSLSyntaxError("unit takes exactly one generator", line, col + 1)
            b.known(words[0][0], line, words[0][1])
            b.unit = words[0][0]
    for kind, line, col, payload in b.deferred:
        if kind == "bracket":
            continue
        if kind == "central":
            for word, wcol in _words(payload, col):
                b.known(word, line, wcol)
                central.append(word)
        elif kind in ("vacuum", "symbol", "label"):
            for name, value, wcol in _pairs(payload, col, line):
                b.known(name, line, wcol)
                if kind == "vacuum" and value not in VACUUM_CLASSES:
                    raise DSLSyntaxError(f"unknown vacuum class {value!r}", line, wcol + len(name) + 1)
                if kind == "symbol" and not _SYMBOL.match(value):
                    raise DSLSyntaxError(f"invalid symbol {value!r}", line, wcol + len(name) + 1)
                getattr(b, kind)[name] = value
        elif kind in ("define", "alias"):
            name, sep, rhs = payload.partition("=")
            if not sep:
                raise DSLSyntaxError(f"expected '{kind}: X = expression'", line, col + 1)
            lhs = name.strip()
            lcol = col + len(name) - len(name.lstrip()) + 1
            _check_ident(lhs, line, lcol)
            combo = combo_of(rhs, line, col + len(name) + 1, allow_const=False)
            if kind == "define":
                b.known(lhs, line, lcol)
                if lhs in definitions:
                    raise DSLSyntaxError(f"{lhs!r} defined twice", line, lcol)
                definitions[lhs] = combo
            else:
                if lhs in b.where or lhs in aliases:
                    raise DSLSyntaxError(f"alias {lhs!r} clashes with a name", line, lcol)
                aliases[lhs] = combo
    for kind, line, col, m in b.deferred:
        if kind != "bracket":
            continue
        x, y = m.group("a"), m.group("b")
        b.known(x, line, col + m.start("a") + 1)
        b.known(y, line, col + m.start("b") + 1)
        if (x, y) in brackets:
            raise DSLSyntaxError(f"bracket [{x},{y}] given twice", line, col + 1)
        brackets[(x, y)] = combo_of(m.group("rhs"), line, col + m.start("rhs"), allow_const=True)

    gens = []
    for name in b.order:
        adj = name
        if name in b.adjoint:
            adj, line, col = b.adjoint[name]
            b.known(adj, line, col)
        partners = [k for k, (v, _, _) in b.adjoint.items() if v == name]
        if len(partners) > 1 or (partners and adj not in (name, partners[0])):
            line, col = b.where[name]
            raise DSLSyntaxError(f"inconsistent adjoint pairing for {name!r}", line, col)
        if partners:
            adj = partners[0]
        gens.append(GeneratorSymbol(name, adj, b.vacuum.get(name), b.symbol.get(name),
                                    b.label.get(name)))
    spec = LieAlgebraSpec(b.name, tuple(gens), brackets, tuple(central), dict(b.constants),
                          definitions, b.unit, b.symbol_rule)
    return complete_definitions(spec)


# -- serialization ----------------------------------------------------------------

def format_combo(combo) -> str:
    """Render a linear combination in DSL syntax."""
    parts = []
    for g, c in combo.items():
        if c == ONE:
            text = g
        elif c == -ONE:
            text = "-" + g
        elif c.is_single:
            text = f"{c}*{g}"
        else:
            text = f"({c})*{g}"
        parts.append(text)
    if not parts:
        return "0"
    out = parts[0]
    for text in parts[1:]:
        out += " - " + text[1:] if text.startswith("-") else " + " + text
    return out


def to_dsl(spec: LieAlgebraSpec) -> str:
    lines = [f"algebra {spec.name}"]
    toks = [f"{g.name}*{g.adjoint}" if spec.index(g.adjoint) > spec.index(g.name) else g.name
            for g in spec.generators]
    lines.append("generators: " + " ".join(toks))
    if spec.central:
        lines.append("central: " + " ".join(spec.central))
    if spec.unit:
        lines.append(f"unit: {spec.unit}")
    if spec.scale_constants:
        lines.append("constants: " + " ".join(f"{k}={v}" for k, v in spec.scale_constants.items()))
    if spec.symbol_rule:
        lines.append("symbol_rule: on")
    for attr, key in (("vacuum_class", "vacuum"), ("symbol", "symbol"), ("label", "label")):
        pairs = [f"{g.name}={getattr(g, attr)}" for g in spec.generators if getattr(g, attr)]
        if pairs:
            lines.append(f"{key}: " + " ".join(pairs))
    for d, combo in spec.definitions.items():
        lines.append(f"define: {d} = {format_combo(combo)}")
    for (a, b), combo in spec.structure_constants().items():
        lines.append(f"[{a},{b}] = {format_combo(combo)}")
    return "\n".join(lines) + "\n"


def _combo_json(combo):
    return [{"coeff": str(c), "generator": g} for g, c in combo.items()]


def to_json(spec: LieAlgebraSpec) -> str:
    doc = {
        "algebra": spec.name,
        "generators": [{"name": g.name, "adjoint": g.adjoint, "vacuum_class": g.vacuum_class,
                        "symbol": g.symbol, "label": g.label} for g in spec.generators],
        "central": list(spec.central),
        "unit": spec.unit,
        "constants": {k: str(v) for k, v in spec.scale_constants.items()},
        "symbol_rule": spec.symbol_rule,
        "definitions": [{"generator": d, "combination": _combo_json(c)}
                        for d, c in spec.definitions.items()],
        "brackets": [{"left": a, "right": b, "result": _combo_json(c)}
                     for (a, b), c in spec.structure_constants().items()],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def from_json(text: str) -> LieAlgebraSpec:
    try:
        doc = json.loads(text)
        combo = lambda items: {e["generator"]: Coeff.parse(e["coeff"]) for e in items}  # noqa: E731
        gens = tuple(GeneratorSymbol(g["name"], g["adjoint"], g.get("vacuum_class"),
                                     g.get("symbol"), g.get("label")) for g in doc["generators"])
        return LieAlgebraSpec(
            doc["algebra"], gens,
            {(e["left"], e["right"]): combo(e["result"]) for e in doc["brackets"]},
            tuple(doc.get("central", ())),
            {k: Fraction(v) for k, v in doc.get("constants", {}).items()},
            {e["generator"]: combo(e["combination"]) for e in doc.get("definitions", ())},
            doc.get("unit"), bool(doc.get("symbol_rule", False)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed algebra JSON: {exc}") from exc
