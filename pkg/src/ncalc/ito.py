"""Multiplication tables for stochastic differentials.

The table is obtained by normal ordering the product of two increments with
the bracket relations (creators left, annihilators right), then deleting the
remaining two-factor words, which are second order in dt inside adapted
vacuum matrix elements.  Commutator terms carry the product of the two
interval labels, and since dt * dt = dt for indicators they are first order.

An optional symbol rule handles multiplicative generators: the pointwise
product of their multiplier symbols is matched against the other symbols of
the algebra, and recorded as a residual when nothing matches.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .algebra.coeff import Coeff
from .algebra.expr import DT, OperatorExpr, format_term, join_terms, label_product
from .algebra.spec import LieAlgebraSpec
from .errors import InputError, ResourceError

RANK = {"creator": 0, "neutral": 1, "null": 1, "annihilator": 2}
DEFAULT_BOUND = 4


def _key(spec: LieAlgebraSpec, name: str):
    cls = spec.generator(name).vacuum_class
    if cls is None:
        raise InputError(f"generator {name!r} has no vacuum classification")
    return RANK[cls], spec.index(name)


def increment_word(names, label=DT) -> OperatorExpr:
    """Product of increments of the named generators over one interval."""
    return OperatorExpr.word(names, label)


def normal_order(spec: LieAlgebraSpec, word, bound: int = DEFAULT_BOUND) -> OperatorExpr:
    """Rewrite ``word`` so that every word is in normal order.

    ``word`` may be an OperatorExpr or a sequence of generator names (each
    smeared over ``dt``).  Only the substitution xy -> yx + [x, y] is used.
    """
    expr = word if isinstance(word, OperatorExpr) else increment_word(list(word))
    if expr.max_length() > bound:
        raise ResourceError(f"word length {expr.max_length()} exceeds bound {bound}")
    for g in expr.generators():
        _key(spec, g)
    done = OperatorExpr()
    pending = list(expr.items())
    steps = 0
    while pending:
        w, c = pending.pop()
        keys = [_key(spec, g) for g, _ in w]
        k = next((k for k in range(len(w) - 1) if keys[k] > keys[k + 1]), None)
        if k is None:
            done = done + OperatorExpr({w: c})
            continue
        steps += 1
        if steps > 100000:
            raise ResourceError("normal ordering did not terminate")
        (x, lx), (y, ly) = w[k], w[k + 1]
        pending.append((w[:k] + ((y, ly), (x, lx)) + w[k + 2:], c))
        label = label_product(lx, ly)
        for g, d in spec.bracket_of(x, y).items():
            _key(spec, g)
            pending.append((w[:k] + ((g, label),) + w[k + 2:], c * d))
    return done


def symbol_product(a: str, b: str) -> str:
    """Canonical pointwise product of two multiplier symbols (``1`` is the identity)."""
    powers: dict = {}
    for sym in (a, b):
        for factor in sym.split("*"):
            if factor == "1":
                continue
            base, _, exp = factor.partition("^")
            powers[base] = powers.get(base, 0) + (int(exp) if exp else 1)
    parts = [name if k == 1 else f"{name}^{k}" for name, k in sorted(powers.items())]
    return "*".join(parts) or "1"


@dataclass
class ItoTable:
    algebra: str
    entries: dict = field(default_factory=dict)     # (g, h) -> OperatorExpr over dt
    residuals: dict = field(default_factory=dict)   # (g, h) -> symbol product
    ordering: tuple = ()
    labels: dict = field(default_factory=dict)
    unit: str | None = None

    def entry(self, a: str, b: str) -> OperatorExpr:
        return self.entries.get((a, b), OperatorExpr())

    def coefficients(self, a: str, b: str) -> dict:
        return self.entry(a, b).single_generator_part()

    def __eq__(self, other):
        if not isinstance(other, ItoTable):
            return NotImplemented
        return (self.algebra == other.algebra and self.entries == other.entries
                and self.residuals == other.residuals and tuple(self.ordering) == tuple(other.ordering))


def increments(spec: LieAlgebraSpec) -> tuple:
    """Generators whose differentials enter the table."""
    return tuple(g.name for g in spec.generators
                 if g.vacuum_class in ("annihilator", "creator", "neutral") and g.name != spec.unit)


def derive_ito_table(spec: LieAlgebraSpec, enable_symbol_rule: bool | None = None,
                     bound: int = DEFAULT_BOUND) -> ItoTable:
    if enable_symbol_rule is None:
        enable_symbol_rule = spec.symbol_rule
    incs = increments(spec)
    ordering = tuple(sorted((g.name for g in spec.generators if g.vacuum_class),
                            key=lambda n: _key(spec, n)))
    by_symbol = {g.symbol: g.name for g in spec.generators
                 if g.symbol and g.vacuum_class in ("annihilator", "creator", "neutral")}
    table = ItoTable(spec.name, ordering=ordering, labels=spec.labels(), unit=spec.unit)
    for a in incs:
        for b in incs:
            ordered = normal_order(spec, increment_word([a, b]), bound)
            kept = OperatorExpr([(w, c) for w, c in ordered.items()
                                 if len(w) == 1 and spec.generator(w[0][0]).vacuum_class != "null"])
            sa, sb = spec.generator(a).symbol, spec.generator(b).symbol
            if enable_symbol_rule and sa and sb:
                prod = symbol_product(sa, sb)
                if prod in by_symbol:
                    kept = kept + OperatorExpr.gen(by_symbol[prod], DT)
                else:
                    table.residuals[(a, b)] = prod
            if kept:
                table.entries[(a, b)] = kept
    return table


def table_product(table: ItoTable, left: dict, right: dict) -> dict:
    """Bilinear product of two increment combinations using the table."""
    out: dict = {}
    for a, ca in left.items():
        for b, cb in right.items():
            for g, c in table.coefficients(a, b).items():
                out[g] = out.get(g, Coeff()) + ca * cb * c
    return {g: c for g, c in out.items() if c}


# -- rendering --------------------------------------------------------------------

def _term_body(table: ItoTable, g: str) -> str:
    if g == table.unit:
        return "dt"
    return f"{table.labels.get(g, g)}(dt)"


def format_entry(table: ItoTable, a: str, b: str) -> str:
    lab = table.labels
    expr = table.entry(a, b)
    rhs = join_terms([format_term(c, _term_body(table, w[0][0])) for w, c in expr.items()]) if expr else "0"
    return f"d{lab.get(a, a)} d{lab.get(b, b)} = {rhs}"


def _pair_order(table: ItoTable, pairs):
    rank = {g: k for k, g in enumerate(table.labels)}
    return sorted(pairs, key=lambda p: (rank.get(p[0], len(rank)), rank.get(p[1], len(rank)), p))


def render_table(table: ItoTable, format: str = "plain") -> str:
    if format == "plain":
        lines = [format_entry(table, a, b) for a, b in _pair_order(table, table.entries)]
        lab = table.labels
        lines += [f"# residual d{lab.get(a, a)} d{lab.get(b, b)} -> {s}"
                  for (a, b), s in ((p, table.residuals[p]) for p in _pair_order(table, table.residuals))]
        return "".join(line + "\n" for line in lines)
    if format == "json":
        doc = {
            "algebra": table.algebra,
            "ordering": list(table.ordering),
            "unit": table.unit,
            "labels": table.labels,
            "entries": [{"left": a, "right": b,
                         "result": [{"coeff": str(c), "generator": w[0][0]}
                                    for w, c in table.entries[(a, b)].items()]}
                        for a, b in _pair_order(table, table.entries)],
            "residuals": [{"left": a, "right": b, "symbol": table.residuals[(a, b)]}
                          for a, b in _pair_order(table, table.residuals)],
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    raise InputError(f"unknown table format {format!r}")


def table_from_json(text: str) -> ItoTable:
    try:
        doc = json.loads(text)
        entries = {}
        for e in doc["entries"]:
            entries[(e["left"], e["right"])] = OperatorExpr(
                [(((r["generator"], DT),), Coeff.parse(r["coeff"])) for r in e["result"]])
        residuals = {(e["left"], e["right"]): e["symbol"] for e in doc["residuals"]}
        return ItoTable(doc["algebra"], entries, residuals, tuple(doc.get("ordering", ())),
                        dict(doc.get("labels", {})), doc.get("unit"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed table JSON: {exc}") from exc


__all__ = ["ItoTable", "derive_ito_table", "increment_word", "increments", "normal_order",
           "render_table", "symbol_product", "table_from_json", "table_product"]
