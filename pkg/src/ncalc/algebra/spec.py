"""Lie algebra specifications, the bracket, and structure validation."""
from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..errors import InputError
from .coeff import ONE, ZERO, Coeff
from .expr import OperatorExpr, label_product

VACUUM_CLASSES = ("annihilator", "creator", "neutral", "null")
Combo = Mapping[str, Coeff]


@dataclass(frozen=True)
class GeneratorSymbol:
    """One generator.

    ``vacuum_class`` is None for generators that take no part in the process
    layer.  ``null`` marks a self-adjoint generator annihilating the vacuum
    from both sides; its increments are invisible in vacuum matrix elements.
    """

    name: str
    adjoint: str
    vacuum_class: str | None = None
    symbol: str | None = None
    label: str | None = None

    def display(self) -> str:
        return self.label or self.name


def _clean(combo: Mapping[str, Coeff]) -> dict:
    return {g: c for g, c in combo.items() if c}


def _add_into(acc: dict, combo: Mapping[str, Coeff], scale: Coeff = ONE):
    for g, c in combo.items():
        acc[g] = acc.get(g, ZERO) + scale * c


@dataclass(frozen=True, eq=False)
class LieAlgebraSpec:
    name: str
    generators: tuple
    brackets: Mapping = field(default_factory=dict)      # (a, b) -> {gen: Coeff}
    central: tuple = ()
    scale_constants: Mapping = field(default_factory=dict)
    definitions: Mapping = field(default_factory=dict)   # derived gen -> {gen: Coeff}
    unit: str | None = None
    symbol_rule: bool = False

    # lookup ------------------------------------------------------------------
    @property
    def names(self) -> tuple:
        return tuple(g.name for g in self.generators)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InputError(f"generator {name!r} not in algebra {self.name!r}") from None

    @property
    def _index(self):
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {g.name: k for k, g in enumerate(self.generators)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def generator(self, name: str) -> GeneratorSymbol:
        return self.generators[self.index(name)]

    def has(self, name: str) -> bool:
        return name in self._index

    def adjoint_of(self, name: str) -> str:
        return self.generator(name).adjoint

    def labels(self) -> dict:
        return {g.name: g.display() for g in self.generators}

    def bracket_of(self, a: str, b: str) -> dict:
        """Tabulated [a, b] as a linear combination (antisymmetric fallback)."""
        self.index(a)
        self.index(b)
        if (a, b) in self.brackets:
            return dict(self.brackets[(a, b)])
        if (b, a) in self.brackets:
            return {g: -c for g, c in self.brackets[(b, a)].items()}
        return {}

    def structure_constants(self) -> dict:
        """Canonical table: (a, b) with index(a) < index(b), non-zero only."""
        out = {}
        for a, b in itertools.combinations(self.names, 2):
            combo = _clean(self.bracket_of(a, b))
            if combo:
                out[(a, b)] = combo
        return out

    # definitions ---------------------------------------------------------------
    def base_names(self) -> tuple:
        return tuple(n for n in self.names if n not in self.definitions)

    def reduce(self, combo: Mapping[str, Coeff]) -> dict:
        """Rewrite a linear combination in terms of non-derived generators."""
        acc: dict = {}
        stack = [(g, c) for g, c in combo.items()]
        depth = 0
        while stack:
            depth += 1
            if depth > 100000:
                raise InputError("cyclic generator definitions")
            g, c = stack.pop()
            if g in self.definitions:
                stack.extend((h, c * d) for h, d in self.definitions[g].items())
            else:
                acc[g] = acc.get(g, ZERO) + c
        return _clean(acc)

    def __eq__(self, other):
        if not isinstance(other, LieAlgebraSpec):
            return NotImplemented
        return (self.name == other.name
                and self.generators == other.generators
                and self.structure_constants() == other.structure_constants()
                and set(self.central) == set(other.central)
                and dict(self.scale_constants) == dict(other.scale_constants)
                and {k: _clean(v) for k, v in self.definitions.items()}
                == {k: _clean(v) for k, v in other.definitions.items()}
                and self.unit == other.unit
                and self.symbol_rule == other.symbol_rule)

    def __hash__(self):
        return hash((self.name, self.generators))


# -- bracket on linear combinations and on OperatorExpr ---------------------

def bracket_linear(spec: LieAlgebraSpec, a: Combo, b: Combo) -> dict:
    acc: dict = {}
    for ga, ca in a.items():
        for gb, cb in b.items():
            _add_into(acc, spec.bracket_of(ga, gb), ca * cb)
    return _clean(acc)


def _factor_bracket(spec, fa, fb) -> OperatorExpr:
    (ga, la), (gb, lb) = fa, fb
    combo = spec.bracket_of(ga, gb)
    return OperatorExpr.linear(combo, label_product(la, lb))


def bracket(spec: LieAlgebraSpec, a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    """Bilinear bracket with Leibniz extension to words; labels multiply."""
    for g in a.generators() | b.generators():
        spec.index(g)
    out = OperatorExpr()
    for wa, ca in a.items():
        for wb, cb in b.items():
            out = out + (ca * cb) * _word_bracket(spec, wa, wb)
    return out


def _word_bracket(spec, wa, wb) -> OperatorExpr:
    if len(wa) == 1 and len(wb) == 1:
        return _factor_bracket(spec, wa[0], wb[0])
    out = OperatorExpr()
    if len(wb) > 1:
        for j in range(len(wb)):
            left = OperatorExpr({wb[:j]: ONE})
            right = OperatorExpr({wb[j + 1:]: ONE})
            out = out + left * _word_bracket(spec, wa, (wb[j],)) * right
        return out
    for i in range(len(wa)):
        left = OperatorExpr({wa[:i]: ONE})
        right = OperatorExpr({wa[i + 1:]: ONE})
        out = out + left * _factor_bracket(spec, wa[i], wb[0]) * right
    return out


def adjoint_expr(spec: LieAlgebraSpec, expr: OperatorExpr) -> OperatorExpr:
    """Involution: reverse words, adjoint each factor, conjugate coefficients."""
    return OperatorExpr([(tuple((spec.adjoint_of(g), lab) for g, lab in reversed(w)), c.conjugate())
                         for w, c in expr.items()])


# -- completion of derived brackets -----------------------------------------

def _solve_exact(columns: list, target: dict):
    """Solve sum_k x_k columns[k] = target over Coeff; None if inconsistent."""
    keys = sorted({g for col in columns for g in col} | set(target))
    n = len(columns)
    rows = [[col.get(k, ZERO) for col in columns] + [target.get(k, ZERO)] for k in keys]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][n]:
            return None
    x = [ZERO] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return x


def process_names(spec: LieAlgebraSpec) -> tuple:
    return tuple(g.name for g in spec.generators if g.vacuum_class is not None)


def express_in(spec: LieAlgebraSpec, combo: Mapping[str, Coeff], basis) -> dict | None:
    """Express a combination over the given generators, or None if outside their span."""
    cols = [spec.reduce({g: ONE}) for g in basis]
    x = _solve_exact(cols, spec.reduce(combo))
    if x is None:
        return None
    return _clean(dict(zip(basis, x)))


def complete_definitions(spec: LieAlgebraSpec) -> LieAlgebraSpec:
    """Fill in brackets involving derived generators from their definitions.

    Results between two process-layer generators are expressed over the
    process-layer generators when they lie in that span; otherwise over the
    base generators.  Explicitly given brackets are kept untouched.
    """
    if not spec.definitions:
        return spec
    brackets = dict(spec.brackets)
    proc = process_names(spec)
    names = spec.names
    for a, b in itertools.combinations(names, 2):
        if a not in spec.definitions and b not in spec.definitions:
            continue
        if (a, b) in brackets or (b, a) in brackets:
            continue
        raw = spec.reduce(bracket_linear(spec, spec.reduce({a: ONE}), spec.reduce({b: ONE})))
        result = raw
        if a in proc and b in proc and raw:
            expressed = express_in(spec, raw, proc)
            if expressed is not None:
                result = expressed
        if result:
            brackets[(a, b)] = result
    return dataclasses.replace(spec, brackets=brackets)


# -- validation ---------------------------------------------------------------

@dataclass
class StructureReport:
    algebra: str
    antisymmetry_violations: list = field(default_factory=list)
    undeclared: list = field(default_factory=list)
    involution_violations: list = field(default_factory=list)
    definition_violations: list = field(default_factory=list)
    central_violations: list = field(default_factory=list)
    jacobi_failures: list = field(default_factory=list)
    max_jacobi_residual: float = 0.0
    triples_checked: int = 0

    @property
    def passed(self) -> bool:
        return not (self.antisymmetry_violations or self.undeclared or self.involution_violations
                    or self.definition_violations or self.central_violations
                    or self.jacobi_failures)

    def summary(self) -> str:
        state = "pass" if self.passed else "FAIL"
        return (f"{self.algebra}: {state}; max Jacobi residual {self.max_jacobi_residual:.3g} "
                f"over {self.triples_checked} triples; antisymmetry violations "
                f"{len(self.antisymmetry_violations)}; definition violations "
                f"{len(self.definition_violations)}")


def jacobi_residual(spec: LieAlgebraSpec, a: str, b: str, c: str) -> dict:
    one = lambda g: {g: ONE}  # noqa: E731
    total: dict = {}
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        _add_into(total, bracket_linear(spec, one(x), bracket_linear(spec, one(y), one(z))))
    return spec.reduce(total)


def check_structure(spec: LieAlgebraSpec, all_triples: bool = False) -> StructureReport:
    report = StructureReport(spec.name)
    names = spec.names
    declared = set(names)
    for (a, b), combo in spec.brackets.items():
        for g in (a, b, *combo):
            if g not in declared:
                report.undeclared.append(((a, b), g))
        if (b, a) in spec.brackets and a != b:
            rev = spec.brackets[(b, a)]
            keys = set(combo) | set(rev)
            if any(combo.get(k, ZERO) + rev.get(k, ZERO) for k in keys):
                report.antisymmetry_violations.append((a, b))
        if a == b and _clean(combo):
            report.antisymmetry_violations.append((a, b))
    for d, combo in spec.definitions.items():
        for g in (d, *combo):
            if g not in declared:
                report.undeclared.append(((d, "define"), g))
    for g in spec.generators:
        if g.adjoint not in declared:
            report.undeclared.append(((g.name, "adjoint"), g.adjoint))
    if report.undeclared:
        return report

    for g in spec.generators:
        partner = spec.generator(g.adjoint)
        if partner.adjoint != g.name:
            report.involution_violations.append(g.name)
        if g.vacuum_class == "annihilator" and partner.vacuum_class != "creator":
            report.involution_violations.append(g.name)
        if g.vacuum_class == "creator" and partner.vacuum_class != "annihilator":
            report.involution_violations.append(g.name)
        if g.symbol is not None and g.vacuum_class not in (None, "neutral"):
            report.involution_violations.append(g.name)

    for z in spec.central:
        for g in names:
            if spec.reduce(spec.bracket_of(z, g)):
                report.central_violations.append((z, g))

    for d, combo in spec.definitions.items():
        for g in names:
            direct = spec.reduce(spec.bracket_of(d, g))
            via = spec.reduce(bracket_linear(spec, combo, {g: ONE}))
            if direct != via:
                report.definition_violations.append((d, g))

    triples = (itertools.product(names, repeat=3) if all_triples
               else itertools.combinations(names, 3))
    worst = Fraction(0)
    for a, b, c in triples:
        report.triples_checked += 1
        res = jacobi_residual(spec, a, b, c)
        if res:
            report.jacobi_failures.append(((a, b, c), res))
            worst = max(worst, max(abs(v) for v in res.values()))
    report.max_jacobi_residual = float(worst)
    return report
