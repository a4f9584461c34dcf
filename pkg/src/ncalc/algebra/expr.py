"""Linear combinations of ordered generator words with smearing labels.

A word is a tuple of factors ``(generator, label)``.  A label is a sorted
tuple of test-function identifiers standing for their pointwise product;
the empty tuple means "not smeared".  Indicator-type factors (``dt`` and
anything spelled ``chi[...]``) are idempotent, so ``dt * dt == dt``.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .coeff import ONE, ZERO, Coeff

Label = tuple
Factor = tuple  # (generator name, Label)
Word = tuple    # tuple of Factor

NO_LABEL: Label = ()
DT: Label = ("dt",)


def is_idempotent(factor: str) -> bool:
    return factor == "dt" or factor.startswith("chi[")


def label_product(a: Label, b: Label) -> Label:
    merged = list(a)
    for f in b:
        if is_idempotent(f) and f in merged:
            continue
        merged.append(f)
    return tuple(sorted(merged))


def make_label(*factors: str) -> Label:
    out: Label = ()
    for f in factors:
        out = label_product(out, (f,))
    return out


def format_label(label: Label) -> str:
    return "*".join(label)


class OperatorExpr:
    """Immutable sparse map from words to non-zero exact coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, Coeff] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for word, c in items:
            c = Coeff.of(c)
            word = tuple((g, tuple(lab)) for g, lab in word)
            acc[word] = acc.get(word, ZERO) + c
        self._terms = {w: c for w, c in sorted(acc.items(), key=lambda kv: _word_key(kv[0])) if c}
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls) -> "OperatorExpr":
        return cls()

    @classmethod
    def gen(cls, name: str, label: Label = NO_LABEL, coeff=ONE) -> "OperatorExpr":
        return cls({((name, tuple(label)),): Coeff.of(coeff)})

    @classmethod
    def word(cls, names: Iterable[str], label: Label = NO_LABEL, coeff=ONE) -> "OperatorExpr":
        return cls({tuple((n, tuple(label)) for n in names): Coeff.of(coeff)})

    @classmethod
    def linear(cls, combo: Mapping[str, Coeff], label: Label = NO_LABEL) -> "OperatorExpr":
        return cls({((g, tuple(label)),): c for g, c in combo.items()})

    # access -----------------------------------------------------------------
    @property
    def terms(self) -> list:
        return list(self._terms.items())

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def generators(self) -> set:
        return {g for w in self._terms for g, _ in w}

    def max_length(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def coefficient(self, word) -> Coeff:
        return self._terms.get(tuple(word), ZERO)

    def single_generator_part(self) -> dict:
        """Map generator -> coefficient over length-1 words (labels dropped)."""
        out: dict = {}
        for w, c in self._terms.items():
            if len(w) == 1:
                out[w[0][0]] = out.get(w[0][0], ZERO) + c
        return {g: c for g, c in out.items() if c}

    # algebra ---------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return OperatorExpr(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self):
        return OperatorExpr({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            return OperatorExpr([(w1 + w2, c1 * c2)
                                 for w1, c1 in self._terms.items()
                                 for w2, c2 in other._terms.items()])
        c = Coeff.of(other)
        return OperatorExpr({w: c * v for w, v in self._terms.items()})

    def __rmul__(self, other):
        c = Coeff.of(other)
        return OperatorExpr({w: c * v for w, v in self._terms.items()})

    def relabel(self, label: Label) -> "OperatorExpr":
        return OperatorExpr([(tuple((g, label_product(lab, label)) for g, lab in w), c)
                             for w, c in self._terms.items()])

    def map_generators(self, fn) -> "OperatorExpr":
        """Substitute each factor by ``fn(generator, label) -> OperatorExpr``."""
        out = OperatorExpr()
        for w, c in self._terms.items():
            prod = OperatorExpr({(): c})
            for g, lab in w:
                prod = prod * fn(g, lab)
            out = out + prod
        return out

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"OperatorExpr({format_expr(self)})"


def _word_key(word):
    return (len(word), word)


def format_expr(expr: OperatorExpr, labels: Mapping[str, str] | None = None) -> str:
    labels = labels or {}
    if expr.is_zero():
        return "0"
    chunks = []
    for w, c in expr.terms:
        body = " ".join(
            labels.get(g, g) + (f"({format_label(lab)})" if lab else "") for g, lab in w
        ) or "1"
        chunks.append(format_term(c, body))
    return join_terms(chunks)


def format_term(c: Coeff, body: str) -> tuple:
    """Return (sign, text) for ``c * body`` with unit coefficients elided."""
    if c == ONE:
        return "+", body
    if c == -ONE:
        return "-", body
    s = str(c)
    if c.is_single:
        if s.startswith("-"):
            return "-", f"{s[1:]} {body}"
        return "+", f"{s} {body}"
    return "+", f"({s}) {body}"


def join_terms(chunks) -> str:
    out = ""
    for k, (sign, text) in enumerate(chunks):
        if k == 0:
            out = ("-" if sign == "-" else "") + text
        else:
            out += f" {sign} {text}"
    return out
