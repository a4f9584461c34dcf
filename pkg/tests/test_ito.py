import pytest

from ncalc.algebra import Coeff, builtin_algebra, parse_algebra
from ncalc.algebra.expr import DT
from ncalc.errors import InputError, ResourceError
from ncalc.ito import (derive_ito_table, increment_word, normal_order, render_table, table_from_json,
                       table_product)

HALF = Coeff.parse("1/2")

HEISENBERG_PLAIN = """\
dA dA† = dt
dA dΛ = A(dt)
dΛ dA† = A†(dt)
dΛ dΛ = Λ(dt)
"""

ISO11_PLAIN = """\
d𝕴 dA₊ = -1/2 A₋(dt) + 1/2 A₊(dt)
dA₋ d𝕴 = 1/2 A₋(dt) - 1/2 A₊(dt)
dA₋ dA₊ = 𝕴(dt)
"""


def test_heisenberg_table_matches_printed_rules():
    t = derive_ito_table(builtin_algebra("heisenberg"))
    assert render_table(t) == HEISENBERG_PLAIN
    # every other product of the three increments vanishes
    incs = ("A", "Adag", "Lambda")
    nonzero = {("A", "Adag"), ("A", "Lambda"), ("Lambda", "Adag"), ("Lambda", "Lambda")}
    for a in incs:
        for b in incs:
            assert bool(t.coefficients(a, b)) == ((a, b) in nonzero)


def test_iso11_table_signs():
    t = derive_ito_table(builtin_algebra("iso11"))
    assert render_table(t) == ISO11_PLAIN
    assert t.coefficients("Am", "Ap") == {"I": Coeff(1)}
    assert t.coefficients("I", "Ap") == {"Am": -HALF, "Ap": HALF}
    # dI dA+ = -dA- dI
    assert t.coefficients("Am", "I") == {g: -c for g, c in t.coefficients("I", "Ap").items()}
    assert t.coefficients("Ap", "Am") == {}
    assert t.coefficients("I", "I") == {}
    assert not t.residuals
    # with the symbol rule on, cosh^2 matches no generator symbol and is reported
    forced = derive_ito_table(builtin_algebra("iso11"), enable_symbol_rule=True)
    assert forced.residuals[("I", "I")] == "cosh_mu^2"
    assert forced.coefficients("I", "I") == {}


def test_iso31_delta_structure():
    t = derive_ito_table(builtin_algebra("iso31"))
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            expect = {"I": Coeff(1)} if i == j else {}
            assert t.coefficients(f"Am{i}", f"Ap{j}") == expect
            assert t.coefficients(f"Ap{i}", f"Am{j}") == {}
        assert t.coefficients(f"Am{i}", "I") == {f"Am{i}": HALF, f"Ap{i}": -HALF}
        assert t.coefficients("I", f"Ap{i}") == {f"Am{i}": -HALF, f"Ap{i}": HALF}
    assert len(t.entries) == 9


def test_iso21_has_no_table():
    t = derive_ito_table(builtin_algebra("iso21"))
    assert render_table(t) == ""


def test_symbol_rule_toggle():
    h = builtin_algebra("heisenberg")
    off = derive_ito_table(h, enable_symbol_rule=False)
    assert off.coefficients("Lambda", "Lambda") == {}
    assert derive_ito_table(h).coefficients("Lambda", "Lambda") == {"Lambda": Coeff(1)}


@pytest.mark.parametrize("name", ["heisenberg", "iso11", "iso31"])
def test_json_round_trip(name):
    t = derive_ito_table(builtin_algebra(name))
    assert table_from_json(render_table(t, "json")) == t


def test_normal_order_is_identity_on_ordered_words():
    s = builtin_algebra("iso11")
    w = increment_word(["Ap", "I", "Am"])
    assert normal_order(s, w) == w


def test_normal_order_commutator_term():
    s = builtin_algebra("iso11")
    out = normal_order(s, increment_word(["Am", "Ap"]))
    assert out.coefficient([("Ap", DT), ("Am", DT)]) == Coeff(1)
    assert out.coefficient([("I", DT)]) == Coeff(1)


def test_normal_order_bound():
    s = builtin_algebra("iso11")
    with pytest.raises(ResourceError):
        normal_order(s, increment_word(["Am"] * 5), bound=4)


def test_unclassified_generator_rejected():
    with pytest.raises(InputError):
        normal_order(builtin_algebra("iso21"), increment_word(["Q", "T"]))


def test_table_product_bilinear():
    t = derive_ito_table(builtin_algebra("iso11"))
    out = table_product(t, {"Am": Coeff(2)}, {"Ap": Coeff(3), "I": Coeff(1)})
    assert out == {"I": Coeff(6), "Am": Coeff(1), "Ap": Coeff(-1)}


def test_custom_algebra_from_dsl():
    src = """
algebra osc
generators: a*ad ad one
central: one
unit: one
vacuum: a=annihilator ad=creator one=neutral
[a,ad] = one
"""
    t = derive_ito_table(parse_algebra(src))
    assert render_table(t) == "da dad = dt\n"
