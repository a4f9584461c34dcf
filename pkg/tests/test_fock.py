import math

import numpy as np
import pytest

from ncalc.algebra import builtin_algebra
from ncalc.errors import InputError
from ncalc.fock import (ccr_check, exp_inner, fd_matrix_element, fock_sum, fundamental_matrix_element,
                        gram_matrix, increment, weak_ito_check, word_matrix_element)
from ncalc.ito import derive_ito_table
from ncalc.reps import build_representation
from ncalc.testfunc import TestFunction

T = 3.0


def _random_labels(seed, n=1):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, T, 7)
    out = [TestFunction.from_samples(t, 0.6 * rng.normal(size=7) + 0.6j * rng.normal(size=7)) for _ in range(n)]
    return out if n > 1 else out[0]


def test_vacuum_normalization():
    z = TestFunction.zero(T)
    assert exp_inner(z, z) == 1.0


def test_exp_inner_vs_fock_sum():
    f, g = TestFunction.indicator(0, 1, T), TestFunction.indicator(0, 2, T)
    value, bound = fock_sum(f, g, 30)
    assert exp_inner(f, g) == pytest.approx(math.e, rel=1e-15)
    assert abs(exp_inner(f, g) - value) <= bound + 1e-15


def test_exp_inner_symmetry():
    f, g = _random_labels(1, 2)
    assert exp_inner(f, g) == pytest.approx(np.conj(exp_inner(g, f)), rel=1e-14)


def test_gram_positive():
    eig = np.linalg.eigvalsh(gram_matrix(_random_labels(2, 5)))
    assert eig.min() >= -1e-10


def test_annihilator_on_indicator():
    t = 1.3
    chi = TestFunction.indicator(0, t, T)
    assert fundamental_matrix_element("A", t, chi, TestFunction.zero(T)) == pytest.approx(t)


def test_gauge_on_indicator():
    # t e^t from the finite-difference oracle on the epsilon definition
    t = 1.3
    chi = TestFunction.indicator(0, t, T)
    assert fundamental_matrix_element("Lambda", t, chi, chi) == pytest.approx(t * math.exp(t), rel=1e-14)
    assert fd_matrix_element("Lambda", t, chi, chi) == pytest.approx(t * math.exp(t), rel=1e-8)


def test_creator_against_vacuum():
    f = _random_labels(3)
    assert fundamental_matrix_element("Adag", 2.0, f, TestFunction.zero(T)) == 0


@pytest.mark.parametrize("kind", ["Adag", "Lambda"])
def test_closed_forms_match_finite_differences(kind):
    f, g = _random_labels(4, 2)
    for t in (0.4, 1.9, 3.0):
        closed = fundamental_matrix_element(kind, t, f, g)
        assert abs(closed - fd_matrix_element(kind, t, f, g)) <= 1e-6 * max(1.0, abs(closed))


@pytest.mark.parametrize("kind", ["A", "Adag", "Lambda"])
def test_word_engine_agrees_with_closed_forms(kind):
    f, g = _random_labels(5, 2)
    chi = TestFunction.indicator(0, 1.1, T)
    assert word_matrix_element([(kind, chi)], f, g) == pytest.approx(
        fundamental_matrix_element(kind, 1.1, f, g), rel=1e-13)


def test_additivity_over_intervals():
    f, g = _random_labels(6, 2)
    whole = word_matrix_element([("A", TestFunction.indicator(0.2, 2.0, T))], f, g)
    parts = (word_matrix_element([("A", TestFunction.indicator(0.2, 1.0, T))], f, g)
             + word_matrix_element([("A", TestFunction.indicator(1.0, 2.0, T))], f, g))
    assert whole == pytest.approx(parts, rel=1e-13)


def test_commutator_of_smeared_fields():
    # <psi(g), [A(chi), A+(chi)] psi(f)> = <chi, chi> <psi(g), psi(f)>
    f, g = _random_labels(7, 2)
    chi = TestFunction.indicator(0.5, 1.5, T)
    c = word_matrix_element([("A", chi), ("Adag", chi)], f, g) - word_matrix_element([("Adag", chi), ("A", chi)], f, g)
    assert c == pytest.approx(1.0 * exp_inner(g, f), rel=1e-12)


def test_weak_ito_rule():
    f, g = _random_labels(8, 2)
    table = derive_ito_table(builtin_algebra("heisenberg"))
    res = weak_ito_check(table, f, g, 1.0)
    for pair, r in res.items():
        assert min(r["slopes"]) > 1.8, pair
        nonzero = bool(r["coefficients"])
        lead = r["product_slopes"]
        assert (abs(lead[-1] - 1) < 0.05) if nonzero else (lead[-1] > 1.8), pair


def test_dA_dAdag_leading_term():
    f, g = _random_labels(9, 2)
    for h in (1e-2, 5e-3, 2.5e-3):
        m = word_matrix_element([increment("A", 1.0, h, T), increment("Adag", 1.0, h, T)], f, g)
        assert abs(m / (h * exp_inner(g, f)) - 1) < 10 * h


def test_time_out_of_range():
    f = _random_labels(10)
    with pytest.raises(InputError):
        fundamental_matrix_element("A", 3.5, f, f)
    with pytest.raises(InputError):
        fundamental_matrix_element("B", 1.0, f, f)


def test_ccr_check():
    rep = build_representation("heisenberg")
    r = ccr_check(rep)
    assert r["[q,p] gauss"] <= 1e-6 and r["[q,p] x_gauss"] <= 1e-6
    assert r["a ground"] <= 1e-8
    assert r["[q,q]"] == 0.0
    with pytest.raises(InputError):
        ccr_check(build_representation("iso11"))
