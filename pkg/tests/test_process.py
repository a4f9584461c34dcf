import math

import numpy as np
import pytest

from ncalc.errors import ConsistencyError, DomainError, InputError
from ncalc.process import (ProductVector, SimpleProcess, SmearedOperator, charfunc_iso11, charfunc_iso11_u,
                           charfunc_iso31_u, moment_from_charfunc, overlap_iso11, rotation_relation,
                           smeared_apply, smeared_bracket_residual, stochastic_integral_matrix_element)
from ncalc.reps import build_representation, probe_set, vacuum_state
from ncalc.testfunc import TestFunction

# independent references (mpmath besselk at 40 digits)
K1_OVER_K0 = 1.2280369298189079757
Q2 = 0.61401846490945398787
SMALL_U_31 = 0.10233641081824233131
M2_31 = 0.20467282163648466262
PAPER = {0.5: 1.0795693937757861683, 1.0: 1.3554170794414161454, 2.0: 3.2982230087430133778}
SHIFT = {0.5: 0.92593814926920022349, 1.0: 0.73325547859134196048, 2.0: 0.2761511717871484086}
ISO31_U1 = 1.111758027811419891


@pytest.fixture(scope="module")
def iso11():
    return build_representation("iso11")


@pytest.fixture(scope="module")
def iso31():
    return build_representation("iso31")


def _labels(seed, T=2.0, n=9):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, T, n)
    return (TestFunction.from_samples(t, rng.normal(size=n)),
            TestFunction.from_samples(t, rng.normal(size=n) + 1j * rng.normal(size=n)),
            TestFunction.from_samples(t, rng.normal(size=n)))


def test_cosh_multiplication(iso11):
    f, g, _ = _labels(0)
    psi = vacuum_state(iso11)
    out = smeared_apply(iso11, SmearedOperator("I", f), ProductVector(psi, g))
    mu = iso11.grid.axes[0]
    assert np.allclose(out.v.values, np.cosh(mu) * psi.values, atol=0)
    assert out.g.close_to(f * g, tol=0.0)


def test_zero_smear_gives_zero_vector(iso11):
    _, g, _ = _labels(1)
    out = smeared_apply(iso11, SmearedOperator("Am", TestFunction.zero(2.0)), ProductVector(probe_set(iso11)[0], g))
    assert out.norm() == 0.0


@pytest.mark.parametrize("a, b", [("Am", "Ap"), ("Am", "I"), ("Ap", "I"), ("Am", "Am")])
def test_iso11_smeared_algebra(iso11, a, b):
    f, g, h = _labels(2)
    vec = ProductVector(probe_set(iso11)[3], h)
    assert smeared_bracket_residual(iso11, SmearedOperator(a, f), SmearedOperator(b, g), vec) < 1e-6


def test_iso11_ladder_realizes_identity(iso11):
    # (A-(f)A+(g) - A+(g)A-(f)) v = I(fg) v
    f, g, h = _labels(3)
    vec = ProductVector(probe_set(iso11)[1], h)
    am, ap = SmearedOperator("Am", f), SmearedOperator("Ap", g)
    lhs = smeared_apply(iso11, am, smeared_apply(iso11, ap, vec)) - smeared_apply(iso11, ap, smeared_apply(iso11, am, vec))
    rhs = smeared_apply(iso11, SmearedOperator("I", f * g), vec)
    assert (lhs - rhs).norm() < 1e-6 * vec.norm()


@pytest.mark.parametrize("a, b", [("Am1", "Ap1"), ("Am1", "Ap2"), ("Ap3", "I"), ("Q1", "Q2"), ("M12", "Am1")])
def test_iso31_smeared_algebra_with_wedge(iso31, a, b):
    T = 1.0
    f, g = TestFunction.indicator(0, 0.7, T), TestFunction.indicator(0, 0.4, T)
    vec = ProductVector(probe_set(iso31)[3], TestFunction.constant(1.0, T))
    assert smeared_bracket_residual(iso31, SmearedOperator(a, f), SmearedOperator(b, g), vec) < 1e-5


def test_rotation_relation(iso31):
    lhs, rhs = rotation_relation(iso31, 0.7, 0.4)
    assert abs(lhs) < 1e-6 and abs(rhs) < 1e-6


def test_unsupported_representation():
    rep = build_representation("heisenberg")
    f, g, _ = _labels(4)
    with pytest.raises(InputError):
        smeared_apply(rep, SmearedOperator("q", f), ProductVector(probe_set(rep)[0], g))


def test_unknown_generator(iso11):
    f, g, _ = _labels(4)
    with pytest.raises(InputError):
        smeared_apply(iso11, SmearedOperator("T", f), ProductVector(probe_set(iso11)[0], g))


# -- stochastic integrals -------------------------------------------------------------------

def test_zero_process(iso11):
    _, g, h = _labels(5)
    bra, ket = ProductVector(probe_set(iso11)[0], g), ProductVector(probe_set(iso11)[1], h)
    proc = SimpleProcess.zero([0.0, 0.5, 2.0])
    for t in (0.0, 0.3, 2.0):
        assert stochastic_integral_matrix_element(iso11, proc, bra, ket, t) == 0


def test_unit_gauge_integrand(iso11):
    vec = ProductVector(vacuum_state(iso11), TestFunction.indicator(0, 1.0, 1.0))
    proc = SimpleProcess([0.0, 1.0], [1.0], [0.0], [0.0])
    quad, tele = stochastic_integral_matrix_element(iso11, proc, vec, vec, 1.0, return_both=True)
    assert quad == pytest.approx(K1_OVER_K0, abs=1e-10)
    assert abs(quad - tele) < 1e-12
    half = stochastic_integral_matrix_element(iso11, proc, vec, vec, 0.5)
    assert half == pytest.approx(0.5 * K1_OVER_K0, abs=1e-10)


def test_vacuum_bra_creation_only(iso11):
    proc = SimpleProcess([0.0, 0.5, 1.0], [0, 0], [1.0, 0.0], [0, 0])
    _, g, _ = _labels(6, T=1.0)
    bra = ProductVector(vacuum_state(iso11), TestFunction.constant(1.0, 1.0))
    ket = ProductVector(vacuum_state(iso11), g)
    assert abs(stochastic_integral_matrix_element(iso11, proc, bra, ket, 1.0)) < 1e-10


def test_two_routes_agree_on_random_process(iso11):
    rng = np.random.default_rng(7)
    proc = SimpleProcess([0, 0.3, 1.1, 2.0], rng.normal(size=3), rng.normal(size=3) + 1j * rng.normal(size=3),
                         rng.normal(size=3))
    _, g, h = _labels(8)
    bra, ket = ProductVector(probe_set(iso11)[3], h), ProductVector(probe_set(iso11)[1], g)
    for t in (0.3, 0.9, 1.7, 2.0):
        quad, tele = stochastic_integral_matrix_element(iso11, proc, bra, ket, t, return_both=True)
        assert abs(quad - tele) < 1e-8


def test_integral_direction_on_iso31(iso31):
    proc = SimpleProcess([0.0, 1.0], [1.0], [0.0], [0.0])
    vec = ProductVector(vacuum_state(iso31), TestFunction.constant(1.0, 1.0))
    for d in (1, 3):
        assert stochastic_integral_matrix_element(iso31, proc, vec, vec, 1.0, direction=d) == pytest.approx(
            K1_OVER_K0, abs=1e-8)


def test_process_domain(iso11):
    proc = SimpleProcess([0.0, 1.0], [1.0], [0.0], [0.0])
    vec = ProductVector(vacuum_state(iso11), TestFunction.constant(1.0, 2.0))
    with pytest.raises(InputError):
        stochastic_integral_matrix_element(iso11, proc, vec, vec, 1.5)


def test_consistency_guard(iso11, monkeypatch):
    import ncalc.process as P
    monkeypatch.setattr(P, "_quadrature", lambda *a: 1.0)
    proc = SimpleProcess([0.0, 1.0], [1.0], [0.0], [0.0])
    vec = ProductVector(vacuum_state(iso11), TestFunction.constant(1.0, 1.0))
    with pytest.raises(ConsistencyError):
        stochastic_integral_matrix_element(iso11, proc, vec, vec, 1.0)


@pytest.mark.parametrize("bad", [dict(breakpoints=[0.0, 0.0]), dict(breakpoints=[0.1, 1.0]),
                                 dict(breakpoints=[0.0, 1.0], e0=[np.inf])])
def test_simple_process_validation(bad):
    args = dict(breakpoints=[0.0, 1.0], e0=[0.0], eplus=[0.0], eminus=[0.0])
    args.update(bad)
    with pytest.raises(InputError):
        SimpleProcess(**args)


# -- characteristic functionals -------------------------------------------------------------

@pytest.mark.parametrize("u", [0.5, 1.0, 2.0])
def test_charfunc_iso11_golden(u):
    assert charfunc_iso11_u(u) == pytest.approx(PAPER[u], abs=1e-12)
    assert charfunc_iso11_u(-u) == charfunc_iso11_u(u)
    assert charfunc_iso11_u(u, "shift") == pytest.approx(SHIFT[u], abs=1e-12)


def test_charfunc_at_zero():
    assert charfunc_iso11_u(0.0) == 1.0
    assert charfunc_iso11_u(0.0, "shift") == 1.0
    assert charfunc_iso31_u(2, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_charfunc_from_test_function():
    f = TestFunction.from_samples([0, 1, 2], [0.0, 1.0, 0.0])
    assert charfunc_iso11(f, 2.0) == pytest.approx(PAPER[1.0], abs=1e-12)


@pytest.mark.parametrize("u", [0.5, 1.0, 2.0, 3.0])
def test_shift_matches_overlap(u):
    assert abs(charfunc_iso11_u(u, "shift") - overlap_iso11(u)) < 1e-8


def test_paper_domain():
    with pytest.raises(DomainError):
        charfunc_iso11_u(math.pi)
    with pytest.raises(DomainError):
        charfunc_iso31_u(1, -3.2)
    assert charfunc_iso11_u(5.0, "shift") > 0


def test_value_ranges_of_both_conventions():
    us = np.linspace(-3.1, 3.1, 41)
    vals = np.array([charfunc_iso11_u(u) for u in us])
    assert np.all(vals >= 1.0)  # K0 decreasing and 2 cos(u/2) <= 2
    shift = np.array([charfunc_iso11_u(u, "shift") for u in us])
    assert np.all((shift > 0) & (shift <= 1.0))


def test_iso31_isotropy():
    vals = [charfunc_iso31_u(i, 1.0) for i in (1, 2, 3)]
    assert max(vals) - min(vals) < 1e-8
    assert vals[2] == pytest.approx(ISO31_U1, abs=1e-12)


def test_iso31_small_u():
    u = 1e-2
    assert (charfunc_iso31_u(3, u) - 1) / u ** 2 == pytest.approx(SMALL_U_31, abs=1e-5)


def test_moments_iso11(iso11):
    paper = lambda u: charfunc_iso11_u(u)  # noqa: E731
    shift = lambda u: charfunc_iso11_u(u, "shift")  # noqa: E731
    assert abs(moment_from_charfunc(paper, 1, 1e-3)) < 1e-10
    m2 = moment_from_charfunc(paper, 2, 1e-3)
    assert m2 == pytest.approx(Q2, abs=1e-5)
    m2s = moment_from_charfunc(shift, 2, 1e-3, "shift")
    assert m2s > 0 and m2 > 0 and abs(m2 - m2s) < 1e-5
    m4 = moment_from_charfunc(paper, 4, 0.05)
    m4s = moment_from_charfunc(shift, 4, 0.05, "shift")
    assert abs(m4 - m4s) < 1e-4


def test_moment_iso31_each_axis():
    for i in (1, 2, 3):
        assert moment_from_charfunc(lambda u: charfunc_iso31_u(i, u), 2, 1e-2) == pytest.approx(M2_31, abs=1e-5)


def test_moment_stencil_domain():
    with pytest.raises(DomainError):
        moment_from_charfunc(charfunc_iso11_u, 2, 1.0)
    with pytest.raises(InputError):
        moment_from_charfunc(charfunc_iso11_u, 5, 1e-3)
