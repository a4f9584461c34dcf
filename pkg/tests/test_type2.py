import numpy as np
import pytest
import sympy as sp

from ncalc.algebra import OperatorExpr
from ncalc.errors import InputError
from ncalc.reps import build_representation, commutator_residuals, probe_set
from ncalc.type2 import (ModeState, Type2Process, gaussian_phi, mode_apply, mode_expectation,
                         mode_orthogonality_check, type2_expectation)


@pytest.fixture(scope="module")
def rep():
    return build_representation("iso21")


@pytest.fixture(scope="module")
def phi(rep):
    return gaussian_phi(rep)


def _gaussian_q2_oracle():
    # theta-average of Q^2 on e^{i n theta} phi(sigma), n = 0, done symbolically
    s, th = sp.symbols("sigma theta", real=True)
    phi = sp.pi ** sp.Rational(-1, 4) * sp.exp(-s ** 2 / 2)
    f = phi
    Q = lambda u: sp.I * (s * sp.cos(th) * sp.diff(u, s) - sp.sin(th) * sp.diff(u, th))  # noqa: E731
    integrand = sp.simplify(phi * Q(Q(f)))
    inner = sp.integrate(integrand, (th, 0, 2 * sp.pi)) / (2 * sp.pi)
    return sp.integrate(sp.simplify(inner), (s, -sp.oo, sp.oo))


def test_q2_oracle_is_three_eighths():
    assert _gaussian_q2_oracle() == sp.Rational(3, 8)


def test_t_eigenmode(rep, phi):
    m = ModeState(3, phi)
    assert np.max(np.abs(mode_apply(rep, "T", m).values - 3 * m.full(rep).values)) <= 1e-10


def test_e_is_multiplication(rep, phi):
    m = ModeState(2, phi)
    sigma, th = rep.grid.mesh()
    assert np.allclose(mode_apply(rep, "E", m).values, sigma * np.sin(th) * m.full(rep).values, atol=0)


def test_t_expectation_is_triangular(rep, phi):
    for t in range(6):
        total, per_mode = type2_expectation(rep, Type2Process(t, "T", phi))
        assert abs(total - t * (t + 1) / 2) < 1e-12
        assert len(per_mode) == t + 1


def test_moments(rep, phi):
    _, q = type2_expectation(rep, Type2Process(3, "Q", phi))
    assert max(abs(c) for c in q) <= 1e-10
    _, q2 = type2_expectation(rep, Type2Process(0, ["Q", "Q"], phi))
    assert abs(q2[0] - 0.375) <= 1e-8
    _, p2 = type2_expectation(rep, Type2Process(4, ["P", "P"], phi))
    assert max(abs(c - 0.5) for c in p2) <= 1e-8
    for g in ("I", "P"):
        _, vals = type2_expectation(rep, Type2Process(2, g, phi))
        assert max(abs(c) for c in vals) <= 1e-10


@pytest.mark.parametrize("F", [["Q", "Q"], ["P", "P"], ["E", "E"], "T"])
def test_real_and_nonnegative(rep, phi, F):
    total, per_mode = type2_expectation(rep, Type2Process(3, F, phi))
    assert abs(total.imag) <= 1e-10
    assert min(c.real for c in per_mode) >= -1e-10


def test_horizon_additivity(rep, phi):
    F = OperatorExpr.word(["E", "E"]) + OperatorExpr.gen("Q")
    a, _ = type2_expectation(rep, Type2Process(4, F, phi))
    b, _ = type2_expectation(rep, Type2Process(3, F, phi))
    assert abs(a - b - mode_expectation(rep, F, 4, phi)) < 1e-12


@pytest.mark.parametrize("n1, n2", [(0, 1), (2, 5), (7, 3)])
def test_orthogonality(rep, phi, n1, n2):
    assert abs(mode_orthogonality_check(rep, n1, n2, phi)) <= 1e-12


def test_orthogonality_rejects_equal_modes(rep, phi):
    with pytest.raises(InputError):
        mode_orthogonality_check(rep, 3, 3, phi)


def test_all_brackets_on_probes(rep):
    names = rep.algebra.base_names()
    pairs = [(a, b) for i, a in enumerate(names) for b in names[i + 1:]]
    res = commutator_residuals(rep, pairs, probe_set(rep))
    assert max(res.values()) <= 1e-6


def test_validation(rep, phi):
    with pytest.raises(InputError):
        Type2Process(-1, "T", phi)
    with pytest.raises(InputError):
        Type2Process(2, ["Q", "Q", "Q"], phi)
    with pytest.raises(InputError):
        ModeState(1, phi[:-1]).full(rep)
    with pytest.raises(InputError):
        type2_expectation(build_representation("iso11"), Type2Process(1, "T", phi))
