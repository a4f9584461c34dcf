import math

import numpy as np
import pytest

from ncalc.errors import DomainError, RangeError
from ncalc.reps.bessel import bessel_k, bessel_k_array, bessel_k_series

# independent reference values (40-digit mpmath besselk)
K0_2 = 0.11389387274953343565
K1_2 = 0.13986588181652242728


def test_reference_values():
    assert bessel_k(0, 2.0) == pytest.approx(K0_2, rel=1e-14)
    assert bessel_k(1, 2.0) == pytest.approx(K1_2, rel=1e-14)
    assert bessel_k_series(0, 2.0) == pytest.approx(K0_2, rel=1e-15)


@pytest.mark.parametrize("n", range(9))
def test_integral_vs_series(n):
    for x in np.geomspace(0.05, 30.0, 15):
        a, b = bessel_k(n, x), bessel_k_series(n, x)
        assert abs(a - b) <= 1e-10 * abs(b)


@pytest.mark.parametrize("x", [0.05, 0.7, 2.0, 9.0, 30.0])
def test_recurrence(x):
    for n in range(1, 8):
        lhs = bessel_k(n + 1, x)
        rhs = bessel_k(n - 1, x) + 2 * n / x * bessel_k(n, x)
        assert abs(lhs - rhs) <= 1e-10 * lhs


def test_negative_order_symmetry():
    assert bessel_k(-3, 1.5) == bessel_k(3, 1.5)


def test_array_matches_scalar():
    x = np.array([0.02, 0.3, 1.0, 2.0, 2.0, 17.0])
    for n in (0, 1, 4):
        ref = np.array([bessel_k(n, v) for v in x])
        assert np.allclose(bessel_k_array(n, x), ref, rtol=1e-13, atol=0)


@pytest.mark.parametrize("x", [0.0, -1.0, math.nan])
def test_domain(x):
    with pytest.raises(DomainError):
        bessel_k(0, x)


def test_overflow():
    with pytest.raises(RangeError):
        bessel_k(200, 1e-3)
