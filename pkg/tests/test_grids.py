import numpy as np
import pytest

from ncalc.errors import InputError
from ncalc.reps.grids import make_grid
from ncalc.reps.stencils import PolarDerivative, fd8_derivative, fft_derivative


def test_default_shapes():
    assert make_grid("line").shape == (256,)
    assert make_grid("hyperboloid").shape == (128, 48, 64)
    assert make_grid("cone").shape == (256, 64)


def test_offset_nodes_avoid_origin():
    mu = make_grid("hyperbola").axes[0]
    assert np.min(np.abs(mu)) > 0
    assert np.allclose(mu, -mu[::-1])


def test_measures():
    # sphere weights integrate to 4 pi, cone angular weights to 1
    g = make_grid("hyperboloid", N=(16, 24, 32))
    assert np.sum(np.multiply.outer(g.axis_weights[1], g.axis_weights[2])) == pytest.approx(4 * np.pi, rel=1e-14)
    c = make_grid("cone", N=(16, 12))
    assert np.sum(c.axis_weights[1]) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("kwargs", [dict(N=(255,)), dict(L=-1.0), dict(N=(16, 16))])
def test_invalid_grids(kwargs):
    with pytest.raises(InputError):
        make_grid("line", **kwargs)


def test_unknown_manifold():
    with pytest.raises(InputError):
        make_grid("torus")


def test_fd8_order():
    errs = []
    for n in (64, 128):
        g = make_grid("line", L=10.0, N=(n,))
        x = g.axes[0]
        d = fd8_derivative(np.exp(-x ** 2), g.spacing)
        errs.append(np.max(np.abs(d + 2 * x * np.exp(-x ** 2))))
    assert errs[0] / errs[1] > 100  # close to 2^8


def test_fd8_is_skew():
    n, h = 20, 0.1
    D = np.stack([fd8_derivative(e, h) for e in np.eye(n)], axis=1)
    assert np.allclose(D, -D.T, atol=0)


def test_fft_derivative_exact_for_trig_polynomials():
    th = 2 * np.pi * np.arange(32) / 32
    f = np.sin(3 * th) + 0.5 * np.cos(7 * th)
    assert np.max(np.abs(fft_derivative(f) - (3 * np.cos(3 * th) - 3.5 * np.sin(7 * th)))) < 1e-12


def test_polar_derivative_on_spherical_functions():
    g = make_grid("hyperboloid", N=(2, 24, 16))
    t1, t2 = g.axes[1][:, None], g.axes[2][None, :]
    D = PolarDerivative(g.axes[1], g.axis_weights[1], len(g.axes[2]))
    f = np.sin(t1) ** 2 * np.cos(2 * t2) + np.cos(t1) * np.sin(t1) * np.sin(t2) + np.cos(t1) ** 3
    df = 2 * np.sin(t1) * np.cos(t1) * np.cos(2 * t2) + np.cos(2 * t1) * np.sin(t2) - 3 * np.cos(t1) ** 2 * np.sin(t1)
    assert np.max(np.abs(D(f) - df)) < 1e-10
