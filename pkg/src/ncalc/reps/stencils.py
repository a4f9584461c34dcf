"""Derivative operators on the grid axes."""
from __future__ import annotations

import numpy as np
from scipy.special import sph_legendre_p

# 8th-order central first-derivative weights at offsets 1..4 (antisymmetric)
FD8 = np.array([4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0])


def fd8_derivative(values: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """Central 8th-order difference; values beyond the ends are taken as zero."""
    v = np.moveaxis(np.asarray(values), axis, -1)
    n = v.shape[-1]
    pad = np.zeros(v.shape[:-1] + (n + 8,), dtype=np.result_type(v.dtype, float))
    pad[..., 4:4 + n] = v
    out = np.zeros_like(pad[..., 4:4 + n])
    for k, c in enumerate(FD8, start=1):
        out += c * (pad[..., 4 + k:4 + k + n] - pad[..., 4 - k:4 - k + n])
    return np.moveaxis(out / h, -1, axis)


def fourier_wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT order; the Nyquist mode is set to zero."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return k


def fft_derivative(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Spectral d/dtheta on a uniform periodic grid over [0, 2 pi)."""
    v = np.asarray(values)
    n = v.shape[axis]
    shape = [1] * v.ndim
    shape[axis] = n
    ik = (1j * fourier_wavenumbers(n)).reshape(shape)
    out = np.fft.ifft(ik * np.fft.fft(v, axis=axis), axis=axis)
    return out if np.iscomplexobj(v) else out.real


class PolarDerivative:
    """Spectral d/dtheta1 on the sphere grid (Gauss-Legendre in cos theta1 x uniform theta2).

    Each theta2 Fourier mode m is projected on the associated Legendre
    functions P_l^|m|(cos theta1), l = |m| .. N1 - 1, which the Gauss rule
    integrates exactly against each other, and the projection is
    differentiated term by term.
    """

    def __init__(self, theta1: np.ndarray, weights1: np.ndarray, n2: int):
        self.n1 = len(theta1)
        self.n2 = n2
        modes = np.abs(np.fft.fftfreq(n2, d=1.0 / n2)).astype(int)
        self.matrices = np.zeros((n2, self.n1, self.n1))
        cache = {}
        for j, m in enumerate(modes):
            if m > self.n1 - 1:
                continue
            if m not in cache:
                ls = np.arange(m, self.n1)[:, None]
                p, dp = sph_legendre_p(ls, m, theta1[None, :], diff_n=1)
                gram = (p * p * weights1).sum(axis=1)
                cache[m] = dp.T @ ((p * weights1) / gram[:, None])
            self.matrices[j] = cache[m]

    def __call__(self, values: np.ndarray, axis1: int = -2, axis2: int = -1) -> np.ndarray:
        v = np.moveaxis(np.asarray(values), (axis1, axis2), (-2, -1))
        batch = v.shape[:-2]
        spec = np.fft.fft(v, axis=-1).reshape(-1, self.n1, self.n2)
        # out[b, i, m] = sum_j D[m, i, j] spec[b, j, m], as one batched matmul over m
        stacked = np.ascontiguousarray(spec.transpose(2, 1, 0))          # (m, j, b)
        out = np.matmul(self.matrices, stacked).transpose(2, 1, 0)       # (b, i, m)
        out = np.fft.ifft(out.reshape(batch + (self.n1, self.n2)), axis=-1)
        if not np.iscomplexobj(v):
            out = out.real
        return np.moveaxis(out, (-2, -1), (axis1, axis2))
