"""Piecewise-polynomial test functions on a time window [0, T_max].

Indicators, constants and piecewise-linear interpolants of samples are all
piecewise polynomials, so products, conjugates and integrals are exact up to
floating-point rounding.  Pieces are half-open, [t_k, t_{k+1}).
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InputError

_TOL = 1e-14


def _trim(c):
    c = np.asarray(c, dtype=complex)
    return c if c.size else np.zeros(1, dtype=complex)


class TestFunction:
    __test__ = False  # not a pytest class

    def __init__(self, breaks, coeffs, t_max: float | None = None):
        breaks = np.asarray(breaks, dtype=float)
        if breaks.ndim != 1 or breaks.size < 2 or np.any(np.diff(breaks) <= 0):
            raise InputError("breakpoints must be strictly increasing with at least two entries")
        if len(coeffs) != breaks.size - 1:
            raise InputError("need one polynomial per piece")
        if breaks[0] != 0.0:
            raise InputError("test functions start at t = 0")
        self.breaks = breaks
        self.coeffs = [_trim(c) for c in coeffs]   # polynomials in absolute t, low order first
        if any(not np.all(np.isfinite(c)) for c in self.coeffs):
            raise InputError("test function coefficients must be finite")

    # constructors --------------------------------------------------------------
    @classmethod
    def zero(cls, t_max: float) -> "TestFunction":
        return cls([0.0, t_max], [[0.0]])

    @classmethod
    def constant(cls, value, t_max: float) -> "TestFunction":
        return cls([0.0, t_max], [[value]])

    @classmethod
    def indicator(cls, a: float, b: float, t_max: float, value=1.0) -> "TestFunction":
        """value * chi_[a, b) on [0, t_max]."""
        if not 0.0 <= a <= b <= t_max:
            raise InputError(f"indicator interval [{a}, {b}] outside [0, {t_max}]")
        pts = sorted({0.0, a, b, t_max})
        coeffs = [[value] if a <= lo and hi <= b and a < b else [0.0] for lo, hi in zip(pts[:-1], pts[1:])]
        return cls(pts, coeffs)

    @classmethod
    def from_samples(cls, times, values) -> "TestFunction":
        """Piecewise-linear interpolant of samples; times must start at 0."""
        t = np.asarray(times, dtype=float)
        v = np.asarray(values, dtype=complex)
        if t.shape != v.shape or t.size < 2:
            raise InputError("samples need matching time and value arrays of length >= 2")
        slope = np.diff(v) / np.diff(t)
        coeffs = [[v[k] - slope[k] * t[k], slope[k]] for k in range(t.size - 1)]
        return cls(t, coeffs)

    @classmethod
    def polynomial(cls, coeffs, t_max: float) -> "TestFunction":
        return cls([0.0, t_max], [coeffs])

    # basic properties ---------------------------------------------------------
    @property
    def t_max(self) -> float:
        return float(self.breaks[-1])

    def _check(self, other: "TestFunction"):
        if abs(self.t_max - other.t_max) > _TOL * max(1.0, self.t_max):
            raise InputError("test functions live on different time windows")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t_max):
            raise InputError("evaluation point outside the time window")
        idx = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0, len(self.coeffs) - 1)
        out = np.empty(t.shape, dtype=complex)
        for k in np.unique(idx):
            sel = idx == k
            out[sel] = P.polyval(t[sel], self.coeffs[k])
        return out

    def _refine(self, breaks):
        """Coefficient list on a finer breakpoint set."""
        out = []
        for lo in breaks[:-1]:
            k = min(np.searchsorted(self.breaks, lo, side="right") - 1, len(self.coeffs) - 1)
            out.append(self.coeffs[k])
        return out

    def _merged(self, other):
        self._check(other)
        breaks = np.union1d(self.breaks, other.breaks)
        breaks = breaks[np.concatenate(([True], np.diff(breaks) > _TOL * max(1.0, self.t_max)))]
        breaks[-1] = self.t_max
        return breaks, self._refine(breaks), other._refine(breaks)

    # arithmetic ----------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TestFunction):
            return NotImplemented
        br, a, b = self._merged(other)
        return TestFunction(br, [P.polyadd(x, y) for x, y in zip(a, b)])

    def __neg__(self):
        return TestFunction(self.breaks, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TestFunction):
            br, a, b = self._merged(other)
            return TestFunction(br, [P.polymul(x, y) for x, y in zip(a, b)])
        return TestFunction(self.breaks, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def conj(self) -> "TestFunction":
        return TestFunction(self.breaks, [np.conj(c) for c in self.coeffs])

    def restrict(self, a: float, b: float) -> "TestFunction":
        """self * chi_[a, b)."""
        return self * TestFunction.indicator(a, b, self.t_max)

    # integrals -------------------------------------------------------------------
    def integral(self, a: float = 0.0, b: float | None = None) -> complex:
        b = self.t_max if b is None else b
        if not 0.0 <= a <= b <= self.t_max:
            raise InputError(f"integration range [{a}, {b}] outside [0, {self.t_max}]")
        total = 0j
        for lo, hi, c in zip(self.breaks[:-1], self.breaks[1:], self.coeffs):
            lo, hi = max(lo, a), min(hi, b)
            if hi > lo:
                anti = P.polyint(c)
                total += P.polyval(hi, anti) - P.polyval(lo, anti)
        return complex(total)

    def inner(self, other: "TestFunction") -> complex:
        """<self, other> = integral of conj(self) * other."""
        return (self.conj() * other).integral()

    def norm(self) -> float:
        return float(np.sqrt(abs(self.inner(self))))

    def close_to(self, other: "TestFunction", tol: float = 1e-12) -> bool:
        diff = self - other
        return diff.norm() <= tol * max(1.0, self.norm(), other.norm())

    def __repr__(self):
        return f"TestFunction(pieces={len(self.coeffs)}, t_max={self.t_max})"
