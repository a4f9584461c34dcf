"""Exponential vectors and matrix elements of the fundamental processes.

Inner products are conjugate-linear in the first argument:
<psi(g), psi(f)> = exp(<g, f>) with <g, f> = int conj(g) f.  The processes
act on exponential vectors by

    A(chi) psi(f)   = <chi, f> psi(f)
    A+(chi) psi(f)  = d/de psi(f + e chi)        at e = 0
    L(chi) psi(f)   = d/de psi(exp(e chi) f)     at e = 0

with chi = indicator of [0, t) for A_t, A+_t, L_t.  Products of such
operators are evaluated exactly by carrying one nilpotent parameter per
creation/gauge factor (``Multilinear``) and reading off the coefficient of
their product at the end.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .testfunc import TestFunction

KINDS = ("A", "Adag", "Lambda")
FD_STEP = 1e-5


def exp_inner(f: TestFunction, g: TestFunction) -> complex:
    """<psi(f), psi(g)> = exp(<f, g>)."""
    return complex(np.exp(f.inner(g)))


def fock_sum(f: TestFunction, g: TestFunction, n_terms: int = 30) -> tuple:
    """Truncated Fock sum sum_{n <= N} <f,g>^n / n! and a bound on the omitted tail.

    The tail sum_{n > N} |z|^n / n! is at most |z|^{N+1} / (N+1)! * exp(|z|).
    """
    z = f.inner(g)
    total, term = 0j, 1 + 0j
    for n in range(n_terms + 1):
        total += term
        term *= z / (n + 1)
    bound = abs(z) ** (n_terms + 1) / math.factorial(n_terms + 1) * math.exp(abs(z))
    return complex(total), bound


def _window(t, f: TestFunction):
    if not 0.0 <= t <= f.t_max:
        raise InputError(f"time {t} outside [0, {f.t_max}]")
    return TestFunction.indicator(0.0, t, f.t_max)


def fundamental_matrix_element(kind: str, t: float, f: TestFunction, g: TestFunction) -> complex:
    """<psi(g), X_t psi(f)> for X in {A, Adag, Lambda}, from the closed forms."""
    _window(t, f)
    base = exp_inner(g, f)
    if kind == "A":
        return complex(f.integral(0.0, t)) * base
    if kind == "Adag":
        return complex(g.conj().integral(0.0, t)) * base
    if kind == "Lambda":
        return (g.conj() * f).integral(0.0, t) * base
    raise InputError(f"unknown process kind {kind!r}; expected one of {KINDS}")


def fd_matrix_element(kind: str, t: float, f: TestFunction, g: TestFunction, step: float = FD_STEP) -> complex:
    """Central finite difference of the epsilon definitions (Adag and Lambda only)."""
    chi = _window(t, f)
    if kind == "Adag":
        shifted = lambda e: exp_inner(g, f + chi * e)
    elif kind == "Lambda":
        # exp(e chi) f = f + (exp(e) - 1) chi f for an indicator chi
        shifted = lambda e: exp_inner(g, f + (chi * f) * math.expm1(e))
    else:
        raise InputError(f"finite-difference oracle covers Adag and Lambda, not {kind!r}")
    return (shifted(step) - shifted(-step)) / (2.0 * step)


class Multilinear:
    """Polynomials in nilpotent parameters e_k (e_k^2 = 0), keyed by frozenset of k."""

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items()}

    @classmethod
    def scalar(cls, c) -> "Multilinear":
        return cls({frozenset(): c})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return Multilinear(out)

    def __mul__(self, other):
        if not isinstance(other, Multilinear):
            return Multilinear({k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                if ka & kb:
                    continue
                key = ka | kb
                out[key] = out[key] + va * vb if key in out else va * vb
        return Multilinear(out)

    def map(self, fn) -> "Multilinear":
        return Multilinear({k: fn(v) for k, v in self.terms.items()})

    def coefficient(self, key) -> complex:
        return self.terms.get(frozenset(key), 0)

    def exp(self) -> "Multilinear":
        """exp for a scalar part plus a nilpotent part."""
        z0 = self.terms.get(frozenset(), 0)
        nil = Multilinear({k: v for k, v in self.terms.items() if k})
        out, power, n = Multilinear.scalar(1.0), Multilinear.scalar(1.0), 0
        while power.terms:
            n += 1
            power = power * nil * (1.0 / n)
            power = Multilinear({k: v for k, v in power.terms.items() if v != 0})
            out = out + power
        return out * complex(np.exp(z0))


def word_matrix_element(word, f: TestFunction, g: TestFunction) -> complex:
    """<psi(g), X_1 X_2 ... X_n psi(f)> for smeared fundamental operators.

    ``word`` is a sequence of (kind, smear) pairs; the rightmost acts first.
    """
    label = Multilinear.scalar(f)          # coefficients are TestFunctions
    prefactor = Multilinear.scalar(1.0 + 0j)
    k = 0
    for kind, chi in reversed(list(word)):
        if kind == "A":
            prefactor = prefactor * label.map(lambda h: chi.inner(h))
        elif kind == "Adag":
            label = label + Multilinear({frozenset([k]): chi})
            k += 1
        elif kind == "Lambda":
            label = label + Multilinear({key | {k}: chi * h for key, h in label.terms.items()})
            k += 1
        else:
            raise InputError(f"unknown process kind {kind!r}; expected one of {KINDS}")
    overlap = label.map(lambda h: g.inner(h)).exp()
    return complex((prefactor * overlap).coefficient(range(k)))


def increment(kind: str, t: float, h: float, t_max: float):
    """(kind, indicator of [t, t + h)) as a word factor."""
    return kind, TestFunction.indicator(t, t + h, t_max)


def gram_matrix(labels) -> np.ndarray:
    return np.array([[exp_inner(a, b) for b in labels] for a in labels])


def _slopes(values, hs):
    return [math.log(abs(values[k]) / abs(values[k + 1])) / math.log(hs[k] / hs[k + 1])
            if abs(values[k + 1]) > 0 and abs(values[k]) > 0 else math.inf for k in range(len(hs) - 1)]


def weak_ito_check(table, f: TestFunction, g: TestFunction, t: float,
                   hs=(1e-2, 5e-3, 2.5e-3)) -> dict:
    """Compare increment products with the Ito table in matrix elements.

    For every ordered pair (X, Y) of fundamental increments the deviation
    D(h) = <psi(g), dX dY psi(f)> - sum_Z c_Z <psi(g), dZ psi(f)> must be
    O(h^2) while the single increments are O(h).  Returns, per pair, the
    observed slopes of D and of the product itself between consecutive h,
    and the Richardson estimate of lim D(h) / h (which should vanish).
    """
    unit = table.unit
    hs = list(hs)
    out = {}
    base = exp_inner(g, f)
    for a in KINDS:
        for b in KINDS:
            coeffs = table.coefficients(a, b)
            dev, prods = [], []
            for h in hs:
                word = [increment(a, t, h, f.t_max), increment(b, t, h, f.t_max)]
                m = word_matrix_element(word, f, g)
                prods.append(m)
                ref = 0j
                for z, c in coeffs.items():
                    single = h * base if z == unit else word_matrix_element([increment(z, t, h, f.t_max)], f, g)
                    ref += complex(c) * single
                dev.append(m - ref)
            slopes = _slopes(dev, hs)
            ratios = [d / h for d, h in zip(dev, hs)]
            richardson = 2.0 * ratios[-1] - ratios[-2]
            out[(a, b)] = {"deviation": dev, "slopes": slopes, "product_slopes": _slopes(prods, hs), "richardson": richardson,
                           "coefficients": {z: complex(c) for z, c in coeffs.items()}}
    return out


def ccr_check(rep) -> dict:
    """Residuals of [q,p] - i lambda on Gaussian probes and of a on the ground state."""
    from .reps.representation import WaveFunction, vacuum_state

    if rep.name != "heisenberg":
        raise InputError("ccr_check needs the heisenberg representation")
    x = rep.grid.axes[0]
    lam = rep.constants.get("lambda", 1.0)
    report = {}
    for name, v in (("gauss", np.exp(-x ** 2 / 2)), ("x_gauss", x * np.exp(-x ** 2 / 2))):
        wf = WaveFunction(rep.grid, v)
        r = rep.apply("q", rep.apply("p", wf.values)) - rep.apply("p", rep.apply("q", wf.values)) \
            - 1j * lam * wf.values
        report[f"[q,p] {name}"] = float(WaveFunction(rep.grid, r).norm() / wf.norm())
    psi = vacuum_state(rep)
    a = (rep.apply("q", psi.values) + 1j * rep.apply("p", psi.values)) / math.sqrt(2.0)
    report["a ground"] = float(WaveFunction(rep.grid, a).norm())
    qq = rep.apply("q", rep.apply("q", psi.values))
    report["[q,q]"] = float(np.max(np.abs(qq - qq)))
    return report
