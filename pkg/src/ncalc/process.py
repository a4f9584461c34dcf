"""Type-I processes for iso(1,1) and iso(3,1) on h (x) V.

A ProductVector (v, g) is the separable vector v (x) g with v a wave function
on the representation grid and g a test function of time.  A generator
smeared by f acts as X(f)(v, g) = (X v, f g), so commutators of smeared
operators carry the pointwise product of the labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy

from .errors import ConsistencyError, DomainError, InputError
from .reps.bessel import bessel_k, bessel_k_array
from .reps.grids import polar_nodes, periodic_nodes
from .reps.representation import (DiscreteRepresentation, WaveFunction, apply_generator,
                                  inner_product, vacuum_state)
from .testfunc import TestFunction

CONVENTIONS = ("paper", "shift")
AGREEMENT_TOL = 1e-8
_GL_ORDER = 8


@dataclass(frozen=True)
class ProductVector:
    v: WaveFunction
    g: TestFunction

    def inner(self, other: "ProductVector") -> complex:
        if other.v.grid != self.v.grid:
            raise InputError("product vectors live on different grids")
        vv = complex(inner_product(self.v.grid, self.v, other.v))
        return vv * self.g.inner(other.g)

    def norm(self) -> float:
        return math.sqrt(abs(self.inner(self)))

    def __sub__(self, other: "ProductVector") -> "ProductVector":
        """Difference of two vectors with the same time label."""
        if not self.g.close_to(other.g):
            raise InputError("only product vectors with equal time labels can be subtracted")
        return ProductVector(self.v - other.v, self.g)

    def scaled(self, c) -> "ProductVector":
        return ProductVector(self.v * c, self.g)


@dataclass(frozen=True)
class SmearedOperator:
    generator: str
    smear: TestFunction


def _supported(rep: DiscreteRepresentation):
    if rep.name not in ("iso11", "iso31"):
        raise InputError(f"smeared operators are defined for iso11 and iso31, not {rep.name}")


def smeared_apply(rep: DiscreteRepresentation, op: SmearedOperator, vec: ProductVector) -> ProductVector:
    """(X v, f g) for the smeared generator X(f)."""
    _supported(rep)
    if op.generator not in rep.algebra.names:
        raise InputError(f"generator {op.generator!r} is not supported by {rep.name}")
    if vec.v.grid != rep.grid:
        raise InputError("product vector grid does not match the representation")
    return ProductVector(apply_generator(rep, op.generator, vec.v, check_boundary=False), op.smear * vec.g)


def smeared_bracket_residual(rep, a: SmearedOperator, b: SmearedOperator, vec: ProductVector) -> float:
    """||(a b - b a - [a, b](fg)) vec|| / ||vec||, with the tabulated bracket."""
    ab = smeared_apply(rep, a, smeared_apply(rep, b, vec))
    ba = smeared_apply(rep, b, smeared_apply(rep, a, vec))
    label = a.smear * b.smear * vec.g
    lhs = ab.v - ba.v
    rhs = np.zeros(vec.v.values.shape, dtype=complex)
    for gname, c in rep.algebra.bracket_of(a.generator, b.generator).items():
        rhs = rhs + complex(c) * rep.apply(gname, vec.v.values)
    diff = ProductVector(lhs - rhs, label)
    return diff.norm() / vec.norm()


@dataclass
class SimpleProcess:
    """E0, E+, E- constant on each interval [t_n, t_{n+1})."""

    breakpoints: np.ndarray
    e0: np.ndarray
    eplus: np.ndarray
    eminus: np.ndarray

    def __post_init__(self):
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        n = self.breakpoints.size - 1
        if n < 1 or self.breakpoints[0] != 0.0 or np.any(np.diff(self.breakpoints) <= 0):
            raise InputError("breakpoints must start at 0 and increase strictly")
        for name in ("e0", "eplus", "eminus"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (n,):
                raise InputError(f"{name} needs one coefficient per interval ({n})")
            if not np.all(np.isfinite(arr)):
                raise InputError(f"{name} coefficients must be finite")
            setattr(self, name, arr)

    @property
    def end(self) -> float:
        return float(self.breakpoints[-1])

    def terms(self):
        """(generator role, coefficient array) for the three integrators."""
        return (("I", self.e0), ("Ap", self.eplus), ("Am", self.eminus))

    @classmethod
    def zero(cls, breakpoints) -> "SimpleProcess":
        n = len(breakpoints) - 1
        return cls(breakpoints, np.zeros(n), np.zeros(n), np.zeros(n))


def _integrators(rep, direction: int):
    if rep.name == "iso11":
        return {"I": "I", "Ap": "Ap", "Am": "Am"}
    if direction not in (1, 2, 3):
        raise InputError(f"direction must be 1, 2 or 3, got {direction}")
    return {"I": "I", "Ap": f"Ap{direction}", "Am": f"Am{direction}"}


def _v_elements(rep, bra: ProductVector, ket: ProductVector, direction: int) -> dict:
    names = _integrators(rep, direction)
    applied = rep.apply_all(ket.v.values, list(names.values()))
    return {role: complex(inner_product(rep.grid, bra.v, WaveFunction(rep.grid, applied[g])))
            for role, g in names.items()}


def _telescoping(proc: SimpleProcess, velem: dict, bra: ProductVector, ket: ProductVector, t: float) -> complex:
    # sum over intervals of E (X(t_{n+1} ^ t) - X(t_n)), each X(s) smeared by chi_[0, s)
    tm = ket.g.t_max
    total = 0j
    for n, (lo, hi) in enumerate(zip(proc.breakpoints[:-1], proc.breakpoints[1:])):
        if lo >= t:
            break
        upper = min(hi, t)
        h_hi = bra.g.inner(TestFunction.indicator(0.0, upper, tm) * ket.g)
        h_lo = bra.g.inner(TestFunction.indicator(0.0, lo, tm) * ket.g) if lo > 0 else 0j
        for role, coeff in proc.terms():
            total += coeff[n] * velem[role] * (h_hi - h_lo)
    return complex(total)


def _quadrature(proc: SimpleProcess, velem: dict, bra: ProductVector, ket: ProductVector, t: float) -> complex:
    # int_0^t ds sum_X E_X(s) <v1, X v2> conj(g1(s)) g2(s), Gauss-Legendre per smooth piece
    cuts = np.union1d(np.union1d(proc.breakpoints, bra.g.breaks), ket.g.breaks)
    cuts = np.union1d(cuts[cuts < t], [t])
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    total = 0j
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        s = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
        n = min(np.searchsorted(proc.breakpoints, 0.5 * (lo + hi), side="right") - 1, len(proc.e0) - 1)
        integrand = np.conj(bra.g(s)) * ket.g(s)
        weight = sum(coeff[n] * velem[role] for role, coeff in proc.terms())
        total += weight * 0.5 * (hi - lo) * np.dot(w, integrand)
    return complex(total)


def stochastic_integral_matrix_element(rep: DiscreteRepresentation, proc: SimpleProcess,
                                       bra: ProductVector, ket: ProductVector, t: float,
                                       direction: int = 1, return_both: bool = False):
    """<bra, N(t) ket> for N(t) = int_0^t (E0 dI + E+ dA+ + E- dA-).

    Computed by telescoping the increments and by direct quadrature in s;
    the quadrature value is returned after checking the two agree.
    """
    _supported(rep)
    if not 0.0 <= t <= proc.end:
        raise InputError(f"time {t} outside the process domain [0, {proc.end}]")
    if t > ket.g.t_max or t > bra.g.t_max:
        raise InputError("time beyond the test-function window")
    for vec in (bra, ket):
        if vec.v.grid != rep.grid:
            raise InputError("product vector grid does not match the representation")
    velem = _v_elements(rep, bra, ket, direction)
    tele = _telescoping(proc, velem, bra, ket, t)
    quad = _quadrature(proc, velem, bra, ket, t)
    if abs(tele - quad) > AGREEMENT_TOL * max(1.0, abs(quad)):
        raise ConsistencyError(f"telescoping {tele} and quadrature {quad} disagree")
    return (quad, tele) if return_both else quad


# -- characteristic functionals -------------------------------------------------------

def _u_of(f: TestFunction, t: float) -> float:
    if not 0.0 <= t <= f.t_max:
        raise InputError(f"time {t} outside [0, {f.t_max}]")
    u = f.integral(0.0, t)
    if abs(u.imag) > 1e-14 * max(1.0, abs(u.real)):
        raise InputError("characteristic functionals need a real smearing integral")
    return float(u.real)


def charfunc_iso11_u(u: float, convention: str = "paper") -> float:
    k0 = bessel_k(0, 2.0)
    if convention == "paper":
        if abs(u) >= math.pi:
            raise DomainError(f"paper convention needs |u| < pi, got u = {u}")
        return bessel_k(0, 2.0 * math.cos(u / 2.0)) / k0
    if convention == "shift":
        return bessel_k(0, 2.0 * math.cosh(u / 2.0)) / k0
    raise InputError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def charfunc_iso11(f: TestFunction, t: float, convention: str = "paper") -> float:
    """K0(2 cos(u/2)) / K0(2) (paper) or K0(2 cosh(u/2)) / K0(2) (shift), u = int_0^t f."""
    return charfunc_iso11_u(_u_of(f, t), convention)


def overlap_iso11(u: float, grid=None) -> float:
    """<psi0, psi0(. - u)> / <psi0, psi0> by quadrature on the hyperbola grid."""
    from .reps.grids import make_grid

    grid = grid or make_grid("hyperbola")
    mu = grid.axes[0]
    w = grid.axis_weights[0]
    a = np.exp(-np.cosh(mu))
    b = np.exp(-np.cosh(mu - u))
    return float(math.fsum(w * a * b) / math.fsum(w * a * a))


SPHERE_NODES = (48, 64)


def _sphere(n1: int, n2: int):
    th1, w1 = polar_nodes(n1)
    th2, w2 = periodic_nodes(n2)
    t1, t2 = np.meshgrid(th1, th2, indexing="ij")
    g = {1: np.sin(t1) * np.cos(t2), 2: np.sin(t1) * np.sin(t2), 3: np.cos(t1) + 0 * t2}
    return g, np.multiply.outer(w1, w2)


def charfunc_iso31_u(i: int, u: float, nodes=SPHERE_NODES) -> float:
    if i not in (1, 2, 3):
        raise InputError(f"direction must be 1, 2 or 3, got {i}")
    if abs(u) >= math.pi:
        raise DomainError(f"need |u| < pi, got u = {u}")
    g, w = _sphere(*nodes)
    vals = bessel_k_array(0, 2.0 * np.cos(g[i] * u / 2.0))
    return float(np.sum(w * vals) / (4.0 * math.pi * bessel_k(0, 2.0)))


def charfunc_iso31(i: int, f: TestFunction, t: float, nodes=SPHERE_NODES) -> float:
    """(1 / (4 pi K0(2))) int dOmega K0(2 cos(g_i u / 2)) with u = int_0^t f."""
    return charfunc_iso31_u(i, _u_of(f, t), nodes)


def moment_from_charfunc(C, order: int, step: float, convention: str = "paper",
                         half_width: int = 4, domain: float | None = math.pi) -> float:
    """order-th moment from a characteristic functional C(u) by central differences.

    ``C`` is a callable of u.  The stencil uses 2 * half_width + 1 points; for
    the shift (Fourier) convention the derivative is multiplied by (-i)^order.
    """
    if order not in (1, 2, 3, 4):
        raise InputError(f"moment order must be 1..4, got {order}")
    if not step > 0:
        raise InputError("step must be positive")
    if convention not in CONVENTIONS:
        raise InputError(f"unknown convention {convention!r}")
    if domain is not None and half_width * step >= domain:
        raise DomainError(f"stencil reaches |u| = {half_width * step}, outside (-{domain}, {domain})")
    points = list(range(-half_width, half_width + 1))
    weights = sympy.finite_diff_weights(order, points, 0)[order][-1]
    deriv = math.fsum(float(c) * C(k * step) for k, c in zip(points, weights)) / step ** order
    if convention == "shift":
        deriv = (complex(-1j) ** order * deriv).real
    return deriv


def rotation_relation(rep: DiscreteRepresentation, t: float, s: float, t_max: float | None = None) -> tuple:
    """(<psi0, [Q1(t), Q2(s)] psi0>, bracket side from [Q1, Q2] smeared on t ^ s).

    The time part of the vector is chi_[0, T) with T = t_max.
    """
    if rep.name != "iso31":
        raise InputError("the rotation relation needs the iso31 representation")
    t_max = t_max or max(t, s, 1.0)
    psi = ProductVector(vacuum_state(rep), TestFunction.constant(1.0, t_max))
    q1 = SmearedOperator("Q1", TestFunction.indicator(0.0, t, t_max))
    q2 = SmearedOperator("Q2", TestFunction.indicator(0.0, s, t_max))
    ab = smeared_apply(rep, q1, smeared_apply(rep, q2, psi))
    ba = smeared_apply(rep, q2, smeared_apply(rep, q1, psi))
    lhs = psi.inner(ProductVector(ab.v - ba.v, ab.g))
    wedge = TestFunction.indicator(0.0, min(t, s), t_max)
    rhs = 0j
    for g, c in rep.algebra.bracket_of("Q1", "Q2").items():
        rhs += complex(c) * psi.inner(smeared_apply(rep, SmearedOperator(g, wedge), psi))
    return complex(lhs), complex(rhs)
