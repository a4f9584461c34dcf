"""Discrete-time (type-II) processes on the iso(2,1) cone representation.

The state space is the direct sum of the T-eigenspaces V_n spanned by
e^{i n theta} phi(sigma).  A process with horizon t is the direct sum of its
restrictions to V_0 .. V_t, and its expectation is the sum of the per-mode
expectations, each evaluated with the full (sigma, theta) action of F and the
normalized theta measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra.expr import OperatorExpr
from .errors import InputError
from .reps.representation import DiscreteRepresentation, WaveFunction, apply_generator, inner_product

MAX_WORD = 2


@dataclass(frozen=True)
class ModeState:
    """e^{i n theta} phi(sigma); ``phi`` holds samples on the sigma axis."""

    n: int
    phi: np.ndarray

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise InputError(f"mode index must be a non-negative integer, got {self.n}")
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=complex))

    def full(self, rep: DiscreteRepresentation) -> WaveFunction:
        sigma, theta = rep.grid.axes
        if self.phi.shape != sigma.shape:
            raise InputError(f"phi has {self.phi.size} samples, the sigma grid has {sigma.size}")
        return WaveFunction(rep.grid, np.multiply.outer(self.phi, np.exp(1j * self.n * theta)))


def gaussian_phi(rep: DiscreteRepresentation) -> np.ndarray:
    """The cyclic vector exp(-sigma^2 / 2) / pi^(1/4), normalized on the full line."""
    sigma = rep.grid.axes[0]
    return np.pi ** -0.25 * np.exp(-sigma ** 2 / 2)


def _check(rep: DiscreteRepresentation):
    if rep.name != "iso21":
        raise InputError(f"type-II processes use the iso21 representation, got {rep.name}")


def _as_expr(F) -> OperatorExpr:
    if isinstance(F, OperatorExpr):
        return F
    if isinstance(F, str):
        return OperatorExpr.gen(F)
    # a list of generator names is read as one word
    return OperatorExpr.word(list(F))


def mode_apply(rep: DiscreteRepresentation, g, m: ModeState) -> WaveFunction:
    """Action of a generator or OperatorExpr on the full mode vector."""
    _check(rep)
    return apply_generator(rep, g, m.full(rep), check_boundary=False)


@dataclass
class Type2Process:
    horizon: int
    F: object
    phi: np.ndarray

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 0:
            raise InputError(f"horizon must be a non-negative integer, got {self.horizon}")
        self.F = _as_expr(self.F)
        if self.F.max_length() > MAX_WORD:
            raise InputError(f"words longer than {MAX_WORD} are not supported")


def mode_expectation(rep: DiscreteRepresentation, F, n: int, phi) -> complex:
    m = ModeState(n, phi)
    psi = m.full(rep)
    return complex(inner_product(rep, psi, mode_apply(rep, _as_expr(F), m)))


def type2_expectation(rep: DiscreteRepresentation, proc: Type2Process) -> tuple:
    """(total, [per-mode contributions for n = 0 .. horizon]), summed in ascending n."""
    _check(rep)
    per_mode = [mode_expectation(rep, proc.F, n, proc.phi) for n in range(proc.horizon + 1)]
    total = complex(math.fsum(c.real for c in per_mode), math.fsum(c.imag for c in per_mode))
    return total, per_mode


def mode_orthogonality_check(rep: DiscreteRepresentation, n1: int, n2: int, phi) -> complex:
    """Quadrature inner product of two distinct modes."""
    _check(rep)
    if n1 == n2:
        raise InputError("mode orthogonality needs two different mode indices")
    a, b = ModeState(n1, phi).full(rep), ModeState(n2, phi).full(rep)
    return complex(inner_product(rep, a, b))
