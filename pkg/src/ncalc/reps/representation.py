"""Concrete operator representations on sampled functions.

Each builtin algebra is realized on its manifold grid:

* heisenberg on the line:   q = x,  p = -i lambda d/dx,  one = lambda
* iso11 on the hyperbola:   Q = i d/dmu,  P = sinh mu,  I = cosh mu
* iso31 on the hyperboloid: boosts Q^i, rotations M^ij, P^i = sinh mu n^i, I = cosh mu
* iso21 on the cone:        T = -i d/dtheta, E = sigma sin, I = sigma cos, P = sigma, ...

Generators defined as combinations (the ladder operators) act through their
definitions; the number operator of the oscillator acts as A^dag A.
Operators act on the trailing grid axes, so leading batch axes are allowed.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..algebra import builtin_algebra
from ..algebra.expr import OperatorExpr
from ..algebra.spec import LieAlgebraSpec
from ..errors import InputError
from .bessel import bessel_k
from .grids import GridSpec, make_grid
from .stencils import PolarDerivative, fd8_derivative, fft_derivative

MANIFOLD_OF = {"heisenberg": "line", "iso11": "hyperbola", "iso31": "hyperboloid", "iso21": "cone"}
EDGE_NODES = 8
EDGE_RATIO = 1e-8


class BoundaryWarning(UserWarning):
    """A function handed to an operator is not negligible at the truncation edge."""


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape[-self.grid.ndim:] != self.grid.shape:
            raise InputError(f"values of shape {v.shape} do not fit grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def _other(self, other):
        if isinstance(other, WaveFunction):
            if other.grid != self.grid:
                raise InputError("wave functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return WaveFunction(self.grid, self.values + self._other(other))

    def __sub__(self, other):
        return WaveFunction(self.grid, self.values - self._other(other))

    def __mul__(self, scalar):
        return WaveFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return WaveFunction(self.grid, -self.values)

    def norm(self, measure: str = "natural"):
        return np.sqrt(np.real(_quad(self.grid, np.abs(self.values) ** 2, measure)))

    def to_csv(self) -> str:
        """CSV text with one row per node: coordinates, re, im (17 significant digits)."""
        if self.values.ndim != self.grid.ndim:
            raise InputError("CSV export needs a single (unbatched) wave function")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(self.grid.coordinate_names) + ["re", "im"])
        coords = np.meshgrid(*self.grid.axes, indexing="ij")
        for idx in np.ndindex(*self.grid.shape):
            z = self.values[idx]
            writer.writerow([f"{c[idx]:.17g}" for c in coords] + [f"{z.real:.17g}", f"{z.imag:.17g}"])
        return buf.getvalue()


def _measure_weights(grid: GridSpec, measure: str) -> np.ndarray:
    if measure == "natural":
        return grid.weights
    if measure == "invariant":
        if grid.manifold != "hyperboloid":
            raise InputError("the invariant measure is only defined on the hyperboloid")
        mu = grid.mesh()[0]
        return grid.weights * np.sinh(mu) ** 2
    raise InputError(f"unknown measure {measure!r}")


def _quad(grid: GridSpec, integrand: np.ndarray, measure: str = "natural"):
    w = _measure_weights(grid, measure)
    axes = tuple(range(-grid.ndim, 0))
    return np.sum(w * integrand, axis=axes)


class Derivatives:
    """Lazily evaluated partial derivatives of one array, each computed at most once."""

    def __init__(self, values: np.ndarray, rules: dict):
        self.values = values
        self._rules = rules
        self._memo: dict = {}

    def __getitem__(self, key):
        if key not in self._memo:
            self._memo[key] = self._rules[key](self.values)
        return self._memo[key]


class DiscreteRepresentation:
    """Per-generator linear actions on a grid.

    ``actions`` maps a generator to ``f(values, derivs)`` where ``derivs`` is a
    Derivatives cache for ``values``; ``rules`` maps derivative keys to the
    stencil functions.  Sharing the cache lets several generators act on one
    function for the price of a single set of derivatives.
    """

    def __init__(self, algebra: LieAlgebraSpec, grid: GridSpec, actions: dict, rules: dict,
                 constants=None):
        self.algebra = algebra
        self.grid = grid
        self._base = dict(actions)
        self._rules = dict(rules)
        self.constants = dict(constants or {})
        missing = [g for g in algebra.names if g not in actions and g not in algebra.definitions]
        if missing:
            raise InputError(f"no action for generators {missing}")

    @property
    def name(self) -> str:
        return self.algebra.name

    def derivatives(self, values: np.ndarray) -> Derivatives:
        return Derivatives(values, self._rules)

    def _combo(self, name):
        return {g: complex(c) for g, c in self.algebra.definitions[name].items()}

    def apply(self, name: str, values: np.ndarray, derivs: Derivatives | None = None) -> np.ndarray:
        self.algebra.index(name)
        if derivs is None or derivs.values is not values:
            derivs = self.derivatives(values)
        if name in self._base:
            return self._base[name](values, derivs)
        out = 0
        for g, c in self._combo(name).items():
            out = out + c * self.apply(g, values, derivs)
        return out

    def apply_all(self, values: np.ndarray, names=None) -> dict:
        """Apply several generators to one array, sharing derivative evaluations."""
        derivs = self.derivatives(values)
        names = self.algebra.names if names is None else names
        return {g: self.apply(g, values, derivs) for g in names}


# -- builders ---------------------------------------------------------------------

def _line_actions(grid, lam=1.0):
    x = grid.axes[0]
    h = grid.spacing
    rules = {"x": lambda v: fd8_derivative(v, h, axis=-1)}
    s = 1.0 / math.sqrt(2.0)
    lower = lambda v, d: s * (x * v + lam * d["x"])  # noqa: E731
    raise_ = lambda v, d: s * (x * v - lam * d["x"])  # noqa: E731
    acts = {
        "q": lambda v, d: x * v,
        "p": lambda v, d: -1j * lam * d["x"],
        "one": lambda v, d: lam * v,
        "A": lower,
        "Adag": raise_,
    }

    def number(v, d):
        w = lower(v, d)
        return raise_(w, Derivatives(w, rules))

    acts["Lambda"] = number
    return acts, rules


def _hyperbola_actions(grid):
    mu = grid.axes[0]
    h = grid.spacing
    sh, ch = np.sinh(mu), np.cosh(mu)
    rules = {"mu": lambda v: fd8_derivative(v, h, axis=-1)}
    acts = {
        "Q": lambda v, d: 1j * d["mu"],
        "P": lambda v, d: sh * v,
        "I": lambda v, d: ch * v,
    }
    return acts, rules


def _hyperboloid_actions(grid):
    mu, t1, t2 = grid.mesh()
    h = grid.spacing
    polar = PolarDerivative(grid.axes[1], grid.axis_weights[1], grid.counts[2])
    s1, c1, s2, c2 = np.sin(t1), np.cos(t1), np.sin(t2), np.cos(t2)
    sh, ch = np.sinh(mu), np.cosh(mu)
    coth = ch / sh
    cot1 = c1 / s1
    n = (s1 * c2, s1 * s2, c1 + 0 * t2)
    rules = {
        "mu": lambda v: fd8_derivative(v, h, axis=-3),
        "t1": lambda v: polar(v, -2, -1),
        "t2": lambda v: fft_derivative(v, axis=-1),
    }
    acts = {
        "I": lambda v, d: ch * v,
        "P1": lambda v, d: sh * n[0] * v,
        "P2": lambda v, d: sh * n[1] * v,
        "P3": lambda v, d: sh * n[2] * v,
        "M12": lambda v, d: 1j * d["t2"],
        "M31": lambda v, d: 1j * (c2 * d["t1"] - cot1 * s2 * d["t2"]),
        "M23": lambda v, d: -1j * (s2 * d["t1"] + cot1 * c2 * d["t2"]),
        "Q1": lambda v, d: 1j * (n[0] * d["mu"] + coth * (c1 * c2 * d["t1"] - s2 / s1 * d["t2"])),
        "Q2": lambda v, d: 1j * (n[1] * d["mu"] + coth * (c1 * s2 * d["t1"] + c2 / s1 * d["t2"])),
        "Q3": lambda v, d: 1j * (n[2] * d["mu"] - coth * s1 * d["t1"]),
    }
    return acts, rules


def _cone_actions(grid):
    sigma, th = grid.mesh()
    h = grid.spacing
    s, c = np.sin(th), np.cos(th)
    rules = {
        "sigma": lambda v: fd8_derivative(v, h, axis=-2),
        "theta": lambda v: fft_derivative(v, axis=-1),
    }
    acts = {
        "T": lambda v, d: -1j * d["theta"],
        "E": lambda v, d: sigma * s * v,
        "I": lambda v, d: sigma * c * v,
        "P": lambda v, d: sigma * v + 0 * th,
        "Q": lambda v, d: 1j * (sigma * c * d["sigma"] - s * d["theta"]),
        "M10": lambda v, d: 1j * (sigma * s * d["sigma"] + c * d["theta"]),
    }
    return acts, rules


def build_representation(name: str, grid: GridSpec | None = None, lam: float = 1.0) -> DiscreteRepresentation:
    if name not in MANIFOLD_OF:
        raise InputError(f"no representation for algebra {name!r}")
    grid = grid or make_grid(MANIFOLD_OF[name])
    if grid.manifold != MANIFOLD_OF[name]:
        raise InputError(f"{name} needs a {MANIFOLD_OF[name]} grid, got {grid.manifold}")
    spec = builtin_algebra(name)
    if name == "heisenberg":
        acts = _line_actions(grid, lam)
    elif name == "iso11":
        acts = _hyperbola_actions(grid)
    elif name == "iso31":
        acts = _hyperboloid_actions(grid)
    else:
        acts = _cone_actions(grid)
    return DiscreteRepresentation(spec, grid, *acts, constants={"lambda": lam, "r": 1.0})


# -- operations ---------------------------------------------------------------------

def _check_grid(rep, f: WaveFunction):
    if not isinstance(f, WaveFunction):
        raise InputError("expected a WaveFunction")
    if f.grid != rep.grid:
        raise InputError("wave function grid does not match the representation grid")


def boundary_ratio(f: WaveFunction) -> float:
    """Largest |f| within EDGE_NODES of the truncation edge, relative to max |f|."""
    v = np.abs(f.values)
    v = np.moveaxis(v, -f.grid.ndim, -1)
    peak = v.max()
    if peak == 0:
        return 0.0
    edge = max(v[..., :EDGE_NODES].max(), v[..., -EDGE_NODES:].max())
    return float(edge / peak)


def apply_generator(rep: DiscreteRepresentation, g, f: WaveFunction, check_boundary: bool = True) -> WaveFunction:
    """Apply a generator name or an OperatorExpr (words act right to left; smear labels ignored)."""
    _check_grid(rep, f)
    if check_boundary:
        ratio = boundary_ratio(f)
        if ratio > EDGE_RATIO:
            warnings.warn(f"function not negligible at truncation edge (ratio {ratio:.2e})",
                          BoundaryWarning, stacklevel=2)
    if isinstance(g, str):
        return WaveFunction(rep.grid, rep.apply(g, f.values))
    if not isinstance(g, OperatorExpr):
        raise InputError(f"cannot apply {g!r}")
    for name in g.generators():
        rep.algebra.index(name)
    total = np.zeros_like(f.values)
    for word, c in g.items():
        v = f.values
        for name, _ in reversed(word):
            v = rep.apply(name, v)
        total = total + complex(c) * v
    return WaveFunction(rep.grid, total)


def inner_product(rep_or_grid, f: WaveFunction, g: WaveFunction, measure: str = "natural"):
    """Quadrature sum of w conj(f) g; conjugate-linear in the first argument."""
    grid = rep_or_grid.grid if isinstance(rep_or_grid, DiscreteRepresentation) else rep_or_grid
    if f.grid != grid or g.grid != grid:
        raise InputError("wave functions are not on the representation grid")
    return _quad(grid, np.conj(f.values) * g.values, measure)


def bracket_action(rep: DiscreteRepresentation, a: str, b: str, values: np.ndarray,
                   applied: dict | None = None) -> np.ndarray:
    """Action of the tabulated [a, b] on ``values`` (``applied`` may hold precomputed g(values))."""
    combo = rep.algebra.bracket_of(a, b)
    out = np.zeros(values.shape, dtype=complex)
    for g, c in combo.items():
        gv = applied[g] if applied is not None and g in applied else rep.apply(g, values)
        out = out + complex(c) * gv
    return out


def commutator_residuals(rep: DiscreteRepresentation, pairs, probes) -> dict:
    """Map (a, b) -> max over probes of ||(ab - ba - [a,b]) p|| / ||p||."""
    pairs = [tuple(p) for p in pairs]
    names = sorted({g for p in pairs for g in p}, key=rep.algebra.index)
    needed = sorted({g for a, b in pairs for g in rep.algebra.bracket_of(a, b)} | set(names),
                    key=rep.algebra.index)
    worst = {p: 0.0 for p in pairs}
    for probe in probes:
        _check_grid(rep, probe)
        v = probe.values
        once = rep.apply_all(v, needed)
        twice = {b: rep.apply_all(once[b], names) for b in names}
        den = probe.norm()
        for a, b in pairs:
            r = twice[b][a] - twice[a][b] - bracket_action(rep, a, b, v, once)
            num = np.sqrt(np.real(_quad(rep.grid, np.abs(r) ** 2)))
            worst[(a, b)] = max(worst[(a, b)], float(np.max(num / den)))
    return worst


def commutator_residual(rep: DiscreteRepresentation, a: str, b: str, probes) -> float:
    """max over probes of ||(ab - ba - [a,b]) p|| / ||p||."""
    return commutator_residuals(rep, [(a, b)], probes)[(a, b)]


def vacuum_state(rep: DiscreteRepresentation) -> WaveFunction:
    grid = rep.grid
    c = grid.mesh()[0]
    if rep.name == "heisenberg":
        v = np.pi ** -0.25 * np.exp(-c ** 2 / 2)
    elif rep.name == "iso11":
        v = np.exp(-np.cosh(c)) / math.sqrt(2.0 * bessel_k(0, 2.0))
    elif rep.name == "iso31":
        v = np.exp(-np.cosh(c)) / math.sqrt(8.0 * math.pi * bessel_k(0, 2.0)) * np.ones(grid.shape)
    else:
        v = np.pi ** -0.25 * np.exp(-c ** 2 / 2) * np.ones(grid.shape)
    return WaveFunction(grid, np.broadcast_to(v, grid.shape).copy())


def vacuum_expectation(rep: DiscreteRepresentation, expr, state: WaveFunction | None = None):
    psi = state if state is not None else vacuum_state(rep)
    return complex(inner_product(rep, psi, apply_generator(rep, expr, psi)))


def probe_set(rep_or_grid) -> list:
    """Five smooth probes, localized away from the truncation edge.

    On the hyperboloid every probe carries sinh(mu)^2, so it vanishes to
    second order on the excluded line mu = 0 where coth(mu) is singular.
    """
    grid = rep_or_grid.grid if isinstance(rep_or_grid, DiscreteRepresentation) else rep_or_grid
    m = grid.manifold
    if m == "line":
        x = grid.axes[0]
        raw = [np.exp(-x ** 2 / 2), x * np.exp(-x ** 2 / 2), np.exp(-(x - 0.7) ** 2),
               (x ** 2 - 1) * np.exp(-x ** 2 / 2) * np.exp(0.5j * x), np.exp(-(x + 0.4) ** 2 / 1.5)]
    elif m == "hyperbola":
        mu = grid.axes[0]
        raw = [np.exp(-mu ** 2), mu * np.exp(-mu ** 2), np.exp(-np.cosh(mu)),
               np.exp(-(mu - 0.5) ** 2) * np.exp(1j * mu), np.exp(-2 * np.cosh(mu - 0.3))]
    elif m == "hyperboloid":
        mu, t1, t2 = grid.mesh()
        n1, n2, n3 = np.sin(t1) * np.cos(t2), np.sin(t1) * np.sin(t2), np.cos(t1) + 0 * t2
        radial = np.sinh(mu) ** 2 * np.exp(-np.cosh(mu))
        shifted = np.sinh(mu) ** 2 * np.exp(-np.cosh(mu - 0.4) - 0.1 * np.cosh(mu))
        raw = [radial * (1 + 0 * n1), radial * n1, radial * n2 * n3,
               shifted * (n1 ** 2 - n2 ** 2 + 0.5 * n3), radial * np.exp(0.5 * n3 + 0.3j * n1)]
    else:
        sigma, th = grid.mesh()
        g = np.exp(-sigma ** 2 / 2)
        raw = [g * np.exp(2j * th), sigma * g * np.cos(th), np.exp(-sigma ** 2) * (1 + 0 * th),
               (sigma ** 2 - 0.5) * g * np.exp(-1j * th), np.exp(-(sigma - 0.5) ** 2) * np.exp(3j * th)]
    out = []
    for v in raw:
        wf = WaveFunction(grid, np.broadcast_to(v, grid.shape).copy())
        out.append(wf * (1.0 / wf.norm()))
    return out
