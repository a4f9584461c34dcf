"""Tensor-product grids over the representation manifolds.

Unbounded coordinates use offset nodes +-(k + 1/2) h on (-L, L), so that no
node sits at the origin.  Periodic angles use N uniform nodes without the
duplicated endpoint.  The polar angle of the hyperboloid uses Gauss-Legendre
nodes in cos(theta1), which never touch the poles.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError

MANIFOLDS = {
    "line": ("x",),
    "hyperbola": ("mu",),
    "hyperboloid": ("mu", "theta1", "theta2"),
    "cone": ("sigma", "theta"),
}

# default truncation half-widths and node counts
DEFAULTS = {
    "line": {"L": 12.0, "N": (256,)},
    "hyperbola": {"L": 20.0, "N": (512,)},
    "hyperboloid": {"L": 6.0, "N": (128, 48, 64)},
    "cone": {"L": 12.0, "N": (256, 64)},
}


def offset_nodes(L: float, n: int) -> tuple:
    if n < 2 or n % 2:
        raise InputError(f"node count along a truncated axis must be even and >= 2, got {n}")
    if not L > 0:
        raise InputError(f"truncation half-width must be positive, got {L}")
    h = 2.0 * L / n
    nodes = -L + h * (np.arange(n) + 0.5)
    return nodes, np.full(n, h)


def periodic_nodes(n: int) -> tuple:
    if n < 2:
        raise InputError(f"periodic axis needs at least 2 nodes, got {n}")
    return 2.0 * np.pi * np.arange(n) / n, np.full(n, 2.0 * np.pi / n)


def polar_nodes(n: int) -> tuple:
    """theta1 nodes from Gauss-Legendre in cos(theta1); weights are for sin(theta1) dtheta1."""
    x, w = np.polynomial.legendre.leggauss(n)
    # ascending theta1 means descending cos
    return np.arccos(x[::-1]), w[::-1].copy()


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Nodes and quadrature weights on one of the four manifolds.

    ``weights`` has the full grid shape.  For the hyperboloid the weights
    carry dmu sin(theta1) dtheta1 dtheta2; for the cone they carry
    dsigma dtheta / (2 pi), the normalized angular measure.
    """

    manifold: str
    L: float
    counts: tuple
    axes: tuple = field(repr=False)
    axis_weights: tuple = field(repr=False)

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def coordinate_names(self) -> tuple:
        return MANIFOLDS[self.manifold]

    @property
    def spacing(self) -> float:
        return float(self.axes[0][1] - self.axes[0][0])

    @property
    def weights(self) -> np.ndarray:
        cached = self.__dict__.get("_weights")
        if cached is None:
            cached = self.axis_weights[0]
            for w in self.axis_weights[1:]:
                cached = np.multiply.outer(cached, w)
            object.__setattr__(self, "_weights", cached)
        return cached

    def mesh(self) -> tuple:
        """Broadcastable coordinate arrays, one per axis."""
        out = []
        for k, a in enumerate(self.axes):
            shape = [1] * self.ndim
            shape[k] = len(a)
            out.append(a.reshape(shape))
        return tuple(out)

    def key(self) -> tuple:
        return (self.manifold, self.L, self.counts)

    def __eq__(self, other):
        return isinstance(other, GridSpec) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def refined(self, factor: int = 2, axes=(0,)) -> "GridSpec":
        counts = tuple(c * factor if k in axes else c for k, c in enumerate(self.counts))
        return make_grid(self.manifold, L=self.L, N=counts)

    def measure(self) -> float:
        return float(self.weights.sum())


def make_grid(manifold: str, L: float | None = None, N=None) -> GridSpec:
    if manifold not in MANIFOLDS:
        raise InputError(f"unknown manifold {manifold!r}; expected one of {', '.join(MANIFOLDS)}")
    L = float(DEFAULTS[manifold]["L"] if L is None else L)
    if N is None:
        N = DEFAULTS[manifold]["N"]
    counts = tuple(int(n) for n in np.atleast_1d(N))
    if len(counts) != len(MANIFOLDS[manifold]):
        raise InputError(f"{manifold} grid needs {len(MANIFOLDS[manifold])} node counts, got {len(counts)}")
    first, w0 = offset_nodes(L, counts[0])
    axes, weights = [first], [w0]
    if manifold == "hyperboloid":
        th1, w1 = polar_nodes(counts[1])
        th2, w2 = periodic_nodes(counts[2])
        axes += [th1, th2]
        weights += [w1, w2]
    elif manifold == "cone":
        th, w = periodic_nodes(counts[1])
        axes.append(th)
        weights.append(w / (2.0 * np.pi))
    return GridSpec(manifold, L, counts, tuple(axes), tuple(weights))
