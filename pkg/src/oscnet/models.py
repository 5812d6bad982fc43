"""Van der Pol node dynamics and diffusively coupled network vector fields.

States are flat numpy arrays in node-major order: node ``i`` occupies
``x[2*i : 2*i + 2]``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .graph import Graph

__all__ = [
    "NODE_DIM",
    "VdpParams",
    "CouplingSpec",
    "NetworkField",
    "vdp_rhs",
    "vdp_jacobian",
    "kappa_at",
    "network_rhs",
    "as_nodes",
]

NODE_DIM = 2


@dataclass(frozen=True)
class VdpParams:
    mu: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ConfigError(f"mu must be > 0, got {self.mu!r}")


@dataclass(frozen=True)
class CouplingSpec:
    """Piecewise-constant, right-continuous gain schedule plus inner coupling matrix.

    ``segments`` is a sequence of ``(t_from, kappa)`` pairs with strictly
    increasing ``t_from``. Before the first ``t_from`` the gain is 0.
    """

    segments: tuple = ((0.0, 0.0),)
    h_matrix: np.ndarray = field(default_factory=lambda: np.eye(NODE_DIM))

    def __post_init__(self):
        segs = tuple((float(t), float(k)) for t, k in self.segments)
        if not segs:
            raise ConfigError("kappa schedule is empty")
        times = [t for t, _ in segs]
        if any(t < 0 or not math.isfinite(t) for t in times):
            raise ConfigError("kappa switch times must be finite and >= 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("kappa switch times must be strictly increasing")
        if any(k < 0 or not math.isfinite(k) for _, k in segs):
            raise ConfigError("kappa must be finite and >= 0")
        h = np.array(self.h_matrix, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ConfigError(f"h_matrix must be square, got shape {h.shape}")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "h_matrix", h)

    @classmethod
    def constant(cls, kappa: float) -> "CouplingSpec":
        return cls(((0.0, kappa),))

    @classmethod
    def step(cls, t_switch: float, kappa_on: float) -> "CouplingSpec":
        """Gain 0 on ``[0, t_switch)`` and ``kappa_on`` afterwards."""
        if t_switch <= 0:
            return cls.constant(kappa_on)
        return cls(((0.0, 0.0), (t_switch, kappa_on)))

    @property
    def switch_times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.segments if t > 0)

    def __eq__(self, other):
        if not isinstance(other, CouplingSpec):
            return NotImplemented
        return self.segments == other.segments and np.array_equal(self.h_matrix, other.h_matrix)

    def __hash__(self):
        return hash(self.segments)


def kappa_at(c: CouplingSpec, t: float) -> float:
    times = [s[0] for s in c.segments]
    k = bisect.bisect_right(times, t)
    return 0.0 if k == 0 else c.segments[k - 1][1]


def vdp_rhs(s: Sequence[float], p: VdpParams) -> np.ndarray:
    x1, x2 = s
    return np.array([x2, p.mu * (1.0 - x1 * x1) * x2 - x1])


def vdp_jacobian(s: Sequence[float], p: VdpParams) -> np.ndarray:
    x1, x2 = s
    return np.array([[0.0, 1.0],
                     [-2.0 * p.mu * x1 * x2 - 1.0, p.mu * (1.0 - x1 * x1)]])


def as_nodes(x: np.ndarray, d: int = NODE_DIM) -> np.ndarray:
    """View a flat network state as an ``(n, d)`` array."""
    return np.asarray(x).reshape(-1, d)


class NetworkField:
    """Callable ``f(t, x)`` for ``x' = Psi(x) - kappa(t) (L kron H) x``.

    The coupling is evaluated through the edge incidence matrix ``B``
    (``L = B^T B``) so that it is exactly zero when all nodes coincide.
    """

    def __init__(self, g: Graph, c: CouplingSpec, p: VdpParams):
        if c.h_matrix.shape != (NODE_DIM, NODE_DIM):
            raise ConfigError(f"h_matrix must be {NODE_DIM}x{NODE_DIM} for Van der Pol nodes")
        self.graph = g
        self.coupling = c
        self.params = p
        self.size = g.n * NODE_DIM
        incidence = np.zeros((len(g.edges), g.n))
        for e, (i, j) in enumerate(g.sorted_edges()):
            incidence[e, i] = 1.0
            incidence[e, j] = -1.0
        self._incidence = incidence
        self._h_t = c.h_matrix.T.copy()

    def kappa(self, t: float) -> float:
        return kappa_at(self.coupling, t)

    def intrinsic(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(x)
        x1 = x[0::2]
        x2 = x[1::2]
        out[0::2] = x2
        out[1::2] = self.params.mu * (1.0 - x1 * x1) * x2 - x1
        return out

    def coupling_term(self, x: np.ndarray) -> np.ndarray:
        """Diffusive coupling at unit gain, ``-(L kron H) x``."""
        nodes = x.reshape(-1, NODE_DIM)
        diffs = (self._incidence @ nodes) @ self._h_t
        return -(self._incidence.T @ diffs).ravel()

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        k = self.kappa(t)
        if k == 0.0:
            return self.intrinsic(x)
        return self.intrinsic(x) + k * self.coupling_term(x)


def network_rhs(x, g: Graph, c: CouplingSpec, t: float, p: VdpParams) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n * NODE_DIM,):
        raise ConfigError(f"state has shape {x.shape}, expected ({g.n * NODE_DIM},)")
    return NetworkField(g, c, p)(t, x)
