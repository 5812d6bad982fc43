"""Undirected graphs, combinatorial Laplacians and their spectra."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, NumericalFailure

__all__ = [
    "Graph",
    "SpectrumReport",
    "from_edge_list",
    "laplacian",
    "spectrum",
    "jacobi_eigenvalues",
    "paper_network",
    "CLUSTER_NODE_NAMES",
]

#: Row order of the two-cluster network: cluster x first, then cluster y.
CLUSTER_NODE_NAMES = ("x1", "x2", "x3", "x4", "y1", "y2", "y3", "y4")


@dataclass(frozen=True)
class Graph:
    """Undirected, unweighted simple graph on nodes ``0..n-1``.

    Edges are stored as sorted ``(i, j)`` tuples with ``i < j``. Build
    instances through :func:`from_edge_list`, which validates the input.
    """

    n: int
    edges: frozenset

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def neighbors(self, i: int) -> list[int]:
        out = [b if a == i else a for a, b in self.edges if i in (a, b)]
        return sorted(out)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def without_edge(self, i: int, j: int) -> "Graph":
        key = (min(i, j), max(i, j))
        if key not in self.edges:
            raise ConfigError(f"edge {i}-{j} not in graph")
        return Graph(self.n, self.edges - {key})

    def is_connected(self) -> bool:
        """Breadth-first reachability from node 0."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple[float, ...]

    @property
    def algebraic_connectivity(self) -> float:
        """Second-smallest eigenvalue (0.0 for a single node)."""
        return self.eigenvalues[1] if len(self.eigenvalues) > 1 else 0.0

    @property
    def max_eigenvalue(self) -> float:
        return self.eigenvalues[-1]


def from_edge_list(n: int, pairs: Iterable[Sequence[int]]) -> Graph:
    """Validate and deduplicate an edge list.

    Raises :class:`ConfigError` for ``n < 1``, out-of-range indices and
    self-loops. ``(i, j)`` and ``(j, i)`` are the same edge.
    """
    if int(n) != n or n < 1:
        raise ConfigError(f"node count must be a positive integer, got {n!r}")
    n = int(n)
    edges = set()
    for pair in pairs:
        if len(pair) != 2:
            raise ConfigError(f"edge must have two endpoints, got {pair!r}")
        i, j = (int(v) for v in pair)
        for v in (i, j):
            if not 0 <= v < n:
                raise ConfigError(f"node index {v} out of range for n={n}")
        if i == j:
            raise ConfigError(f"self-loop at node {i}")
        edges.add((min(i, j), max(i, j)))
    return Graph(n, frozenset(edges))


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian ``L = D - A`` as a dense float array."""
    L = np.zeros((g.n, g.n))
    for i, j in g.edges:
        L[i, j] = L[j, i] = -1.0
        L[i, i] += 1.0
        L[j, j] += 1.0
    return L


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all off-diagonal pairs until the largest off-diagonal
    magnitude drops below ``tol * max(1, ||a||_F)``.

    Returns
    -------
    numpy.ndarray
        Eigenvalues sorted ascending.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ConfigError("matrix has non-finite entries")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12:
        raise ConfigError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if n < 2 or off.max() < threshold:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # rotation angle zeroing a[p, q], small-angle root for stability
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
    raise NumericalFailure(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def spectrum(L: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> SpectrumReport:
    """Full real spectrum of a symmetric (Laplacian) matrix, ascending."""
    return SpectrumReport(tuple(float(v) for v in jacobi_eigenvalues(L, tol, max_sweeps)))


def paper_network() -> Graph:
    """Two 4-cycles ``x1..x4`` and ``y1..y4`` bridged by the mediator edge x2-y2.

    Node order follows :data:`CLUSTER_NODE_NAMES`.
    """
    x1, x2, x3, x4, y1, y2, y3, y4 = range(8)
    return from_edge_list(8, [
        (x1, x2), (x2, x3), (x3, x4), (x4, x1),
        (y1, y2), (y2, y3), (y3, y4), (y4, y1),
        (x2, y2),
    ])
