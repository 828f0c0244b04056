"""Normalized graph Laplacian and spectral-domain application of ARMA filters."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chebyshev import ArmaChebFilter, freq_response

__all__ = [
    "Graph",
    "SpectralDecomposition",
    "normalized_laplacian",
    "spectral_decomposition",
    "apply_filter",
    "read_edge_list",
    "read_signal",
    "MAX_NODES",
]

MAX_NODES = 2000


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph given by an edge list ``(i, j, weight)``."""

    n_nodes: int
    edges: tuple = ()

    def __post_init__(self):
        edges = tuple((int(i), int(j), float(w)) for i, j, w in self.edges)
        for i, j, w in edges:
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError(f"edge ({i}, {j}) out of range for {self.n_nodes} nodes")
            if i == j:
                raise ValueError("self-loops are not allowed")
            if not w > 0:
                raise ValueError("edge weights must be positive")
        if self.n_nodes > MAX_NODES:
            raise ValueError(f"dense eigendecomposition limited to {MAX_NODES} nodes")
        object.__setattr__(self, "edges", edges)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n_nodes, self.n_nodes))
        for i, j, w in self.edges:
            adj[i, j] += w
            adj[j, i] += w
        return adj


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def normalized_laplacian(graph: Graph) -> np.ndarray:
    """``I - D^{-1/2} A D^{-1/2}``; isolated nodes get a zero row and column."""
    adj = graph.adjacency()
    deg = adj.sum(axis=1)
    connected = deg > 0
    inv_sqrt = np.zeros_like(deg)
    inv_sqrt[connected] = 1.0 / np.sqrt(deg[connected])
    lap = np.diag(connected.astype(float)) - inv_sqrt[:, None] * adj * inv_sqrt[None, :]
    return 0.5 * (lap + lap.T)


def spectral_decomposition(graph: Graph) -> SpectralDecomposition:
    evals, evecs = np.linalg.eigh(normalized_laplacian(graph))
    # roundoff can push the extreme eigenvalues a hair outside [0, 2]
    return SpectralDecomposition(np.clip(evals, 0.0, 2.0), evecs)


def apply_filter(filt: ArmaChebFilter, graph: Graph, signal, decomposition=None) -> np.ndarray:
    """Filter a graph signal: ``U diag(h(lam)) U^T x``."""
    signal = np.asarray(signal, dtype=float)
    if signal.shape[0] != graph.n_nodes:
        raise ValueError(f"signal has {signal.shape[0]} entries, graph has {graph.n_nodes} nodes")
    dec = decomposition or spectral_decomposition(graph)
    gains = freq_response(filt, dec.eigenvalues)
    u = dec.eigenvectors
    coeffs = u.T @ signal
    if coeffs.ndim == 1:
        return u @ (gains * coeffs)
    return u @ (gains[:, None] * coeffs)


def read_edge_list(path, n_nodes=None) -> Graph:
    """Read ``i j weight`` lines (0-indexed); ``#`` starts a comment.

    Without ``n_nodes`` the node count is one past the largest index.
    """
    edges = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'i j weight'")
        edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    if n_nodes is None:
        n_nodes = 1 + max((max(i, j) for i, j, _ in edges), default=-1)
    return Graph(n_nodes, tuple(edges))


def read_signal(path) -> np.ndarray:
    values = [float(tok) for tok in Path(path).read_text().split()]
    return np.asarray(values)
