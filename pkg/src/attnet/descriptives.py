"""Correlation networks and their connectivity/centrality descriptives.

A correlation network is a fully dense weighted graph whose edges are
pairwise polychoric correlations between response columns. Distances
follow the inverse-weight convention (each step along a path costs
1/weight), so stronger associations mean shorter paths. On top of the
Dijkstra distance matrix sit the two summary measures used throughout:

* ASPL, the mean shortest-path length over unordered node pairs
  (lower = more connected), and
* closeness, per node the inverse of its summed distances to all others.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DegenerateDataError
from .ising import SampleMatrix
from .stats import crosstab, polychoric

__all__ = [
    "CorrelationNetwork",
    "DescriptiveReport",
    "correlation_network",
    "shortest_paths",
    "aspl",
    "closeness",
    "descriptives",
]

ABSENT_EDGE = 1e-6


@dataclass(eq=False)
class CorrelationNetwork:
    """Symmetric correlation matrix with node labels and fit provenance."""

    labels: list
    matrix: np.ndarray
    n: int = None
    estimator: str = "polychoric"
    saturated_edges: list = field(default_factory=list)
    corrected_edges: list = field(default_factory=list)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        k = len(self.labels)
        if m.shape != (k, k):
            raise ContractError(f"matrix must be {k}x{k} to match labels, got {m.shape}")
        if not np.allclose(m, m.T, atol=0, rtol=0):
            raise ContractError("matrix must be symmetric")
        if np.any(np.diag(m) != 0):
            raise ContractError("matrix diagonal must be zero")
        if np.any(np.abs(m) > 1):
            raise ContractError("correlations must lie in [-1, 1]")
        m.setflags(write=False)
        self.matrix = m

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def to_json_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "n": self.n,
            "estimator": self.estimator,
            "saturated_edges": [list(e) for e in self.saturated_edges],
            "corrected_edges": [list(e) for e in self.corrected_edges],
        }

    def to_edge_csv(self, path):
        """One row per upper-triangle edge: i, j, weight, flag."""
        sat = set(map(tuple, self.saturated_edges))
        cor = set(map(tuple, self.corrected_edges))
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["i", "j", "weight", "flag"])
            k = self.node_count
            for i in range(k):
                for j in range(i + 1, k):
                    flags = []
                    if (i, j) in sat:
                        flags.append("saturated")
                    if (i, j) in cor:
                        flags.append("corrected")
                    writer.writerow([self.labels[i], self.labels[j],
                                     repr(float(self.matrix[i, j])), "+".join(flags)])


def correlation_network(samples: SampleMatrix, element_columns=None) -> CorrelationNetwork:
    """Pairwise polychoric correlations among the element columns.

    ``element_columns`` defaults to the columns tagged 'element', so a
    designated decision column stays out of the network. Rows missing any
    selected column are dropped first (casewise deletion); every retained
    column must then show at least two categories.
    """
    if element_columns is None:
        element_columns = samples.columns_with_role("element")
    element_columns = list(element_columns)
    if len(element_columns) < 2:
        raise ContractError("need at least 2 element columns")
    keep = ~samples.missing[:, element_columns].any(axis=1)
    data = samples.data[np.ix_(keep, element_columns)]
    if data.shape[0] == 0:
        raise DegenerateDataError("no complete rows after casewise deletion")
    labels = [samples.labels[c] for c in element_columns]
    for j, label in enumerate(labels):
        if np.unique(data[:, j]).size < 2:
            raise DegenerateDataError(f"column {label!r} is constant after casewise deletion")

    k = len(labels)
    matrix = np.zeros((k, k))
    saturated, corrected = [], []
    for i in range(k):
        for j in range(i + 1, k):
            est = polychoric(crosstab(data[:, i], data[:, j]))
            matrix[i, j] = matrix[j, i] = est.rho
            if est.saturated:
                saturated.append((i, j))
            if est.corrected:
                corrected.append((i, j))
    return CorrelationNetwork(labels, matrix, n=int(data.shape[0]),
                              saturated_edges=saturated, corrected_edges=corrected)


# ---------------------------------------------------------------------------
# distances


def _matrix_of(network) -> np.ndarray:
    m = network.matrix if isinstance(network, CorrelationNetwork) else np.asarray(network, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"need a square matrix, got shape {m.shape}")
    return m


def _edge_costs(matrix: np.ndarray, negatives: str) -> np.ndarray:
    """Per-step costs 1/weight; absent edges (|w| ~ 0) cost infinity.

    ``negatives='absolute'`` folds negative correlations to their magnitude;
    ``'strict'`` refuses them.
    """
    if negatives not in ("absolute", "strict"):
        raise ContractError(f"negatives must be 'absolute' or 'strict', got {negatives!r}")
    if negatives == "strict" and np.any(matrix < 0):
        i, j = np.argwhere(matrix < 0)[0]
        raise ContractError(f"negative edge weight at ({i}, {j}) in strict mode")
    mag = np.abs(matrix)
    costs = np.full(matrix.shape, np.inf)
    present = mag > ABSENT_EDGE
    costs[present] = 1.0 / mag[present]
    np.fill_diagonal(costs, np.inf)
    return costs


def _dijkstra(costs: np.ndarray, source: int) -> np.ndarray:
    k = costs.shape[0]
    dist = np.full(k, np.inf)
    dist[source] = 0.0
    done = np.zeros(k, dtype=bool)
    queue = [(0.0, source)]
    while queue:
        d, u = heapq.heappop(queue)
        if done[u]:
            continue
        done[u] = True
        row = costs[u]
        for v in range(k):
            if not done[v] and np.isfinite(row[v]):
                nd = d + row[v]
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(queue, (nd, v))
    return dist


def shortest_paths(network, negatives: str = "absolute") -> np.ndarray:
    """Dijkstra distance matrix under inverse-weight step costs.

    Disconnected pairs come back as ``inf``. Each pair's distance is taken
    from the lower-index source, which makes the matrix exactly symmetric.
    """
    matrix = _matrix_of(network)
    costs = _edge_costs(matrix, negatives)
    k = matrix.shape[0]
    dist = np.empty((k, k))
    for source in range(k):
        dist[source] = _dijkstra(costs, source)
    upper = np.triu(dist, 1)
    return upper + upper.T


def _require_connected(dist: np.ndarray):
    if not np.all(np.isfinite(dist)):
        raise DegenerateDataError("network is disconnected: some pairs have no path")


def aspl(network, negatives: str = "absolute") -> float:
    """Average shortest path length over unordered node pairs."""
    dist = shortest_paths(network, negatives)
    _require_connected(dist)
    iu = np.triu_indices(dist.shape[0], 1)
    return float(dist[iu].mean())


def closeness(network, negatives: str = "absolute") -> np.ndarray:
    """Per-node closeness: inverse of the summed distances to all others."""
    dist = shortest_paths(network, negatives)
    _require_connected(dist)
    return 1.0 / dist.sum(axis=1)


@dataclass
class DescriptiveReport:
    """Distance matrix with the two derived summaries."""

    aspl: float
    closeness: np.ndarray
    distances: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "aspl": float(self.aspl),
            "closeness": [float(v) for v in self.closeness],
            "distances": [[float(v) for v in row] for row in self.distances],
        }


def descriptives(network, negatives: str = "absolute") -> DescriptiveReport:
    """ASPL, closeness and the distance matrix in one pass."""
    dist = shortest_paths(network, negatives)
    _require_connected(dist)
    iu = np.triu_indices(dist.shape[0], 1)
    return DescriptiveReport(float(dist[iu].mean()), 1.0 / dist.sum(axis=1), dist)
