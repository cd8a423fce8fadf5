"""Random base networks and edge-weight assignment.

Three generators build small undirected base networks: degree-driven
preferential attachment, ring-lattice rewiring (small world) and uniform
random edge placement. A separate step attaches strictly positive edge
weights drawn from a normal, Pareto or uniform distribution.

All functions are pure in (parameters, rng): the caller owns the
``numpy.random.Generator`` and identical seeds give bit-identical output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

__all__ = [
    "UnweightedGraph",
    "WeightedGraph",
    "NormalWeights",
    "ParetoWeights",
    "UniformWeights",
    "GeneratorConfig",
    "gen_preferential_attachment",
    "gen_small_world",
    "gen_erdos_renyi",
    "assign_weights",
    "generate",
    "weight_distribution",
]


@dataclass(frozen=True)
class UnweightedGraph:
    """Simple undirected graph: ``node_count`` nodes, edges as sorted pairs."""

    node_count: int
    edges: frozenset

    def __post_init__(self):
        if self.node_count < 2:
            raise ParameterError(f"node_count must be >= 2, got {self.node_count}")
        for i, j in self.edges:
            if i == j:
                raise ParameterError(f"self-loop on node {i}")
            if not (0 <= i < j < self.node_count):
                raise ParameterError(f"edge ({i}, {j}) out of range or unsorted")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_list(self) -> list:
        """Edges in deterministic (sorted) order."""
        return sorted(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


@dataclass(eq=False)
class WeightedGraph:
    """Undirected weighted graph held as a symmetric matrix, zero diagonal."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ParameterError(f"weight matrix must be square, got {w.shape}")
        if w.shape[0] < 2:
            raise ParameterError("need at least 2 nodes")
        if not np.array_equal(w, w.T):
            raise ParameterError("weight matrix must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ParameterError("weight matrix must have a zero diagonal")
        w = w.copy()
        w.setflags(write=False)
        self.weights = w

    @property
    def node_count(self) -> int:
        return self.weights.shape[0]

    def edge_list(self) -> list:
        """(i, j, weight) triples for nonzero entries, i < j, sorted."""
        i, j = np.nonzero(np.triu(self.weights, 1))
        return [(int(a), int(b), float(self.weights[a, b])) for a, b in zip(i, j)]


# ---------------------------------------------------------------------------
# weight distributions


@dataclass(frozen=True)
class NormalWeights:
    """Normal weights; non-positive draws are rejected and redrawn."""

    mean: float = 0.15
    sd: float = 0.0075

    kind = "normal"

    def validate(self):
        if self.sd <= 0:
            raise ParameterError(f"normal sd must be > 0, got {self.sd}")
        if self.mean <= 0:
            raise ParameterError(f"normal mean must be > 0, got {self.mean}")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        self.validate()
        out = rng.normal(self.mean, self.sd, size)
        bad = out <= 0
        while np.any(bad):
            out[bad] = rng.normal(self.mean, self.sd, int(bad.sum()))
            bad = out <= 0
        return out


@dataclass(frozen=True)
class ParetoWeights:
    """Pareto (type I) weights with support [scale, inf); mean scale*shape/(shape-1)."""

    shape: float = 3.0
    scale: float = 0.10

    kind = "pareto"

    def validate(self):
        if self.shape <= 1:
            raise ParameterError(f"pareto shape must be > 1, got {self.shape}")
        if self.scale <= 0:
            raise ParameterError(f"pareto scale must be > 0, got {self.scale}")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        self.validate()
        # numpy's pareto() is the Lomax form; shift by 1 and scale for type I
        return self.scale * (1.0 + rng.pareto(self.shape, size))


@dataclass(frozen=True)
class UniformWeights:
    """Uniform weights on (lo, hi) with lo > 0."""

    lo: float = 0.01
    hi: float = 0.30

    kind = "uniform"

    def validate(self):
        if not (0 < self.lo < self.hi):
            raise ParameterError(f"uniform bounds must satisfy 0 < lo < hi, got ({self.lo}, {self.hi})")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        self.validate()
        return rng.uniform(self.lo, self.hi, size)


_DISTRIBUTIONS = {"normal": NormalWeights, "pareto": ParetoWeights, "uniform": UniformWeights}


def weight_distribution(kind: str, **params):
    """Build a weight distribution from its name and keyword parameters."""
    try:
        cls = _DISTRIBUTIONS[kind]
    except KeyError:
        raise ParameterError(f"unknown weight distribution {kind!r}; choose from {sorted(_DISTRIBUTIONS)}") from None
    dist = cls(**params)
    dist.validate()
    return dist


# ---------------------------------------------------------------------------
# generators


def _check_range(name, rng_pair, lo, hi, integral=False):
    a, b = rng_pair
    if a > b:
        raise ParameterError(f"{name} range ({a}, {b}) is empty")
    if a < lo or b > hi:
        raise ParameterError(f"{name} range ({a}, {b}) outside [{lo}, {hi}]")
    if integral and (a != int(a) or b != int(b)):
        raise ParameterError(f"{name} range must be integral, got ({a}, {b})")


def _draw_int(rng, pair) -> int:
    lo, hi = int(pair[0]), int(pair[1])
    return int(rng.integers(lo, hi + 1))


def _draw_uniform(rng, pair) -> float:
    lo, hi = pair
    return lo if lo == hi else float(rng.uniform(lo, hi))


def gen_preferential_attachment(node_count, m_range=(4, 6), alpha_range=(0.30, 0.70),
                                rng=None) -> UnweightedGraph:
    """Grow a graph one node at a time with degree-based attachment.

    Each new node attaches ``m`` edges to distinct existing nodes, chosen
    with probability proportional to ``degree**alpha + 1`` (so degree-zero
    nodes stay reachable). ``m`` and ``alpha`` are drawn once per graph,
    uniformly from their ranges; when fewer than ``m`` nodes exist yet the
    new node attaches to all of them. The result is connected by
    construction.
    """
    if node_count < 2:
        raise ParameterError(f"node_count must be >= 2, got {node_count}")
    _check_range("m", m_range, 1, node_count - 1, integral=True)
    _check_range("alpha", alpha_range, 0.0, 2.0)
    m = _draw_int(rng, m_range)
    alpha = _draw_uniform(rng, alpha_range)

    edges = set()
    deg = np.zeros(node_count, dtype=float)
    for new in range(1, node_count):
        n_avail = new
        attach = min(m, n_avail)
        weights = deg[:new] ** alpha + 1.0
        candidates = list(range(new))
        for _ in range(attach):
            w = weights[candidates]
            target = int(rng.choice(candidates, p=w / w.sum()))
            candidates.remove(target)
            edges.add((target, new))
            deg[target] += 1
            deg[new] += 1
    return UnweightedGraph(node_count, frozenset(edges))


def _rewire_target(adj, source, node_count, rng):
    """Uniform draw over nodes that are neither ``source`` nor its neighbours."""
    candidates = [t for t in range(node_count) if t != source and t not in adj[source]]
    if not candidates:
        return None
    return int(rng.choice(candidates))


def gen_small_world(node_count, neighbour_range=(3, 4), p_range=(0.05, 0.10),
                    rng=None) -> UnweightedGraph:
    """Ring lattice joined to ``n`` neighbours per side, with random rewiring.

    In one pass over the lattice edges, each endpoint of each edge is
    independently rewired with probability ``p`` (so roughly a 2p fraction
    of edges moves); the replacement target is uniform over nodes that
    create neither a self-loop nor a duplicate edge, and the edge count is
    preserved. ``n`` is an integer drawn once per graph, ``p`` continuous
    uniform.
    """
    if node_count < 2:
        raise ParameterError(f"node_count must be >= 2, got {node_count}")
    _check_range("neighbour", neighbour_range, 1, (node_count - 1) // 2, integral=True)
    _check_range("rewire p", p_range, 0.0, 1.0)
    n = _draw_int(rng, neighbour_range)
    p = _draw_uniform(rng, p_range)

    adj = {i: set() for i in range(node_count)}
    lattice = []
    for i in range(node_count):
        for d in range(1, n + 1):
            j = (i + d) % node_count
            lattice.append((i, j))
            adj[i].add(j)
            adj[j].add(i)
    for a, b in lattice:
        # first move the far endpoint (keep a), then the near one (keep b),
        # tracking where the edge currently sits
        for side in (0, 1):
            if rng.random() >= p:
                continue
            kept, moved = (a, b) if side == 0 else (b, a)
            target = _rewire_target(adj, kept, node_count, rng)
            if target is None:
                continue
            adj[kept].discard(moved)
            adj[moved].discard(kept)
            adj[kept].add(target)
            adj[target].add(kept)
            if side == 0:
                b = target
            else:
                a = target
    edges = frozenset((min(i, j), max(i, j)) for i in adj for j in adj[i])
    return UnweightedGraph(node_count, edges)


def gen_erdos_renyi(node_count, edge_count_range=(30, 45), rng=None) -> UnweightedGraph:
    """Exactly E edges drawn uniformly without replacement from all pairs."""
    if node_count < 2:
        raise ParameterError(f"node_count must be >= 2, got {node_count}")
    max_pairs = node_count * (node_count - 1) // 2
    _check_range("edge count", edge_count_range, 0, max_pairs, integral=True)
    n_edges = _draw_int(rng, edge_count_range)
    pairs = list(itertools.combinations(range(node_count), 2))
    chosen = rng.choice(len(pairs), size=n_edges, replace=False)
    return UnweightedGraph(node_count, frozenset(pairs[int(c)] for c in chosen))


def assign_weights(graph: UnweightedGraph, dist, rng=None) -> WeightedGraph:
    """Attach an independent positive weight to every edge of ``graph``."""
    edges = graph.edge_list()
    draws = dist.sample(rng, len(edges))
    w = np.zeros((graph.node_count, graph.node_count))
    for (i, j), value in zip(edges, draws):
        w[i, j] = w[j, i] = value
    return WeightedGraph(w)


# ---------------------------------------------------------------------------
# config


ALGORITHMS = ("preferential_attachment", "small_world", "erdos_renyi")


@dataclass
class GeneratorConfig:
    """Full recipe for one weighted random graph.

    Serializes to/from a flat JSON block; see :mod:`attnet.cli` for the
    documented field names.
    """

    algorithm: str = "preferential_attachment"
    node_count: int = 11
    m_range: tuple = (4, 6)
    alpha_range: tuple = (0.30, 0.70)
    neighbour_range: tuple = (3, 4)
    rewire_p_range: tuple = (0.05, 0.10)
    edge_count_range: tuple = (30, 45)
    weights: object = field(default_factory=UniformWeights)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")

    def to_dict(self) -> dict:
        d = {
            "algorithm": self.algorithm,
            "node_count": self.node_count,
            "m_range": list(self.m_range),
            "alpha_range": list(self.alpha_range),
            "neighbour_range": list(self.neighbour_range),
            "rewire_p_range": list(self.rewire_p_range),
            "edge_count_range": list(self.edge_count_range),
            "weights": {"kind": self.weights.kind},
        }
        for k, v in vars(self.weights).items():
            d["weights"][k] = v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorConfig":
        d = dict(d)
        wd = dict(d.pop("weights", {"kind": "uniform"}))
        kind = wd.pop("kind")
        kwargs = {}
        for key in ("m_range", "alpha_range", "neighbour_range", "rewire_p_range", "edge_count_range"):
            if key in d:
                kwargs[key] = tuple(d.pop(key))
        kwargs.update(d)
        return cls(weights=weight_distribution(kind, **wd), **kwargs)


def generate(config: GeneratorConfig, rng) -> WeightedGraph:
    """Draw one weighted base network according to ``config``."""
    if config.algorithm == "preferential_attachment":
        base = gen_preferential_attachment(config.node_count, config.m_range, config.alpha_range, rng)
    elif config.algorithm == "small_world":
        base = gen_small_world(config.node_count, config.neighbour_range, config.rewire_p_range, rng)
    else:
        base = gen_erdos_renyi(config.node_count, config.edge_count_range, rng)
    return assign_weights(base, config.weights, rng)
