"""Ising attitude model: energies, exact probabilities, sampling.

The model over k binary nodes has node thresholds, symmetric pairwise
weights and a global inverse temperature ``beta``. Configuration energy is

    H(x) = -sum_i thresholds[i] * x[i] - sum_{i<j} weights[i, j] * x[i] * x[j]

and configurations follow the Gibbs distribution P(x) = exp(-beta*H(x)) / Z.
States are +1/-1 by default; the equivalent 0/1 algebra (under which the
single-node conditionals are plain logistic regressions) is available via
``Encoding.ZERO_ONE`` and :func:`recode`.

Exact enumeration covers k <= ENUMERATION_LIMIT; beyond that use the Gibbs
sampler. All sampling takes an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit
from scipy.special import expit

from .errors import CapacityError, ContractError, ParameterError

__all__ = [
    "Encoding",
    "IsingModel",
    "SampleMatrix",
    "ENUMERATION_LIMIT",
    "hamiltonian",
    "partition_function",
    "config_probability",
    "probability_table",
    "enumerate_states",
    "sample_exact",
    "sample_gibbs",
    "conditional_prob",
    "pseudo_log_loss",
    "classify",
    "recode",
]

ENUMERATION_LIMIT = 20
_CHUNK = 1 << 16


class Encoding(Enum):
    PLUS_MINUS_ONE = "plus_minus_one"
    ZERO_ONE = "zero_one"

    @property
    def states(self) -> tuple:
        """(negative, positive) state values."""
        return (-1, 1) if self is Encoding.PLUS_MINUS_ONE else (0, 1)


@dataclass(eq=False)
class IsingModel:
    """Immutable Ising model; arrays are copied and marked read-only."""

    thresholds: np.ndarray
    weights: np.ndarray
    beta: float = 1.0
    encoding: Encoding = Encoding.PLUS_MINUS_ONE

    def __post_init__(self):
        tau = np.array(self.thresholds, dtype=float)
        w = np.array(self.weights, dtype=float)
        if tau.ndim != 1:
            raise ContractError(f"thresholds must be a vector, got shape {tau.shape}")
        k = tau.shape[0]
        if k < 1:
            raise ContractError("need at least one node")
        if w.shape != (k, k):
            raise ContractError(f"weights must be {k}x{k}, got {w.shape}")
        if not np.array_equal(w, w.T):
            raise ContractError("weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ContractError("weights must have a zero diagonal")
        if not self.beta > 0:
            raise ParameterError(f"beta must be > 0, got {self.beta}")
        tau.setflags(write=False)
        w.setflags(write=False)
        self.thresholds = tau
        self.weights = w
        self.beta = float(self.beta)

    @property
    def node_count(self) -> int:
        return self.thresholds.shape[0]


@dataclass
class SampleMatrix:
    """n x k matrix of discrete responses with an optional missing mask.

    ``roles`` tags each column 'element' or 'decision'; ``encoding`` is set
    for binary model samples and None for ordinal survey codes.
    """

    data: np.ndarray
    labels: list
    roles: list = None
    missing: np.ndarray = None
    encoding: Encoding = None

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.ndim != 2:
            raise ContractError(f"data must be 2-d, got shape {self.data.shape}")
        n, k = self.data.shape
        if len(self.labels) != k:
            raise ContractError(f"{k} columns but {len(self.labels)} labels")
        if self.roles is None:
            self.roles = ["element"] * k
        if len(self.roles) != k:
            raise ContractError(f"{k} columns but {len(self.roles)} roles")
        if self.missing is None:
            self.missing = np.zeros((n, k), dtype=bool)
        self.missing = np.asarray(self.missing, dtype=bool)
        if self.missing.shape != (n, k):
            raise ContractError("missing mask shape must match data")

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    def column(self, index: int) -> np.ndarray:
        return self.data[:, index]

    def columns_with_role(self, role: str) -> list:
        return [i for i, r in enumerate(self.roles) if r == role]

    def to_csv(self, path):
        """Header of labels, one respondent per row, missing cells empty."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.labels)
            for row, miss in zip(self.data, self.missing):
                writer.writerow(["" if m else int(v) for v, m in zip(row, miss)])

    @classmethod
    def from_csv(cls, path, roles=None, encoding=None) -> "SampleMatrix":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            labels = next(reader)
            rows = list(reader)
        n, k = len(rows), len(labels)
        data = np.zeros((n, k), dtype=int)
        missing = np.zeros((n, k), dtype=bool)
        for i, row in enumerate(rows):
            for j, cell in enumerate(row):
                if cell == "":
                    missing[i, j] = True
                else:
                    data[i, j] = int(cell)
        return cls(data, labels, roles=roles, missing=missing, encoding=encoding)


# ---------------------------------------------------------------------------
# energies and exact probabilities


def _check_config(model: IsingModel, config) -> np.ndarray:
    x = np.asarray(config, dtype=float)
    if x.shape != (model.node_count,):
        raise ContractError(f"configuration must have shape ({model.node_count},), got {x.shape}")
    lo, hi = model.encoding.states
    if not np.all((x == lo) | (x == hi)):
        raise ContractError(f"configuration entries must be in {{{lo}, {hi}}}")
    return x


def hamiltonian(model: IsingModel, config) -> float:
    """Energy of one configuration; each unordered pair counted once."""
    x = _check_config(model, config)
    return float(-model.thresholds @ x - 0.5 * x @ model.weights @ x)


def enumerate_states(k: int, encoding: Encoding = Encoding.PLUS_MINUS_ONE,
                     index=None) -> np.ndarray:
    """All 2**k configurations (or the subset ``index``), one per row.

    Row c holds the configuration whose node-i state is bit i of c.
    """
    if index is None:
        index = np.arange(1 << k)
    bits = (np.asarray(index).reshape(-1, 1) >> np.arange(k)) & 1
    if encoding is Encoding.PLUS_MINUS_ONE:
        return (2 * bits - 1).astype(np.int8)
    return bits.astype(np.int8)


def _energies(model: IsingModel) -> np.ndarray:
    """Energy of every configuration, enumerated in index order (chunked)."""
    k = model.node_count
    if k > ENUMERATION_LIMIT:
        raise CapacityError(
            f"exact enumeration limited to {ENUMERATION_LIMIT} nodes (got {k}); "
            "use sample_gibbs for larger models")
    cached = getattr(model, "_energy_cache", None)
    if cached is not None:
        return cached
    n = 1 << k
    out = np.empty(n)
    for start in range(0, n, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, n))
        x = enumerate_states(k, model.encoding, idx).astype(float)
        out[idx] = -(x @ model.thresholds) - 0.5 * np.einsum("ij,ij->i", x @ model.weights, x)
    model._energy_cache = out
    return out


def partition_function(model: IsingModel) -> float:
    """Z = sum over all configurations of exp(-beta * H(x))."""
    return float(np.exp(-model.beta * _energies(model)).sum())


def probability_table(model: IsingModel) -> np.ndarray:
    """Gibbs probability of every configuration, in enumeration order.

    Computed with a log-sum-exp shift, so large ``beta`` cannot overflow.
    """
    loggibbs = -model.beta * _energies(model)
    loggibbs = loggibbs - loggibbs.max()
    p = np.exp(loggibbs)
    return p / p.sum()


def config_probability(model: IsingModel, config) -> float:
    """Gibbs probability of one configuration."""
    x = _check_config(model, config)
    lo, _ = model.encoding.states
    bits = (x != lo).astype(int)
    index = int(bits @ (1 << np.arange(model.node_count)))
    return float(probability_table(model)[index])


# ---------------------------------------------------------------------------
# sampling


def _default_labels(k):
    return [f"x{i + 1:02d}" for i in range(k)]


def sample_exact(model: IsingModel, n: int, rng) -> SampleMatrix:
    """n i.i.d. draws by inverse CDF over the enumerated distribution."""
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    cdf = np.cumsum(probability_table(model))
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    idx = np.minimum(idx, (1 << model.node_count) - 1)
    data = enumerate_states(model.node_count, model.encoding, idx)
    return SampleMatrix(data, _default_labels(model.node_count), encoding=model.encoding)


@njit(cache=False)
def _gibbs_kernel(states, thresholds, weights, scale, uniforms, lo, hi,
                  t0, burn_in, thin, out, row0):  # pragma: no cover - jitted
    k = states.shape[0]
    row = row0
    for t in range(uniforms.shape[0]):
        for s in range(k):
            f = thresholds[s]
            for j in range(k):
                f += weights[s, j] * states[j]
            p = 1.0 / (1.0 + np.exp(-scale * f))
            states[s] = hi if uniforms[t, s] < p else lo
        sweep = t0 + t
        if sweep >= burn_in and (sweep - burn_in) % thin == thin - 1:
            if row < out.shape[0]:
                for s in range(k):
                    out[row, s] = states[s]
                row += 1
    return row


def sample_gibbs(model: IsingModel, n: int, burn_in: int = 1000, thin: int = 1,
                 rng=None, chunk_sweeps: int = 1 << 15) -> SampleMatrix:
    """Single-site Gibbs sweeps; records every ``thin``-th sweep after burn-in.

    Sites update in index order within a sweep using the exact one-node
    conditional. The chain starts from a uniform random configuration.
    """
    if burn_in < 0:
        raise ParameterError(f"burn_in must be >= 0, got {burn_in}")
    if thin < 1:
        raise ParameterError(f"thin must be >= 1, got {thin}")
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    k = model.node_count
    lo, hi = model.encoding.states
    # +-1 states double the conditional's logit relative to the 0/1 algebra
    scale = 2.0 * model.beta if model.encoding is Encoding.PLUS_MINUS_ONE else model.beta
    states = np.where(rng.random(k) < 0.5, lo, hi).astype(np.float64)
    out = np.empty((n, k))
    total = burn_in + n * thin
    row = 0
    for t0 in range(0, total, chunk_sweeps):
        m = min(chunk_sweeps, total - t0)
        uniforms = rng.random((m, k))
        row = _gibbs_kernel(states, model.thresholds, model.weights, scale,
                            uniforms, float(lo), float(hi), t0, burn_in, thin, out, row)
    return SampleMatrix(out.astype(np.int8), _default_labels(k), encoding=model.encoding)


def conditional_prob(model: IsingModel, node: int, config) -> float:
    """P(node in its positive state | all remaining nodes).

    ``config`` is a full-length state vector whose entry at ``node`` is
    ignored. Under the 0/1 encoding this is the logistic of
    beta * (thresholds[s] + sum_t weights[s, t] * x[t]); the +-1 encoding
    doubles that logit.
    """
    if not 0 <= node < model.node_count:
        raise ContractError(f"node {node} out of range for k={model.node_count}")
    x = np.asarray(config, dtype=float)
    if x.shape != (model.node_count,):
        raise ContractError(f"configuration must have shape ({model.node_count},), got {x.shape}")
    lo, hi = model.encoding.states
    rest = np.all((x == lo) | (x == hi) | (np.arange(model.node_count) == node))
    if not rest:
        raise ContractError(f"configuration entries must be in {{{lo}, {hi}}}")
    f = model.thresholds[node] + model.weights[node] @ x - model.weights[node, node] * x[node]
    scale = 2.0 * model.beta if model.encoding is Encoding.PLUS_MINUS_ONE else model.beta
    return float(expit(scale * f))


# ---------------------------------------------------------------------------
# margin loss and classifier


def pseudo_log_loss(z, mu, base: float = None):
    """log(1 + exp(-z*mu)) for labels z in {-1, +1}; the conditional
    negative log-likelihood in margin form. Strictly decreasing in z*mu.

    ``base`` rescales to that logarithm base (base 2 makes the loss 1 at
    margin zero).
    """
    z = np.asarray(z)
    if not np.all((z == -1) | (z == 1)):
        raise ContractError("labels must be -1 or +1")
    loss = np.logaddexp(0.0, -z * np.asarray(mu, dtype=float))
    if base is not None:
        loss = loss / math.log(base)
    return float(loss) if np.ndim(loss) == 0 else loss


def classify(mu):
    """Natural 0/1 classifier: 1 iff the logit margin is strictly positive."""
    if np.isscalar(mu) or np.ndim(mu) == 0:
        return int(mu > 0)
    return (np.asarray(mu) > 0).astype(int)


def recode(sample: SampleMatrix, target: Encoding) -> SampleMatrix:
    """Map a binary sample between the +-1 and 0/1 encodings (columnwise).

    The map is affine (x -> (x+1)/2 and back) and round-trips exactly.
    Missing cells are preserved; any column with values outside the source
    alphabet raises a contract error.
    """
    if sample.encoding is None:
        raise ContractError("sample has no declared encoding")
    if sample.encoding is target:
        return SampleMatrix(sample.data.copy(), list(sample.labels), list(sample.roles),
                            sample.missing.copy(), target)
    lo, hi = sample.encoding.states
    observed = sample.data[~sample.missing]
    if not np.all((observed == lo) | (observed == hi)):
        bad = [sample.labels[j] for j in range(sample.n_cols)
               if not np.all(np.isin(sample.data[~sample.missing[:, j], j], (lo, hi)))]
        raise ContractError(f"non-binary column(s) {bad}: values outside {{{lo}, {hi}}}")
    if target is Encoding.ZERO_ONE:
        data = (sample.data + 1) // 2
    else:
        data = 2 * sample.data - 1
    data = np.where(sample.missing, 0, data)
    return SampleMatrix(data.astype(sample.data.dtype), list(sample.labels),
                        list(sample.roles), sample.missing.copy(), target)
