"""The four-step simulation study and its aggregation.

For every combination of base-network generator and weight distribution:
draw a weighted base network, create ``variations`` Ising variants of it
that differ only in inverse temperature, sample respondents from each, and
correlate (a) the connectivity of the estimated element network with the
average impact on the decision node and (b) pooled within-network
standardized closeness with standardized per-element impact. Replicates
repeat the whole procedure from a fresh base network; combinations
aggregate to means and SDs of the two correlations.

Replicates are independent jobs. Their RNG streams derive from
(master seed, combination id, replicate index), so results are identical
whatever the job count or subset of combinations run.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import graphs
from .descriptives import correlation_network, descriptives
from .errors import ContractError, DegenerateDataError, ParameterError
from .ising import Encoding, IsingModel, sample_exact
from .stats import biserial, crosstab, pearson, polychoric, zscore

__all__ = [
    "GENERATORS",
    "DISTRIBUTIONS",
    "StudyConfig",
    "VariationResult",
    "ReplicateResult",
    "CombinationSummary",
    "StudyReport",
    "run_variation",
    "run_replicate",
    "run_study",
]

log = logging.getLogger(__name__)

GENERATORS = ("preferential_attachment", "small_world", "erdos_renyi")
DISTRIBUTIONS = ("normal", "pareto", "uniform")

MAX_FLAGGED_FRACTION = 0.25


@dataclass
class StudyConfig:
    """All knobs of the simulation study, with the standard defaults."""

    generators: tuple = GENERATORS
    distributions: tuple = DISTRIBUTIONS
    replicates: int = 100
    variations: int = 20
    individuals: int = 1000
    node_count: int = 11
    beta_mean: float = 1.0
    beta_sd: float = 0.2
    threshold_mean: float = 0.0
    threshold_sd: float = 0.25
    thresholds_per: str = "variation"  # or "replicate"
    m_range: tuple = (4, 6)
    alpha_range: tuple = (0.30, 0.70)
    neighbour_range: tuple = (3, 4)
    rewire_p_range: tuple = (0.05, 0.10)
    edge_count_range: tuple = (30, 45)
    normal_mean: float = 0.15
    normal_sd: float = 0.0075
    pareto_shape: float = 3.0
    pareto_scale: float = 0.10
    uniform_lo: float = 0.01
    uniform_hi: float = 0.30
    seed: int = 0

    def __post_init__(self):
        self.generators = tuple(self.generators)
        self.distributions = tuple(self.distributions)
        for name in self.generators:
            if name not in GENERATORS:
                raise ParameterError(f"unknown generator {name!r}; choose from {GENERATORS}")
        for name in self.distributions:
            if name not in DISTRIBUTIONS:
                raise ParameterError(f"unknown distribution {name!r}; choose from {DISTRIBUTIONS}")
        for attr in ("replicates", "variations", "individuals"):
            if getattr(self, attr) < 1:
                raise ParameterError(f"{attr} must be >= 1, got {getattr(self, attr)}")
        if self.node_count < 3:
            raise ParameterError(f"node_count must be >= 3, got {self.node_count}")
        if self.thresholds_per not in ("variation", "replicate"):
            raise ParameterError("thresholds_per must be 'variation' or 'replicate'")
        if self.beta_sd < 0 or self.threshold_sd < 0:
            raise ParameterError("spread parameters must be >= 0")

    def weight_dist(self, name: str):
        if name == "normal":
            return graphs.NormalWeights(self.normal_mean, self.normal_sd)
        if name == "pareto":
            return graphs.ParetoWeights(self.pareto_shape, self.pareto_scale)
        return graphs.UniformWeights(self.uniform_lo, self.uniform_hi)

    def generator_config(self, generator: str, distribution: str) -> graphs.GeneratorConfig:
        return graphs.GeneratorConfig(
            algorithm=generator,
            node_count=self.node_count,
            m_range=self.m_range,
            alpha_range=self.alpha_range,
            neighbour_range=self.neighbour_range,
            rewire_p_range=self.rewire_p_range,
            edge_count_range=self.edge_count_range,
            weights=self.weight_dist(distribution),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        for key, value in d.items():
            if isinstance(value, tuple):
                d[key] = list(value)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        kwargs = dict(d)
        for key in ("generators", "distributions", "m_range", "alpha_range",
                    "neighbour_range", "rewire_p_range", "edge_count_range"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass
class VariationResult:
    """One Ising variant of a base network, analysed."""

    beta: float
    connectivity: float = np.nan
    average_impact: float = np.nan
    closeness: np.ndarray = None
    impact: np.ndarray = None
    flagged: bool = False
    flag_reason: str = None


@dataclass
class ReplicateResult:
    generator: str
    distribution: str
    index: int
    conn_impact_r: float = np.nan
    cent_impact_r: float = np.nan
    betas: np.ndarray = None
    connectivities: np.ndarray = None
    impacts: np.ndarray = None
    centrality_pairs: np.ndarray = None  # pooled (z closeness, z impact) rows
    n_variations_used: int = 0
    n_variations_flagged: int = 0
    flagged: bool = False
    flag_reason: str = None


@dataclass
class CombinationSummary:
    generator: str
    distribution: str
    conn_impact_mean: float
    conn_impact_sd: float
    cent_impact_mean: float
    cent_impact_sd: float
    conn_impact_values: list
    cent_impact_values: list
    replicates_used: int
    replicates_flagged: int

    def to_dict(self) -> dict:
        return {
            "generator": self.generator,
            "distribution": self.distribution,
            "connectivity_impact": {"mean_r": self.conn_impact_mean, "sd_r": self.conn_impact_sd,
                                    "values": self.conn_impact_values},
            "centrality_impact": {"mean_r": self.cent_impact_mean, "sd_r": self.cent_impact_sd,
                                  "values": self.cent_impact_values},
            "replicates_used": self.replicates_used,
            "replicates_flagged": self.replicates_flagged,
        }


@dataclass
class StudyReport:
    config: StudyConfig
    combinations: list
    replicates: list = field(default_factory=list, repr=False)

    def summary(self, generator: str, distribution: str) -> CombinationSummary:
        for combo in self.combinations:
            if combo.generator == generator and combo.distribution == distribution:
                return combo
        raise KeyError((generator, distribution))

    def to_json_dict(self, include_replicates: bool = False) -> dict:
        d = {
            "config": self.config.to_dict(),
            "combinations": [c.to_dict() for c in self.combinations],
        }
        if include_replicates:
            d["replicates"] = [
                {
                    "generator": r.generator,
                    "distribution": r.distribution,
                    "index": r.index,
                    "conn_impact_r": float(r.conn_impact_r),
                    "cent_impact_r": float(r.cent_impact_r),
                    "betas": [float(v) for v in (r.betas if r.betas is not None else [])],
                    "connectivities": [float(v) for v in (r.connectivities if r.connectivities is not None else [])],
                    "impacts": [float(v) for v in (r.impacts if r.impacts is not None else [])],
                    "n_variations_used": r.n_variations_used,
                    "n_variations_flagged": r.n_variations_flagged,
                    "flagged": r.flagged,
                    "flag_reason": r.flag_reason,
                }
                for r in self.replicates
            ]
        return d

    def table_rows(self) -> list:
        """Flat grid mirroring the summary-table layout: one row per
        (metric, distribution), one column per generator."""
        rows = [["metric", "weight_distribution", *self.config.generators]]
        metrics = [
            ("connectivity_impact_mean_r", "conn_impact_mean"),
            ("connectivity_impact_sd_r", "conn_impact_sd"),
            ("centrality_impact_mean_r", "cent_impact_mean"),
            ("centrality_impact_sd_r", "cent_impact_sd"),
        ]
        for metric_name, attr in metrics:
            for dist in self.config.distributions:
                row = [metric_name, dist]
                for gen in self.config.generators:
                    value = getattr(self.summary(gen, dist), attr)
                    row.append("" if value is None or np.isnan(value) else f"{value:.4f}")
                rows.append(row)
        return rows


# ---------------------------------------------------------------------------
# the four steps


def _draw_positive_normal(rng, mean, sd) -> float:
    value = rng.normal(mean, sd)
    while value <= 0:
        value = rng.normal(mean, sd)
    return float(value)


def run_variation(weighted_base: graphs.WeightedGraph, beta: float, thresholds,
                  decision_node: int, individuals: int, rng) -> VariationResult:
    """Build the Ising variant, sample respondents and analyse them.

    Degenerate samples (a frozen column, a one-sided vote) come back
    flagged rather than raising, so callers can drop and count them.
    """
    model = IsingModel(thresholds, weighted_base.weights, beta, Encoding.PLUS_MINUS_ONE)
    sample = sample_exact(model, individuals, rng)
    k = weighted_base.node_count
    elements = [i for i in range(k) if i != decision_node]
    element_data = sample.data[:, elements]
    vote = (sample.data[:, decision_node] + 1) // 2

    for pos, col in enumerate(elements):
        if np.unique(element_data[:, pos]).size < 2:
            return VariationResult(beta, flagged=True, flag_reason=f"element {col} frozen")
    if np.unique(vote).size < 2:
        return VariationResult(beta, flagged=True, flag_reason="decision frozen")

    sample.roles[decision_node] = "decision"
    network = correlation_network(sample)
    report = descriptives(network)
    sum_score = element_data.sum(axis=1).astype(float)
    average_impact = biserial(sum_score, vote)
    impact = np.array([polychoric(crosstab(element_data[:, pos], vote)).rho
                       for pos in range(len(elements))])
    return VariationResult(beta, report.aspl, average_impact, report.closeness, impact)


def run_replicate(config: StudyConfig, generator: str, distribution: str,
                  index: int, rng) -> ReplicateResult:
    """One base network, ``config.variations`` temperature variants."""
    result = ReplicateResult(generator, distribution, index)
    base = graphs.generate(config.generator_config(generator, distribution), rng)
    decision_node = int(rng.integers(config.node_count))
    thresholds = rng.normal(config.threshold_mean, config.threshold_sd, config.node_count)

    variations = []
    for _ in range(config.variations):
        beta = _draw_positive_normal(rng, config.beta_mean, config.beta_sd)
        if config.thresholds_per == "variation":
            thresholds = rng.normal(config.threshold_mean, config.threshold_sd, config.node_count)
        variations.append(run_variation(base, beta, thresholds, decision_node,
                                        config.individuals, rng))

    used = [v for v in variations if not v.flagged]
    result.n_variations_used = len(used)
    result.n_variations_flagged = len(variations) - len(used)
    result.betas = np.array([v.beta for v in used])
    result.connectivities = np.array([v.connectivity for v in used])
    result.impacts = np.array([v.average_impact for v in used])

    if result.n_variations_flagged > MAX_FLAGGED_FRACTION * config.variations:
        result.flagged = True
        result.flag_reason = f"{result.n_variations_flagged}/{config.variations} variations degenerate"
        return result

    try:
        result.conn_impact_r = pearson(result.connectivities, result.impacts).r
    except (DegenerateDataError, ContractError) as err:
        result.flagged = True
        result.flag_reason = f"connectivity correlation undefined: {err}"
        return result

    pairs = []
    for v in used:
        try:
            pairs.append(np.column_stack([zscore(v.closeness), zscore(v.impact)]))
        except DegenerateDataError:
            continue  # constant closeness or impact within this variation
    if not pairs:
        result.flagged = True
        result.flag_reason = "no variation allowed standardization"
        return result
    pooled = np.vstack(pairs)
    result.centrality_pairs = pooled
    try:
        result.cent_impact_r = pearson(pooled[:, 0], pooled[:, 1]).r
    except DegenerateDataError as err:
        result.flagged = True
        result.flag_reason = f"centrality correlation undefined: {err}"
    return result


def _replicate_rng(master_seed: int, generator: str, distribution: str, index: int):
    combo_id = GENERATORS.index(generator) * len(DISTRIBUTIONS) + DISTRIBUTIONS.index(distribution)
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), combo_id, int(index)]))


def _replicate_task(args):
    config_dict, generator, distribution, index = args
    config = StudyConfig.from_dict(config_dict)
    rng = _replicate_rng(config.seed, generator, distribution, index)
    return run_replicate(config, generator, distribution, index, rng)


def run_study(config: StudyConfig, jobs: int = 1) -> StudyReport:
    """All enabled combinations, aggregated to means and SDs of the two
    correlations; flagged replicates are excluded and counted."""
    tasks = [(config.to_dict(), gen, dist, rep)
             for gen in config.generators
             for dist in config.distributions
             for rep in range(config.replicates)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            replicates = list(pool.map(_replicate_task, tasks, chunksize=1))
    else:
        replicates = []
        for i, task in enumerate(tasks):
            replicates.append(_replicate_task(task))
            if (i + 1) % 10 == 0:
                log.info("replicate %d/%d done", i + 1, len(tasks))

    combinations = []
    for gen in config.generators:
        for dist in config.distributions:
            combo = [r for r in replicates if r.generator == gen and r.distribution == dist]
            used = [r for r in combo if not r.flagged]
            conn = np.array([r.conn_impact_r for r in used])
            cent = np.array([r.cent_impact_r for r in used])
            combinations.append(CombinationSummary(
                generator=gen,
                distribution=dist,
                conn_impact_mean=float(conn.mean()) if conn.size else np.nan,
                conn_impact_sd=float(conn.std(ddof=1)) if conn.size > 1 else np.nan,
                cent_impact_mean=float(cent.mean()) if cent.size else np.nan,
                cent_impact_sd=float(cent.std(ddof=1)) if cent.size > 1 else np.nan,
                conn_impact_values=[float(v) for v in conn],
                cent_impact_values=[float(v) for v in cent],
                replicates_used=len(used),
                replicates_flagged=len(combo) - len(used),
            ))
    return StudyReport(config, combinations, replicates)


def nearest_to_mean(report: StudyReport, generator: str, distribution: str) -> ReplicateResult:
    """The unflagged replicate whose connectivity/impact r sits closest to
    the combination mean (the natural one to plot)."""
    summary = report.summary(generator, distribution)
    candidates = [r for r in report.replicates
                  if r.generator == generator and r.distribution == distribution and not r.flagged]
    if not candidates:
        raise DegenerateDataError(f"no usable replicates for {generator} x {distribution}")
    return min(candidates, key=lambda r: abs(r.conn_impact_r - summary.conn_impact_mean))
