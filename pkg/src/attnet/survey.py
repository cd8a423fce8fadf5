"""Election-survey pipeline: load, filter, analyse, forecast.

Input files are flat CSVs with one respondent-candidate row each::

    election,candidate,respondent,e01,...,e10,vote[,voted_at_all][,party_id]

The ten element cells are ordinal codes starting at 1 (empty = missing),
``vote`` is 1 when the respondent voted for that row's candidate and 0
otherwise, ``voted_at_all`` marks whether they voted at all, and
``party_id`` is 0 for respondents with no party identification. Five-point
and four-point element scales can be mixed freely; the estimators are
scale-agnostic.

Per candidate the pipeline estimates the element correlation network,
its connectivity (ASPL) and closeness values, the average impact
(biserial of the element sum score with the vote) and per-element impact
(polychoric of element with vote). On top of those sit the two hypothesis
tests and the leave-one-election-out impact forecast, which regresses
impact on closeness over all other elections and never reads the target
election's votes.

A canonical-element map (JSON ``{column label: canonical id}``) aligns
element slots across elections for the element-specific forecast baseline;
a default map ships with the package.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from . import graphs
from .descriptives import correlation_network, descriptives
from .errors import (
    ConfigurationError,
    ContractError,
    DegenerateDataError,
    ParameterError,
    SchemaError,
)
from .ising import Encoding, IsingModel, SampleMatrix, sample_exact
from .stats import (
    Correlation,
    TestResult,
    biserial,
    crosstab,
    ols_simple,
    pearson,
    polychoric,
    t_test_ind,
    wilcoxon_signed_rank,
    zscore,
)

__all__ = [
    "E_LABELS",
    "AnalysisFilter",
    "CandidateRecords",
    "ElectionDataset",
    "SurveyData",
    "CandidateAnalysis",
    "HypothesisReport",
    "ForecastReport",
    "SynthSpec",
    "load_dataset",
    "load_element_map",
    "casewise_delete",
    "analyze_candidate",
    "analyze_all",
    "hypothesis_tests",
    "forecast_impact",
    "forecast_all",
    "gen_synthetic_elections",
    "write_dataset_csv",
    "compare_groups",
]

E_LABELS = tuple(f"e{i:02d}" for i in range(1, 11))
N_ELEMENTS = len(E_LABELS)
SMALL_SAMPLE = 100

_BASE_COLUMNS = ("election", "candidate", "respondent", *E_LABELS, "vote")
_OPTIONAL_COLUMNS = ("voted_at_all", "party_id")


class AnalysisFilter(Enum):
    """Respondent subsets; VOTERS_ONLY is the headline setting."""

    ALL = "all"
    VOTERS_ONLY = "voters"
    NONVOTERS_AS_AGAINST = "against"
    INDEPENDENTS_ONLY = "independents"
    NONVOTERS_ONLY = "nonvoters"  # complement set, for group comparisons


@dataclass
class CandidateRecords:
    """All respondent rows for one (election, candidate) block."""

    election: str
    candidate: str
    respondents: list
    elements: np.ndarray      # (n, 10) float; nan = missing
    vote: np.ndarray          # (n,) float; nan = missing
    voted_at_all: np.ndarray = None
    party_id: np.ndarray = None
    category_counts: list = None  # max code observed per element column

    @property
    def n_rows(self) -> int:
        return self.elements.shape[0]


@dataclass
class ElectionDataset:
    election: str
    candidates: dict  # candidate id -> CandidateRecords


@dataclass
class SurveyData:
    elections: dict   # election id -> ElectionDataset, in file order
    has_voted_at_all: bool = False
    has_party_id: bool = False
    synth_betas: dict = None  # only on generated data: (election, candidate) -> beta

    def election_ids(self) -> list:
        return list(self.elections)

    def blocks(self):
        for dataset in self.elections.values():
            yield from dataset.candidates.values()


# ---------------------------------------------------------------------------
# loading


def _parse_cell(value, row_num, column, kind):
    if value == "":
        return np.nan
    try:
        code = int(value)
    except ValueError:
        raise SchemaError(f"row {row_num}, column {column}: {value!r} is not an integer") from None
    if kind == "element" and code < 1:
        raise SchemaError(f"row {row_num}, column {column}: element code {code} out of range (>= 1)")
    if kind == "binary" and code not in (0, 1):
        raise SchemaError(f"row {row_num}, column {column}: {code} out of range {{0, 1}}")
    if kind == "party" and code < 0:
        raise SchemaError(f"row {row_num}, column {column}: party code {code} out of range (>= 0)")
    return float(code)


def load_dataset(path) -> SurveyData:
    """Read and validate a survey CSV; see the module docstring for the schema.

    Schema violations name the offending row and column. Elections and
    candidates keep their file order.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        rows = list(reader)

    expected = list(_BASE_COLUMNS)
    if header[: len(expected)] != expected:
        raise SchemaError(f"{path}: header must start with {','.join(expected)}")
    extras = header[len(expected):]
    allowed = [c for c in _OPTIONAL_COLUMNS]
    if [c for c in extras if c not in allowed] or extras != [c for c in allowed if c in extras]:
        raise SchemaError(f"{path}: optional trailing columns must be drawn from "
                          f"{allowed} in that order, got {extras}")
    has_voted = "voted_at_all" in extras
    has_party = "party_id" in extras

    blocks: dict = {}
    order: list = []
    for num, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaError(f"row {num}: expected {len(header)} cells, got {len(row)}")
        election, candidate, respondent = row[0], row[1], row[2]
        if not election or not candidate:
            raise SchemaError(f"row {num}: election and candidate must be non-empty")
        elements = [_parse_cell(row[3 + i], num, E_LABELS[i], "element") for i in range(N_ELEMENTS)]
        vote = _parse_cell(row[3 + N_ELEMENTS], num, "vote", "binary")
        voted = party = np.nan
        cursor = 4 + N_ELEMENTS
        if has_voted:
            voted = _parse_cell(row[cursor], num, "voted_at_all", "binary")
            cursor += 1
        if has_party:
            party = _parse_cell(row[cursor], num, "party_id", "party")
        key = (election, candidate)
        if key not in blocks:
            blocks[key] = {"respondents": [], "elements": [], "vote": [], "voted": [], "party": []}
            order.append(key)
        block = blocks[key]
        block["respondents"].append(respondent)
        block["elements"].append(elements)
        block["vote"].append(vote)
        block["voted"].append(voted)
        block["party"].append(party)

    if not order:
        raise SchemaError(f"{path}: no data rows")

    elections: dict = {}
    for election, candidate in order:
        block = blocks[(election, candidate)]
        elements = np.array(block["elements"], dtype=float)
        counts = []
        for j, label in enumerate(E_LABELS):
            observed = elements[~np.isnan(elements[:, j]), j]
            if observed.size == 0:
                raise SchemaError(f"{election}/{candidate}: element column {label} is entirely missing")
            counts.append(int(observed.max()))
        records = CandidateRecords(
            election=election,
            candidate=candidate,
            respondents=block["respondents"],
            elements=elements,
            vote=np.array(block["vote"], dtype=float),
            voted_at_all=np.array(block["voted"], dtype=float) if has_voted else None,
            party_id=np.array(block["party"], dtype=float) if has_party else None,
            category_counts=counts,
        )
        elections.setdefault(election, ElectionDataset(election, {})).candidates[candidate] = records
    return SurveyData(elections, has_voted, has_party)


def load_element_map(path=None) -> dict:
    """JSON {element label: canonical id}; the packaged default map aligns
    the ten standard slots across elections."""
    if path is None:
        text = resources.files("attnet.data").joinpath("anes_element_map.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    mapping = json.loads(text)
    if not isinstance(mapping, dict) or not all(isinstance(v, str) for v in mapping.values()):
        raise ConfigurationError("element map must be a JSON object of {label: canonical id}")
    return mapping


# ---------------------------------------------------------------------------
# filtering and deletion


def _apply_filter(records: CandidateRecords, which: AnalysisFilter):
    """Row mask plus the (possibly relabelled) vote column."""
    vote = records.vote.copy()
    keep = np.ones(records.n_rows, dtype=bool)
    if which is AnalysisFilter.ALL:
        pass
    elif which is AnalysisFilter.VOTERS_ONLY:
        if records.voted_at_all is not None:
            keep = records.voted_at_all == 1
    elif which is AnalysisFilter.NONVOTERS_ONLY:
        if records.voted_at_all is None:
            raise ConfigurationError(
                f"{records.election}/{records.candidate}: filter 'nonvoters' needs a voted_at_all column")
        keep = records.voted_at_all == 0
        vote[keep & np.isnan(vote)] = 0.0
    elif which is AnalysisFilter.NONVOTERS_AS_AGAINST:
        if records.voted_at_all is not None:
            nonvoter = records.voted_at_all == 0
            vote[nonvoter] = 0.0  # label non-voters as voting against
    elif which is AnalysisFilter.INDEPENDENTS_ONLY:
        if records.party_id is None:
            raise ConfigurationError(
                f"{records.election}/{records.candidate}: filter 'independents' needs a party_id column")
        keep = records.party_id == 0
    return keep, vote


@dataclass
class FilteredRows:
    elements: np.ndarray  # (n, k) int codes, complete rows only
    vote: np.ndarray      # (n,) int 0/1
    n_before: int
    n_removed: int


def casewise_delete(records: CandidateRecords, which: AnalysisFilter = AnalysisFilter.ALL,
                    element_indices=None) -> FilteredRows:
    """Drop rows missing any element or the vote; count the exclusions."""
    keep, vote = _apply_filter(records, which)
    idx = list(element_indices) if element_indices is not None else list(range(N_ELEMENTS))
    elements = records.elements[:, idx]
    complete = keep & ~np.isnan(elements).any(axis=1) & ~np.isnan(vote)
    n_before = int(keep.sum())
    kept = elements[complete]
    if kept.size == 0:
        raise DegenerateDataError(
            f"{records.election}/{records.candidate}: no complete rows remain after casewise deletion")
    return FilteredRows(kept.astype(int), vote[complete].astype(int),
                        n_before, n_before - int(complete.sum()))


# ---------------------------------------------------------------------------
# per-candidate analysis


@dataclass
class CandidateAnalysis:
    election: str
    candidate: str
    filter: AnalysisFilter
    network: object
    connectivity: float
    average_impact: float
    closeness: np.ndarray
    impact: np.ndarray
    element_labels: list
    n_before: int
    n_after: int
    small_sample: bool

    def to_json_dict(self) -> dict:
        return {
            "election": self.election,
            "candidate": self.candidate,
            "filter": self.filter.value,
            "connectivity_aspl": float(self.connectivity),
            "average_impact": float(self.average_impact),
            "closeness": {label: float(v) for label, v in zip(self.element_labels, self.closeness)},
            "impact": {label: float(v) for label, v in zip(self.element_labels, self.impact)},
            "n_before_deletion": self.n_before,
            "n_after_deletion": self.n_after,
            "small_sample": self.small_sample,
            "network": self.network.to_json_dict(),
        }


def analyze_candidate(dataset: ElectionDataset, candidate: str,
                      which: AnalysisFilter = AnalysisFilter.VOTERS_ONLY,
                      elements=None) -> CandidateAnalysis:
    """Estimate one candidate's attitude network and impact measures.

    ``elements`` restricts the analysis to a subset of the ten element
    labels (the element-subset robustness rerun); default is all ten.

    A constant vote column is a degenerate error, except under
    NONVOTERS_ONLY where every vote is 0 by construction: there the
    network measures are computed and the impact fields are NaN, which is
    what the voter/non-voter connectivity comparison needs.
    """
    if candidate not in dataset.candidates:
        raise ContractError(f"no candidate {candidate!r} in election {dataset.election}")
    records = dataset.candidates[candidate]
    labels = list(elements) if elements is not None else list(E_LABELS)
    for label in labels:
        if label not in E_LABELS:
            raise ConfigurationError(f"unknown element label {label!r}")
    if len(labels) < 2:
        raise ContractError("need at least 2 element columns")
    indices = [E_LABELS.index(label) for label in labels]

    rows = casewise_delete(records, which, indices)
    if rows.elements.shape[0] < 3:
        raise DegenerateDataError(
            f"{records.election}/{records.candidate}: only {rows.elements.shape[0]} complete rows")
    vote_varies = np.unique(rows.vote).size >= 2
    if not vote_varies and which is not AnalysisFilter.NONVOTERS_ONLY:
        raise DegenerateDataError(
            f"{records.election}/{records.candidate}: vote column is constant after filtering")

    sample = SampleMatrix(
        np.column_stack([rows.elements, rows.vote]),
        labels + ["vote"],
        roles=["element"] * len(labels) + ["decision"],
    )
    network = correlation_network(sample)
    report = descriptives(network)
    if vote_varies:
        average_impact = biserial(rows.elements.sum(axis=1).astype(float), rows.vote)
        impact = np.array([polychoric(crosstab(rows.elements[:, j], rows.vote)).rho
                           for j in range(len(labels))])
    else:
        average_impact = np.nan
        impact = np.full(len(labels), np.nan)
    n_after = rows.elements.shape[0]
    return CandidateAnalysis(
        election=records.election,
        candidate=records.candidate,
        filter=which,
        network=network,
        connectivity=report.aspl,
        average_impact=average_impact,
        closeness=report.closeness,
        impact=impact,
        element_labels=labels,
        n_before=rows.n_before,
        n_after=n_after,
        small_sample=n_after < SMALL_SAMPLE,
    )


def analyze_all(data: SurveyData, which: AnalysisFilter = AnalysisFilter.VOTERS_ONLY,
                elements=None) -> list:
    """Every candidate of every election, in file order."""
    return [analyze_candidate(dataset, candidate, which, elements)
            for dataset in data.elections.values()
            for candidate in dataset.candidates]


# ---------------------------------------------------------------------------
# hypothesis tests


@dataclass
class HypothesisReport:
    connectivity_test: Correlation
    centrality_test: Correlation
    connectivity_points: list   # (election, candidate, aspl, average impact)
    centrality_points: list     # (election, candidate, element, z closeness, z impact)
    excluded_networks: list

    def to_json_dict(self) -> dict:
        return {
            "connectivity": {
                "r": self.connectivity_test.r,
                "p_value": self.connectivity_test.p_value,
                "n_networks": self.connectivity_test.n,
                "points": [list(p) for p in self.connectivity_points],
            },
            "centrality": {
                "r": self.centrality_test.r,
                "p_value": self.centrality_test.p_value,
                "n_elements": self.centrality_test.n,
                "points": [list(p) for p in self.centrality_points],
            },
            "excluded_networks": [list(e) for e in self.excluded_networks],
        }


def hypothesis_tests(analyses) -> HypothesisReport:
    """Connectivity vs average impact across networks, and pooled
    within-network standardized closeness vs standardized impact."""
    analyses = list(analyses)
    if len(analyses) < 3:
        raise ContractError(f"need at least 3 candidate networks, got {len(analyses)}")
    conn_points = [(a.election, a.candidate, float(a.connectivity), float(a.average_impact))
                   for a in analyses]
    connectivity_test = pearson([p[2] for p in conn_points], [p[3] for p in conn_points])

    cent_points = []
    excluded = []
    for a in analyses:
        try:
            zc, zi = zscore(a.closeness), zscore(a.impact)
        except DegenerateDataError:
            excluded.append((a.election, a.candidate))
            continue
        cent_points.extend(
            (a.election, a.candidate, label, float(c), float(i))
            for label, c, i in zip(a.element_labels, zc, zi))
    if len(cent_points) < 3:
        raise DegenerateDataError("too few standardizable networks for the centrality test")
    centrality_test = pearson([p[3] for p in cent_points], [p[4] for p in cent_points])
    return HypothesisReport(connectivity_test, centrality_test, conn_points, cent_points, excluded)


def compare_groups(analyses_a, analyses_b) -> TestResult:
    """Pooled t-test with Cohen's D on connectivity (ASPL) between groups."""
    a = [x.connectivity for x in analyses_a]
    b = [x.connectivity for x in analyses_b]
    return t_test_ind(a, b)


# ---------------------------------------------------------------------------
# forecast


@dataclass
class ForecastRow:
    election: str
    candidate: str
    element: str
    canonical: str
    centrality: float
    predicted: float
    actual: float
    deviation: float
    overall_baseline_deviation: float
    element_baseline_deviation: float

    def to_list(self):
        return [self.election, self.candidate, self.element, self.canonical,
                self.centrality, self.predicted, self.actual, self.deviation,
                self.overall_baseline_deviation, self.element_baseline_deviation]


FORECAST_CSV_HEADER = ["election", "candidate", "element", "canonical", "centrality",
                       "predicted_impact", "actual_impact", "deviation",
                       "overall_baseline_deviation", "element_baseline_deviation"]


def _deviation_summary(values) -> dict:
    values = np.asarray(values, dtype=float)
    q1, med, q3 = np.percentile(values, [25, 50, 75])
    return {"median": float(med), "iqr_low": float(q1), "iqr_high": float(q3)}


@dataclass
class ForecastReport:
    target: str
    rows: list
    regressions: dict            # target election -> (intercept, slope)
    centrality_deviation: dict
    overall_baseline_deviation: dict
    element_baseline_deviation: dict
    vs_overall_baseline: TestResult
    vs_element_baseline: TestResult

    def to_json_dict(self) -> dict:
        return {
            "target": self.target,
            "regressions": {k: {"intercept": v[0], "slope": v[1]} for k, v in self.regressions.items()},
            "deviation_summary": {
                "centrality": self.centrality_deviation,
                "overall_baseline": self.overall_baseline_deviation,
                "element_baseline": self.element_baseline_deviation,
            },
            "wilcoxon_vs_overall_baseline": self.vs_overall_baseline.to_dict(),
            "wilcoxon_vs_element_baseline": self.vs_element_baseline.to_dict(),
            "rows": [dict(zip(FORECAST_CSV_HEADER, r.to_list())) for r in self.rows],
        }

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(FORECAST_CSV_HEADER)
            for row in self.rows:
                writer.writerow(row.to_list())


def _check_map(element_map, labels):
    for label in labels:
        if label not in element_map:
            raise ConfigurationError(f"element label {label!r} missing from the canonical-element map")


def _training_fit(train_analyses, element_map, per_candidate):
    """Regression of impact on closeness over the training networks, plus
    the two baseline predictors."""
    closenesses, impacts, canonicals = [], [], []
    per_fits = []
    for analysis in train_analyses:
        closenesses.extend(analysis.closeness)
        impacts.extend(analysis.impact)
        canonicals.extend(element_map[label] for label in analysis.element_labels)
        if per_candidate:
            per_fits.append(ols_simple(analysis.closeness, analysis.impact))
    if per_candidate:
        intercept = float(np.mean([f.intercept for f in per_fits]))
        slope = float(np.mean([f.slope for f in per_fits]))
        fit = (intercept, slope)
    else:
        fit = tuple(ols_simple(closenesses, impacts))
    impacts = np.asarray(impacts)
    overall_mean = float(impacts.mean())
    element_means = {}
    for canon in set(canonicals):
        mask = np.array([c == canon for c in canonicals])
        element_means[canon] = float(impacts[mask].mean())
    return fit, overall_mean, element_means


def _forecast_target(analyses_by_election, target, element_map, per_candidate):
    train = [a for election, group in analyses_by_election.items() if election != target
             for a in group]
    if not train:
        raise ContractError("no training elections besides the target")
    fit, overall_mean, element_means = _training_fit(train, element_map, per_candidate)
    intercept, slope = fit
    rows = []
    for analysis in analyses_by_election[target]:
        for label, centrality, actual in zip(analysis.element_labels, analysis.closeness,
                                             analysis.impact):
            canon = element_map[label]
            if canon not in element_means:
                raise ConfigurationError(
                    f"canonical element {canon!r} has no training data outside {target}")
            predicted = intercept + slope * float(centrality)
            rows.append(ForecastRow(
                election=analysis.election,
                candidate=analysis.candidate,
                element=label,
                canonical=canon,
                centrality=float(centrality),
                predicted=float(predicted),
                actual=float(actual),
                deviation=abs(predicted - float(actual)),
                overall_baseline_deviation=abs(overall_mean - float(actual)),
                element_baseline_deviation=abs(element_means[canon] - float(actual)),
            ))
    return rows, fit


def _assemble_report(target, rows, regressions) -> ForecastReport:
    dev = np.array([r.deviation for r in rows])
    dev_overall = np.array([r.overall_baseline_deviation for r in rows])
    dev_element = np.array([r.element_baseline_deviation for r in rows])
    return ForecastReport(
        target=target,
        rows=rows,
        regressions=regressions,
        centrality_deviation=_deviation_summary(dev),
        overall_baseline_deviation=_deviation_summary(dev_overall),
        element_baseline_deviation=_deviation_summary(dev_element),
        vs_overall_baseline=wilcoxon_signed_rank(dev, dev_overall),
        vs_element_baseline=wilcoxon_signed_rank(dev, dev_element),
    )


def forecast_impact(data: SurveyData, target: str, element_map=None,
                    which: AnalysisFilter = AnalysisFilter.VOTERS_ONLY,
                    per_candidate: bool = False, analyses_by_election=None) -> ForecastReport:
    """Leave the target election out, regress impact on closeness over all
    remaining candidate networks, and forecast the target's impacts from
    its closeness values alone.

    ``per_candidate=True`` fits the regression per training network and
    averages the coefficients instead of pooling all element pairs.
    """
    if target not in data.elections:
        raise ContractError(f"unknown target election {target!r}")
    if len(data.elections) < 2:
        raise ContractError("need at least 2 elections to forecast")
    element_map = element_map if element_map is not None else load_element_map()
    _check_map(element_map, E_LABELS)
    if analyses_by_election is None:
        analyses_by_election = {election: [analyze_candidate(dataset, c, which)
                                           for c in dataset.candidates]
                                for election, dataset in data.elections.items()}
    rows, fit = _forecast_target(analyses_by_election, target, element_map, per_candidate)
    return _assemble_report(target, rows, {target: fit})


def forecast_all(data: SurveyData, element_map=None,
                 which: AnalysisFilter = AnalysisFilter.VOTERS_ONLY,
                 per_candidate: bool = False) -> ForecastReport:
    """The full leave-one-out sweep: every election is forecast in turn
    from all the others, and the rows pool into one deviation comparison."""
    if len(data.elections) < 2:
        raise ContractError("need at least 2 elections to forecast")
    element_map = element_map if element_map is not None else load_element_map()
    _check_map(element_map, E_LABELS)
    analyses_by_election = {election: [analyze_candidate(dataset, c, which)
                                       for c in dataset.candidates]
                            for election, dataset in data.elections.items()}
    rows = []
    regressions = {}
    for target in data.elections:
        target_rows, fit = _forecast_target(analyses_by_election, target, element_map, per_candidate)
        rows.extend(target_rows)
        regressions[target] = fit
    return _assemble_report("all", rows, regressions)


# ---------------------------------------------------------------------------
# synthetic elections


@dataclass
class SynthSpec:
    """Recipe for a synthetic multi-election survey file.

    Inverse temperatures spread evenly over ``beta_range`` across the
    candidate sequence (or come from ``betas``), so elections span weakly
    to strongly coupled attitude networks. By default all candidates share
    one base network (``share_base``), which keeps the temperature sweep
    the only systematic difference between them; fresh thresholds are drawn
    per candidate either way.
    """

    elections: tuple = tuple(str(year) for year in range(1980, 2016, 4))
    candidates_per_election: int = 2
    individuals: int = 1000
    beta_range: tuple = (0.5, 2.0)
    betas: dict = None                   # optional {(election, candidate): beta}
    node_count: int = 11
    generator: graphs.GeneratorConfig = None
    share_base: bool = True
    threshold_sd: float = 0.1
    ordinal: bool = False
    ordinal_field_threshold: float = 0.5
    nonvoter_rate: float = 0.0
    independent_rate: float = 0.0

    def __post_init__(self):
        self.elections = tuple(str(e) for e in self.elections)
        if len(self.elections) < 1:
            raise ParameterError("need at least one election")
        if self.candidates_per_election < 1:
            raise ParameterError("need at least one candidate per election")
        if self.individuals < 1:
            raise ParameterError("individuals must be >= 1")
        if self.node_count != N_ELEMENTS + 1:
            raise ParameterError(f"node_count must be {N_ELEMENTS + 1} (ten elements plus the decision)")
        if not (0 <= self.nonvoter_rate < 1) or not (0 <= self.independent_rate < 1):
            raise ParameterError("rates must lie in [0, 1)")
        if self.generator is None:
            self.generator = graphs.GeneratorConfig(node_count=self.node_count,
                                                    weights=graphs.UniformWeights(0.05, 0.35))
        if self.generator.node_count != self.node_count:
            raise ParameterError("generator node_count must match the synthetic recipe")

    def candidate_labels(self) -> list:
        return [chr(ord("A") + c) for c in range(self.candidates_per_election)]

    def beta_for(self, election_index: int, candidate_index: int) -> float:
        election = self.elections[election_index]
        candidate = self.candidate_labels()[candidate_index]
        if self.betas and (election, candidate) in self.betas:
            return float(self.betas[(election, candidate)])
        total = len(self.elections) * self.candidates_per_election
        rank = election_index * self.candidates_per_election + candidate_index
        lo, hi = self.beta_range
        return float(lo) if total == 1 else float(lo + (hi - lo) * rank / (total - 1))

    def to_dict(self) -> dict:
        return {
            "elections": list(self.elections),
            "candidates_per_election": self.candidates_per_election,
            "individuals": self.individuals,
            "beta_range": list(self.beta_range),
            "betas": {f"{e}/{c}": v for (e, c), v in (self.betas or {}).items()} or None,
            "node_count": self.node_count,
            "generator": self.generator.to_dict(),
            "share_base": self.share_base,
            "threshold_sd": self.threshold_sd,
            "ordinal": self.ordinal,
            "ordinal_field_threshold": self.ordinal_field_threshold,
            "nonvoter_rate": self.nonvoter_rate,
            "independent_rate": self.independent_rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        kwargs = dict(d)
        if "elections" in kwargs:
            kwargs["elections"] = tuple(kwargs["elections"])
        if "beta_range" in kwargs:
            kwargs["beta_range"] = tuple(kwargs["beta_range"])
        if kwargs.get("betas"):
            kwargs["betas"] = {tuple(key.split("/", 1)): float(v)
                               for key, v in kwargs["betas"].items()}
        if kwargs.get("generator") is not None:
            kwargs["generator"] = graphs.GeneratorConfig.from_dict(kwargs["generator"])
        return cls(**kwargs)


def _ordinal_codes(states, model, threshold):
    """Four ordinal categories from the state and its local field strength.

    A respondent endorsing an element (state +1) answers 4 when the
    conditional field also pushes past +threshold, else 3; mirrored for
    rejection. Keeps the ordering monotone in the underlying disposition.
    """
    fields = model.thresholds[None, :] + states @ model.weights
    fields = fields[:, :N_ELEMENTS]
    element_states = states[:, :N_ELEMENTS]
    codes = np.where(element_states > 0,
                     np.where(fields >= threshold, 4, 3),
                     np.where(fields <= -threshold, 1, 2))
    return codes


def gen_synthetic_elections(spec: SynthSpec, rng) -> SurveyData:
    """Deterministic synthetic survey data from known Ising models.

    Node 10 (the last) is the decision node and becomes the vote column;
    the first ten nodes become the element columns, coded {1, 2} (or four
    ordinal categories when ``spec.ordinal``). With ``nonvoter_rate`` some
    respondents are marked as not having voted and their vote is blanked;
    with ``independent_rate`` a party_id column is added.
    """
    elections: dict = {}
    betas: dict = {}
    shared_base = graphs.generate(spec.generator, rng) if spec.share_base else None
    for e_idx, election in enumerate(spec.elections):
        dataset = ElectionDataset(election, {})
        for c_idx, candidate in enumerate(spec.candidate_labels()):
            beta = spec.beta_for(e_idx, c_idx)
            betas[(election, candidate)] = beta
            base = shared_base if shared_base is not None else graphs.generate(spec.generator, rng)
            thresholds = rng.normal(0.0, spec.threshold_sd, spec.node_count)
            model = IsingModel(thresholds, base.weights, beta, Encoding.PLUS_MINUS_ONE)
            sample = sample_exact(model, spec.individuals, rng)
            states = sample.data.astype(float)
            if spec.ordinal:
                element_codes = _ordinal_codes(states, model, spec.ordinal_field_threshold)
            else:
                element_codes = ((states[:, :N_ELEMENTS] + 1) // 2 + 1).astype(int)
            vote = ((states[:, N_ELEMENTS] + 1) // 2).astype(float)
            voted_at_all = None
            if spec.nonvoter_rate > 0:
                voted_at_all = (rng.random(spec.individuals) >= spec.nonvoter_rate).astype(float)
                vote = np.where(voted_at_all == 0, np.nan, vote)
            party_id = None
            if spec.independent_rate > 0:
                party_id = np.where(rng.random(spec.individuals) < spec.independent_rate,
                                    0.0, 1.0 + (rng.random(spec.individuals) < 0.5))
            dataset.candidates[candidate] = CandidateRecords(
                election=election,
                candidate=candidate,
                respondents=[f"{election}-{candidate}-{i:04d}" for i in range(spec.individuals)],
                elements=element_codes.astype(float),
                vote=vote,
                voted_at_all=voted_at_all,
                party_id=party_id,
                category_counts=[int(element_codes[:, j].max()) for j in range(N_ELEMENTS)],
            )
        elections[election] = dataset
    return SurveyData(elections,
                      has_voted_at_all=spec.nonvoter_rate > 0,
                      has_party_id=spec.independent_rate > 0,
                      synth_betas=betas)


def _format_cell(value) -> str:
    return "" if value is None or (isinstance(value, float) and np.isnan(value)) else str(int(value))


def write_dataset_csv(data: SurveyData, path):
    """Write a SurveyData back to the documented CSV schema (byte-stable)."""
    header = list(_BASE_COLUMNS)
    if data.has_voted_at_all:
        header.append("voted_at_all")
    if data.has_party_id:
        header.append("party_id")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for block in data.blocks():
            for i in range(block.n_rows):
                row = [block.election, block.candidate, block.respondents[i]]
                row.extend(_format_cell(v) for v in block.elements[i])
                row.append(_format_cell(block.vote[i]))
                if data.has_voted_at_all:
                    row.append(_format_cell(block.voted_at_all[i] if block.voted_at_all is not None else None))
                if data.has_party_id:
                    row.append(_format_cell(block.party_id[i] if block.party_id is not None else None))
                writer.writerow(row)
