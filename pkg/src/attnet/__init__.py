"""Attitude networks as Ising systems.

Simulate weighted random attitude networks, sample respondents from the
implied Ising distribution, estimate polychoric correlation networks from
ordinal responses, compute connectivity (ASPL) and closeness descriptives,
and relate both to the impact of attitudes on a binary decision, including
a leave-one-election-out impact forecast for survey data.
"""

__version__ = "0.1.0"

from .descriptives import (
    CorrelationNetwork,
    aspl,
    closeness,
    correlation_network,
    descriptives,
    shortest_paths,
)
from .errors import (
    AttnetError,
    CapacityError,
    ConfigurationError,
    ContractError,
    DegenerateDataError,
    ParameterError,
    SchemaError,
)
from .graphs import (
    GeneratorConfig,
    NormalWeights,
    ParetoWeights,
    UniformWeights,
    UnweightedGraph,
    WeightedGraph,
    assign_weights,
    gen_erdos_renyi,
    gen_preferential_attachment,
    gen_small_world,
    generate,
)
from .ising import (
    Encoding,
    IsingModel,
    SampleMatrix,
    classify,
    conditional_prob,
    config_probability,
    hamiltonian,
    partition_function,
    probability_table,
    pseudo_log_loss,
    recode,
    sample_exact,
    sample_gibbs,
)
from .simulation import StudyConfig, StudyReport, run_replicate, run_study, run_variation
from .stats import (
    ContingencyTable,
    Correlation,
    TestResult,
    biserial,
    bivariate_normal_cdf,
    cles_paired,
    crosstab,
    ols_simple,
    pearson,
    polychoric,
    t_test_ind,
    tetrachoric,
    wilcoxon_signed_rank,
    zscore,
)
from .survey import (
    AnalysisFilter,
    SurveyData,
    SynthSpec,
    analyze_all,
    analyze_candidate,
    compare_groups,
    forecast_all,
    forecast_impact,
    gen_synthetic_elections,
    hypothesis_tests,
    load_dataset,
    load_element_map,
    write_dataset_csv,
)
