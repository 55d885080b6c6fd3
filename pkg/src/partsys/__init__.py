"""Toolkit for participatory classification systems.

Builds classifiers that let individuals opt into personalization by
reporting group attributes at prediction time.  Every reporting option a
learned system offers carries a statistical certificate that reporting it
improves performance over the option's parent, and withholding always
falls back to the generic model.
"""

from .assembly import (
    GainCertificate,
    ParticipatorySystem,
    TestConfig,
    assign_models,
    bootstrap_test,
    certify_surviving_edges,
    delong_delta_variance,
    delong_test,
    learn_systems,
    load_system,
    mcnemar_test,
    prune_leaves,
    save_system,
    test_gain,
)
from .metrics import (
    EvaluationReport,
    data_use,
    evaluate_system,
    group_gain_range,
    imputation_risk,
    impute_groups,
    options_pruned,
    overall_gain,
    overall_performance,
    rationality_violations,
)
from .simulate import (
    AgentProfile,
    agent_utility,
    best_report,
    make_population,
    participation_profile,
)
from .dataset import (
    NOT_REPORTED,
    Dataset,
    GroupSchema,
    ReportingGroup,
    SplitBundle,
    encode_features,
    group_counts,
    load_dataset,
    load_schema,
    restrict_to,
    split_dataset,
    truthful_options,
)
from .errors import (
    ArtifactError,
    ConfigError,
    DataError,
    NonTruthfulReport,
    PartialInput,
    TrainingError,
)
from .interface import (
    OrderingConstraint,
    ReportingTree,
    TreeConstraints,
    build_flat,
    build_minimal,
    count_sequential,
    enumerate_sequential,
    greedy_tree,
    validate_tree,
)
from .models import (
    AUC_RISK,
    ERROR,
    Metric,
    ModelSpec,
    TrainedModel,
    auc,
    empirical_risk,
    fixed_rule_model,
    predict_labels,
    predict_scores,
    predict_single,
    train_model,
)
from .pool import ModelPool, build_pool, select_model, viable_models
from .version import TOOLKIT_VERSION

__version__ = TOOLKIT_VERSION

__all__ = [
    "AUC_RISK",
    "AgentProfile",
    "ArtifactError",
    "ConfigError",
    "DataError",
    "Dataset",
    "ERROR",
    "EvaluationReport",
    "GainCertificate",
    "GroupSchema",
    "Metric",
    "ModelPool",
    "ModelSpec",
    "NOT_REPORTED",
    "NonTruthfulReport",
    "OrderingConstraint",
    "ParticipatorySystem",
    "PartialInput",
    "ReportingGroup",
    "ReportingTree",
    "SplitBundle",
    "TOOLKIT_VERSION",
    "TestConfig",
    "TrainedModel",
    "TrainingError",
    "TreeConstraints",
    "agent_utility",
    "assign_models",
    "auc",
    "best_report",
    "bootstrap_test",
    "build_flat",
    "build_minimal",
    "build_pool",
    "certify_surviving_edges",
    "count_sequential",
    "data_use",
    "delong_delta_variance",
    "delong_test",
    "empirical_risk",
    "encode_features",
    "enumerate_sequential",
    "evaluate_system",
    "fixed_rule_model",
    "greedy_tree",
    "group_counts",
    "group_gain_range",
    "imputation_risk",
    "impute_groups",
    "learn_systems",
    "load_dataset",
    "load_schema",
    "load_system",
    "make_population",
    "mcnemar_test",
    "options_pruned",
    "overall_gain",
    "overall_performance",
    "participation_profile",
    "predict_labels",
    "predict_scores",
    "predict_single",
    "prune_leaves",
    "rationality_violations",
    "restrict_to",
    "save_system",
    "select_model",
    "split_dataset",
    "test_gain",
    "train_model",
    "truthful_options",
    "validate_tree",
    "viable_models",
]
