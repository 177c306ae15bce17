"""Discourse-tree predictors for per-token information contours.

The pipeline: parse discourse trees and token streams (`treebank`),
compute dependent variables from surprisal channels (`contours`),
extract tree-structural predictors (`predictors`, assembled by
`features`), and compare predictor groups with cross-validated
variational Bayesian regression plus permutation tests (`inference`).
`synth` generates planted-signal corpora for end-to-end verification
and `cli` exposes everything as the ``infocontours`` command.
"""

__version__ = "0.1.0"

from .backend import BACKEND_NAME
from .contours import DEPENDENT_KINDS, DependentSeries
from .features import GROUPS, FeatureTable, build_feature_table, build_design_matrix
from .inference import (
    EvalReport,
    FitConfig,
    GaussianPosterior,
    cross_validate,
    expected_mse,
    fit_conjugate_oracle,
    fit_svi,
    paired_permutation_test,
)
from .synth import SynthSpec, generate_corpus
from .treebank import (
    DiscourseTree,
    TokenRecord,
    TreeNode,
    ValidationError,
    build_prose_tree,
    leaf_spans,
    load_token_file,
    parse_tree_file,
    right_binarize,
)

__all__ = [
    "BACKEND_NAME",
    "DEPENDENT_KINDS",
    "DependentSeries",
    "DiscourseTree",
    "EvalReport",
    "FeatureTable",
    "FitConfig",
    "GROUPS",
    "GaussianPosterior",
    "SynthSpec",
    "TokenRecord",
    "TreeNode",
    "ValidationError",
    "build_feature_table",
    "build_design_matrix",
    "build_prose_tree",
    "cross_validate",
    "expected_mse",
    "fit_conjugate_oracle",
    "fit_svi",
    "generate_corpus",
    "leaf_spans",
    "load_token_file",
    "paired_permutation_test",
    "parse_tree_file",
    "right_binarize",
]
