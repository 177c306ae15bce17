"""Feature-table assembly: dependents + predictors for whole corpora.

One row per token in document order.  Predictor columns are tagged with
the group they belong to; cross-validation folds partition documents,
never tokens, so fold ids are constant within a document.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import contours, predictors
from .treebank import (
    PROSE,
    RST,
    DiscourseTree,
    TokenRecord,
    ValidationError,
    build_prose_tree,
    right_binarize,
    validate_tokens,
)

RST_ANCESTOR_WINDOWS = 3  # relpos/boundary: EDU plus this many ancestor spans
RST_HIER_DEPTH = 4
PS_HIER_DEPTH = 2  # prose trees have exactly paragraph and sentence levels

PS_LEVELS = ("sentence", "paragraph", "document")

BASELINE_COLUMNS = ("char_len", "prev_surprisal")

GROUPS = (
    "baseline",
    "rst_relpos", "rst_boundary", "rst_hier", "rst_transitions", "rst_all",
    "ps_relpos", "ps_boundary", "ps_hier", "ps_transitions", "ps_all",
)


def _group_columns() -> dict[str, list[str]]:
    rst_relpos = ["rst_relpos_edu"] + [
        f"rst_relpos_anc{k}" for k in range(1, RST_ANCESTOR_WINDOWS + 1)
    ]
    rst_boundary = ["rst_bound_edu"] + [
        f"rst_bound_anc{k}" for k in range(1, RST_ANCESTOR_WINDOWS + 1)
    ]
    rst_hier = [f"rst_hier_l{d}" for d in range(1, RST_HIER_DEPTH + 1)] + ["rst_hier_unit"]
    rst_trans = [
        f"rst_trans_{s}_{c}_{d}"
        for s in predictors.STRATEGIES
        for c in ("push", "pop")
        for d in ("prev", "next")
    ]
    ps_relpos = [f"ps_relpos_{lvl}" for lvl in PS_LEVELS]
    ps_boundary = [f"ps_bound_{lvl}" for lvl in PS_LEVELS]
    ps_hier = [f"ps_hier_l{d}" for d in range(1, PS_HIER_DEPTH + 1)] + ["ps_hier_unit"]
    ps_trans = [
        f"ps_trans_{s}_{c}_{d}"
        for s in predictors.STRATEGIES
        for c in ("push", "pop")
        for d in ("prev", "next")
    ]
    groups = {
        "baseline": [],
        "rst_relpos": rst_relpos,
        "rst_boundary": rst_boundary,
        "rst_hier": rst_hier,
        "rst_transitions": rst_trans,
        "ps_relpos": ps_relpos,
        "ps_boundary": ps_boundary,
        "ps_hier": ps_hier,
        "ps_transitions": ps_trans,
    }
    groups["rst_all"] = rst_relpos + rst_boundary + rst_hier + rst_trans
    groups["ps_all"] = ps_relpos + ps_boundary + ps_hier + ps_trans
    return groups

GROUP_COLUMNS = _group_columns()
PREDICTOR_COLUMNS = GROUP_COLUMNS["rst_all"] + GROUP_COLUMNS["ps_all"]


@dataclass
class FeatureTable:
    frame: pd.DataFrame
    dependent_columns: list[str] = field(
        default_factory=lambda: list(contours.DEPENDENT_KINDS))
    baseline_columns: list[str] = field(default_factory=lambda: list(BASELINE_COLUMNS))
    group_columns: dict[str, list[str]] = field(
        default_factory=lambda: {g: list(c) for g, c in GROUP_COLUMNS.items()})

    @property
    def doc_ids(self) -> list[str]:
        return list(dict.fromkeys(self.frame["doc_id"]))

    def n_folds(self) -> int:
        return int(self.frame["fold_id"].max()) + 1


def assign_folds(doc_ids: list[str], folds: int, seed: int) -> dict[str, int]:
    """Shuffle documents with a seeded generator, deal them round-robin."""
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if len(doc_ids) < folds:
        raise ValidationError(f"{len(doc_ids)} documents cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(doc_ids))
    return {doc_ids[j]: i % folds for i, j in enumerate(order)}


def document_features(tokens: list[TokenRecord], rst_tree: DiscourseTree,
                      prose_tree: DiscourseTree | None = None) -> dict[str, np.ndarray]:
    """All dependent and predictor columns for one document."""
    validate_tokens(tokens)
    if prose_tree is None:
        prose_tree = build_prose_tree(tokens)
    if rst_tree.kind != RST or prose_tree.kind != PROSE:
        raise ValidationError("tree kinds do not match their roles")

    cols: dict[str, np.ndarray] = {}
    for kind in contours.DEPENDENT_KINDS:
        cols[kind] = contours.compute_dependent(tokens, kind).values
    cols.update(predictors.baseline_features(tokens))

    # RST position predictors: within-EDU plus nearest ancestor spans
    edu_iv = predictors.containment_intervals(tokens, "edu")
    cols["rst_relpos_edu"] = predictors.relative_position(edu_iv)
    cols["rst_bound_edu"] = predictors.nearest_boundary(edu_iv)
    for k in range(1, RST_ANCESTOR_WINDOWS + 1):
        iv = predictors.ancestor_intervals(rst_tree, tokens, k)
        cols[f"rst_relpos_anc{k}"] = predictors.relative_position(iv)
        cols[f"rst_bound_anc{k}"] = predictors.nearest_boundary(iv)
    for name, v in predictors.hierarchical_position(tokens, rst_tree, RST_HIER_DEPTH).items():
        cols[f"rst_hier_{name}"] = v
    for name, v in predictors.transition_features(right_binarize(rst_tree), tokens).items():
        cols[f"rst_trans_{name}"] = v

    # prose structure counterparts
    for lvl in PS_LEVELS:
        iv = predictors.containment_intervals(tokens, lvl)
        cols[f"ps_relpos_{lvl}"] = predictors.relative_position(iv)
        cols[f"ps_bound_{lvl}"] = predictors.nearest_boundary(iv)
    for name, v in predictors.hierarchical_position(tokens, prose_tree, PS_HIER_DEPTH).items():
        cols[f"ps_hier_{name}"] = v
    for name, v in predictors.transition_features(right_binarize(prose_tree), tokens).items():
        cols[f"ps_trans_{name}"] = v
    return cols


def build_feature_table(corpus: dict[str, list[TokenRecord]],
                        rst_trees: dict[str, DiscourseTree],
                        prose_trees: dict[str, DiscourseTree] | None = None,
                        folds: int = 5, seed: int = 0) -> FeatureTable:
    """Extract and stack features for every document, assign folds."""
    if set(corpus) != set(rst_trees):
        raise ValidationError("token documents and RST trees do not line up")
    fold_of = assign_folds(list(corpus), folds, seed)
    frames = []
    for doc_id, tokens in corpus.items():
        prose = prose_trees.get(doc_id) if prose_trees else None
        cols = document_features(tokens, rst_trees[doc_id], prose)
        frame = pd.DataFrame(cols)
        frame.insert(0, "doc_id", doc_id)
        frame.insert(1, "token_index", np.arange(len(tokens)))
        frame.insert(2, "fold_id", fold_of[doc_id])
        frames.append(frame)
    table = FeatureTable(frame=pd.concat(frames, ignore_index=True))
    expected = (["doc_id", "token_index", "fold_id"]
                + table.dependent_columns + list(BASELINE_COLUMNS) + PREDICTOR_COLUMNS)
    missing = set(expected) - set(table.frame.columns)
    if missing:
        raise AssertionError(f"feature assembly missed columns: {sorted(missing)}")
    if table.frame[expected].isna().any().any():
        raise ValidationError("feature table contains missing values")
    return table


def build_design_matrix(table: FeatureTable, group: str, dependent: str,
                        train_mask: np.ndarray | None = None):
    """Design matrix for one (group x dependent) cell.

    X always contains the baseline columns, plus the group's columns.
    Predictors are z-scored with mean/sd taken over the training rows
    only; zero-variance columns are dropped with a warning.  y is the
    raw dependent series.  Returns (X, y, column_names).
    """
    if group not in table.group_columns:
        raise ValueError(f"unknown group {group!r} (one of {sorted(table.group_columns)})")
    if dependent not in table.dependent_columns:
        raise ValueError(f"unknown dependent {dependent!r}")
    names = list(table.baseline_columns) + list(table.group_columns[group])
    raw = table.frame[names].to_numpy(dtype=np.float64)
    y = table.frame[dependent].to_numpy(dtype=np.float64)
    if train_mask is None:
        train_mask = np.ones(len(y), dtype=bool)
    mu = raw[train_mask].mean(axis=0)
    sd = raw[train_mask].std(axis=0)
    keep = sd > 1e-12
    if not keep.all():
        dropped = [n for n, k in zip(names, keep) if not k]
        warnings.warn(f"dropping zero-variance predictors: {dropped}")
    X = (raw[:, keep] - mu[keep]) / sd[keep]
    kept = [n for n, k in zip(names, keep) if k]
    return np.ascontiguousarray(X), y, kept


def standardization_stats(table: FeatureTable) -> dict[str, dict[str, float]]:
    """Whole-table mean/sd per predictor column (manifest metadata)."""
    stats = {}
    for name in list(table.baseline_columns) + PREDICTOR_COLUMNS:
        col = table.frame[name].to_numpy(dtype=np.float64)
        stats[name] = {"mean": float(col.mean()), "sd": float(col.std())}
    return stats
