"""Token-level predictors extracted from discourse trees.

Baseline predictors (unit length, previous-token surprisal), position
predictors (relative position, nearest boundary, hierarchical position),
and transition predictors obtained by simulating a pushdown traversal of
the binarized tree under three evaluation orders:

  top_down     nodes are popped in preorder,
  bottom_up    in postorder,
  left_corner  in inorder.

In all three the push counter starts at 1 for the root and grows by 2
each time an internal node is expanded during the depth-first walk, so
pushes agree across strategies; only the pop schedule differs.  Each
leaf records both counters immediately after its own pop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .treebank import DiscourseTree, TokenRecord, TreeNode, ValidationError, leaf_spans, preorder

STRATEGIES = ("top_down", "bottom_up", "left_corner")


# ---------------------------------------------------------------------------
# Baseline predictors.

def baseline_features(tokens: list[TokenRecord]) -> dict[str, np.ndarray]:
    """char_len plus previous-token global surprisal (0 at doc start)."""
    char_len = np.array([t.char_len for t in tokens], dtype=np.float64)
    s = np.array([t.s_global for t in tokens], dtype=np.float64)
    prev = np.concatenate([[0.0], s[:-1]])
    return {"char_len": char_len, "prev_surprisal": prev}


# ---------------------------------------------------------------------------
# Position predictors over token intervals.

def containment_intervals(tokens: list[TokenRecord], level: str) -> np.ndarray:
    """(n, 2) half-open token interval of each token's containing unit.

    level is one of edu / sentence / paragraph / document, resolved from
    the containment ids carried by the tokens themselves.
    """
    n = len(tokens)
    if level == "document":
        return np.tile([0, n], (n, 1))
    key = {"edu": "edu_index", "sentence": "sentence_index",
           "paragraph": "paragraph_index"}[level]
    ids = np.array([getattr(t, key) for t in tokens])
    out = np.empty((n, 2), dtype=np.int64)
    start = 0
    for i in range(1, n + 1):
        if i == n or ids[i] != ids[start]:
            out[start:i] = (start, i)
            start = i
    return out


def ancestor_intervals(tree: DiscourseTree, tokens: list[TokenRecord],
                       depth_up: int) -> np.ndarray:
    """Token interval of the span `depth_up` levels above the token's leaf.

    Ancestors are counted from the leaf's parent upward and clamp at the
    root, so every token always gets a well-defined window.
    """
    if depth_up < 1:
        raise ValueError("depth_up must be >= 1")
    spans = leaf_spans(tree, tokens)
    parent: dict[int, TreeNode] = {}
    for node in preorder(tree.root):
        for c in node.children:
            parent[c.id] = node
    out = np.empty((len(tokens), 2), dtype=np.int64)
    for leaf in tree.leaves():
        anc = leaf
        for _ in range(depth_up):
            if anc.id not in parent:
                break
            anc = parent[anc.id]
        lo, hi = spans[anc.id]
        tlo, thi = spans[leaf.id]
        out[tlo:thi] = (lo, hi)
    return out


def relative_position(intervals: np.ndarray) -> np.ndarray:
    """Offset within the unit scaled to [0, 1]: i / max(L-1, 1).

    The first token of a unit maps to 0 and the last to 1; a one-token
    unit maps to 0.
    """
    lo, hi = intervals[:, 0], intervals[:, 1]
    n = len(lo)
    offs = np.arange(n) - lo
    denom = np.maximum(hi - lo - 1, 1)
    return offs / denom


def nearest_boundary(intervals: np.ndarray) -> np.ndarray:
    """Distance to the closer unit edge: min(r, 1-r), in [0, 0.5]."""
    r = relative_position(intervals)
    return np.minimum(r, 1.0 - r)


def hierarchical_position(tokens: list[TokenRecord], tree: DiscourseTree,
                          max_depth: int) -> dict[str, np.ndarray]:
    """Sibling position of each ancestor on the root-to-leaf path.

    Works on the *un-binarized* tree, where sibling counts are
    meaningful.  Level d is the depth-d node on the path (level 1 =
    child of the root); its value is sibling_index / max(siblings-1, 1).
    Levels past the leaf's depth are padded with -1, and the token's own
    relative position inside its leaf unit is appended as the deepest
    column ("unit").
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if tree.binarized:
        raise ValidationError("hierarchical position expects the un-binarized tree")
    # per-leaf path values
    leaf_vals: dict[int, list[float]] = {}
    stack: list[tuple[TreeNode, list[float]]] = [(tree.root, [])]
    while stack:
        node, path = stack.pop()
        if node.is_leaf:
            leaf_vals[node.leaf_index] = path
            continue
        nsib = len(node.children)
        for i, child in enumerate(node.children):
            stack.append((child, path + [i / max(nsib - 1, 1)]))

    spans = leaf_spans(tree, tokens)
    n = len(tokens)
    cols = {f"l{d}": np.full(n, -1.0) for d in range(1, max_depth + 1)}
    for leaf in tree.leaves():
        lo, hi = spans[leaf.id]
        for d, v in enumerate(leaf_vals[leaf.leaf_index][:max_depth], start=1):
            cols[f"l{d}"][lo:hi] = v
    unit = np.empty((n, 2), dtype=np.int64)
    for leaf in tree.leaves():
        lo, hi = spans[leaf.id]
        unit[lo:hi] = (lo, hi)
    cols["unit"] = relative_position(unit)
    return cols


# ---------------------------------------------------------------------------
# Transition predictors.

@dataclass
class TraversalCounts:
    """Push/pop counter values recorded at each leaf, left to right."""

    strategy: str
    pushes: np.ndarray  # int64, one per leaf
    pops: np.ndarray
    total_pushes: int
    total_pops: int


def traversal_counts(tree: DiscourseTree, strategy: str) -> TraversalCounts:
    """Simulate the pushdown traversal and record counters at the leaves."""
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if not tree.binarized:
        raise ValidationError("traversal counts are defined on binarized trees")

    pushes_at: list[int] = []
    pops_at: list[int] = []
    pushes = 1  # the root itself
    pops = 0
    # states: 0 = expand, 1 = pop this internal node now
    stack: list[tuple[TreeNode, int]] = [(tree.root, 0)]
    while stack:
        node, state = stack.pop()
        if node.is_leaf:
            pops += 1
            pushes_at.append(pushes)
            pops_at.append(pops)
            continue
        if len(node.children) != 2:
            raise ValidationError(f"node {node.id} is not binary")
        left, right = node.children
        if state == 1:
            pops += 1
            continue
        pushes += 2
        if strategy == "top_down":
            pops += 1
            stack.append((right, 0))
            stack.append((left, 0))
        elif strategy == "bottom_up":
            stack.append((node, 1))
            stack.append((right, 0))
            stack.append((left, 0))
        else:  # left_corner
            stack.append((right, 0))
            stack.append((node, 1))
            stack.append((left, 0))

    n_internal = tree.leaf_count - 1 if tree.leaf_count > 1 else 0
    return TraversalCounts(
        strategy=strategy,
        pushes=np.array(pushes_at, dtype=np.int64),
        pops=np.array(pops_at, dtype=np.int64),
        total_pushes=1 + 2 * n_internal,
        total_pops=tree.leaf_count + n_internal,
    )


def transition_features(tree: DiscourseTree, tokens: list[TokenRecord]) -> dict[str, np.ndarray]:
    """The 12 per-token transition columns for one tree.

    {top_down, bottom_up, left_corner} x {push, pop} x {prev, next}:
    ``prev`` is the counter pair recorded at the token's leaf, ``next``
    the following leaf's pair (the final totals after the last leaf).
    Every token inherits the values of the leaf that contains it.
    """
    spans = leaf_spans(tree, tokens)
    n = len(tokens)
    leaf_intervals = [spans[leaf.id] for leaf in tree.leaves()]
    cols: dict[str, np.ndarray] = {}
    for strategy in STRATEGIES:
        counts = traversal_counts(tree, strategy)
        for counter, prev in (("push", counts.pushes), ("pop", counts.pops)):
            total = counts.total_pushes if counter == "push" else counts.total_pops
            nxt = np.concatenate([prev[1:], [total]])
            for direction, per_leaf in (("prev", prev), ("next", nxt)):
                col = np.empty(n, dtype=np.float64)
                for (lo, hi), v in zip(leaf_intervals, per_leaf):
                    col[lo:hi] = v
                cols[f"{strategy}_{counter}_{direction}"] = col
    return cols
