"""Shared test utilities: random structure generators and independent
oracles.  Oracles are written against the plain recursive definitions so
they stay independent of the library's iterative implementations."""

from __future__ import annotations

import numpy as np

from infocontours.treebank import RST, DiscourseTree, TokenRecord, TreeNode


def random_nary_tree(rng, n_leaves, max_arity=5, unary_prob=0.0) -> DiscourseTree:
    """Random ordered tree with contiguous leaf indices; optional unary
    wrapper nodes to exercise collapse during binarization."""
    counter = [0]

    def build(lo, hi):
        size = hi - lo
        if size == 1:
            node = TreeNode(id=-1, leaf_index=lo)
        else:
            k = int(rng.integers(2, min(max_arity, size) + 1))
            cuts = sorted(rng.choice(np.arange(lo + 1, hi), size=k - 1, replace=False))
            bounds = [lo] + [int(c) for c in cuts] + [hi]
            node = TreeNode(id=-1, label="n",
                            children=[build(a, b) for a, b in zip(bounds, bounds[1:])])
        if unary_prob and rng.random() < unary_prob:
            node = TreeNode(id=-1, label="u", children=[node])
        return node

    root = build(0, n_leaves)
    ids = [0]

    def number(node):
        node.id = ids[0]
        ids[0] += 1
        for c in node.children:
            number(c)

    number(root)
    return DiscourseTree(root=root, kind=RST, binarized=False, leaf_count=n_leaves)


def random_binary_tree(rng, n_leaves) -> DiscourseTree:
    """Uniform-ish random binary tree over n_leaves contiguous leaves."""
    def build(lo, hi):
        if hi - lo == 1:
            return TreeNode(id=-1, leaf_index=lo)
        cut = int(rng.integers(lo + 1, hi))
        return TreeNode(id=-1, label="n", children=[build(lo, cut), build(cut, hi)])

    root = build(0, n_leaves)
    i = [0]

    def number(node):
        node.id = i[0]
        i[0] += 1
        for c in node.children:
            number(c)

    number(root)
    return DiscourseTree(root=root, kind=RST, binarized=True, leaf_count=n_leaves)


# --- recursive traversal oracles -------------------------------------------

def leaf_sequence(node: TreeNode) -> list[int]:
    if node.is_leaf:
        return [node.leaf_index]
    out = []
    for c in node.children:
        out.extend(leaf_sequence(c))
    return out


def count_internal(node: TreeNode) -> int:
    if node.is_leaf:
        return 0
    return 1 + sum(count_internal(c) for c in node.children)


def preorder_nodes(node: TreeNode) -> list[TreeNode]:
    out = [node]
    for c in node.children:
        out.extend(preorder_nodes(c))
    return out


def postorder_nodes(node: TreeNode) -> list[TreeNode]:
    out = []
    for c in node.children:
        out.extend(postorder_nodes(c))
    out.append(node)
    return out


def inorder_nodes(node: TreeNode) -> list[TreeNode]:
    if node.is_leaf:
        return [node]
    assert len(node.children) == 2
    left, right = node.children
    return inorder_nodes(left) + [node] + inorder_nodes(right)


def rank_oracle(tree: DiscourseTree, order: str) -> dict[int, int]:
    """1-based rank of every node id in the given traversal order."""
    fn = {"pre": preorder_nodes, "post": postorder_nodes, "in": inorder_nodes}[order]
    return {node.id: r for r, node in enumerate(fn(tree.root), start=1)}


def push_oracle(tree: DiscourseTree) -> dict[int, int]:
    """Per-leaf pushes: 1 + 2 * (internal nodes preceding the leaf in
    preorder)."""
    out = {}
    internal_seen = 0
    for node in preorder_nodes(tree.root):
        if node.is_leaf:
            out[node.id] = 1 + 2 * internal_seen
        else:
            internal_seen += 1
    return out


# --- token fixtures ----------------------------------------------------------

def make_tokens(doc_id, para_ids, sent_ids, edu_ids, s_global=None, s_sentence=None,
                s_edu=None, s_unigram=None, texts=None) -> list[TokenRecord]:
    n = len(para_ids)
    s_global = [1.0] * n if s_global is None else s_global
    s_sentence = list(s_global) if s_sentence is None else s_sentence
    s_edu = list(s_global) if s_edu is None else s_edu
    s_unigram = [2.0] * n if s_unigram is None else s_unigram
    texts = [f"w{i}" for i in range(n)] if texts is None else texts
    return [
        TokenRecord(doc_id=doc_id, token_index=i, text=texts[i],
                    char_len=len(texts[i]), paragraph_index=para_ids[i],
                    sentence_index=sent_ids[i], edu_index=edu_ids[i],
                    s_global=float(s_global[i]), s_sentence=float(s_sentence[i]),
                    s_edu=float(s_edu[i]), s_unigram=float(s_unigram[i]))
        for i in range(n)
    ]


def four_leaf_tree() -> DiscourseTree:
    """The 4-leaf tree S(X(A,B), Y(C,D)) used throughout the traversal tests."""
    from infocontours.treebank import parse_tree_string
    return parse_tree_string("(S (X (leaf 0) (leaf 1)) (Y (leaf 2) (leaf 3)))")[0]
