"""Synthetic corpora with planted regression signal.

Generates token files plus matching RST-style and prose trees where the
global surprisal channel is a linear function of chosen predictor
columns plus Gaussian noise.  Predictors are computed with this
package's own extractors, so a planted coefficient is recoverable by
the downstream regression exactly when the pipeline is self-consistent.
Local and unigram channels are offset from the global channel with
seeded jitter so the PMI dependents are non-degenerate.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from .features import PREDICTOR_COLUMNS, document_features
from .treebank import (
    DiscourseTree,
    RST,
    TokenRecord,
    TreeNode,
    ValidationError,
    build_prose_tree,
    preorder,
)

_REL_LABELS = ("elab", "attr", "joint", "contrast", "cause")
# prev_surprisal is derived from the channel being generated, so it is
# not a valid effect target
PLANTABLE = ("char_len",) + tuple(PREDICTOR_COLUMNS)


@dataclass
class SynthSpec:
    documents: int = 50
    paragraph_range: tuple[int, int] = (2, 4)       # per document
    sentence_range: tuple[int, int] = (2, 4)        # per paragraph
    token_range: tuple[int, int] = (4, 10)          # per sentence
    edu_range: tuple[int, int] = (1, 2)             # per sentence
    max_rst_arity: int = 4
    intercept: float = 10.0
    effects: dict[str, float] = field(default_factory=dict)
    noise_sd: float = 1.0
    sentence_offset: float = 1.0
    edu_offset: float = 1.5
    unigram_level: float = 12.0
    seed: int = 0

    def __post_init__(self):
        if self.documents < 1:
            raise ValueError("documents must be >= 1")
        if not self.noise_sd > 0:
            raise ValueError("noise_sd must be > 0")
        for lo, hi in (self.paragraph_range, self.sentence_range,
                       self.token_range, self.edu_range):
            if not (1 <= lo <= hi):
                raise ValueError("ranges must satisfy 1 <= low <= high")
        if self.max_rst_arity < 2:
            raise ValueError("max_rst_arity must be >= 2")
        for name, coef in self.effects.items():
            if name not in PLANTABLE:
                raise ValueError(f"cannot plant an effect on {name!r}")
            if not np.isfinite(coef):
                raise ValueError(f"effect on {name!r} is not finite")


def random_rst_tree(rng: np.random.Generator, n_leaves: int,
                    max_arity: int = 4) -> DiscourseTree:
    """Random ordered tree over EDU leaves 0..n_leaves-1."""
    def build(lo: int, hi: int) -> TreeNode:
        size = hi - lo
        if size == 1:
            return TreeNode(id=-1, leaf_index=lo)
        k = int(rng.integers(2, min(max_arity, size) + 1))
        cuts = lo + 1 + rng.choice(size - 1, size=k - 1, replace=False)
        bounds = [lo] + sorted(int(c) for c in cuts) + [hi]
        kids = [build(a, b) for a, b in zip(bounds, bounds[1:])]
        return TreeNode(id=-1, label=str(rng.choice(_REL_LABELS)), children=kids)

    root = build(0, n_leaves)
    for i, node in enumerate(preorder(root)):
        node.id = i
    return DiscourseTree(root=root, kind=RST, binarized=False, leaf_count=n_leaves)


def _random_word(rng: np.random.Generator) -> str:
    length = int(rng.integers(2, 10))
    letters = rng.integers(0, 26, size=length)
    return "".join(string.ascii_lowercase[i] for i in letters)


def generate_document(spec: SynthSpec, doc_index: int):
    """One document: tokens with planted channels, its RST and prose trees."""
    rng = np.random.default_rng([spec.seed, doc_index])
    doc_id = f"doc{doc_index:04d}"

    tokens: list[TokenRecord] = []
    sent_idx = edu_idx = 0
    n_paragraphs = int(rng.integers(spec.paragraph_range[0], spec.paragraph_range[1] + 1))
    for p in range(n_paragraphs):
        n_sents = int(rng.integers(spec.sentence_range[0], spec.sentence_range[1] + 1))
        for _ in range(n_sents):
            n_tok = int(rng.integers(spec.token_range[0], spec.token_range[1] + 1))
            n_edu = int(rng.integers(spec.edu_range[0], min(spec.edu_range[1], n_tok) + 1))
            cuts = (1 + rng.choice(n_tok - 1, size=n_edu - 1, replace=False)
                    if n_edu > 1 else np.array([], dtype=int))
            bounds = [0] + sorted(int(c) for c in cuts) + [n_tok]
            for e, (a, b) in enumerate(zip(bounds, bounds[1:])):
                for _ in range(a, b):
                    word = _random_word(rng)
                    tokens.append(TokenRecord(
                        doc_id=doc_id, token_index=len(tokens), text=word,
                        char_len=len(word), paragraph_index=p,
                        sentence_index=sent_idx, edu_index=edu_idx + e,
                        s_global=0.0, s_sentence=0.0, s_edu=0.0, s_unigram=0.0,
                    ))
            edu_idx += n_edu
            sent_idx += 1

    rst_tree = random_rst_tree(rng, edu_idx, spec.max_rst_arity)
    prose_tree = build_prose_tree(tokens)

    cols = document_features(tokens, rst_tree, prose_tree)
    n = len(tokens)
    y = np.full(n, spec.intercept)
    for name, coef in spec.effects.items():
        y = y + coef * cols[name]
    y = y + rng.normal(0.0, spec.noise_sd, n)
    s_global = np.maximum(y, 0.0)  # surprisal cannot be negative
    s_sentence = s_global + np.maximum(rng.normal(spec.sentence_offset, 0.25, n), 0.0)
    s_edu = s_global + np.maximum(rng.normal(spec.edu_offset, 0.25, n), 0.0)
    s_unigram = np.maximum(rng.normal(spec.unigram_level, 1.0, n), 0.0)
    for i, tok in enumerate(tokens):
        tok.s_global = float(s_global[i])
        tok.s_sentence = float(s_sentence[i])
        tok.s_edu = float(s_edu[i])
        tok.s_unigram = float(s_unigram[i])
    return tokens, rst_tree, prose_tree


def generate_corpus(spec: SynthSpec):
    """All documents described by a SynthSpec; returns (corpus, rst_trees, prose_trees)."""
    corpus: dict[str, list[TokenRecord]] = {}
    rst_trees: dict[str, DiscourseTree] = {}
    prose_trees: dict[str, DiscourseTree] = {}
    for di in range(spec.documents):
        tokens, rst, prose = generate_document(spec, di)
        if not tokens:
            raise ValidationError("generated an empty document")
        corpus[tokens[0].doc_id] = tokens
        rst_trees[tokens[0].doc_id] = rst
        prose_trees[tokens[0].doc_id] = prose
    return corpus, rst_trees, prose_trees
