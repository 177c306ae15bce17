"""Discourse trees and aligned token streams.

Two tree families are handled: deeply nested discourse trees whose leaves
are elementary discourse units ("rst") and the shallow document ->
paragraph -> sentence hierarchy of ordinary prose ("prose").  Trees are
read from a bracketed s-expression format, one tree per line, with
``(leaf k)`` terminals; tokens come from a JSON Lines file, one record
per token.  Everything here is treated as immutable after construction
and all operations are pure functions, so trees and token lists can be
shared freely across documents and worker processes.
"""

from __future__ import annotations

import json
import math
import re
import warnings
from dataclasses import dataclass, field, fields


class ValidationError(ValueError):
    """An input violates a structural invariant (bad tree, bad tokens)."""


class TreeParseError(ValidationError):
    """Malformed tree syntax, with 1-based line/column position."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


RST, PROSE = "rst", "prose"
LEAF_MARKER = "leaf"


@dataclass
class TreeNode:
    """One node of an ordered rooted tree.

    ``leaf_index`` is set exactly on leaves and indexes into the
    document's unit sequence (EDUs for rst trees, sentences for prose
    trees).  ``label`` carries relation/nuclearity metadata when the
    source annotation had any; modeling code never looks at it.
    """

    id: int
    label: str | None = None
    children: list["TreeNode"] = field(default_factory=list)
    leaf_index: int | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class DiscourseTree:
    root: TreeNode
    kind: str  # RST or PROSE
    binarized: bool = False
    leaf_count: int = 0

    def leaves(self) -> list[TreeNode]:
        return [n for n in preorder(self.root) if n.is_leaf]

    def nodes(self) -> list[TreeNode]:
        return preorder(self.root)


def preorder(root: TreeNode) -> list[TreeNode]:
    """All nodes in depth-first left-to-right order (iterative; deep
    right-binarized trees would blow the recursion limit otherwise)."""
    out = []
    stack = [root]
    while stack:
        node = stack.pop()
        out.append(node)
        stack.extend(reversed(node.children))
    return out


def tree_depth(root: TreeNode) -> int:
    """Number of node levels on the longest root-to-leaf path."""
    best = 0
    stack = [(root, 1)]
    while stack:
        node, d = stack.pop()
        if node.is_leaf:
            best = max(best, d)
        else:
            stack.extend((c, d + 1) for c in node.children)
    return best


def _renumber(root: TreeNode) -> None:
    for i, node in enumerate(preorder(root)):
        node.id = i


def _validate_leaf_indices(root: TreeNode, where: str) -> int:
    seen = [n.leaf_index for n in preorder(root) if n.is_leaf]
    if any(ix is None for ix in seen):
        raise ValidationError(f"{where}: leaf without leaf index")
    if seen != list(range(len(seen))):
        raise ValidationError(
            f"{where}: leaf indices must be 0..{len(seen) - 1} in "
            f"left-to-right order, got {seen}"
        )
    return len(seen)


def validate_tree(tree: DiscourseTree, where: str = "tree") -> None:
    """Check structural invariants; raises ValidationError."""
    n_leaves = _validate_leaf_indices(tree.root, where)
    if n_leaves != tree.leaf_count:
        raise ValidationError(
            f"{where}: leaf_count {tree.leaf_count} != actual {n_leaves}"
        )
    for node in preorder(tree.root):
        if not node.is_leaf and node.leaf_index is not None:
            raise ValidationError(f"{where}: internal node {node.id} has a leaf index")
        if tree.binarized and not node.is_leaf and len(node.children) != 2:
            raise ValidationError(
                f"{where}: marked binarized but node {node.id} has "
                f"{len(node.children)} children"
            )
    if tree.kind == PROSE and not tree.binarized and tree_depth(tree.root) > 3:
        raise ValidationError(f"{where}: prose tree deeper than document/paragraph/sentence")


# ---------------------------------------------------------------------------
# Bracketed s-expression trees: `(label child ...)` with `(leaf k)` terminals.

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def parse_tree_line(line: str, lineno: int = 1, kind: str = RST) -> DiscourseTree:
    toks = [(m.group(0), m.start() + 1) for m in _TOKEN_RE.finditer(line)]
    if not toks:
        raise TreeParseError("empty tree expression", lineno, 1)

    def fail(msg, col):
        raise TreeParseError(msg, lineno, col)

    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, len(line) + 1)

    def parse_node() -> TreeNode:
        nonlocal pos
        tok, col = peek()
        if tok != "(":
            fail(f"expected '(', got {tok!r}", col)
        pos += 1
        label, col = peek()
        if label in (None, "(", ")"):
            fail("expected node label", col)
        pos += 1
        if label == LEAF_MARKER:
            num, ncol = peek()
            if num is None or not re.fullmatch(r"-?\d+", num):
                fail("leaf node needs an integer index", ncol)
            pos += 1
            tok, col = peek()
            if tok != ")":
                fail("leaf node takes exactly one index", col)
            pos += 1
            return TreeNode(id=-1, leaf_index=int(num))
        children = []
        while True:
            tok, col = peek()
            if tok == ")":
                pos += 1
                break
            if tok is None:
                fail("unbalanced '(': missing ')'", col)
            if tok != "(":
                fail(f"expected child '(' or ')', got {tok!r}", col)
            children.append(parse_node())
        if not children:
            fail(f"internal node {label!r} has no children", col)
        return TreeNode(id=-1, label=label, children=children)

    root = parse_node()
    tok, col = peek()
    if tok is not None:
        fail(f"trailing content {tok!r} after tree", col)

    n_leaves = _validate_leaf_indices(root, f"line {lineno}")
    _renumber(root)
    tree = DiscourseTree(root=root, kind=kind, binarized=False, leaf_count=n_leaves)
    validate_tree(tree, where=f"line {lineno}")
    return tree


def parse_tree_string(text: str, kind: str = RST) -> list[DiscourseTree]:
    trees = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        trees.append(parse_tree_line(line, lineno, kind=kind))
    return trees


def parse_tree_file(path, kind: str = RST) -> list[DiscourseTree]:
    """Read one tree per non-comment line from a UTF-8 text file."""
    with open(path, encoding="utf-8") as fh:
        return parse_tree_string(fh.read(), kind=kind)


def format_tree(tree: DiscourseTree) -> str:
    """Inverse of the parser, for writing tree files."""
    parts: list[str] = []

    def emit(node: TreeNode) -> str:
        if node.is_leaf:
            return f"({LEAF_MARKER} {node.leaf_index})"
        label = node.label if node.label is not None else "n"
        return "(" + " ".join([label] + [emit(c) for c in node.children]) + ")"

    # iterative would be safer for pathological depth, but write-side trees
    # are the un-binarized originals, which stay shallow in practice
    parts.append(emit(tree.root))
    return "".join(parts)


def write_tree_file(path, trees) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tree in trees:
            fh.write(format_tree(tree) + "\n")


# ---------------------------------------------------------------------------
# Binarization.

def right_binarize(tree: DiscourseTree) -> DiscourseTree:
    """Right-branching binarization.

    A node with children c1..cn (n > 2) becomes (c1, aux(c2..cn)),
    recursively; unary internal nodes are collapsed into their child so
    that transition counts do not depend on semantically empty nodes.
    Leaf order is preserved exactly.  Already-binary trees come back
    structurally identical (fresh copy).
    """
    built: dict[int, TreeNode] = {}
    stack: list[tuple[TreeNode, bool]] = [(tree.root, False)]
    while stack:
        node, expanded = stack.pop()
        if node.is_leaf:
            built[id(node)] = TreeNode(id=-1, label=node.label, leaf_index=node.leaf_index)
        elif not expanded:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
        else:
            kids = [built[id(c)] for c in node.children]
            if len(kids) == 1:
                built[id(node)] = kids[0]
                continue
            # fold from the right: the auxiliary spine carries no label
            acc = kids[-1]
            for left in reversed(kids[1:-1]):
                acc = TreeNode(id=-1, label=None, children=[left, acc])
            built[id(node)] = TreeNode(id=-1, label=node.label, children=[kids[0], acc])

    root = built[id(tree.root)]
    _renumber(root)
    out = DiscourseTree(root=root, kind=tree.kind, binarized=True, leaf_count=tree.leaf_count)
    validate_tree(out, where="binarized tree")
    return out


# ---------------------------------------------------------------------------
# Token records.

@dataclass
class TokenRecord:
    """One granular unit with containment ids and surprisal channels.

    Surprisal channels are in nats.  ``s_global`` conditions on the full
    document prefix; ``s_sentence``/``s_edu`` restart the context at the
    containing unit; ``s_unigram`` is context-free.
    """

    doc_id: str
    token_index: int
    text: str
    char_len: int
    paragraph_index: int
    sentence_index: int
    edu_index: int
    s_global: float
    s_sentence: float
    s_edu: float
    s_unigram: float


TOKEN_FIELDS = tuple(f.name for f in fields(TokenRecord))
_SURPRISAL_FIELDS = ("s_global", "s_sentence", "s_edu", "s_unigram")
_ID_FIELDS = ("paragraph_index", "sentence_index", "edu_index")


def validate_tokens(tokens: list[TokenRecord], doc_id: str | None = None) -> None:
    """Per-document invariants: contiguous token indices, non-decreasing
    containment ids, finite non-negative surprisal, positive char_len."""
    if not tokens:
        raise ValidationError("empty document")
    doc = doc_id if doc_id is not None else tokens[0].doc_id
    prev = None
    for i, tok in enumerate(tokens):
        where = f"doc {doc!r}, token {i}"
        if tok.doc_id != doc:
            raise ValidationError(f"{where}: doc_id {tok.doc_id!r} mixed into one document")
        if tok.token_index != i:
            raise ValidationError(f"{where}: token_index {tok.token_index}, expected {i}")
        if tok.char_len < 1:
            raise ValidationError(f"{where}: char_len must be >= 1")
        for name in _SURPRISAL_FIELDS:
            v = getattr(tok, name)
            if not math.isfinite(v) or v < 0:
                raise ValidationError(f"{where}: {name}={v!r} not finite and non-negative")
        if prev is not None:
            for name in _ID_FIELDS:
                if getattr(tok, name) < getattr(prev, name):
                    raise ValidationError(f"{where}: {name} decreases")
        prev = tok
    # containment ids must also be gapless so they can index units directly
    for name in _ID_FIELDS:
        ids = sorted({getattr(t, name) for t in tokens})
        if ids != list(range(len(ids))):
            raise ValidationError(f"doc {doc!r}: {name} values have gaps: {ids}")


def load_token_file(path, strict: bool = False) -> dict[str, list[TokenRecord]]:
    """Read a JSON Lines token file into per-document lists (file order).

    Unknown fields are rejected in strict mode and ignored with a warning
    otherwise; missing fields are always an error.
    """
    docs: dict[str, list[TokenRecord]] = {}
    warned: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise ValidationError(f"{path}:{lineno}: expected a JSON object")
            extra = set(obj) - set(TOKEN_FIELDS)
            if extra:
                if strict:
                    raise ValidationError(
                        f"{path}:{lineno}: unknown fields {sorted(extra)} (strict mode)"
                    )
                for name in sorted(extra - warned):
                    warnings.warn(f"{path}: ignoring unknown token field {name!r}")
                    warned |= extra
            missing = set(TOKEN_FIELDS) - set(obj)
            if missing:
                raise ValidationError(f"{path}:{lineno}: missing fields {sorted(missing)}")
            try:
                rec = TokenRecord(
                    doc_id=str(obj["doc_id"]),
                    token_index=int(obj["token_index"]),
                    text=str(obj["text"]),
                    char_len=int(obj["char_len"]),
                    paragraph_index=int(obj["paragraph_index"]),
                    sentence_index=int(obj["sentence_index"]),
                    edu_index=int(obj["edu_index"]),
                    s_global=float(obj["s_global"]),
                    s_sentence=float(obj["s_sentence"]),
                    s_edu=float(obj["s_edu"]),
                    s_unigram=float(obj["s_unigram"]),
                )
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad field value: {exc}") from exc
            docs.setdefault(rec.doc_id, []).append(rec)
    for doc_id, tokens in docs.items():
        validate_tokens(tokens, doc_id)
    return docs


def write_token_file(path, docs: dict[str, list[TokenRecord]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tokens in docs.values():
            for tok in tokens:
                fh.write(json.dumps(tok.__dict__, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Prose trees and token/tree alignment.

def build_prose_tree(tokens: list[TokenRecord]) -> DiscourseTree:
    """Document -> paragraphs -> sentence leaves, from containment ids.

    Leaves carry the document-global sentence index.  A sentence whose
    tokens appear under two paragraphs is rejected.
    """
    if not tokens:
        raise ValidationError("empty token list")
    sent_para: dict[int, int] = {}
    paragraphs: dict[int, list[int]] = {}
    for tok in tokens:
        p = sent_para.setdefault(tok.sentence_index, tok.paragraph_index)
        if p != tok.paragraph_index:
            raise ValidationError(
                f"doc {tokens[0].doc_id!r}: sentence {tok.sentence_index} spans "
                f"paragraphs {p} and {tok.paragraph_index}"
            )
        sents = paragraphs.setdefault(tok.paragraph_index, [])
        if tok.sentence_index not in sents:
            sents.append(tok.sentence_index)
    para_nodes = []
    for pidx in sorted(paragraphs):
        leaves = [TreeNode(id=-1, leaf_index=s) for s in paragraphs[pidx]]
        para_nodes.append(TreeNode(id=-1, label="para", children=leaves))
    root = TreeNode(id=-1, label="doc", children=para_nodes)
    _renumber(root)
    tree = DiscourseTree(root=root, kind=PROSE, binarized=False,
                         leaf_count=len(sent_para))
    validate_tree(tree, where=f"prose tree for doc {tokens[0].doc_id!r}")
    return tree


def leaf_spans(tree: DiscourseTree, tokens: list[TokenRecord]) -> dict[int, tuple[int, int]]:
    """Half-open token interval covered by every node, keyed by node id.

    Tree leaves index the document's EDUs (rst) or sentences (prose);
    a parent's interval is the union of its children's.
    """
    key = "edu_index" if tree.kind == RST else "sentence_index"
    unit_range: dict[int, list[int]] = {}
    for i, tok in enumerate(tokens):
        uid = getattr(tok, key)
        rng = unit_range.setdefault(uid, [i, i + 1])
        if i != rng[1] and i > rng[0]:
            raise ValidationError(f"{key} {uid} covers non-contiguous tokens")
        rng[1] = i + 1

    spans: dict[int, tuple[int, int]] = {}
    stack: list[tuple[TreeNode, bool]] = [(tree.root, False)]
    while stack:
        node, expanded = stack.pop()
        if node.is_leaf:
            if node.leaf_index not in unit_range:
                raise ValidationError(
                    f"tree leaf {node.leaf_index} has no tokens ({key})"
                )
            spans[node.id] = tuple(unit_range[node.leaf_index])
        elif not expanded:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
        else:
            lo = spans[node.children[0].id][0]
            hi = spans[node.children[-1].id][1]
            for a, b in zip(node.children, node.children[1:]):
                if spans[a.id][1] != spans[b.id][0]:
                    raise ValidationError(
                        f"children of node {node.id} cover non-adjacent intervals"
                    )
            spans[node.id] = (lo, hi)
    root_lo, root_hi = spans[tree.root.id]
    if root_lo != 0 or root_hi != len(tokens):
        raise ValidationError(
            f"tree covers tokens [{root_lo},{root_hi}) but document has {len(tokens)}"
        )
    return spans
