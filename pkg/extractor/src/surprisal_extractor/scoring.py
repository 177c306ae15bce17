"""Per-token surprisal channels from annotated documents.

For each token the driver emits four channels, all in nats:

  s_global    -log p(token | document prefix), truncated to the last
              max_context tokens via a sliding window when configured
  s_sentence  conditioning restarts at the containing sentence start
  s_edu       conditioning restarts at the containing EDU start
  s_unigram   corpus-fitted context-free distribution

Unit membership comes from char offsets: a token belongs to the unit
containing its first character, so a token straddling a boundary goes
to the earlier unit.  Output rows use the downstream token-file schema
verbatim (JSON Lines, one token per line).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .annotations import AlignmentError, AnnotatedDocument
from .lm import UnigramModel

CHANNEL_MODES = {
    "s_global": "document-prefix",
    "s_sentence": "sentence-prefix",
    "s_edu": "edu-prefix",
    "s_unigram": "unigram",
}
_VALID_MODES = ("document-prefix", "sentence-prefix", "edu-prefix", "unigram")


@dataclass
class ExtractionJob:
    documents: list[AnnotatedDocument]
    backend: object
    channel_modes: dict[str, str] = field(default_factory=lambda: dict(CHANNEL_MODES))
    max_context: int | None = None  # tokens; None = full document prefix
    unigram_alpha: float = 0.5

    def __post_init__(self):
        if set(self.channel_modes) != set(CHANNEL_MODES):
            raise ValueError(f"channel_modes must configure exactly {sorted(CHANNEL_MODES)}")
        for channel, mode in self.channel_modes.items():
            if mode not in _VALID_MODES:
                raise ValueError(f"{channel}: unknown context mode {mode!r}")
        if self.max_context is not None and self.max_context < 2:
            raise ValueError("max_context must be >= 2 tokens")


def _prefix_logprobs(backend, tokens: list[str], max_context: int | None) -> np.ndarray:
    """log p(tok_i | tok_<i) with optional sliding-window truncation.

    Long sequences are rescored in half-window hops so every token keeps
    at least max_context // 2 tokens of context.
    """
    if max_context is None or len(tokens) <= max_context:
        return backend.token_logprobs(tokens)
    half = max_context // 2
    out = np.empty(len(tokens))
    out[:max_context] = backend.token_logprobs(tokens[:max_context])
    start = max_context
    while start < len(tokens):
        stop = min(start + half, len(tokens))
        window = tokens[start - (max_context - (stop - start)):stop]
        out[start:stop] = backend.token_logprobs(window)[-(stop - start):]
        start = stop
    return out


def _per_unit_logprobs(backend, tokens: list[str], unit_ids: list[int],
                       max_context: int | None) -> np.ndarray:
    out = np.empty(len(tokens))
    start = 0
    for i in range(1, len(tokens) + 1):
        if i == len(tokens) or unit_ids[i] != unit_ids[start]:
            out[start:i] = _prefix_logprobs(backend, tokens[start:i], max_context)
            start = i
    return out


def score_document(doc: AnnotatedDocument, job: ExtractionJob,
                   unigram: UnigramModel) -> list[dict]:
    """Token rows for one document, in the downstream token-file schema."""
    spans = job.backend.tokenize(doc.text)
    if not spans:
        raise AlignmentError(f"doc {doc.doc_id!r}: tokenizer produced no tokens")
    tokens = [t for t, _, _ in spans]
    para_ids = [doc.unit_index("paragraph", s) for _, s, _ in spans]
    sent_ids = [doc.unit_index("sentence", s) for _, s, _ in spans]
    edu_ids = [doc.unit_index("edu", s) for _, s, _ in spans]

    mode_values: dict[str, np.ndarray] = {}
    for channel, mode in job.channel_modes.items():
        if mode == "document-prefix":
            vals = _prefix_logprobs(job.backend, tokens, job.max_context)
        elif mode == "sentence-prefix":
            vals = _per_unit_logprobs(job.backend, tokens, sent_ids, job.max_context)
        elif mode == "edu-prefix":
            vals = _per_unit_logprobs(job.backend, tokens, edu_ids, job.max_context)
        else:  # unigram
            vals = np.array([unigram.logprob(t) for t in tokens])
        mode_values[channel] = -vals  # logprob -> surprisal

    rows = []
    for i, (text, start, end) in enumerate(spans):
        rows.append({
            "doc_id": doc.doc_id,
            "token_index": i,
            "text": text,
            "char_len": max(end - start, 1),
            "paragraph_index": para_ids[i],
            "sentence_index": sent_ids[i],
            "edu_index": edu_ids[i],
            "s_global": float(mode_values["s_global"][i]),
            "s_sentence": float(mode_values["s_sentence"][i]),
            "s_edu": float(mode_values["s_edu"][i]),
            "s_unigram": float(mode_values["s_unigram"][i]),
        })
    return rows


def run_job(job: ExtractionJob) -> tuple[list[dict], dict]:
    """Score every document; returns (token rows, manifest)."""
    corpus_tokens = [[t for t, _, _ in job.backend.tokenize(d.text)]
                     for d in job.documents]
    job.backend.fit(corpus_tokens)
    unigram = UnigramModel(alpha=job.unigram_alpha)
    unigram.fit(corpus_tokens)

    rows: list[dict] = []
    for doc in job.documents:
        rows.extend(score_document(doc, job, unigram))
    manifest = {
        "model": job.backend.name,
        "tokenizer_hash": job.backend.tokenizer_hash(),
        "channel_modes": dict(job.channel_modes),
        "truncation": ("none" if job.max_context is None else
                       f"sliding-window(max_context={job.max_context}, "
                       f"hop={job.max_context // 2})"),
        "unigram": f"corpus-fitted additive smoothing (alpha={job.unigram_alpha})",
        "documents": len(job.documents),
        "tokens": len(rows),
    }
    return rows, manifest


def write_token_file(path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def flat_tree_lines(rows: list[dict], unit_field: str = "edu_index") -> list[str]:
    """One flat bracketed tree per document over its units.

    Plumbing for the downstream `validate` interface, which pairs token
    files with tree files; carries no real discourse structure.
    """
    lines = []
    current: str | None = None
    count = 0
    for row in rows:
        if row["doc_id"] != current:
            if current is not None:
                lines.append(_flat_line(count))
            current = row["doc_id"]
            count = 0
        count = max(count, row[unit_field] + 1)
    if current is not None:
        lines.append(_flat_line(count))
    return lines


def _flat_line(n_units: int) -> str:
    if n_units == 1:
        return "(leaf 0)"
    leaves = " ".join(f"(leaf {k})" for k in range(n_units))
    return f"(doc {leaves})"
