"""Annotated documents: raw text plus unit boundaries as char offsets.

Breaks mark where a new unit starts (offset 0 is implicit, so a
document with no breaks is one paragraph/sentence/EDU).  EDU breaks
need not nest inside sentences -- rhetorical segmentation sometimes
crosses sentence punctuation -- so violations are flagged with a
warning, never rejected.
"""

from __future__ import annotations

import bisect
import json
import warnings
from dataclasses import dataclass, field


class AlignmentError(ValueError):
    """Annotations do not line up with the text or its tokenization."""


@dataclass
class AnnotatedDocument:
    doc_id: str
    text: str
    paragraph_breaks: list[int] = field(default_factory=list)
    sentence_breaks: list[int] = field(default_factory=list)
    edu_breaks: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.text:
            raise AlignmentError(f"doc {self.doc_id!r}: empty text")
        for name in ("paragraph_breaks", "sentence_breaks", "edu_breaks"):
            breaks = getattr(self, name)
            if any(b <= 0 or b >= len(self.text) for b in breaks):
                raise AlignmentError(
                    f"doc {self.doc_id!r}: {name} must lie strictly inside the text")
            if sorted(set(breaks)) != list(breaks):
                raise AlignmentError(
                    f"doc {self.doc_id!r}: {name} must be strictly ascending")
        self._warn_nesting()

    def _warn_nesting(self):
        # every coarser break should coincide with a finer one
        pairs = [("paragraph_breaks", "sentence_breaks"),
                 ("sentence_breaks", "edu_breaks")]
        for coarse, fine in pairs:
            missing = set(getattr(self, coarse)) - set(getattr(self, fine))
            if missing:
                warnings.warn(
                    f"doc {self.doc_id!r}: {coarse} at {sorted(missing)} do not "
                    f"align with any of the {fine}; units will cross boundaries")

    def unit_index(self, kind: str, offset: int) -> int:
        """0-based unit id containing a char offset (by unit start)."""
        breaks = getattr(self, f"{kind}_breaks")
        return bisect.bisect_right(breaks, offset)


def load_documents(path) -> list[AnnotatedDocument]:
    """JSON Lines, one annotated document per line."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AlignmentError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            try:
                docs.append(AnnotatedDocument(
                    doc_id=str(obj["doc_id"]), text=str(obj["text"]),
                    paragraph_breaks=list(obj.get("paragraph_breaks", [])),
                    sentence_breaks=list(obj.get("sentence_breaks", [])),
                    edu_breaks=list(obj.get("edu_breaks", [])),
                ))
            except KeyError as exc:
                raise AlignmentError(f"{path}:{lineno}: missing field {exc}") from exc
    if not docs:
        raise AlignmentError(f"{path}: no documents")
    return docs
