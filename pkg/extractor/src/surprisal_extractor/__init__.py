"""Per-token surprisal channels from annotated text with a causal LM.

Produces the token-file JSON Lines format consumed by the contour
analysis toolkit: document-prefix, sentence-prefix, EDU-prefix, and
unigram surprisal per token, plus a manifest recording the model,
truncation policy, and tokenizer hash.
"""

__version__ = "0.1.0"

from .annotations import AlignmentError, AnnotatedDocument, load_documents
from .lm import HFBackend, NgramBackend, UnigramModel
from .scoring import CHANNEL_MODES, ExtractionJob, run_job, score_document

__all__ = [
    "AlignmentError",
    "AnnotatedDocument",
    "CHANNEL_MODES",
    "ExtractionJob",
    "HFBackend",
    "NgramBackend",
    "UnigramModel",
    "load_documents",
    "run_job",
    "score_document",
]
