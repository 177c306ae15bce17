"""Per-token dependent variables computed from surprisal channels.

Four families: raw document surprisal, its centered rolling averages
(window 3/5/7, shrinking at document edges), and two pointwise mutual
information variants obtained as channel differences.  Each series has
one value per token, in document order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .treebank import TokenRecord, ValidationError

ROLLING_WINDOWS = (3, 5, 7)
DEPENDENT_KINDS = (
    "doc_surprisal",
    "rolling_avg_3",
    "rolling_avg_5",
    "rolling_avg_7",
    "pmi_unigram",
    "pmi_sentence",
    "pmi_edu",
)


@dataclass
class DependentSeries:
    kind: str
    values: np.ndarray  # float64, one per token


def _channel(tokens: list[TokenRecord], name: str) -> np.ndarray:
    if not tokens:
        raise ValidationError("empty document")
    return np.array([getattr(t, name) for t in tokens], dtype=np.float64)


def doc_surprisal(tokens: list[TokenRecord]) -> DependentSeries:
    """Surprisal conditioned on the full preceding document context."""
    return DependentSeries("doc_surprisal", _channel(tokens, "s_global"))


def rolling_average(series: DependentSeries, n: int, strict: bool = True) -> DependentSeries:
    """Centered window mean; the window is clipped at document bounds.

    value[i] = mean(series[max(0, i-h) : i+h+1]) with h = n//2.
    """
    if n % 2 != 1 or n < 1:
        raise ValueError(f"window must be odd and positive, got {n}")
    if strict and n not in ROLLING_WINDOWS:
        raise ValueError(f"window must be one of {ROLLING_WINDOWS}, got {n}")
    x = series.values
    h = n // 2
    csum = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(len(x))
    lo = np.maximum(idx - h, 0)
    hi = np.minimum(idx + h + 1, len(x))
    vals = (csum[hi] - csum[lo]) / (hi - lo)
    return DependentSeries(f"rolling_avg_{n}", vals)


def pmi_unigram(tokens: list[TokenRecord]) -> DependentSeries:
    """Association of a token with its document prefix vs. no context.

    Computed as s_global - s_unigram; positive values mean the document
    context made the token *more* surprising than its unigram baseline.
    """
    return DependentSeries(
        "pmi_unigram", _channel(tokens, "s_global") - _channel(tokens, "s_unigram")
    )


def pmi_local(tokens: list[TokenRecord], local: str) -> DependentSeries:
    """Association with the document prefix given a local context.

    ``local`` restarts the conditioning at the current sentence or EDU;
    since the document prefix subsumes the local one, the value reduces
    to the channel difference s_global - s_local.
    """
    if local not in ("sentence", "edu"):
        raise ValueError(f"local context must be 'sentence' or 'edu', got {local!r}")
    return DependentSeries(
        f"pmi_{local}", _channel(tokens, "s_global") - _channel(tokens, f"s_{local}")
    )


def compute_dependent(tokens: list[TokenRecord], kind: str) -> DependentSeries:
    if kind == "doc_surprisal":
        return doc_surprisal(tokens)
    if kind.startswith("rolling_avg_"):
        return rolling_average(doc_surprisal(tokens), int(kind.rsplit("_", 1)[1]))
    if kind == "pmi_unigram":
        return pmi_unigram(tokens)
    if kind in ("pmi_sentence", "pmi_edu"):
        return pmi_local(tokens, kind.split("_", 1)[1])
    raise ValueError(f"unknown dependent kind {kind!r}")
