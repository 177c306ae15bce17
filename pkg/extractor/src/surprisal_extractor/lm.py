"""Causal language model backends.

A backend owns its tokenization (annotation offsets are mapped onto
token boundaries downstream) and scores token sequences
autoregressively:

  tokenize(text)        -> list of (token, start, end) char spans
  fit(corpus_tokens)    -> prepare on the corpus being scored (no-op
                           for pretrained models)
  token_logprobs(toks)  -> log p(tok_i | tok_<i) for every position, nats

``NgramBackend`` is the self-contained default: an additive-smoothed
n-gram fitted on the corpus being scored, exactly reproducible and fast
enough for tests.  ``HFBackend`` wraps a local HuggingFace causal LM
behind the same surface (optional; never downloads anything).  The
context-free unigram channel is handled by the scoring driver, not the
backends.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter

import numpy as np

TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def regex_tokenize(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(0), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


class NgramBackend:
    """Additive-smoothed n-gram LM fitted on the scored corpus.

    p(w | h) = (c(h, w) + alpha) / (c(h) + alpha * (V + 1)); the +1
    reserves smoothing mass for unseen tokens, so the distribution sums
    to < 1 over the known vocabulary and never to more than 1 overall.
    Contexts are truncated to the last order-1 tokens.
    """

    def __init__(self, order: int = 3, alpha: float = 0.5):
        if order < 1:
            raise ValueError("order must be >= 1")
        if alpha <= 0:
            raise ValueError("alpha must be > 0")
        self.order = order
        self.alpha = alpha
        self.name = f"ngram:order={order},alpha={alpha}"
        self._gram_counts: Counter = Counter()
        self._context_counts: Counter = Counter()
        self._vocab: set[str] = set()
        self._fitted = False

    def tokenize(self, text: str) -> list[tuple[str, int, int]]:
        return regex_tokenize(text)

    def tokenizer_hash(self) -> str:
        return hashlib.sha256(TOKEN_RE.pattern.encode()).hexdigest()[:16]

    def fit(self, corpus_tokens: list[list[str]]) -> None:
        for tokens in corpus_tokens:
            self._vocab.update(tokens)
            for i, tok in enumerate(tokens):
                for k in range(min(self.order - 1, i) + 1):
                    h = tuple(tokens[i - k:i])
                    self._gram_counts[h + (tok,)] += 1
                    self._context_counts[h] += 1
        self._fitted = True

    @property
    def vocab_size(self) -> int:
        return len(self._vocab)

    def logprob(self, token: str, context: tuple[str, ...]) -> float:
        num = self._gram_counts.get(context + (token,), 0) + self.alpha
        den = self._context_counts.get(context, 0) + self.alpha * (self.vocab_size + 1)
        return math.log(num) - math.log(den)

    def token_logprobs(self, tokens: list[str]) -> np.ndarray:
        if not self._fitted:
            raise RuntimeError("backend must be fitted before scoring")
        out = np.empty(len(tokens))
        for i, tok in enumerate(tokens):
            h = tuple(tokens[max(0, i - self.order + 1):i])
            out[i] = self.logprob(tok, h)
        return out


class UnigramModel:
    """Corpus-fitted context-free distribution with additive smoothing.

    Shares the +1 unseen-token bucket convention with NgramBackend, so
    exp(-surprisal) sums to at most 1 over the vocabulary.
    """

    def __init__(self, alpha: float = 0.5):
        self.alpha = alpha
        self._counts: Counter = Counter()
        self._total = 0

    def fit(self, corpus_tokens: list[list[str]]) -> None:
        for tokens in corpus_tokens:
            self._counts.update(tokens)
            self._total += len(tokens)

    @property
    def vocab_size(self) -> int:
        return len(self._counts)

    def logprob(self, token: str) -> float:
        num = self._counts.get(token, 0) + self.alpha
        den = self._total + self.alpha * (self.vocab_size + 1)
        return math.log(num) - math.log(den)


class HFBackend:
    """Local HuggingFace causal LM (pass loaded objects or a local path).

    The first token is scored by prepending the model's BOS (or EOS)
    token, so every position has a proper conditional distribution.
    """

    def __init__(self, model=None, tokenizer=None, model_path: str | None = None,
                 device: str = "cpu", name: str | None = None):
        import torch  # deferred; only needed for this backend

        self._torch = torch
        if model is None or tokenizer is None:
            from transformers import AutoModelForCausalLM, AutoTokenizer

            if not model_path:
                raise ValueError("need a local model_path or (model, tokenizer)")
            tokenizer = AutoTokenizer.from_pretrained(model_path)
            model = AutoModelForCausalLM.from_pretrained(model_path)
        self.model = model.to(device).eval()
        self.tokenizer = tokenizer
        self.device = device
        self.name = name or f"hf:{model_path or model.__class__.__name__}"
        cfg = self.model.config
        self._bos = cfg.bos_token_id if cfg.bos_token_id is not None else cfg.eos_token_id
        if self._bos is None:
            raise ValueError("model has neither BOS nor EOS; cannot score the first token")

    def tokenize(self, text: str) -> list[tuple[str, int, int]]:
        enc = self.tokenizer(text, return_offsets_mapping=True, add_special_tokens=False)
        toks = self.tokenizer.convert_ids_to_tokens(enc["input_ids"])
        return [(t, s, e) for t, (s, e) in zip(toks, enc["offset_mapping"])]

    def tokenizer_hash(self) -> str:
        payload = repr(sorted(self.tokenizer.get_vocab().items())).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def fit(self, corpus_tokens) -> None:  # pretrained; nothing to fit
        pass

    def token_logprobs(self, tokens: list[str]) -> np.ndarray:
        torch = self._torch
        ids = self.tokenizer.convert_tokens_to_ids(tokens)
        inp = torch.tensor([[self._bos] + ids], device=self.device)
        with torch.no_grad():
            logits = self.model(inp).logits[0].float()
        logprobs = torch.log_softmax(logits, dim=-1)
        pos = torch.arange(len(ids))
        return logprobs[pos, torch.tensor(ids)].cpu().numpy()
