import math

import numpy as np
import pytest

from surprisal_extractor.lm import NgramBackend, UnigramModel, regex_tokenize


def test_regex_tokenizer_spans():
    text = "The cat, quickly."
    spans = regex_tokenize(text)
    assert [t for t, _, _ in spans] == ["The", "cat", ",", "quickly", "."]
    for tok, s, e in spans:
        assert text[s:e] == tok


CORPUS = [
    "the cat sat on the mat".split(),
    "the dog sat on the rug".split(),
    "a cat and a dog sat".split(),
]


def test_ngram_requires_fit():
    with pytest.raises(RuntimeError):
        NgramBackend().token_logprobs(["the"])


def test_ngram_logprobs_are_valid():
    lm = NgramBackend(order=3, alpha=0.5)
    lm.fit(CORPUS)
    for sent in CORPUS + ["the zebra sat".split()]:
        lp = lm.token_logprobs(sent)
        assert np.isfinite(lp).all()
        assert (lp < 0).all()  # alpha*(V+1) keeps every p strictly < 1


def test_ngram_conditional_sums_below_one():
    lm = NgramBackend(order=2, alpha=0.5)
    lm.fit(CORPUS)
    for context in ((), ("the",), ("sat",), ("never-seen",)):
        total = sum(math.exp(lm.logprob(w, context)) for w in lm._vocab)
        assert total < 1.0
        # the remaining mass is exactly one unseen-bucket share
        assert total + math.exp(lm.logprob("UNSEEN-TOKEN", context)) <= 1.0 + 1e-12


def test_ngram_uses_counts():
    lm = NgramBackend(order=2, alpha=0.5)
    lm.fit(CORPUS)
    # "the" is followed by cat/dog/mat/rug once each in the corpus
    seen = lm.logprob("cat", ("the",))
    unseen = lm.logprob("sat", ("the",))
    assert seen > unseen


def test_unigram_normalization():
    uni = UnigramModel(alpha=0.5)
    uni.fit(CORPUS)
    total = sum(math.exp(uni.logprob(w)) for w in uni._counts)
    assert total < 1.0
    assert total + math.exp(uni.logprob("UNSEEN")) <= 1.0 + 1e-12
    # exp(-surprisal) over the vocabulary stays a sub-distribution
    surprisals = [-uni.logprob(w) for w in uni._counts]
    assert all(s >= 0 for s in surprisals)


def test_hf_backend_matches_manual_scoring():
    torch = pytest.importorskip("torch")
    transformers = pytest.importorskip("transformers")
    from surprisal_extractor.lm import HFBackend

    words = ["<s>", "the", "cat", "sat", "on", "mat", "."]
    vocab = {w: i for i, w in enumerate(words)}

    class ToyTokenizer:
        def __call__(self, text, return_offsets_mapping=True, add_special_tokens=False):
            spans = regex_tokenize(text)
            return {"input_ids": [vocab[t] for t, _, _ in spans],
                    "offset_mapping": [(s, e) for _, s, e in spans]}

        def convert_ids_to_tokens(self, ids):
            return [words[i] for i in ids]

        def convert_tokens_to_ids(self, tokens):
            return [vocab[t] for t in tokens]

        def get_vocab(self):
            return dict(vocab)

    config = transformers.GPT2Config(
        vocab_size=len(words), n_positions=32, n_embd=16, n_layer=2, n_head=2,
        bos_token_id=0, eos_token_id=0)
    torch.manual_seed(0)
    model = transformers.GPT2LMHeadModel(config)
    backend = HFBackend(model=model, tokenizer=ToyTokenizer(), name="hf:toy")

    tokens = ["the", "cat", "sat", "on", "the", "mat"]
    got = backend.token_logprobs(tokens)

    # manual oracle: feed [BOS] + ids, softmax each position separately
    ids = [vocab[t] for t in tokens]
    inp = torch.tensor([[0] + ids])
    with torch.no_grad():
        logits = model(inp).logits[0]
    for i, tid in enumerate(ids):
        probs = torch.softmax(logits[i], dim=-1)
        assert got[i] == pytest.approx(math.log(float(probs[tid])), abs=1e-5)
    assert (got < 0).all()
