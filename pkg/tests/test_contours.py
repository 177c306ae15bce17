import numpy as np
import pytest

from helpers import make_tokens
from infocontours.contours import (
    DEPENDENT_KINDS,
    DependentSeries,
    compute_dependent,
    doc_surprisal,
    pmi_local,
    pmi_unigram,
    rolling_average,
)
from infocontours.treebank import ValidationError


def brute_force_rolling(x, n):
    """Independent windowed mean with edge clipping."""
    h = n // 2
    out = []
    for i in range(len(x)):
        window = x[max(0, i - h):min(len(x), i + h + 1)]
        out.append(sum(window) / len(window))
    return np.array(out)


def test_doc_surprisal_is_identity_on_channel():
    tokens = make_tokens("d", [0, 0], [0, 0], [0, 1], s_global=[2.0, 3.0])
    assert doc_surprisal(tokens).values.tolist() == [2.0, 3.0]


def test_empty_document_rejected():
    with pytest.raises(ValidationError):
        doc_surprisal([])


def test_rolling_small_example():
    s = DependentSeries("doc_surprisal", np.array([1.0, 2, 3, 4, 5]))
    assert rolling_average(s, 3).values.tolist() == [1.5, 2, 3, 4, 4.5]


def test_rolling_constant_series():
    s = DependentSeries("doc_surprisal", np.full(17, 3.25))
    for n in (3, 5, 7):
        assert np.array_equal(rolling_average(s, n).values, s.values)


def test_rolling_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(30):
        x = rng.uniform(0, 20, size=int(rng.integers(1, 40)))
        s = DependentSeries("doc_surprisal", x)
        for n in (3, 5, 7):
            got = rolling_average(s, n).values
            want = brute_force_rolling(list(x), n)
            assert np.abs(got - want).max() <= 1e-12


def test_rolling_window_validation():
    s = DependentSeries("doc_surprisal", np.arange(5.0))
    with pytest.raises(ValueError):
        rolling_average(s, 4)
    with pytest.raises(ValueError):
        rolling_average(s, 9)  # strict by default
    assert np.array_equal(rolling_average(s, 9, strict=False).values,
                          brute_force_rolling(list(s.values), 9))
    # n=1 degenerate: identity, and mean preserved exactly
    out = rolling_average(s, 1, strict=False)
    assert np.array_equal(out.values, s.values)
    assert abs(out.values.mean() - s.values.mean()) <= 1e-9


def test_rolling_mean_shift_is_bounded_by_edge_effects():
    rng = np.random.default_rng(1)
    for n in (3, 5, 7):
        for _ in range(20):
            x = rng.uniform(0, 10, size=int(rng.integers(n, 60)))
            s = DependentSeries("doc_surprisal", x)
            smoothed = rolling_average(s, n).values
            assert abs(smoothed.mean() - x.mean()) <= (n / len(x)) * np.abs(x).max()


def test_pmi_unigram_is_channel_difference():
    tokens = make_tokens("d", [0], [0], [0], s_global=[5.0], s_unigram=[2.0])
    assert pmi_unigram(tokens).values.tolist() == [3.0]
    tokens = make_tokens("d", [0, 0], [0, 0], [0, 1],
                         s_global=[4.0, 6.0], s_unigram=[4.0, 6.0])
    assert pmi_unigram(tokens).values.tolist() == [0.0, 0.0]


def test_pmi_local_variants():
    tokens = make_tokens("d", [0, 0], [0, 0], [0, 1],
                         s_global=[4.0, 6.0], s_edu=[4.0, 2.0])
    assert pmi_local(tokens, "edu").values.tolist() == [0.0, 4.0]
    # document start: identical contexts, identical channels, zero pmi
    assert pmi_local(tokens, "edu").values[0] == 0.0
    with pytest.raises(ValueError):
        pmi_local(tokens, "paragraph")


def test_pmi_variants_coincide_when_sentences_are_single_edus():
    rng = np.random.default_rng(2)
    g = rng.uniform(0, 10, 12)
    local = rng.uniform(0, 10, 12)
    tokens = make_tokens("d", [0] * 12, [i // 4 for i in range(12)],
                         [i // 4 for i in range(12)], s_global=g,
                         s_sentence=local, s_edu=local)
    assert np.array_equal(pmi_local(tokens, "sentence").values,
                          pmi_local(tokens, "edu").values)


def test_translation_equivariance_in_global_channel():
    rng = np.random.default_rng(3)
    g = rng.uniform(0, 10, 25)
    local = rng.uniform(0, 10, 25)
    uni = rng.uniform(0, 10, 25)
    c = 1.75
    # only the global channel moves; locals and unigram stay put
    base = make_tokens("d", [0] * 25, [0] * 25, [0] * 25, s_global=g,
                       s_sentence=local, s_edu=local, s_unigram=uni)
    shifted = make_tokens("d", [0] * 25, [0] * 25, [0] * 25, s_global=g + c,
                          s_sentence=local, s_edu=local, s_unigram=uni)
    for kind in DEPENDENT_KINDS:
        a = compute_dependent(base, kind).values
        b = compute_dependent(shifted, kind).values
        assert np.abs((b - a) - c).max() <= 1e-12, kind


def test_dispatcher_covers_all_kinds_and_rejects_unknown():
    tokens = make_tokens("d", [0, 0, 0], [0, 0, 0], [0, 0, 0])
    for kind in DEPENDENT_KINDS:
        out = compute_dependent(tokens, kind)
        assert out.kind == kind
        assert len(out.values) == 3
        assert np.isfinite(out.values).all()
    with pytest.raises(ValueError):
        compute_dependent(tokens, "entropy_rate")
