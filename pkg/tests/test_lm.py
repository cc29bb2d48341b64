"""Language models: Witten-Bell estimates against hand-derived oracles,
prediction ranking against enumerate-and-score, cache consistency."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singleswitch.core import ALPHABET, SPACE
from singleswitch.lm import (SYM_INDEX, WordBigramModel, load_char_model,
                             normalize_text, save_char_model, save_vocabulary,
                             split_current_word, train_char_model,
                             train_language_model, words_of)

# Hand-derived Witten-Bell chain on the corpus "abab" (order 2, 32 symbols):
#   p_uni(b) = (2 + 2/32) / (4 + 2)            = 11/32
#   P(b|a)   = (2 + 1 * p_uni(b)) / (2 + 1)    = 25/32
#   P(a|a)   = (0 + 1 * p_uni(a)) / (2 + 1)    = 11/96
#   P(a|b)   = (1 + 1 * p_uni(a)) / (1 + 1)    = 43/64
ABAB_ORACLE = {
    ("a", "b"): 25 / 32,
    ("a", "a"): 11 / 96,
    ("b", "a"): 43 / 64,
    ("", "a"): 11 / 32,
    ("", "b"): 11 / 32,
}


def test_witten_bell_abab_hand_oracle():
    model = train_char_model("abab", order=2)
    for (ctx, sym), want in ABAB_ORACLE.items():
        got = model.dist(ctx)[SYM_INDEX[sym]]
        assert abs(got - want) < 1e-12, (ctx, sym, got, want)


def test_witten_bell_unseen_context_backs_off():
    model = train_char_model("abab", order=2)
    # 'z' never occurred, so the context contributes nothing
    assert np.allclose(model.dist("z"), model.dist(""), atol=1e-15)
    # unseen symbols share the smoothed remainder equally
    d = model.dist("a")
    others = [d[SYM_INDEX[c]] for c in ALPHABET if c not in "ab"]
    assert np.allclose(others, others[0]) and others[0] > 0


def test_char_model_normalization_and_positivity():
    model = train_char_model("abab", order=2)
    for ctx in ("", "a", "b", "zz", "ab"):
        d = model.dist(ctx)
        assert abs(d.sum() - 1.0) < 1e-6
        assert d.min() > 0


def test_char_model_order_one_ignores_context():
    model = train_char_model("hello world", order=1)
    assert np.array_equal(model.dist("abc"), model.dist(""))


def test_char_model_errors():
    with pytest.raises(ValueError):
        train_char_model("", order=2)
    with pytest.raises(ValueError):
        train_char_model("abc", order=0)
    model = train_char_model("abc", order=2)
    with pytest.raises(ValueError):
        model.logprob("a", "@")


def test_sequence_logprob_is_sum_of_steps():
    model = train_char_model("the cat sat", order=3)
    seq = "at "
    total = model.sequence_logprob("c", seq)
    ctx, acc = model.context_key("c"), 0.0
    for ch in seq:
        acc += model.logprob(ctx, ch)
        ctx = (ctx + ch)[-(model.order - 1):]
    assert total == pytest.approx(acc, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.text(alphabet="abc ", min_size=1, max_size=60),
       st.text(alphabet="abc ", max_size=4))
def test_char_model_normalization_property(corpus, ctx):
    if not normalize_text(corpus):
        return
    model = train_char_model(corpus, order=3)
    d = model.dist(ctx)
    assert abs(d.sum() - 1.0) < 1e-6
    assert d.min() > 0


def test_word_bigram_counts_and_sentence_reset():
    m = WordBigramModel()
    m.train("the cat sat. the dog ran.")
    assert m.unigram["the"] == 2
    # "sat." ends a sentence, so it never conditions "the"
    assert "sat" not in m.bigram
    assert m.bigram["the"] == {"cat": 1, "dog": 1}
    with pytest.raises(ValueError):
        WordBigramModel().train("...")


def test_word_bigram_logprob_normalizes():
    m = WordBigramModel()
    m.train("a b a c a b")
    for prev in (None, "a", "b", "unknownword"):
        total = sum(math.exp(m.logprob(w, prev)) for w in m.vocab)
        # mass outside the vocabulary comes from smoothing; vocab mass < 1
        assert 0.9 < total <= 1.0 + 1e-9


def test_words_with_prefix():
    m = WordBigramModel()
    m.train("the there they then that this")
    assert m.words_with_prefix("the") == ["the", "then", "there", "they"]
    assert m.words_with_prefix("zz") == []
    assert m.words_with_prefix("") == m.vocab


def test_predict_words_enumerate_and_score(tiny_lm):
    left, prefix = "they saw ", "the"
    preds = tiny_lm.predict_words(left, prefix)
    words = [p.word for p in preds]
    assert set(words) == {w for w in tiny_lm.word_model.vocab
                          if w.startswith(prefix)}
    # independent scoring of each candidate
    ctx = tiny_lm.char_model.context_key(left + prefix)
    for p in preds:
        want = tiny_lm.char_model.sequence_logprob(ctx, p.word[len(prefix):] + SPACE)
        want += tiny_lm.word_model.logprob(p.word, "saw")
        assert p.score == pytest.approx(want, abs=1e-12)
    scores = [p.score for p in preds]
    assert scores == sorted(scores, reverse=True)


def test_predict_words_oov_prefix_empty(tiny_lm):
    assert tiny_lm.predict_words("", "zzz") == []


def test_predict_words_empty_prefix_uses_word_model(tiny_lm):
    preds = tiny_lm.predict_words("the cat sat on ", "", k=5)
    want = sorted(tiny_lm.word_model.vocab,
                  key=lambda w: (-tiny_lm.word_model.logprob(w, "on"), w))[:5]
    assert [p.word for p in preds] == want


def test_predict_words_tie_break_lexicographic():
    lm = train_language_model("foo bar. foo bar.", char_order=2)
    preds = lm.predict_words("", "")
    # equal unigram counts: lexicographic order decides
    assert [p.word for p in preds] == ["bar", "foo"]
    assert preds[0].score == preds[1].score


def test_prefix_monotonicity(lm):
    base = {p.word for p in lm.predict_words("", "th", k=10**6)}
    extended = {p.word for p in lm.predict_words("", "the", k=10**6)}
    assert extended <= base


def test_precompute_next_matches_direct_queries(lm):
    batch = lm.precompute_next("could you p")
    left, prefix = split_current_word("could you p")
    assert np.array_equal(batch["char_dist"], lm.char_dist("could you p"))
    assert batch["predictions"] == lm.predict_words(left, prefix)
    assert batch["after:a"] == lm.predict_words(left, prefix + "a")
    assert batch["after: "] == lm.predict_words("could you p ", "")
    top = batch["predictions"][0].word
    assert batch["after_word"][top] == lm.predict_words(left + top + SPACE, "")


def test_split_current_word():
    assert split_current_word("") == ("", "")
    assert split_current_word("hello") == ("", "hello")
    assert split_current_word("say hel") == ("say ", "hel")
    assert split_current_word("done ") == ("done ", "")
    assert split_current_word("it's") == ("", "it's")


def test_normalize_and_words_of():
    assert normalize_text("Hello,  WORLD!") == "hello, world!"
    assert words_of("Hello, world! it's me.") == ["hello", "world", "it's", "me"]


def test_char_model_file_roundtrip(tmp_path):
    model = train_char_model("the cat sat on the mat", order=3)
    path = tmp_path / "char.model"
    save_char_model(model, path)
    loaded = load_char_model(path)
    assert loaded.order == model.order
    for ctx in ("", "t", "th", "e "):
        assert np.allclose(loaded.dist(ctx), model.dist(ctx), atol=1e-15)


def test_vocabulary_file_format(tmp_path):
    m = WordBigramModel()
    m.train("b a c a b a")
    path = tmp_path / "vocab.txt"
    save_vocabulary(m, path)
    lines = path.read_text().splitlines()
    assert [ln.split()[0] for ln in lines] == ["a", "b", "c"]
    for ln in lines:
        w, lp = ln.split()
        assert float(lp) == pytest.approx(m.unigram_logprob(w), rel=1e-9)
