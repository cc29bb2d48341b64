"""Character and word language models for next-selection prediction.

Character model: Witten-Bell smoothed n-gram (desk-scale order 6) with a
backoff chain terminating in the uniform distribution over the alphabet.
Word model: Witten-Bell bigram over the corpus vocabulary.  Word predictions
score the remaining letters of each prefix-matching word (plus a trailing
space) under the character model and add the word-model log probability.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .core import ALPHABET, SPACE

DEFAULT_CHAR_ORDER = 6
SYM_INDEX = {c: i for i, c in enumerate(ALPHABET)}

_WORD_CHARS = set("abcdefghijklmnopqrstuvwxyz'")


def normalize_text(text: str, strip: bool = True) -> str:
    """Lowercase and restrict to the model alphabet; collapse whitespace.

    Contexts mid-sentence keep their trailing space (strip=False); corpus
    text is fully stripped.
    """
    out = []
    prev_space = True
    for ch in text.lower():
        if ch in ("\n", "\t"):
            ch = SPACE
        if ch not in SYM_INDEX:
            continue
        if ch == SPACE:
            if prev_space:
                continue
            prev_space = True
        else:
            prev_space = False
        out.append(ch)
    joined = "".join(out)
    return joined.strip() if strip else joined.lstrip()


def words_of(text: str) -> list[str]:
    """Word tokens (letters and apostrophes) of normalized text."""
    raw = normalize_text(text).split(SPACE)
    return [w.strip(",.?!") for w in raw if w.strip(",.?!")]


class CharNgramModel:
    """Witten-Bell interpolated character n-gram."""

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        # context string -> per-symbol count vector over ALPHABET
        self.counts: dict[str, np.ndarray] = {}
        self._dist_cache: dict[str, np.ndarray] = {}
        self._logdist_cache: dict[str, np.ndarray] = {}

    def train(self, corpus: str) -> None:
        text = normalize_text(corpus)
        if not text:
            raise ValueError("empty corpus")
        counts = self.counts
        nsym = len(ALPHABET)
        for i, ch in enumerate(text):
            sym = SYM_INDEX[ch]
            for k in range(self.order):
                if k > i:
                    break
                ctx = text[i - k:i]
                vec = counts.get(ctx)
                if vec is None:
                    vec = counts[ctx] = np.zeros(nsym, dtype=np.int64)
                vec[sym] += 1
        self._dist_cache.clear()
        self._logdist_cache.clear()

    def context_key(self, context: str) -> str:
        if self.order == 1:
            return ""
        return normalize_text(context, strip=False)[-(self.order - 1):]

    def dist(self, context: str) -> np.ndarray:
        """P(symbol | context) over the full alphabet; sums to 1."""
        ctx = self.context_key(context)
        cached = self._dist_cache.get(ctx)
        if cached is not None:
            return cached
        p = np.full(len(ALPHABET), 1.0 / len(ALPHABET))
        # shortest suffix first so each level interpolates the one below
        for k in range(len(ctx) + 1):
            h = ctx[len(ctx) - k:]
            vec = self.counts.get(h)
            if vec is None:
                continue
            total = vec.sum()
            types = np.count_nonzero(vec)
            p = (vec + types * p) / (total + types)
        self._dist_cache[ctx] = p
        return p

    def log_dist(self, context: str) -> np.ndarray:
        ctx = self.context_key(context)
        cached = self._logdist_cache.get(ctx)
        if cached is None:
            cached = self._logdist_cache[ctx] = np.log(self.dist(ctx))
        return cached

    def logprob(self, context: str, symbol: str) -> float:
        if symbol not in SYM_INDEX:
            raise ValueError(f"symbol {symbol!r} outside alphabet")
        return float(self.log_dist(context)[SYM_INDEX[symbol]])

    def sequence_logprob(self, context: str, sequence: str) -> float:
        ctx = self.context_key(context)
        total = 0.0
        for ch in sequence:
            total += self.logprob(ctx, ch)
            ctx = (ctx + ch)[-(self.order - 1):] if self.order > 1 else ""
        return total


def train_char_model(corpus: str, order: int = DEFAULT_CHAR_ORDER) -> CharNgramModel:
    model = CharNgramModel(order)
    model.train(corpus)
    return model


class WordBigramModel:
    """Witten-Bell bigram over the training vocabulary."""

    def __init__(self):
        self.unigram: dict[str, int] = {}
        self.bigram: dict[str, dict[str, int]] = {}
        self.total = 0
        self.vocab: list[str] = []

    def train(self, corpus: str) -> None:
        raw = normalize_text(corpus).split(SPACE)
        prev = None
        seen = False
        for tok in raw:
            w = tok.strip(",.?!")
            if not w:
                continue
            seen = True
            self.unigram[w] = self.unigram.get(w, 0) + 1
            self.total += 1
            if prev is not None:
                d = self.bigram.setdefault(prev, {})
                d[w] = d.get(w, 0) + 1
            # a sentence-final token does not condition the next sentence
            prev = None if tok[-1] in ".?!" else w
        if not seen:
            raise ValueError("no words in corpus")
        self.vocab = sorted(self.unigram)

    def unigram_logprob(self, word: str) -> float:
        return math.log(self._unigram_prob(word))

    def _unigram_prob(self, word: str) -> float:
        v = len(self.vocab)
        t = len(self.unigram)
        c = self.unigram.get(word, 0)
        return (c + t / v) / (self.total + t)

    def logprob(self, word: str, prev: str | None) -> float:
        p1 = self._unigram_prob(word)
        d = self.bigram.get(prev) if prev is not None else None
        if not d:
            return math.log(p1)
        total = sum(d.values())
        types = len(d)
        return math.log((d.get(word, 0) + types * p1) / (total + types))

    def words_with_prefix(self, prefix: str) -> list[str]:
        if not prefix:
            return self.vocab
        lo = bisect_left(self.vocab, prefix)
        hi = bisect_left(self.vocab, prefix + "\x7f")
        return self.vocab[lo:hi]


@dataclass
class Prediction:
    word: str
    score: float


@dataclass
class LanguageModel:
    """Combined character/word model with a per-state query cache."""

    char_model: CharNgramModel
    word_model: WordBigramModel
    _pred_cache: dict = field(default_factory=dict, repr=False)

    def char_dist(self, context: str) -> np.ndarray:
        return self.char_model.dist(context)

    def predict_words(self, left_context: str, prefix: str, k: int = 200) -> list[Prediction]:
        """Ranked prefix completions; deterministic, ties broken lexically.

        With an empty prefix the ranking is by the word model alone (next-word
        prediction); otherwise the score is the character-model log probability
        of the remaining letters plus a trailing space, plus the word-model
        log probability of the whole word.
        """
        prev = words_of(left_context)
        prev_word = prev[-1] if prev else None
        ctx_key = self.char_model.context_key(left_context + prefix)
        cache_key = (prev_word, ctx_key, prefix, k)
        cached = self._pred_cache.get(cache_key)
        if cached is not None:
            return cached
        candidates = self.word_model.words_with_prefix(prefix)
        scored: list[tuple[float, str]] = []
        if not prefix:
            for w in candidates:
                scored.append((self.word_model.logprob(w, prev_word), w))
        else:
            for w in candidates:
                remaining = w[len(prefix):] + SPACE
                s = self.char_model.sequence_logprob(ctx_key, remaining)
                s += self.word_model.logprob(w, prev_word)
                scored.append((s, w))
        scored.sort(key=lambda t: (-t[0], t[1]))
        result = [Prediction(w, s) for s, w in scored[:k]]
        self._pred_cache[cache_key] = result
        return result

    def precompute_next(self, text: str, k: int = 200) -> dict:
        """All query results a client needs until after its next selection.

        Keys: "char_dist" (current distribution), "predictions" (current
        prefix), and "after:<char>" / "after_word" entries holding the
        predictions that apply once that selection is made.
        """
        left, prefix = split_current_word(text)
        batch = {
            "char_dist": self.char_dist(left + prefix),
            "predictions": self.predict_words(left, prefix),
        }
        for ch in ALPHABET:
            if ch == SPACE or ch in ",.?!":
                new_left, new_prefix = text + ch, ""
                batch[f"after:{ch}"] = self.predict_words(new_left, new_prefix)
            else:
                batch[f"after:{ch}"] = self.predict_words(left, prefix + ch)
        batch["after_word"] = {
            p.word: self.predict_words(left + p.word + SPACE, "")
            for p in batch["predictions"][:80]
        }
        return batch


def split_current_word(text: str) -> tuple[str, str]:
    """Split text into (left context, current partial word)."""
    idx = len(text)
    while idx > 0 and text[idx - 1] in _WORD_CHARS:
        idx -= 1
    return text[:idx], text[idx:]


def train_language_model(corpus: str, char_order: int = DEFAULT_CHAR_ORDER) -> LanguageModel:
    char_model = train_char_model(corpus, char_order)
    word_model = WordBigramModel()
    word_model.train(corpus)
    return LanguageModel(char_model, word_model)


# ---------------------------------------------------------------------------
# model files
#
# char model:   header `N <alphabet>` then sorted `context symbol count` lines
#               (space encoded as "_"; contexts may be empty -> "~")
# vocabulary:   `word logprob` lines
# ---------------------------------------------------------------------------

def _enc(s: str) -> str:
    return "~" if s == "" else s.replace(SPACE, "_")


def _dec(s: str) -> str:
    return "" if s == "~" else s.replace("_", SPACE)


def save_char_model(model: CharNgramModel, path) -> None:
    with open(path, "w") as f:
        f.write(f"{model.order} {_enc(''.join(ALPHABET))}\n")
        for ctx in sorted(model.counts):
            vec = model.counts[ctx]
            for i in np.nonzero(vec)[0]:
                f.write(f"{_enc(ctx)} {_enc(ALPHABET[int(i)])} {int(vec[i])}\n")


def load_char_model(path) -> CharNgramModel:
    with open(path) as f:
        header = f.readline().split()
        order = int(header[0])
        model = CharNgramModel(order)
        for line in f:
            parts = line.split()
            if not parts:
                continue
            ctx, sym, count = _dec(parts[0]), _dec(parts[1]), int(parts[2])
            vec = model.counts.get(ctx)
            if vec is None:
                vec = model.counts[ctx] = np.zeros(len(ALPHABET), dtype=np.int64)
            vec[SYM_INDEX[sym]] += count
    return model


def save_vocabulary(model: WordBigramModel, path) -> None:
    with open(path, "w") as f:
        for w in model.vocab:
            f.write(f"{w} {model.unigram_logprob(w):.12g}\n")
