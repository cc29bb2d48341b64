"""Simulated switch users for both engines.

The simulated user (SU) types a phrase one target at a time: the displayed
word completion if the current word is shown, otherwise the next character.
Ideal timing aims at the target's noon (clock engine) or the midpoint of the
target's dwell (scanning engine); optional noise adds an iid sample from a
click-offset distribution.  Erroneous selections trigger recovery, bounded
per word; an exhausted word is abandoned with its incorrect text in place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nomon as nomon_mod
from .clickmodel import ClickTimeDistribution, gaussian_distribution
from .core import (SPACE, Layout, SessionLog, TargetId, TargetKind,
                   char_target, completion_target, completion_slot,
                   corrective_target, target_char)
from .lm import SYM_INDEX, LanguageModel, Prediction, split_current_word
from .nomon import NomonEngine, build_text_priors
from .rcs import RcsEngine, ScanMode

MAX_CLICKS_PER_PHRASE_FACTOR = 60


@dataclass
class SimUserConfig:
    click_dist: ClickTimeDistribution | None = None   # None = ideal user
    max_error_attempts: int = 2


@dataclass
class SimOutcome:
    final_text: str
    log: SessionLog
    word_failures: list[bool]
    completed: bool


def displayed_predictions_nomon(predictions: list[Prediction], prefix: str,
                                w_c: int, w_max: int) -> list[str]:
    """Greedy fill: best predictions first, capped per character cell and
    globally.  Predictions group under the character following the prefix."""
    shown: list[str] = []
    per_char: dict[str, int] = {}
    for p in predictions:
        if len(shown) >= w_max:
            break
        remaining = p.word[len(prefix):] + SPACE
        group = remaining[0]
        if per_char.get(group, 0) >= w_c:
            continue
        per_char[group] = per_char.get(group, 0) + 1
        shown.append(p.word)
    return shown


def displayed_predictions_rcs(predictions: list[Prediction], w_max: int) -> list[str]:
    return [p.word for p in predictions[:w_max]]


class PhrasePolicy:
    """Target policy: word completions when shown, characters otherwise,
    correctives on divergence; abandons a word after repeated failures."""

    def __init__(self, phrase: str, max_error_attempts: int):
        self.words = phrase.split()
        self.max_error_attempts = max_error_attempts
        self.baseline = ""
        self.word_index = 0
        self.attempts = 0
        self.failures = [False] * len(self.words)

    def done(self, text: str) -> bool:
        self._advance(text)
        return self.word_index >= len(self.words)

    def _base(self) -> str:
        if self.baseline and not self.baseline.endswith(SPACE):
            return self.baseline + SPACE
        return self.baseline

    def _advance(self, text: str) -> None:
        while self.word_index < len(self.words):
            done_word = self._base() + self.words[self.word_index]
            if text == done_word or text == done_word + SPACE:
                self.baseline = text
                self.word_index += 1
                self.attempts = 0
            elif text.startswith(done_word + SPACE):
                self.baseline = done_word + SPACE
                self.word_index += 1
                self.attempts = 0
            else:
                break

    def current_prefix(self, text: str) -> str | None:
        """Typed part of the current word, or None if text has diverged."""
        base = self._base()
        if self.baseline and not self.baseline.endswith(SPACE):
            if text == self.baseline:
                return None    # leading space still owed; handled by caller
        if self.word_index >= len(self.words):
            return ""
        word = self.words[self.word_index]
        if text.startswith(base):
            typed = text[len(base):]
            if word.startswith(typed):
                return typed
        return None

    def is_consistent(self, text: str) -> bool:
        """True when this text is on the intended typing path."""
        if text == self.baseline:
            return True
        if self.word_index >= len(self.words):
            return False
        base = self._base()
        word = self.words[self.word_index]
        if text.startswith(base) and word.startswith(text[len(base):]):
            return True
        done_word = base + word
        return text in (done_word, done_word + SPACE)

    def desired_target(self, text: str, shown_words: list[str],
                       undo_ok: bool = False) -> TargetId:
        self._advance(text)
        if self.word_index >= len(self.words):
            raise RuntimeError("phrase already complete")
        # owed separator after an abandoned word
        if self.baseline and not self.baseline.endswith(SPACE) and text == self.baseline:
            return char_target(SPACE)
        word = self.words[self.word_index]
        typed = self.current_prefix(text)
        if typed is None:
            if undo_ok:
                return corrective_target(TargetKind.UNDO)
            return corrective_target(TargetKind.BACKSPACE)
        if word in shown_words and word != typed:
            return completion_target(word)
        if typed == word:
            return char_target(SPACE)
        return char_target(word[len(typed)])

    def note_error(self, text: str) -> None:
        """Record a mis-selection; abandon the word when attempts run out."""
        self.attempts += 1
        if self.attempts > self.max_error_attempts:
            self.failures[self.word_index] = True
            self.baseline = text
            self.word_index += 1
            self.attempts = 0


class TextBuffer:
    """Selection-to-text semantics shared by simulation and live sessions."""

    def __init__(self):
        self.text = ""
        self._history: list[str] = [""]

    def undo_state(self) -> str | None:
        """Text that an undo selection would restore, if any."""
        return self._history[-2] if len(self._history) > 1 else None

    def apply(self, target: TargetId, shown_words: list[str] | None = None) -> None:
        if target.kind is TargetKind.CHARACTER:
            self.text = self.text + target_char(target)
        elif target.kind is TargetKind.WORD_COMPLETION:
            word = target.label
            left, _prefix = split_current_word(self.text)
            self.text = left + word + SPACE
        elif target.kind is TargetKind.UNDO:
            if len(self._history) > 1:
                self._history.pop()
                self.text = self._history[-1]
            return
        elif target.kind is TargetKind.BACKSPACE:
            self.text = self.text[:-1]
        elif target.kind is TargetKind.CLEAR:
            self.text = ""
        self._history.append(self.text)


# ---------------------------------------------------------------------------
# clock-engine simulated user
# ---------------------------------------------------------------------------

def _nomon_round_setup(engine_layout: Layout, lm: LanguageModel, text: str):
    """Live targets + priors for the current text state."""
    left, prefix = split_current_word(text)
    predictions = lm.predict_words(left, prefix)
    shown = displayed_predictions_nomon(predictions, prefix,
                                        engine_layout.w_c, engine_layout.w_max)
    char_probs_vec = lm.char_dist(left + prefix)
    principals = engine_layout.targets()
    char_priors = {}
    for t in principals:
        if t.kind is TargetKind.CHARACTER:
            char_priors[t.id] = float(char_probs_vec[SYM_INDEX[target_char(t)]])
    score_by_word = {p.word: p.score for p in predictions}
    comp_targets = [completion_target(w) for w in shown]
    comp_scores = {completion_target(w).id: float(np.exp(score_by_word[w])) for w in shown}
    corrective_ids = [t.id for t in principals if t.is_corrective()]
    priors = build_text_priors(char_priors, comp_scores, corrective_ids)
    return principals + comp_targets, priors, shown


def run_phrase_nomon(layout: Layout, lm: LanguageModel, phrase: str,
                     config: SimUserConfig, rng: np.random.Generator,
                     period: int, commit_ratio: float = nomon_mod.DEFAULT_COMMIT_RATIO,
                     ) -> SimOutcome:
    policy = PhrasePolicy(phrase, config.max_error_attempts)
    buf = TextBuffer()
    log = SessionLog()
    now = 0

    targets, priors, shown = _nomon_round_setup(layout, lm, buf.text)
    dist = config.click_dist
    if dist is not None and dist.period != period:
        dist = dist.rescaled(period)
    if dist is None:
        # ideal user: a likelihood far narrower than the phase spacing, on a
        # fine grid so no two clocks ever share a bin
        engine_dist = gaussian_distribution(period, 0.0, period / 1024, bins=1024)
    else:
        engine_dist = dist
    engine = NomonEngine(targets, priors, engine_dist, period,
                         commit_ratio=commit_ratio)

    click_cap = MAX_CLICKS_PER_PHRASE_FACTOR * max(len(phrase), 1)
    clicks = 0
    completed = True
    while not policy.done(buf.text):
        undo_ok = (prev := buf.undo_state()) is not None and policy.is_consistent(prev)
        target = policy.desired_target(buf.text, shown, undo_ok)
        if target.id not in engine.index:
            # completion disappeared between rounds; fall back to characters
            target = policy.desired_target(buf.text, [], undo_ok)
        selection = None
        while selection is None:
            noon = engine.noon_time(target, now + 1)
            offset = 0.0 if config.click_dist is None else dist.sample(rng)
            click_t = int(round(noon + offset))
            while click_t <= now:
                click_t += period
            selection = engine.observe_click(click_t)
            log.append(click_t, "click")
            now = click_t
            clicks += 1
            if clicks > click_cap:
                completed = False
                break
        if selection is None:
            break
        chosen = selection.target
        log.append(selection.t, "select", target=chosen.id,
                   corrective=chosen.is_corrective(), clicks=selection.clicks)
        buf.apply(chosen, shown)
        log.append(selection.t, "text", text=buf.text)
        if chosen.id != target.id:
            policy.note_error(buf.text)
        targets, priors, shown = _nomon_round_setup(layout, lm, buf.text)
        engine.set_targets(targets, priors)
    return SimOutcome(final_text=buf.text, log=log,
                      word_failures=policy.failures, completed=completed)


# ---------------------------------------------------------------------------
# scanning-engine simulated user
# ---------------------------------------------------------------------------

def _rcs_shown(layout: Layout, lm: LanguageModel, text: str) -> list[str]:
    left, prefix = split_current_word(text)
    predictions = lm.predict_words(left, prefix)
    return displayed_predictions_rcs(predictions, layout.w_max)


def _rcs_target_position(layout: Layout, target: TargetId,
                         shown: list[str]) -> tuple[int, int] | None:
    if target.kind is TargetKind.WORD_COMPLETION:
        try:
            slot = shown.index(target.label)
        except ValueError:
            return None
        return layout.position_of(completion_slot(slot))
    try:
        return layout.position_of(target)
    except KeyError:
        return None


def run_phrase_rcs(layout: Layout, lm: LanguageModel, phrase: str,
                   config: SimUserConfig, rng: np.random.Generator,
                   scan_ms: int, delay_ms: int) -> SimOutcome:
    policy = PhrasePolicy(phrase, config.max_error_attempts)
    buf = TextBuffer()
    log = SessionLog()
    engine = RcsEngine(layout, scan_ms, delay_ms)
    now = 0
    dist = config.click_dist
    click_cap = MAX_CLICKS_PER_PHRASE_FACTOR * max(len(phrase), 1)
    clicks = 0
    completed = True

    def noise() -> int:
        return 0 if dist is None else int(round(dist.sample(rng)))

    while not policy.done(buf.text):
        shown = _rcs_shown(layout, lm, buf.text)
        engine.set_filled_slots(len(shown))
        undo_ok = (prev := buf.undo_state()) is not None and policy.is_consistent(prev)
        target = policy.desired_target(buf.text, shown, undo_ok)
        pos = _rcs_target_position(layout, target, shown)
        if pos is None:
            target = policy.desired_target(buf.text, [], undo_ok)
            pos = _rcs_target_position(layout, target, [])
        row, col = pos

        if engine.mode is ScanMode.COL and engine.selected_row != row:
            # wrong row selected: wait out two column cycles until reversion
            m = len(engine.active_cols[engine.selected_row])
            revert_t = engine.dwell_started_at + 2 * (engine.delay_ms + m * engine.scan_ms)
            engine.advance_to(revert_t)
            now = revert_t
            continue

        if engine.mode is ScanMode.ROW:
            t1 = max(now + engine.time_to_target_click(row, None) + noise(), now + 1)
            result = engine.observe_click(t1)
            assert result is None
            log.append(t1, "click")
            now = t1
            clicks += 1
            if engine.selected_row != row:
                policy.note_error(buf.text)
                if clicks > click_cap:
                    completed = False
                    break
                continue

        t2 = max(now + engine.time_to_target_click(row, col) + noise(), now + 1)
        selection = engine.observe_click(t2)
        log.append(t2, "click")
        now = t2
        clicks += 1
        if selection is None or selection.target is None:
            policy.note_error(buf.text)
        else:
            chosen = selection.target
            if chosen.kind is TargetKind.WORD_COMPLETION:
                slot = int(chosen.id.split(":")[1])
                chosen = completion_target(shown[slot])
            log.append(selection.t, "select", target=chosen.id,
                       corrective=chosen.is_corrective(), clicks=2)
            buf.apply(chosen, shown)
            log.append(selection.t, "text", text=buf.text)
            if chosen.id != target.id:
                policy.note_error(buf.text)
        if clicks > click_cap:
            completed = False
            break
    return SimOutcome(final_text=buf.text, log=log,
                      word_failures=policy.failures, completed=completed)


def run_phrase(engine_kind: str, layout: Layout, lm: LanguageModel, phrase: str,
               config: SimUserConfig, rng: np.random.Generator, **params) -> SimOutcome:
    if engine_kind == "nomon":
        return run_phrase_nomon(layout, lm, phrase, config, rng, **params)
    if engine_kind == "rcs":
        return run_phrase_rcs(layout, lm, phrase, config, rng, **params)
    raise ValueError(f"unknown engine kind {engine_kind!r}")


# ---------------------------------------------------------------------------
# picture-selection simulated users (uniform prior, no language model)
# ---------------------------------------------------------------------------

def nomon_picture_clicks(layout: Layout, dist: ClickTimeDistribution,
                         rng: np.random.Generator, period: int,
                         n_selections: int,
                         commit_ratio: float = nomon_mod.DEFAULT_COMMIT_RATIO,
                         ) -> list[int]:
    """Clicks needed for each of n random-target selections."""
    targets = layout.targets()
    priors = {t.id: 1.0 for t in targets}
    engine = NomonEngine(targets, priors, dist, period, commit_ratio=commit_ratio)
    now = 0
    counts = []
    for _ in range(n_selections):
        goal = targets[int(rng.integers(len(targets)))]
        while True:
            noon = engine.noon_time(goal, now + 1)
            click_t = int(round(noon + dist.sample(rng)))
            while click_t <= now:
                click_t += period
            sel = engine.observe_click(click_t)
            now = click_t
            if sel is not None:
                counts.append(sel.clicks)
                engine.set_targets(targets, priors)
                break
    return counts


def rcs_picture_scans(layout: Layout, scan_ms: int) -> list[float]:
    """Ideal-user scan counts (selection time / scan time) for every target."""
    out = []
    for goal in layout.targets():
        engine = RcsEngine(layout, scan_ms, 0)
        row, col = layout.position_of(goal)
        t1 = engine.time_to_target_click(row, None)
        engine.observe_click(t1)
        t2 = t1 + engine.time_to_target_click(row, col)
        sel = engine.observe_click(t2)
        assert sel is not None and sel.target is not None and sel.target.id == goal.id
        out.append(t2 / scan_ms)
    return out
