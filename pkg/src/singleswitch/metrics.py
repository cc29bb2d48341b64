"""Performance metrics computed from session logs and final text.

All functions are pure; recomputing on a replayed log gives bit-identical
results.  A word is five characters including space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SessionLog

CHARS_PER_WORD = 5


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert/delete/substitute, unit costs)."""
    n, m = len(a), len(b)
    if n > m:
        a, b, n, m = b, a, m, n
    current = list(range(n + 1))
    for i in range(1, m + 1):
        previous, current = current, [i] + [0] * n
        for j in range(1, n + 1):
            add = previous[j] + 1
            delete = current[j - 1] + 1
            change = previous[j - 1] + (a[j - 1] != b[i - 1])
            current[j] = min(add, delete, change)
    return current[n]


def entry_rate(final_text: str, t_first_click: int, t_done: int) -> float:
    """Words per minute over the interval from first click to completion."""
    if t_done <= t_first_click:
        raise ValueError("completion time must follow the first click")
    minutes = (t_done - t_first_click) / 60000.0
    return (len(final_text) / CHARS_PER_WORD) / minutes


def selections_per_minute(n_selections: int, t_first_click: int, t_done: int) -> float:
    """Picture-task entry rate."""
    if t_done <= t_first_click:
        raise ValueError("completion time must follow the first click")
    return n_selections / ((t_done - t_first_click) / 60000.0)


def click_load(log: SessionLog, final_text: str) -> float:
    """Clicks per character of the final output."""
    if not final_text:
        raise ValueError("empty final output")
    return len(log.clicks()) / len(final_text)


def clicks_per_selection(log: SessionLog) -> float:
    sels = log.selections()
    if not sels:
        raise ValueError("no selections in log")
    return len(log.clicks()) / len(sels)


def correction_rate(log: SessionLog) -> float:
    """Corrective selections (undo/backspace/clear) over all selections."""
    sels = log.selections()
    if not sels:
        raise ValueError("no selections in log")
    corrective = sum(1 for e in sels if e.data.get("corrective"))
    return corrective / len(sels)


def final_error_rate(target: str, output: str) -> float:
    """Edit distance to the target phrase, normalized by its length.

    A trailing space is ignored: selecting a word completion for the final
    word necessarily appends one.
    """
    if not target:
        raise ValueError("empty target phrase")
    return levenshtein(target.rstrip(" "), output.rstrip(" ")) / len(target.rstrip(" "))


@dataclass
class PhraseMetrics:
    entry_rate: float
    click_load: float
    correction_rate: float
    final_error_rate: float
    clicks: int
    selections: int
    duration_ms: int


def phrase_metrics(log: SessionLog, target: str, final_text: str) -> PhraseMetrics:
    clicks = log.clicks()
    sels = log.selections()
    if not clicks or not sels:
        raise ValueError("log holds no completed activity")
    t0, t1 = clicks[0].t, log.events[-1].t
    return PhraseMetrics(
        entry_rate=entry_rate(final_text, t0, t1) if final_text else 0.0,
        click_load=click_load(log, final_text) if final_text else float(len(clicks)),
        correction_rate=correction_rate(log),
        final_error_rate=final_error_rate(target, final_text),
        clicks=len(clicks),
        selections=len(sels),
        duration_ms=t1 - t0,
    )


@dataclass
class ReactionStats:
    srt_mean: float
    dct_mean: float
    srt: list[float]
    dct: list[float]

    @property
    def trials(self) -> int:
        return len(self.srt)


def srt_dct(flash_times, click_times) -> ReactionStats:
    """Reaction statistics from flash stimuli and the user's clicks.

    Per trial: SRT = first click - flash, DCT = second click - first click.
    Trials without two clicks before the next flash are dropped.
    """
    flashes = sorted(flash_times)
    clicks = sorted(click_times)
    srt, dct = [], []
    for i, flash in enumerate(flashes):
        end = flashes[i + 1] if i + 1 < len(flashes) else float("inf")
        trial = [c for c in clicks if flash <= c < end]
        if len(trial) < 2:
            continue
        srt.append(trial[0] - flash)
        dct.append(trial[1] - trial[0])
    if not srt:
        raise ValueError("no valid reaction trials")
    return ReactionStats(srt_mean=float(np.mean(srt)), dct_mean=float(np.mean(dct)),
                         srt=srt, dct=dct)


def bootstrap_ci(samples, level: float = 0.95, n_resamples: int = 10_000,
                 rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean; deterministic under seed."""
    x = np.asarray(list(samples), dtype=float)
    if len(x) < 2:
        raise ValueError("bootstrap needs at least two samples")
    if rng is None:
        rng = np.random.default_rng(0)
    idx = rng.integers(0, len(x), size=(n_resamples, len(x)))
    means = x[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    return (float(np.quantile(means, alpha)), float(np.quantile(means, 1.0 - alpha)))
