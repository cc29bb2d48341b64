"""Clock-based probabilistic selection engine.

Every live target owns a clock.  All minute hands rotate with the shared
period T; the user clicks as their target's hand passes noon.  Each click
multiplies every target's posterior by the click-offset likelihood at that
target's noon, and a target is committed once its posterior exceeds the
runner-up by a configurable ratio.  Between clicks the clock phases are
reassigned so the most probable targets are maximally separated in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clickmodel import ClickTimeDistribution, wrap_offset
from .core import TargetId

DEFAULT_COMMIT_RATIO = 20.0
PRIOR_MIX_EPSILON = 0.02
CORRECTIVE_PRIOR_FLOOR = 0.01
SPEED_LEVELS = range(0, 21)
# One click cannot separate phase-adjacent clocks whose offsets fall in the
# same likelihood bin, so a large prior gap could commit instantly on a
# single uninformative click.  Requiring a second click lets the phase
# reassignment place the contenders half a period apart first.
MIN_CLICKS_TO_COMMIT = 2


def rotation_period(level: int) -> int:
    """Rotation period in ms for a speed index: 4 e^(-l/10) seconds."""
    if level not in SPEED_LEVELS:
        raise ValueError(f"speed level must be in [0, 20], got {level}")
    return round(4000.0 * math.exp(-level / 10.0))


def bit_reversed_slots(n: int) -> tuple[list[int], int]:
    """First n slots of the bit-reversed walk over an m-slot circle.

    m is n padded to the next power of two; handing out slots in
    bit-reversed index order puts consecutive recipients maximally far
    apart on the m-grid: the first two recipients are m/2 slots apart, the
    first four m/4 apart, and so on.  Returns (slots, m); slot values range
    over [0, m), not [0, n).
    """
    if n < 1:
        raise ValueError("need at least one slot")
    bits = max(1, (n - 1).bit_length())
    m = 1 << bits
    order = [int(format(i, f"0{bits}b")[::-1], 2) for i in range(m)]
    return order[:n], m


def assign_phases(targets_by_prior_desc: list[TargetId], period: int,
                  anchor: int = 0) -> dict[str, float]:
    """Phase (next-noon offset from `anchor`) per target id.

    The k-th most probable target receives the k-th bit-reversed slot on a
    power-of-two grid of noon times, so the two most probable targets sit
    exactly T/2 apart and the top four T/4 apart regardless of how many
    clocks are live.  Deterministic: callers pre-sort by (descending
    prior, target id).
    """
    n = len(targets_by_prior_desc)
    slots, m = bit_reversed_slots(n)
    phases = {}
    for rank, target in enumerate(targets_by_prior_desc):
        phases[target.id] = (anchor + slots[rank] * period / m) % period
    return phases


@dataclass
class Selection:
    target: TargetId
    t: int
    clicks: int
    posterior: float
    runner_up: float


class NomonEngine:
    """One engine instance per session; mutations via a serial event stream."""

    def __init__(self, targets: list[TargetId], priors: dict[str, float],
                 dist: ClickTimeDistribution, period: int,
                 commit_ratio: float = DEFAULT_COMMIT_RATIO,
                 commit_rule: str = "ratio", start_time: int = 0,
                 min_clicks: int = MIN_CLICKS_TO_COMMIT,
                 keep_trace: bool = False):
        if commit_rule not in ("ratio", "difference"):
            raise ValueError("commit_rule must be 'ratio' or 'difference'")
        self.period = int(period)
        self.commit_ratio = float(commit_ratio)
        self.commit_rule = commit_rule
        self.min_clicks = int(min_clicks)
        self.dist = dist.rescaled(period) if dist.period != period else dist
        self._log_bin_density = self.dist.log_density_at_bins()
        self._binwidth = self.dist.binwidth
        self.last_event_time = int(start_time)
        self.clicks_this_round = 0
        self._round_clicks: list[tuple[int, np.ndarray]] = []
        self.keep_trace = keep_trace
        self.trace: list[str] = []
        self.set_targets(targets, priors, anchor=start_time)

    # -- configuration ------------------------------------------------------

    def set_targets(self, targets: list[TargetId], priors: dict[str, float],
                    anchor: int | None = None) -> None:
        """Install the live target set with (possibly unnormalized) priors."""
        if not targets:
            raise ValueError("engine needs at least one target")
        missing = [t.id for t in targets if t.id not in priors]
        if missing:
            raise KeyError(f"missing prior for targets: {missing[:3]}")
        self.targets = list(targets)
        self.index = {t.id: i for i, t in enumerate(self.targets)}
        raw = np.array([max(priors[t.id], 0.0) for t in self.targets])
        if raw.sum() <= 0:
            raw = np.ones(len(self.targets))
        p = raw / raw.sum()
        n = len(self.targets)
        p = (1.0 - PRIOR_MIX_EPSILON) * p + PRIOR_MIX_EPSILON / n
        self.log_prior = np.log(p)
        self.log_post = self.log_prior.copy()
        self.clicks_this_round = 0
        self._round_clicks = []
        self._reassign_phases(self.last_event_time if anchor is None else anchor)

    def set_priors_from_lm(self, scores: dict[str, float]) -> None:
        """Reset the decision round with language-model scores."""
        self.set_targets(self.targets, scores)

    # -- phases -------------------------------------------------------------

    def _reassign_phases(self, anchor: int) -> None:
        order = sorted(range(len(self.targets)),
                       key=lambda i: (-self.log_post[i], self.targets[i].id))
        ordered = [self.targets[i] for i in order]
        self.phases = assign_phases(ordered, self.period, anchor=anchor)
        self._phase_vec = np.array([self.phases[t.id] for t in self.targets])

    def noon_time(self, target: TargetId | str, now: int) -> float:
        """Earliest time >= now at which the target's hand crosses noon."""
        tid = target if isinstance(target, str) else target.id
        if tid not in self.phases:
            raise KeyError(f"unknown target {tid}")
        phase = self.phases[tid]
        return now + (phase - now) % self.period

    # -- clicks -------------------------------------------------------------

    def _log_likelihoods(self, t_click: int) -> np.ndarray:
        offsets = (t_click - self._phase_vec + self.period / 2) % self.period
        bins = np.minimum((offsets / self._binwidth).astype(np.int64),
                          self.dist.bins - 1)
        return self._log_bin_density[bins]

    def observe_click(self, t_click: int) -> Selection | None:
        """Fold one click into the posterior; commit or separate phases."""
        t_click = int(t_click)
        if t_click < self.last_event_time:
            raise ValueError("click timestamps must be non-decreasing")
        self.last_event_time = t_click
        self._round_clicks.append((t_click, self._phase_vec.copy()))
        self.clicks_this_round += 1

        self.log_post = self.log_post + self._log_likelihoods(t_click)
        self.log_post -= _logsumexp(self.log_post)

        order = np.argsort(-self.log_post, kind="stable")
        if len(order) > 1:
            best, second = int(order[0]), int(order[1])
            lp1, lp2 = self.log_post[best], self.log_post[second]
            if self.commit_rule == "ratio":
                commit = lp1 - lp2 >= math.log(self.commit_ratio)
            else:
                commit = math.exp(lp1) - math.exp(lp2) >= self.commit_ratio
            commit = commit and self.clicks_this_round >= self.min_clicks
        else:
            best = second = 0
            lp1 = lp2 = self.log_post[0]
            commit = True      # a lone clock is selected by any click
        winner = self.targets[best]
        if self.keep_trace:
            self.trace.append(f"t={t_click} ev=click target={winner.id} "
                              f"post1={math.exp(lp1):.6f} post2={math.exp(lp2):.6f}")
        if commit:
            sel = Selection(target=winner, t=t_click, clicks=self.clicks_this_round,
                            posterior=math.exp(lp1), runner_up=math.exp(lp2))
            if self.keep_trace:
                self.trace.append(f"t={t_click} ev=select target={winner.id} "
                                  f"post1={sel.posterior:.6f} post2={sel.runner_up:.6f}")
            self._pending_feedback = (winner, list(self._round_clicks))
            self.log_post = self.log_prior.copy()
            self.clicks_this_round = 0
            self._round_clicks = []
            self._reassign_phases(t_click)
            return sel
        self._reassign_phases(t_click)
        return None

    def click_feedback(self) -> list[float]:
        """Offsets of the finished round's clicks relative to the winner's
        then-current noons; feed these to ClickTimeDistribution.update."""
        pending = getattr(self, "_pending_feedback", None)
        if pending is None:
            raise RuntimeError("no selection pending feedback")
        winner, clicks = pending
        self._pending_feedback = None
        idx = self.index[winner.id]
        return [wrap_offset(t, phases[idx], self.period) for t, phases in clicks]

    # -- introspection ------------------------------------------------------

    def posterior(self) -> dict[str, float]:
        return {t.id: float(math.exp(lp)) for t, lp in zip(self.targets, self.log_post)}


def _logsumexp(x: np.ndarray) -> float:
    m = np.max(x)
    return float(m + np.log(np.sum(np.exp(x - m))))


def build_text_priors(char_probs: dict[str, float],
                      completion_scores: dict[str, float],
                      corrective_ids: list[str],
                      corrective_floor: float = CORRECTIVE_PRIOR_FLOOR) -> dict[str, float]:
    """Unnormalized priors for a text round: characters from the character
    model, completions from prediction scores, correctives at a fixed floor."""
    priors: dict[str, float] = {}
    char_total = sum(char_probs.values()) or 1.0
    comp_total = sum(completion_scores.values())
    scale = 1.0 / (char_total + comp_total)
    for tid, p in char_probs.items():
        priors[tid] = p * scale
    for tid, p in completion_scores.items():
        priors[tid] = p * scale
    for tid in corrective_ids:
        priors[tid] = corrective_floor
    return priors
