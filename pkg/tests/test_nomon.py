"""Clock engine: phase assignment, posterior updates, commit rules."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singleswitch.clickmodel import gaussian_distribution
from singleswitch.core import TargetKind, char_target, corrective_target
from singleswitch.nomon import (NomonEngine, assign_phases, bit_reversed_slots,
                                build_text_priors, rotation_period)


def narrow_dist(period):
    return gaussian_distribution(period, 0.0, period / 1024, bins=1024)


def targets(n):
    return [char_target(c) for c in "abcdefghijklmnopqrstuvwxyz"[:n]]


def make_engine(n=8, period=4000, priors=None, **kw):
    ts = targets(n)
    if priors is None:
        priors = {t.id: 1.0 for t in ts}
    return NomonEngine(ts, priors, narrow_dist(period), period, **kw)


def test_rotation_period_endpoints():
    assert rotation_period(0) == 4000
    assert rotation_period(20) == 541
    periods = [rotation_period(l) for l in range(21)]
    assert periods == sorted(periods, reverse=True)
    with pytest.raises(ValueError):
        rotation_period(21)


@given(st.integers(1, 512))
def test_bit_reversed_slots_properties(n):
    slots, m = bit_reversed_slots(n)
    assert len(slots) == n
    assert m >= n and m & (m - 1) == 0
    assert len(set(slots)) == n
    assert all(0 <= s < m for s in slots)
    assert slots[0] == 0
    if n >= 2:
        assert slots[1] == m // 2
    if n >= 4:
        # first four recipients are at least m/4 apart on the circle
        for i in range(4):
            for j in range(i + 1, 4):
                d = abs(slots[i] - slots[j])
                assert min(d, m - d) >= m // 4


def test_assign_phases_top_two_half_period_apart():
    period = 4000
    phases = assign_phases(targets(7), period)
    vals = [phases[t.id] for t in targets(7)]
    assert all(0 <= v < period for v in vals)
    d = abs(vals[0] - vals[1])
    assert min(d, period - d) == pytest.approx(period / 2)


def test_engine_commits_correct_target_with_min_clicks():
    engine = make_engine(8)
    goal = engine.targets[5]
    now, clicks = 0, 0
    sel = None
    while sel is None:
        noon = engine.noon_time(goal, now + 1)
        now = int(round(noon))
        sel = engine.observe_click(now)
        clicks += 1
    assert sel.target.id == goal.id
    assert clicks >= 2 and sel.clicks == clicks
    assert sel.posterior / max(sel.runner_up, 1e-300) >= engine.commit_ratio


def test_first_click_never_commits():
    engine = make_engine(2)
    goal = engine.targets[0]
    sel = engine.observe_click(int(round(engine.noon_time(goal, 1))))
    assert sel is None


def test_single_target_commits_immediately():
    t = targets(1)
    engine = NomonEngine(t, {t[0].id: 1.0}, narrow_dist(4000), 4000)
    assert engine.observe_click(123) is not None


def test_posterior_normalized_after_clicks():
    engine = make_engine(12, commit_ratio=1e9)
    now = 0
    for _ in range(40):
        now += 137
        engine.observe_click(now)
        post = engine.posterior()
        assert abs(sum(post.values()) - 1.0) < 1e-9


def selection_sequence(priors_scale):
    ts = targets(6)
    priors = {t.id: priors_scale * (i + 1) for i, t in enumerate(ts)}
    engine = NomonEngine(ts, priors, narrow_dist(4000), 4000)
    out, now = [], 0
    for k in (0, 3, 5, 1):
        goal = ts[k]
        sel = None
        while sel is None:
            now = int(round(engine.noon_time(goal, now + 1)))
            sel = engine.observe_click(now)
        out.append((sel.target.id, sel.t, sel.clicks))
        engine.set_targets(ts, priors)
    return out


def test_prior_scale_invariance():
    base = selection_sequence(1.0)
    assert selection_sequence(1e-6) == base
    assert selection_sequence(1e6) == base


def test_noon_time_semantics():
    engine = make_engine(4, period=4000)
    for t in engine.targets:
        noon = engine.noon_time(t, 1000)
        assert noon >= 1000
        assert (noon - engine.phases[t.id]) % 4000 == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(KeyError):
        engine.noon_time("char:zzz", 0)


def test_click_feedback_offsets():
    engine = make_engine(5)
    goal = engine.targets[2]
    now, times = 0, []
    sel = None
    while sel is None:
        now = int(round(engine.noon_time(goal, now + 1)))
        times.append(now)
        sel = engine.observe_click(now)
    offsets = engine.click_feedback()
    assert len(offsets) == len(times)
    # ideal clicks land at the winner's noon: offsets are (near) zero
    assert all(abs(o) <= 1.0 for o in offsets)
    with pytest.raises(RuntimeError):
        engine.click_feedback()


def test_phase_reassignment_between_clicks():
    engine = make_engine(8, commit_ratio=1e12)
    before = dict(engine.phases)
    engine.observe_click(700)
    # the posterior changed, so the most probable clocks moved
    assert engine.phases != before


def test_engine_errors():
    with pytest.raises(ValueError):
        make_engine(4, commit_rule="bogus")
    with pytest.raises(ValueError):
        NomonEngine([], {}, narrow_dist(4000), 4000)
    ts = targets(3)
    with pytest.raises(KeyError):
        NomonEngine(ts, {ts[0].id: 1.0}, narrow_dist(4000), 4000)
    engine = make_engine(3)
    engine.observe_click(500)
    with pytest.raises(ValueError):
        engine.observe_click(499)


def test_difference_commit_rule():
    engine = make_engine(4, commit_rule="difference", commit_ratio=0.5)
    goal = engine.targets[1]
    now, sel = 0, None
    while sel is None:
        now = int(round(engine.noon_time(goal, now + 1)))
        sel = engine.observe_click(now)
    assert sel.target.id == goal.id
    assert sel.posterior - sel.runner_up >= 0.5


def test_build_text_priors():
    chars = {"char:a": 0.6, "char:b": 0.2}
    comps = {"word:apple": 0.2}
    priors = build_text_priors(chars, comps, ["corr:undo", "corr:backspace"])
    assert priors["corr:undo"] == priors["corr:backspace"] == 0.01
    assert priors["char:a"] / priors["char:b"] == pytest.approx(3.0)
    assert priors["char:a"] + priors["char:b"] + priors["word:apple"] == \
        pytest.approx(1.0)


def test_trace_records_rounds():
    engine = make_engine(4, keep_trace=True)
    goal = engine.targets[0]
    now, sel = 0, None
    while sel is None:
        now = int(round(engine.noon_time(goal, now + 1)))
        sel = engine.observe_click(now)
    assert any("ev=select" in line for line in engine.trace)
