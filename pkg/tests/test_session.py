"""Session protocol: scripted headless clients against SessionCore."""

import json

import pytest

from protohelpers import make_client, type_phrase_rcs

from singleswitch.core import picture_target
from singleswitch.session import (CALIBRATION_PROMPTS, REACTION_FLASHES,
                                  replay_log)


def test_hello_config_and_state(lm):
    client, core = make_client(lm=lm)
    out = client.hello(engine="rcs", task="text", speed=10, delay=5)
    kinds = [m["kind"] for m in out]
    assert kinds[0] == "config" and "phrase_prompt" in kinds and "state" in kinds
    cfg = out[0]
    assert cfg["seq"] == 1 and cfg["scan_ms"] == 979 and cfg["delay_ms"] == 750
    assert cfg["layout"]["rows"] == 6


def test_first_message_must_be_hello(lm):
    client, _ = make_client(lm=lm)
    out = client.send("click", client_time=50_000)
    assert out[0]["kind"] == "error"


def test_seq_must_strictly_increase(lm):
    client, core = make_client(lm=lm)
    client.hello(engine="rcs", task="text")
    out = core.handle_message({"kind": "done", "seq": 1})
    assert out[0]["kind"] == "error" and "seq" in out[0]["message"]


def test_click_requires_client_time(lm):
    client, _ = make_client(lm=lm)
    client.hello(engine="rcs", task="text")
    out = client.send("click", client_time="soon")
    assert out[0]["kind"] == "error"


def test_out_of_order_client_time_rejected(lm):
    client, core = make_client(lm=lm)
    client.hello(engine="rcs", task="text", speed=10, delay=5)
    client.click_at(2000)
    out = client.send("click", client_time=core.t0 + 1000)
    assert out[0]["kind"] == "error" and "out-of-order" in out[0]["message"]


def test_unknown_kind_is_an_error(lm):
    client, _ = make_client(lm=lm)
    client.hello(engine="rcs", task="text")
    assert client.send("emote")[0]["kind"] == "error"


def test_bad_config_rejected(lm):
    client, _ = make_client(lm=lm)
    out = client.hello(engine="dasher", task="text")
    assert out[0]["kind"] == "error"


def test_rcs_text_phrase_end_to_end(tmp_path, lm):
    client, core = make_client(tmp_path, lm=lm)
    out = client.hello(engine="rcs", task="text", speed=10, delay=5,
                       n_phrases=1, seed=3)
    phrase = next(m for m in out if m["kind"] == "phrase_prompt")["phrase"]
    type_phrase_rcs(client, core, phrase)
    assert core.buf.text.rstrip() == phrase
    done = client.send("done")
    phrase_done = next(m for m in done if m["kind"] == "done"
                       and m["scope"] == "phrase")
    assert phrase_done["metrics"]["err_rate"] == 0.0
    assert phrase_done["metrics"]["wpm"] > 0
    assert any(m["kind"] == "done" and m["scope"] == "task" for m in done)

    # replay the persisted log through a fresh engine: identical final text
    path = tmp_path / "testsess.jsonl"
    core.close()
    replayed = replay_log(path, lm=lm)
    assert replayed["final_text"] == core.buf.text or \
        replayed["texts"][-1].rstrip() == phrase
    assert replayed["metrics"][0]["wpm"] == phrase_done["metrics"]["wpm"]
    assert replayed["metrics"][0]["err_rate"] == 0.0


def test_calibration_flow(tmp_path, lm):
    client, core = make_client(tmp_path, lm=lm)
    out = client.hello(engine="nomon", task="text", calibrate=True, seed=0)
    assert out[-1]["kind"] == "calib_prompt"
    period = out[-1]["period"]
    t = 0
    for i in range(CALIBRATION_PROMPTS):
        t += period
        msgs = client.click_at(t + 120)     # consistent late click
        if i < CALIBRATION_PROMPTS - 1:
            assert msgs[-1]["kind"] == "calib_prompt"
            assert msgs[-1]["remaining"] == CALIBRATION_PROMPTS - i - 1
    assert core.phase == "running"
    assert abs(core.dist.mode_offset() - 120) <= 2 * core.dist.binwidth
    # the learned distribution is persisted for the next session
    assert (tmp_path / "anon.dist").exists()


def test_picture_task_sequence(lm):
    client, core = make_client(lm=lm)
    out = client.hello(engine="rcs", task="picture", speed=10, delay=5,
                       n_sequences=1, seed=4)
    prompt = next(m for m in out if m["kind"] == "phrase_prompt")
    goals = [int(t.split(":")[1]) for t in prompt["targets"]]
    for goal in goals:
        row, col = core.layout.position_of(picture_target(goal))
        engine = core.engine
        t1 = engine.last_event_time + engine.time_to_target_click(row, None)
        client.click_at(t1)
        t2 = engine.last_event_time + engine.time_to_target_click(row, col)
        client.click_at(t2)
    sels = client.of_kind("selection")
    assert len(sels) == len(goals)
    assert all(s["correct"] for s in sels)
    done = client.of_kind("done")[-1]
    assert done["scope"] == "task" and done["correct"] == len(goals)


def test_reaction_task_srt_dct(lm):
    client, core = make_client(lm=lm)
    out = client.hello(task="reaction", seed=0)
    assert out[0]["flashes"] == REACTION_FLASHES
    while True:
        nxt = core.next_timer()
        if nxt is None:
            break
        flashes = core.poll(nxt)
        for m in flashes:
            assert m["kind"] == "flash"
            client.click_at(m["t"] + 350)
            client.click_at(m["t"] + 350 + 180)
    done = core.poll(core.flash_times[-1] + 6000)
    payload = done[-1]["reaction"]
    assert payload["trials"] == REACTION_FLASHES
    assert abs(payload["srt_mean"] - 350) <= 5
    assert abs(payload["dct_mean"] - 180) <= 5


def test_settings_change_stepwise(lm):
    client, core = make_client(lm=lm)
    client.hello(engine="rcs", task="text", speed=10, delay=5)
    ok = client.send("settings_change", changes={"speed": 11})
    assert ok[0]["accepted"] and ok[0]["scan_ms"] == core.engine.scan_ms
    too_big = client.send("settings_change", changes={"speed": 13})
    assert not too_big[0]["accepted"]
    assert core.config.speed == 11
    bad = client.send("settings_change", changes={"delay": 6})
    assert bad[0]["accepted"] and core.config.delay == 6


def test_settings_frozen_mid_phrase(lm):
    client, core = make_client(lm=lm)
    client.hello(engine="rcs", task="text", speed=10, delay=5)
    client.click_at(2000)
    out = client.send("settings_change", changes={"speed": 11})
    assert not out[0]["accepted"]


def test_clicks_after_finish_are_ignored(lm):
    client, core = make_client(lm=lm)
    client.hello(engine="rcs", task="text", n_phrases=1)
    client.send("done")
    client.send("done")
    out = client.click_at(core.last_engine_time + 5000)
    assert out[0]["kind"] == "notice"


def test_persisted_log_is_jsonl(tmp_path, lm):
    client, core = make_client(tmp_path, lm=lm)
    client.hello(engine="rcs", task="text")
    client.click_at(2000)
    core.close()
    lines = (tmp_path / "testsess.jsonl").read_text().splitlines()
    records = [json.loads(ln) for ln in lines]
    assert {r["dir"] for r in records} == {"in", "out"}
    ins = [r for r in records if r["dir"] == "in"]
    assert ins[0]["kind"] == "hello"
    assert "engine_time" in ins[-1]      # click carries the translation
