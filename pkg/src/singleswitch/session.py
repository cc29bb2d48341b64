"""Live-session service: one engine per connection, JSON wire protocol.

The protocol-independent core is `SessionCore`; the FastAPI WebSocket app in
`create_app` is a thin transport wrapper around it.  Every message is a JSON
object with a `kind`, a per-direction strictly increasing `seq`, and integer
millisecond timestamps.  All traffic is persisted as JSON lines; those files
are the input for replay and offline metrics.

Client -> server kinds: hello, click, done, settings_change.
Server -> client kinds: config, state, selection, text_update, phrase_prompt,
calib_prompt, flash, settings_change, notice, error, done.

Click times arrive as client-side timestamps and are translated onto the
session's engine clock with an offset estimate (median of the last 9
server_recv - client_sent differences).  The translated engine time is
written into the persisted record of each click, which is what makes a log
replayable bit-for-bit: a record carrying `engine_time` bypasses translation.
"""

from __future__ import annotations

import asyncio
import json
import os
import statistics
import time
import uuid
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .clickmodel import (ClickTimeDistribution, default_prior_distribution,
                         init_from_calibration, load_distribution,
                         save_distribution, wrap_offset)
from .core import (CompletionPlacement, Layout, Ordering, SessionLog,
                   TargetKind, build_nomon_layout, build_picture_layout,
                   build_rcs_layout, completion_target, make_rng)
from .lab import bundled_phrases_path, default_language_model, load_phrases
from .lm import LanguageModel
from .metrics import phrase_metrics, srt_dct
from .nomon import NomonEngine, rotation_period
from .rcs import RcsEngine, extra_delay, scan_time
from .simuser import TextBuffer, _nomon_round_setup, _rcs_shown

CALIBRATION_PROMPTS = 20
REACTION_FLASHES = 30
FLASH_INTERVAL_MS = (2000, 6000)        # uniform; the exact law is a choice
OFFSET_WINDOW = 9                       # clock-offset estimate sample count
PICTURE_TARGETS = 60
PICTURE_SEQUENCE = 5


@dataclass
class SessionConfig:
    engine: str = "nomon"               # "nomon" | "rcs" (ignored: reaction)
    task: str = "text"                  # "text" | "picture" | "reaction"
    user: str = "anon"
    seed: int = 0
    speed: int = 0                      # l (clock) or j (scan); slowest first
    delay: int = 0                      # k (scan extra delay index)
    w_c: int = 3
    w_max: int = 17
    n_phrases: int = 1
    n_sequences: int = 1
    calibrate: bool = False
    calib_prompts: int = CALIBRATION_PROMPTS

    @classmethod
    def from_payload(cls, payload: dict) -> "SessionConfig":
        cfg = cls()
        for k, v in payload.items():
            if hasattr(cfg, k):
                setattr(cfg, k, v)
        if cfg.engine not in ("nomon", "rcs"):
            raise ValueError(f"unknown engine {cfg.engine!r}")
        if cfg.task not in ("text", "picture", "reaction"):
            raise ValueError(f"unknown task {cfg.task!r}")
        if not 0 <= cfg.speed <= 20 or not 0 <= cfg.delay <= 10:
            raise ValueError("speed/delay index out of range")
        return cfg


def _layout_payload(layout: Layout) -> dict:
    return {
        "rows": layout.rows, "cols": layout.cols,
        "ordering": layout.ordering.value,
        "placement": layout.completion_placement.value,
        "w_max": layout.w_max, "w_c": layout.w_c,
        "cells": [{"r": r, "c": c, "id": t.id, "kind": t.kind.value,
                   "label": t.label}
                  for (r, c), t in sorted(layout.cells.items())
                  if t is not None],
    }


class ProtocolError(Exception):
    pass


class SessionCore:
    """Serialized per-connection state machine; transport independent.

    Feed inbound messages to handle_message and call poll(now) for
    timer-driven output (reaction-task flashes).  Both return the outbound
    messages to deliver, in order.
    """

    def __init__(self, session_id: str, log_dir: str | None = None,
                 lm: LanguageModel | None = None,
                 now_fn=lambda: int(time.monotonic() * 1000)):
        self.session_id = session_id
        self.log_dir = log_dir
        self._lm = lm
        self.now_fn = now_fn
        self.seq_out = 0
        self.last_seq_in: int | None = None
        self.phase = "awaiting_hello"    # calibrating | running | finished
        self.t0: int | None = None       # server clock at hello; engine t=0
        self.offsets: list[int] = []     # server_recv - client_sent samples
        self.last_engine_time = 0
        self.last_client_time: int | None = None
        self.config: SessionConfig | None = None
        self.engine = None
        self.layout: Layout | None = None
        self.buf = TextBuffer()
        self.log = SessionLog()          # engine-time click/select/text events
        self.calib_offsets: list[float] = []
        self.dist: ClickTimeDistribution | None = None
        self.phrases: list[tuple[str, str]] = []
        self.phrase_index = 0
        self.shown_words: list[str] = []
        self.picture_goals: list[list[int]] = []
        self.picture_pos = 0
        self.picture_correct = 0
        self.flash_times: list[int] = []     # engine time
        self.flashes_sent = 0
        self.click_times: list[int] = []     # engine time (reaction task)
        self.reported_metrics: list[dict] = []
        self._log_fh = None
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
            self._log_fh = open(os.path.join(log_dir, f"{session_id}.jsonl"), "w")

    # -- plumbing -----------------------------------------------------------

    def _persist(self, record: dict) -> None:
        if self._log_fh:
            self._log_fh.write(json.dumps(record, sort_keys=True) + "\n")
            self._log_fh.flush()

    def _out(self, kind: str, **payload) -> dict:
        self.seq_out += 1
        msg = {"kind": kind, "seq": self.seq_out,
               "server_time": self.now_fn(), **payload}
        self._persist({"dir": "out", **msg})
        return msg

    def close(self) -> None:
        if self._log_fh:
            self._log_fh.close()
            self._log_fh = None

    # -- inbound ------------------------------------------------------------

    def handle_message(self, msg: dict) -> list[dict]:
        recv = self.now_fn()
        engine_t = None
        error = None
        if msg.get("kind") == "click" and self.phase != "awaiting_hello":
            if "engine_time" in msg:     # replayed server annotation
                engine_t = int(msg["engine_time"])
            else:
                try:
                    engine_t = self._translate(msg.get("client_time"), recv)
                except ProtocolError as e:
                    error = e
        record = dict(msg)
        record["dir"] = "in"
        record["server_recv"] = recv
        if engine_t is not None:
            record["engine_time"] = engine_t
        self._persist(record)
        if error is not None:
            return [self._out("error", message=str(error))]
        try:
            return self._dispatch(msg, engine_t)
        except ProtocolError as e:
            return [self._out("error", message=str(e))]

    def _translate(self, client_time, recv: int) -> int:
        """Client timestamp -> engine clock, via the running offset median."""
        if not isinstance(client_time, int):
            raise ProtocolError("click requires an integer client_time")
        if self.last_client_time is not None and client_time < self.last_client_time:
            raise ProtocolError(
                f"out-of-order client timestamp {client_time} < {self.last_client_time}")
        self.last_client_time = client_time
        self.offsets.append(recv - client_time)
        est = int(statistics.median(self.offsets[-OFFSET_WINDOW:]))
        t = client_time + est - self.t0
        if t <= self.last_engine_time:
            t = self.last_engine_time + 1
        return t

    def _dispatch(self, msg: dict, engine_t: int | None) -> list[dict]:
        kind = msg.get("kind")
        seq = msg.get("seq")
        if not isinstance(seq, int) or (self.last_seq_in is not None
                                        and seq <= self.last_seq_in):
            raise ProtocolError(f"client seq must strictly increase, got {seq}")
        self.last_seq_in = seq
        if kind == "hello":
            return self._on_hello(msg)
        if self.phase == "awaiting_hello":
            raise ProtocolError("first message must be hello")
        if kind == "click":
            return self._on_click(engine_t)
        if kind == "done":
            return self._on_done(msg)
        if kind == "settings_change":
            return self._on_settings(msg)
        raise ProtocolError(f"unknown message kind {kind!r}")

    # -- session opening ----------------------------------------------------

    def _on_hello(self, msg: dict) -> list[dict]:
        if self.phase != "awaiting_hello":
            raise ProtocolError("session already open")
        try:
            self.config = SessionConfig.from_payload(msg.get("config", {}))
        except ValueError as e:
            raise ProtocolError(str(e)) from e
        cfg = self.config
        self.t0 = self.now_fn()
        out = []

        if cfg.task == "reaction":
            rng = make_rng(cfg.seed, 99)
            t = 0
            for _ in range(REACTION_FLASHES):
                t += int(rng.integers(*FLASH_INTERVAL_MS))
                self.flash_times.append(t)
            self.phase = "running"
            out.append(self._out("config", session=self.session_id,
                                 config=vars(cfg), flashes=REACTION_FLASHES))
            return out

        self.dist = self._load_user_dist()
        if cfg.task == "picture":
            self.layout = build_picture_layout(PICTURE_TARGETS)
            rng = make_rng(cfg.seed, 98)
            self.picture_goals = [
                [int(x) for x in rng.integers(0, PICTURE_TARGETS,
                                              PICTURE_SEQUENCE)]
                for _ in range(cfg.n_sequences)]
        elif cfg.engine == "nomon":
            self.layout = build_nomon_layout(cfg.w_c, cfg.w_max)
        else:
            self.layout = build_rcs_layout(Ordering.FREQUENCY,
                                           CompletionPlacement.TOP,
                                           min(cfg.w_max, 7))
        if cfg.task == "text":
            self.phrases = load_phrases(bundled_phrases_path(), seed=cfg.seed,
                                        count=cfg.n_phrases)
        out.append(self._out("config", session=self.session_id,
                             config=vars(cfg),
                             layout=_layout_payload(self.layout),
                             dist=self._dist_payload(),
                             **self._engine_params()))
        if cfg.calibrate and cfg.engine == "nomon":
            self.phase = "calibrating"
            out.append(self._calib_prompt())
        else:
            self.phase = "running"
            self._build_engine()
            out.extend(self._begin_round())
            out.append(self._state())
        return out

    def _engine_params(self) -> dict:
        cfg = self.config
        if cfg.engine == "nomon":
            return {"period": rotation_period(cfg.speed)}
        return {"scan_ms": scan_time(cfg.speed),
                "delay_ms": extra_delay(cfg.delay)}

    def _dist_payload(self) -> dict:
        d = self.dist
        return {"period": d.period, "kernel_sigma": d.kernel_sigma,
                "floor": d.floor, "weights": [float(w) for w in d.weights]}

    def _load_user_dist(self) -> ClickTimeDistribution:
        period = self._period()
        if self.log_dir:
            path = os.path.join(self.log_dir, f"{self.config.user}.dist")
            if os.path.exists(path):
                return load_distribution(path).rescaled(period)
        return default_prior_distribution(period)

    def _period(self) -> int:
        cfg = self.config
        if cfg.engine == "nomon":
            return rotation_period(cfg.speed)
        return 2 * scan_time(cfg.speed)

    def lm(self) -> LanguageModel:
        if self._lm is None:
            self._lm = default_language_model()
        return self._lm

    # -- engine lifecycle ---------------------------------------------------

    def _build_engine(self) -> None:
        cfg = self.config
        start = self.last_engine_time
        if cfg.task == "picture":
            targets = self.layout.targets()
            priors = {t.id: 1.0 for t in targets}
            if cfg.engine == "nomon":
                self.engine = NomonEngine(targets, priors, self.dist,
                                          self._period(), start_time=start)
            else:
                self.engine = RcsEngine(self.layout, scan_time(cfg.speed),
                                        extra_delay(cfg.delay), start_time=start)
            return
        if cfg.engine == "nomon":
            targets, priors, self.shown_words = _nomon_round_setup(
                self.layout, self.lm(), self.buf.text)
            self.engine = NomonEngine(targets, priors, self.dist,
                                      self._period(), start_time=start)
        else:
            self.engine = RcsEngine(self.layout, scan_time(cfg.speed),
                                    extra_delay(cfg.delay), start_time=start)
            self.shown_words = _rcs_shown(self.layout, self.lm(), self.buf.text)
            self.engine.set_filled_slots(len(self.shown_words))

    def _begin_round(self) -> list[dict]:
        cfg = self.config
        if cfg.task == "text":
            if self.phrase_index >= len(self.phrases):
                return [self._task_done()]
            tag, phrase = self.phrases[self.phrase_index]
            return [self._out("phrase_prompt", phrase=phrase, iv_oov=tag,
                              index=self.phrase_index)]
        if cfg.task == "picture":
            seq_idx = self.picture_pos // PICTURE_SEQUENCE
            if seq_idx >= len(self.picture_goals):
                return [self._task_done()]
            seq = self.picture_goals[seq_idx]
            return [self._out("phrase_prompt",
                              targets=[f"pic:{i}" for i in seq],
                              position=self.picture_pos % PICTURE_SEQUENCE)]
        return []

    def _calib_prompt(self) -> dict:
        return self._out("calib_prompt", period=self._period(), phase=0,
                         remaining=self.config.calib_prompts - len(self.calib_offsets))

    # -- state snapshots ----------------------------------------------------

    def _state(self) -> dict:
        cfg = self.config
        if self.engine is None:
            return self._out("state", engine=cfg.engine, text=self.buf.text)
        if cfg.engine == "nomon":
            return self._out("state", engine="nomon",
                             period=self.engine.period,
                             phases=dict(sorted(self.engine.phases.items())),
                             posterior=dict(sorted(self.engine.posterior().items())),
                             shown_words=self.shown_words,
                             text=self.buf.text)
        mode, index = self.engine.highlighted()
        return self._out("state", engine="rcs", mode=mode.value,
                         highlight=index,
                         dwell=list(self.engine.dwell_boundaries()),
                         shown_words=self.shown_words,
                         text=self.buf.text)

    # -- clicks -------------------------------------------------------------

    def _on_click(self, t: int | None) -> list[dict]:
        if t is None:
            raise ProtocolError("click requires an integer client_time")
        if self.phase == "finished":
            return [self._out("notice", message="session finished; click ignored")]
        if self.phase == "calibrating":
            return self._calib_click(t)
        if self.config.task == "reaction":
            self.click_times.append(t)
            self.last_engine_time = t
            return []
        if self.engine is None:
            return [self._out("notice", message="no active engine; click ignored")]
        self.last_engine_time = t
        self.log.append(t, "click")
        sel = self.engine.observe_click(t)
        out = []
        if sel is not None:
            if self.config.engine == "nomon":
                for off in self.engine.click_feedback():
                    self.dist = self.dist.update(off)
            out.extend(self._on_selection(sel))
        out.append(self._state())
        return out

    def _calib_click(self, t: int) -> list[dict]:
        period = self._period()
        self.calib_offsets.append(wrap_offset(t, 0.0, period))
        self.last_engine_time = t
        if len(self.calib_offsets) < self.config.calib_prompts:
            return [self._calib_prompt()]
        self.dist = init_from_calibration(self.calib_offsets, period)
        if self.log_dir:
            save_distribution(self.dist, os.path.join(
                self.log_dir, f"{self.config.user}.dist"))
        self.phase = "running"
        self._build_engine()
        out = [self._out("notice", message="calibration complete")]
        out.extend(self._begin_round())
        out.append(self._state())
        return out

    def _on_selection(self, sel) -> list[dict]:
        cfg = self.config
        target = sel.target
        out = []
        if target is None:       # empty scanning cell
            self.log.append(sel.t, "select", target="empty", corrective=False)
            return out
        if cfg.task == "picture":
            goal_seq = self.picture_goals[self.picture_pos // PICTURE_SEQUENCE]
            goal = goal_seq[self.picture_pos % PICTURE_SEQUENCE]
            correct = target.id == f"pic:{goal}"
            self.picture_correct += int(correct)
            self.log.append(sel.t, "select", target=target.id,
                            corrective=False, correct=correct)
            out.append(self._out("selection", target=target.id, t=sel.t,
                                 correct=correct))
            self.picture_pos += 1
            if cfg.engine == "nomon":
                targets = self.layout.targets()
                self.engine.set_targets(targets, {t.id: 1.0 for t in targets})
            out.extend(self._begin_round())
            return out

        # text task
        if cfg.engine == "rcs" and target.kind is TargetKind.WORD_COMPLETION:
            slot = int(target.id.split(":")[1])
            if slot >= len(self.shown_words):
                self.log.append(sel.t, "select", target="empty", corrective=False)
                return out
            target = completion_target(self.shown_words[slot])
        self.log.append(sel.t, "select", target=target.id,
                        corrective=target.is_corrective(),
                        clicks=getattr(sel, "clicks", 2))
        self.buf.apply(target, self.shown_words)
        self.log.append(sel.t, "text", text=self.buf.text)
        out.append(self._out("selection", target=target.id, t=sel.t))
        out.append(self._out("text_update", text=self.buf.text))
        if cfg.engine == "nomon":
            targets, priors, self.shown_words = _nomon_round_setup(
                self.layout, self.lm(), self.buf.text)
            self.engine.set_targets(targets, priors)
        else:
            self.shown_words = _rcs_shown(self.layout, self.lm(), self.buf.text)
            self.engine.set_filled_slots(len(self.shown_words))
        return out

    # -- phrase / task completion -------------------------------------------

    def _on_done(self, msg: dict) -> list[dict]:
        cfg = self.config
        if cfg.task == "text" and self.phase == "running":
            tag, phrase = self.phrases[self.phrase_index]
            metrics = self._phrase_metrics(phrase)
            self.reported_metrics.append(metrics)
            self.phrase_index += 1
            out = [self._out("done", scope="phrase", metrics=metrics)]
            self.buf = TextBuffer()
            self.log = SessionLog()
            if self.phrase_index >= len(self.phrases):
                out.append(self._task_done())
            else:
                self._build_engine()
                out.extend(self._begin_round())
                out.append(self._state())
            return out
        return [self._task_done()]

    def _phrase_metrics(self, phrase: str) -> dict:
        if not self.log.clicks() or not self.log.selections():
            return {"phrase": phrase, "final_text": self.buf.text}
        pm = phrase_metrics(self.log, phrase, self.buf.text)
        return {"phrase": phrase, "final_text": self.buf.text,
                "wpm": pm.entry_rate, "cpc": pm.click_load,
                "corr_rate": pm.correction_rate,
                "err_rate": pm.final_error_rate,
                "clicks": pm.clicks, "duration_ms": pm.duration_ms}

    def _task_done(self) -> dict:
        self.phase = "finished"
        cfg = self.config
        if cfg.task == "reaction":
            try:
                stats = srt_dct(self.flash_times[:self.flashes_sent],
                                self.click_times)
                payload = {"srt_mean": stats.srt_mean,
                           "dct_mean": stats.dct_mean, "trials": stats.trials}
            except ValueError:
                payload = {"trials": 0}
            return self._out("done", scope="task", reaction=payload)
        if cfg.task == "picture":
            return self._out("done", scope="task",
                             selections=self.picture_pos,
                             correct=self.picture_correct)
        return self._out("done", scope="task",
                         phrases=len(self.reported_metrics),
                         metrics=self.reported_metrics)

    # -- settings -----------------------------------------------------------

    def _on_settings(self, msg: dict) -> list[dict]:
        cfg = self.config
        if cfg.task == "text" and self.log.clicks():
            return [self._out("settings_change", accepted=False,
                              message="settings change only between phrases")]
        changes = msg.get("changes", {})
        new = {"speed": cfg.speed, "delay": cfg.delay}
        for key in new:
            if key in changes:
                if abs(int(changes[key]) - new[key]) > 1:
                    return [self._out("settings_change", accepted=False,
                                      message=f"{key} may change by at most 1")]
                new[key] = int(changes[key])
        if not 0 <= new["speed"] <= 20 or not 0 <= new["delay"] <= 10:
            return [self._out("settings_change", accepted=False,
                              message="speed index out of range")]
        cfg.speed, cfg.delay = new["speed"], new["delay"]
        if self.dist is not None:
            self.dist = self.dist.rescaled(self._period())
        if self.engine is not None:
            self._build_engine()
        out = [self._out("settings_change", accepted=True,
                         speed=cfg.speed, delay=cfg.delay,
                         **self._engine_params())]
        if self.engine is not None:
            out.append(self._state())
        return out

    # -- timers (reaction flashes) ------------------------------------------

    def next_timer(self) -> int | None:
        """Engine time of the next due flash, or None."""
        if (self.phase == "running" and self.config
                and self.config.task == "reaction"
                and self.flashes_sent < len(self.flash_times)):
            return self.flash_times[self.flashes_sent]
        return None

    def poll(self, now_engine_time: int) -> list[dict]:
        out = []
        while (self.next_timer() is not None
               and self.flash_times[self.flashes_sent] <= now_engine_time):
            t = self.flash_times[self.flashes_sent]
            self.flashes_sent += 1
            out.append(self._out("flash", index=self.flashes_sent - 1, t=t))
        if (self.config and self.config.task == "reaction"
                and self.phase == "running"
                and self.flashes_sent == len(self.flash_times)
                and now_engine_time >= self.flash_times[-1] + FLASH_INTERVAL_MS[1]):
            out.append(self._task_done())
        return out


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def read_log(path) -> list[dict]:
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def replay_log(path, lm: LanguageModel | None = None) -> dict:
    """Re-run a persisted session's inbound records against a fresh core.

    Inbound click records carry the server's engine-time annotation, so the
    fresh engine sees exactly the click times the live engine saw; the
    starting click distribution is restored from the recorded config message.
    Returns the reproduced texts, selections, and per-phrase metrics.
    """
    messages = read_log(path)
    core = SessionCore("replay", log_dir=None, lm=lm, now_fn=lambda: 0)
    config_msg = next((m for m in messages
                       if m["dir"] == "out" and m["kind"] == "config"), None)
    texts, selections, metrics = [], [], []
    for m in (m for m in messages if m["dir"] == "in"):
        record = {k: v for k, v in m.items() if k not in ("dir", "server_recv")}
        outs = core.handle_message(record)
        if record["kind"] == "hello" and config_msg and "dist" in config_msg:
            d = config_msg["dist"]
            core.dist = ClickTimeDistribution(
                period=float(d["period"]),
                weights=np.array(d["weights"]),
                kernel_sigma=float(d["kernel_sigma"]),
                floor=float(d["floor"]))
            if core.engine is not None and core.config.engine == "nomon" \
                    and core.config.task != "reaction":
                core._build_engine()
        for o in outs:
            if o["kind"] == "selection":
                selections.append(o["target"])
            elif o["kind"] == "text_update":
                texts.append(o["text"])
            elif o["kind"] == "done" and o.get("scope") == "phrase":
                metrics.append(o["metrics"])
    return {"final_text": texts[-1] if texts else "",
            "texts": texts, "selections": selections, "metrics": metrics}


# ---------------------------------------------------------------------------
# websocket transport
# ---------------------------------------------------------------------------

def create_app(log_dir: str = "sessions", lm: LanguageModel | None = None):
    """FastAPI app exposing the wire protocol at /ws."""
    app = FastAPI(title="singleswitch session service")

    @app.get("/health")
    def health():
        return {"ok": True}

    @app.websocket("/ws")
    async def ws(sock: WebSocket):
        await sock.accept()
        core = SessionCore(session_id=uuid.uuid4().hex[:12],
                           log_dir=log_dir, lm=lm)
        try:
            while True:
                timeout = None
                nxt = core.next_timer()
                if nxt is not None and core.t0 is not None:
                    now = core.now_fn() - core.t0
                    timeout = max((nxt - now) / 1000.0, 0.0)
                try:
                    raw = await asyncio.wait_for(sock.receive_text(), timeout)
                    outs = core.handle_message(json.loads(raw))
                except asyncio.TimeoutError:
                    outs = core.poll(core.now_fn() - core.t0)
                for o in outs:
                    await sock.send_text(json.dumps(o))
        except WebSocketDisconnect:
            pass
        finally:
            core.close()

    return app
