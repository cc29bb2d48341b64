/** View model and its reducer.
 *
 * The view holds no selection logic: text, selections, highlights, and clock
 * phases all come from server messages.  The only locally tracked fact is
 * whether a click has been sent since the last phrase boundary, which is what
 * locks the settings panel mid-phrase.
 */

import type { LayoutPayload, ServerMessage } from "./protocol.js";

export interface ViewModel {
  connection: "connecting" | "open" | "closed";
  session: string | null;
  engine: "nomon" | "rcs" | null;
  task: string | null;
  layout: LayoutPayload | null;
  // nomon snapshot
  periodMs: number | null;
  phases: Record<string, number>;
  posterior: Record<string, number>;
  // rcs snapshot
  mode: "row_scan" | "col_scan" | null;
  highlight: number;
  dwell: number[];
  scanMs: number | null;
  delayMs: number | null;
  // shared
  shownWords: string[];
  text: string;
  prompt: string | null;
  promptTag: string | null;
  pictureTargets: string[];
  picturePosition: number;
  calib: { period: number; remaining: number } | null;
  flash: { index: number; t: number } | null;
  lastSelection: { target: string; t: number } | null;
  settings: { speed: number; delay: number };
  clickedThisPhrase: boolean;
  notice: string | null;
  error: string | null;
  done: { scope: string; payload: unknown } | null;
  lastServerSeq: number;
}

export function initialViewModel(): ViewModel {
  return {
    connection: "connecting",
    session: null,
    engine: null,
    task: null,
    layout: null,
    periodMs: null,
    phases: {},
    posterior: {},
    mode: null,
    highlight: 0,
    dwell: [],
    scanMs: null,
    delayMs: null,
    shownWords: [],
    text: "",
    prompt: null,
    promptTag: null,
    pictureTargets: [],
    picturePosition: 0,
    calib: null,
    flash: null,
    lastSelection: null,
    settings: { speed: 10, delay: 5 },
    clickedThisPhrase: false,
    notice: null,
    error: null,
    done: null,
    lastServerSeq: 0,
  };
}

/** Settings panel is usable only between phrases. */
export function settingsLocked(vm: ViewModel): boolean {
  return vm.clickedThisPhrase;
}

/** Record that the UI sent a click; locks settings until the next boundary. */
export function noteLocalClick(vm: ViewModel): void {
  vm.clickedThisPhrase = true;
}

/** Mutates vm in place; throws if the server sequence number regresses. */
export function applyMessage(vm: ViewModel, msg: ServerMessage): void {
  if (!Number.isInteger(msg.seq) || msg.seq <= vm.lastServerSeq) {
    throw new Error(`server seq must strictly increase, got ${msg.seq}`);
  }
  vm.lastServerSeq = msg.seq;
  switch (msg.kind) {
    case "config":
      vm.session = msg.session;
      vm.engine = (msg.config.engine as "nomon" | "rcs") ?? null;
      vm.task = (msg.config.task as string) ?? null;
      vm.layout = msg.layout ?? null;
      if (typeof msg.config.speed === "number") vm.settings.speed = msg.config.speed;
      if (typeof msg.config.delay === "number") vm.settings.delay = msg.config.delay;
      if (msg.period !== undefined) vm.periodMs = msg.period;
      if (msg.scan_ms !== undefined) vm.scanMs = msg.scan_ms;
      if (msg.delay_ms !== undefined) vm.delayMs = msg.delay_ms;
      break;
    case "state":
      vm.text = msg.text;
      vm.shownWords = msg.shown_words ?? [];
      if (msg.engine === "nomon") {
        vm.periodMs = msg.period ?? vm.periodMs;
        vm.phases = msg.phases ?? {};
        vm.posterior = msg.posterior ?? {};
      } else {
        vm.mode = msg.mode ?? null;
        vm.highlight = msg.highlight ?? 0;
        vm.dwell = msg.dwell ?? [];
      }
      break;
    case "selection":
      vm.lastSelection = { target: msg.target, t: msg.t };
      if (vm.task === "picture") vm.picturePosition += 1;
      break;
    case "text_update":
      vm.text = msg.text;
      break;
    case "phrase_prompt":
      if (msg.phrase !== undefined) {
        vm.prompt = msg.phrase;
        vm.promptTag = msg.iv_oov ?? null;
      }
      if (msg.targets !== undefined) {
        vm.pictureTargets = msg.targets;
        vm.picturePosition = msg.position ?? 0;
      }
      vm.clickedThisPhrase = false;
      break;
    case "calib_prompt":
      vm.calib = { period: msg.period, remaining: msg.remaining };
      vm.periodMs = msg.period;
      break;
    case "flash":
      vm.flash = { index: msg.index, t: msg.t };
      break;
    case "settings_change":
      if (msg.accepted) {
        if (msg.speed !== undefined) vm.settings.speed = msg.speed;
        if (msg.delay !== undefined) vm.settings.delay = msg.delay;
        if (msg.period !== undefined) vm.periodMs = msg.period;
        if (msg.scan_ms !== undefined) vm.scanMs = msg.scan_ms;
        if (msg.delay_ms !== undefined) vm.delayMs = msg.delay_ms;
      } else {
        vm.notice = msg.message ?? "settings change rejected";
      }
      break;
    case "notice":
      vm.notice = msg.message;
      break;
    case "error":
      vm.error = msg.message;
      break;
    case "done":
      vm.done = { scope: msg.scope, payload: msg };
      if (msg.scope === "phrase") vm.clickedThisPhrase = false;
      break;
  }
}

/**
 * Client-side precheck mirroring the server's settings rules: steps of at
 * most 1, indices in range, and only between phrases.
 */
export function settingsStepAllowed(
  vm: ViewModel, changes: { speed?: number; delay?: number },
): boolean {
  if (settingsLocked(vm)) return false;
  const next = { ...vm.settings, ...changes };
  if (Math.abs(next.speed - vm.settings.speed) > 1) return false;
  if (Math.abs(next.delay - vm.settings.delay) > 1) return false;
  return next.speed >= 0 && next.speed <= 20 && next.delay >= 0 && next.delay <= 10;
}
