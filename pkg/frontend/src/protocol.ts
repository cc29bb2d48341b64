/** Wire protocol types. JSON messages, integer millisecond timestamps. */

export type Engine = "nomon" | "rcs";
export type Task = "calibration" | "text" | "picture" | "reaction";

export interface LayoutCell {
  r: number;
  c: number;
  id: string;
  kind: string;
  label: string;
}

export interface LayoutPayload {
  rows: number;
  cols: number;
  ordering: string;
  placement: string;
  w_max: number;
  w_c: number;
  cells: LayoutCell[];
}

interface ServerBase {
  seq: number;
  server_time: number;
}

export interface ConfigMsg extends ServerBase {
  kind: "config";
  session: string;
  config: Record<string, unknown>;
  layout?: LayoutPayload;
  dist?: unknown;
  flashes?: number;
  period?: number;
  scan_ms?: number;
  delay_ms?: number;
}

export interface StateMsg extends ServerBase {
  kind: "state";
  engine: Engine;
  text: string;
  shown_words?: string[];
  // nomon
  period?: number;
  phases?: Record<string, number>;
  posterior?: Record<string, number>;
  // rcs
  mode?: "row_scan" | "col_scan";
  highlight?: number;
  dwell?: number[];
}

export interface SelectionMsg extends ServerBase {
  kind: "selection";
  target: string;
  t: number;
  correct?: boolean;
}

export interface TextUpdateMsg extends ServerBase {
  kind: "text_update";
  text: string;
}

export interface PhrasePromptMsg extends ServerBase {
  kind: "phrase_prompt";
  phrase?: string;
  iv_oov?: string;
  index?: number;
  targets?: string[];
  position?: number;
}

export interface CalibPromptMsg extends ServerBase {
  kind: "calib_prompt";
  period: number;
  phase: number;
  remaining: number;
}

export interface FlashMsg extends ServerBase {
  kind: "flash";
  index: number;
  t: number;
}

export interface SettingsChangeMsg extends ServerBase {
  kind: "settings_change";
  accepted: boolean;
  message?: string;
  speed?: number;
  delay?: number;
  period?: number;
  scan_ms?: number;
  delay_ms?: number;
}

export interface NoticeMsg extends ServerBase {
  kind: "notice";
  message: string;
}

export interface ErrorMsg extends ServerBase {
  kind: "error";
  message: string;
}

export interface DoneMsg extends ServerBase {
  kind: "done";
  scope: "phrase" | "task";
  metrics?: unknown;
  phrases?: number;
  reaction?: unknown;
  correct?: number;
  total?: number;
}

export type ServerMessage =
  | ConfigMsg
  | StateMsg
  | SelectionMsg
  | TextUpdateMsg
  | PhrasePromptMsg
  | CalibPromptMsg
  | FlashMsg
  | SettingsChangeMsg
  | NoticeMsg
  | ErrorMsg
  | DoneMsg;

export interface HelloMsg {
  kind: "hello";
  seq: number;
  config: Record<string, unknown>;
}

export interface ClickMsg {
  kind: "click";
  seq: number;
  client_time: number;
}

export interface ClientDoneMsg {
  kind: "done";
  seq: number;
}

export interface ClientSettingsMsg {
  kind: "settings_change";
  seq: number;
  changes: { speed?: number; delay?: number };
}

export type ClientMessage = HelloMsg | ClickMsg | ClientDoneMsg | ClientSettingsMsg;
