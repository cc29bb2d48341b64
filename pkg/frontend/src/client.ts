/** Session client: sequence numbering, outbound helpers, inbound dispatch.
 *
 * Speaks only the wire protocol; the transport is pluggable so tests can run
 * against an in-process mock server instead of a WebSocket.
 */

import type { ClientMessage, ServerMessage } from "./protocol.js";

type Outbound = ClientMessage extends infer M
  ? M extends ClientMessage ? Omit<M, "seq"> : never
  : never;
import { applyMessage, initialViewModel, noteLocalClick, settingsStepAllowed, ViewModel } from "./state.js";

export interface Transport {
  send(data: string): void;
  close(): void;
  onMessage(handler: (data: string) => void): void;
  onClose(handler: () => void): void;
}

/** Transport over a browser WebSocket. */
export function webSocketTransport(ws: WebSocket): Transport {
  return {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onMessage: (h) => { ws.onmessage = (ev) => h(String(ev.data)); },
    onClose: (h) => { ws.onclose = () => h(); },
  };
}

export class SessionClient {
  readonly vm: ViewModel = initialViewModel();
  private seq = 0;
  private listeners: ((msg: ServerMessage) => void)[] = [];
  private lastClientTime = -Infinity;

  constructor(private transport: Transport) {
    transport.onMessage((data) => this.receive(data));
    transport.onClose(() => { this.vm.connection = "closed"; });
  }

  onMessage(handler: (msg: ServerMessage) => void): void {
    this.listeners.push(handler);
  }

  private receive(data: string): void {
    const msg = JSON.parse(data) as ServerMessage;
    applyMessage(this.vm, msg);
    for (const h of this.listeners) h(msg);
  }

  private send(msg: Outbound): void {
    this.seq += 1;
    this.transport.send(JSON.stringify({ ...msg, seq: this.seq }));
  }

  hello(config: Record<string, unknown>): void {
    this.vm.connection = "open";
    this.send({ kind: "hello", config });
  }

  /** Send one click with a local-clock timestamp; enforces monotonicity. */
  click(clientTime: number): void {
    if (clientTime <= this.lastClientTime) clientTime = this.lastClientTime + 1;
    this.lastClientTime = clientTime;
    noteLocalClick(this.vm);
    this.send({ kind: "click", client_time: clientTime });
  }

  done(): void {
    this.send({ kind: "done" });
  }

  /** Returns false (and sends nothing) if the step is locally invalid. */
  changeSettings(changes: { speed?: number; delay?: number }): boolean {
    if (!settingsStepAllowed(this.vm, changes)) return false;
    this.send({ kind: "settings_change", changes });
    return true;
  }

  close(): void {
    this.transport.close();
  }
}
