/** Browser entry point: wires the socket, the switch, and the render loop. */

import { SessionClient, webSocketTransport } from "./client.js";
import { render } from "./render.js";
import { settingsLocked } from "./state.js";
import { SwitchBinding } from "./switch.js";

function param(name: string, fallback: string): string {
  return new URLSearchParams(location.search).get(name) ?? fallback;
}

function start(): void {
  const canvas = document.getElementById("view") as HTMLCanvasElement;
  const status = document.getElementById("status")!;
  const url = param("server", `ws://${location.hostname || "localhost"}:8000/ws`);

  const ws = new WebSocket(url);
  const client = new SessionClient(webSocketTransport(ws));
  const binding = new SwitchBinding({
    keys: [param("key", "Space")],
    latencyMeanMs: Number(param("latency", "0")),
    latencyJitterMs: Number(param("jitter", "0")),
  });

  // engine time t=0 is when the config message lands
  let localT0: number | null = null;
  client.onMessage((msg) => {
    if (msg.kind === "config") localT0 = Date.now();
    if (msg.kind === "error") status.textContent = `error: ${msg.message}`;
  });

  ws.onopen = () => {
    status.textContent = "connected";
    client.hello({
      engine: param("engine", "rcs"),
      task: param("task", "text"),
      speed: Number(param("speed", "10")),
      delay: Number(param("delay", "5")),
      n_phrases: Number(param("phrases", "3")),
    });
  };
  ws.onclose = () => { status.textContent = "disconnected"; };

  window.addEventListener("keydown", (ev) => {
    if (ev.code === "Enter") { client.done(); return; }
    const stamp = binding.keyDown(ev);
    if (stamp !== null) client.click(stamp);
  });
  window.addEventListener("keyup", (ev) => binding.keyUp(ev));

  for (const [id, key, step] of [
    ["speed-up", "speed", 1], ["speed-down", "speed", -1],
    ["delay-up", "delay", 1], ["delay-down", "delay", -1],
  ] as const) {
    document.getElementById(id)?.addEventListener("click", () => {
      const ok = client.changeSettings({ [key]: client.vm.settings[key] + step });
      if (!ok) status.textContent = "settings locked mid-phrase";
    });
  }

  const frame = () => {
    const engineNow = localT0 === null ? 0 : Date.now() - localT0;
    render(canvas, client.vm, engineNow);
    for (const id of ["speed-up", "speed-down", "delay-up", "delay-down"]) {
      (document.getElementById(id) as HTMLButtonElement | null)?.toggleAttribute(
        "disabled", settingsLocked(client.vm));
    }
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

start();
