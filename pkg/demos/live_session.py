"""Drive the WebSocket session service with a scripted client.

Starts uvicorn in a background thread, connects to /ws, opens a scanning
text session, sends a few clicks, and prints every protocol message.

Usage: python3 demos/live_session.py
"""

import json
import tempfile
import threading
import time

import uvicorn
from websockets.sync.client import connect

from singleswitch.session import create_app

PORT = 8841


def start_server(log_dir):
    config = uvicorn.Config(create_app(log_dir=log_dir), host="127.0.0.1",
                            port=PORT, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.02)
    return server


def main():
    with tempfile.TemporaryDirectory() as log_dir:
        server = start_server(log_dir)
        with connect(f"ws://127.0.0.1:{PORT}/ws") as ws:
            seq = 0

            def send(kind, **payload):
                nonlocal seq
                seq += 1
                ws.send(json.dumps({"kind": kind, "seq": seq, **payload}))

            def recv():
                msg = json.loads(ws.recv())
                body = {k: v for k, v in msg.items()
                        if k not in ("layout", "dist")}
                print(f"<- {json.dumps(body)[:110]}")
                return msg

            send("hello", config={"engine": "rcs", "task": "text",
                                  "speed": 10, "delay": 5, "n_phrases": 1})
            config = recv()
            prompt = recv()
            recv()                              # initial state
            print(f"\nphrase to type: {prompt['phrase']!r}")
            print(f"scan {config['scan_ms']} ms, delay {config['delay_ms']} ms\n")

            # two clicks: pick the first row, then its first cell
            t0 = config["server_time"]
            send("click", client_time=t0 + 1400)
            while recv()["kind"] != "state":
                pass
            send("click", client_time=t0 + 2900)
            while recv()["kind"] != "state":
                pass
            send("done")
            while True:
                msg = recv()
                if msg["kind"] == "done" and msg.get("scope") == "task":
                    break
        server.should_exit = True


if __name__ == "__main__":
    main()
