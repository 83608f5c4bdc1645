"""Newline-delimited JSON over stream sockets.

Each request is one JSON object terminated by a newline, answered by one
JSON reply on the same connection. Every request carries a ``msg_id`` that
the reply echoes back. Message types: ``submit_task``, ``task_ack``,
``status_query``, ``status_reply``, ``result_report``, ``heartbeat``, and
``error`` replies.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading
import uuid
from typing import Callable

from ..errors import SchedulerError

Address = tuple[str, int]
Handler = Callable[[dict], dict]

MAX_LINE = 8 * 1024 * 1024


def request(address: Address, payload: dict, timeout: float = 10.0) -> dict:
    """Send one message and wait for its reply; validates msg_id echo."""
    msg = dict(payload)
    msg.setdefault("msg_id", uuid.uuid4().hex)
    try:
        with socket.create_connection(address, timeout=timeout) as sock:
            sock.sendall(json.dumps(msg).encode() + b"\n")
            with sock.makefile("rb") as fh:
                line = fh.readline(MAX_LINE)
    except OSError as exc:
        raise SchedulerError(f"cannot reach {address[0]}:{address[1]}: {exc}") from exc
    if not line:
        raise SchedulerError(f"{address[0]}:{address[1]} closed the connection")
    reply = json.loads(line)
    if reply.get("msg_id") != msg["msg_id"]:
        raise SchedulerError("reply msg_id does not match the request")
    if reply.get("type") == "error":
        raise SchedulerError(reply.get("reason", "remote error"))
    return reply


class JsonLineServer(socketserver.ThreadingTCPServer):
    """TCP server dispatching each JSON line to a handler callback."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str, port: int, handler: Handler) -> None:
        self._handler = handler
        super().__init__((host, port), _RequestHandler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> Address:
        host, port = self.server_address[:2]
        return str(host), int(port)

    def start(self) -> "JsonLineServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


class _RequestHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        line = self.rfile.readline(MAX_LINE)
        if not line.strip():
            return
        try:
            msg = json.loads(line)
        except json.JSONDecodeError:
            self._reply({"type": "error", "reason": "malformed json", "msg_id": None})
            return
        try:
            reply = self.server._handler(msg)  # type: ignore[attr-defined]
        except SchedulerError as exc:
            reply = {"type": "error", "reason": str(exc)}
        except Exception as exc:  # keep the server alive on handler bugs
            reply = {"type": "error", "reason": f"internal error: {exc}"}
        reply["msg_id"] = msg.get("msg_id")
        self._reply(reply)

    def _reply(self, payload: dict) -> None:
        self.wfile.write(json.dumps(payload).encode() + b"\n")
