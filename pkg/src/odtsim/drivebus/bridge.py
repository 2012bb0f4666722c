"""Byte-stream access to a ``DriveBus``.

RTU frames carry no length field, so the parser infers the length from the
function code. It resynchronizes by dropping one byte whenever a candidate
frame fails its CRC.
"""

from __future__ import annotations

import socketserver
import threading
import time

from .emulator import DriveBus
from .frames import EXCEPTION_FLAG, READ_HOLDING, WRITE_SINGLE, ModbusError, decode_frame


def _expected_length(buf: bytes, requests: bool) -> int | None:
    if len(buf) < 2:
        return None
    fn = buf[1]
    if fn & EXCEPTION_FLAG:
        return 5
    if fn == WRITE_SINGLE or (fn == READ_HOLDING and requests):
        return 8
    if fn == READ_HOLDING:
        return 5 + buf[2] if len(buf) >= 3 else None
    return -1


class FrameStreamParser:
    def __init__(self, requests: bool = True):
        self.requests = requests
        self._buf = bytearray()
        self.dropped = 0

    def feed(self, data: bytes) -> list[bytes]:
        self._buf.extend(data)
        frames = []
        while True:
            n = _expected_length(self._buf, self.requests)
            if n is None:
                break
            if n < 0:
                del self._buf[0]
                self.dropped += 1
                continue
            if len(self._buf) < n:
                break
            candidate = bytes(self._buf[:n])
            try:
                decode_frame(candidate)
            except ModbusError:
                del self._buf[0]
                self.dropped += 1
                continue
            frames.append(candidate)
            del self._buf[:n]
        return frames


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        parser = FrameStreamParser(requests=True)
        server = self.server
        while True:
            data = self.request.recv(256)
            if not data:
                return
            for frame in parser.feed(data):
                with server.lock:
                    _, resp = server.bus.transact(frame, server.clock())
                if resp is not None:
                    self.request.sendall(resp)


class BridgeServer(socketserver.ThreadingTCPServer):
    """TCP server exposing raw RTU frames of ``bus``; one lock serializes access."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, bus: DriveBus, clock=time.monotonic):
        super().__init__(address, _Handler)
        self.bus = bus
        self.clock = clock
        self.lock = threading.Lock()


def serve_bridge(bus: DriveBus, host: str = "127.0.0.1", port: int = 0) -> BridgeServer:
    """Start a bridge in a background thread and return the server."""
    server = BridgeServer((host, port), bus)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    return server
