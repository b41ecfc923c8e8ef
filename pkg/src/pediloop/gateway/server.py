"""Asyncio transports for the gateway: newline-delimited TCP and a minimal
RFC 6455 WebSocket endpoint at /ws carrying one message per text frame.

The HTTP listener doubles as a static file server so the browser client can
be served from the same process. All game-state effects funnel through the
Gateway hub; transports only frame/unframe bytes.
"""
from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import mimetypes
from pathlib import Path

from .protocol import Message, encode_message
from .session import Gateway

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
_MAX_LINE = 1 << 20
_MAX_FRAME = 1 << 22


class Transport:
    """One connected client: knows how to push encoded messages out."""

    def __init__(self, sid: int, writer: asyncio.StreamWriter, kind: str):
        self.sid = sid
        self.writer = writer
        self.kind = kind  # "tcp" | "ws"
        self.closed = False

    def send(self, message: Message) -> None:
        if self.closed:
            return
        raw = encode_message(message)
        try:
            if self.kind == "tcp":
                self.writer.write(raw + b"\n")
            else:
                self.writer.write(_ws_frame(raw))
        except (ConnectionError, RuntimeError):
            self.closed = True


def _ws_frame(payload: bytes, opcode: int = 0x1) -> bytes:
    header = bytearray([0x80 | opcode])
    n = len(payload)
    if n < 126:
        header.append(n)
    elif n < (1 << 16):
        header.append(126)
        header += n.to_bytes(2, "big")
    else:
        header.append(127)
        header += n.to_bytes(8, "big")
    return bytes(header) + payload


class GatewayServer:
    def __init__(
        self,
        gateway: Gateway,
        host: str = "127.0.0.1",
        tcp_port: int = 7077,
        http_port: int = 7078,
        static_dir: Path | None = None,
        map_geometry: dict | None = None,
    ):
        self.gateway = gateway
        self.host = host
        self.tcp_port = tcp_port
        self.http_port = http_port
        self.static_dir = static_dir
        self.map_geometry = map_geometry
        self.transports: dict[int, Transport] = {}
        self._servers: list[asyncio.base_events.Server] = []

    async def start(self) -> None:
        tcp = await asyncio.start_server(self._serve_tcp, self.host, self.tcp_port)
        http = await asyncio.start_server(self._serve_http, self.host, self.http_port)
        self._servers = [tcp, http]

    async def stop(self) -> None:
        for t in self.transports.values():
            t.closed = True
            try:
                t.writer.close()
            except RuntimeError:
                pass
        self.transports.clear()
        for server in self._servers:
            server.close()
            await server.wait_closed()
        self._servers = []

    def flush_outgoing(self) -> None:
        """Push everything the gateway queued to the wire."""
        for sid, transport in list(self.transports.items()):
            session = self.gateway.sessions.get(sid)
            if session is None:
                continue
            for message in session.pop_outgoing():
                transport.send(message)

    # -- TCP: newline-delimited ------------------------------------------------

    async def _serve_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        sid = self.gateway.connect()
        transport = Transport(sid, writer, "tcp")
        self.transports[sid] = transport
        try:
            while True:
                try:
                    line = await reader.readline()
                except (ConnectionError, asyncio.LimitOverrunError):
                    break
                if not line:
                    break
                if len(line) > _MAX_LINE:
                    break
                self.gateway.handle_raw(sid, line.rstrip(b"\r\n"))
                self.flush_outgoing()
                await _drain(writer)
        finally:
            self._drop(sid, writer)

    # -- HTTP: /ws WebSocket upgrade, static files otherwise --------------------

    async def _serve_http(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        try:
            request = await _read_http_head(reader)
        except (ConnectionError, asyncio.IncompleteReadError, ValueError):
            writer.close()
            return
        if request is None:
            writer.close()
            return
        method, path, headers = request

        if path.split("?", 1)[0] == "/ws" and headers.get("upgrade", "").lower() == "websocket":
            await self._serve_ws(reader, writer, headers)
            return

        await self._serve_static(writer, method, path)

    async def _serve_ws(self, reader, writer, headers: dict[str, str]) -> None:
        key = headers.get("sec-websocket-key", "")
        accept = base64.b64encode(hashlib.sha1((key + _WS_GUID).encode()).digest()).decode()
        writer.write(
            (
                "HTTP/1.1 101 Switching Protocols\r\n"
                "Upgrade: websocket\r\nConnection: Upgrade\r\n"
                f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
            ).encode()
        )
        await _drain(writer)

        sid = self.gateway.connect()
        self.transports[sid] = Transport(sid, writer, "ws")
        try:
            while True:
                frame = await _read_ws_frame(reader)
                if frame is None:
                    break
                opcode, payload = frame
                if opcode == 0x8:  # close
                    try:
                        writer.write(_ws_frame(payload[:2], opcode=0x8))
                        await _drain(writer)
                    except (ConnectionError, RuntimeError):
                        pass
                    break
                if opcode == 0x9:  # ping -> pong
                    writer.write(_ws_frame(payload, opcode=0xA))
                    await _drain(writer)
                    continue
                if opcode in (0x1, 0x2):
                    self.gateway.handle_raw(sid, payload)
                    self.flush_outgoing()
                    await _drain(writer)
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            self._drop(sid, writer)

    async def _serve_static(self, writer: asyncio.StreamWriter, method: str, path: str) -> None:
        status, ctype, body = self._static_response(method, path)
        writer.write(
            (
                f"HTTP/1.1 {status}\r\nContent-Type: {ctype}\r\n"
                f"Content-Length: {len(body)}\r\nConnection: close\r\n\r\n"
            ).encode()
            + body
        )
        await _drain(writer)
        writer.close()

    def _static_response(self, method: str, path: str) -> tuple[str, str, bytes]:
        if method != "GET":
            return "405 Method Not Allowed", "text/plain", b"method not allowed"
        clean = path.split("?", 1)[0]
        if clean == "/map.json" and self.map_geometry is not None:
            return "200 OK", "application/json", json.dumps(self.map_geometry).encode()
        if self.static_dir is None:
            return "404 Not Found", "text/plain", b"no static content configured"
        if clean == "/":
            clean = "/index.html"
        target = (self.static_dir / clean.lstrip("/")).resolve()
        try:
            target.relative_to(self.static_dir.resolve())
        except ValueError:
            return "404 Not Found", "text/plain", b"not found"
        if not target.is_file():
            return "404 Not Found", "text/plain", b"not found"
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        return "200 OK", ctype, target.read_bytes()

    def _drop(self, sid: int, writer: asyncio.StreamWriter) -> None:
        self.transports.pop(sid, None)
        self.gateway.disconnect(sid)
        try:
            writer.close()
        except RuntimeError:
            pass


async def _drain(writer: asyncio.StreamWriter) -> None:
    try:
        await writer.drain()
    except (ConnectionError, RuntimeError):
        pass


async def _read_http_head(reader: asyncio.StreamReader):
    head = await reader.readuntil(b"\r\n\r\n")
    lines = head.decode("latin-1").split("\r\n")
    parts = lines[0].split(" ")
    if len(parts) < 3:
        return None
    method, path = parts[0], parts[1]
    headers: dict[str, str] = {}
    for line in lines[1:]:
        if ":" in line:
            k, v = line.split(":", 1)
            headers[k.strip().lower()] = v.strip()
    return method, path, headers


async def _read_ws_frame(reader: asyncio.StreamReader):
    try:
        first = await reader.readexactly(2)
    except asyncio.IncompleteReadError:
        return None
    opcode = first[0] & 0x0F
    masked = bool(first[1] & 0x80)
    length = first[1] & 0x7F
    if length == 126:
        length = int.from_bytes(await reader.readexactly(2), "big")
    elif length == 127:
        length = int.from_bytes(await reader.readexactly(8), "big")
    if length > _MAX_FRAME:
        return None
    mask = await reader.readexactly(4) if masked else b"\x00\x00\x00\x00"
    payload = bytearray(await reader.readexactly(length))
    if masked:
        for i in range(length):
            payload[i] ^= mask[i % 4]
    return opcode, bytes(payload)
