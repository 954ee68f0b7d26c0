"""Duplex frame transports: an in-process network and length-prefixed TCP.

Both hand out ``Connection`` objects carrying whole messages as bytes;
``recv`` returns None once the peer has closed.
"""
from __future__ import annotations

import asyncio
import struct
from typing import Awaitable, Callable, Optional

_LEN = struct.Struct(">I")
MAX_FRAME = 1 << 20


class StartupError(RuntimeError):
    pass


class Connection:
    local: str
    remote: str

    async def send(self, data: bytes) -> None:
        raise NotImplementedError

    async def recv(self) -> Optional[bytes]:
        raise NotImplementedError

    async def close(self) -> None:
        raise NotImplementedError


Handler = Callable[[Connection], Awaitable[None]]


class Listener:
    def __init__(self, endpoint: str, closer):
        self.endpoint = endpoint
        self._closer = closer

    async def close(self):
        await self._closer()


def split_endpoint(endpoint: str) -> tuple[str, int]:
    host, sep, port = endpoint.rpartition(":")
    if not sep or not host or not port.isdigit():
        raise ValueError(f"endpoint must be host:port, got {endpoint!r}")
    return host, int(port)


class _QueueConnection(Connection):
    def __init__(self, local, remote, inbox, outbox):
        self.local, self.remote = local, remote
        self._inbox, self._outbox = inbox, outbox
        self._closed = False  # we closed
        self._eof = False  # peer closed

    async def send(self, data: bytes):
        if self._closed or self._eof:
            raise ConnectionError("connection closed")
        await self._outbox.put(bytes(data))

    async def recv(self):
        if self._closed or self._eof:
            return None
        msg = await self._inbox.get()
        if msg is None:
            self._eof = True
        return msg

    async def close(self):
        if not self._closed:
            self._closed = True
            await self._outbox.put(None)


class InProcessNetwork:
    """Named endpoints inside one event loop; no sockets involved."""

    def __init__(self):
        self._listeners: dict[str, Handler] = {}
        self._tasks: set = set()
        self._ports = 0

    async def listen(self, endpoint: str, handler: Handler) -> Listener:
        split_endpoint(endpoint)
        if endpoint in self._listeners:
            raise StartupError(f"endpoint {endpoint} already in use")
        self._listeners[endpoint] = handler

        async def closer():
            self._listeners.pop(endpoint, None)

        return Listener(endpoint, closer)

    async def connect(self, endpoint: str) -> Connection:
        handler = self._listeners.get(endpoint)
        if handler is None:
            raise ConnectionRefusedError(f"nothing listening on {endpoint}")
        self._ports += 1
        client_ep = f"client:{self._ports}"
        a, b = asyncio.Queue(), asyncio.Queue()
        client = _QueueConnection(client_ep, endpoint, a, b)
        server = _QueueConnection(endpoint, client_ep, b, a)
        task = asyncio.get_running_loop().create_task(handler(server))
        self._tasks.add(task)
        task.add_done_callback(self._tasks.discard)
        return client

    async def drain(self):
        while self._tasks:
            await asyncio.gather(*list(self._tasks), return_exceptions=True)


class _StreamConnection(Connection):
    def __init__(self, reader, writer):
        self._reader, self._writer = reader, writer
        sock = writer.get_extra_info("sockname")
        peer = writer.get_extra_info("peername")
        self.local = f"{sock[0]}:{sock[1]}"
        self.remote = f"{peer[0]}:{peer[1]}"

    async def send(self, data: bytes):
        if self._writer.is_closing():
            raise ConnectionError("connection closed")
        self._writer.write(_LEN.pack(len(data)) + data)
        await self._writer.drain()

    async def recv(self):
        try:
            head = await self._reader.readexactly(_LEN.size)
            (n,) = _LEN.unpack(head)
            if n > MAX_FRAME:
                raise ConnectionError(f"frame of {n} bytes exceeds limit")
            return await self._reader.readexactly(n)
        except (asyncio.IncompleteReadError, ConnectionError):
            return None

    async def close(self):
        if not self._writer.is_closing():
            self._writer.close()
        try:
            await self._writer.wait_closed()
        except (ConnectionError, OSError):
            pass


class TcpNetwork:
    """Loopback TCP with a 4-byte big-endian length before every message."""

    def __init__(self):
        self._tasks: set = set()

    async def listen(self, endpoint: str, handler: Handler) -> Listener:
        host, port = split_endpoint(endpoint)

        async def on_client(reader, writer):
            task = asyncio.current_task()
            self._tasks.add(task)
            try:
                await handler(_StreamConnection(reader, writer))
            finally:
                self._tasks.discard(task)

        try:
            server = await asyncio.start_server(on_client, host, port)
        except OSError as e:
            raise StartupError(f"cannot bind {endpoint}: {e}") from e
        sock = server.sockets[0].getsockname()

        async def closer():
            server.close()
            await server.wait_closed()

        return Listener(f"{sock[0]}:{sock[1]}", closer)

    async def connect(self, endpoint: str) -> Connection:
        host, port = split_endpoint(endpoint)
        reader, writer = await asyncio.open_connection(host, port)
        return _StreamConnection(reader, writer)

    async def drain(self):
        while self._tasks:
            await asyncio.gather(*list(self._tasks), return_exceptions=True)


def make_network(kind: str):
    if kind == "inprocess":
        return InProcessNetwork()
    if kind == "tcp":
        return TcpNetwork()
    raise ValueError(f"unknown transport {kind!r}")
