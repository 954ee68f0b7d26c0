"""Dropzone server: one protocol session per connection."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

from ..protocol import CLOSED, Alert, FrameError, Phase, ServerContext, SessionState, decode, encode, step
from .wire import WireRecord

log = logging.getLogger(__name__)


@dataclass
class ServerHandle:
    endpoint: str
    context: ServerContext
    sessions: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    alerts: list = field(default_factory=list)
    _listener: object = None

    @property
    def total_hashes(self) -> int:
        return sum(s.accepted_hashes for s in self.sessions.values())

    @property
    def total_shares(self) -> int:
        return sum(s.accepted_shares for s in self.sessions.values())

    async def close(self):
        if self._listener is not None:
            await self._listener.close()
            self._listener = None


async def run_server(registry: Iterable[str], endpoint: str, network, clock, target="ffffff00", seed=0):
    """Start listening and return a handle; sessions run until their peer goes away."""
    keys = frozenset(registry)
    if not keys:
        raise ValueError("key registry is empty")
    handle = ServerHandle(endpoint, ServerContext.create(keys, target=target, seed=seed))
    counter = iter(range(1, 1 << 62))

    async def serve(conn):
        sid = f"s{next(counter)}"
        state = SessionState()
        handle.sessions[sid] = state
        try:
            while True:
                raw = await conn.recv()
                if raw is None:
                    state = step(state, CLOSED, handle.context).state
                    break
                handle.log.append(WireRecord(clock.now(), sid, "c2s", raw))
                try:
                    frame = decode(raw)
                except FrameError as e:
                    handle.alerts.append((sid, Alert("protocol-error", str(e))))
                    continue
                res = step(state, frame, handle.context)
                state = res.state
                handle.sessions[sid] = state
                handle.alerts.extend((sid, a) for a in res.alerts)
                for out in res.emit:
                    data = encode(out)
                    handle.log.append(WireRecord(clock.now(), sid, "s2c", data))
                    await conn.send(data)
                if state.phase is Phase.CLOSED:
                    break
        except ConnectionError as e:
            log.info("session %s dropped: %s", sid, e)
        finally:
            handle.sessions[sid] = state
            await conn.close()

    handle._listener = await network.listen(endpoint, serve)
    handle.endpoint = handle._listener.endpoint
    return handle
