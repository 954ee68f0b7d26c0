"""Transparent relay: forwards every message unchanged in both directions."""
from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RelayConfig:
    listen_endpoint: str
    upstream_endpoint: str


@dataclass
class RelayHandle:
    endpoint: str
    config: RelayConfig
    forwarded: int = 0
    _listener: object = None

    async def close(self):
        if self._listener is not None:
            await self._listener.close()
            self._listener = None


async def run_relay(config: RelayConfig, network) -> RelayHandle:
    handle = RelayHandle(config.listen_endpoint, config)

    async def pump(src, dst):
        while True:
            data = await src.recv()
            if data is None:
                break
            try:
                await dst.send(data)
            except ConnectionError:
                break
            handle.forwarded += 1
        await dst.close()

    async def serve(client):
        try:
            upstream = await network.connect(config.upstream_endpoint)
        except OSError as e:
            log.warning("upstream %s unreachable: %s", config.upstream_endpoint, e)
            await client.close()
            return
        await asyncio.gather(pump(client, upstream), pump(upstream, client))

    handle._listener = await network.listen(config.listen_endpoint, serve)
    handle.endpoint = handle._listener.endpoint
    return handle
