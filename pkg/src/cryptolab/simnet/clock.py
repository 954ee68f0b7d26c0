"""Clocks for the simulator.

The virtual clock is a barrier: registered actors call ``sleep`` and time
jumps to the earliest wake-up once every actor is asleep. Anything not
registered (servers, relays) runs purely on I/O and never holds time back.
The check is deferred by one loop turn so that tasks started together can
all register before the first of them falls asleep.
"""
from __future__ import annotations

import asyncio
import heapq
import itertools


class VirtualClock:
    def __init__(self, start: float = 0.0):
        self._now = float(start)
        self._actors = 0
        self._sleepers: list = []
        self._seq = itertools.count()
        self._pending = False

    def now(self) -> float:
        return self._now

    def register(self):
        self._actors += 1

    def unregister(self):
        self._actors -= 1
        self._maybe_advance()

    async def sleep(self, dt: float):
        if dt < 0:
            raise ValueError("cannot sleep a negative time")
        fut = asyncio.get_running_loop().create_future()
        heapq.heappush(self._sleepers, (self._now + dt, next(self._seq), fut))
        self._maybe_advance()
        await fut

    def _maybe_advance(self):
        if not self._pending and self._sleepers:
            self._pending = True
            asyncio.get_running_loop().call_soon(self._advance)

    def _advance(self):
        self._pending = False
        if not self._sleepers or len(self._sleepers) < self._actors:
            return
        wake = self._sleepers[0][0]
        self._now = max(self._now, wake)
        while self._sleepers and self._sleepers[0][0] <= wake:
            _, _, fut = heapq.heappop(self._sleepers)
            if not fut.done():
                fut.set_result(None)


class RealClock:
    """Wall-clock time relative to construction, driven by the event loop."""

    def __init__(self):
        self._t0 = None

    def _loop_time(self):
        return asyncio.get_running_loop().time()

    def now(self) -> float:
        t = self._loop_time()
        if self._t0 is None:
            self._t0 = t
        return t - self._t0

    def register(self):
        self.now()

    def unregister(self):
        pass

    async def sleep(self, dt: float):
        await asyncio.sleep(max(0.0, dt))
