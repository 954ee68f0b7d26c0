"""Throttled mining client.

Time is cut into slices (one second by default). In every slice the miner
tries ``floor(h_max * (1 - alpha))`` nonces on its current job, submits any
share it finds, waits for the credit and the next job, then idles until the
slice ends.
"""
from __future__ import annotations

import asyncio
import logging
import math
import random
from dataclasses import dataclass, field
from typing import Optional

from ..protocol import Auth, FrameError, HashAccept, Job, Submit, decode, encode, solve
from .wire import WireRecord

log = logging.getLogger(__name__)

REPLY_TIMEOUT = 30.0  # wall seconds; guards against a silent peer


@dataclass(frozen=True)
class MinerConfig:
    alpha: float
    h_max: float
    site_key: str
    server_endpoint: str
    duration: float
    slice_seconds: float = 1.0

    def __post_init__(self):
        if not 0 <= self.alpha < 1:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        if self.h_max < 0 or self.duration < 0 or self.slice_seconds <= 0:
            raise ValueError("h_max and duration must be >= 0, slice_seconds > 0")

    @property
    def hash_rate(self) -> float:
        return self.h_max * (1 - self.alpha)

    @property
    def budget(self) -> int:
        """Nonces tried per slice."""
        return math.floor(self.hash_rate * self.slice_seconds + 1e-9)

    @property
    def slices(self) -> int:
        return math.floor(self.duration / self.slice_seconds + 1e-9)


@dataclass(frozen=True)
class Connect:
    ts: float
    endpoint: str


@dataclass
class MinerSummary:
    attempted: int = 0
    accepted_shares: int = 0
    credited_hashes: int = 0
    elapsed: float = 0.0
    slices: int = 0
    error: Optional[str] = None
    connections: list = field(default_factory=list)
    capture: list = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.attempted / self.elapsed if self.elapsed > 0 else 0.0

    def to_dict(self):
        return {
            "attempted": self.attempted,
            "accepted_shares": self.accepted_shares,
            "credited_hashes": self.credited_hashes,
            "rate": self.rate,
            "elapsed": self.elapsed,
            "slices": self.slices,
            "error": self.error,
        }


class _Closed(Exception):
    pass


class _Session:
    def __init__(self, conn, clock, summary):
        self.conn, self.clock, self.summary = conn, clock, summary

    async def send(self, frame):
        data = encode(frame)
        self.summary.capture.append(WireRecord(self.clock.now(), "client", "c2s", data))
        try:
            await self.conn.send(data)
        except ConnectionError as e:
            raise _Closed(str(e)) from None

    async def next_job(self) -> Job:
        while True:
            try:
                raw = await asyncio.wait_for(self.conn.recv(), REPLY_TIMEOUT)
            except asyncio.TimeoutError:
                raise _Closed("no reply from server") from None
            if raw is None:
                raise _Closed("closed by server")
            self.summary.capture.append(WireRecord(self.clock.now(), "client", "s2c", raw))
            try:
                frame = decode(raw)
            except FrameError as e:
                log.warning("ignoring bad frame from server: %s", e)
                continue
            if isinstance(frame, HashAccept):
                self.summary.credited_hashes = frame.hashes
            elif isinstance(frame, Job):
                return frame


async def run_miner(config: MinerConfig, network, clock, seed: int = 0) -> MinerSummary:
    """Mine for ``config.duration`` and report; connection trouble ends the run early."""
    summary = MinerSummary()
    rng = random.Random(seed)
    clock.register()
    t0 = clock.now()
    conn = None
    try:
        summary.connections.append(Connect(t0, config.server_endpoint))
        try:
            conn = await network.connect(config.server_endpoint)
        except OSError as e:
            summary.error = f"connect failed: {e}"
            return summary
        sess = _Session(conn, clock, summary)
        await sess.send(Auth(config.site_key))
        job = await sess.next_job()
        cursor = rng.getrandbits(32)
        for k in range(config.slices):
            left = config.budget
            while left > 0:
                sol = solve(job, cursor, max_iters=left)
                if sol is None:
                    summary.attempted += left
                    cursor += left
                    break
                summary.attempted += sol.attempts
                left -= sol.attempts
                await sess.send(Submit(job.job_id, sol.nonce, sol.result))
                job = await sess.next_job()
                summary.accepted_shares += 1
                cursor = rng.getrandbits(32)
            summary.slices = k + 1
            await clock.sleep(t0 + (k + 1) * config.slice_seconds - clock.now())
    except _Closed as e:
        summary.error = str(e)
    finally:
        summary.elapsed = clock.now() - t0
        if conn is not None:
            await conn.close()
        clock.unregister()
    return summary
