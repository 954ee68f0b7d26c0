"""Scenario runner wiring server, relay, client and detectors together."""
from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, field
from typing import Optional

from ..protocol import difficulty
from .clock import RealClock, VirtualClock
from .detectors import blacklist_detector, payload_detector
from .miner import Connect, MinerConfig, MinerSummary, run_miner
from .relay import RelayConfig, run_relay
from .server import run_server
from .transport import StartupError, make_network
from .wire import WireRecord, write_frame_log

log = logging.getLogger(__name__)

SCENARIOS = ("direct", "relay", "keyless", "benign-socket")

SITE_KEY = "5f3c0e2b9a41d8c7e6b5a49382716f0e"
NO_KEY = "0" * 32
ENDPOINTS = {
    "inprocess": {"dropzone": "dropzone.example:443", "relay": "relay.example:8080", "chat": "chat.example:443"},
    "tcp": {"dropzone": "127.0.0.1:0", "relay": "127.0.0.1:0", "chat": "127.0.0.1:0"},
}


class ScenarioError(RuntimeError):
    pass


@dataclass
class ScenarioReport:
    scenario: str
    seed: int
    params: dict
    accepted_hashes: int
    accepted_shares: int
    sessions: int
    duty_cycle: float
    client: dict
    verdicts: dict
    endpoints: dict
    frame_log: list = field(default_factory=list, repr=False)
    capture: list = field(default_factory=list, repr=False)
    frame_log_path: Optional[str] = None

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "params": self.params,
            "accepted_hashes": self.accepted_hashes,
            "accepted_shares": self.accepted_shares,
            "sessions": self.sessions,
            "duty_cycle": self.duty_cycle,
            "client": self.client,
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
            "endpoints": self.endpoints,
            "frame_log": self.frame_log_path,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


async def _chat_server(endpoint, network, clock, log_out):
    counter = iter(range(1, 1 << 62))

    async def serve(conn):
        sid = f"c{next(counter)}"
        n = 0
        while (raw := await conn.recv()) is not None:
            log_out.append(WireRecord(clock.now(), sid, "c2s", raw))
            n += 1
            reply = json.dumps({"type": "chat-ack", "id": n}, separators=(",", ":")).encode()
            log_out.append(WireRecord(clock.now(), sid, "s2c", reply))
            await conn.send(reply)
        await conn.close()

    return await network.listen(endpoint, serve)


async def _chat_client(endpoint, network, clock, duration, slice_seconds=1.0):
    summary = MinerSummary()
    clock.register()
    t0 = clock.now()
    try:
        summary.connections.append(Connect(t0, endpoint))
        conn = await network.connect(endpoint)
        steps = int(duration / slice_seconds + 1e-9)
        for k in range(steps):
            msg = json.dumps({"type": "chat", "user": "guest", "text": f"hello {k}"}, separators=(",", ":")).encode()
            summary.capture.append(WireRecord(clock.now(), "client", "c2s", msg))
            await conn.send(msg)
            raw = await conn.recv()
            if raw is None:
                summary.error = "closed by server"
                break
            summary.capture.append(WireRecord(clock.now(), "client", "s2c", raw))
            summary.slices = k + 1
            await clock.sleep(t0 + (k + 1) * slice_seconds - clock.now())
        await conn.close()
    except OSError as e:
        summary.error = f"connect failed: {e}"
    finally:
        summary.elapsed = clock.now() - t0
        clock.unregister()
    return summary


async def _run(name, alpha, h_max, duration, seed, target, transport, realtime, blacklist):
    network = make_network(transport)
    clock = RealClock() if realtime else VirtualClock()
    eps = ENDPOINTS[transport]
    closers = []
    server = None
    chat_log: list = []
    try:
        if name == "benign-socket":
            chat = await _chat_server(eps["chat"], network, clock, chat_log)
            closers.append(chat)
            endpoints = {"chat": chat.endpoint}
            client = await _chat_client(chat.endpoint, network, clock, duration)
        else:
            server = await run_server([SITE_KEY], eps["dropzone"], network, clock, target=target, seed=seed)
            closers.append(server)
            endpoints = {"dropzone": server.endpoint}
            dest = server.endpoint
            if name == "relay":
                relay = await run_relay(RelayConfig(eps["relay"], server.endpoint), network)
                closers.append(relay)
                endpoints["relay"] = dest = relay.endpoint
            key = NO_KEY if name == "keyless" else SITE_KEY
            config = MinerConfig(alpha, h_max, key, dest, duration)
            client = await run_miner(config, network, clock, seed=seed)
        await network.drain()
    except StartupError as e:
        raise ScenarioError(f"scenario {name!r} aborted: {e}") from e
    finally:
        for c in closers:
            await c.close()

    bl = blacklist if blacklist is not None else [endpoints.get("dropzone", eps["dropzone"])]
    verdicts = {
        "blacklist": blacklist_detector(client.connections, bl),
        "payload": payload_detector(client.capture),
    }
    frame_log = server.log if server is not None else chat_log
    return ScenarioReport(
        scenario=name,
        seed=seed,
        params={
            "alpha": alpha,
            "h_max": h_max,
            "duration": duration,
            "target": target,
            "difficulty": difficulty(target),
            "transport": transport,
            "clock": "real" if realtime else "virtual",
            "blacklist": bl,
        },
        accepted_hashes=server.total_hashes if server else 0,
        accepted_shares=server.total_shares if server else 0,
        sessions=len(server.sessions) if server else len({r.session_id for r in chat_log}),
        duty_cycle=(1 - alpha) if name != "benign-socket" else 0.0,
        client=client.to_dict(),
        verdicts=verdicts,
        endpoints=endpoints,
        frame_log=frame_log,
        capture=client.capture,
    )


def run_scenario(
    name: str,
    alpha: float = 0.1,
    h_max: float = 1000,
    duration: float = 30,
    seed: int = 0,
    target: str = "ffffff00",
    transport: str = "inprocess",
    realtime: bool = False,
    blacklist: Optional[list] = None,
    frame_log_path: Optional[str] = None,
) -> ScenarioReport:
    """Run one named scenario to completion. Deterministic for a fixed seed on the virtual clock."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    difficulty(target)
    report = asyncio.run(_run(name, alpha, h_max, duration, seed, target, transport, realtime, blacklist))
    if frame_log_path:
        with open(frame_log_path, "w", encoding="utf-8") as fh:
            write_frame_log(report.frame_log, fh)
        report.frame_log_path = frame_log_path
    return report
