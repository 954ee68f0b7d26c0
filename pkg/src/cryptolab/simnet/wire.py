"""Frame log records shared by the server, clients and detectors."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable


@dataclass(frozen=True)
class WireRecord:
    ts: float
    session_id: str
    direction: str  # c2s | s2c
    raw: bytes

    def to_obj(self):
        try:
            frame = json.loads(self.raw)
        except (ValueError, UnicodeDecodeError):
            frame = self.raw.decode("utf-8", "replace")
        return {"ts": self.ts, "session_id": self.session_id, "direction": self.direction, "frame": frame}


def write_frame_log(records: Iterable[WireRecord], out: IO[str]) -> int:
    n = 0
    for rec in records:
        out.write(json.dumps(rec.to_obj(), separators=(",", ":")) + "\n")
        n += 1
    return n


def read_frame_log(inp: IO[str]) -> list[WireRecord]:
    recs = []
    for line in inp:
        if not line.strip():
            continue
        obj = json.loads(line)
        frame = obj["frame"]
        raw = frame if isinstance(frame, str) else json.dumps(frame, separators=(",", ":"))
        recs.append(WireRecord(obj["ts"], obj["session_id"], obj["direction"], raw.encode()))
    return recs
