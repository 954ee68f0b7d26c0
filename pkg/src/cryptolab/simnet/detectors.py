"""Two detectors: endpoint blacklist and frame-sequence payload inspection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Optional

from ..protocol import FrameError, decode

# one completed mining round, in order
MINING_SEQUENCE = (
    ("c2s", "auth"),
    ("s2c", "authed"),
    ("s2c", "job"),
    ("c2s", "submit"),
    ("s2c", "hash_accept"),
)


@dataclass(frozen=True)
class DetectorVerdict:
    detector: str  # blacklist | payload
    flagged: bool
    trigger: str  # endpoint-match | mining-sequence | none
    time_of_flag: Optional[float] = None
    undecodable: int = 0

    def to_dict(self):
        return {
            "detector": self.detector,
            "flagged": self.flagged,
            "trigger": self.trigger,
            "time_of_flag": self.time_of_flag,
            "undecodable": self.undecodable,
        }


def load_blacklist(inp: IO[str]) -> list[str]:
    out = []
    for line in inp:
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def endpoint_matches(endpoint: str, pattern: str) -> bool:
    if pattern.endswith("*"):
        return endpoint.startswith(pattern[:-1])
    return endpoint == pattern


def blacklist_detector(connections: Iterable, blacklist: Iterable[str]) -> DetectorVerdict:
    """Flag the first connection whose destination is listed. Payload is never read."""
    patterns = list(blacklist)
    for c in sorted(connections, key=lambda c: c.ts):
        if any(endpoint_matches(c.endpoint, p) for p in patterns):
            return DetectorVerdict("blacklist", True, "endpoint-match", c.ts)
    return DetectorVerdict("blacklist", False, "none")


def payload_detector(records: Iterable) -> DetectorVerdict:
    """Track the mining sequence per session and flag when a round completes.

    Frames that do not fit the sequence are skipped, so retries and
    interleaved traffic don't reset progress.
    """
    progress: dict[str, int] = {}
    bad = 0
    first = None
    for rec in records:
        try:
            kind = decode(rec.raw).TYPE
        except FrameError:
            bad += 1
            continue
        i = progress.get(rec.session_id, 0)
        if i < len(MINING_SEQUENCE) and MINING_SEQUENCE[i] == (rec.direction, kind):
            progress[rec.session_id] = i = i + 1
            if i == len(MINING_SEQUENCE) and (first is None or rec.ts < first):
                first = rec.ts
    if first is None:
        return DetectorVerdict("payload", False, "none", undecodable=bad)
    return DetectorVerdict("payload", True, "mining-sequence", first, bad)
