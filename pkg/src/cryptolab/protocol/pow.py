"""Share-level proof of work.

A job blob is 76 bytes (152 hex chars); the 4-byte nonce lives at hex
offset 78..86. A share passes when the last four bytes of SHA-256(blob),
read little-endian, do not exceed the 32-bit target.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Optional

from .frames import Job

NONCE_SLICE = slice(78, 86)
_HEX8 = re.compile(r"[0-9a-fA-F]{8}\Z")


@dataclass(frozen=True)
class Solution:
    nonce: str
    result: str
    attempts: int


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Optional[str] = None  # bad-hash | above-target | wrong-job

    def __bool__(self):
        return self.accepted


ACCEPT = Verdict(True)


def target_value(target: str) -> int:
    if not isinstance(target, str) or not _HEX8.match(target):
        raise ValueError(f"target must be 8 hex chars, got {target!r}")
    return int.from_bytes(bytes.fromhex(target), "little")


def difficulty(target: str) -> int:
    """Expected hashes per share for a target: floor(2^32 / (T + 1))."""
    return 2**32 // (target_value(target) + 1)


def nonce_hex(n: int) -> str:
    return (n % 2**32).to_bytes(4, "little").hex()


def _blob_bytes(blob: str) -> bytes:
    if len(blob) != 152:
        raise ValueError(f"blob must be 152 hex chars, got {len(blob)}")
    try:
        return bytes.fromhex(blob)
    except ValueError:
        raise ValueError("blob is not valid hex") from None


def hash_blob(blob: str, nonce: str) -> bytes:
    raw = bytearray(_blob_bytes(blob))
    raw[39:43] = bytes.fromhex(nonce)
    return hashlib.sha256(raw).digest()


def meets_target(digest: bytes, t32: int) -> bool:
    return int.from_bytes(digest[-4:], "little") <= t32


def solve(job: Job, start_nonce: int = 0, max_iters: int = 2**32) -> Optional[Solution]:
    """Try consecutive nonces from ``start_nonce``; return the first share found."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    t32 = target_value(job.target)
    base = bytearray(_blob_bytes(job.blob))
    sha = hashlib.sha256
    for i in range(max_iters):
        nb = ((start_nonce + i) % 2**32).to_bytes(4, "little")
        base[39:43] = nb
        digest = sha(base).digest()
        if int.from_bytes(digest[-4:], "little") <= t32:
            return Solution(nb.hex(), digest.hex(), i + 1)
    return None


def verify(job: Job, nonce: str, result: str, job_id: Optional[str] = None) -> Verdict:
    if job_id is not None and job_id != job.job_id:
        return Verdict(False, "wrong-job")
    if not _HEX8.match(nonce or ""):
        return Verdict(False, "bad-hash")
    digest = hash_blob(job.blob, nonce)
    if digest.hex() != result.lower():
        return Verdict(False, "bad-hash")
    if not meets_target(digest, target_value(job.target)):
        return Verdict(False, "above-target")
    return ACCEPT
