"""The five JSON frames of the browser-mining wire protocol.

Frames encode to compact JSON with a fixed key order:
``{"type": <name>, "params": {...}}``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, ClassVar, Optional, Union

_HEX = re.compile(r"[0-9a-f]*\Z")
_ANYHEX = re.compile(r"[0-9a-fA-F]*\Z")
_DIGITS = re.compile(r"[0-9]+\Z")


class FrameError(ValueError):
    pass


class UnknownFrame(FrameError):
    def __init__(self, raw_type: Any):
        super().__init__(f"unknown frame type {raw_type!r}")
        self.raw_type = raw_type


class MalformedFrame(FrameError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"malformed field {field!r}: {reason}")
        self.field = field


def _need_str(name, v):
    if not isinstance(v, str):
        raise MalformedFrame(name, f"expected string, got {type(v).__name__}")


def _need_int(name, v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise MalformedFrame(name, f"expected integer, got {type(v).__name__}")
    if v < 0:
        raise MalformedFrame(name, "must be non-negative")


def _need_hex(name, v, length, pattern=_HEX):
    _need_str(name, v)
    if len(v) != length:
        raise MalformedFrame(name, f"expected {length} hex chars, got {len(v)}")
    if not pattern.match(v):
        raise MalformedFrame(name, "not lowercase hex")


def _need_job_id(v):
    _need_str("job_id", v)
    if not _DIGITS.match(v):
        raise MalformedFrame("job_id", "expected a decimal digit string")


@dataclass(frozen=True)
class Auth:
    site_key: str
    auth_type: str = "anonymous"
    user: Optional[str] = None
    goal: int = 0

    TYPE: ClassVar[str] = "auth"

    def validate(self):
        _need_str("site_key", self.site_key)
        if len(self.site_key) != 32:
            raise MalformedFrame("site_key", f"expected 32 characters, got {len(self.site_key)}")
        _need_str("type", self.auth_type)
        if self.user is not None:
            _need_str("user", self.user)
        _need_int("goal", self.goal)

    def params(self):
        return {"site_key": self.site_key, "type": self.auth_type, "user": self.user, "goal": self.goal}

    @classmethod
    def from_params(cls, p):
        return cls(p["site_key"], p["type"], p.get("user"), p.get("goal", 0))


@dataclass(frozen=True)
class Authed:
    token: str = ""
    hashes: int = 0

    TYPE: ClassVar[str] = "authed"

    def validate(self):
        _need_str("token", self.token)
        _need_int("hashes", self.hashes)

    def params(self):
        return {"token": self.token, "hashes": self.hashes}

    @classmethod
    def from_params(cls, p):
        return cls(p["token"], p["hashes"])


@dataclass(frozen=True)
class Job:
    job_id: str
    blob: str
    target: str

    TYPE: ClassVar[str] = "job"

    def validate(self):
        _need_job_id(self.job_id)
        _need_hex("blob", self.blob, 152)
        _need_hex("target", self.target, 8)

    def params(self):
        return {"job_id": self.job_id, "blob": self.blob, "target": self.target}

    @classmethod
    def from_params(cls, p):
        return cls(p["job_id"], p["blob"], p["target"])


@dataclass(frozen=True)
class Submit:
    job_id: str
    nonce: str
    result: str

    TYPE: ClassVar[str] = "submit"

    def validate(self):
        _need_job_id(self.job_id)
        _need_hex("nonce", self.nonce, 8)
        _need_hex("result", self.result, 64, _ANYHEX)

    def params(self):
        return {"job_id": self.job_id, "nonce": self.nonce, "result": self.result}

    @classmethod
    def from_params(cls, p):
        return cls(p["job_id"], p["nonce"], p["result"])


@dataclass(frozen=True)
class HashAccept:
    hashes: int

    TYPE: ClassVar[str] = "hash_accept"

    def validate(self):
        _need_int("hashes", self.hashes)

    def params(self):
        return {"hashes": self.hashes}

    @classmethod
    def from_params(cls, p):
        return cls(p["hashes"])


Frame = Union[Auth, Authed, Job, Submit, HashAccept]
FRAME_TYPES = {cls.TYPE: cls for cls in (Auth, Authed, Job, Submit, HashAccept)}


def to_obj(frame: Frame) -> dict:
    frame.validate()
    return {"type": frame.TYPE, "params": frame.params()}


def encode(frame: Frame) -> bytes:
    return json.dumps(to_obj(frame), separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def from_obj(obj: Any) -> Frame:
    if not isinstance(obj, dict) or "type" not in obj:
        raise MalformedFrame("type", "missing frame type")
    cls = FRAME_TYPES.get(obj["type"]) if isinstance(obj["type"], str) else None
    if cls is None:
        raise UnknownFrame(obj["type"])
    params = obj.get("params")
    if not isinstance(params, dict):
        raise MalformedFrame("params", "missing or not an object")
    try:
        frame = cls.from_params(params)
    except KeyError as exc:
        raise MalformedFrame(exc.args[0], "required parameter missing") from None
    frame.validate()
    return frame


def decode(data: bytes | str) -> Frame:
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedFrame("frame", f"not UTF-8: {exc}") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedFrame("frame", f"not JSON: {exc.msg}") from None
    return from_obj(obj)
