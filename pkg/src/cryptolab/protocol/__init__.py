"""Mining wire protocol: frames, proof of work and the session state machine."""
from .frames import (
    FRAME_TYPES,
    Auth,
    Authed,
    Frame,
    FrameError,
    HashAccept,
    Job,
    MalformedFrame,
    Submit,
    UnknownFrame,
    decode,
    encode,
    from_obj,
    to_obj,
)
from .pow import Solution, Verdict, difficulty, hash_blob, nonce_hex, solve, target_value, verify
from .session import (
    CLOSED,
    Alert,
    ConnectionClosed,
    JobSource,
    Phase,
    ServerContext,
    SessionState,
    StepResult,
    step,
)

__all__ = [
    "CLOSED",
    "FRAME_TYPES",
    "Alert",
    "Auth",
    "Authed",
    "ConnectionClosed",
    "Frame",
    "FrameError",
    "HashAccept",
    "Job",
    "JobSource",
    "MalformedFrame",
    "Phase",
    "ServerContext",
    "SessionState",
    "Solution",
    "StepResult",
    "Submit",
    "UnknownFrame",
    "Verdict",
    "decode",
    "difficulty",
    "encode",
    "from_obj",
    "hash_blob",
    "nonce_hex",
    "solve",
    "step",
    "target_value",
    "to_obj",
    "verify",
]
