"""Server-side session state machine with hash accounting."""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Union

from .frames import Auth, Authed, Frame, HashAccept, Job, Submit
from .pow import difficulty, verify


class Phase(str, Enum):
    AWAITING_AUTH = "AwaitingAuth"
    AUTHED = "Authed"
    JOB_ASSIGNED = "JobAssigned"
    CLOSED = "Closed"


class ConnectionClosed:
    def __repr__(self):
        return "CLOSED"


CLOSED = ConnectionClosed()
Event = Union[Frame, ConnectionClosed]


@dataclass(frozen=True)
class Alert:
    kind: str  # protocol-error | invalid-key | share-rejected
    detail: str


@dataclass(frozen=True)
class SessionState:
    phase: Phase = Phase.AWAITING_AUTH
    current_job: Optional[Job] = None
    accepted_hashes: int = 0
    site_key: Optional[str] = None
    accepted_shares: int = 0


@dataclass(frozen=True)
class StepResult:
    state: SessionState
    emit: tuple[Frame, ...] = ()
    alerts: tuple[Alert, ...] = ()


class JobSource:
    """Issues jobs and tokens for one server instance.

    Job ids come from a 48-bit counter whose start is drawn from the seed.
    """

    def __init__(self, target: str = "ffffff00", seed: int = 0, empty_token: bool = False):
        difficulty(target)  # validates
        self.target = target
        self._rng = random.Random(seed)
        self._counter = self._rng.getrandbits(48)
        self.empty_token = empty_token

    def next_job(self) -> Job:
        self._counter = (self._counter + 1) % 2**48
        blob = self._rng.getrandbits(76 * 8).to_bytes(76, "big").hex()
        return Job(str(self._counter), blob, self.target)

    def token(self) -> str:
        return "" if self.empty_token else self._rng.getrandbits(128).to_bytes(16, "big").hex()


@dataclass
class ServerContext:
    registry: frozenset[str]
    jobs: JobSource = field(default_factory=JobSource)

    @classmethod
    def create(cls, keys: Iterable[str], target: str = "ffffff00", seed: int = 0) -> "ServerContext":
        return cls(frozenset(keys), JobSource(target, seed))


def _out_of_order(state: SessionState, event) -> StepResult:
    name = getattr(event, "TYPE", repr(event))
    return StepResult(state, alerts=(Alert("protocol-error", f"{name} not allowed in {state.phase.value}"),))


def step(state: SessionState, event: Event, ctx: ServerContext) -> StepResult:
    """Advance one session by one received event."""
    if isinstance(event, ConnectionClosed):
        return StepResult(replace(state, phase=Phase.CLOSED))
    if state.phase is Phase.CLOSED:
        return _out_of_order(state, event)

    if isinstance(event, Auth):
        if state.phase is not Phase.AWAITING_AUTH:
            return _out_of_order(state, event)
        if event.site_key not in ctx.registry:
            closed = replace(state, phase=Phase.CLOSED, site_key=event.site_key)
            return StepResult(closed, alerts=(Alert("invalid-key", "site key not registered"),))
        job = ctx.jobs.next_job()
        new = replace(state, phase=Phase.JOB_ASSIGNED, site_key=event.site_key, current_job=job)
        return StepResult(new, emit=(Authed(ctx.jobs.token(), 0), job))

    if isinstance(event, Submit):
        if state.phase is not Phase.JOB_ASSIGNED or state.current_job is None:
            return _out_of_order(state, event)
        verdict = verify(state.current_job, event.nonce, event.result, job_id=event.job_id)
        if not verdict:
            return StepResult(state, alerts=(Alert("share-rejected", verdict.reason),))
        total = state.accepted_hashes + difficulty(state.current_job.target)
        job = ctx.jobs.next_job()
        new = replace(state, accepted_hashes=total, accepted_shares=state.accepted_shares + 1, current_job=job)
        return StepResult(new, emit=(HashAccept(total), job))

    # server-to-client frames are never valid input to the server
    return _out_of_order(state, event)
