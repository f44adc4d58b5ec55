"""Round-by-round simulation of n disjoint paths with one injected failure.

Randomness comes from :class:`random.Random` (Mersenne Twister) seeded with
the strings ``"data:{seed}:{session}"`` and ``"failure:{seed}:{session}"``.
String seeds are hashed with SHA-512 by the stdlib, so streams are stable
across platforms and Python versions.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union

from .coding import CollectorState, SessionSourceData, compute_parity, decode_session, units_per_source
from .core import (
    DEFAULT_PAYLOAD_WIDTH,
    NO_FAILURE,
    ConfigurationError,
    DataUnit,
    FailureScenario,
    NpsError,
    Packet,
    PayloadKind,
    StrategyKind,
    TransmissionSchedule,
)
from .metrics import SessionReport, score_session
from .schedule import build_schedule

TRACE_FORMAT = "npsim-trace"
TRACE_VERSION = 1


@dataclass(frozen=True)
class RandomPerSession:
    """At most one failed path per session, uniform over paths and no-failure."""

    seed: Optional[int] = None  # falls back to the config's rng_seed


@dataclass(frozen=True)
class ExhaustiveSweep:
    """Every failure position plus no-failure, each session."""


FailureMode = Union[FailureScenario, RandomPerSession, ExhaustiveSweep]


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    strategy: StrategyKind
    dedicated_path: Optional[int] = None
    sessions: int = 1
    failure: FailureMode = NO_FAILURE
    payload_width: int = DEFAULT_PAYLOAD_WIDTH
    rng_seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError(f"need at least 2 disjoint paths, got n={self.n}")
        if self.sessions < 1:
            raise ConfigurationError("sessions must be >= 1")
        if self.payload_width < 1:
            raise ConfigurationError("payload width must be >= 1")
        if self.strategy is StrategyKind.NPS1_DEDICATED and self.dedicated_path is None:
            object.__setattr__(self, "dedicated_path", self.n)
        if isinstance(self.failure, FailureScenario) and self.failure.failed_path is not None:
            if self.failure.failed_path not in self.schedule().paths:
                raise ConfigurationError(f"path {self.failure.failed_path} does not exist")

    def schedule(self) -> TransmissionSchedule:
        return build_schedule(self.strategy, self.n, self.dedicated_path)

    def failure_positions(self) -> list[Optional[int]]:
        return [None] + list(self.schedule().paths)

    def scenarios(self, session: int) -> list[Optional[int]]:
        """Failed path (or None) for each scenario run in ``session``."""
        f = self.failure
        if isinstance(f, ExhaustiveSweep):
            return self.failure_positions()
        if isinstance(f, RandomPerSession):
            seed = self.rng_seed if f.seed is None else f.seed
            rng = random.Random(f"failure:{seed}:{session}")
            return [rng.choice(self.failure_positions())]
        return [f.failed_in(session)]

    def to_dict(self) -> dict:
        f = self.failure
        if isinstance(f, ExhaustiveSweep):
            failure = {"mode": "exhaustive"}
        elif isinstance(f, RandomPerSession):
            failure = {"mode": "random", "seed": f.seed}
        else:
            failure = {
                "mode": "fixed",
                "failed_path": f.failed_path,
                "sessions_affected": sorted(f.sessions_affected),
            }
        return {
            "n": self.n,
            "strategy": self.strategy.value,
            "dedicated_path": self.dedicated_path,
            "sessions": self.sessions,
            "failure": failure,
            "payload_width": self.payload_width,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationConfig":
        f = d["failure"]
        if f["mode"] == "exhaustive":
            failure = ExhaustiveSweep()
        elif f["mode"] == "random":
            failure = RandomPerSession(f.get("seed"))
        else:
            failure = FailureScenario(f["failed_path"], frozenset(f["sessions_affected"]))
        return cls(
            n=d["n"],
            strategy=StrategyKind(d["strategy"]),
            dedicated_path=d["dedicated_path"],
            sessions=d["sessions"],
            failure=failure,
            payload_width=d["payload_width"],
            rng_seed=d["rng_seed"],
        )


@dataclass(frozen=True)
class TraceEntry:
    session: int
    scenario: int
    round: int
    path: int
    packet: Optional[Packet]  # None means dropped

    @property
    def dropped(self) -> bool:
        return self.packet is None


def generate_source_data(config: SimulationConfig, session: int) -> SessionSourceData:
    rng = random.Random(f"data:{config.rng_seed}:{session}")
    per = units_per_source(config.strategy, config.n)
    units = {
        (i, d): DataUnit(rng.randbytes(config.payload_width))
        for i in range(1, config.n + 1)
        for d in range(1, per + 1)
    }
    return SessionSourceData(config.n, config.strategy, units)


def run_session(
    config: SimulationConfig,
    session: int,
    schedule: TransmissionSchedule,
    data: SessionSourceData,
    failed_path: Optional[int] = None,
    scenario: int = 0,
) -> tuple[list[TraceEntry], CollectorState]:
    if schedule.n != config.n or schedule.strategy is not config.strategy:
        raise NpsError("schedule does not match config")
    if failed_path is not None and failed_path not in schedule.paths:
        raise NpsError(f"failed path {failed_path} not in schedule")
    state = CollectorState(schedule, failed_path)
    trace = []
    for r in schedule.rounds:
        for path in schedule.paths:
            slot = schedule.slot(path, r)
            if slot.is_data:
                packet = Packet(path, PayloadKind.DATA, data.unit(path, slot.data_index), r, session, slot.data_index)
            elif slot.is_parity:
                packet = Packet(path, PayloadKind.PARITY, compute_parity(data, schedule, r), r, session)
            else:
                continue
            if path == failed_path:
                trace.append(TraceEntry(session, scenario, r, path, None))
            else:
                trace.append(TraceEntry(session, scenario, r, path, packet))
                state.receive(path, packet)
    return trace, state


def run_simulation(config: SimulationConfig) -> tuple[list[TraceEntry], list[SessionReport]]:
    schedule = config.schedule()
    trace, reports = [], []
    for session in range(1, config.sessions + 1):
        data = generate_source_data(config, session)
        for k, failed in enumerate(config.scenarios(session)):
            seg, state = run_session(config, session, schedule, data, failed, scenario=k)
            trace.extend(seg)
            record = decode_session(state, data, session)
            reports.append(replace(score_session(record, schedule), scenario=k))
    return trace, reports


def trace_records(trace: Iterable[TraceEntry], schedule: TransmissionSchedule) -> list[dict]:
    out = []
    for e in trace:
        slot = schedule.slot(e.path, e.round)
        if e.packet is None:
            kind, payload = "dropped", None
        else:
            kind, payload = e.packet.payload_kind.value, e.packet.unit.hex()
        out.append(
            {
                "session": e.session,
                "scenario": e.scenario,
                "round": e.round,
                "path": e.path,
                "kind": kind,
                "sender": e.path,
                "data_index": slot.data_index,
                "parity": slot.is_parity,
                "payload": payload,
            }
        )
    return out


def write_trace(fh, trace: Iterable[TraceEntry], schedule: TransmissionSchedule, manifest_hash: str) -> None:
    header = {"format": TRACE_FORMAT, "version": TRACE_VERSION, "manifest_hash": manifest_hash}
    fh.write(json.dumps(header, sort_keys=True) + "\n")
    for rec in trace_records(trace, schedule):
        fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_trace(fh) -> tuple[dict, list[dict]]:
    lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or lines[0].get("format") != TRACE_FORMAT:
        raise NpsError("not an npsim trace")
    return lines[0], lines[1:]

