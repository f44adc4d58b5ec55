"""Parity computation at the distributor and recovery at the collector."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    CorruptedTraceError,
    DataUnit,
    InvalidInputError,
    Packet,
    PayloadKind,
    StrategyKind,
    TransmissionSchedule,
    UnsupportedFailureError,
    xor_all,
)
from .schedule import covering_parity_round, parity_combination


def units_per_source(strategy: StrategyKind, n: int) -> int:
    return n - 1 if strategy is StrategyKind.NPS2_ROTATING else n


@dataclass(frozen=True)
class SessionSourceData:
    """Own data units of every source for one session, keyed by (source, data_index)."""

    n: int
    strategy: StrategyKind
    units: dict

    def __post_init__(self):
        per = units_per_source(self.strategy, self.n)
        expected = {(i, d) for i in range(1, self.n + 1) for d in range(1, per + 1)}
        if set(self.units) != expected:
            raise InvalidInputError("source data dimensions do not match the strategy")
        if len({u.width for u in self.units.values()}) != 1:
            raise InvalidInputError("all units in a session share one width")

    @property
    def width(self) -> int:
        return next(iter(self.units.values())).width

    def unit(self, source: int, data_index: int) -> DataUnit:
        try:
            return self.units[source, data_index]
        except KeyError:
            raise InvalidInputError(f"no unit ({source}, {data_index})") from None

    def check_matches(self, schedule: TransmissionSchedule) -> None:
        if schedule.n != self.n or schedule.strategy is not self.strategy:
            raise InvalidInputError("source data does not match schedule")


def compute_parity(data: SessionSourceData, schedule: TransmissionSchedule, round: int) -> DataUnit:
    data.check_matches(schedule)
    combo = parity_combination(schedule, round)
    return xor_all(data.unit(*t) for t in sorted(combo.terms))


@dataclass
class CollectorState:
    """Packets gathered by the receiver-side collector in one session.

    Only the owning session loop writes to it.
    """

    schedule: TransmissionSchedule
    failed_path: Optional[int] = None
    received: dict = field(default_factory=dict)  # (path, round) -> Packet

    def receive(self, path: int, packet: Packet) -> None:
        if path == self.failed_path:
            raise InvalidInputError(f"path {path} is down this session")
        self.schedule.slot(path, packet.round)
        self.received[path, packet.round] = packet

    def missing_paths(self) -> list[int]:
        """Paths with no packet at all; raises if a surviving path has gaps."""
        missing = []
        for path in self.schedule.paths:
            got = sum((path, r) in self.received for r in self.schedule.rounds)
            if got == 0:
                missing.append(path)
            elif got < self.schedule.n:
                raise CorruptedTraceError(f"path {path} is missing {self.schedule.n - got} packets")
        if len(missing) > 1:
            raise UnsupportedFailureError(f"paths {missing} all missing; only one failure is modelled")
        if self.failed_path is not None and missing and missing != [self.failed_path]:
            raise CorruptedTraceError(
                f"announced failure on path {self.failed_path} but path {missing[0]} is missing"
            )
        return missing

    def data_packet(self, source: int, data_index: int) -> Packet:
        r = self.schedule.transmission_round(source, data_index)
        return self.received[source, r]


@dataclass(frozen=True)
class Recovery:
    unit: DataUnit
    covering_round: int
    # last round whose packets were needed for the reconstruction
    ready_round: int


def _recover(state: CollectorState, missing: list[int]) -> dict:
    if not missing:
        return {}
    failed = missing[0]
    schedule = state.schedule
    out = {}
    for data_index, _ in schedule.own_units(failed):
        r = covering_parity_round(schedule, failed, data_index)
        combo = parity_combination(schedule, r)
        parity = state.received[combo.parity_path, r]
        others = [state.data_packet(*t) for t in sorted(combo.terms - {(failed, data_index)})]
        # over GF(2) the subtraction in x_j = X - sum(others) is XOR
        unit = xor_all([parity.unit] + [p.unit for p in others])
        ready = max([r] + [p.round for p in others])
        out[failed, data_index] = Recovery(unit, r, ready)
    return out


def recover_failed_units(state: CollectorState) -> dict:
    """Reconstruct the own data units lost on the failed path.

    Lost parity units are not rebuilt; they carry no source data.
    """
    return {key: rec.unit for key, rec in _recover(state, state.missing_paths()).items()}


@dataclass(frozen=True)
class UnitDelivery:
    source: int
    data_index: int
    round: int  # scheduled transmission round
    unit: Optional[DataUnit]
    recovered: bool = False
    delay: Optional[int] = None  # rounds; None for direct delivery

    @property
    def obtained(self) -> bool:
        return self.unit is not None


@dataclass(frozen=True)
class DeliveryRecord:
    strategy: StrategyKind
    n: int
    session: int
    failed_path: Optional[int]
    deliveries: dict  # receiver -> tuple[UnitDelivery, ...], one per scheduled unit
    lost: dict  # receiver -> tuple of data_index not obtained bit-exactly

    def obtained_units(self, receiver: int) -> dict:
        return {d.data_index: d.unit for d in self.deliveries[receiver] if d.obtained}


def decode_session(
    state: CollectorState, data: SessionSourceData, session: int = 1
) -> DeliveryRecord:
    """Per-receiver delivery after recovery, checked against the source data."""
    schedule = state.schedule
    data.check_matches(schedule)
    missing = state.missing_paths()
    recoveries = _recover(state, missing)
    deliveries, lost = {}, {}
    for receiver in schedule.sources:
        rows, bad = [], []
        for data_index, r in schedule.own_units(receiver):
            key = (receiver, data_index)
            if (receiver, r) in state.received:
                d = UnitDelivery(receiver, data_index, r, state.received[receiver, r].unit)
            elif key in recoveries:
                rec = recoveries[key]
                d = UnitDelivery(receiver, data_index, r, rec.unit, True, rec.ready_round - r)
            else:
                d = UnitDelivery(receiver, data_index, r, None)
            if d.unit != data.unit(*key):
                bad.append(data_index)
            rows.append(d)
        deliveries[receiver] = tuple(rows)
        lost[receiver] = tuple(bad)
    return DeliveryRecord(
        schedule.strategy, schedule.n, session, missing[0] if missing else None, deliveries, lost
    )


def packet_equations(state: CollectorState) -> list[tuple[frozenset, bytes]]:
    """Received packets as GF(2) equations over (source, data_index) unknowns."""
    eqs = []
    for (path, r), packet in sorted(state.received.items()):
        if packet.payload_kind is PayloadKind.DATA:
            terms = frozenset({(path, packet.data_index)})
        else:
            terms = parity_combination(state.schedule, r).terms
        eqs.append((terms, packet.unit.payload))
    return eqs
