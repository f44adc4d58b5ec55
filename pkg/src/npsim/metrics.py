"""Exact capacity accounting, per-receiver delivery scoring and fairness."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Sequence

from .core import InvalidInputError, RationalCapacity, SlotKind, StrategyKind, TransmissionSchedule

if TYPE_CHECKING:
    from .coding import DeliveryRecord


@dataclass(frozen=True)
class ReceiverStats:
    scheduled_units: int
    direct_units: int
    recovered_units: int
    lost_units: int
    max_recovery_delay: Optional[int] = None  # None when nothing was recovered

    def as_tuple(self):
        return (self.direct_units, self.recovered_units, self.lost_units, self.max_recovery_delay)


@dataclass(frozen=True)
class SessionReport:
    strategy: StrategyKind
    n: int
    session: int
    failed_path: Optional[int]
    per_receiver: dict  # receiver -> ReceiverStats
    normalized_capacity: RationalCapacity
    recovery_success: bool
    scenario: int = 0

    @property
    def recovered_units(self) -> int:
        return sum(s.recovered_units for s in self.per_receiver.values())

    def recovery_delays(self) -> list[int]:
        return [s.max_recovery_delay for s in self.per_receiver.values() if s.max_recovery_delay is not None]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "n": self.n,
            "session": self.session,
            "scenario": self.scenario,
            "failed_path": self.failed_path,
            "per_receiver": {
                str(r): {
                    "scheduled": s.scheduled_units,
                    "direct": s.direct_units,
                    "recovered": s.recovered_units,
                    "lost": s.lost_units,
                    "max_recovery_delay": s.max_recovery_delay,
                }
                for r, s in sorted(self.per_receiver.items())
            },
            "normalized_capacity": capacity_to_dict(self.normalized_capacity),
            "recovery_success": self.recovery_success,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionReport":
        return cls(
            strategy=StrategyKind(d["strategy"]),
            n=d["n"],
            session=d["session"],
            failed_path=d["failed_path"],
            per_receiver={
                int(r): ReceiverStats(s["scheduled"], s["direct"], s["recovered"], s["lost"], s["max_recovery_delay"])
                for r, s in d["per_receiver"].items()
            },
            normalized_capacity=capacity_from_dict(d["normalized_capacity"]),
            recovery_success=d["recovery_success"],
            scenario=d["scenario"],
        )


def capacity_to_dict(c: Fraction) -> dict:
    return {"num": c.numerator, "den": c.denominator}


def capacity_from_dict(d: dict) -> Fraction:
    return Fraction(d["num"], d["den"])


def normalized_capacity(schedule: TransmissionSchedule) -> RationalCapacity:
    """Own-data slots over all slots in one session."""
    total = len(schedule.paths) * schedule.n
    return Fraction(schedule.slot_count(SlotKind.OWN_DATA), total)


def closed_form_capacity(strategy: StrategyKind, n: int) -> RationalCapacity:
    """Closed-form capacity: n/(n+1) with an extra path, (n-1)/n otherwise."""
    if strategy is StrategyKind.NPS1_EXTRA:
        return Fraction(n, n + 1)
    return Fraction(n - 1, n)


def score_session(record: "DeliveryRecord", schedule: TransmissionSchedule) -> SessionReport:
    per = {}
    for receiver, rows in record.deliveries.items():
        lost = len(record.lost[receiver])
        delays = [d.delay for d in rows if d.recovered]
        per[receiver] = ReceiverStats(
            scheduled_units=len(rows),
            direct_units=sum(d.obtained and not d.recovered for d in rows),
            recovered_units=sum(d.obtained and d.recovered for d in rows),
            lost_units=lost,
            max_recovery_delay=max(delays) if delays else None,
        )
    return SessionReport(
        strategy=record.strategy,
        n=record.n,
        session=record.session,
        failed_path=record.failed_path,
        per_receiver=per,
        normalized_capacity=normalized_capacity(schedule),
        recovery_success=all(s.lost_units == 0 for s in per.values()),
    )


def fairness_summary(reports: Sequence[SessionReport]) -> dict:
    """Mean own units delivered per source per session, as exact rationals."""
    if not reports:
        raise InvalidInputError("no reports")
    if len({(r.strategy, r.n) for r in reports}) != 1:
        raise InvalidInputError("fairness_summary needs reports from one strategy and n")
    totals: dict[int, int] = {}
    for rep in reports:
        for src, s in rep.per_receiver.items():
            totals[src] = totals.get(src, 0) + s.direct_units + s.recovered_units
    return {src: Fraction(t, len(reports)) for src, t in sorted(totals.items())}
