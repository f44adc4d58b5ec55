"""Domain types shared across the simulator.

Paths and sources use dense 1-based integer ids.  The extra protection path
of the extra-path strategy is path ``EXTRA_PATH`` (0).  Rounds are 1-based
and a session always has ``n`` rounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional

EXTRA_PATH = 0
DEFAULT_PAYLOAD_WIDTH = 8

# Exact rational; Fraction already keeps lowest terms and a positive denominator.
RationalCapacity = Fraction


class NpsError(Exception):
    """Base class for simulator errors."""


class InvalidInputError(NpsError, ValueError):
    pass


class ConfigurationError(NpsError, ValueError):
    pass


class UnsupportedFailureError(NpsError):
    """More than one path missing in a session."""


class CorruptedTraceError(NpsError):
    """A surviving path is missing packets."""


class StrategyKind(enum.Enum):
    NPS1_EXTRA = "nps1-extra"
    NPS1_DEDICATED = "nps1-dedicated"
    NPS2_ROTATING = "nps2"

    @classmethod
    def parse(cls, text: str) -> "StrategyKind":
        try:
            return cls(text)
        except ValueError:
            raise ConfigurationError(
                f"unknown strategy {text!r}; expected one of {[s.value for s in cls]}"
            ) from None


class PayloadKind(enum.Enum):
    DATA = "data"
    PARITY = "parity"


@dataclass(frozen=True)
class DataUnit:
    """Fixed-width payload; each byte holds 8 independent GF(2) symbols."""

    payload: bytes

    def __post_init__(self):
        if not isinstance(self.payload, (bytes, bytearray)):
            raise InvalidInputError("payload must be bytes")
        if len(self.payload) < 1:
            raise InvalidInputError("payload width must be >= 1")
        object.__setattr__(self, "payload", bytes(self.payload))

    @property
    def width(self) -> int:
        return len(self.payload)

    @classmethod
    def zero(cls, width: int) -> "DataUnit":
        return cls(bytes(width))

    @classmethod
    def from_hex(cls, text: str) -> "DataUnit":
        return cls(bytes.fromhex(text))

    def hex(self) -> str:
        return self.payload.hex()

    def __xor__(self, other: "DataUnit") -> "DataUnit":
        return xor(self, other)

    def __repr__(self):
        return f"DataUnit({self.payload.hex()})"


def xor(a: DataUnit, b: DataUnit) -> DataUnit:
    if a.width != b.width:
        raise InvalidInputError(f"width mismatch: {a.width} != {b.width}")
    n = int.from_bytes(a.payload, "big") ^ int.from_bytes(b.payload, "big")
    return DataUnit(n.to_bytes(a.width, "big"))


def xor_all(units: Iterable[DataUnit]) -> DataUnit:
    units = list(units)
    if not units:
        # a zero unit is never an implicit parity
        raise InvalidInputError("xor_all needs at least one unit")
    width = units[0].width
    if any(u.width != width for u in units):
        raise InvalidInputError("width mismatch in xor_all")
    acc = reduce(int.__xor__, (int.from_bytes(u.payload, "big") for u in units))
    return DataUnit(acc.to_bytes(width, "big"))


class SlotKind(enum.Enum):
    OWN_DATA = "data"
    PARITY = "parity"
    IDLE = "idle"


@dataclass(frozen=True)
class SlotAssignment:
    kind: SlotKind
    data_index: Optional[int] = None

    def __post_init__(self):
        if (self.kind is SlotKind.OWN_DATA) != (self.data_index is not None):
            raise InvalidInputError("data_index is set exactly for OwnData slots")
        if self.data_index is not None and self.data_index < 1:
            raise InvalidInputError("data_index is 1-based")

    @classmethod
    def own(cls, data_index: int) -> "SlotAssignment":
        return cls(SlotKind.OWN_DATA, data_index)

    @property
    def is_parity(self) -> bool:
        return self.kind is SlotKind.PARITY

    @property
    def is_data(self) -> bool:
        return self.kind is SlotKind.OWN_DATA


PARITY = SlotAssignment(SlotKind.PARITY)
IDLE = SlotAssignment(SlotKind.IDLE)


@dataclass(frozen=True)
class Packet:
    sender_id: int
    payload_kind: PayloadKind
    unit: DataUnit
    round: int
    session: int
    # which of the sender's own units this is; None for parity
    data_index: Optional[int] = None

    def __post_init__(self):
        if self.round < 1:
            raise InvalidInputError("round is 1-based")
        if self.session < 1:
            raise InvalidInputError("session is 1-based")
        if (self.payload_kind is PayloadKind.DATA) != (self.data_index is not None):
            raise InvalidInputError("data packets carry a data_index, parity packets do not")


@dataclass(frozen=True)
class TransmissionSchedule:
    """One session's slot matrix.

    ``paths`` lists the path ids in row order (extra path first when present);
    ``rows[k][r - 1]`` is the assignment of ``paths[k]`` at round ``r``.
    """

    n: int
    strategy: StrategyKind
    paths: tuple[int, ...]
    rows: tuple[tuple[SlotAssignment, ...], ...]
    dedicated_path: Optional[int] = None
    _index: dict = field(init=False, repr=False, compare=False)
    _own: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.paths) != len(self.rows):
            raise InvalidInputError("one row per path")
        if any(len(row) != self.n for row in self.rows):
            raise InvalidInputError("every row has n rounds")
        object.__setattr__(self, "_index", {p: k for k, p in enumerate(self.paths)})
        own = {
            p: tuple((slot.data_index, r) for r, slot in enumerate(row, start=1) if slot.is_data)
            for p, row in zip(self.paths, self.rows)
        }
        object.__setattr__(self, "_own", own)

    @property
    def extra_path_present(self) -> bool:
        return EXTRA_PATH in self._index

    @property
    def rounds(self) -> range:
        return range(1, self.n + 1)

    @property
    def sources(self) -> range:
        return range(1, self.n + 1)

    def row(self, path: int) -> tuple[SlotAssignment, ...]:
        try:
            return self.rows[self._index[path]]
        except KeyError:
            raise InvalidInputError(f"no path {path} in schedule") from None

    def slot(self, path: int, round: int) -> SlotAssignment:
        if not 1 <= round <= self.n:
            raise InvalidInputError(f"round {round} outside [1, {self.n}]")
        return self.row(path)[round - 1]

    def parity_path(self, round: int) -> int:
        for path in self.paths:
            if self.slot(path, round).is_parity:
                return path
        raise InvalidInputError(f"no parity slot at round {round}")

    def own_units(self, source: int) -> list[tuple[int, int]]:
        """(data_index, round) for every own unit ``source`` sends per session."""
        self.row(source)
        return list(self._own[source])

    def transmission_round(self, source: int, data_index: int) -> int:
        self.row(source)
        for idx, r in self._own[source]:
            if idx == data_index:
                return r
        raise InvalidInputError(f"source {source} never sends unit {data_index}")

    def slot_count(self, kind: SlotKind) -> int:
        return sum(slot.kind is kind for row in self.rows for slot in row)


@dataclass(frozen=True)
class FailureScenario:
    failed_path: Optional[int] = None
    # empty means every session
    sessions_affected: frozenset = frozenset()

    def failed_in(self, session: int) -> Optional[int]:
        if self.failed_path is None:
            return None
        if self.sessions_affected and session not in self.sessions_affected:
            return None
        return self.failed_path


NO_FAILURE = FailureScenario()
