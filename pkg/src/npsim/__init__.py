"""Network-coding protection of n disjoint connections against one link failure."""

__version__ = "0.1.0"

from .core import (
    EXTRA_PATH,
    DataUnit,
    FailureScenario,
    Packet,
    PayloadKind,
    RationalCapacity,
    SlotAssignment,
    SlotKind,
    StrategyKind,
    TransmissionSchedule,
    xor,
    xor_all,
)
from .schedule import build_schedule, covering_parity_round, parity_combination
from .coding import CollectorState, SessionSourceData, compute_parity, decode_session, recover_failed_units
from .metrics import SessionReport, fairness_summary, normalized_capacity, score_session
from .transport import SimulationConfig, run_session, run_simulation, generate_source_data
