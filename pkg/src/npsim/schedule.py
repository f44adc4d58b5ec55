"""Slot schedules for the three protection strategies and their parity sets."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .core import (
    EXTRA_PATH,
    PARITY,
    ConfigurationError,
    InvalidInputError,
    NpsError,
    SlotAssignment,
    StrategyKind,
    TransmissionSchedule,
)


class CoverageNotFoundError(NpsError, LookupError):
    pass


@dataclass(frozen=True)
class ParityCombination:
    round: int
    parity_path: int
    terms: frozenset  # of (source_id, data_index)


def rotating_parity_path(n: int, round: int) -> int:
    """Path carrying parity at ``round`` under rotating parity (anti-diagonal)."""
    return n - round + 1


def build_schedule(
    strategy: StrategyKind, n: int, dedicated_path: Optional[int] = None
) -> TransmissionSchedule:
    if n < 2:
        raise ConfigurationError(f"need at least 2 disjoint paths, got n={n}")
    if strategy is StrategyKind.NPS1_DEDICATED:
        if dedicated_path is None:
            raise ConfigurationError("nps1-dedicated needs a dedicated path")
        if not 1 <= dedicated_path <= n:
            raise ConfigurationError(f"dedicated path {dedicated_path} outside [1, {n}]")
    elif dedicated_path is not None:
        raise ConfigurationError(f"dedicated path is only valid for nps1-dedicated")

    working = tuple(range(1, n + 1))
    all_data = tuple(SlotAssignment.own(r) for r in range(1, n + 1))
    all_parity = (PARITY,) * n

    if strategy is StrategyKind.NPS1_EXTRA:
        return TransmissionSchedule(
            n, strategy, (EXTRA_PATH,) + working, (all_parity,) + (all_data,) * n
        )
    if strategy is StrategyKind.NPS1_DEDICATED:
        rows = tuple(all_parity if i == dedicated_path else all_data for i in working)
        return TransmissionSchedule(n, strategy, working, rows, dedicated_path)

    rows = []
    for i in working:
        p = rotating_parity_path(n, i)  # parity round of source i
        row = []
        for r in range(1, n + 1):
            if r < p:
                row.append(SlotAssignment.own(r))
            elif r == p:
                row.append(PARITY)
            else:
                row.append(SlotAssignment.own(r - 1))
        rows.append(tuple(row))
    return TransmissionSchedule(n, strategy, working, tuple(rows))


def parity_combination(schedule: TransmissionSchedule, round: int) -> ParityCombination:
    n = schedule.n
    if not 1 <= round <= n:
        raise InvalidInputError(f"round {round} outside [1, {n}]")
    return _combination(schedule.strategy, n, schedule.dedicated_path, round)


@lru_cache(maxsize=4096)
def _combination(strategy: StrategyKind, n: int, dedicated: Optional[int], round: int) -> ParityCombination:
    if strategy is StrategyKind.NPS1_EXTRA:
        terms = {(i, round) for i in range(1, n + 1)}
        path = EXTRA_PATH
    elif strategy is StrategyKind.NPS1_DEDICATED:
        path = dedicated
        terms = {(i, round) for i in range(1, n + 1) if i != path}
    else:
        path = rotating_parity_path(n, round)
        terms = {(i, round) for i in range(1, n - round + 1)}
        terms |= {(i, round - 1) for i in range(n - round + 2, n + 1)}
    return ParityCombination(round, path, frozenset(terms))


def covering_parity_round(schedule: TransmissionSchedule, source: int, data_index: int) -> int:
    """Round whose parity unit includes ``source``'s unit ``data_index``."""
    for r in schedule.rounds:
        if (source, data_index) in parity_combination(schedule, r).terms:
            return r
    raise CoverageNotFoundError(f"unit ({source}, {data_index}) is not covered by any parity")


def _cell(slot: SlotAssignment, path: int, round: int) -> str:
    if slot.is_parity:
        return f"y{round}"
    if slot.is_data:
        return f"x{path}^{slot.data_index}"
    return "-"


def render_schedule(schedule: TransmissionSchedule) -> str:
    """Aligned text table, rows = sender->receiver, columns = rounds."""
    order = [p for p in schedule.paths if p != EXTRA_PATH]
    if schedule.extra_path_present:
        order.append(EXTRA_PATH)
    header = [""] + [str(r) for r in schedule.rounds]
    table = [header]
    for path in order:
        label = "s -> r" if path == EXTRA_PATH else f"s{path} -> r{path}"
        table.append(
            [label] + [_cell(s, path, r) for r, s in enumerate(schedule.row(path), 1)]
        )
    widths = [max(len(row[c]) for row in table) for c in range(len(header))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in table
    ]
    lines.insert(1, "-" * len(lines[0]))
    title = f"{schedule.strategy.value}, n={schedule.n}, one session"
    return "\n".join([title] + lines)
