"""Generic GF(2) decoder used as an independent check on the structured one.

Every received packet becomes one linear equation over the unknown data
units; the system is reduced by Gauss-Jordan elimination with rows stored as
int bitsets and right-hand sides as payload integers.
"""

from __future__ import annotations

from typing import Hashable, Sequence


def solve(
    unknowns: Sequence[Hashable],
    equations: Sequence[tuple[frozenset, bytes]],
    width: int,
) -> dict:
    """Return ``{unknown: payload}`` for every unknown the equations pin down.

    ``equations`` holds ``(terms, payload)`` pairs meaning
    ``XOR(unknown for unknown in terms) == payload``.
    """
    col = {u: k for k, u in enumerate(unknowns)}
    rows = []
    for terms, payload in equations:
        mask = 0
        for t in terms:
            mask ^= 1 << col[t]
        rows.append([mask, int.from_bytes(payload, "big")])

    pivot_row = 0
    for c in range(len(unknowns)):
        bit = 1 << c
        pivot = next((k for k in range(pivot_row, len(rows)) if rows[k][0] & bit), None)
        if pivot is None:
            continue
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        pm, pv = rows[pivot_row]
        for k, (m, v) in enumerate(rows):
            if k != pivot_row and m & bit:
                rows[k] = [m ^ pm, v ^ pv]
        pivot_row += 1

    for m, v in rows[pivot_row:]:
        if m == 0 and v != 0:
            raise ValueError("inconsistent system")

    solved = {}
    for m, v in rows[:pivot_row]:
        if m & (m - 1) == 0:
            solved[unknowns[m.bit_length() - 1]] = v.to_bytes(width, "big")
    return solved

