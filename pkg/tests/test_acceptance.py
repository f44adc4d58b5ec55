"""Exit criteria.  Each test records one PASS/FAIL line, printed at the end of the run.

Run alone with ``pytest tests/test_acceptance.py`` (lines appear in the summary)
or ``python tests/test_acceptance.py``.
"""

import time
from fractions import Fraction

import pytest

from npsim import gf2
from npsim.cli import main
from npsim.coding import decode_session, packet_equations, recover_failed_units
from npsim.core import DataUnit, StrategyKind
from npsim.metrics import fairness_summary, normalized_capacity, score_session
from npsim.schedule import build_schedule, covering_parity_round, parity_combination
from npsim.transport import ExhaustiveSweep, SimulationConfig, generate_source_data, run_session

EXTRA, DED, ROT = StrategyKind.NPS1_EXTRA, StrategyKind.NPS1_DEDICATED, StrategyKind.NPS2_ROTATING

RESULTS = {}


def record(criterion, ok, detail):
    RESULTS[criterion] = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    assert ok, RESULTS[criterion]


def sweep(strategy, n, width, seed=0):
    """Every failure position for one (strategy, n); yields (failed, state, data, record)."""
    config = SimulationConfig(n, strategy, failure=ExhaustiveSweep(), payload_width=width, rng_seed=seed)
    schedule = config.schedule()
    data = generate_source_data(config, 1)
    for failed in config.scenarios(1):
        _, state = run_session(config, 1, schedule, data, failed)
        yield failed, schedule, state, data, decode_session(state, data)


def test_1_capacity_exactness():
    start = time.perf_counter()
    bad = []
    for n in range(2, 65):
        expected = {EXTRA: Fraction(n, n + 1), DED: Fraction(n - 1, n), ROT: Fraction(n - 1, n)}
        for strategy, cap in expected.items():
            got = normalized_capacity(build_schedule(strategy, n, n if strategy is DED else None))
            if got != cap:
                bad.append((strategy.value, n, got))
    elapsed = time.perf_counter() - start
    record(1, not bad and elapsed < 1.0, f"capacity exact for n=2..64, {len(bad)} mismatches, {elapsed:.3f}s (<1s)")


def test_2_exhaustive_single_failure_recovery():
    start = time.perf_counter()
    scenarios, failures = 0, []
    for width in (1, 8):
        for strategy in StrategyKind:
            for n in range(2, 17):
                for failed, schedule, state, data, rec in sweep(strategy, n, width, seed=n):
                    scenarios += 1
                    for receiver in schedule.sources:
                        want = {d: data.units[receiver, d] for d, _ in schedule.own_units(receiver)}
                        if rec.obtained_units(receiver) != want or rec.lost[receiver]:
                            failures.append((width, strategy.value, n, failed, receiver))
    elapsed = time.perf_counter() - start
    expected = 2 * sum(3 * (n + 1) + 1 for n in range(2, 17))
    record(
        2,
        not failures and scenarios == expected and elapsed < 5.0,
        f"{scenarios} scenarios (expected {expected}), {len(failures)} receivers short, {elapsed:.2f}s (<5s)",
    )


def test_3_gaussian_elimination_oracle():
    checked, mismatches = 0, []
    for strategy in StrategyKind:
        for n in range(2, 9):
            for failed, schedule, state, data, _ in sweep(strategy, n, width=1, seed=100 + n):
                unknowns = [(i, d) for i in schedule.sources for d, _ in schedule.own_units(i)]
                solved = gf2.solve(unknowns, packet_equations(state), 1)
                direct = {(p, pk.data_index) for (p, _), pk in state.received.items() if pk.data_index is not None}
                oracle = {k: DataUnit(v) for k, v in solved.items() if k not in direct}
                checked += 1
                if oracle != recover_failed_units(state):
                    mismatches.append((strategy.value, n, failed))
    record(3, not mismatches, f"GF(2) elimination matches structured decoder on {checked} instances, {len(mismatches)} mismatches")


def test_4_nps2_structure():
    violations = 0
    for n in range(2, 33):
        s = build_schedule(ROT, n)
        for r in s.rounds:
            column = {(p, s.slot(p, r).data_index) for p in s.paths if s.slot(p, r).is_data}
            violations += parity_combination(s, r).terms != column
        for k in s.sources:
            rounds = sorted(covering_parity_round(s, k, d) for d in range(1, n))
            free = [r for r in s.rounds if not s.slot(k, r).is_parity]
            violations += rounds != free
    record(4, violations == 0, f"column-XOR and coverage bijection for n=2..32, {violations} violations")


def test_5_nps2_zero_delay():
    delays = []
    for width in (1, 8):
        for n in range(2, 17):
            for _, schedule, _, _, rec in sweep(ROT, n, width, seed=n):
                delays += [d.delay for rows in rec.deliveries.values() for d in rows if d.recovered]
    record(5, bool(delays) and set(delays) == {0}, f"{len(delays)} recovered units, delays seen {sorted(set(delays))}")


def test_6_determinism(tmp_path):
    outputs = []
    for k in (1, 2):
        report, trace = tmp_path / f"r{k}.json", tmp_path / f"t{k}.jsonl"
        code = main(
            ["run", "--strategy", "nps2", "--paths", "6", "--sessions", "25", "--fail", "random",
             "--seed", "42", "--out", str(report), "--trace", str(trace)]
        )
        assert code == 0
        outputs.append((report.read_bytes(), trace.read_bytes()))
    sweeps = []
    for k in (1, 2):
        out = tmp_path / f"s{k}.json"
        main(["sweep", "--strategy", "all", "--paths-min", "2", "--paths-max", "5", "--out", str(out)])
        sweeps.append(out.read_bytes())
    ok = outputs[0] == outputs[1] and sweeps[0] == sweeps[1]
    record(6, ok, "identical configs give byte-identical reports and traces")


def test_7_fairness_contrast():
    bad = []
    for n in range(2, 17):
        rot = SimulationConfig(n, ROT, failure=ExhaustiveSweep())
        ded = SimulationConfig(n, DED, dedicated_path=n, failure=ExhaustiveSweep())
        for config, expect in (
            (rot, {i: n - 1 for i in range(1, n + 1)}),
            (ded, {**{i: n for i in range(1, n)}, n: 0}),
        ):
            schedule = config.schedule()
            data = generate_source_data(config, 1)
            reports = []
            for failed in config.scenarios(1):
                _, state = run_session(config, 1, schedule, data, failed)
                reports.append(score_session(decode_session(state, data), schedule))
            if fairness_summary(reports) != expect:
                bad.append((config.strategy.value, n))
    record(7, not bad, f"nps2 uniform n-1, nps1-dedicated 0 for dedicated source, n=2..16; {len(bad)} deviations")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
