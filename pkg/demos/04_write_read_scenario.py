"""Walkthrough: the bounded write/read scenario and its forced violation.

Two users share one register. Traces interleave writes by user 2 with
read request/return pairs by user 1 on a fixed timestamp grid. Each user's
view keeps only their own actions. The verifier checks that the instance is
entangled on the traces with room for a write-then-read witness, then grows
an implementation from the empty trace along the availability obligations
until it is forced to contain a behaviour outside the acceptable set: a
stale read.

Run: python3 demos/04_write_read_scenario.py
"""
from bsm import (
    ScenarioConfig,
    Write,
    current_value,
    generate_scenario,
    is_consistent,
    matched_reads,
    trace_count,
    verify_scenario,
)


def main():
    cfg = ScenarioConfig((1, 2, 3), ("s0", "a"), "s0", 3)
    print("== scenario universe ==")
    print(f"  timestamps {cfg.timestamps}, values {cfg.values}, "
          f"initial {cfg.initial_value!r}, max length {cfg.max_length}")
    print(f"  trace count: {trace_count(cfg)}")

    scenario = generate_scenario(cfg)
    print(f"  system {scenario.system.name!r} over "
          f"{scenario.system.component_names}")
    sample = [b for b in scenario.system.behaviours if b.count(":") == 2][:3]
    for b in sample:
        print(f"    e.g. {b}")

    report = verify_scenario(cfg)
    print("\n== verification ==")
    print(f"  witness domain (traces with room left): {report.witness_domain}")
    print(f"  entangled there: {report.entangled}")
    print(f"  closure verdict (no subset survives): {report.closure.verdict}")
    print(f"  forced violation: {report.forced_violation}")

    tr = scenario.trace(report.forced_violation)
    print(f"  consistent: {is_consistent(tr, cfg)}")
    for req, ret in matched_reads(tr):
        window = [req.timestamp] + [
            a.timestamp
            for a in tr.actions
            if isinstance(a.kind, Write) and req.timestamp < a.timestamp <= ret.timestamp
        ]
        currents = {current_value(tr, m, cfg) for m in window}
        print(f"  read requested at {req.timestamp}, returned {ret.kind.value!r} "
              f"at {ret.timestamp}; values current in its window: {currents}")
    print("  the returned value was never current and is not written later: stale")

    print("\n== same story, richer alphabet ==")
    rich = verify_scenario(ScenarioConfig((1, 2, 3), ("s0", "a", "b"), "s0", 3))
    print(f"  {trace_count(rich.scenario.config)} traces, entangled: {rich.entangled}, "
          f"closure verdict: {rich.closure.verdict}")

    print("\n== tiny universe: both verifiers fit and agree ==")
    micro = verify_scenario(ScenarioConfig((1,), ("s0",), "s0", 1))
    print(f"  {micro.trace_count} traces; closure {micro.closure.verdict}, "
          f"exhaustive {micro.exhaustive.verdict}")
    for note in micro.notes:
        print(f"  note: {note}")


if __name__ == "__main__":
    main()
