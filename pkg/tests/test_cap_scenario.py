"""Trace-scenario checks backed by brute-force oracles.

The oracles deliberately take different routes from the library: the universe
oracle grows traces by repeated one-action extension instead of the library's
slot-product enumeration, the relation oracles filter the full universe
instead of generating extensions, and the consistency oracle samples read
windows densely (every timestamp plus midpoints) instead of at write change
points only.
"""
from fractions import Fraction

import pytest

from bsm.cap_scenario import (
    Action,
    ReadRequest,
    ReadReturn,
    ScenarioConfig,
    Trace,
    Write,
    current_value,
    enumerate_traces,
    fresh_value,
    generate_scenario,
    is_consistent,
    matched_reads,
    read_request,
    read_return,
    trace_count,
    verify_scenario,
    witness_room,
    write,
    written_values,
)
from bsm.errors import ArgumentError, CapacityError, DomainError
from bsm.guarantees import cap_verify_closure
from bsm.kernel import ImplementationMap, is_input

MICRO = ScenarioConfig((1,), ("s0",), "s0", 1)
SMALL = ScenarioConfig((1, 2), ("s0", "a"), "s0", 2)
GOOD = ScenarioConfig((1, 2, 3), ("s0", "a"), "s0", 3)
RICH = ScenarioConfig((1, 2, 3, 4), ("s0", "a", "b"), "s0", 4)
FRAC = ScenarioConfig((Fraction(1, 2), 1, Fraction(3, 2)), ("s0", "a"), "s0", 2)
VALUES3 = ScenarioConfig((1, 2, 3), ("s0", "a", "b"), "s0", 3)

_SCENARIOS = {}


def scenario_for(cfg):
    if cfg not in _SCENARIOS:
        _SCENARIOS[cfg] = generate_scenario(cfg)
    return _SCENARIOS[cfg]


# ----------------------------------------------------------------- oracles


def kind_key(kind):
    if isinstance(kind, ReadRequest):
        return ("request",)
    if isinstance(kind, ReadReturn):
        return ("return", kind.value)
    return ("write", kind.value)


def key_of(tr):
    return tuple((a.timestamp, a.user, kind_key(a.kind)) for a in tr.actions)


def universe_oracle(cfg):
    """All bounded well-formed traces, grown by one-action extension."""
    atoms = []
    for u in (1, 2):
        atoms.append((u, ("request",)))
        atoms.extend((u, ("return", s)) for s in cfg.values)
        atoms.extend((u, ("write", s)) for s in cfg.values)
    seen = {()}
    frontier = [()]
    while frontier:
        tr = frontier.pop()
        if len(tr) == cfg.max_length:
            continue
        last = tr[-1][0] if tr else None
        for t in cfg.timestamps:
            if last is not None and t <= last:
                continue
            for u, kind in atoms:
                ext = tr + ((t, u, kind),)
                if ext not in seen:
                    seen.add(ext)
                    frontier.append(ext)
    return seen


def value_at(tr, t, cfg):
    writes = [
        (a.timestamp, a.kind.value)
        for a in tr.actions
        if isinstance(a.kind, Write) and a.timestamp <= t
    ]
    return writes[-1][1] if writes else cfg.initial_value


def consistent_oracle(tr, cfg):
    """Dense-sample consistency: probe every timestamp inside each window
    plus the midpoints between consecutive probes."""
    pairs = []
    for user in (1, 2):
        pending = None
        for a in tr.actions:
            if a.user != user or isinstance(a.kind, Write):
                continue
            if isinstance(a.kind, ReadRequest):
                pending = a
            else:
                if pending is not None:
                    pairs.append((pending, a))
                pending = None
    for req, ret in pairs:
        lo, hi = req.timestamp, ret.timestamp
        stamps = sorted(
            {lo, hi} | {a.timestamp for a in tr.actions if lo <= a.timestamp <= hi}
        )
        probes = list(stamps) + [(x + y) / 2 for x, y in zip(stamps, stamps[1:])]
        if not any(value_at(tr, p, cfg) == ret.kind.value for p in probes):
            return False
    return True


def write_successor_oracle(scenario, wk):
    """Write extensions of the trace with key wk, filtered from the universe."""
    out = set()
    for x in scenario.traces:
        xk = key_of(x)
        if len(xk) != len(wk) + 1 or xk[: len(wk)] != wk:
            continue
        _, user, kind = xk[-1]
        if user == 2 and kind[0] == "write":
            out.add(x.render())
    return out


def read_successor_oracle(scenario, wk):
    """Bracketed-read extensions of the trace with key wk, filtered from the
    universe: first-user request, any second-user actions, first-user return."""
    out = set()
    for x in scenario.traces:
        xk = key_of(x)
        if len(xk) < len(wk) + 2 or xk[: len(wk)] != wk:
            continue
        added = xk[len(wk):]
        if added[0][1] != 1 or added[0][2] != ("request",):
            continue
        if added[-1][1] != 1 or added[-1][2][0] != "return":
            continue
        if any(u != 2 for _, u, _k in added[1:-1]):
            continue
        out.add(x.render())
    return out


# ------------------------------------------------------------ trace basics


def test_action_rendering_and_validation():
    assert read_request(1, 1).render() == "1:rd^1?"
    assert read_return(2, 1, "s0").render() == "2:rd^1(s0)"
    assert write(3, 2, "a").render() == "3:wr^2(a)"
    assert write(Fraction(3, 2), 2, "b").render() == "3/2:wr^2(b)"
    assert str(read_request(Fraction(1, 2), 2)) == "1/2:rd^2?"
    with pytest.raises(ArgumentError, match="user must be 1 or 2"):
        read_request(1, 3)
    with pytest.raises(ArgumentError, match="negative"):
        write(-1, 1, "a")
    with pytest.raises(ArgumentError, match="exact rational"):
        Action(1.5, 1, ReadRequest())
    with pytest.raises(ArgumentError, match="unknown action kind"):
        Action(1, 1, "read")


def test_trace_wellformedness():
    tr = Trace((write(1, 2, "a"), read_request(2, 1)))
    assert tr.render() == "⟨1:wr^2(a), 2:rd^1?⟩"
    assert str(Trace(())) == "⟨⟩"
    assert len(tr) == 2
    assert [a.user for a in tr] == [2, 1]
    assert tr.last_timestamp == 2
    assert Trace(()).last_timestamp is None
    with pytest.raises(ArgumentError, match="strictly ascending"):
        Trace((read_request(2, 1), write(1, 2, "a")))
    with pytest.raises(ArgumentError, match="strictly ascending"):
        Trace((read_request(1, 1), read_return(1, 1, "a")))
    assert tr.extended(write(3, 1, "b")).render() == "⟨1:wr^2(a), 2:rd^1?, 3:wr^1(b)⟩"
    assert tr.for_user(1).render() == "⟨2:rd^1?⟩"
    assert tr.for_user(2).render() == "⟨1:wr^2(a)⟩"
    with pytest.raises(ArgumentError, match="user must be 1 or 2"):
        tr.for_user(0)


def test_projections_stay_wellformed():
    for tr in scenario_for(SMALL).traces:
        for user in (1, 2):
            view = tr.for_user(user)
            assert all(a.user == user for a in view)
            stamps = [a.timestamp for a in view.actions]
            assert stamps == sorted(set(stamps))


def test_config_validation():
    with pytest.raises(ArgumentError, match="strictly ascending"):
        ScenarioConfig((2, 1), ("s0",), "s0", 1)
    with pytest.raises(ArgumentError, match="non-negative"):
        ScenarioConfig((-1, 2), ("s0",), "s0", 1)
    with pytest.raises(ArgumentError, match="exact rational"):
        ScenarioConfig((0.5, 1), ("s0",), "s0", 1)
    with pytest.raises(ArgumentError, match="non-empty"):
        ScenarioConfig((1,), (), "s0", 1)
    with pytest.raises(ArgumentError, match="repeats"):
        ScenarioConfig((1,), ("s0", "s0"), "s0", 1)
    with pytest.raises(ArgumentError, match="not in the alphabet"):
        ScenarioConfig((1,), ("a",), "s0", 1)
    with pytest.raises(ArgumentError, match="break trace rendering"):
        ScenarioConfig((1,), ("s0", "a,b"), "s0", 1)
    with pytest.raises(ArgumentError, match="break trace rendering"):
        ScenarioConfig((1,), ("s0", ""), "s0", 1)
    with pytest.raises(ArgumentError, match="exceeds"):
        ScenarioConfig((1, 2), ("s0",), "s0", 3)
    with pytest.raises(ArgumentError, match="non-negative integer"):
        ScenarioConfig((1,), ("s0",), "s0", -1)
    # a single-value alphabet is constructible; only verification flags it
    ScenarioConfig((1, 2, 3), ("s0",), "s0", 3)
    ScenarioConfig((), ("s0",), "s0", 0)


# ------------------------------------------------------------- enumeration


def test_count_matches_extension_oracle():
    for cfg in (MICRO, SMALL, FRAC, GOOD, ScenarioConfig((), ("s0",), "s0", 0)):
        expected = universe_oracle(cfg)
        traces = enumerate_traces(cfg)
        assert trace_count(cfg) == len(expected)
        assert len(traces) == len(expected)
        assert {key_of(tr) for tr in traces} == expected


def test_micro_universe_pinned():
    # one timestamp and one value: three actions per user plus the empty trace
    assert trace_count(MICRO) == 7
    labels = [tr.render() for tr in enumerate_traces(MICRO)]
    assert labels == [
        "⟨⟩",
        "⟨1:rd^1?⟩",
        "⟨1:rd^1(s0)⟩",
        "⟨1:wr^1(s0)⟩",
        "⟨1:rd^2?⟩",
        "⟨1:rd^2(s0)⟩",
        "⟨1:wr^2(s0)⟩",
    ]


def test_capacity_error_names_exact_count():
    with pytest.raises(CapacityError, match="1331"):
        enumerate_traces(GOOD, cap=1000)
    with pytest.raises(CapacityError, match="7"):
        generate_scenario(MICRO, cap=6)


# ---------------------------------------------------------- register model


def test_current_value_pinned():
    cfg = VALUES3
    assert current_value(Trace(()), 5, cfg) == "s0"
    tr = Trace((write(1, 2, "a"), write(2, 1, "b")))
    assert current_value(tr, Fraction(3, 2), cfg) == "a"
    assert current_value(tr, 2, cfg) == "b"
    assert current_value(tr, 1, cfg) == "a"
    assert current_value(tr, Fraction(1, 2), cfg) == "s0"
    assert current_value(tr, 100, cfg) == "b"
    with pytest.raises(ArgumentError, match="exact rational"):
        current_value(tr, 1.5, cfg)


def test_current_value_constant_between_writes():
    cfg = SMALL
    probes = [Fraction(0)] + [t for t in cfg.timestamps]
    probes += [
        (a + b) / 2 for a, b in zip(cfg.timestamps, cfg.timestamps[1:])
    ] + [cfg.timestamps[-1] + 1]
    for tr in scenario_for(cfg).traces:
        for p in probes:
            assert current_value(tr, p, cfg) == value_at(tr, p, cfg)
        stamps = [
            a.timestamp for a in tr.actions if isinstance(a.kind, Write)
        ]
        for w1, w2 in zip(stamps, stamps[1:]):
            plateau = current_value(tr, w1, cfg)
            assert current_value(tr, (w1 + w2) / 2, cfg) == plateau


def test_consistency_pinned_examples():
    cfg = VALUES3
    assert is_consistent(Trace(()), cfg)
    assert is_consistent(Trace((read_request(1, 1), read_return(2, 1, "s0"))), cfg)
    bad = Trace((write(1, 2, "a"), read_request(2, 1), read_return(3, 1, "s0")))
    assert not is_consistent(bad, cfg)
    # a write inside the window rescues the read of its value
    assert is_consistent(
        Trace((read_request(1, 1), write(2, 2, "b"), read_return(3, 1, "b"))), cfg
    )
    # the window's starting value stays achievable despite a later write
    assert is_consistent(
        Trace((read_request(1, 1), write(2, 2, "b"), read_return(3, 1, "s0"))), cfg
    )
    # a second request re-anchors the pairing; the first dangles unconstrained
    assert is_consistent(
        Trace((read_request(1, 1), read_request(2, 1), read_return(3, 1, "s0"))), cfg
    )
    # other-user reads do not break a pairing
    assert is_consistent(
        Trace((read_request(1, 1), read_return(2, 2, "a"), read_return(3, 1, "s0"))),
        cfg,
    )
    # bare returns are unmatched, hence unconstrained
    assert is_consistent(Trace((read_return(1, 1, "b"),)), cfg)
    # matched pairs of the second user constrain symmetrically
    assert not is_consistent(
        Trace((write(1, 1, "b"), read_request(2, 2), read_return(3, 2, "s0"))), cfg
    )


def test_consistency_matches_dense_oracle():
    for cfg in (SMALL, FRAC, GOOD):
        for tr in scenario_for(cfg).traces:
            assert is_consistent(tr, cfg) == consistent_oracle(tr, cfg), tr.render()


def test_matched_reads_pairing():
    tr = Trace(
        (
            read_request(1, 1),
            read_request(2, 2),
            read_return(3, 1, "s0"),
            read_return(4, 2, "a"),
        )
    )
    pairs = matched_reads(tr)
    assert [(req.user, ret.user) for req, ret in pairs] == [(1, 1), (2, 2)]
    assert [req.timestamp for req, _ in pairs] == [1, 2]
    assert matched_reads(Trace((read_return(1, 1, "a"),))) == ()


# ----------------------------------------------------- generated scenarios


def test_systems_and_projections_small():
    scenario = scenario_for(SMALL)
    f = scenario.system
    assert f.component_names == ("user1", "user2")
    assert len(f.behaviours) == trace_count(SMALL) == 121
    # per-user universes are the single-user traces under the same budget
    assert len(scenario.view1_system.behaviours) == 36
    assert len(scenario.view2_system.behaviours) == 36
    for sigma in (scenario.projection1, scenario.projection2):
        assert isinstance(sigma, ImplementationMap)
        assert is_input(sigma)
    assert f.behaviours[0] == "⟨⟩"
    assert scenario.projection1.apply("⟨⟩") == "⟨⟩"
    assert scenario.projection2.apply("⟨⟩") == "⟨⟩"
    mixed = "⟨1:wr^2(a), 2:rd^1?⟩"
    assert scenario.projection1.apply(mixed) == "⟨2:rd^1?⟩"
    assert scenario.projection2.apply(mixed) == "⟨1:wr^2(a)⟩"
    assert scenario.trace(mixed).render() == mixed
    with pytest.raises(DomainError, match="not a generated trace"):
        scenario.trace("⟨9:rd^1?⟩")
    assert generate_scenario(SMALL) == scenario


def test_write_relation_matches_universe_filter():
    scenario = scenario_for(SMALL)
    rel = scenario.write_relation
    for tr in scenario.traces:
        expected = write_successor_oracle(scenario, key_of(tr))
        assert set(rel.successors(tr.render())) == expected, tr.render()
    assert ("⟨⟩", "⟨1:wr^2(a)⟩") in rel.pairs
    assert rel.successors("⟨⟩") == (
        "⟨1:wr^2(s0)⟩",
        "⟨1:wr^2(a)⟩",
        "⟨2:wr^2(s0)⟩",
        "⟨2:wr^2(a)⟩",
    )
    # budget exhaustion: no later timestamp, or no remaining length
    assert "⟨2:rd^1?⟩" not in rel.domain
    assert "⟨1:rd^1?, 2:rd^1(s0)⟩" not in rel.domain


def test_read_relation_matches_universe_filter():
    scenario = scenario_for(SMALL)
    rel = scenario.read_relation
    for tr in scenario.traces:
        expected = read_successor_oracle(scenario, key_of(tr))
        assert set(rel.successors(tr.render())) == expected, tr.render()
    assert rel.successors("⟨⟩") == (
        "⟨1:rd^1?, 2:rd^1(s0)⟩",
        "⟨1:rd^1?, 2:rd^1(a)⟩",
    )
    # a middle segment by the second user appears once the budget allows it
    good = scenario_for(GOOD)
    wk = key_of(Trace(()))
    assert set(good.read_relation.successors("⟨⟩")) == read_successor_oracle(good, wk)
    assert len(good.read_relation.successors("⟨⟩")) == 16
    assert (
        "⟨1:rd^1?, 2:wr^2(a), 3:rd^1(s0)⟩" in good.read_relation.successors("⟨⟩")
    )
    after_write = "⟨1:wr^2(a)⟩"
    assert set(good.read_relation.successors(after_write)) == read_successor_oracle(
        good, key_of(good.trace(after_write))
    )


def test_relations_extend_strictly():
    for cfg in (SMALL, MICRO):
        scenario = scenario_for(cfg)
        for rel in (scenario.write_relation, scenario.read_relation):
            for w, x in rel.pairs:
                shorter = scenario.trace(w).actions
                longer = scenario.trace(x).actions
                assert len(longer) > len(shorter)
                assert longer[: len(shorter)] == shorter
    assert scenario_for(MICRO).read_relation.pairs == frozenset()


def test_fresh_values_and_witness_room():
    cfg = VALUES3
    assert written_values(Trace((write(1, 2, "a"), write(2, 1, "b")))) == {"a", "b"}
    assert fresh_value(Trace(()), cfg) == "a"
    assert fresh_value(Trace((write(1, 2, "a"),)), cfg) == "b"
    assert fresh_value(Trace((write(1, 2, "a"), write(2, 2, "b"))), cfg) is None
    single = ScenarioConfig((1, 2, 3), ("s0",), "s0", 3)
    assert fresh_value(Trace(()), single) is None
    assert witness_room(Trace(()), cfg)
    assert not witness_room(Trace((write(1, 2, "a"),)), cfg)  # length budget
    four = RICH
    assert witness_room(Trace((write(1, 2, "a"),)), four)
    assert not witness_room(Trace((write(2, 2, "a"),)), four)  # too few later stamps


# ------------------------------------------------------------ verification


def test_verify_small_entangled_config():
    report = verify_scenario(GOOD)
    assert report.trace_count == 1331
    assert report.witness_domain == ("⟨⟩",)
    assert report.entangled
    assert report.entanglement.restricted
    assert report.entanglement.domain_size == 1
    # the certified witness is the canonical fresh write
    assert report.fresh_witnesses == (("⟨⟩", "⟨1:wr^2(a)⟩"),)
    assert report.missing_fresh == ()
    assert report.entanglement.witnesses[0].chosen == "⟨1:wr^2(a)⟩"
    assert report.closure.verdict
    assert report.closure.witnesses[0].violated == "consistency"
    assert report.forced_violation == "⟨1:wr^2(a), 2:rd^1?, 3:rd^1(s0)⟩"
    assert report.exhaustive is None
    assert any("witness" in note for note in report.notes)


def test_forced_violation_shape():
    """The closure's unacceptable trace shows the expected failure: a read
    returned a value that was never current in its window and was not
    written afterwards either."""
    report = verify_scenario(GOOD)
    cfg = GOOD
    tr = report.scenario.trace(report.forced_violation)
    assert not is_consistent(tr, cfg)
    (req, ret) = next(
        (req, ret)
        for req, ret in matched_reads(tr)
        if all(
            current_value(tr, m, cfg) != ret.kind.value
            for m in [req.timestamp]
            + [
                a.timestamp
                for a in tr.actions
                if isinstance(a.kind, Write)
                and req.timestamp < a.timestamp <= ret.timestamp
            ]
        )
    )
    later_writes = {
        a.kind.value
        for a in tr.actions
        if isinstance(a.kind, Write) and a.timestamp > req.timestamp
    }
    assert ret.kind.value not in later_writes


def test_verify_micro_modes_agree():
    report = verify_scenario(MICRO)
    assert report.exhaustive is not None
    assert report.closure.verdict == report.exhaustive.verdict
    # one slot leaves no room for a read pair, so the weak obligation is
    # vacuous and both verifiers accept the write-closed set
    assert report.closure.verdict is False
    assert any("agree" in note for note in report.notes)
    assert report.witness_domain == ()
    assert any("vacuous" in note for note in report.notes)
    assert report.entangled  # vacuously, and the note says so
    assert report.forced_violation is None


def test_verify_single_value_reports_missing_fresh():
    report = verify_scenario(ScenarioConfig((1, 2, 3), ("s0",), "s0", 3))
    assert report.missing_fresh == ("⟨⟩",)
    assert report.fresh_witnesses == ()
    assert any("no fresh value" in note for note in report.notes)
    # with the alphabet exhausted the stale write is defeated by a pair of
    # acceptable merges, so the check fails rather than being faked
    assert not report.entangled


def test_verify_zero_budget():
    report = verify_scenario(ScenarioConfig((), ("s0",), "s0", 0))
    assert report.trace_count == 1
    assert report.witness_domain == ()
    assert report.closure.verdict is False
    assert report.exhaustive is not None
    assert report.closure.verdict == report.exhaustive.verdict


def test_entangled_whenever_alphabet_outlasts_budget():
    # alphabet bigger than the budget: a fresh value always exists
    roomy = ScenarioConfig((1, 2, 3), ("s0", "a", "b", "c"), "s0", 3)
    report = verify_scenario(roomy)
    assert report.entangled
    assert report.missing_fresh == ()
    assert len(report.fresh_witnesses) == len(report.witness_domain) == 1
    # too tight for any witness: vacuous, and reported as such
    tight = ScenarioConfig((1, 2), ("s0", "a", "b"), "s0", 2)
    tight_report = verify_scenario(tight)
    assert tight_report.witness_domain == ()
    assert tight_report.entangled
    assert any("vacuous" in note for note in tight_report.notes)


def test_closure_violates_from_every_witness_seed():
    scenario = scenario_for(RICH)
    cfg = RICH
    seeds = [
        lbl
        for lbl, tr in zip(scenario.system.behaviours, scenario.traces)
        if witness_room(tr, cfg)
    ]
    assert len(seeds) == 15  # the empty trace plus every one-action trace at 1
    for seed in seeds:
        report = cap_verify_closure(scenario.instance, seed)
        assert report.verdict, seed
        assert report.witnesses[0].violated in ("consistency", "partition tolerance")
    # freshness holds on the whole witness domain, so entanglement does too
    from bsm.guarantees import is_entangled

    assert all(fresh_value(scenario.trace(s), cfg) is not None for s in seeds)
    assert is_entangled(scenario.instance, domain=seeds).entangled
