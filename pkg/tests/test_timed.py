"""Ordered observers: validation, the derived relation, and its quotient.

The derived relation is recomputed here by a literal scan over all pairs of
composition behaviours, independently of the library's fiber grouping.
"""
from __future__ import annotations

import random

import pytest

from bsm.errors import ArgumentError, PreconditionError
from bsm.kernel import Component, ImplementationMap, Snapshot, System
from bsm.timed import (
    OrderedComponent,
    TimedImplementation,
    derived_order,
    minimal_behaviours,
    observer_system,
    preorder_quotient,
    timed_product,
    validate_timed,
)

from conftest import rand_component, rand_system, rand_timed


# ------------------------------------------------------------- oracles

def derived_oracle(t: TimedImplementation) -> set[tuple[str, str]]:
    to_system = dict(t.onto_system.mapping)
    reading = dict(t.onto_observer.mapping)
    joint = t.composition.behaviours
    out = set()
    for x in t.system.behaviours:
        for y in t.system.behaviours:
            if all(
                t.observer.leq(reading[v], reading[w])
                for v in joint
                if to_system[v] == x
                for w in joint
                if to_system[w] == y
            ):
                out.add((x, y))
    return out


def minimal_oracle(t: TimedImplementation) -> tuple[str, ...]:
    relation = derived_oracle(t)
    return tuple(
        x
        for x in t.system.behaviours
        if not any(
            y != x and (y, x) in relation and (x, y) not in relation
            for y in t.system.behaviours
        )
    )


# ------------------------------------------------------------- generators

def chain_instance():
    """Two events observed strictly in sequence."""
    c = Component("c", ("c0", "c1"))
    f = System("f", (c,), ("x", "y"),
               (Snapshot((("c", "c0"),)), Snapshot((("c", "c1"),))))
    clock = Component("t", ("t0", "t1"))
    observer = OrderedComponent.of(clock, [("t0", "t1")])
    joint = System(
        "h", (c, clock), ("x@t0", "y@t1"),
        (Snapshot((("c", "c0"), ("t", "t0"))), Snapshot((("c", "c1"), ("t", "t1")))),
    )
    return TimedImplementation(
        f, observer, joint,
        ImplementationMap(joint, f, (("x@t0", "x"), ("y@t1", "y"))),
        ImplementationMap(joint, observer_system(observer), (("x@t0", "t0"), ("y@t1", "t1"))),
    )


# ------------------------------------------------------------- ordered components

def test_ordered_component_validates_the_axioms():
    clock = Component("t", ("t0", "t1", "t2"))
    with pytest.raises(ArgumentError, match="reflexive"):
        OrderedComponent(clock, frozenset({("t0", "t1")}))
    with pytest.raises(ArgumentError, match="antisymmetric"):
        OrderedComponent.of(clock, [("t0", "t1"), ("t1", "t0")])
    # a missing composite pair is rejected, never filled in
    with pytest.raises(ArgumentError, match="transitive"):
        OrderedComponent.of(clock, [("t0", "t1"), ("t1", "t2")])
    with pytest.raises(ArgumentError, match="leaves component"):
        OrderedComponent.of(clock, [("t0", "zz")])


def test_ordered_component_leq_and_implicit_diagonal():
    clock = Component("t", ("t0", "t1"))
    observer = OrderedComponent.of(clock, [("t0", "t1")])
    assert observer.leq("t0", "t1") and observer.leq("t0", "t0")
    assert not observer.leq("t1", "t0")
    assert observer.name == "t"
    with pytest.raises(ArgumentError):
        observer.leq("t0", "zz")
    assert len(observer.order) == 3


def test_observer_system_keeps_the_labels():
    clock = Component("t", ("t0", "t1"))
    obs = observer_system(OrderedComponent.of(clock, []))
    assert obs.behaviours == ("t0", "t1")
    assert obs.local_value("t1", "t") == "t1"


# ------------------------------------------------------------- validation

def test_the_full_product_with_projections_is_valid():
    rng = random.Random(42)
    f = rand_system(rng, "f", [rand_component(rng, "a", 2)], 3)
    clock = Component("t", ("t0", "t1"))
    observer = OrderedComponent.of(clock, [("t0", "t1")])
    t = timed_product(f, observer)
    report = validate_timed(t)
    assert report.valid and not report.failures
    assert len(t.composition.behaviours) == 6


def test_an_observer_already_in_the_system_is_rejected_by_name():
    c = Component("c", ("c0", "c1"))
    f = System("f", (c,), ("x",), (Snapshot((("c", "c0"),)),))
    observer = OrderedComponent.of(c, [])
    report = validate_timed(timed_product(f, observer))
    assert not report.valid
    assert any(line.startswith("fresh-observer:") for line in report.failures)


def test_a_non_surjective_system_map_is_rejected_by_name():
    t = chain_instance()
    # drop y's observation from the composition
    joint = System(
        "h", t.composition.components, ("x@t0",),
        (Snapshot((("c", "c0"), ("t", "t0"))),),
    )
    broken = TimedImplementation(
        t.system, t.observer, joint,
        ImplementationMap(joint, t.system, (("x@t0", "x"),)),
        ImplementationMap(joint, observer_system(t.observer), (("x@t0", "t0"),)),
    )
    report = validate_timed(broken)
    assert report.failures == ("input: the system map must be surjective",)


def test_wiring_and_component_clauses_are_reported_by_name():
    t = chain_instance()
    swapped = TimedImplementation(
        t.system, t.observer, t.composition, t.onto_observer, t.onto_system
    )
    report = validate_timed(swapped)
    assert not report.valid
    assert all(line.startswith("wiring:") for line in report.failures)
    # composition that never includes the observer component
    flat = TimedImplementation(
        t.system,
        t.observer,
        t.system,
        ImplementationMap(t.system, t.system, (("x", "x"), ("y", "y"))),
        ImplementationMap(
            t.system, observer_system(t.observer), (("x", "t0"), ("y", "t1"))
        ),
    )
    report = validate_timed(flat)
    assert any(line.startswith("components:") for line in report.failures)


def test_a_non_commuting_map_is_reported_by_name():
    t = chain_instance()
    # send y's observation to the wrong base behaviour
    broken = TimedImplementation(
        t.system, t.observer, t.composition,
        ImplementationMap(t.composition, t.system, (("x@t0", "x"), ("y@t1", "x"))),
        t.onto_observer,
    )
    report = validate_timed(broken)
    assert any(line.startswith("system-map:") for line in report.failures)
    assert any("does not commute" in line for line in report.failures)


def test_derived_order_requires_a_valid_instance():
    t = chain_instance()
    swapped = TimedImplementation(
        t.system, t.observer, t.composition, t.onto_observer, t.onto_system
    )
    with pytest.raises(PreconditionError):
        derived_order(swapped)


# ------------------------------------------------------------- derived order

def test_a_constant_reading_relates_everything():
    rng = random.Random(7)
    f = rand_system(rng, "f", [rand_component(rng, "a", 2)], 3)
    clock = Component("t", ("t0", "t1"))
    observer = OrderedComponent.of(clock, [])
    labels = tuple(f"{x}@t0" for x in f.behaviours)
    rows = tuple(
        Snapshot(tuple(sorted(f.snapshot(x).entries + (("t", "t0"),))))
        for x in f.behaviours
    )
    joint = System("h", tuple(sorted(f.components + (clock,), key=lambda c: c.name)),
                   labels, rows)
    t = TimedImplementation(
        f, observer, joint,
        ImplementationMap(joint, f, tuple(zip(labels, f.behaviours))),
        ImplementationMap(joint, observer_system(observer),
                          tuple((l, "t0") for l in labels)),
    )
    relation = derived_order(t)
    assert relation.pairs == frozenset(
        (x, y) for x in f.behaviours for y in f.behaviours
    )
    assert minimal_behaviours(t) == f.behaviours
    view = preorder_quotient(t)
    assert view.classes == (f.behaviours,)
    assert view.minimal_classes() == (0,)


def test_a_two_step_chain_orders_the_two_events():
    t = chain_instance()
    relation = derived_order(t)
    assert ("x", "y") in relation.pairs
    assert ("y", "x") not in relation.pairs
    assert ("x", "x") in relation.pairs and ("y", "y") in relation.pairs
    assert minimal_behaviours(t) == ("x",)
    view = preorder_quotient(t)
    assert view.classes == (("x",), ("y",))
    assert view.class_of("y") == 1
    assert view.minimal_classes() == (0,)
    with pytest.raises(ArgumentError):
        view.class_of("zz")


def test_two_incomparable_observations_break_reflexivity():
    c = Component("c", ("c0",))
    f = System("f", (c,), ("x",), (Snapshot((("c", "c0"),)),))
    clock = Component("t", ("t0", "t1"))
    observer = OrderedComponent.of(clock, [])
    t = timed_product(f, observer)
    assert validate_timed(t).valid
    relation = derived_order(t)
    assert ("x", "x") not in relation.pairs
    # nothing is strictly below x, so it still counts as minimal
    assert minimal_behaviours(t) == ("x",)
    with pytest.raises(PreconditionError, match="not reflexive"):
        preorder_quotient(t)


def test_derived_order_matches_the_literal_scan():
    rng = random.Random(909)
    for _ in range(80):
        t = rand_timed(rng)
        assert validate_timed(t).valid
        assert derived_order(t).pairs == frozenset(derived_oracle(t))
        assert minimal_behaviours(t) == minimal_oracle(t)


def test_derived_order_is_transitive_on_valid_instances():
    rng = random.Random(808)
    for _ in range(80):
        t = rand_timed(rng)
        pairs = derived_order(t).pairs
        for x, y in pairs:
            for y2, z in pairs:
                if y2 == y:
                    assert (x, z) in pairs


def test_quotient_collapses_mutually_related_behaviours():
    # two events observed at the same single time fall into one class,
    # strictly below a third event observed later
    c = Component("c", ("c0", "c1"))
    f = System(
        "f", (c,), ("x", "y", "z"),
        (Snapshot((("c", "c0"),)), Snapshot((("c", "c1"),)), Snapshot((("c", "c0"),))),
    )
    clock = Component("t", ("t0", "t1"))
    observer = OrderedComponent.of(clock, [("t0", "t1")])
    joint = System(
        "h", (c, clock), ("x@t0", "y@t0", "z@t1"),
        (
            Snapshot((("c", "c0"), ("t", "t0"))),
            Snapshot((("c", "c1"), ("t", "t0"))),
            Snapshot((("c", "c0"), ("t", "t1"))),
        ),
    )
    t = TimedImplementation(
        f, observer, joint,
        ImplementationMap(joint, f, (("x@t0", "x"), ("y@t0", "y"), ("z@t1", "z"))),
        ImplementationMap(joint, observer_system(observer),
                          (("x@t0", "t0"), ("y@t0", "t0"), ("z@t1", "t1"))),
    )
    assert validate_timed(t).valid
    relation = derived_order(t)
    assert ("x", "y") in relation.pairs and ("y", "x") in relation.pairs
    assert ("x", "z") in relation.pairs and ("z", "x") not in relation.pairs
    view = preorder_quotient(t)
    assert view.classes == (("x", "y"), ("z",))
    assert view.class_of("y") == 0
    assert view.minimal_classes() == (0,)
    assert minimal_behaviours(t) == ("x", "y")
