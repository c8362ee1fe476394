"""Shared builders and randomised generators for the test suites.

The generators here are deliberately independent of the library's own search
logic: random systems are built from raw tables, and random implementations
are built by refining projection fibers, so they are valid by construction
rather than by calling the code under test.
"""
from __future__ import annotations

import random
from itertools import product

from bsm.formulas import polarity, uses_box
from bsm.kernel import (
    Component,
    ImplementationMap,
    Snapshot,
    System,
)
from bsm.logic import Valuation
from bsm.timed import OrderedComponent, TimedImplementation, observer_system

from oracles import rand_formula


def make_system(name, comp_sizes, table):
    """System over components named by comp_sizes {name: n_behaviours},
    with behaviour labels taken from the table keys."""
    comps = [
        Component(cn, tuple(f"{cn}{i}" for i in range(n)))
        for cn, n in sorted(comp_sizes.items())
    ]
    return System.from_table(name, comps, table)


def all_snapshots(components):
    names = [c.name for c in components]
    return [
        Snapshot(tuple(zip(names, combo)))
        for combo in product(*(c.behaviours for c in components))
    ]


def rand_component(rng: random.Random, name: str, size: int) -> Component:
    return Component(name, tuple(f"{name}{i}" for i in range(size)))


def rand_system(rng: random.Random, name: str, components, n_behaviours: int) -> System:
    comps = tuple(sorted(components, key=lambda c: c.name))
    names = [c.name for c in comps]
    behaviours = tuple(f"{name}_b{i}" for i in range(n_behaviours))
    assignments = tuple(
        Snapshot(tuple(zip(names, [rng.choice(c.behaviours) for c in comps])))
        for _ in behaviours
    )
    return System(name, comps, behaviours, assignments)


def temperature_model():
    """Celsius recorder, exact converter over a shared sensor, and their
    variables. The converter pairs every whole degree 0..10 with its
    Fahrenheit reading."""
    celsius = [str(i) for i in range(11)]
    fahrenheit = []
    for i in range(11):
        fifths = 9 * i + 160  # value scaled by five, exact
        whole, rem = divmod(fifths, 5)
        fahrenheit.append(str(whole) if rem == 0 else f"{whole}.{rem * 2}")
    c = Component("c", tuple(celsius))
    d = Component("d", tuple(fahrenheit))
    g = System(
        "g",
        (c,),
        tuple(celsius),
        tuple(Snapshot((("c", v),)) for v in celsius),
    )
    h = System(
        "h",
        (c, d),
        tuple(fahrenheit),
        tuple(Snapshot((("c", cv), ("d", fv))) for cv, fv in zip(celsius, fahrenheit)),
    )
    return g, h, celsius, fahrenheit


def rand_implementation(rng: random.Random, f: System, target_names, target_label: str):
    """A random valid implementation of a fresh system over `target_names`.

    Groups f's behaviours by their projection onto the target components,
    randomly splits every group into blocks, and invents one target
    behaviour per block; optionally adds unreachable extra behaviours. The
    result commutes by construction.
    """
    wanted = tuple(sorted(target_names))
    comps = tuple(f.component(n) for n in wanted)
    groups: dict = {}
    for x in f.behaviours:
        groups.setdefault(f.snapshot(x).restrict(wanted), []).append(x)
    behaviours = []
    assignments = []
    mapping = {}
    counter = 0
    for snap in sorted(groups, key=lambda s: s.entries):
        xs = groups[snap]
        rng.shuffle(xs)
        n_blocks = rng.randint(1, len(xs))
        blocks = [[] for _ in range(n_blocks)]
        for i, x in enumerate(xs):
            blocks[i % n_blocks].append(x)
        for block in blocks:
            y = f"{target_label}_y{counter}"
            counter += 1
            behaviours.append(y)
            assignments.append(snap)
            for x in block:
                mapping[x] = y
    # occasionally an unreached behaviour, so the map need not be onto
    if rng.random() < 0.3:
        snap = rng.choice(all_snapshots(comps))
        behaviours.append(f"{target_label}_extra")
        assignments.append(snap)
    g = System(target_label, comps, tuple(behaviours), tuple(assignments))
    impl = ImplementationMap(f, g, tuple((x, mapping[x]) for x in f.behaviours))
    return g, impl


def rand_valuation(rng: random.Random, components) -> Valuation:
    """One or two variables per component, each denoting a random subset of
    the declared labels (possibly empty, possibly everything)."""
    table = {}
    for comp in components:
        for var in ("p", "q")[: rng.randint(1, 2)]:
            labels = [b for b in comp.behaviours if rng.random() < 0.55]
            table[(comp.name, var)] = labels
    return Valuation.of(table)


def atom_pool(valuation: Valuation):
    return list(valuation.variables())


def rand_elementary(rng, pool, depth=2):
    while True:
        phi = rand_formula(rng, pool, depth, structural=False)
        if not uses_box(phi):
            return phi


def rand_polarized(rng, pool, want_positive, depth=2):
    while True:
        phi = rand_formula(rng, pool, depth, structural=False)
        pol = polarity(phi)
        if want_positive and pol.positive:
            return phi
        if not want_positive and pol.negative:
            return phi


def rand_order(rng: random.Random, labels) -> set[tuple[str, str]]:
    """Random strict forward edges, closed transitively (which keeps them
    antisymmetric since edges only point up the index order)."""
    strict = set()
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            if rng.random() < 0.45:
                strict.add((labels[i], labels[j]))
    changed = True
    while changed:
        changed = False
        for a, b in list(strict):
            for c, d in list(strict):
                if c == b and (a, d) not in strict:
                    strict.add((a, d))
                    changed = True
    return strict


def rand_timed(rng: random.Random) -> TimedImplementation:
    """A valid random instance: every base behaviour observed at least once."""
    comp = rand_component(rng, "a", rng.randint(2, 3))
    f = rand_system(rng, "f", [comp], rng.randint(1, 4))
    ticks = tuple(f"t{i}" for i in range(rng.randint(1, 4)))
    clock = Component("t", ticks)
    observer = OrderedComponent.of(clock, rand_order(rng, ticks))
    labels, rows, to_system, to_observer = [], [], [], []
    for x in f.behaviours:
        seen = rng.sample(ticks, rng.randint(1, min(2, len(ticks))))
        for tick in seen:
            label = f"{x}@{tick}"
            labels.append(label)
            rows.append(Snapshot(tuple(sorted(f.snapshot(x).entries + (("t", tick),)))))
            to_system.append((label, x))
            to_observer.append((label, tick))
    joint = System(
        "h",
        tuple(sorted(f.components + (clock,), key=lambda c: c.name)),
        tuple(labels),
        tuple(rows),
    )
    return TimedImplementation(
        f,
        observer,
        joint,
        ImplementationMap(joint, f, tuple(to_system)),
        ImplementationMap(joint, observer_system(observer), tuple(to_observer)),
    )
