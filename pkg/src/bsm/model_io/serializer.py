"""Canonical text rendering of a model.

The output is a fixed point of parsing: serializing a parsed model and
parsing it back yields an equal model, and serializing that parse again
yields identical bytes. Canonical choices: declarations keep their original
order, labels are always quoted, rows follow the owning object's declared
behaviour order, and derived sets (relation pairs, guarantee members) are
sorted by that order.
"""
from fractions import Fraction

from ..errors import ArgumentError
from ..formulas import render
from ..guarantees import (
    BehaviourRelation,
    Conjunction,
    Consistency,
    ExplicitFamily,
    Guarantee,
    PartitionTolerance,
    StrongAvailability,
    WeakAvailability,
)
from ..kernel import ImplementationMap, System
from .parser import ModelFile


def quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def fraction_text(value: Fraction) -> str:
    return str(value)


def _find(table: dict, value, what: str) -> str:
    for name, candidate in table.items():
        if candidate == value:
            return name
    raise ArgumentError(f"the model does not declare {what}")


def _system_name(model: ModelFile, system: System) -> str:
    return _find(model.systems, system, f"the system {system.name!r}")


def _impl_name(model: ModelFile, impl: ImplementationMap) -> str:
    return _find(
        model.impls, impl, f"an implementation {impl.source.name!r} -> {impl.target.name!r}"
    )


def _order_index(system: System) -> dict[str, int]:
    return {b: i for i, b in enumerate(system.behaviours)}


def _component(model: ModelFile, name: str) -> str:
    comp = model.components[name]
    labels = " ".join(quote(b) for b in comp.behaviours)
    head = f"component {name} {{ {labels} }}" if labels else f"component {name} {{ }}"
    ordered = model.ordered.get(name)
    if ordered is None:
        return head
    index = {b: i for i, b in enumerate(comp.behaviours)}
    strict = sorted(
        (p for p in ordered.order if p[0] != p[1]),
        key=lambda p: (index[p[0]], index[p[1]]),
    )
    if not strict:
        return head + " order { }"
    rows = "\n".join(f"  {quote(a)} <= {quote(b)}" for a, b in strict)
    return f"{head} order {{\n{rows}\n}}"


def _system(model: ModelFile, name: str) -> str:
    system = model.systems[name]
    over = ", ".join(system.component_names)
    if not system.behaviours:
        return f"system {name} over {over} {{ }}"
    rows = []
    for behaviour in system.behaviours:
        snap = system.snapshot(behaviour)
        cells = ", ".join(f"{c}: {quote(v)}" for c, v in snap.entries)
        rows.append(f"  {quote(behaviour)} -> {cells}")
    body = "\n".join(rows)
    return f"system {name} over {over} {{\n{body}\n}}"


def _impl(model: ModelFile, name: str) -> str:
    impl = model.impls[name]
    source = _system_name(model, impl.source)
    target = _system_name(model, impl.target)
    if not impl.mapping:
        return f"impl {name} : {source} -> {target} {{ }}"
    rows = "\n".join(f"  {quote(x)} -> {quote(y)}" for x, y in impl.mapping)
    return f"impl {name} : {source} -> {target} {{\n{rows}\n}}"


def _valuation(model: ModelFile, name: str) -> str:
    valuation = model.valuations[name]
    if not valuation.entries:
        return f"valuation {name} {{ }}"
    rows = []
    for (comp, var), labels in valuation.entries:
        inner = " ".join(quote(lbl) for lbl in sorted(labels))
        cell = f"{{ {inner} }}" if inner else "{ }"
        rows.append(f"  {comp}::{var} = {cell}")
    body = "\n".join(rows)
    return f"valuation {name} {{\n{body}\n}}"


def _relation(model: ModelFile, name: str) -> str:
    relation = model.relations[name]
    carrier = _system_name(model, relation.carrier)
    if not relation.pairs:
        return f"relation {name} on {carrier} {{ }}"
    index = _order_index(relation.carrier)
    pairs = sorted(relation.pairs, key=lambda p: (index[p[0]], index[p[1]]))
    rows = "\n".join(f"  {quote(a)} -> {quote(b)}" for a, b in pairs)
    return f"relation {name} on {carrier} {{\n{rows}\n}}"


def _guarantee(model: ModelFile, name: str) -> str:
    g = model.guarantees[name]
    head = f"guarantee {name} = "
    if isinstance(g, Consistency):
        target = _system_name(model, g.target)
        index = _order_index(g.target)
        members = " ".join(quote(m) for m in sorted(g.members, key=index.__getitem__))
        cell = f"{{ {members} }}" if members else "{ }"
        return f"{head}consistency {target} {cell}"
    if isinstance(g, WeakAvailability):
        return head + "weak " + _find(model.relations, g.relation, "the relation")
    if isinstance(g, StrongAvailability):
        return head + "strong " + _find(model.relations, g.relation, "the relation")
    if isinstance(g, PartitionTolerance):
        return (
            head
            + "partition "
            + _impl_name(model, g.view1)
            + " "
            + _impl_name(model, g.view2)
        )
    if isinstance(g, ExplicitFamily):
        target = _system_name(model, g.target)
        index = _order_index(g.target)
        subsets = sorted(
            (tuple(sorted(s, key=index.__getitem__)) for s in g.family),
            key=lambda s: tuple(index[m] for m in s),
        )
        cells = []
        for subset in subsets:
            inner = " ".join(quote(m) for m in subset)
            cells.append(f"{{ {inner} }}" if inner else "{ }")
        body = " ".join(cells)
        return f"{head}family {target} {{ {body} }}" if body else f"{head}family {target} {{ }}"
    if isinstance(g, Conjunction):
        parts = " ".join(
            _find(model.guarantees, part, "a conjunct guarantee") for part in g.parts
        )
        return head + "all " + parts
    raise ArgumentError(f"no text form for guarantee {name!r}")


def _universe(model: ModelFile, name: str) -> str:
    universe = model.universes[name]
    members = " ".join(_system_name(model, s) for s in universe.systems)
    return f"universe {name} {{ {members} }}" if members else f"universe {name} {{ }}"


def _scenario(model: ModelFile, name: str) -> str:
    cfg = model.scenarios[name]
    stamps = ", ".join(fraction_text(t) for t in cfg.timestamps)
    values = ", ".join(quote(v) for v in cfg.values)
    return (
        f"scenario {name} {{\n"
        f"  timestamps: {stamps}\n"
        f"  values: {values}\n"
        f"  initial: {quote(cfg.initial_value)}\n"
        f"  max_length: {cfg.max_length}\n"
        f"}}"
    )


_RENDERERS = {
    "component": _component,
    "system": _system,
    "impl": _impl,
    "valuation": _valuation,
    "relation": _relation,
    "guarantee": _guarantee,
    "universe": _universe,
    "scenario": _scenario,
}


def serialize_model(model: ModelFile) -> str:
    blocks = []
    for kind, name in model.order:
        if kind == "formula":
            blocks.append(f"formula {name} = {render(model.formulas[name])}")
        else:
            blocks.append(_RENDERERS[kind](model, name))
    return "\n\n".join(blocks) + "\n"
