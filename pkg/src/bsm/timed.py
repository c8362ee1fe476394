"""Time as an outside observation of a system.

A system is given a notion of time by composing it with one extra component
whose behaviour labels carry a partial order: the observer's reading. The
composition's behaviours pair system events with observations, and pulling
the observer's order back through the two maps induces a relation on the
base system's behaviours. That derived relation is always transitive for a
valid instance but need not be reflexive or antisymmetric; it is exposed
raw, with a separate quotient view for the cases where it is a preorder.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ArgumentError, PreconditionError
from .guarantees import BehaviourRelation
from .kernel import (
    Component,
    ImplementationMap,
    ImplementationViolation,
    System,
    components_as_system,
    is_input,
    tensor,
    validate_implementation,
)


@dataclass(frozen=True)
class OrderedComponent:
    """A component whose behaviour labels are partially ordered.

    The order is given extensionally as the full set of related pairs and
    must already be reflexive, antisymmetric, and transitive; nothing is
    closed or repaired on the caller's behalf. The `of` constructor accepts
    the diagonal implicitly, since leaving it out is a matter of
    presentation, but a missing transitive pair is rejected there too.
    """

    component: Component
    order: frozenset[tuple[str, str]]

    def __post_init__(self):
        if not isinstance(self.order, frozenset):
            object.__setattr__(self, "order", frozenset(self.order))
        labels = set(self.component.behaviours)
        for a, b in self.order:
            if a not in labels or b not in labels:
                raise ArgumentError(
                    f"order pair ({a!r}, {b!r}) leaves component {self.component.name!r}"
                )
        for a in labels:
            if (a, a) not in self.order:
                raise ArgumentError(f"order is not reflexive: ({a!r}, {a!r}) missing")
        for a, b in self.order:
            if a != b and (b, a) in self.order:
                raise ArgumentError(f"order is not antisymmetric: {a!r} and {b!r}")
        for a, b in self.order:
            for c, d in self.order:
                if c == b and (a, d) not in self.order:
                    raise ArgumentError(
                        f"order is not transitive: ({a!r}, {b!r}) and ({b!r}, {d!r}) "
                        f"without ({a!r}, {d!r})"
                    )

    @classmethod
    def of(cls, component: Component, pairs: Iterable[tuple[str, str]]) -> "OrderedComponent":
        """Build from a pair list that may leave the diagonal implicit."""
        full = {(a, b) for a, b in pairs}
        full.update((x, x) for x in component.behaviours)
        return cls(component, frozenset(full))

    @property
    def name(self) -> str:
        return self.component.name

    def leq(self, a: str, b: str) -> bool:
        if a not in self.component or b not in self.component:
            raise ArgumentError(
                f"{a!r} or {b!r} is not a behaviour of component {self.component.name!r}"
            )
        return (a, b) in self.order

    def __hash__(self) -> int:
        return hash((self.component, self.order))


def observer_system(observer: OrderedComponent) -> System:
    """The observer as a one-component system; labels stand for themselves."""
    return components_as_system([observer.component])


@dataclass(frozen=True)
class TimedImplementation:
    """A system composed with an ordered observer of its events.

    composition is the joint system, onto_system and onto_observer are the
    two maps out of it. The constructor stores what it is given; check the
    defining clauses with validate_timed, or build a canonical instance with
    timed_product.
    """

    system: System
    observer: OrderedComponent
    composition: System
    onto_system: ImplementationMap
    onto_observer: ImplementationMap


@dataclass(frozen=True)
class TimedValidation:
    """Outcome of checking the defining clauses, failures named one by one."""

    valid: bool
    failures: tuple[str, ...]


def timed_product(
    f: System, observer: OrderedComponent, cap: Optional[int] = None
) -> TimedImplementation:
    """The canonical timed implementation: the full product of the system
    with the observer, with its two projections. Always valid."""
    combined = tensor(f, observer_system(observer), cap)
    return TimedImplementation(
        f, observer, combined.system, combined.onto_left, combined.onto_right
    )


def validate_timed(t: TimedImplementation) -> TimedValidation:
    """Check every defining clause and name the ones that fail.

    Map commutation is only checked once the wiring and component clauses
    hold, since it is meaningless otherwise.
    """
    failures = []
    obs = observer_system(t.observer)
    if t.onto_system.source != t.composition or t.onto_observer.source != t.composition:
        failures.append("wiring: both maps must start from the composition")
    if t.onto_system.target != t.system:
        failures.append("wiring: the system map must land in the base system")
    if t.onto_observer.target != obs:
        failures.append(
            "wiring: the observer map must land in the observer's identity system"
        )
    if t.observer.component.name in t.system.component_names:
        failures.append(
            f"fresh-observer: component {t.observer.component.name!r} already "
            "belongs to the base system"
        )
    wanted = {c.name: c for c in t.system.components}
    wanted[t.observer.component.name] = t.observer.component
    have = {c.name: c for c in t.composition.components}
    if wanted != have:
        failures.append(
            "components: the composition must be over the base system's "
            "components plus the observer"
        )
    if not failures:
        for clause, target in (("system-map", t.system), ("observer-map", obs)):
            checked = validate_implementation(
                t.composition, target, dict(t.onto_system.mapping if target is t.system
                                            else t.onto_observer.mapping)
            )
            if isinstance(checked, ImplementationViolation):
                failures.append(f"{clause}: {checked.message}")
        if not is_input(t.onto_system):
            failures.append("input: the system map must be surjective")
    return TimedValidation(not failures, tuple(failures))


def _require_valid(t: TimedImplementation) -> None:
    report = validate_timed(t)
    if not report.valid:
        raise PreconditionError(
            f"invalid timed implementation: {report.failures[0]}"
        )


def derived_order(t: TimedImplementation) -> BehaviourRelation:
    """The observer's order pulled back to the base system's behaviours.

    x is below y when every observation of x is order-below every
    observation of y. The result is transitive (each map fiber is non-empty,
    so comparisons chain through any middle fiber) but need not be reflexive
    or antisymmetric: a behaviour observed at two incomparable times is not
    below itself.
    """
    _require_valid(t)
    fibers = t.onto_system.fibers
    reading = t.onto_observer.as_dict
    leq = t.observer.order
    pairs = []
    for x in t.system.behaviours:
        for y in t.system.behaviours:
            if all(
                (reading[v], reading[w]) in leq
                for v in fibers[x]
                for w in fibers[y]
            ):
                pairs.append((x, y))
    return BehaviourRelation(t.system, frozenset(pairs))


def minimal_behaviours(t: TimedImplementation) -> tuple[str, ...]:
    """Behaviours with nothing strictly below them in the derived relation;
    these play the role of the system's initial states."""
    relation = derived_order(t)
    below = relation.pairs
    out = []
    for x in t.system.behaviours:
        if not any(
            y != x and (y, x) in below and (x, y) not in below
            for y in t.system.behaviours
        ):
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class PreorderQuotient:
    """Mutually-comparable classes of behaviours with their induced order.

    classes are tuples in first-appearance order; order holds pairs of
    class indices and is a partial order by construction.
    """

    classes: tuple[tuple[str, ...], ...]
    order: frozenset[tuple[int, int]]

    def class_of(self, behaviour: str) -> int:
        for i, members in enumerate(self.classes):
            if behaviour in members:
                return i
        raise ArgumentError(f"{behaviour!r} is in no class")

    def minimal_classes(self) -> tuple[int, ...]:
        return tuple(
            i
            for i in range(len(self.classes))
            if not any((j, i) in self.order and j != i for j in range(len(self.classes)))
        )


def preorder_quotient(t: TimedImplementation) -> PreorderQuotient:
    """Quotient view of the derived relation, defined when it is a genuine
    preorder: mutually related behaviours collapse into one class and the
    classes inherit a partial order. A non-reflexive derived relation has no
    such view and is rejected; the raw relation remains the faithful object."""
    relation = derived_order(t)
    pairs = relation.pairs
    for x in t.system.behaviours:
        if (x, x) not in pairs:
            raise PreconditionError(
                f"the derived relation is not reflexive at {x!r}; "
                "only the raw relation applies"
            )
    classes: list[list[str]] = []
    index: dict[str, int] = {}
    for x in t.system.behaviours:
        if x in index:
            continue
        members = [
            y
            for y in t.system.behaviours
            if (x, y) in pairs and (y, x) in pairs
        ]
        for y in members:
            index[y] = len(classes)
        classes.append(members)
    order = frozenset(
        (index[x], index[y]) for x, y in pairs
    )
    return PreorderQuotient(tuple(tuple(c) for c in classes), order)
