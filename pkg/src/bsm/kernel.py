"""Core model of finite behavioural systems.

A component is a name with a finite set of behaviour labels. A system assigns
each of its own behaviours a snapshot: one behaviour label per component the
system runs on. Implementations are extensional maps between behaviour sets
that commute with projection onto the target's components.

Everything is immutable and deterministic. Components iterate in lexicographic
name order, behaviours in their declared order, and every "choose one"
operation picks the first candidate in that order, so equal inputs always
produce equal outputs.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iter_product
from typing import Iterable, Mapping, Optional, Union

from .errors import (
    ArgumentError,
    CapacityError,
    ConfigurationError,
    DomainError,
    PreconditionError,
    StructuralError,
)

DEFAULT_CARDINALITY_CAP = 100_000
CAP_ENV_VAR = "BSM_CARDINALITY_CAP"


def cardinality_cap(override: Optional[int] = None) -> int:
    """Active bound on constructed behaviour sets.

    An explicit override wins, then the BSM_CARDINALITY_CAP environment
    variable, then the default of 100000.
    """
    if override is not None:
        if override <= 0:
            raise ConfigurationError("cardinality cap must be positive")
        return override
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None:
        return DEFAULT_CARDINALITY_CAP
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(
            f"{CAP_ENV_VAR} must be an integer, got {raw!r}"
        ) from None
    if value <= 0:
        raise ConfigurationError(f"{CAP_ENV_VAR} must be positive, got {value}")
    return value


def pair_label(left: str, right: str) -> str:
    """Canonical label for a joint behaviour built from two labels."""
    return f"({left},{right})"


def product_label(labels: Iterable[str]) -> str:
    """Canonical label for a tuple of component behaviours.

    A single label stands for itself so that one-component products keep
    their original labels.
    """
    labels = tuple(labels)
    if len(labels) == 1:
        return labels[0]
    return "(" + ",".join(labels) + ")"


@dataclass(frozen=True)
class Component:
    """A named, finite, non-empty set of behaviour labels."""

    name: str
    behaviours: tuple[str, ...]

    def __post_init__(self):
        if not self.name:
            raise ArgumentError("component name must be non-empty")
        if not isinstance(self.behaviours, tuple):
            object.__setattr__(self, "behaviours", tuple(self.behaviours))
        if not self.behaviours:
            raise ArgumentError(f"component {self.name!r} needs at least one behaviour")
        if len(set(self.behaviours)) != len(self.behaviours):
            raise ArgumentError(f"component {self.name!r} repeats a behaviour label")

    def __contains__(self, label: str) -> bool:
        return label in self._members

    @cached_property
    def _members(self) -> frozenset[str]:
        return frozenset(self.behaviours)


@dataclass(frozen=True)
class Snapshot:
    """One behaviour label per component, keyed and sorted by component name."""

    entries: tuple[tuple[str, str], ...]

    @staticmethod
    def of(values: Mapping[str, str]) -> "Snapshot":
        return Snapshot(tuple(sorted(values.items())))

    def __post_init__(self):
        names = [c for c, _ in self.entries]
        if names != sorted(names):
            raise ArgumentError("snapshot entries must be sorted by component name")
        if len(set(names)) != len(names):
            raise ArgumentError("snapshot repeats a component")
        if not names:
            raise ArgumentError("snapshot must cover at least one component")

    @cached_property
    def _lookup(self) -> dict[str, str]:
        return dict(self.entries)

    @property
    def components(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.entries)

    def value(self, component: str) -> str:
        try:
            return self._lookup[component]
        except KeyError:
            raise DomainError(f"snapshot has no entry for component {component!r}") from None

    def restrict(self, names: Iterable[str]) -> "Snapshot":
        wanted = set(names)
        kept = tuple((c, v) for c, v in self.entries if c in wanted)
        missing = wanted - {c for c, _ in kept}
        if missing:
            raise DomainError(
                f"snapshot restriction names absent component {sorted(missing)[0]!r}"
            )
        return Snapshot(kept)

    def __str__(self) -> str:
        return "(" + ", ".join(f"{c}: {v}" for c, v in self.entries) + ")"


@dataclass(frozen=True)
class System:
    """A finite behaviour set together with a snapshot for each behaviour.

    `components` is sorted by name; `assignments` runs parallel to
    `behaviours`. The behaviour set may be empty (a system that cannot run),
    the component set may not.
    """

    name: str
    components: tuple[Component, ...]
    behaviours: tuple[str, ...]
    assignments: tuple[Snapshot, ...]

    def __post_init__(self):
        if not self.name:
            raise ArgumentError("system name must be non-empty")
        if not self.components:
            raise ArgumentError(f"system {self.name!r} needs at least one component")
        names = [c.name for c in self.components]
        if names != sorted(names):
            raise ArgumentError(f"system {self.name!r}: components must be sorted by name")
        if len(set(names)) != len(names):
            raise ArgumentError(f"system {self.name!r} repeats a component")
        if len(self.behaviours) != len(set(self.behaviours)):
            raise ArgumentError(f"system {self.name!r} repeats a behaviour label")
        if len(self.behaviours) != len(self.assignments):
            raise ArgumentError(
                f"system {self.name!r}: one snapshot per behaviour required"
            )
        expected = tuple(names)
        for behaviour, snap in zip(self.behaviours, self.assignments):
            if snap.components != expected:
                raise ArgumentError(
                    f"system {self.name!r}: snapshot of {behaviour!r} must cover "
                    f"exactly the components {list(expected)}"
                )
            for comp in self.components:
                if snap.value(comp.name) not in comp:
                    raise DomainError(
                        f"system {self.name!r}: behaviour {behaviour!r} assigns "
                        f"{snap.value(comp.name)!r} to component {comp.name!r}, "
                        "which is not one of its declared behaviours"
                    )

    @classmethod
    def from_table(
        cls,
        name: str,
        components: Iterable[Component],
        table: Mapping[str, Mapping[str, str]],
    ) -> "System":
        """Build a system from {behaviour: {component: value}} in table order."""
        comps = tuple(sorted(components, key=lambda c: c.name))
        behaviours = tuple(table.keys())
        assignments = tuple(Snapshot.of(table[b]) for b in behaviours)
        return cls(name, comps, behaviours, assignments)

    def __contains__(self, behaviour: str) -> bool:
        return behaviour in self._index

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.name, self.components, self.behaviours, self.assignments))
            self.__dict__["_hash"] = cached
        return cached

    @cached_property
    def component_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.components)

    @cached_property
    def _by_name(self) -> dict[str, Component]:
        return {c.name: c for c in self.components}

    @cached_property
    def _index(self) -> dict[str, int]:
        return {b: i for i, b in enumerate(self.behaviours)}

    def has_component(self, name: str) -> bool:
        return name in self._by_name

    def component(self, name: str) -> Component:
        try:
            return self._by_name[name]
        except KeyError:
            raise DomainError(
                f"system {self.name!r} has no component named {name!r}"
            ) from None

    def snapshot(self, behaviour: str) -> Snapshot:
        try:
            return self.assignments[self._index[behaviour]]
        except KeyError:
            raise DomainError(
                f"{behaviour!r} is not a behaviour of system {self.name!r}"
            ) from None

    def local_value(self, behaviour: str, component: str) -> str:
        if component not in self._by_name:
            raise DomainError(f"system {self.name!r} has no component named {component!r}")
        return self.snapshot(behaviour).value(component)

    @cached_property
    def image(self) -> frozenset[Snapshot]:
        return frozenset(self.assignments)


# Equality on the generated dataclasses is structural; hashing for System is
# cached above because behaviour tables can be large.


@dataclass(frozen=True)
class ImplementationMap:
    """A validated map from source behaviours onto target behaviours.

    The mapping tuple runs parallel to `source.behaviours`. Build instances
    through validate_implementation or the composition operations; the
    constructor itself does not re-check commutation.
    """

    source: System
    target: System
    mapping: tuple[tuple[str, str], ...]

    @cached_property
    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)

    def apply(self, behaviour: str) -> str:
        try:
            return self.as_dict[behaviour]
        except KeyError:
            raise DomainError(
                f"{behaviour!r} is not a behaviour of system {self.source.name!r}"
            ) from None

    @cached_property
    def image(self) -> frozenset[str]:
        return frozenset(y for _, y in self.mapping)

    @cached_property
    def fibers(self) -> dict[str, tuple[str, ...]]:
        """Preimages keyed by target behaviour, each in source order."""
        out: dict[str, list[str]] = {}
        for x, y in self.mapping:
            out.setdefault(y, []).append(x)
        return {y: tuple(xs) for y, xs in out.items()}

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.source, self.target, self.mapping))
            self.__dict__["_hash"] = cached
        return cached


@dataclass(frozen=True)
class ImplementationViolation:
    """First commutation failure found when checking a candidate map."""

    source_name: str
    target_name: str
    behaviour: str
    projected: Snapshot
    required: Snapshot

    @property
    def message(self) -> str:
        return (
            f"map does not commute at {self.behaviour!r}: source projects to "
            f"{self.projected}, target assigns {self.required}"
        )


def _require_component_subset(f: System, g: System) -> None:
    for comp in g.components:
        if not f.has_component(comp.name):
            raise StructuralError(
                f"component {comp.name!r} of {g.name!r} is not a component of {f.name!r}"
            )
        if f.component(comp.name) != comp:
            raise StructuralError(
                f"component {comp.name!r} is declared differently by "
                f"{f.name!r} and {g.name!r}"
            )


def _shared_components_agree(f: System, g: System) -> None:
    for name in interface(f, g):
        if f.component(name) != g.component(name):
            raise StructuralError(
                f"component {name!r} is declared differently by {f.name!r} and {g.name!r}"
            )


def project(f: System, names: Iterable[str]) -> dict[str, Snapshot]:
    """Restrict every snapshot of f to the given non-empty component subset.

    Returns {behaviour: restricted snapshot} in declared behaviour order.
    """
    wanted = tuple(sorted(set(names)))
    if not wanted:
        raise ArgumentError("projection needs at least one component")
    for n in wanted:
        if not f.has_component(n):
            raise DomainError(f"system {f.name!r} has no component named {n!r}")
    return {x: f.snapshot(x).restrict(wanted) for x in f.behaviours}


def components_as_system(
    components: Iterable[Component], cap: Optional[int] = None
) -> System:
    """The identity system on a component set: its behaviours are all joint
    snapshots, enumerated in lexicographic component order."""
    comps = tuple(sorted(set(components), key=lambda c: c.name))
    if not comps:
        raise ArgumentError("need at least one component")
    names = [c.name for c in comps]
    if len(set(names)) != len(names):
        raise ArgumentError("duplicate component names")
    total = 1
    for c in comps:
        total *= len(c.behaviours)
    bound = cardinality_cap(cap)
    if total > bound:
        raise CapacityError(
            f"joint behaviour set of {names} has {total} elements, over the cap of {bound}"
        )
    behaviours = []
    assignments = []
    for combo in iter_product(*(c.behaviours for c in comps)):
        behaviours.append(product_label(combo))
        assignments.append(Snapshot(tuple(zip(names, combo))))
    name = names[0] if len(names) == 1 else "(" + ",".join(names) + ")"
    return System(name, comps, tuple(behaviours), tuple(assignments))


def validate_implementation(
    f: System, g: System, mapping: Mapping[str, str]
) -> Union[ImplementationMap, ImplementationViolation]:
    """Check that `mapping` implements g by f.

    Component mismatches and non-total or ill-typed maps raise; a commutation
    failure is an expected outcome and is returned as a report, naming the
    first failing behaviour in declared order.
    """
    _require_component_subset(f, g)
    for x in f.behaviours:
        if x not in mapping:
            raise DomainError(f"map is not defined at behaviour {x!r} of {f.name!r}")
        if mapping[x] not in g:
            raise DomainError(
                f"map sends {x!r} to {mapping[x]!r}, not a behaviour of {g.name!r}"
            )
    target_names = g.component_names
    for x in f.behaviours:
        projected = f.snapshot(x).restrict(target_names)
        required = g.snapshot(mapping[x])
        if projected != required:
            return ImplementationViolation(f.name, g.name, x, projected, required)
    return ImplementationMap(f, g, tuple((x, mapping[x]) for x in f.behaviours))


def implementation_exists(f: System, g: System) -> Optional[ImplementationMap]:
    """Find the canonical implementation of g by f, or None.

    One exists iff g's components are among f's and every projected snapshot
    of f is realized by some behaviour of g; the witness maps each behaviour
    to the first matching g-behaviour in declared order.
    """
    for comp in g.components:
        if not f.has_component(comp.name):
            return None
        if f.component(comp.name) != comp:
            raise StructuralError(
                f"component {comp.name!r} is declared differently by "
                f"{f.name!r} and {g.name!r}"
            )
    first_realizer: dict[Snapshot, str] = {}
    for y in g.behaviours:
        first_realizer.setdefault(g.snapshot(y), y)
    target_names = g.component_names
    mapping = []
    for x in f.behaviours:
        y = first_realizer.get(f.snapshot(x).restrict(target_names))
        if y is None:
            return None
        mapping.append((x, y))
    return ImplementationMap(f, g, tuple(mapping))


def is_input(impl: ImplementationMap) -> bool:
    """True iff the map is surjective onto its target's behaviours."""
    return len(impl.image) == len(impl.target.behaviours)


def is_input_components(f: System, names: Iterable[str]) -> bool:
    """True iff projecting f onto this component subset covers every joint
    snapshot of the subset. The empty subset counts as an input exactly when
    f can run at all (the empty product has one point)."""
    wanted = tuple(sorted(set(names)))
    if not wanted:
        return is_runnable(f)
    total = 1
    for n in wanted:
        total *= len(f.component(n).behaviours)
    seen = {f.snapshot(x).restrict(wanted) for x in f.behaviours}
    return len(seen) == total


def projection_implementation(
    f: System, names: Iterable[str], cap: Optional[int] = None
) -> ImplementationMap:
    """The projection of f onto a component subset, as a map onto the
    identity system of that subset."""
    wanted = tuple(sorted(set(names)))
    if not wanted:
        raise ArgumentError("projection needs at least one component")
    target = components_as_system([f.component(n) for n in wanted], cap)
    mapping = tuple(
        (x, product_label(f.snapshot(x).value(n) for n in wanted)) for x in f.behaviours
    )
    return ImplementationMap(f, target, mapping)


def interface(f: System, g: System) -> frozenset[str]:
    """Component names shared by both systems (possibly empty)."""
    return frozenset(f.component_names) & frozenset(g.component_names)


def compatible_pairs(f: System, g: System) -> tuple[tuple[str, str], ...]:
    """Behaviour pairs that agree on the shared components, in canonical
    order (f's order major, g's order minor). An empty interface makes every
    pair compatible."""
    _shared_components_agree(f, g)
    shared = tuple(sorted(interface(f, g)))
    if not shared:
        return tuple((x, y) for x in f.behaviours for y in g.behaviours)
    g_key = {y: g.snapshot(y).restrict(shared) for y in g.behaviours}
    out = []
    for x in f.behaviours:
        fx = f.snapshot(x).restrict(shared)
        for y in g.behaviours:
            if fx == g_key[y]:
                out.append((x, y))
    return tuple(out)


@dataclass(frozen=True)
class TensorResult:
    """A canonical free composition with its two projection maps."""

    system: System
    onto_left: ImplementationMap
    onto_right: ImplementationMap


def tensor(f: System, g: System, cap: Optional[int] = None) -> TensorResult:
    """Canonical free composition: one joint behaviour "(x,y)" per compatible
    pair, with snapshots taken from f on f's components and from g on the
    rest. May be empty; that result is still a system (it cannot run)."""
    _shared_components_agree(f, g)
    bound = cardinality_cap(cap)
    work = len(f.behaviours) * len(g.behaviours)
    if work > bound:
        raise CapacityError(
            f"tensor of {f.name!r} and {g.name!r} scans {work} pairs, over the cap of {bound}"
        )
    merged: dict[str, Component] = {c.name: c for c in f.components}
    for c in g.components:
        merged.setdefault(c.name, c)
    comps = tuple(sorted(merged.values(), key=lambda c: c.name))
    g_only = tuple(n for n in g.component_names if not f.has_component(n))
    behaviours = []
    assignments = []
    left = []
    right = []
    for x, y in compatible_pairs(f, g):
        label = pair_label(x, y)
        values = dict(f.snapshot(x).entries)
        gy = g.snapshot(y)
        for n in g_only:
            values[n] = gy.value(n)
        behaviours.append(label)
        assignments.append(Snapshot.of(values))
        left.append((label, x))
        right.append((label, y))
    combined = System(
        f"{f.name}⊗{g.name}", comps, tuple(behaviours), tuple(assignments)
    )
    return TensorResult(
        combined,
        ImplementationMap(combined, f, tuple(left)),
        ImplementationMap(combined, g, tuple(right)),
    )


def is_runnable(f: System) -> bool:
    """A system can run iff it has at least one behaviour."""
    return bool(f.behaviours)


@dataclass(frozen=True)
class CompositionWitness:
    """An environment together with implementations of two parts.

    Both maps must share the environment as their source; whether the
    environment is a composition (component sets united) or a free one is
    checked by the predicates below, not by the constructor.
    """

    onto_left: ImplementationMap
    onto_right: ImplementationMap

    def __post_init__(self):
        if self.onto_left.source != self.onto_right.source:
            raise ArgumentError("both maps must start from the same environment")

    @property
    def environment(self) -> System:
        return self.onto_left.source

    @property
    def left(self) -> System:
        return self.onto_left.target

    @property
    def right(self) -> System:
        return self.onto_right.target


def is_free_composition(witness: CompositionWitness) -> bool:
    """True iff every compatible behaviour pair of the two parts is realized
    jointly by some environment behaviour."""
    env = witness.environment
    expected = set(witness.left.component_names) | set(witness.right.component_names)
    if set(env.component_names) != expected:
        raise StructuralError(
            f"{env.name!r} is not a composition of {witness.left.name!r} and "
            f"{witness.right.name!r}: component sets differ"
        )
    realized = {
        (witness.onto_left.apply(z), witness.onto_right.apply(z))
        for z in env.behaviours
    }
    return all(pair in realized for pair in compatible_pairs(witness.left, witness.right))


def systems_equivalent(f: System, g: System) -> bool:
    """Mutual implementation. Either direction forces the component sets to
    coincide, and then both directions together say exactly that the two
    snapshot images are equal, which is what gets checked."""
    if f.components != g.components:
        return False
    return f.image == g.image


@dataclass(frozen=True)
class FactorResult:
    """The canonical map from an environment into the tensor of its parts."""

    tensor: TensorResult
    mapping: tuple[tuple[str, str], ...]
    surjective: bool


def factor_through_tensor(
    witness: CompositionWitness, cap: Optional[int] = None
) -> FactorResult:
    """Factor a free composition through the tensor of its parts.

    Sends each environment behaviour z to the pair of its two images. Only
    defined for free compositions; the factor map of one is always onto the
    tensor's behaviours.
    """
    if not is_free_composition(witness):
        raise PreconditionError(
            f"{witness.environment.name!r} is not a free composition of its parts"
        )
    t = tensor(witness.left, witness.right, cap)
    mapping = tuple(
        (z, pair_label(witness.onto_left.apply(z), witness.onto_right.apply(z)))
        for z in witness.environment.behaviours
    )
    targets = {y for _, y in mapping}
    return FactorResult(t, mapping, targets == set(t.system.behaviours))
