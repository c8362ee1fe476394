"""Implementation guarantees and CAP-style impossibility checking.

A guarantee is a family of behaviour subsets of a target system; an
implementation meets it when its image lies in the family. The families here
are the ones the impossibility argument needs: consistency (stay inside a
given subset), weak and strong availability along a relation, and partition
tolerance (joint realizability of what two users observe separately).

Guarantees compare intensionally: two structurally different guarantees are
different values even if they admit the same subsets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .errors import (
    ArgumentError,
    CapacityError,
    DomainError,
    PreconditionError,
)
from .kernel import ImplementationMap, System, cardinality_cap


@dataclass(frozen=True)
class BehaviourRelation:
    """A binary relation on one system's behaviours."""

    carrier: System
    pairs: frozenset[tuple[str, str]]

    def __post_init__(self):
        if not isinstance(self.pairs, frozenset):
            object.__setattr__(self, "pairs", frozenset(self.pairs))
        for a, b in self.pairs:
            if a not in self.carrier or b not in self.carrier:
                raise DomainError(
                    f"relation pair ({a!r}, {b!r}) leaves system {self.carrier.name!r}"
                )

    @cached_property
    def _successors(self) -> dict[str, tuple[str, ...]]:
        order = {x: i for i, x in enumerate(self.carrier.behaviours)}
        out: dict[str, list[str]] = {}
        for a, b in self.pairs:
            out.setdefault(a, []).append(b)
        return {a: tuple(sorted(bs, key=order.__getitem__)) for a, bs in out.items()}

    def successors(self, behaviour: str) -> tuple[str, ...]:
        """Related behaviours in canonical (declared) order."""
        return self._successors.get(behaviour, ())

    @cached_property
    def domain(self) -> frozenset[str]:
        return frozenset(self._successors)

    def __hash__(self) -> int:
        return hash((self.carrier, self.pairs))


class Guarantee:
    """A decidable family of behaviour subsets of one system."""

    @property
    def system(self) -> System:
        raise NotImplementedError

    def holds_for(self, subset: frozenset[str]) -> bool:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Consistency(Guarantee):
    """Subsets contained in a fixed set of acceptable behaviours."""

    target: System
    members: frozenset[str]

    def __post_init__(self):
        if not isinstance(self.members, frozenset):
            object.__setattr__(self, "members", frozenset(self.members))
        for m in self.members:
            if m not in self.target:
                raise DomainError(f"{m!r} is not a behaviour of {self.target.name!r}")

    @property
    def system(self) -> System:
        return self.target

    def holds_for(self, subset: frozenset[str]) -> bool:
        return subset <= self.members

    def describe(self) -> str:
        return "consistency"


@dataclass(frozen=True)
class WeakAvailability(Guarantee):
    """Whenever a member has successors, some successor is also a member."""

    relation: BehaviourRelation

    @property
    def system(self) -> System:
        return self.relation.carrier

    def holds_for(self, subset: frozenset[str]) -> bool:
        for x in subset:
            succ = self.relation.successors(x)
            if succ and not any(y in subset for y in succ):
                return False
        return True

    def describe(self) -> str:
        return "weak availability"


@dataclass(frozen=True)
class StrongAvailability(Guarantee):
    """All successors of members are members."""

    relation: BehaviourRelation

    @property
    def system(self) -> System:
        return self.relation.carrier

    def holds_for(self, subset: frozenset[str]) -> bool:
        for x in subset:
            for y in self.relation.successors(x):
                if y not in subset:
                    return False
        return True

    def describe(self) -> str:
        return "strong availability"


@dataclass(frozen=True)
class PartitionTolerance(Guarantee):
    """Any two members' separate views are realized jointly by a member.

    The two maps describe what two observers see of each behaviour; the
    family contains the subsets in which every pair of observations made
    separately could also have been made of one single behaviour.
    """

    view1: ImplementationMap
    view2: ImplementationMap

    def __post_init__(self):
        if self.view1.source != self.view2.source:
            raise ArgumentError("both views must observe the same system")

    @property
    def system(self) -> System:
        return self.view1.source

    def holds_for(self, subset: frozenset[str]) -> bool:
        v1, v2 = self.view1.as_dict, self.view2.as_dict
        seen = {(v1[x], v2[x]) for x in subset}
        for x1 in subset:
            for x2 in subset:
                if (v1[x1], v2[x2]) not in seen:
                    return False
        return True

    def describe(self) -> str:
        return "partition tolerance"


@dataclass(frozen=True)
class ExplicitFamily(Guarantee):
    """A finite family of subsets given by enumeration."""

    target: System
    family: frozenset[frozenset[str]]

    def __post_init__(self):
        if not isinstance(self.family, frozenset):
            object.__setattr__(self, "family", frozenset(frozenset(s) for s in self.family))
        for member in self.family:
            for x in member:
                if x not in self.target:
                    raise DomainError(f"{x!r} is not a behaviour of {self.target.name!r}")

    @property
    def system(self) -> System:
        return self.target

    def holds_for(self, subset: frozenset[str]) -> bool:
        return subset in self.family

    def describe(self) -> str:
        return "explicit family"


@dataclass(frozen=True)
class Conjunction(Guarantee):
    """All of several guarantees on the same system."""

    parts: tuple[Guarantee, ...]

    def __post_init__(self):
        if not self.parts:
            raise ArgumentError("conjunction needs at least one part")
        first = self.parts[0].system
        for p in self.parts[1:]:
            if p.system != first:
                raise ArgumentError("conjunction mixes guarantees on different systems")

    @property
    def system(self) -> System:
        return self.parts[0].system

    def holds_for(self, subset: frozenset[str]) -> bool:
        return all(p.holds_for(subset) for p in self.parts)

    def describe(self) -> str:
        return "all of (" + ", ".join(p.describe() for p in self.parts) + ")"


def guarantee_satisfied(subset: Iterable[str], guarantee: Guarantee) -> bool:
    """Does this behaviour subset belong to the guarantee's family?

    The empty subset satisfies every guarantee here vacuously.
    """
    members = frozenset(subset)
    for x in members:
        if x not in guarantee.system:
            raise DomainError(
                f"{x!r} is not a behaviour of {guarantee.system.name!r}"
            )
    return guarantee.holds_for(members)


def implementation_satisfies(impl: ImplementationMap, guarantee: Guarantee) -> bool:
    """An implementation meets a guarantee iff its image does."""
    if impl.target != guarantee.system:
        raise DomainError(
            f"guarantee is about {guarantee.system.name!r} but the map targets "
            f"{impl.target.name!r}"
        )
    return guarantee.holds_for(impl.image)


# ------------------------------------------------------------- instances

@dataclass(frozen=True)
class CapInstance:
    """Everything the impossibility argument quantifies over.

    `system` is the shared medium both users observe through `view1` and
    `view2`. `consistent` is the acceptable-behaviour set; `strong_relation`
    carries the strong-availability obligation and `weak_relation` the weak
    one.
    """

    system: System
    view1: ImplementationMap
    view2: ImplementationMap
    consistent: frozenset[str]
    strong_relation: BehaviourRelation
    weak_relation: BehaviourRelation

    def __post_init__(self):
        if not isinstance(self.consistent, frozenset):
            object.__setattr__(self, "consistent", frozenset(self.consistent))
        if self.view1.source != self.system or self.view2.source != self.system:
            raise ArgumentError("both views must observe the instance's system")
        for x in self.consistent:
            if x not in self.system:
                raise DomainError(f"{x!r} is not a behaviour of {self.system.name!r}")
        for rel in (self.strong_relation, self.weak_relation):
            if rel.carrier != self.system:
                raise ArgumentError("relations must live on the instance's system")

    def consistency_guarantee(self) -> Consistency:
        return Consistency(self.system, self.consistent)

    def availability_guarantee(
        self, pairing: tuple[str, str] = ("strong", "weak")
    ) -> Conjunction:
        """Availability obligations for both relations.

        The default pairing (strong on the first relation, weak on the
        second) is the one the impossibility theorem is proved for; the
        other pairings can be built but carry no such claim.
        """
        kinds = {"strong": StrongAvailability, "weak": WeakAvailability}
        try:
            first = kinds[pairing[0]](self.strong_relation)
            second = kinds[pairing[1]](self.weak_relation)
        except KeyError:
            raise ArgumentError(f"unknown availability pairing {pairing!r}") from None
        return Conjunction((first, second))

    def partition_guarantee(self) -> PartitionTolerance:
        return PartitionTolerance(self.view1, self.view2)


@dataclass(frozen=True)
class EntanglementWitness:
    """Outcome of the entanglement check at one behaviour.

    When the behaviour passes, `chosen` names the first successor that works.
    When it fails, `failure` carries the first candidate successor together
    with the (probe, view1-twin, view2-twin) triple that defeats it, or is
    None when there was no candidate at all.
    """

    behaviour: str
    ok: bool
    chosen: Optional[str] = None
    failure: Optional[tuple[str, str, str, str]] = None


@dataclass(frozen=True)
class EntanglementReport:
    entangled: bool
    witnesses: tuple[EntanglementWitness, ...]
    domain_size: int
    restricted: bool


def is_entangled(
    inst: CapInstance, domain: Optional[Iterable[str]] = None
) -> EntanglementReport:
    """Check the entanglement condition on an instance.

    For every behaviour w (of the given domain, default all of them) there
    must be a strong-successor x that has weak-successors, such that for
    every weak-successor v of x, any two behaviours that look like v to the
    first view while looking like w (resp. x) to the second cannot both be
    acceptable. Witness choices are canonical: first in declared order.
    """
    f = inst.system
    v1, v2 = inst.view1.as_dict, inst.view2.as_dict
    consistent = inst.consistent
    quantified = tuple(domain) if domain is not None else f.behaviours
    for w in quantified:
        if w not in f:
            raise DomainError(f"{w!r} is not a behaviour of {f.name!r}")

    # acceptable behaviours indexed by their two views; only those can defeat
    # the condition
    bucket: dict[tuple[str, str], str] = {}
    for x in f.behaviours:
        if x in consistent:
            bucket.setdefault((v1[x], v2[x]), x)

    weak_dom = inst.weak_relation.domain
    witnesses = []
    entangled = True
    for w in quantified:
        candidates = [x for x in inst.strong_relation.successors(w) if x in weak_dom]
        chosen = None
        first_failure = None
        for x in candidates:
            defeat = None
            for v in inst.weak_relation.successors(x):
                y = bucket.get((v1[v], v2[w]))
                z = bucket.get((v1[v], v2[x]))
                if y is not None and z is not None:
                    defeat = (x, v, y, z)
                    break
            if defeat is None:
                chosen = x
                break
            if first_failure is None:
                first_failure = defeat
        if chosen is not None:
            witnesses.append(EntanglementWitness(w, True, chosen=chosen))
        else:
            entangled = False
            witnesses.append(EntanglementWitness(w, False, failure=first_failure))
    return EntanglementReport(
        entangled, tuple(witnesses), len(quantified), domain is not None
    )


# ------------------------------------------------------------- verification

GROUPS = ("consistency", "availability", "partition tolerance")


@dataclass(frozen=True)
class SubsetWitness:
    """One inspected subset and the first guarantee group it violates."""

    subset: tuple[str, ...]
    violated: Optional[str]


@dataclass(frozen=True)
class ClosureStep:
    """One behaviour added during closure, with the rule that forced it."""

    behaviour: str
    reason: str


@dataclass(frozen=True)
class CapReport:
    """Outcome of one verification run.

    `verdict` is True when the run exhibited that the three guarantee groups
    cannot all hold: exhaustively (no subset satisfies them all) or from a
    seed (the forced closure violates one). `witnesses` carries the
    interesting subsets; `violation_counts` tallies first violations per
    group over everything enumerated.
    """

    mode: str
    verdict: bool
    witnesses: tuple[SubsetWitness, ...]
    violation_counts: tuple[tuple[str, int], ...]
    entanglement_witnesses: tuple[EntanglementWitness, ...]
    entangled: Optional[bool]
    closure: tuple[str, ...] = ()
    closure_log: tuple[ClosureStep, ...] = ()
    notes: tuple[str, ...] = ()


def _first_violation(
    subset: frozenset[str],
    consistency: Consistency,
    availability: Conjunction,
    partition: PartitionTolerance,
) -> Optional[str]:
    if not consistency.holds_for(subset):
        return "consistency"
    if not availability.holds_for(subset):
        return "availability"
    if not partition.holds_for(subset):
        return "partition tolerance"
    return None


DEFAULT_EXHAUSTIVE_BOUND = 16

# past this many behaviours the per-subset table is summarised to counts
_FULL_TABLE_LIMIT = 10


def cap_verify_exhaustive(
    inst: CapInstance,
    exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND,
    pairing: tuple[str, str] = ("strong", "weak"),
) -> CapReport:
    """Enumerate every non-empty behaviour subset and test the three
    guarantee groups on it.

    Verdict True means no subset satisfies all three, i.e. every runnable
    implementation of the system must give one of them up. Only the image of
    an implementation matters to any guarantee here, so enumerating subsets
    covers all implementations.
    """
    f = inst.system
    n = len(f.behaviours)
    if n > exhaustive_bound:
        raise CapacityError(
            f"{n} behaviours exceed the exhaustive bound of {exhaustive_bound}; "
            "use closure verification instead"
        )
    consistency = inst.consistency_guarantee()
    availability = inst.availability_guarantee(pairing)
    partition = inst.partition_guarantee()

    counts = {g: 0 for g in GROUPS}
    satisfied = 0
    witnesses: list[SubsetWitness] = []
    keep_all = (1 << n) - 1 <= (1 << _FULL_TABLE_LIMIT)
    verdict = True
    for bits in range(1, 1 << n):
        subset = frozenset(
            f.behaviours[i] for i in range(n) if bits & (1 << i)
        )
        violated = _first_violation(subset, consistency, availability, partition)
        if violated is None:
            verdict = False
            satisfied += 1
            witnesses.append(SubsetWitness(_canonical(f, subset), None))
        else:
            counts[violated] += 1
            if keep_all:
                witnesses.append(SubsetWitness(_canonical(f, subset), violated))
    ent = is_entangled(inst)
    notes = []
    if not keep_all:
        notes.append("per-subset table summarised to counts; satisfying subsets listed in full")
    return CapReport(
        mode="exhaustive",
        verdict=verdict,
        witnesses=tuple(witnesses),
        violation_counts=tuple((g, counts[g]) for g in GROUPS) + (("none", satisfied),),
        entanglement_witnesses=ent.witnesses,
        entangled=ent.entangled,
        notes=tuple(notes),
    )


def _canonical(f: System, subset: frozenset[str]) -> tuple[str, ...]:
    order = {x: i for i, x in enumerate(f.behaviours)}
    return tuple(sorted(subset, key=order.__getitem__))


@dataclass(frozen=True)
class ClosureOutcome:
    """The least superset of the seeds closed under the availability and
    partition-tolerance completion rules, or as much of it as exists."""

    members: tuple[str, ...]
    complete: bool
    stuck_pair: Optional[tuple[str, str]]
    log: tuple[ClosureStep, ...]


def _grow_closure(
    inst: CapInstance,
    seeds: Iterable[str],
    cap: Optional[int],
    acceptable: Optional[frozenset[str]],
) -> tuple[ClosureOutcome, Optional[str]]:
    """Closure loop shared by `closure_set` and `cap_verify_closure`.

    When `acceptable` is given, growth stops at the first member outside it;
    that member is returned alongside the partial outcome.
    """
    f = inst.system
    order = {x: i for i, x in enumerate(f.behaviours)}
    v1, v2 = inst.view1.as_dict, inst.view2.as_dict
    realizers: dict[tuple[str, str], str] = {}
    for x in f.behaviours:
        realizers.setdefault((v1[x], v2[x]), x)

    members: set[str] = set()
    log: list[ClosureStep] = []
    bound = cardinality_cap(cap)

    def add(x: str, reason: str) -> Optional[str]:
        if x not in f:
            raise DomainError(f"{x!r} is not a behaviour of {f.name!r}")
        if x not in members:
            members.add(x)
            log.append(ClosureStep(x, reason))
            if len(members) > bound:
                raise CapacityError(
                    f"closure exceeded the cardinality cap of {bound}"
                )
            if acceptable is not None and x not in acceptable:
                return x
        return None

    def done(complete: bool, stuck, bad: Optional[str]):
        return (
            ClosureOutcome(_canonical(f, frozenset(members)), complete, stuck, tuple(log)),
            bad,
        )

    for s in seeds:
        bad = add(s, "seed")
        if bad:
            return done(False, None, bad)

    while True:
        changed = False
        for x in sorted(members, key=order.__getitem__):
            for y in inst.strong_relation.successors(x):
                if y not in members:
                    bad = add(y, f"strong successor of {x!r}")
                    if bad:
                        return done(False, None, bad)
                    changed = True
        if changed:
            continue
        for x in sorted(members, key=order.__getitem__):
            succ = inst.weak_relation.successors(x)
            if succ and not any(y in members for y in succ):
                bad = add(succ[0], f"weak witness for {x!r}")
                if bad:
                    return done(False, None, bad)
                changed = True
        if changed:
            continue
        stuck = None
        ordered = sorted(members, key=order.__getitem__)
        for x1 in ordered:
            for x2 in ordered:
                want = (v1[x1], v2[x2])
                have = any((v1[x], v2[x]) == want for x in members)
                if have:
                    continue
                joint = realizers.get(want)
                if joint is None:
                    stuck = (x1, x2)
                    break
                bad = add(joint, f"joint view of {x1!r} and {x2!r}")
                if bad:
                    return done(False, None, bad)
                changed = True
                break
            if stuck or changed:
                break
        if stuck:
            return done(False, stuck, None)
        if not changed:
            return done(True, None, None)


def closure_set(
    inst: CapInstance, seeds: Iterable[str], cap: Optional[int] = None
) -> ClosureOutcome:
    """Close a seed set under the three completion rules.

    Strong availability adds every successor of a member; weak availability
    adds the first successor of any member that has successors but no member
    successor; partition tolerance adds the first behaviour realizing an
    unrealized pair of views. `complete` is False when some pair of views is
    realized by no behaviour of the whole system, in which case the stuck
    pair is reported and closure stops.
    """
    outcome, _ = _grow_closure(inst, seeds, cap, acceptable=None)
    return outcome


def cap_verify_closure(
    inst: CapInstance,
    seed: str,
    cap: Optional[int] = None,
    pairing: tuple[str, str] = ("strong", "weak"),
) -> CapReport:
    """Grow the seed along the completion rules and watch for a violation.

    Any set of behaviours actually realized from the seed must contain this
    closure, so growth stops at the first unacceptable member: a consistency
    violation inside the closure, like an unrealizable pair of views, shows
    a guarantee group failing without enumerating subsets. Reaching a
    closed, fully satisfying set instead yields verdict False and flags that
    the entanglement condition cannot have held.
    """
    f = inst.system
    if seed not in f:
        raise DomainError(f"seed {seed!r} is not a behaviour of {f.name!r}")
    consistency = inst.consistency_guarantee()
    availability = inst.availability_guarantee(pairing)
    partition = inst.partition_guarantee()

    outcome, bad = _grow_closure(inst, [seed], cap, acceptable=inst.consistent)
    members = frozenset(outcome.members)
    notes = []
    witnesses = []
    if bad is not None:
        verdict = True
        violated = "consistency"
        notes.append(f"closure forces the unacceptable behaviour {bad!r}")
        witnesses.append(SubsetWitness(outcome.members, "consistency"))
    elif not outcome.complete:
        verdict = True
        violated = "partition tolerance"
        x1, x2 = outcome.stuck_pair
        notes.append(
            "partition tolerance unsatisfiable from this seed: the views of "
            f"{x1!r} and {x2!r} are realized jointly by no behaviour"
        )
        witnesses.append(SubsetWitness(outcome.members, "partition tolerance"))
    else:
        verdict = False
        violated = None
        witnesses.append(SubsetWitness(outcome.members, None))
        sat = (
            consistency.holds_for(members)
            and availability.holds_for(members)
            and partition.holds_for(members)
        )
        if sat:
            notes.append(
                "closure satisfies every guarantee group; the entanglement "
                "condition cannot hold for this instance"
            )
    counts = {g: 0 for g in GROUPS}
    if violated:
        counts[violated] = 1
    ent = is_entangled(inst)
    return CapReport(
        mode="closure",
        verdict=verdict,
        witnesses=tuple(witnesses),
        violation_counts=tuple((g, counts[g]) for g in GROUPS)
        + (("none", 0 if violated else 1),),
        entanglement_witnesses=ent.witnesses,
        entangled=ent.entangled,
        closure=outcome.members,
        closure_log=outcome.log,
        notes=tuple(notes),
    )
