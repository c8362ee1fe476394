"""Timestamped read/write traces and the impossibility scenario they carry.

Two users share a register. At each grid timestamp one of them may request a
read, receive a read's value, or write a value; a trace is a finite run of
such actions at strictly ascending timestamps. The bounded universe of all
well-formed traces becomes a two-component system: each user's component
carries that user's possible local views, and the projections dropping the
other user's actions are implementation maps onto single-user trace systems.

On this system the guarantees module's impossibility machinery applies
directly. Writes by the second user give the strong-availability relation,
bracketed reads by the first user the weak one, and the consistency set is
the traces whose answered reads report a value the register actually held
inside the request window. verify_scenario runs the entanglement check and
the closure/exhaustive verifiers over a generated instance and reports what
the finite budget can and cannot witness.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product as iter_product
from math import comb
from typing import Iterable, Optional, Union

from .errors import ArgumentError, CapacityError, DomainError
from .guarantees import (
    DEFAULT_EXHAUSTIVE_BOUND,
    BehaviourRelation,
    CapInstance,
    CapReport,
    EntanglementReport,
    cap_verify_closure,
    cap_verify_exhaustive,
    is_entangled,
)
from .kernel import (
    Component,
    ImplementationMap,
    Snapshot,
    System,
    cardinality_cap,
    validate_implementation,
)

Rational = Union[int, str, Fraction]


def _exact(value: Rational) -> Fraction:
    """Exact rational from an int, string, or Fraction. Floats are refused:
    timestamp equality and ordering must be exact."""
    if isinstance(value, (bool, float)):
        raise ArgumentError(f"timestamps must be exact rationals, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ArgumentError(f"{value!r} is not an exact rational") from None


# ----------------------------------------------------------------- actions


@dataclass(frozen=True)
class ReadRequest:
    """A user asks for the register's value; the answer arrives separately."""


@dataclass(frozen=True)
class ReadReturn:
    """A previously requested read comes back with a value."""

    value: str


@dataclass(frozen=True)
class Write:
    """A user stores a value in the register."""

    value: str


ActionKind = Union[ReadRequest, ReadReturn, Write]


@dataclass(frozen=True)
class Action:
    """One timestamped step by one of the two users.

    Renders in the `t:rd^i?` / `t:rd^i(s)` / `t:wr^i(s)` notation.
    """

    timestamp: Fraction
    user: int
    kind: ActionKind

    def __post_init__(self):
        stamp = _exact(self.timestamp)
        if stamp < 0:
            raise ArgumentError(f"timestamp {stamp} is negative")
        object.__setattr__(self, "timestamp", stamp)
        if self.user not in (1, 2):
            raise ArgumentError(f"user must be 1 or 2, got {self.user!r}")
        if not isinstance(self.kind, (ReadRequest, ReadReturn, Write)):
            raise ArgumentError(f"unknown action kind {self.kind!r}")

    def render(self) -> str:
        if isinstance(self.kind, ReadRequest):
            return f"{self.timestamp}:rd^{self.user}?"
        if isinstance(self.kind, ReadReturn):
            return f"{self.timestamp}:rd^{self.user}({self.kind.value})"
        return f"{self.timestamp}:wr^{self.user}({self.kind.value})"

    def __str__(self) -> str:
        return self.render()


def read_request(timestamp: Rational, user: int) -> Action:
    return Action(_exact(timestamp), user, ReadRequest())


def read_return(timestamp: Rational, user: int, value: str) -> Action:
    return Action(_exact(timestamp), user, ReadReturn(value))


def write(timestamp: Rational, user: int, value: str) -> Action:
    return Action(_exact(timestamp), user, Write(value))


@dataclass(frozen=True)
class Trace:
    """A finite run: actions at strictly ascending timestamps."""

    actions: tuple[Action, ...]

    def __post_init__(self):
        if not isinstance(self.actions, tuple):
            object.__setattr__(self, "actions", tuple(self.actions))
        for a, b in zip(self.actions, self.actions[1:]):
            if b.timestamp <= a.timestamp:
                raise ArgumentError(
                    "timestamps must be strictly ascending, got "
                    f"{a.timestamp} then {b.timestamp}"
                )

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    @property
    def last_timestamp(self) -> Optional[Fraction]:
        return self.actions[-1].timestamp if self.actions else None

    def for_user(self, user: int) -> "Trace":
        """The subsequence of one user's actions. A subsequence of ascending
        timestamps is ascending, so the result is again well-formed."""
        if user not in (1, 2):
            raise ArgumentError(f"user must be 1 or 2, got {user!r}")
        return Trace(tuple(a for a in self.actions if a.user == user))

    def extended(self, *more: Action) -> "Trace":
        return Trace(self.actions + more)

    def render(self) -> str:
        return "⟨" + ", ".join(a.render() for a in self.actions) + "⟩"

    def __str__(self) -> str:
        return self.render()


# ------------------------------------------------------------ configuration

# characters that would make rendered traces ambiguous as behaviour labels
_LABEL_UNSAFE = frozenset("(),:⟨⟩")


@dataclass(frozen=True)
class ScenarioConfig:
    """Finite stage for the read/write scenario.

    `timestamps` is the ascending grid actions may use, `values` the write
    alphabet in canonical order, `initial_value` what a read sees before any
    write, `max_length` the trace length budget. A single-value alphabet is
    allowed but leaves no fresh value for the impossibility witness;
    verify_scenario reports that as a config limitation instead of refusing
    the configuration here.
    """

    timestamps: tuple[Fraction, ...]
    values: tuple[str, ...]
    initial_value: str
    max_length: int

    def __post_init__(self):
        object.__setattr__(
            self, "timestamps", tuple(_exact(t) for t in self.timestamps)
        )
        object.__setattr__(self, "values", tuple(self.values))
        if self.timestamps and self.timestamps[0] < 0:
            raise ArgumentError("timestamps must be non-negative")
        for a, b in zip(self.timestamps, self.timestamps[1:]):
            if b <= a:
                raise ArgumentError(
                    f"timestamps must be strictly ascending, got {a} then {b}"
                )
        if not self.values:
            raise ArgumentError("the value alphabet must be non-empty")
        if len(set(self.values)) != len(self.values):
            raise ArgumentError("the value alphabet repeats an entry")
        for s in self.values:
            if not s or any(c.isspace() or c in _LABEL_UNSAFE for c in s):
                raise ArgumentError(
                    f"value {s!r} would break trace rendering; values must be "
                    "non-empty and free of delimiter characters"
                )
        if self.initial_value not in self.values:
            raise ArgumentError(
                f"initial value {self.initial_value!r} is not in the alphabet"
            )
        if not isinstance(self.max_length, int) or self.max_length < 0:
            raise ArgumentError("max_length must be a non-negative integer")
        if self.max_length > len(self.timestamps):
            raise ArgumentError(
                f"max_length {self.max_length} exceeds the "
                f"{len(self.timestamps)} available timestamps"
            )


def trace_count(cfg: ScenarioConfig) -> int:
    """Exact size of the trace universe.

    A trace picks k grid timestamps and, for each, one of the
    2*(1 + 2*|values|) user actions (either user requests a read, receives
    one of the values, or writes one of the values).
    """
    per_slot = 2 * (1 + 2 * len(cfg.values))
    return sum(
        comb(len(cfg.timestamps), k) * per_slot**k
        for k in range(cfg.max_length + 1)
    )


def _atoms(cfg: ScenarioConfig, users: tuple[int, ...]) -> tuple[tuple[int, ActionKind], ...]:
    out: list[tuple[int, ActionKind]] = []
    for u in users:
        out.append((u, ReadRequest()))
        out.extend((u, ReadReturn(s)) for s in cfg.values)
        out.extend((u, Write(s)) for s in cfg.values)
    return tuple(out)


def _enumerate(cfg: ScenarioConfig, atoms: tuple[tuple[int, ActionKind], ...]) -> tuple[Trace, ...]:
    traces = [Trace(())]
    for k in range(1, cfg.max_length + 1):
        for stamps in combinations(cfg.timestamps, k):
            for picks in iter_product(atoms, repeat=k):
                traces.append(
                    Trace(tuple(Action(t, u, kind) for t, (u, kind) in zip(stamps, picks)))
                )
    return tuple(traces)


def enumerate_traces(cfg: ScenarioConfig, cap: Optional[int] = None) -> tuple[Trace, ...]:
    """Every well-formed trace within the budget, in canonical order: by
    length, then timestamp choice, then per-slot action."""
    count = trace_count(cfg)
    bound = cardinality_cap(cap)
    if count > bound:
        raise CapacityError(
            f"the configuration would generate {count} traces, over the cap of {bound}"
        )
    return _enumerate(cfg, _atoms(cfg, (1, 2)))


# ------------------------------------------------------------ register model


def current_value(tr: Trace, t: Rational, cfg: ScenarioConfig) -> str:
    """Value of the latest write (by either user) at or before t, or the
    initial value when no write qualifies."""
    when = _exact(t)
    out = cfg.initial_value
    for a in tr.actions:
        if a.timestamp > when:
            break
        if isinstance(a.kind, Write):
            out = a.kind.value
    return out


def matched_reads(tr: Trace) -> tuple[tuple[Action, Action], ...]:
    """Request/return pairs, per user: a request matches the next read
    action by the same user exactly when that action is a return."""
    pairs = []
    for user in (1, 2):
        reads = [
            a
            for a in tr.actions
            if a.user == user and isinstance(a.kind, (ReadRequest, ReadReturn))
        ]
        for a, b in zip(reads, reads[1:]):
            if isinstance(a.kind, ReadRequest) and isinstance(b.kind, ReadReturn):
                pairs.append((a, b))
    pairs.sort(key=lambda p: p[0].timestamp)
    return tuple(pairs)


def is_consistent(tr: Trace, cfg: ScenarioConfig) -> bool:
    """Every matched read pair must return a value the register held at some
    moment of its window. The current value only changes at write
    timestamps, so checking the window's start plus each write inside it
    covers the whole window.
    """
    for req, ret in matched_reads(tr):
        lo, hi = req.timestamp, ret.timestamp
        moments = [lo] + [
            a.timestamp
            for a in tr.actions
            if isinstance(a.kind, Write) and lo < a.timestamp <= hi
        ]
        want = ret.kind.value
        if all(current_value(tr, m, cfg) != want for m in moments):
            return False
    return True


def written_values(tr: Trace) -> frozenset[str]:
    return frozenset(a.kind.value for a in tr.actions if isinstance(a.kind, Write))


def fresh_value(tr: Trace, cfg: ScenarioConfig) -> Optional[str]:
    """First declared value that is neither the initial value nor written in
    the trace, or None when the alphabet is exhausted."""
    used = written_values(tr)
    for s in cfg.values:
        if s != cfg.initial_value and s not in used:
            return s
    return None


def witness_room(tr: Trace, cfg: ScenarioConfig) -> bool:
    """True when the trace can still grow by one write and then a full read
    pair: three more actions and three unused later grid timestamps."""
    last = tr.last_timestamp
    later = sum(1 for t in cfg.timestamps if last is None or t > last)
    return len(tr.actions) + 3 <= cfg.max_length and later >= 3


# ------------------------------------------------------------- the scenario


@dataclass(frozen=True)
class Scenario:
    """A generated trace universe with everything the verifiers consume.

    `system` is the two-component trace system; `view1_system`/`view2_system`
    carry each user's local traces and `projection1`/`projection2` the maps
    dropping the other user's actions. `write_relation` extends a trace by
    one later second-user write; `read_relation` by a bracketed first-user
    read pair with any second-user actions in between. `instance` wires those
    into the impossibility machinery with writes as the strong obligation.
    """

    config: ScenarioConfig
    traces: tuple[Trace, ...]
    system: System
    view1_system: System
    view2_system: System
    projection1: ImplementationMap
    projection2: ImplementationMap
    write_relation: BehaviourRelation
    read_relation: BehaviourRelation
    instance: CapInstance

    @cached_property
    def _by_label(self) -> dict[str, Trace]:
        return dict(zip(self.system.behaviours, self.traces))

    def trace(self, label: str) -> Trace:
        try:
            return self._by_label[label]
        except KeyError:
            raise DomainError(f"{label!r} is not a generated trace") from None


def _write_pairs(cfg: ScenarioConfig, traces: tuple[Trace, ...]) -> tuple[tuple[str, str], ...]:
    pairs = []
    for tr in traces:
        if len(tr.actions) >= cfg.max_length:
            continue
        label = tr.render()
        last = tr.last_timestamp
        for t in cfg.timestamps:
            if last is not None and t <= last:
                continue
            for s in cfg.values:
                pairs.append((label, tr.extended(Action(t, 2, Write(s))).render()))
    return tuple(pairs)


def _read_pairs(cfg: ScenarioConfig, traces: tuple[Trace, ...]) -> tuple[tuple[str, str], ...]:
    fillers = _atoms(cfg, (2,))
    pairs = []
    for tr in traces:
        budget = cfg.max_length - len(tr.actions)
        if budget < 2:
            continue
        label = tr.render()
        last = tr.last_timestamp
        later = tuple(t for t in cfg.timestamps if last is None or t > last)
        for size in range(2, budget + 1):
            for stamps in combinations(later, size):
                opening = Action(stamps[0], 1, ReadRequest())
                for middle in iter_product(fillers, repeat=size - 2):
                    inner = tuple(
                        Action(t, u, kind)
                        for t, (u, kind) in zip(stamps[1:-1], middle)
                    )
                    for s in cfg.values:
                        closing = Action(stamps[-1], 1, ReadReturn(s))
                        pairs.append(
                            (label, tr.extended(opening, *inner, closing).render())
                        )
    return tuple(pairs)


def generate_scenario(cfg: ScenarioConfig, cap: Optional[int] = None) -> Scenario:
    """Materialize the bounded trace universe as systems, projections,
    relations, and a ready impossibility instance.

    Raises a capacity error naming the exact trace count when the universe
    would exceed the cardinality cap.
    """
    traces = enumerate_traces(cfg, cap)
    labels = tuple(tr.render() for tr in traces)

    side1 = tuple(tr.render() for tr in _enumerate(cfg, _atoms(cfg, (1,))))
    side2 = tuple(tr.render() for tr in _enumerate(cfg, _atoms(cfg, (2,))))
    comp1 = Component("user1", side1)
    comp2 = Component("user2", side2)
    view1 = System(
        "user1_traces",
        (comp1,),
        side1,
        tuple(Snapshot((("user1", b),)) for b in side1),
    )
    view2 = System(
        "user2_traces",
        (comp2,),
        side2,
        tuple(Snapshot((("user2", b),)) for b in side2),
    )

    seen1 = {lbl: tr.for_user(1).render() for lbl, tr in zip(labels, traces)}
    seen2 = {lbl: tr.for_user(2).render() for lbl, tr in zip(labels, traces)}
    system = System(
        "traces",
        (comp1, comp2),
        labels,
        tuple(Snapshot((("user1", seen1[l]), ("user2", seen2[l]))) for l in labels),
    )
    # dropping the other user's actions commutes with the snapshot projection
    # by construction, so these always come back as maps
    sigma1 = validate_implementation(system, view1, seen1)
    sigma2 = validate_implementation(system, view2, seen2)

    writes = BehaviourRelation(system, frozenset(_write_pairs(cfg, traces)))
    reads = BehaviourRelation(system, frozenset(_read_pairs(cfg, traces)))
    consistent = frozenset(
        lbl for lbl, tr in zip(labels, traces) if is_consistent(tr, cfg)
    )
    instance = CapInstance(system, sigma1, sigma2, consistent, writes, reads)
    return Scenario(
        cfg, traces, system, view1, view2, sigma1, sigma2, writes, reads, instance
    )


# ------------------------------------------------------------- verification


@dataclass(frozen=True)
class ScenarioReport:
    """What one configuration can witness of the impossibility argument.

    `witness_domain` lists the traces with room for the write-then-read
    construction; entanglement is checked there. `fresh_witnesses` pairs each
    such trace with its canonical fresh-write extension, and `missing_fresh`
    lists the traces whose alphabet is exhausted (a config limitation, noted
    in `notes`). `closure` grows the empty trace under the availability and
    partition-tolerance rules; `forced_violation` is the unacceptable trace
    that growth forced, when that is how the run ended. `exhaustive` is
    filled for universes small enough to enumerate every subset.
    """

    scenario: Scenario
    trace_count: int
    witness_domain: tuple[str, ...]
    entanglement: EntanglementReport
    fresh_witnesses: tuple[tuple[str, str], ...]
    missing_fresh: tuple[str, ...]
    closure: CapReport
    forced_violation: Optional[str]
    exhaustive: Optional[CapReport]
    notes: tuple[str, ...]

    @property
    def entangled(self) -> bool:
        return self.entanglement.entangled


def verify_scenario(cfg: ScenarioConfig, cap: Optional[int] = None) -> ScenarioReport:
    """Generate the scenario and run every verifier the budget allows."""
    scenario = generate_scenario(cfg, cap)
    labels = scenario.system.behaviours
    domain = tuple(
        lbl for lbl, tr in zip(labels, scenario.traces) if witness_room(tr, cfg)
    )

    notes = []
    fresh_witnesses = []
    missing = []
    for lbl in domain:
        tr = scenario.trace(lbl)
        s = fresh_value(tr, cfg)
        if s is None:
            missing.append(lbl)
            continue
        last = tr.last_timestamp
        t = next(t for t in cfg.timestamps if last is None or t > last)
        fresh_witnesses.append((lbl, tr.extended(Action(t, 2, Write(s))).render()))
    if domain:
        notes.append(
            f"entanglement checked on the {len(domain)} of {len(labels)} traces "
            "with room for the write-then-read witness"
        )
    else:
        notes.append(
            "no trace has room for the write-then-read witness within this "
            "budget; the entanglement check is vacuous"
        )
    if missing:
        notes.append(
            f"no fresh value for {len(missing)} of {len(domain)} witness-domain "
            "traces; the argument needs a value neither initial nor already "
            "written, so grow the alphabet"
        )

    entanglement = is_entangled(scenario.instance, domain=domain)
    closure = cap_verify_closure(scenario.instance, labels[0], cap=cap)
    forced = None
    if (
        closure.verdict
        and closure.witnesses
        and closure.witnesses[0].violated == "consistency"
    ):
        forced = closure.closure_log[-1].behaviour

    exhaustive = None
    if len(labels) <= DEFAULT_EXHAUSTIVE_BOUND:
        exhaustive = cap_verify_exhaustive(scenario.instance)
        fit = "agree" if exhaustive.verdict == closure.verdict else "disagree"
        notes.append(f"closure and exhaustive verdicts {fit}")

    return ScenarioReport(
        scenario=scenario,
        trace_count=len(labels),
        witness_domain=domain,
        entanglement=entanglement,
        fresh_witnesses=tuple(fresh_witnesses),
        missing_fresh=tuple(missing),
        closure=closure,
        forced_violation=forced,
        exhaustive=exhaustive,
        notes=tuple(notes),
    )
