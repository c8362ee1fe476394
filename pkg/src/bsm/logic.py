"""Evaluation of the behaviour logic over finite systems.

Satisfaction of a formula at a behaviour depends only on the behaviour's
snapshot, which keeps everything decidable by finite search: the splitting
connectives range over ordered pairs drawn from a finite, explicitly
declared universe of candidate parts, and the extension connectives range
over single universe members. Verdicts therefore quantify over the given
universe, never over all systems.

An atom evaluated directly against a system lacking its component is a
language error. Inside a structural search, candidate parts whose component
set does not cover a side's atoms are skipped instead: the side simply
cannot hold there, and other candidates may still fit.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

from .errors import (
    ArgumentError,
    CapacityError,
    ConfigurationError,
    DomainError,
    LanguageError,
    PreconditionError,
    StructuralError,
)
from .formulas import (
    And,
    Atom,
    Box,
    DirStar,
    DirWand,
    DisjStar,
    Formula,
    Implies,
    Not,
    Star,
    Top,
    Wand,
    conjoin,
    in_language,
    polarity,
    render,
    uses_box,
    uses_structural,
)
from .kernel import (
    ImplementationMap,
    System,
    cardinality_cap,
    interface,
    is_input_components,
    pair_label,
    systems_equivalent,
    tensor,
)


@dataclass(frozen=True)
class Valuation:
    """Assignment of label sets to component-scoped variables.

    A behaviour satisfies the atom c::p when its value at component c lies
    in the set assigned to (c, p). The entries also fix the variable
    vocabulary: evaluating a variable with no entry is an error, and type
    computations quantify over exactly the declared variables.
    """

    entries: tuple[tuple[tuple[str, str], frozenset[str]], ...]

    @classmethod
    def of(cls, mapping) -> "Valuation":
        entries = []
        for key, labels in mapping.items():
            if isinstance(key, str):
                component, sep, name = key.partition("::")
                if not sep or not component or not name:
                    raise ArgumentError(
                        f"bad variable key {key!r}; expected 'component::name'"
                    )
            else:
                component, name = key
            entries.append(((component, name), frozenset(labels)))
        keys = [k for k, _ in entries]
        if len(set(keys)) != len(keys):
            raise ArgumentError("duplicate variable in valuation")
        return cls(tuple(sorted(entries)))

    @cached_property
    def _table(self) -> dict[tuple[str, str], frozenset[str]]:
        return dict(self.entries)

    def labels_for(self, component: str, name: str) -> frozenset[str]:
        try:
            return self._table[(component, name)]
        except KeyError:
            raise DomainError(f"no valuation entry for {component}::{name}") from None

    def has(self, component: str, name: str) -> bool:
        return (component, name) in self._table

    def variables(self) -> tuple[tuple[str, str], ...]:
        return tuple(k for k, _ in self.entries)

    def variables_for(self, component: str) -> tuple[str, ...]:
        return tuple(n for (c, n), _ in self.entries if c == component)

    def __hash__(self) -> int:
        return hash(self.entries)


def _signature(system: System):
    # identity for dedup purposes: systems that only differ in name or
    # behaviour labels satisfy exactly the same formulas
    return (system.components, system.image)


@dataclass(frozen=True)
class Universe:
    """Finite ordered pool of candidate parts for the structural
    connectives, with the tensor-closure depth it was built with.

    All members must declare shared components identically, otherwise
    combining them is meaningless.
    """

    systems: tuple[System, ...]
    closure_depth: int = 0

    def __post_init__(self):
        declared: dict[str, object] = {}
        for s in self.systems:
            for c in s.components:
                prev = declared.setdefault(c.name, c)
                if prev != c:
                    raise StructuralError(
                        f"universe members declare component {c.name!r} differently"
                    )

    def __iter__(self):
        return iter(self.systems)

    def __len__(self) -> int:
        return len(self.systems)

    def member_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.systems)

    @classmethod
    def of(cls, systems: Iterable[System]) -> "Universe":
        pool = []
        seen = set()
        for s in systems:
            sig = _signature(s)
            if sig not in seen:
                seen.add(sig)
                pool.append(s)
        return cls(tuple(pool), 0)

    @classmethod
    def closed(
        cls,
        systems: Iterable[System],
        closure_depth: int = 1,
        cap: Optional[int] = None,
    ) -> "Universe":
        """Members plus tensors of member pairs, applied closure_depth
        times, deduplicated up to equivalence."""
        base = cls.of(systems)
        pool = list(base.systems)
        seen = {_signature(s) for s in pool}
        bound = cardinality_cap(cap)
        for _ in range(closure_depth):
            fresh = []
            for left in pool:
                for right in pool:
                    combined = tensor(left, right, cap).system
                    sig = _signature(combined)
                    if sig not in seen:
                        seen.add(sig)
                        fresh.append(combined)
                        if len(pool) + len(fresh) > bound:
                            raise CapacityError(
                                f"universe closure exceeded the cardinality cap of {bound}"
                            )
            if not fresh:
                break
            pool.extend(fresh)
        return cls(tuple(pool), closure_depth)


class Evaluator:
    """Memoizing evaluator for one valuation and optional universe.

    Caches are keyed by (system, formula) and grow monotonically; an
    instance is meant to be used from one thread at a time.
    """

    def __init__(
        self,
        valuation: Valuation,
        universe: Optional[Universe] = None,
        cap: Optional[int] = None,
    ):
        self.valuation = valuation
        self.universe = universe
        self.cap = cap
        self._sat: dict[tuple[System, Formula], frozenset[str]] = {}
        self._tensors: dict[tuple[System, System], System] = {}
        self._equiv: dict[tuple[System, System], bool] = {}
        self._inputs: dict[tuple[System, frozenset[str]], bool] = {}

    # -------------------------------------------------- public queries

    def satisfies(self, f: System, x: str, formula: Formula) -> bool:
        if x not in f:
            raise DomainError(f"{x!r} is not a behaviour of {f.name!r}")
        return x in self._sat_set(f, formula)

    def satisfying_set(self, f: System, formula: Formula) -> frozenset[str]:
        return self._sat_set(f, formula)

    def valid_in(self, f: System, formula: Formula) -> bool:
        return len(self._sat_set(f, formula)) == len(f.behaviours)

    # -------------------------------------------------- evaluation core

    def _sat_set(self, f: System, formula: Formula) -> frozenset[str]:
        key = (f, formula)
        cached = self._sat.get(key)
        if cached is None:
            cached = self._compute(f, formula)
            self._sat[key] = cached
        return cached

    def _compute(self, f: System, formula: Formula) -> frozenset[str]:
        every = frozenset(f.behaviours)
        if isinstance(formula, Atom):
            if formula.component not in f.component_names:
                raise LanguageError(
                    f"atom {formula.component}::{formula.name} mentions a component "
                    f"outside {f.name!r}"
                )
            labels = self.valuation.labels_for(formula.component, formula.name)
            return frozenset(
                x for x in f.behaviours
                if f.local_value(x, formula.component) in labels
            )
        if isinstance(formula, Top):
            return every
        if isinstance(formula, Not):
            return every - self._sat_set(f, formula.body)
        if isinstance(formula, And):
            return self._sat_set(f, formula.left) & self._sat_set(f, formula.right)
        if isinstance(formula, Box):
            body = self._sat_set(f, formula.body)
            return every if body == every else frozenset()
        if isinstance(formula, (Star, DirStar, DisjStar)):
            return self._split_sat(f, formula)
        if isinstance(formula, (Wand, DirWand)):
            return self._extend_sat(f, formula)
        raise ArgumentError(f"not a formula node: {formula!r}")

    def _part_sat(self, part: System, formula: Formula) -> frozenset[str]:
        """Satisfaction inside a structural search: a part whose components
        do not cover the formula's atoms satisfies it nowhere."""
        if not in_language(formula, part.component_names):
            return frozenset()
        return self._sat_set(part, formula)

    def _split_sat(self, f: System, formula) -> frozenset[str]:
        u = self._need_universe(formula)
        directed = isinstance(formula, DirStar)
        disjoint = isinstance(formula, DisjStar)
        want = set(f.component_names)
        remaining = set(f.behaviours)
        found: set[str] = set()
        for left in u:
            if not remaining:
                break
            left_names = set(left.component_names)
            if not left_names <= want:
                continue
            for right in u:
                if not remaining:
                    break
                if not left_names | set(right.component_names) == want:
                    continue
                shared = interface(left, right)
                if disjoint and shared:
                    continue
                if directed and not self._input_ok(right, shared):
                    continue
                combined = self._tensor(left, right)
                if not self._equivalent(f, combined):
                    continue
                left_snaps = {
                    left.snapshot(b) for b in self._part_sat(left, formula.left)
                }
                if not left_snaps:
                    continue
                right_snaps = {
                    right.snapshot(b) for b in self._part_sat(right, formula.right)
                }
                if not right_snaps:
                    continue
                ln = left.component_names
                rn = right.component_names
                for x in list(remaining):
                    snap = f.snapshot(x)
                    if snap.restrict(ln) in left_snaps and snap.restrict(rn) in right_snaps:
                        found.add(x)
                        remaining.discard(x)
        return frozenset(found)

    def _extend_sat(self, f: System, formula) -> frozenset[str]:
        u = self._need_universe(formula)
        directed = isinstance(formula, DirWand)
        alive = dict.fromkeys(f.behaviours, True)
        for g in u:
            shared = interface(f, g)
            if directed and not self._input_ok(g, shared):
                continue
            left_sat = self._part_sat(g, formula.left)
            if not left_sat:
                continue
            combined = self._tensor(f, g)
            right_sat = self._part_sat(combined, formula.right)
            # component-disjoint candidates make every behaviour pair compatible
            shared_names = tuple(sorted(shared))
            for y in left_sat:
                y_shared = g.snapshot(y).restrict(shared_names) if shared_names else None
                for x in f.behaviours:
                    if not alive[x]:
                        continue
                    if shared_names and f.snapshot(x).restrict(shared_names) != y_shared:
                        continue
                    if pair_label(x, y) not in right_sat:
                        alive[x] = False
        return frozenset(x for x, ok in alive.items() if ok)

    # -------------------------------------------------- cached helpers

    def _need_universe(self, formula) -> Universe:
        if self.universe is None:
            raise ConfigurationError(
                f"evaluating {type(formula).__name__} needs a universe of candidate parts"
            )
        return self.universe

    def _tensor(self, left: System, right: System) -> System:
        key = (left, right)
        got = self._tensors.get(key)
        if got is None:
            got = tensor(left, right, self.cap).system
            self._tensors[key] = got
        return got

    def _equivalent(self, f: System, g: System) -> bool:
        key = (f, g)
        got = self._equiv.get(key)
        if got is None:
            got = systems_equivalent(f, g)
            self._equiv[key] = got
        return got

    def _input_ok(self, g: System, shared: frozenset[str]) -> bool:
        key = (g, shared)
        got = self._inputs.get(key)
        if got is None:
            got = is_input_components(g, sorted(shared))
            self._inputs[key] = got
        return got


def satisfies(
    f: System,
    valuation: Valuation,
    x: str,
    formula: Formula,
    universe: Optional[Universe] = None,
    cap: Optional[int] = None,
) -> bool:
    """One-shot satisfaction check; builds a throwaway evaluator."""
    return Evaluator(valuation, universe, cap).satisfies(f, x, formula)


def valid_in(
    f: System,
    valuation: Valuation,
    formula: Formula,
    universe: Optional[Universe] = None,
    cap: Optional[int] = None,
) -> bool:
    """Does every behaviour of f satisfy the formula?"""
    return Evaluator(valuation, universe, cap).valid_in(f, formula)


def system_decomposes(
    f: System,
    x: str,
    left: System,
    x_left: str,
    right: System,
    x_right: str,
    cap: Optional[int] = None,
) -> bool:
    """Is (f, x) the composition of (left, x_left) and (right, x_right)?

    True when f is equivalent to the tensor of the parts and x agrees with
    each part's behaviour on that part's components. Mismatched shapes give
    False, never an error.
    """
    for system, behaviour in ((f, x), (left, x_left), (right, x_right)):
        if behaviour not in system:
            raise DomainError(
                f"{behaviour!r} is not a behaviour of {system.name!r}"
            )
    try:
        combined = tensor(left, right, cap).system
    except StructuralError:
        return False
    if not systems_equivalent(f, combined):
        return False
    snap = f.snapshot(x)
    for part, part_x in ((left, x_left), (right, x_right)):
        for c in part.component_names:
            if snap.value(c) != part.local_value(part_x, c):
                return False
    return True


# ------------------------------------------------------------- absoluteness

@dataclass(frozen=True)
class AbsolutenessResult:
    """How satisfaction transfers along an implementation for one formula.

    direction is "both" for modality-free formulas (a biconditional),
    "target-to-source" when Box occurs only positively, "source-to-target"
    when only negatively. counterexamples lists source behaviours where the
    claimed transfer fails; the lemma says there are none.
    """

    direction: str
    holds: bool
    counterexamples: tuple[str, ...]


def check_absoluteness(
    impl: ImplementationMap,
    valuation: Valuation,
    formula: Formula,
    universe: Optional[Universe] = None,
    cap: Optional[int] = None,
) -> AbsolutenessResult:
    """Test how the formula's truth transfers between source and target.

    The formula must be about the target's components. Its Box polarity
    fixes the transfer direction; mixed polarity admits no direction.
    """
    pol = polarity(formula)
    if not in_language(formula, impl.target.component_names):
        raise LanguageError(
            "absoluteness is about formulas in the target's language"
        )
    if pol.positive and pol.negative:
        direction = "both"
    elif pol.positive:
        direction = "target-to-source"
    elif pol.negative:
        direction = "source-to-target"
    else:
        raise PreconditionError(
            "mixed Box polarity: no transfer direction applies"
        )
    ev = Evaluator(valuation, universe, cap)
    bad = []
    for x in impl.source.behaviours:
        at_source = ev.satisfies(impl.source, x, formula)
        at_target = ev.satisfies(impl.target, impl.apply(x), formula)
        if direction == "both":
            ok = at_source == at_target
        elif direction == "target-to-source":
            ok = at_source or not at_target
        else:
            ok = at_target or not at_source
        if not ok:
            bad.append(x)
    return AbsolutenessResult(direction, not bad, tuple(bad))


# ------------------------------------------------------------- reasoning rules

@dataclass(frozen=True)
class Judgement:
    """What a rule certifies: one formula valid, or failing, in one system."""

    claim: str  # "valid" | "not-valid"
    system: System
    formula: Formula

    def __str__(self) -> str:
        verb = "valid in" if self.claim == "valid" else "not valid in"
        return f"{render(self.formula)} is {verb} {self.system.name!r}"


@dataclass(frozen=True)
class RuleOutcome:
    """Result of applying a reasoning rule.

    certified is True when every premise checked out, in which case the
    conclusion holds by the rule's soundness. audit carries a direct
    evaluation of the conclusion when requested, and None otherwise.
    """

    rule: str
    certified: bool
    conclusion: Judgement
    premise_failures: tuple[str, ...] = ()
    audit: Optional[bool] = None


def _require_fragment(formula: Formula, names, what: str, allow_box: bool) -> None:
    if uses_structural(formula):
        raise LanguageError(f"{what} must not use structural connectives")
    if not allow_box and uses_box(formula):
        raise LanguageError(f"{what} must be elementary (no modality)")
    if not in_language(formula, names):
        raise LanguageError(f"{what} mentions components outside its allowed language")


def _shared_source_triple(sigma: ImplementationMap, pi: ImplementationMap):
    if sigma.source != pi.source:
        raise ArgumentError("the two implementations must share their source system")
    return sigma.source, sigma.target, pi.target


def _invalidity_witness(ev: Evaluator, system: System, formula: Formula) -> str:
    satisfied = ev.satisfying_set(system, formula)
    for x in system.behaviours:
        if x not in satisfied:
            return x
    raise ArgumentError("no witness: the formula is valid")


def _lr_common(sigma, pi, valuation, alpha, beta, universe, audit, cap, rule, boxed):
    f, g, h = _shared_source_triple(sigma, pi)
    shared = interface(f, g)
    if not shared:
        raise PreconditionError("the source and first target share no components")
    _require_fragment(alpha, shared, "the interface constraint", allow_box=False)
    if not in_language(alpha, h.component_names):
        # the cross premise evaluates the constraint inside the second
        # target, so its atoms must make sense there as well
        raise LanguageError(
            "the interface constraint mentions components the second target lacks"
        )
    _require_fragment(beta, h.component_names, "the conclusion formula", allow_box=boxed)
    if boxed and not polarity(beta).positive:
        raise PreconditionError("the conclusion formula must use Box only positively")
    ev = Evaluator(valuation, universe, cap)
    failures = []
    if not ev.valid_in(g, alpha):
        witness = _invalidity_witness(ev, g, alpha)
        failures.append(
            "the interface constraint is not valid in the first target "
            f"(fails at {witness!r})"
        )
    if not ev.valid_in(h, Implies(alpha, beta)):
        witness = _invalidity_witness(ev, h, Implies(alpha, beta))
        failures.append(
            "the implication is not valid in the second target "
            f"(fails at {witness!r})"
        )
    conclusion = Judgement("valid", f, beta)
    audited = ev.valid_in(f, beta) if audit else None
    return RuleOutcome(rule, not failures, conclusion, tuple(failures), audited)


def local_reasoning_1(
    sigma: ImplementationMap,
    pi: ImplementationMap,
    valuation: Valuation,
    alpha: Formula,
    beta: Formula,
    universe: Optional[Universe] = None,
    audit: bool = False,
    cap: Optional[int] = None,
) -> RuleOutcome:
    """Certify a fact about a system from facts about two of its targets.

    sigma and pi implement two systems g and h from one source f. If the
    interface constraint alpha (elementary, over the f-g interface, also
    expressible in h) is valid in g, and alpha -> beta is valid in h for an
    elementary beta over h's components, then beta is valid in f.
    """
    return _lr_common(
        sigma, pi, valuation, alpha, beta, universe, audit, cap,
        rule="local-1", boxed=False,
    )


def local_reasoning_2(
    sigma: ImplementationMap,
    pi: ImplementationMap,
    valuation: Valuation,
    alpha: Formula,
    beta: Formula,
    universe: Optional[Universe] = None,
    audit: bool = False,
    cap: Optional[int] = None,
) -> RuleOutcome:
    """Like local_reasoning_1, but the conclusion may use Box positively."""
    return _lr_common(
        sigma, pi, valuation, alpha, beta, universe, audit, cap,
        rule="local-2", boxed=True,
    )


def local_reasoning_3(
    f: System,
    g: System,
    valuation: Valuation,
    alpha: Formula,
    beta: Formula,
    universe: Optional[Universe] = None,
    audit: bool = False,
    cap: Optional[int] = None,
) -> RuleOutcome:
    """Certify that a composition fails a formula.

    Needs the f-g interface to be non-empty and an input of g. If some
    behaviour of f violates the elementary interface constraint alpha, and
    !alpha -> !beta is valid in g for a negatively boxed beta over g's
    components, then beta is not valid in the composition of f and g.
    """
    shared = interface(f, g)
    if not shared:
        raise PreconditionError("the systems share no components")
    if not is_input_components(g, sorted(shared)):
        raise PreconditionError(
            "the shared components are not an input of the extending system"
        )
    _require_fragment(alpha, shared, "the interface constraint", allow_box=False)
    _require_fragment(beta, g.component_names, "the conclusion formula", allow_box=True)
    if not polarity(beta).negative:
        raise PreconditionError("the conclusion formula must use Box only negatively")
    ev = Evaluator(valuation, universe, cap)
    failures = []
    if ev.valid_in(f, alpha):
        failures.append(
            "the interface constraint is valid in the base system; "
            "the rule needs a violation"
        )
    if not ev.valid_in(g, Implies(Not(alpha), Not(beta))):
        witness = _invalidity_witness(ev, g, Implies(Not(alpha), Not(beta)))
        failures.append(
            "the contrapositive implication is not valid in the extension "
            f"(fails at {witness!r})"
        )
    combined = tensor(f, g, cap).system
    conclusion = Judgement("not-valid", combined, beta)
    audited = (not ev.valid_in(combined, beta)) if audit else None
    return RuleOutcome("local-3", not failures, conclusion, tuple(failures), audited)


def frame_rule(
    g: System,
    h: System,
    valuation: Valuation,
    beta: Formula,
    universe: Optional[Universe] = None,
    audit: bool = False,
    cap: Optional[int] = None,
) -> RuleOutcome:
    """Attach a component-disjoint system without disturbing a valid formula.

    If g and h share no components and beta (over h's components, Box
    allowed freely) is valid in h, then beta is valid in the composition.
    Audit additionally checks the pointwise bridge the soundness argument
    rests on: the formula holds at a joint behaviour exactly when it holds
    at that behaviour's h-part.
    """
    if interface(g, h):
        raise PreconditionError("frame extension needs component-disjoint systems")
    _require_fragment(beta, h.component_names, "the framed formula", allow_box=True)
    ev = Evaluator(valuation, universe, cap)
    failures = []
    if not ev.valid_in(h, beta):
        witness = _invalidity_witness(ev, h, beta)
        failures.append(
            f"the framed formula is not valid in its own system (fails at {witness!r})"
        )
    combined = tensor(g, h, cap)
    conclusion = Judgement("valid", combined.system, beta)
    audited = None
    if audit:
        audited = ev.valid_in(combined.system, beta) and frame_biconditional(
            g, h, valuation, beta, universe, cap
        )
    return RuleOutcome("frame", not failures, conclusion, tuple(failures), audited)


def frame_biconditional(
    g: System,
    h: System,
    valuation: Valuation,
    formula: Formula,
    universe: Optional[Universe] = None,
    cap: Optional[int] = None,
) -> bool:
    """The pointwise bridge behind the frame rule: at every joint behaviour
    of a disjoint composition, the formula holds exactly when it holds at
    the behaviour's part in the formula's own system."""
    if interface(g, h):
        raise PreconditionError("the bridge needs component-disjoint systems")
    _require_fragment(formula, h.component_names, "the framed formula", allow_box=True)
    ev = Evaluator(valuation, universe, cap)
    combined = tensor(g, h, cap)
    onto_h = combined.onto_right
    return all(
        ev.satisfies(combined.system, joint, formula)
        == ev.satisfies(h, onto_h.apply(joint), formula)
        for joint in combined.system.behaviours
    )


# ------------------------------------------------- structural theorems

def local_global_instance(
    f: System,
    valuation: Valuation,
    x: str,
    phi: Formula,
    universe: Universe,
    cap: Optional[int] = None,
) -> bool:
    """One instance of: a positive truth of a part is a truth of the whole.

    Evaluates (phi * top) -> phi at the given behaviour. phi must be
    positively boxed and structural-free.
    """
    if not polarity(phi).positive:
        raise PreconditionError("the formula must use Box only positively")
    ev = Evaluator(valuation, universe, cap)
    return (not ev.satisfies(f, x, Star(phi, Top()))) or ev.satisfies(f, x, phi)


def global_local_instance(
    f: System,
    valuation: Valuation,
    x: str,
    phi: Formula,
    psi1: Formula,
    psi2: Formula,
    universe: Universe,
    cap: Optional[int] = None,
) -> bool:
    """One instance of: a negative truth of the whole holds in any part.

    Evaluates phi -> ((psi1 * psi2) -> ((psi1 & phi) * psi2)) at the given
    behaviour. phi must be negatively boxed and structural-free. The claim
    is a theorem when phi is expressible in the splitting parts, so callers
    quantifying it should keep phi's atoms within every universe member.
    """
    if not polarity(phi).negative:
        raise PreconditionError("the formula must use Box only negatively")
    ev = Evaluator(valuation, universe, cap)
    if not ev.satisfies(f, x, phi):
        return True
    if not ev.satisfies(f, x, Star(psi1, psi2)):
        return True
    return ev.satisfies(f, x, Star(And(psi1, phi), psi2))


# ------------------------------------------------------------- types

@dataclass(frozen=True)
class TypeSet:
    """Variable types of one system: per behaviour, the set of declared
    variables it satisfies, and the set of all such sets."""

    system: System
    types: tuple[tuple[str, frozenset[Atom]], ...]
    all_types: frozenset[frozenset[Atom]]

    @cached_property
    def _table(self) -> dict[str, frozenset[Atom]]:
        return dict(self.types)

    def type_of(self, behaviour: str) -> frozenset[Atom]:
        try:
            return self._table[behaviour]
        except KeyError:
            raise DomainError(
                f"{behaviour!r} is not a behaviour of {self.system.name!r}"
            ) from None

    def __hash__(self) -> int:
        return hash((self.system, self.types))


def declared_atoms(f: System, valuation: Valuation) -> tuple[Atom, ...]:
    """All atoms over f's components present in the valuation, in canonical
    (component, variable) order."""
    out = []
    for c in f.component_names:
        for name in valuation.variables_for(c):
            out.append(Atom(c, name))
    return tuple(sorted(out, key=lambda a: (a.component, a.name)))


def compute_types(f: System, valuation: Valuation) -> TypeSet:
    vocabulary = declared_atoms(f, valuation)
    rows = []
    for x in f.behaviours:
        satisfied = frozenset(
            a for a in vocabulary
            if f.local_value(x, a.component) in valuation.labels_for(a.component, a.name)
        )
        rows.append((x, satisfied))
    return TypeSet(f, tuple(rows), frozenset(t for _, t in rows))


def hm_equivalent(
    f: System,
    g: System,
    x: str,
    y: str,
    valuation: Valuation,
    flavour: str = "boxed",
) -> bool:
    """Do two behaviours satisfy exactly the same formulas?

    Flavour "elementary" compares agreement on all modality-free formulas,
    which reduces to equality of the behaviours' variable types. Flavour
    "boxed" compares agreement on all formulas with the modality, which
    additionally needs the two systems to realize the same set of types.
    Both systems must have the same component names.
    """
    if flavour not in ("elementary", "boxed"):
        raise ArgumentError(f"unknown flavour {flavour!r}")
    if set(f.component_names) != set(g.component_names):
        raise DomainError("type comparison needs identical component names")
    tf, tg = compute_types(f, valuation), compute_types(g, valuation)
    if tf.type_of(x) != tg.type_of(y):
        return False
    if flavour == "boxed":
        return tf.all_types == tg.all_types
    return True


def characteristic_formula(
    satisfied: Iterable[Atom], vocabulary: Iterable[Atom]
) -> Formula:
    """The conjunction pinning one type: each vocabulary atom appears
    positively if satisfied, negated otherwise, in canonical order."""
    present = frozenset(satisfied)
    ordered = sorted(set(vocabulary), key=lambda a: (a.component, a.name))
    if not present <= set(ordered):
        raise ArgumentError("the type must be a subset of the vocabulary")
    positives = [a for a in ordered if a in present]
    negatives = [Not(a) for a in ordered if a not in present]
    return conjoin(positives + negatives)
