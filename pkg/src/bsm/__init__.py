"""Finite behavioural system models.

A system is a finite behaviour set wired to components, each behaviour
assigning one local behaviour to every component. On top of that sit
implementation maps and free composition (kernel), a modal logic with
structural connectives and local reasoning rules (formulas, logic),
guarantee families with the consistency/availability/partition-tolerance
impossibility argument (guarantees), a bounded read/write trace scenario
exercising that argument end to end (cap_scenario), observer-ordered
systems (timed), and a text model format with a CLI (model_io).
"""
from .cap_scenario import (
    Action,
    ReadRequest,
    ReadReturn,
    Scenario,
    ScenarioConfig,
    ScenarioReport,
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
from .errors import (
    ArgumentError,
    CapacityError,
    ConfigurationError,
    DomainError,
    LanguageError,
    ModelError,
    ParseError,
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
    Or,
    Polarity,
    Star,
    Top,
    Wand,
    atoms,
    conjoin,
    in_language,
    is_elementary,
    polarity,
    render,
)
from .guarantees import (
    BehaviourRelation,
    CapInstance,
    CapReport,
    Conjunction,
    Consistency,
    EntanglementReport,
    EntanglementWitness,
    ExplicitFamily,
    Guarantee,
    PartitionTolerance,
    StrongAvailability,
    WeakAvailability,
    cap_verify_closure,
    cap_verify_exhaustive,
    guarantee_satisfied,
    implementation_satisfies,
    is_entangled,
)
from .kernel import (
    Component,
    CompositionWitness,
    FactorResult,
    ImplementationMap,
    ImplementationViolation,
    Snapshot,
    System,
    TensorResult,
    cardinality_cap,
    compatible_pairs,
    components_as_system,
    factor_through_tensor,
    implementation_exists,
    interface,
    is_free_composition,
    is_input,
    is_input_components,
    is_runnable,
    pair_label,
    project,
    projection_implementation,
    systems_equivalent,
    tensor,
    validate_implementation,
)
from .logic import (
    AbsolutenessResult,
    Evaluator,
    Judgement,
    RuleOutcome,
    TypeSet,
    Universe,
    Valuation,
    characteristic_formula,
    check_absoluteness,
    compute_types,
    declared_atoms,
    frame_biconditional,
    frame_rule,
    global_local_instance,
    hm_equivalent,
    local_global_instance,
    local_reasoning_1,
    local_reasoning_2,
    local_reasoning_3,
    satisfies,
    system_decomposes,
    valid_in,
)
from .timed import (
    OrderedComponent,
    PreorderQuotient,
    TimedImplementation,
    TimedValidation,
    derived_order,
    minimal_behaviours,
    observer_system,
    preorder_quotient,
    timed_product,
    validate_timed,
)
