"""Command-line interface.

One command per invocation; every command prints a single JSON report to
standard output (or a text rendering with --pretty) and exits 0 when the
verdict is true or the command succeeded, 1 when the verdict is false or a
rule's premises failed, and 2 on usage, parse, or validation problems.

Systems given on the command line may be tensor expressions: "g⊗h" builds
the canonical free composition of the declared systems g and h on the fly.
Formulas may name a declared formula or be inline concrete syntax. Label
lists (--consistent, --subset, --values, --domain) are comma-separated and
are not unquoted, so they suit labels without commas; put richer labels in
a model file instead.
"""
import argparse
import hashlib
import sys
from fractions import Fraction
from importlib.resources import files as resource_files
from pathlib import Path
from typing import Optional

from ..cap_scenario import ScenarioConfig, generate_scenario, verify_scenario
from ..errors import ConfigurationError, ModelError, ParseError
from ..guarantees import (
    CapInstance,
    DEFAULT_EXHAUSTIVE_BOUND,
    cap_verify_closure,
    cap_verify_exhaustive,
    guarantee_satisfied,
    implementation_satisfies,
    is_entangled,
)
from ..kernel import (
    CompositionWitness,
    System,
    cardinality_cap,
    factor_through_tensor,
    implementation_exists,
    is_free_composition,
    is_input,
    is_runnable,
    systems_equivalent,
    tensor,
)
from ..logic import (
    Evaluator,
    Universe,
    Valuation,
    compute_types,
    frame_rule,
    hm_equivalent,
    local_reasoning_1,
    local_reasoning_2,
    local_reasoning_3,
)
from ..timed import derived_order, minimal_behaviours, timed_product, validate_timed
from .formula_parser import parse_formula
from .parser import ModelFile, try_parse_model
from .report import (
    LIST_LIMIT,
    Report,
    cap_report_payload,
    clipped,
    entanglement_payload,
    rule_outcome_payload,
    to_json,
    to_pretty,
)


class _BadModel(Exception):
    """Raised when the model file fails to parse; carries the diagnostics."""

    def __init__(self, path: str, diagnostics):
        super().__init__(f"{path}: {diagnostics[0]}")
        self.path = path
        self.diagnostics = diagnostics


# -------------------------------------------------------------- resolution


def _load_model(args) -> ModelFile:
    path = getattr(args, "model", None)
    if path is None:
        raise ConfigurationError("this command needs --model")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigurationError(f"cannot read model file: {err}") from None
    result = try_parse_model(text)
    if result.model is None:
        raise _BadModel(path, result.diagnostics)
    return result.model


def _system(model: ModelFile, text: str, cap: Optional[int] = None) -> System:
    name = text.strip()
    if name in model.systems:
        return model.systems[name]
    if "⊗" in name:
        parts = [p.strip() for p in name.split("⊗")]
        built = _system(model, parts[0], cap)
        for part in parts[1:]:
            built = tensor(built, _system(model, part, cap), cap).system
        return built
    raise ConfigurationError(f"no system named {name!r} in the model")


def _formula(model: Optional[ModelFile], text: str):
    if model is not None and text in model.formulas:
        return model.formulas[text]
    return parse_formula(text)


def _valuation(model: ModelFile, name: Optional[str]) -> tuple[str, Valuation]:
    if name is not None:
        if name not in model.valuations:
            raise ConfigurationError(f"no valuation named {name!r} in the model")
        return name, model.valuations[name]
    if len(model.valuations) == 1:
        return next(iter(model.valuations.items()))
    raise ConfigurationError(
        "pass --valuation: the model declares "
        f"{len(model.valuations)} valuations"
    )


def _universe(model: ModelFile, name: Optional[str]) -> tuple[Optional[str], Optional[Universe]]:
    if name is None:
        return None, None
    if name not in model.universes:
        raise ConfigurationError(f"no universe named {name!r} in the model")
    return name, model.universes[name]


def _impl(model: ModelFile, name: str):
    if name not in model.impls:
        raise ConfigurationError(f"no implementation named {name!r} in the model")
    return model.impls[name]


def _relation(model: ModelFile, name: str):
    if name not in model.relations:
        raise ConfigurationError(f"no relation named {name!r} in the model")
    return model.relations[name]


def _labels(text: str) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(part.strip() for part in text.split(","))


def _provenance(args, model_used: bool = True, **extra) -> dict:
    out = {}
    if model_used:
        out["model"] = getattr(args, "model", None)
    if hasattr(args, "cap"):
        out["cap"] = cardinality_cap(args.cap)
    out.update(extra)
    return out


def _instance(args, model: ModelFile) -> CapInstance:
    view1 = _impl(model, args.view1)
    view2 = _impl(model, args.view2)
    return CapInstance(
        view1.source,
        view1,
        view2,
        frozenset(_labels(args.consistent)),
        _relation(model, args.strong),
        _relation(model, args.weak),
    )


def _scenario_config(args, need_model: bool) -> tuple[ScenarioConfig, Optional[ModelFile], dict]:
    if args.timestamps is not None or args.values is not None:
        if args.timestamps is None or args.values is None:
            raise ConfigurationError(
                "give both --timestamps and --values, or name --scenario from a model"
            )
        stamps = tuple(Fraction(t) for t in _labels(args.timestamps))
        values = _labels(args.values)
        initial = args.initial if args.initial is not None else (values[0] if values else "")
        cfg = ScenarioConfig(stamps, values, initial, args.max_len)
        model = None
        echo = {"scenario": None}
    else:
        model = _load_model(args)
        if args.scenario is None:
            raise ConfigurationError(
                "name --scenario, or give --timestamps/--values directly"
            )
        if args.scenario not in model.scenarios:
            raise ConfigurationError(
                f"no scenario named {args.scenario!r} in the model"
            )
        cfg = model.scenarios[args.scenario]
        echo = {"scenario": args.scenario}
    echo.update(
        {
            "timestamps": [str(t) for t in cfg.timestamps],
            "values": list(cfg.values),
            "initial": cfg.initial_value,
            "max_length": cfg.max_length,
        }
    )
    return cfg, model, echo


# -------------------------------------------------------------- handlers


def _cmd_check_impl(args) -> Report:
    model = _load_model(args)
    if args.impl is not None:
        impl = _impl(model, args.impl)
        details = {
            "source": impl.source.name,
            "target": impl.target.name,
            "input": is_input(impl),
            "mapping": clipped(list(pair) for pair in impl.mapping),
        }
        return Report(
            (), True, ("commutation check",), _provenance(args), details
        )
    if args.source is None or args.target is None:
        raise ConfigurationError("pass --impl, or both --source and --target")
    source = _system(model, args.source, args.cap)
    target = _system(model, args.target, args.cap)
    found = implementation_exists(source, target)
    details = {"source": source.name, "target": target.name}
    witnesses = ()
    if found is not None:
        details["input"] = is_input(found)
        witnesses = (dict(mapping=clipped(list(p) for p in found.mapping)),)
    return Report(
        (),
        found is not None,
        ("implementation search",),
        _provenance(args),
        details,
        witnesses,
    )


def _cmd_compose(args) -> Report:
    model = _load_model(args)
    left = _system(model, args.left, args.cap)
    right = _system(model, args.right, args.cap)
    combined = tensor(left, right, args.cap)
    details = {
        "system": combined.system.name,
        "components": list(combined.system.component_names),
        "size": len(combined.system.behaviours),
        "runnable": is_runnable(combined.system),
        "behaviours": clipped(combined.system.behaviours),
    }
    return Report(
        (), None, ("canonical free composition",), _provenance(args), details
    )


def _cmd_check_free(args) -> Report:
    model = _load_model(args)
    witness = CompositionWitness(
        _impl(model, args.left_map), _impl(model, args.right_map)
    )
    free = is_free_composition(witness)
    details = {
        "environment": witness.environment.name,
        "left": witness.left.name,
        "right": witness.right.name,
    }
    if free:
        details["factor_onto_tensor_surjective"] = factor_through_tensor(
            witness, args.cap
        ).surjective
    return Report(
        (), free, ("free composition check",), _provenance(args), details
    )


def _cmd_equiv(args) -> Report:
    model = _load_model(args)
    left = _system(model, args.system, args.cap)
    right = _system(model, args.system2, args.cap)
    details = {
        "left": left.name,
        "right": right.name,
        "left_size": len(left.behaviours),
        "right_size": len(right.behaviours),
    }
    return Report(
        (),
        systems_equivalent(left, right),
        ("mutual implementation check",),
        _provenance(args),
        details,
    )


def _eval_common(args, all_mode: bool) -> Report:
    model = _load_model(args)
    system = _system(model, args.system, args.cap)
    formula = _formula(model, args.formula)
    val_name, valuation = _valuation(model, args.valuation)
    uni_name, universe = _universe(model, args.universe)
    evaluator = Evaluator(valuation, universe, args.cap)
    satisfying = evaluator.satisfying_set(system, formula)
    in_order = [b for b in system.behaviours if b in satisfying]
    details = {
        "system": system.name,
        "formula": str(formula),
        "satisfying": clipped(in_order),
        "behaviours": len(system.behaviours),
    }
    provenance = _provenance(args, valuation=val_name, universe=uni_name)
    citation = "direct validity evaluation" if all_mode else "direct satisfaction evaluation"
    if all_mode:
        failing = [b for b in system.behaviours if b not in satisfying]
        verdict = not failing
        witnesses = tuple(failing[:LIST_LIMIT])
        details["failing"] = len(failing)
        return Report((), verdict, (citation,), provenance, details, witnesses)
    verdict = evaluator.satisfies(system, args.behaviour, formula)
    details["behaviour"] = args.behaviour
    return Report((), verdict, (citation,), provenance, details)


def _cmd_eval(args) -> Report:
    if not args.all and args.behaviour is None:
        raise ConfigurationError("pass --behaviour LABEL or --all")
    return _eval_common(args, all_mode=args.all)


def _cmd_valid(args) -> Report:
    return _eval_common(args, all_mode=True)


def _rule_common(args, rule) -> Report:
    model = _load_model(args)
    val_name, valuation = _valuation(model, args.valuation)
    uni_name, universe = _universe(model, args.universe)
    alpha = _formula(model, args.alpha)
    beta = _formula(model, args.beta)
    if args.sigma is not None or args.pi is not None:
        if args.sigma is None or args.pi is None:
            raise ConfigurationError("pass both --sigma and --pi, or --left and --right")
        sigma = _impl(model, args.sigma)
        pi = _impl(model, args.pi)
    else:
        if args.left is None or args.right is None:
            raise ConfigurationError("pass --left and --right, or --sigma and --pi")
        combined = tensor(
            _system(model, args.left, args.cap),
            _system(model, args.right, args.cap),
            args.cap,
        )
        sigma, pi = combined.onto_left, combined.onto_right
    outcome = rule(
        sigma, pi, valuation, alpha, beta, universe, args.audit, args.cap
    )
    return Report(
        (),
        outcome.certified,
        (outcome.rule,),
        _provenance(args, valuation=val_name, universe=uni_name),
        rule_outcome_payload(outcome),
    )


def _cmd_rule_1(args) -> Report:
    return _rule_common(args, local_reasoning_1)


def _cmd_rule_2(args) -> Report:
    return _rule_common(args, local_reasoning_2)


def _cmd_rule_3(args) -> Report:
    model = _load_model(args)
    val_name, valuation = _valuation(model, args.valuation)
    uni_name, universe = _universe(model, args.universe)
    outcome = local_reasoning_3(
        _system(model, args.left, args.cap),
        _system(model, args.right, args.cap),
        valuation,
        _formula(model, args.alpha),
        _formula(model, args.beta),
        universe,
        args.audit,
        args.cap,
    )
    return Report(
        (),
        outcome.certified,
        (outcome.rule,),
        _provenance(args, valuation=val_name, universe=uni_name),
        rule_outcome_payload(outcome),
    )


def _cmd_frame(args) -> Report:
    model = _load_model(args)
    val_name, valuation = _valuation(model, args.valuation)
    uni_name, universe = _universe(model, args.universe)
    outcome = frame_rule(
        _system(model, args.left, args.cap),
        _system(model, args.right, args.cap),
        valuation,
        _formula(model, args.beta),
        universe,
        args.audit,
        args.cap,
    )
    return Report(
        (),
        outcome.certified,
        (outcome.rule,),
        _provenance(args, valuation=val_name, universe=uni_name),
        rule_outcome_payload(outcome),
    )


def _cmd_hm(args) -> Report:
    model = _load_model(args)
    val_name, valuation = _valuation(model, args.valuation)
    f = _system(model, args.system, args.cap)
    g = _system(model, args.system2, args.cap)
    verdict = hm_equivalent(
        f, g, args.behaviour, args.behaviour2, valuation, args.flavour
    )
    types_f = compute_types(f, valuation)
    types_g = compute_types(g, valuation)
    details = {
        "flavour": args.flavour,
        "left": {"system": f.name, "behaviour": args.behaviour,
                 "type": sorted(str(a) for a in types_f.type_of(args.behaviour))},
        "right": {"system": g.name, "behaviour": args.behaviour2,
                  "type": sorted(str(a) for a in types_g.type_of(args.behaviour2))},
    }
    return Report(
        (),
        verdict,
        (f"type comparison ({args.flavour})",),
        _provenance(args, valuation=val_name),
        details,
    )


def _cmd_types(args) -> Report:
    model = _load_model(args)
    val_name, valuation = _valuation(model, args.valuation)
    system = _system(model, args.system, args.cap)
    types = compute_types(system, valuation)
    table = [
        {"behaviour": b, "type": sorted(str(a) for a in types.type_of(b))}
        for b in system.behaviours
    ]
    realized = sorted(
        sorted(str(a) for a in t) for t in {types.type_of(b) for b in system.behaviours}
    )
    details = {
        "system": system.name,
        "types": clipped(table),
        "realized_types": clipped(realized),
    }
    return Report(
        (),
        None,
        ("variable type computation",),
        _provenance(args, valuation=val_name),
        details,
    )


def _cmd_guarantee(args) -> Report:
    model = _load_model(args)
    if args.guarantee not in model.guarantees:
        raise ConfigurationError(f"no guarantee named {args.guarantee!r} in the model")
    g = model.guarantees[args.guarantee]
    if (args.subset is None) == (args.impl is None):
        raise ConfigurationError("pass exactly one of --subset or --impl")
    if args.subset is not None:
        subset = _labels(args.subset)
        verdict = guarantee_satisfied(subset, g)
        details = {"guarantee": g.describe(), "subset": sorted(subset)}
    else:
        impl = _impl(model, args.impl)
        verdict = implementation_satisfies(impl, g)
        details = {
            "guarantee": g.describe(),
            "implementation": args.impl,
            "image": sorted(impl.image),
        }
    return Report(
        (), verdict, ("guarantee family membership",), _provenance(args), details
    )


def _cmd_entangle(args) -> Report:
    model = _load_model(args)
    instance = _instance(args, model)
    domain = _labels(args.domain) if args.domain is not None else None
    report = is_entangled(instance, domain=domain)
    return Report(
        (),
        report.entangled,
        ("entanglement condition",),
        _provenance(args),
        entanglement_payload(report),
    )


def _cmd_cap_exhaustive(args) -> Report:
    model = _load_model(args)
    instance = _instance(args, model)
    report = cap_verify_exhaustive(instance, exhaustive_bound=args.bound)
    return Report(
        (),
        report.verdict,
        ("exhaustive subset verification",),
        _provenance(args),
        cap_report_payload(report),
    )


def _cmd_cap_closure(args) -> Report:
    model = _load_model(args)
    instance = _instance(args, model)
    report = cap_verify_closure(instance, args.seed, cap=args.cap)
    return Report(
        (),
        report.verdict,
        ("closure verification",),
        _provenance(args),
        cap_report_payload(report),
    )


def _cmd_scenario_gen(args) -> Report:
    cfg, _, echo = _scenario_config(args, need_model=False)
    scenario = generate_scenario(cfg, args.cap)
    details = {
        "trace_count": len(scenario.traces),
        "behaviours": clipped(scenario.system.behaviours),
        "view_sizes": [
            len(scenario.view1_system.behaviours),
            len(scenario.view2_system.behaviours),
        ],
        "write_pairs": len(scenario.write_relation.pairs),
        "read_pairs": len(scenario.read_relation.pairs),
        "consistent": len(scenario.instance.consistent),
    }
    return Report(
        (),
        None,
        ("scenario generation",),
        _provenance(args, **echo),
        details,
    )


def _cmd_scenario_verify(args) -> Report:
    cfg, _, echo = _scenario_config(args, need_model=False)
    report = verify_scenario(cfg, args.cap)
    details = {
        "trace_count": report.trace_count,
        "witness_domain": clipped(report.witness_domain),
        "entanglement": entanglement_payload(report.entanglement),
        "fresh_witnesses": clipped(list(p) for p in report.fresh_witnesses),
        "missing_fresh": clipped(report.missing_fresh),
        "closure": cap_report_payload(report.closure),
        "forced_violation": report.forced_violation,
        "exhaustive": (
            cap_report_payload(report.exhaustive)
            if report.exhaustive is not None
            else None
        ),
        "notes": list(report.notes),
    }
    return Report(
        (),
        report.entangled,
        ("entanglement condition", "closure verification", "fresh-value analysis"),
        _provenance(args, **echo),
        details,
    )


def _cmd_timed_order(args) -> Report:
    model = _load_model(args)
    system = _system(model, args.system, args.cap)
    if args.observer not in model.ordered:
        raise ConfigurationError(
            f"no ordered component named {args.observer!r} in the model"
        )
    timed = timed_product(system, model.ordered[args.observer], args.cap)
    validation = validate_timed(timed)
    relation = derived_order(timed)
    index = {b: i for i, b in enumerate(system.behaviours)}
    pairs = sorted(relation.pairs, key=lambda p: (index[p[0]], index[p[1]]))
    details = {
        "system": system.name,
        "observer": args.observer,
        "valid": validation.valid,
        "failures": list(validation.failures),
        "pairs": clipped(list(p) for p in pairs),
        "minimal": list(minimal_behaviours(timed)),
        "reflexive": all((b, b) in relation.pairs for b in system.behaviours),
    }
    return Report(
        (),
        validation.valid,
        ("observer-induced order",),
        _provenance(args),
        details,
    )


def _cmd_fixtures(args) -> Report:
    root = resource_files("bsm.model_io") / "fixtures"
    rows = []
    all_ok = True
    copy_to = Path(args.copy_to) if args.copy_to else None
    if copy_to is not None:
        copy_to.mkdir(parents=True, exist_ok=True)
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".bsm"):
            continue
        data = entry.read_bytes()
        result = try_parse_model(data.decode("utf-8"))
        ok = result.model is not None
        all_ok = all_ok and ok
        rows.append(
            {
                "name": entry.name,
                "bytes": len(data),
                "sha256": hashlib.sha256(data).hexdigest()[:16],
                "parses": ok,
            }
        )
        if copy_to is not None:
            (copy_to / entry.name).write_bytes(data)
    details = {"fixtures": rows, "copied_to": args.copy_to}
    return Report(
        (), all_ok, ("fixture inventory",), _provenance(args, model_used=False), details
    )


# --------------------------------------------------------------- wiring


def _add_model(sub, required: bool = True):
    sub.add_argument("--model", required=required, help="path to a .bsm model file")


def _add_common(sub):
    sub.add_argument("--pretty", action="store_true", help="human-readable rendering")
    sub.add_argument(
        "--cap",
        type=int,
        default=None,
        help="cardinality cap override (also via BSM_CARDINALITY_CAP)",
    )


def _add_logic(sub):
    sub.add_argument("--valuation", default=None, help="valuation name (default: the only one)")
    sub.add_argument("--universe", default=None, help="universe name for structural connectives")


def _add_instance(sub):
    sub.add_argument("--view1", required=True, help="first view implementation name")
    sub.add_argument("--view2", required=True, help="second view implementation name")
    sub.add_argument("--strong", required=True, help="strong-availability relation name")
    sub.add_argument("--weak", required=True, help="weak-availability relation name")
    sub.add_argument(
        "--consistent", required=True, help="comma-separated acceptable behaviours"
    )


def _add_scenario(sub):
    _add_model(sub, required=False)
    sub.add_argument("--scenario", default=None, help="scenario name from the model")
    sub.add_argument("--timestamps", default=None, help="comma-separated exact rationals")
    sub.add_argument("--values", default=None, help="comma-separated value alphabet")
    sub.add_argument("--initial", default=None, help="initial value (default: first value)")
    sub.add_argument("--max-len", type=int, default=0, help="maximum trace length")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bsm",
        description="Behavioural system models: check, compose, evaluate, verify.",
    )
    commands = parser.add_subparsers(dest="subcommand", required=True)

    def command(name, handler, help_text):
        sub = commands.add_parser(name, help=help_text)
        sub.set_defaults(handler=handler)
        _add_common(sub)
        return sub

    sub = command("check-impl", _cmd_check_impl, "validate or search an implementation")
    _add_model(sub)
    sub.add_argument("--impl", default=None, help="declared implementation name")
    sub.add_argument("--source", default=None, help="source system (search mode)")
    sub.add_argument("--target", default=None, help="target system (search mode)")

    sub = command("compose", _cmd_compose, "build the canonical free composition")
    _add_model(sub)
    sub.add_argument("--left", required=True)
    sub.add_argument("--right", required=True)

    sub = command("check-free", _cmd_check_free, "is an environment a free composition?")
    _add_model(sub)
    sub.add_argument("--left-map", required=True, help="implementation onto the left part")
    sub.add_argument("--right-map", required=True, help="implementation onto the right part")

    sub = command("equiv", _cmd_equiv, "mutual implementation of two systems")
    _add_model(sub)
    sub.add_argument("--system", required=True)
    sub.add_argument("--system2", required=True)

    sub = command("eval", _cmd_eval, "evaluate a formula at a behaviour or everywhere")
    _add_model(sub)
    _add_logic(sub)
    sub.add_argument("--system", required=True)
    sub.add_argument("--formula", required=True)
    sub.add_argument("--behaviour", default=None)
    sub.add_argument("--all", action="store_true", help="check every behaviour")

    sub = command("valid", _cmd_valid, "is the formula valid in the system?")
    _add_model(sub)
    _add_logic(sub)
    sub.add_argument("--system", required=True)
    sub.add_argument("--formula", required=True)

    for name, handler, help_text in (
        ("rule-1", _cmd_rule_1, "interface constraint propagation"),
        ("rule-2", _cmd_rule_2, "constraint propagation with a boxed conclusion"),
    ):
        sub = command(name, handler, help_text)
        _add_model(sub)
        _add_logic(sub)
        sub.add_argument("--sigma", default=None, help="implementation onto the constraint system")
        sub.add_argument("--pi", default=None, help="implementation onto the conclusion system")
        sub.add_argument("--left", default=None, help="build both maps from this tensor factor")
        sub.add_argument("--right", default=None, help="second tensor factor")
        sub.add_argument("--alpha", required=True, help="interface constraint formula")
        sub.add_argument("--beta", required=True, help="conclusion formula")
        sub.add_argument("--audit", action="store_true", help="also evaluate the conclusion directly")

    sub = command("rule-3", _cmd_rule_3, "refute a formula in a composition")
    _add_model(sub)
    _add_logic(sub)
    sub.add_argument("--left", required=True)
    sub.add_argument("--right", required=True)
    sub.add_argument("--alpha", required=True)
    sub.add_argument("--beta", required=True)
    sub.add_argument("--audit", action="store_true")

    sub = command("frame", _cmd_frame, "attach a disjoint system to a valid formula")
    _add_model(sub)
    _add_logic(sub)
    sub.add_argument("--left", required=True, help="the attached system")
    sub.add_argument("--right", required=True, help="the system the formula holds in")
    sub.add_argument("--beta", required=True)
    sub.add_argument("--audit", action="store_true")

    sub = command("hm", _cmd_hm, "do two behaviours satisfy the same formulas?")
    _add_model(sub)
    sub.add_argument("--valuation", default=None)
    sub.add_argument("--system", required=True)
    sub.add_argument("--system2", required=True)
    sub.add_argument("--behaviour", required=True)
    sub.add_argument("--behaviour2", required=True)
    sub.add_argument("--flavour", choices=("boxed", "elementary"), default="boxed")

    sub = command("types", _cmd_types, "variable types of every behaviour")
    _add_model(sub)
    sub.add_argument("--valuation", default=None)
    sub.add_argument("--system", required=True)

    sub = command("guarantee", _cmd_guarantee, "family membership for a subset or image")
    _add_model(sub)
    sub.add_argument("--guarantee", required=True)
    sub.add_argument("--subset", default=None, help="comma-separated behaviours")
    sub.add_argument("--impl", default=None, help="check this implementation's image")

    sub = command("entangle", _cmd_entangle, "check the entanglement condition")
    _add_model(sub)
    _add_instance(sub)
    sub.add_argument("--domain", default=None, help="restrict to these behaviours")

    sub = command("cap-exhaustive", _cmd_cap_exhaustive, "scan all subsets for the three groups")
    _add_model(sub)
    _add_instance(sub)
    sub.add_argument("--bound", type=int, default=DEFAULT_EXHAUSTIVE_BOUND)

    sub = command("cap-closure", _cmd_cap_closure, "grow a seed along the completion rules")
    _add_model(sub)
    _add_instance(sub)
    sub.add_argument("--seed", required=True, help="behaviour to start from")

    sub = command("scenario-gen", _cmd_scenario_gen, "generate the trace scenario")
    _add_scenario(sub)

    sub = command("scenario-verify", _cmd_scenario_verify, "run the full scenario analysis")
    _add_scenario(sub)

    sub = command("timed-order", _cmd_timed_order, "order induced by an observer")
    _add_model(sub)
    sub.add_argument("--system", required=True)
    sub.add_argument("--observer", required=True, help="ordered component name")

    sub = command("fixtures", _cmd_fixtures, "list the shipped model fixtures")
    sub.add_argument("--copy-to", default=None, help="also copy them to this directory")

    return parser


_ERROR_CITATION = ("input validation",)


def cli_dispatch(argv, stream=None) -> int:
    """Run one command; print its report; return the exit code."""
    stream = stream if stream is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return code
    try:
        report = args.handler(args)
        report = Report(
            tuple(argv),
            report.verdict,
            report.citations,
            report.provenance,
            report.details,
            report.witnesses,
        )
    except _BadModel as err:
        report = Report(
            tuple(argv),
            None,
            _ERROR_CITATION,
            {"model": err.path},
            {
                "error": "the model file does not parse",
                "diagnostics": [
                    {"line": d.line, "column": d.column, "message": d.message}
                    for d in err.diagnostics
                ],
            },
        )
        print(to_pretty(report) if args.pretty else to_json(report), file=stream)
        return 2
    except ParseError as err:
        report = Report(
            tuple(argv),
            None,
            _ERROR_CITATION,
            {},
            {"error": str(err)},
        )
        print(to_pretty(report) if args.pretty else to_json(report), file=stream)
        return 2
    except ModelError as err:
        report = Report(
            tuple(argv),
            None,
            _ERROR_CITATION,
            {},
            {"error": str(err)},
        )
        print(to_pretty(report) if args.pretty else to_json(report), file=stream)
        return 2
    print(to_pretty(report) if args.pretty else to_json(report), file=stream)
    if report.verdict is None or report.verdict:
        return 0
    return 1


def main(argv=None) -> int:
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


def entry() -> None:
    raise SystemExit(main())
