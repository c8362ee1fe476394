"""Block parser for the model text format.

A model file is a sequence of named declarations. Each parses into the
owning module's objects, so every validation rule of those constructors
applies on load, and their errors surface as diagnostics with the
declaration's position. Parsing collects as many diagnostics as it can by
skipping to the next declaration after a failure; a model is returned only
when there are none.

Declarations must precede their uses. The blocks:

    component NAME { LABEL... } [order { LABEL <= LABEL ... }]
    system NAME over COMP, COMP { LABEL -> COMP: LABEL, ... }
    impl NAME : SYSTEM -> SYSTEM { LABEL -> LABEL ... }
    valuation NAME { COMP::VAR = { LABEL... } ... }
    formula NAME = FORMULA
    relation NAME on SYSTEM { LABEL -> LABEL ... }
    guarantee NAME = consistency SYSTEM { LABEL... }
                   | weak RELATION | strong RELATION
                   | partition IMPL IMPL
                   | family SYSTEM { { LABEL... } ... }
                   | all GUARANTEE...
    universe NAME { SYSTEM... }
    scenario NAME { timestamps: NUM, ...  values: LABEL, ...
                    initial: LABEL  max_length: NUM }

Labels are quoted strings, bare names, or number literals; list items may
be separated by commas, spaces, or newlines.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..cap_scenario import ScenarioConfig
from ..errors import ModelError, ParseError
from ..formulas import Formula
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
from ..kernel import (
    Component,
    ImplementationMap,
    ImplementationViolation,
    System,
    validate_implementation,
)
from ..logic import Universe, Valuation
from ..timed import OrderedComponent
from .formula_parser import parse_formula_tokens
from .lexer import Token, tokenize

KEYWORDS = (
    "component",
    "system",
    "impl",
    "valuation",
    "formula",
    "relation",
    "guarantee",
    "universe",
    "scenario",
)

_LABEL_KINDS = ("string", "ident", "number")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


@dataclass
class ModelFile:
    """All declarations of one model text, by kind and name.

    `ordered` holds the components that carry an order clause; those appear
    in `components` as well, as their underlying plain component. `order`
    records declaration order for serialization.
    """

    components: dict[str, Component] = field(default_factory=dict)
    ordered: dict[str, OrderedComponent] = field(default_factory=dict)
    systems: dict[str, System] = field(default_factory=dict)
    impls: dict[str, ImplementationMap] = field(default_factory=dict)
    valuations: dict[str, Valuation] = field(default_factory=dict)
    formulas: dict[str, Formula] = field(default_factory=dict)
    relations: dict[str, BehaviourRelation] = field(default_factory=dict)
    guarantees: dict[str, Guarantee] = field(default_factory=dict)
    universes: dict[str, Universe] = field(default_factory=dict)
    scenarios: dict[str, ScenarioConfig] = field(default_factory=dict)
    order: list[tuple[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class ParseResult:
    model: Optional[ModelFile]
    diagnostics: tuple[Diagnostic, ...]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.model = ModelFile()
        self.diagnostics: list[Diagnostic] = []

    # ------------------------------------------------------ token plumbing

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def skip_newlines(self) -> None:
        while self.peek().kind == "newline":
            self.pos += 1

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text if tok.kind not in ("newline", "eof") else "end of line"
            raise ParseError(f"expected {what} but found {found!r}", tok.line, tok.column)
        return self.take()

    def name(self, what: str) -> Token:
        return self.expect("ident", what)

    def keyword(self, word: str) -> None:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            raise ParseError(
                f"expected {word!r} but found {tok.text!r}", tok.line, tok.column
            )
        self.take()

    def label(self, what: str = "a label") -> str:
        tok = self.peek()
        if tok.kind not in _LABEL_KINDS:
            found = tok.text if tok.kind not in ("newline", "eof") else "end of line"
            raise ParseError(f"expected {what} but found {found!r}", tok.line, tok.column)
        return self.take().text

    def end_of_row(self) -> None:
        tok = self.peek()
        if tok.kind == "newline":
            self.take()
            return
        if tok.kind in ("}", "eof"):
            return
        raise ParseError(
            f"expected end of line but found {tok.text!r}", tok.line, tok.column
        )

    def labels_until_brace(self) -> list[str]:
        out = []
        while True:
            self.skip_newlines()
            tok = self.peek()
            if tok.kind == "}":
                return out
            if tok.kind == ",":
                self.take()
                continue
            out.append(self.label())

    # ------------------------------------------------------- registration

    def register(self, kind: str, name_tok: Token, table: dict, value) -> None:
        if name_tok.text in table:
            raise ParseError(
                f"duplicate {kind} name {name_tok.text!r}",
                name_tok.line,
                name_tok.column,
            )
        table[name_tok.text] = value
        self.model.order.append((kind, name_tok.text))

    def component_ref(self, tok: Token) -> Component:
        comp = self.model.components.get(tok.text)
        if comp is None:
            raise ParseError(f"unknown component {tok.text!r}", tok.line, tok.column)
        return comp

    def system_ref(self, tok: Token) -> System:
        system = self.model.systems.get(tok.text)
        if system is None:
            raise ParseError(f"unknown system {tok.text!r}", tok.line, tok.column)
        return system

    def impl_ref(self, tok: Token) -> ImplementationMap:
        impl = self.model.impls.get(tok.text)
        if impl is None:
            raise ParseError(
                f"unknown implementation {tok.text!r}", tok.line, tok.column
            )
        return impl

    def relation_ref(self, tok: Token) -> BehaviourRelation:
        rel = self.model.relations.get(tok.text)
        if rel is None:
            raise ParseError(f"unknown relation {tok.text!r}", tok.line, tok.column)
        return rel

    def guarantee_ref(self, tok: Token) -> Guarantee:
        g = self.model.guarantees.get(tok.text)
        if g is None:
            raise ParseError(f"unknown guarantee {tok.text!r}", tok.line, tok.column)
        return g

    # ------------------------------------------------------------- blocks

    def parse(self) -> None:
        while True:
            self.skip_newlines()
            tok = self.peek()
            if tok.kind == "eof":
                return
            if tok.kind != "ident" or tok.text not in KEYWORDS:
                self.diagnostics.append(
                    Diagnostic(
                        tok.line,
                        tok.column,
                        f"expected a declaration keyword, found {tok.text!r}",
                    )
                )
                self.recover()
                continue
            handler = getattr(self, "parse_" + tok.text)
            header = tok
            try:
                handler()
            except ParseError as err:
                self.diagnostics.append(
                    Diagnostic(err.line, err.column, err.message)
                )
                self.recover()
            except ModelError as err:
                self.diagnostics.append(Diagnostic(header.line, header.column, str(err)))
                self.recover()

    def recover(self) -> None:
        """Skip to the next plausible declaration start."""
        depth = 0
        at_line_start = False
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if (
                depth == 0
                and at_line_start
                and tok.kind == "ident"
                and tok.text in KEYWORDS
            ):
                return
            if tok.kind == "{":
                depth += 1
            elif tok.kind == "}":
                depth = max(0, depth - 1)
            at_line_start = tok.kind == "newline"
            self.take()

    def parse_component(self) -> None:
        self.keyword("component")
        name_tok = self.name("a component name")
        self.expect("{", "'{'")
        labels = self.labels_until_brace()
        self.expect("}", "'}'")
        comp = Component(name_tok.text, tuple(labels))
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "order":
            self.take()
            self.expect("{", "'{'")
            pairs = []
            while True:
                self.skip_newlines()
                if self.peek().kind == "}":
                    break
                low = self.label()
                self.expect("<=", "'<='")
                high = self.label()
                pairs.append((low, high))
                if self.peek().kind == ",":
                    self.take()
                else:
                    self.end_of_row()
            self.expect("}", "'}'")
            self.register("component", name_tok, self.model.components, comp)
            self.model.ordered[name_tok.text] = OrderedComponent.of(comp, pairs)
        else:
            self.register("component", name_tok, self.model.components, comp)
        self.end_of_row()

    def parse_system(self) -> None:
        self.keyword("system")
        name_tok = self.name("a system name")
        self.keyword("over")
        comps = []
        while True:
            comps.append(self.component_ref(self.name("a component name")))
            if self.peek().kind == ",":
                self.take()
                continue
            break
        self.expect("{", "'{'")
        table: dict[str, dict[str, str]] = {}
        while True:
            self.skip_newlines()
            if self.peek().kind == "}":
                break
            row_tok = self.peek()
            behaviour = self.label("a behaviour label")
            if behaviour in table:
                raise ParseError(
                    f"behaviour {behaviour!r} declared twice",
                    row_tok.line,
                    row_tok.column,
                )
            self.expect("->", "'->'")
            entries: dict[str, str] = {}
            while True:
                comp_tok = self.name("a component name")
                if comp_tok.text in entries:
                    raise ParseError(
                        f"component {comp_tok.text!r} assigned twice",
                        comp_tok.line,
                        comp_tok.column,
                    )
                self.expect(":", "':'")
                entries[comp_tok.text] = self.label()
                if self.peek().kind == ",":
                    self.take()
                    continue
                break
            table[behaviour] = entries
            self.end_of_row()
        self.expect("}", "'}'")
        self.end_of_row()
        system = System.from_table(name_tok.text, comps, table)
        self.register("system", name_tok, self.model.systems, system)

    def parse_impl(self) -> None:
        self.keyword("impl")
        name_tok = self.name("an implementation name")
        self.expect(":", "':'")
        source = self.system_ref(self.name("a system name"))
        self.expect("->", "'->'")
        target = self.system_ref(self.name("a system name"))
        self.expect("{", "'{'")
        mapping: dict[str, str] = {}
        while True:
            self.skip_newlines()
            if self.peek().kind == "}":
                break
            row_tok = self.peek()
            x = self.label("a behaviour label")
            if x in mapping:
                raise ParseError(
                    f"behaviour {x!r} mapped twice", row_tok.line, row_tok.column
                )
            self.expect("->", "'->'")
            mapping[x] = self.label()
            self.end_of_row()
        self.expect("}", "'}'")
        self.end_of_row()
        checked = validate_implementation(source, target, mapping)
        if isinstance(checked, ImplementationViolation):
            raise ParseError(checked.message, name_tok.line, name_tok.column)
        self.register("impl", name_tok, self.model.impls, checked)

    def parse_valuation(self) -> None:
        self.keyword("valuation")
        name_tok = self.name("a valuation name")
        self.expect("{", "'{'")
        entries: dict[tuple[str, str], frozenset[str]] = {}
        while True:
            self.skip_newlines()
            if self.peek().kind == "}":
                break
            comp_tok = self.name("a component name")
            self.expect("::", "'::'")
            var_tok = self.name("a variable name")
            key = (comp_tok.text, var_tok.text)
            if key in entries:
                raise ParseError(
                    f"variable {comp_tok.text}::{var_tok.text} declared twice",
                    comp_tok.line,
                    comp_tok.column,
                )
            self.expect("=", "'='")
            self.expect("{", "'{'")
            labels = self.labels_until_brace()
            self.expect("}", "'}'")
            entries[key] = frozenset(labels)
            self.end_of_row()
        self.expect("}", "'}'")
        self.end_of_row()
        self.register(
            "valuation", name_tok, self.model.valuations, Valuation.of(entries)
        )

    def parse_formula(self) -> None:
        self.keyword("formula")
        name_tok = self.name("a formula name")
        self.expect("=", "'='")
        formula, self.pos = parse_formula_tokens(self.tokens, self.pos)
        self.end_of_row()
        self.register("formula", name_tok, self.model.formulas, formula)

    def parse_relation(self) -> None:
        self.keyword("relation")
        name_tok = self.name("a relation name")
        self.keyword("on")
        carrier = self.system_ref(self.name("a system name"))
        self.expect("{", "'{'")
        pairs = []
        while True:
            self.skip_newlines()
            if self.peek().kind == "}":
                break
            a = self.label("a behaviour label")
            self.expect("->", "'->'")
            pairs.append((a, self.label()))
            self.end_of_row()
        self.expect("}", "'}'")
        self.end_of_row()
        relation = BehaviourRelation(carrier, frozenset(pairs))
        self.register("relation", name_tok, self.model.relations, relation)

    def parse_guarantee(self) -> None:
        self.keyword("guarantee")
        name_tok = self.name("a guarantee name")
        self.expect("=", "'='")
        shape_tok = self.name("a guarantee shape")
        shape = shape_tok.text
        if shape == "consistency":
            target = self.system_ref(self.name("a system name"))
            self.expect("{", "'{'")
            labels = self.labels_until_brace()
            self.expect("}", "'}'")
            value: Guarantee = Consistency(target, frozenset(labels))
        elif shape in ("weak", "strong"):
            relation = self.relation_ref(self.name("a relation name"))
            value = (
                WeakAvailability(relation)
                if shape == "weak"
                else StrongAvailability(relation)
            )
        elif shape == "partition":
            first = self.impl_ref(self.name("an implementation name"))
            second = self.impl_ref(self.name("an implementation name"))
            value = PartitionTolerance(first, second)
        elif shape == "family":
            target = self.system_ref(self.name("a system name"))
            self.expect("{", "'{'")
            subsets = []
            while True:
                self.skip_newlines()
                tok = self.peek()
                if tok.kind == "}":
                    break
                if tok.kind == ",":
                    self.take()
                    continue
                self.expect("{", "'{' opening a subset")
                subsets.append(frozenset(self.labels_until_brace()))
                self.expect("}", "'}'")
            self.expect("}", "'}'")
            value = ExplicitFamily(target, frozenset(subsets))
        elif shape == "all":
            parts = [self.guarantee_ref(self.name("a guarantee name"))]
            while self.peek().kind in ("ident", ","):
                if self.peek().kind == ",":
                    self.take()
                    continue
                parts.append(self.guarantee_ref(self.take()))
            value = Conjunction(tuple(parts))
        else:
            raise ParseError(
                "expected one of consistency, weak, strong, partition, family, all; "
                f"found {shape!r}",
                shape_tok.line,
                shape_tok.column,
            )
        self.end_of_row()
        self.register("guarantee", name_tok, self.model.guarantees, value)

    def parse_universe(self) -> None:
        self.keyword("universe")
        name_tok = self.name("a universe name")
        self.expect("{", "'{'")
        members = []
        while True:
            self.skip_newlines()
            tok = self.peek()
            if tok.kind == "}":
                break
            if tok.kind == ",":
                self.take()
                continue
            members.append(self.system_ref(self.name("a system name")))
        self.expect("}", "'}'")
        self.end_of_row()
        self.register(
            "universe", name_tok, self.model.universes, Universe.of(members)
        )

    def parse_scenario(self) -> None:
        self.keyword("scenario")
        name_tok = self.name("a scenario name")
        self.expect("{", "'{'")
        seen: dict[str, object] = {}
        while True:
            self.skip_newlines()
            if self.peek().kind == "}":
                break
            key_tok = self.name("a scenario field")
            key = key_tok.text
            if key in seen:
                raise ParseError(
                    f"field {key!r} given twice", key_tok.line, key_tok.column
                )
            self.expect(":", "':'")
            if key == "timestamps":
                stamps = []
                while self.peek().kind in ("number", ","):
                    if self.peek().kind == ",":
                        self.take()
                        continue
                    stamps.append(Fraction(self.take().text))
                seen[key] = tuple(stamps)
            elif key == "values":
                labels = []
                while self.peek().kind in _LABEL_KINDS + (",",):
                    if self.peek().kind == ",":
                        self.take()
                        continue
                    labels.append(self.label())
                seen[key] = tuple(labels)
            elif key == "initial":
                seen[key] = self.label()
            elif key == "max_length":
                num_tok = self.expect("number", "an integer")
                if not num_tok.text.isdigit():
                    raise ParseError(
                        "max_length must be an integer", num_tok.line, num_tok.column
                    )
                seen[key] = int(num_tok.text)
            else:
                raise ParseError(
                    "expected one of timestamps, values, initial, max_length; "
                    f"found {key!r}",
                    key_tok.line,
                    key_tok.column,
                )
            self.end_of_row()
        self.expect("}", "'}'")
        self.end_of_row()
        missing = [
            k for k in ("timestamps", "values", "initial", "max_length") if k not in seen
        ]
        if missing:
            raise ParseError(
                f"scenario {name_tok.text!r} is missing {', '.join(missing)}",
                name_tok.line,
                name_tok.column,
            )
        config = ScenarioConfig(
            seen["timestamps"], seen["values"], seen["initial"], seen["max_length"]
        )
        self.register("scenario", name_tok, self.model.scenarios, config)


def try_parse_model(text: str) -> ParseResult:
    """Parse, collecting diagnostics; the model is present only when clean."""
    try:
        tokens = tokenize(text)
    except ParseError as err:
        return ParseResult(None, (Diagnostic(err.line, err.column, err.message),))
    parser = _Parser(tokens)
    parser.parse()
    if parser.diagnostics:
        return ParseResult(None, tuple(parser.diagnostics))
    return ParseResult(parser.model, ())


def parse_model(text: str) -> ModelFile:
    """Parse a model text, raising on the first problem found."""
    result = try_parse_model(text)
    if result.model is None:
        first = result.diagnostics[0]
        raise ParseError(first.message, first.line, first.column)
    return result.model
