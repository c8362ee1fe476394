"""Model files, reports, and the command-line interface.

The text format declares components, systems, implementations, valuations,
formulas, relations, guarantees, universes, and scenario configurations in
one file; parsing resolves cross-references and validates every declaration
through the owning module. Serialization is a parse fixed point, and every
command's report serializes to canonical JSON so identical inputs give
byte-identical output.
"""
from .cli import build_parser, cli_dispatch, entry, main
from .formula_parser import parse_formula
from .lexer import Token, tokenize
from .parser import Diagnostic, ModelFile, ParseResult, parse_model, try_parse_model
from .report import (
    LIST_LIMIT,
    Report,
    cap_report_payload,
    clipped,
    entanglement_payload,
    plain,
    report_payload,
    rule_outcome_payload,
    to_json,
    to_pretty,
)
from .serializer import serialize_model

__all__ = [
    "Diagnostic",
    "LIST_LIMIT",
    "ModelFile",
    "ParseResult",
    "Report",
    "Token",
    "build_parser",
    "cap_report_payload",
    "cli_dispatch",
    "clipped",
    "entanglement_payload",
    "entry",
    "main",
    "parse_formula",
    "parse_model",
    "plain",
    "report_payload",
    "rule_outcome_payload",
    "serialize_model",
    "to_json",
    "to_pretty",
    "tokenize",
    "try_parse_model",
]
