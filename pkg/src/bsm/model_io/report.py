"""Structured command reports.

One report per command invocation, serialized as a single JSON document
with sorted keys and canonical list orders, so identical inputs give
byte-identical bytes. The pretty rendering is derived from the same payload
after serialization, never from extra state.
"""
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..guarantees import CapReport, EntanglementReport
from ..logic import RuleOutcome

# long derived lists are cut at this many entries, with an omitted count
LIST_LIMIT = 25


@dataclass(frozen=True)
class Report:
    """What one command did and found.

    `verdict` is the decided claim (None when the command only builds or
    lists), `citations` name the operations whose contracts justify it,
    `provenance` records the inputs the result depends on, and `details`
    and `witnesses` carry command-specific evidence.
    """

    command: tuple[str, ...]
    verdict: Optional[bool]
    citations: tuple[str, ...]
    provenance: dict
    details: dict
    witnesses: tuple = ()


def plain(value):
    """Recursively convert a value into JSON-encodable structure."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (frozenset, set)):
        return sorted(plain(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    return value


def clipped(values) -> dict:
    """A list payload with a deterministic size cut."""
    items = list(values)
    shown = [plain(v) for v in items[:LIST_LIMIT]]
    return {"shown": shown, "total": len(items)}


def entanglement_payload(report: EntanglementReport) -> dict:
    failures = [w for w in report.witnesses if not w.ok]
    return {
        "entangled": report.entangled,
        "domain_size": report.domain_size,
        "restricted_domain": report.restricted,
        "passed": sum(1 for w in report.witnesses if w.ok),
        "failed": clipped(
            {"behaviour": w.behaviour, "first_defeat": plain(w.failure)}
            for w in failures
        ),
        "chosen": clipped(
            {"behaviour": w.behaviour, "successor": w.chosen}
            for w in report.witnesses
            if w.ok and w.chosen is not None
        ),
    }


def cap_report_payload(report: CapReport) -> dict:
    payload = {
        "mode": report.mode,
        "verdict": report.verdict,
        "subsets": clipped(
            {"subset": list(w.subset), "violated": w.violated}
            for w in report.witnesses
        ),
        "violation_counts": {group: n for group, n in report.violation_counts},
        "entangled": report.entangled,
        "notes": list(report.notes),
    }
    if report.mode == "closure":
        payload["closure"] = clipped(report.closure)
        payload["closure_log"] = clipped(
            {"behaviour": s.behaviour, "reason": s.reason} for s in report.closure_log
        )
    return payload


def rule_outcome_payload(outcome: RuleOutcome) -> dict:
    return {
        "rule": outcome.rule,
        "certified": outcome.certified,
        "conclusion": {
            "claim": outcome.conclusion.claim,
            "system": outcome.conclusion.system.name,
            "formula": str(outcome.conclusion.formula),
        },
        "premise_failures": list(outcome.premise_failures),
        "audit": outcome.audit,
    }


def report_payload(report: Report) -> dict:
    return {
        "command": list(report.command),
        "verdict": report.verdict,
        "citations": list(report.citations),
        "provenance": plain(report.provenance),
        "details": plain(report.details),
        "witnesses": plain(list(report.witnesses)),
    }


def to_json(report: Report) -> str:
    return json.dumps(
        report_payload(report), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )


def _pretty_lines(value, indent: int) -> list:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key in sorted(value):
            inner = value[key]
            if isinstance(inner, (dict, list)) and inner:
                lines.append(f"{pad}{key}:")
                lines.extend(_pretty_lines(inner, indent + 1))
            else:
                lines.append(f"{pad}{key}: {json.dumps(inner, ensure_ascii=False)}")
        return lines
    if isinstance(value, list):
        lines = []
        for inner in value:
            if isinstance(inner, (dict, list)) and inner:
                lines.append(f"{pad}-")
                lines.extend(_pretty_lines(inner, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(inner, ensure_ascii=False)}")
        return lines
    return [f"{pad}{json.dumps(value, ensure_ascii=False)}"]


def to_pretty(report: Report) -> str:
    """Human rendering, computed from the serialized payload."""
    payload = json.loads(to_json(report))
    ordered = ["command", "verdict", "citations", "provenance", "details", "witnesses"]
    lines = []
    for key in ordered:
        value = payload[key]
        if isinstance(value, (dict, list)) and value:
            lines.append(f"{key}:")
            lines.extend(_pretty_lines(value, 1))
        else:
            lines.append(f"{key}: {json.dumps(value, ensure_ascii=False)}")
    return "\n".join(lines)
