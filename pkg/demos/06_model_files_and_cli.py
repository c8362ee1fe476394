"""Walkthrough: the text model format and the command line.

Models live in .bsm files: components, systems, implementation maps,
valuations, formulas, relations, guarantees, universes, and scenario
configurations, all declared before use. Parsing collects diagnostics with
line and column; serializing a parsed model and parsing it again is a fixed
point. The CLI reads a model, runs one check, and emits one canonical JSON
report per run, so identical inputs give byte-identical output.

Run: python3 demos/06_model_files_and_cli.py
"""
from importlib.resources import files as resource_files
from io import StringIO

from bsm.model_io import cli_dispatch, parse_model, serialize_model, try_parse_model


def run_cli(*argv):
    stream = StringIO()
    code = cli_dispatch(list(argv), stream)
    return code, stream.getvalue()


def main():
    fixture_dir = resource_files("bsm.model_io") / "fixtures"
    temp = fixture_dir / "temp.bsm"
    text = temp.read_text(encoding="utf-8")

    print("== parsing a model file ==")
    model = parse_model(text)
    print(f"  components: {sorted(model.components)}")
    print(f"  systems:    {sorted(model.systems)}")
    print(f"  valuations: {sorted(model.valuations)}, formulas: {sorted(model.formulas)}")
    again = parse_model(serialize_model(model))
    print(f"  serialize/parse round-trip preserves the model: {again == model}")

    print("\n== diagnostics instead of exceptions ==")
    broken = 'system f over nosuch { "w" -> nosuch: "v" }\ncomponent c { "v" }\n'
    result = try_parse_model(broken)
    for diag in result.diagnostics:
        print(f"  line {diag.line}, column {diag.column}: {diag.message}")
    print(f"  model produced: {result.model is not None} (second line was still checked)")

    print("\n== one JSON report per CLI run ==")
    code, out = run_cli(
        "eval", "--model", str(temp), "--system", "g⊗h",
        "--formula", "d::p_d", "--all",
    )
    print(f"  eval exit code {code}; report: {out[:120]}...")

    code, out = run_cli(
        "rule-1", "--model", str(temp), "--left", "g", "--right", "h",
        "--alpha", "p_c", "--beta", "p_d", "--valuation", "V",
    )
    print(f"  rule-1 exit code {code}")

    code, out = run_cli(
        "eval", "--model", str(temp), "--system", "g",
        "--formula", "c::freezing", "--all",
    )
    print(f"  a false verdict exits 1: exit code {code}")

    code, out = run_cli("eval", "--model", str(temp), "--system", "nosuch",
                        "--formula", "c::freezing", "--all")
    print(f"  a usage problem exits 2: exit code {code}")

    first = run_cli("fixtures")
    second = run_cli("fixtures")
    print(f"\n  repeated runs byte-identical: {first == second}")
    print("  (--pretty renders the same payload as indented lines)")


if __name__ == "__main__":
    main()
