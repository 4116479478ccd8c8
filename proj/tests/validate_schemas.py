"""Runs the CLI over a spread of inputs and validates every JSON document
against the schemas in schemas/."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

WORKED = ["--a-im", "0.70710678118654752", "--b-re", "0.5", "--b-im", "0.5"]
PLUS = ["--a-re", "0.70710678118654752", "--b-re", "0.70710678118654752"]
BASIS = ["--a-re", "1"]
POLAR = ["--theta", "1.1", "--phase", "0.7"]

CASES = [
    ("analysis", ["analyze", *WORKED]),
    ("analysis", ["analyze", *BASIS, "--depth", "0"]),
    ("analysis", ["analyze", *POLAR, "--strategy", "abandon", "--copies", "3"]),
    ("tree", ["tree", *WORKED, "--max-resets", "3"]),
    ("tree", ["tree", *PLUS, "--max-resets", "4", "--copies", "3"]),
    ("tree", ["tree", *POLAR, "--strategy", "abandon", "--max-resets", "2"]),
    ("tree", ["tree", *PLUS, "--strategy", "conventional"]),
    ("trial_stats", ["simulate", *WORKED, "--trials", "2000", "--seed", "1", "--trace", "20"]),
    ("trial_stats", ["simulate", *PLUS, "--strategy", "abandon", "--max-resets", "2",
                     "--copies", "2", "--trials", "2000", "--seed", "2", "--trace", "20"]),
    ("trial_stats", ["simulate", *BASIS, "--max-resets", "20", "--trials", "500", "--seed", "3"]),
    ("trial_stats", ["simulate", *POLAR, "--strategy", "conventional", "--trials", "500",
                     "--seed", "4", "--trace", "5"]),
    ("bias", ["bias", *WORKED, "--trials", "2000", "--seed", "5"]),
    ("bias", ["bias", *BASIS, "--max-resets", "0", "--trials", "100", "--seed", "6"]),
    ("verify", ["verify", "--trials", "2000"]),
]


def main() -> int:
    binary = sys.argv[1]
    schema_dir = pathlib.Path(__file__).resolve().parent.parent / "schemas"
    schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(s)) for name, s in schemas.items())
    for s in schemas.values():
        jsonschema.Draft202012Validator.check_schema(s)

    failures = 0
    # The schemas must reject a document with an unknown field or a bad value.
    sample = json.loads(subprocess.run([binary, "analyze", *PLUS], capture_output=True,
                                       text=True, check=True).stdout)
    analysis = jsonschema.Draft202012Validator(schemas["analysis.schema.json"], registry=registry)
    for bad in ({**sample, "extra": 1}, {**sample, "one_bit_prob": 1.5}):
        if analysis.is_valid(bad):
            print("FAIL schema accepted a malformed analysis document")
            failures += 1

    for kind, args in CASES:
        proc = subprocess.run([binary, *args], capture_output=True, text=True, check=False)
        label = " ".join(args)
        if proc.returncode != 0:
            print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        validator = jsonschema.Draft202012Validator(
            schemas[f"{kind}.schema.json"], registry=registry)
        errors = list(validator.iter_errors(json.loads(proc.stdout)))
        for e in errors[:5]:
            print(f"FAIL {label}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
        failures += bool(errors)
        if not errors:
            print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
