#!/usr/bin/env python3
"""Validate lcdg output files against the schemas in this directory.

    python3 schemas/validate.py out/spectrum.json out/classes.csv ...

JSON files are matched to `<command>.schema.json` through their manifest.
CSV files are checked row by row against `<command>-row.schema.json`
(or `sweep.schema.json`), after the `# manifest:` line is checked against
`manifest.schema.json` and its checksum recomputed over the body.
"""

import csv
import hashlib
import io
import json
import sys
from pathlib import Path

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

HERE = Path(__file__).resolve().parent


def registry():
    resources = []
    for path in HERE.glob("*.schema.json"):
        schema = json.loads(path.read_text())
        resources.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(resources)


REGISTRY = registry()


def validator(name):
    schema = json.loads((HERE / name).read_text())
    return Draft202012Validator(schema, registry=REGISTRY)


def errors_of(v, instance):
    return [f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}" for e in v.iter_errors(instance)]


def check_json(text):
    doc = json.loads(text)
    command = doc.get("manifest", {}).get("command")
    if command is None:
        return ["missing manifest.command"]
    errs = errors_of(validator(f"{command}.schema.json"), doc)
    body = json.dumps(doc["result"], separators=(",", ":"), ensure_ascii=False)
    if hashlib.sha256(body.encode()).hexdigest() != doc["manifest"].get("output_checksum"):
        errs.append("output_checksum does not match result")
    return errs


def check_csv(text):
    head, _, body = text.partition("\n")
    if not head.startswith("# manifest: "):
        return ["first line is not a manifest"]
    manifest = json.loads(head[len("# manifest: "):])
    errs = errors_of(validator("manifest.schema.json"), manifest)
    if hashlib.sha256(body.encode()).hexdigest() != manifest.get("output_checksum"):
        errs.append("output_checksum does not match body")
    command = manifest.get("command")
    row_schema = "sweep.schema.json" if command == "sweep" else f"{command}-row.schema.json"
    v = validator(row_schema)
    for i, row in enumerate(csv.DictReader(io.StringIO(body))):
        errs += [f"row {i}: {e}" for e in errors_of(v, row)]
    return errs


def main(paths):
    failed = False
    for p in map(Path, paths):
        text = p.read_text()
        errs = check_csv(text) if p.suffix == ".csv" else check_json(text)
        for e in errs:
            print(f"{p}: {e}")
        failed |= bool(errs)
        if not errs:
            print(f"{p}: ok")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
