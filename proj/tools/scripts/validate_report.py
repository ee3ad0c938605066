#!/usr/bin/env python3
"""Validate maskcg compile reports against schema/report.schema.json.

Each report is also re-serialized and parsed again, and must compare equal.
"""

import argparse
import json
import pathlib
import sys

import jsonschema

DEFAULT_SCHEMA = pathlib.Path(__file__).resolve().parents[2] / "schema" / "report.schema.json"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("reports", nargs="+", type=pathlib.Path)
    ap.add_argument("--schema", type=pathlib.Path, default=DEFAULT_SCHEMA)
    args = ap.parse_args()

    schema = json.loads(args.schema.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    failed = 0
    for path in args.reports:
        report = json.loads(path.read_text())
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        if json.loads(json.dumps(report)) != report:
            print(f"{path}: does not round-trip")
            failed += 1
        for err in errors:
            where = "/".join(str(p) for p in err.path) or "<root>"
            print(f"{path}: {where}: {err.message}")
        if errors:
            failed += 1
        else:
            print(f"{path}: ok")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
