#!/usr/bin/env python3
"""Validate JSON configs against docs/config_schema.json."""

import json
import sys
from pathlib import Path

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(77)

schema_path, *configs = sys.argv[1:]
schema = json.loads(Path(schema_path).read_text())
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)
bad = 0
for path in configs:
    errors = sorted(validator.iter_errors(json.loads(Path(path).read_text())), key=str)
    for e in errors:
        print(f"{path}: {'/'.join(map(str, e.path)) or '<root>'}: {e.message}")
    bad += bool(errors)
    if not errors:
        print(f"{path}: ok")
sys.exit(1 if bad else 0)
