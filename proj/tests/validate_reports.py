#!/usr/bin/env python3
"""Run `topdown check --json` on every sample and validate the reports.

usage: validate_reports.py TOPDOWN SCHEMA DATA_DIR
"""
import json
import pathlib
import subprocess
import sys

import jsonschema


def main():
    binary, schema_path, data_dir = sys.argv[1:4]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    files = sorted(pathlib.Path(data_dir).glob("*.dba"))
    if not files:
        print(f"no .dba files in {data_dir}")
        return 1
    for path in files:
        for extra in ([], ["--verify", "--oracle-bound", "5"]):
            runs = [subprocess.run([binary, "check", str(path), "--json", *extra], capture_output=True, text=True)
                    for _ in range(2)]
            first = runs[0]
            label = " ".join([path.name, *extra])
            if first.returncode not in (0, 1):
                print(f"FAIL {label}: exit {first.returncode}: {first.stderr.strip()}")
                failures += 1
                continue
            if any(r.returncode != first.returncode or r.stdout != first.stdout for r in runs[1:]):
                print(f"FAIL {label}: output or exit code differs between runs")
                failures += 1
                continue
            report = json.loads(first.stdout)
            errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
            if errors:
                for e in errors:
                    print(f"FAIL {label}: {'/'.join(map(str, e.path))}: {e.message}")
                failures += 1
                continue
            if (first.returncode == 0) != report["answer"]:
                print(f"FAIL {label}: exit {first.returncode} but answer {report['answer']}")
                failures += 1
                continue
            print(f"ok   {label}: answer {str(report['answer']).lower()}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
