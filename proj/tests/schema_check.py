"""Runs every benchmark through the CLI and checks each report against
schema/report.schema.json with the jsonschema package."""

import copy
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

CONFIGS = {
    "clifford": {"clifford": {"N": 2, "depths": [2, 6], "circuits": [20, 20], "shots": 5000,
                              "mk": {"k_max": 2, "trials": 20}, "bias": {}}},
    "ghz": {"ghz": {"n_limit": 6}},
    "tfim": {"tfim": {"t_start": 1, "t_limit": 1, "eps0_steps": 1}},
    "qnn": {"qnn": {"Lay": 1, "epochs": 2, "restarts": 1, "n_max": 2,
                    "datasets": [{"generator": "sphere", "n": 40, "seed": 3}]}},
}


def main():
    cli, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for bench, cfg in CONFIGS.items():
            cfg_path = os.path.join(tmp, bench + ".json")
            out_path = os.path.join(tmp, bench + "_report.json")
            with open(cfg_path, "w") as f:
                json.dump(cfg, f)
            rc = subprocess.run([cli, bench, "--config", cfg_path, "--seed", "11", "--out", out_path]).returncode
            if rc != 0:
                print(f"{bench}: cli exited with {rc}")
                failures += 1
                continue
            with open(out_path) as f:
                report = json.load(f)
            errs = list(validator.iter_errors(report))
            for e in errs:
                print(f"{bench}: {list(e.path)}: {e.message}")
            failures += bool(errs)
            # a report missing its metric must be rejected by both validators
            broken = copy.deepcopy(report)
            del broken["metric"]
            if validator.is_valid(broken):
                print(f"{bench}: schema accepted a report without metric")
                failures += 1
            broken_path = os.path.join(tmp, bench + "_broken.json")
            with open(broken_path, "w") as f:
                json.dump(broken, f)
            rc = subprocess.run([cli, "validate-report", broken_path], capture_output=True).returncode
            if rc != 2:
                print(f"{bench}: validate-report returned {rc} for a report without metric")
                failures += 1
            print(f"{bench}: {'ok' if not errs else 'schema errors'}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
