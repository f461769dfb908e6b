"""
The full command pipeline, end to end
=====================================

synth writes a raw fixture; ingest normalizes it into a checksummed
archive; every later command reads only that archive (plus indicator
tables). Run twice with the same seed and every output byte matches.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def run(*args):
    cmd = [sys.executable, "-m", "flowplex", *args]
    print("$ flowplex " + " ".join(args))
    out = subprocess.run(cmd, capture_output=True, text=True, check=True)
    print("  " + out.stdout.strip())


with tempfile.TemporaryDirectory() as td:
    root = Path(td)
    fx = root / "fixture"
    out = root / "run"

    run("synth", "--n", "40", "--seed", "11", "--out", str(fx))
    run("ingest",
        "--layers", str(fx / "layers.csv"),
        "--manifest", str(fx / "manifest.json"),
        "--population", str(fx / "population.csv"),
        "--out", str(out))

    archive = str(out / "multiplex.json")
    run("metrics", "--archive", archive, "--out", str(out))
    run("compare", "--archive", archive, "--out", str(out))
    run("correlate", "--archive", archive,
        "--indicators", str(fx / "indicators.csv"), "--out", str(out))
    run("communities", "--archive", archive, "--seed", "0", "--out", str(out))
    run("similarity", "--archive", archive,
        "--indicators", str(fx / "indicators.csv"),
        "--seed", "0", "--out", str(out))
    run("report", "--out", str(out))

    report = json.loads((out / "report.json").read_text())
    print(f"\nreport covers {report['artifact_count']} artifacts; "
          "each carries its own sha256 and sidecar metadata:")
    for name, entry in list(report["artifacts"].items())[:5]:
        print(f"  {name:<28} {entry['sha256'][:16]}...")
    print("  ...")
