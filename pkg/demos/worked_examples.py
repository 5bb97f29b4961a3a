"""Run the CLI over the bundled instances and print one line per run.

Usage: python demos/worked_examples.py
"""
import json
import subprocess
import sys
import time
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
EXIT = {0: "YES", 1: "NO", 2: "UNKNOWN", 3: "input error", 4: "resource limit"}

RUNS = [
    ("detect", "conic.inst"),
    ("detect", "cosets_orbit.inst"),
    ("detect", "cosets_group.inst"),
    ("detect", "cosets_group.inst", "--s", "2"),
    ("detect", "cyclic2x2.inst"),
    ("detect", "unipotent4.inst"),
    ("verify", "conic.inst", "conic_reference_cert.json", "--N", "8"),
    ("verify", "unipotent4.inst", "unipotent4_reference_cert.json"),
    ("lattice", "cosets_group.inst"),
]


def summary(cmd, out):
    if cmd == "lattice":
        return f"divisors {out['divisors']}, minimal s {out['minimal_s']}"
    if cmd == "verify":
        return "all checks passed" if out["ok"] else f"failed: {out['failed']}"
    if "M" in out:
        v = out.get("v")
        return f"M = {out['M'][0]}" + (f", v = {v}" if v else "")
    return out.get("reason", "")


def main():
    for cmd, *rest in RUNS:
        args = [a if a.startswith("--") or a.isdigit() else str(DATA / a) for a in rest]
        t0 = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "orbitclosure", cmd, *args], capture_output=True, text=True)
        dt = time.perf_counter() - t0
        out = json.loads(proc.stdout)
        label = " ".join([cmd] + rest)
        print(f"{label:<58} {EXIT[proc.returncode]:<8} {dt:5.1f}s  {summary(cmd, out)}")


if __name__ == "__main__":
    main()
