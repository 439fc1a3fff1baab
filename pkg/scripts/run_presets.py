"""Run every canned experiment and print its band checks.

Usage: python3 scripts/run_presets.py [preset ...] [--out-dir DIR]
"""
import argparse
import json
import pathlib
import time

from torusppc.experiments import PRESET_IDS, run_preset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("presets", nargs="*", default=list(PRESET_IDS))
    ap.add_argument("--out-dir", type=pathlib.Path)
    args = ap.parse_args()
    failed = 0
    for pid in args.presets:
        t0 = time.perf_counter()
        preset, results, checks = run_preset(pid)
        print(f"== {pid}: {preset.description} ({time.perf_counter() - t0:.1f}s)")
        for c in checks:
            print(f"  {'PASS' if c.passed else 'FAIL'} {c.label}: {c.detail}")
            failed += not c.passed
        if args.out_dir:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            doc = {"preset": pid, "experiments": [r.to_dict() for r in results]}
            (args.out_dir / f"{pid}.json").write_text(json.dumps(doc, sort_keys=True, indent=1))
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
