"""Run every verification suite and print one line each; optional JSON dump."""

import argparse
import json
import sys

from quadgroup.suites import DEFAULT_SEED, SUITES, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("suites", nargs="*", help=f"subset of: {', '.join(SUITES)}")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--json", help="write results here")
    a = ap.parse_args()
    names = a.suites or list(SUITES)
    results = []
    for name in names:
        res = run_suite(name, seed=a.seed)
        print(f"{res.summary()} ({res.seconds:.1f}s)", flush=True)
        results.append(dict(res.to_json(), seconds=round(res.seconds, 2)))
    if a.json:
        with open(a.json, "w") as fh:
            json.dump(results, fh, indent=2)
    return 0 if all(r["passed"] for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
