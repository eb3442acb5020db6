"""The ten acceptance criteria, each run at full size with its time limit.

Every test records one PASS/FAIL line; the lines are printed in the terminal
summary (see conftest.py), or directly when this file is run as a script.
"""

import pytest

from quadgroup.suites import DEFAULT_SEED, run_suite
from quadgroup.words import count_words

RESULTS: list[str] = []


def _extra_torus(r):
    return r.details["budget"] == 100_000


def _extra_genus2(r):
    return all(r.details[name]["sampled"] >= 200 for name in ("Z2*Z3", "F2")) and r.details["budget"] == 1_000_000


def _extra_roundtrip(r):
    return r.details["twists"] == 1000


def _extra_endo(r):
    images = sum(count_words(2, n) for n in range(5))
    return r.details["endomorphisms"] == images**2 and r.details["hits"] == 0


# (criterion, suite, time limit in seconds, extra check on the result)
CRITERIA = [
    (1, "wicks-oracle", 300, None),
    (2, "canonical-roundtrip", 300, _extra_roundtrip),
    (3, "thm33-torus", 120, _extra_torus),
    (4, "thm33-genus2", 600, _extra_genus2),
    (5, "genus-growth", 900, lambda r: r.details["values"] == [1, 2, 2, 3]),
    (6, "orbit-6-1-2", 600, None),
    (7, "cor-6-8", 600, _extra_endo),
    (8, "product-axioms", 60, None),
    (9, "klein-4-8", 300, None),
    (10, "invariants", 300, lambda r: r.cases == 10_000),
]


def check(number, suite, limit, extra):
    res = run_suite(suite, seed=DEFAULT_SEED)
    problems = []
    if not res.passed:
        problems.append(res.counterexample or "no cases")
    if res.seconds > limit:
        problems.append(f"took {res.seconds:.0f}s, limit {limit}s")
    if extra is not None and not extra(res):
        problems.append(f"size or outcome check failed: {res.details}")
    state = "FAIL" if problems else "PASS"
    line = f"{state} criterion {number:2d} [{suite}] {res.cases} cases in {res.seconds:.1f}s"
    if problems:
        line += " -- " + "; ".join(problems)
    return not problems, line


@pytest.mark.slow
@pytest.mark.parametrize("number,suite,limit,extra", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, suite, limit, extra):
    ok, line = check(number, suite, limit, extra)
    RESULTS.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    for c in CRITERIA:
        print(check(*c)[1], flush=True)
