"""Count Wicks forms: rooted trivalent patterns against the closed formula,
and classes up to rotation, inversion and relabelling."""

import argparse
import time

from quadgroup.genus import enumerate_wicks_forms, generate_wicks_forms, rooted_form_count


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-genus", type=int, default=2)
    ap.add_argument("--expensive", action="store_true", help="allow genus 3 (takes minutes)")
    a = ap.parse_args()
    top = min(a.max_genus, 3 if a.expensive else 2)
    print(f"{'g':>2}{'rooted':>10}{'formula':>10}{'classes':>9}{'seconds':>9}")
    for g in range(1, top + 1):
        t0 = time.perf_counter()
        forms, rooted = generate_wicks_forms(g)
        dt = time.perf_counter() - t0
        print(f"{g:>2}{rooted:>10}{rooted_form_count(g):>10}{len(forms):>9}{dt:>9.2f}")
        assert len(enumerate_wicks_forms(g, expensive=a.expensive, use_cache=False)) == len(forms)


if __name__ == "__main__":
    main()
