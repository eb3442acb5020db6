"""Pinch defect of random surface-group homomorphisms.

Builds seeded random homs from elementary pieces scrambled by random moves,
reduces each one, and tallies the defect against the source genus.  Every
decomposition is checked to recompose before it is counted.
"""

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from quadgroup.product import verify_decomposition
from quadgroup.suites import DEFAULT_SEED, random_hom
from quadgroup.surface import SurfacePiece, genus_reduce


@dataclass
class DefectConfig:
    samples: int = 500
    seed: int = DEFAULT_SEED
    budget: int = 20_000


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=DefectConfig.samples)
    ap.add_argument("--seed", type=int, default=DefectConfig.seed)
    ap.add_argument("--budget", type=int, default=DefectConfig.budget)
    cfg = DefectConfig(**vars(ap.parse_args()))

    rng = random.Random(cfg.seed)
    table: Counter = Counter()
    leftover = 0
    for _ in range(cfg.samples):
        hom = random_hom(rng)
        dec = genus_reduce(hom, cfg.budget)
        if not verify_decomposition(hom, dec).passed:
            raise SystemExit(f"verification failed for {hom}")
        kind = "orientable" if hom.spec.orientable else "non-orientable"
        table[(kind, hom.spec.genus, dec.defect)] += 1
        leftover += any(isinstance(p, SurfacePiece) for p in dec.pieces)

    print(f"{cfg.samples} homs, seed {cfg.seed}, budget {cfg.budget} per search")
    print(f"{'source':<16}{'genus':>6}{'defect':>8}{'count':>8}")
    for (kind, g, d), n in sorted(table.items()):
        print(f"{kind:<16}{g:>6}{d:>8}{n:>8}")
    print(f"homs with an unreduced surface piece: {leftover}")


if __name__ == "__main__":
    main()
