"""Genus growth tables genus(w^p), p = 1..pmax, for a few commutator words."""

import argparse
import json
from dataclasses import asdict, dataclass, field

from quadgroup.genus import genus_growth
from quadgroup.words import parse_word


@dataclass
class GrowthConfig:
    words: list[str] = field(default_factory=lambda: ["abAB", "aabAAB", "aabbAABB"])
    pmax: int = 4
    max_genus: int = 2
    out: str | None = None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("words", nargs="*")
    ap.add_argument("--pmax", type=int, default=GrowthConfig.pmax)
    ap.add_argument("--max-genus", type=int, default=GrowthConfig.max_genus)
    ap.add_argument("--out", help="write all tables as JSON here")
    a = ap.parse_args()
    cfg = GrowthConfig(pmax=a.pmax, max_genus=a.max_genus, out=a.out)
    if a.words:
        cfg.words = a.words

    tables = []
    print(f"{'word':<12}" + "".join(f"p={p:<10}" for p in range(1, cfg.pmax + 1)))
    for text in cfg.words:
        t = genus_growth(parse_word(text), cfg.pmax, cfg.max_genus)
        print(f"{text:<12}" + "".join(f"{r.status:<12}" for r in t.rows)
              + ("" if t.subadditive else "  (subadditivity FAILS)"))
        tables.append(t.to_json())
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "tables": tables}, fh, indent=2)


if __name__ == "__main__":
    main()
