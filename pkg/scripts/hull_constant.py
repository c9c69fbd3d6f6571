"""Audited runs of the dual algorithm: hull-count constant C and exact structural checks.

    python3 scripts/hull_constant.py --sizes 128,256,512 --seeds 3
"""
from __future__ import annotations

import argparse
import statistics
from dataclasses import dataclass, field

from arrfaces.io import generate
from arrfaces.many_faces import FastStats, many_faces_fast_per_point


@dataclass
class HullConstantConfig:
    sizes: list = field(default_factory=lambda: [128, 256, 512])
    seeds: int = 3


def run(cfg: HullConstantConfig) -> list:
    rows = []
    for n in cfg.sizes:
        cs, bad = [], 0
        for seed in range(cfg.seeds):
            inst = generate("random-lines", n, n, 100 + seed)
            st = FastStats()
            many_faces_fast_per_point(inst.lines, inst.points, stats=st, audit=True)
            cs.append(st.C)
            bad += st.union_violations + st.overlap_violations
        rows.append((n, st.r, statistics.mean(cs), bad))
        print(f"n=m={n:>5}  r={st.r:>3}  mean C={rows[-1][2]:.3f}  violations={bad}")
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="128,256,512")
    ap.add_argument("--seeds", type=int, default=3)
    a = ap.parse_args()
    run(HullConstantConfig([int(s) for s in a.sizes.split(",")], a.seeds))


if __name__ == "__main__":
    main()
