"""Wall-time scaling of the many-faces algorithms on random line arrangements.

    python3 scripts/scaling_sweep.py --sizes 64,128,256,512 --out results/scaling.json
"""
from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from arrfaces.cli import _jsonable, bench


@dataclass
class SweepConfig:
    sizes: list = field(default_factory=lambda: [64, 128, 256, 512, 1024])
    algos: list = field(default_factory=lambda: ["many-faces-fast", "many-faces-main", "many-faces-naive"])
    m_ratio: float = 1.0
    seed: int = 0


def run(cfg: SweepConfig) -> dict:
    out = {"config": asdict(cfg), "results": {}}
    for algo in cfg.algos:
        doc = bench(algo, cfg.sizes, cfg.m_ratio, cfg.seed)
        out["results"][algo] = doc
        fit = doc["fits"]["wall_seconds"]
        print(f"{algo:>18}: slope {fit['slope']:.3f}  ci95 {fit['ci95']}")
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256,512,1024")
    ap.add_argument("--algos", default="many-faces-fast,many-faces-main,many-faces-naive")
    ap.add_argument("--m-ratio", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/scaling.json")
    a = ap.parse_args()
    cfg = SweepConfig([int(s) for s in a.sizes.split(",")], a.algos.split(","), a.m_ratio, a.seed)
    doc = run(cfg)
    path = Path(a.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
