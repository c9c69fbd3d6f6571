"""Command-line harness: ``arrfaces generate | run | bench``."""
from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .cuttings import CuttingConfig
from .errors import GeometryError, ParamRange
from .face import Face
from .face_query import fq_build, fq_build_tradeoff, fq_query
from .geom import fmt
from .io import KINDS, Instance, format_instance, generate, read_instance
from .many_faces import FastStats, MainStats, many_faces_fast, many_faces_main
from .oracle import Arrangement, many_faces_naive

SCHEMA = "arrfaces.report/1"
ALGOS = ("many-faces-fast", "many-faces-main", "many-faces-naive", "face-query", "face-query-tradeoff")


class VerifyFailed(Exception):
    def __init__(self, report: dict, mismatch: dict):
        super().__init__("verification failed")
        self.report = report
        self.mismatch = mismatch


@dataclass
class RunReport:
    algo: str
    n: int
    m: int
    r: Optional[int]
    seed: int
    faces: int
    total_complexity: int
    verdict: str
    constants: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    schema: str = SCHEMA

    def to_dict(self) -> dict:
        return asdict(self)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float):
        return round(v, 9) if math.isfinite(v) else str(v)
    if hasattr(v, "numerator") and not isinstance(v, (bool, int)):
        return fmt(v)
    return v


def _minimal_mismatch(got: set, want: set) -> dict:
    extra = sorted(got - want, key=Face.sort_key)
    missing = sorted(want - got, key=Face.sort_key)
    return {
        "unexpected": extra[0].to_json() if extra else None,
        "missing": missing[0].to_json() if missing else None,
        "unexpected_count": len(extra),
        "missing_count": len(missing),
    }


def run_algorithm(
    algo: str,
    inst: Instance,
    r: Optional[int] = None,
    seed: int = 0,
    queries: Optional[Sequence] = None,
    verify: bool = False,
) -> tuple:
    """Run one algorithm; returns (RunReport, faces as a list in output order)."""
    if algo not in ALGOS:
        raise ParamRange(f"unknown algorithm {algo!r}")
    lines, points = inst.lines, list(queries) if queries is not None else inst.points
    cfg = CuttingConfig(seed=seed)
    constants: dict = {}
    timing: dict = {}
    t0 = time.perf_counter()
    if algo.startswith("many-faces"):
        if algo == "many-faces-fast":
            st = FastStats()
            faces = many_faces_fast(lines, points, r=r, config=cfg, stats=st)
            constants = {
                "r": st.r,
                "sum_hulls_plus": st.hulls_plus,
                "C_hulls": st.C,
                "delegated": st.delegated,
                "cutting_level_sizes": st.cutting.get("level_sizes") if st.cutting else None,
                "cutting_retries_mean": st.cutting.get("retries_mean") if st.cutting else None,
            }
            r_used = st.r
        elif algo == "many-faces-main":
            st = MainStats()
            faces = many_faces_main(lines, points, r=r, config=cfg, stats=st)
            constants = {
                "r": st.r,
                "cells": st.cells,
                "final_faces": st.final_faces,
                "glued_faces": st.glued_faces,
                "delegated": st.delegated,
                "cutting_level_sizes": st.cutting.get("level_sizes") if st.cutting else None,
                "sum_hulls_plus": st.fast.hulls_plus,
            }
            r_used = st.r
        else:
            faces = many_faces_naive(lines, points)
            r_used = None
        timing["wall_seconds"] = time.perf_counter() - t0
        ordered = sorted(faces, key=Face.sort_key)
        verdict = "SKIPPED"
        if verify:
            want = faces if algo == "many-faces-naive" else many_faces_naive(lines, points)
            verdict = "PASS" if set(faces) == set(want) else "FAIL"
        report = RunReport(algo, len(lines), len(points), r_used, seed, len(ordered), sum(f.size for f in ordered), verdict, constants, timing)
        if verdict == "FAIL":
            raise VerifyFailed(report.to_dict(), _minimal_mismatch(set(faces), set(want)))
        return report, ordered

    tradeoff = algo == "face-query-tradeoff"
    if tradeoff:
        s = fq_build_tradeoff(lines, r if r is not None else max(1, min(len(lines), 8)))
    else:
        s = fq_build(lines)
    timing["build_seconds"] = time.perf_counter() - t0
    t1 = time.perf_counter()
    out = [fq_query(s, p) for p in points]
    timing["query_seconds"] = time.perf_counter() - t1
    timing["median_query_seconds"] = statistics.median(s.stats.times) if s.stats.times else 0.0
    timing["wall_seconds"] = time.perf_counter() - t0
    meta = {k: v for k, v in s.meta.items() if not k.endswith("seconds")}
    sizes = s.stats.canonical_sizes
    constants = {
        **meta,
        "median_canonical_size": statistics.median(sizes) if sizes else 0,
        "max_canonical_size": max(sizes) if sizes else 0,
    }
    verdict = "SKIPPED"
    if verify:
        arr = Arrangement(lines)
        agree = 0
        first_bad = None
        for p, f in zip(points, out):
            want = arr.face_of(p)
            if want == f:
                agree += 1
            elif first_bad is None:
                first_bad = {"point": [fmt(p.x), fmt(p.y)], "unexpected": f.to_json(), "missing": want.to_json()}
        constants["verified"] = f"{agree}/{len(points)}"
        verdict = "PASS" if agree == len(points) else "FAIL"
    distinct = set(out)
    report = RunReport(algo, len(lines), len(points), s.r, seed, len(distinct), sum(f.size for f in distinct), verdict, constants, timing)
    if verdict == "FAIL":
        raise VerifyFailed(report.to_dict(), first_bad)
    return report, out


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> dict:
    """Least-squares slope of log y against log x with a 95% confidence interval."""
    from scipy import stats

    pairs = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pairs) < 2:
        return {"slope": None, "ci95": None, "points": len(pairs)}
    lx = [math.log(x) for x, _ in pairs]
    ly = [math.log(y) for _, y in pairs]
    res = stats.linregress(lx, ly)
    if len(pairs) > 2:
        half = float(stats.t.ppf(0.975, len(pairs) - 2) * res.stderr)
        ci = [float(res.slope) - half, float(res.slope) + half]
    else:
        ci = None
    return {"slope": float(res.slope), "intercept": float(res.intercept), "ci95": ci, "points": len(pairs)}


def bench(algo: str, sizes: Sequence[int], m_ratio: float = 1.0, seed: int = 0, r: Optional[int] = None, queries: int = 0) -> dict:
    """Sweep n over ``sizes`` on random-lines instances and fit log-log slopes."""
    runs = []
    for n in sizes:
        m = max(1, int(round(n * m_ratio)))
        if algo.startswith("face-query"):
            inst = generate("random-lines", n, queries or 200, seed)
        else:
            inst = generate("random-lines", n, m, seed)
        rep, _ = run_algorithm(algo, inst, r=r, seed=seed)
        runs.append(rep.to_dict())
    fits = {}
    if runs:
        ns = [x["n"] for x in runs]
        fits["wall_seconds"] = fit_slope(ns, [x["timing"]["wall_seconds"] for x in runs])
        if algo.startswith("face-query"):
            fits["median_canonical_size"] = fit_slope(ns, [x["constants"]["median_canonical_size"] for x in runs])
            fits["median_query_seconds"] = fit_slope(ns, [x["timing"]["median_query_seconds"] for x in runs])
        for x in runs:
            n, m = x["n"], x["m"]
            x["constants"]["C_complexity"] = x["total_complexity"] / (m ** (2 / 3) * n ** (2 / 3) + n)
    return {"schema": SCHEMA, "algo": algo, "sizes": list(sizes), "seed": seed, "runs": runs, "fits": fits}


def _write_json(doc, path: Optional[str]):
    text = json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="arrfaces", description="Many faces in line arrangements.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="write a deterministic instance file")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, default=0, help="number of lines")
    g.add_argument("--m", type=int, default=0, help="number of points")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path (stdout if omitted)")

    r = sub.add_parser("run", help="run one algorithm on an instance")
    r.add_argument("--algo", choices=ALGOS, required=True)
    r.add_argument("--instance", required=True)
    r.add_argument("--queries", help="file of 'P x y' query points (face-query modes)")
    r.add_argument("--r", type=int)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--verify", action="store_true")
    r.add_argument("--emit-faces", dest="emit_faces", help="write explicit faces as JSON")
    r.add_argument("--report", help="report path (stdout if omitted)")

    b = sub.add_parser("bench", help="scaling sweep with log-log slope fits")
    b.add_argument("--algo", choices=ALGOS, required=True)
    b.add_argument("--sizes", default="", help="comma-separated n values")
    b.add_argument("--m-ratio", dest="m_ratio", type=float, default=1.0)
    b.add_argument("--queries", type=int, default=200)
    b.add_argument("--r", type=int)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--report", help="report path (stdout if omitted)")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.cmd == "generate":
            inst = generate(args.kind, args.n, args.m, args.seed)
            text = format_instance(inst, f"{args.kind} n={args.n} m={args.m} seed={args.seed}")
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 0
        if args.cmd == "run":
            inst = read_instance(args.instance)
            queries = read_instance(args.queries).points if args.queries else None
            try:
                rep, faces = run_algorithm(args.algo, inst, args.r, args.seed, queries, args.verify)
            except VerifyFailed as exc:
                _write_json(exc.report, args.report)
                sys.stderr.write("verification FAILED; minimal mismatch:\n")
                sys.stderr.write(json.dumps(exc.mismatch, indent=2, sort_keys=True) + "\n")
                return 2
            if args.emit_faces:
                with open(args.emit_faces, "w") as fh:
                    json.dump([f.to_json() for f in faces], fh, indent=1)
                    fh.write("\n")
            _write_json(rep.to_dict(), args.report)
            return 0
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        doc = bench(args.algo, sizes, args.m_ratio, args.seed, args.r, args.queries)
        _write_json(doc, args.report)
        return 0
    except GeometryError as exc:
        sys.stderr.write(f"{exc}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"IO_ERROR: {exc}\n")
        return 4


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
