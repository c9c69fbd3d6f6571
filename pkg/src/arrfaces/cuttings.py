"""Hierarchical (1/r)-cuttings built by random sampling and certified exactly.

Each refinement step samples a few conflict lines of a cell, cuts the cell by
them, fan-triangulates the pieces and keeps the result only if every child
meets its conflict bound.  All accept/reject decisions are exact; floats only
prefilter the obvious cases.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateInput, ParamRange, PointOnCellEdge, PointOnLine
from .geom import ABOVE, BELOW, ON, Line, Point, line_crosses_triangle, orient, point_in_triangle, side_of_line
from .hulls import Hull, hull_of_sorted

__all__ = [
    "CuttingConfig",
    "CuttingCell",
    "HierarchicalCutting",
    "build_hierarchical_cutting",
    "attach_points",
    "crossing_cells",
    "above_cells",
    "bounding_triangle",
    "levels_for",
]

_TOL = 1e-9


# Callables run on every finished cutting; test suites register certifiers here.
BUILD_HOOKS: list = []


@dataclass(frozen=True)
class CuttingConfig:
    rho: int = 2
    child_cap: int = 32
    sample_size: int = 2
    split_candidates: int = 16
    max_attempts: int = 200
    seed: int = 0
    refine_points: bool = True


@dataclass
class CuttingCell:
    id: int
    level: int
    triangle: tuple
    parent: Optional[int]
    children: list = field(default_factory=list)
    conflict: list = field(default_factory=list)
    points: list = field(default_factory=list)  # indices into the sorted point list
    hull: Optional[Hull] = None
    retries: int = 0

    @property
    def polygon(self):
        return self.triangle


@dataclass
class HierarchicalCutting:
    lines: list
    r: int
    rho: int
    k: int
    cells: list
    levels: list  # levels[i] = cell ids of level i; index k + 1 is the point refinement
    points: list  # sorted by (x, y)
    box: tuple
    crossed_by: list  # per line, ids of the cells it crosses (all levels)
    meta: dict = field(default_factory=dict)
    _fx: Optional[np.ndarray] = None

    @property
    def root(self) -> CuttingCell:
        return self.cells[self.levels[0][0]]

    def level(self, i: int) -> list:
        return [self.cells[c] for c in self.levels[i]]

    @property
    def leaf_level(self) -> int:
        return len(self.levels) - 1

    def certify(self, exhaustive_points: bool = True) -> list:
        """Exhaustive check of every structural guarantee; returns the list of violations."""
        bad = []
        n = len(self.lines)
        bank = _LineBank(self.lines)
        every = np.arange(n, dtype=np.int64)
        for i in range(1, len(self.levels)):
            for c in self.level(i):
                exact = bank.crossing([c.triangle], every)[0]
                if sorted(c.conflict) != exact:
                    bad.append(f"cell {c.id}: conflict list differs from exhaustive scan")
                if i <= self.k and len(exact) * self.rho**i > n:
                    bad.append(f"cell {c.id} at level {i}: {len(exact)} > n/rho^i")
                par = self.cells[c.parent]
                if c.id not in par.children:
                    bad.append(f"cell {c.id}: not listed by its parent")
            for pid in self.levels[i - 1]:
                par = self.cells[pid]
                area = sum(abs(_area2(self.cells[ch].triangle)) for ch in par.children)
                if area != abs(_area2(par.triangle)):
                    bad.append(f"cell {pid}: children do not tile it")
        if self.k + 1 < len(self.levels) and self.points:
            cap = max(1, len(self.points) // (self.r * self.r))
            for c in self.level(self.k + 1):
                if len(c.points) > cap:
                    bad.append(f"refinement cell {c.id} holds {len(c.points)} > {cap} points")
        if exhaustive_points and self.points:
            for i, lev in enumerate(self.levels):
                seen = sorted(q for cid in lev for q in self.cells[cid].points)
                if seen != list(range(len(self.points))):
                    bad.append(f"level {i}: points not partitioned")
                for cid in lev:
                    c = self.cells[cid]
                    for q in c.points:
                        if point_in_triangle(self.points[q], c.triangle) != 1:
                            bad.append(f"point {q} not strictly inside cell {cid}")
        return bad


def _area2(t):
    a, b, c = t
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def levels_for(r: int, rho: int) -> int:
    """Smallest k with rho**k >= r."""
    k = 0
    while rho**k < r:
        k += 1
    return k


def bounding_triangle(lines: Sequence[Line], points: Sequence[Point], with_vertices: bool = True) -> tuple:
    """A counterclockwise triangle strictly containing the points, every (0, b) and every crossing."""
    R = Fraction(1)
    for p in points:
        R = max(R, abs(p.x) + 1, abs(p.y) + 1)
    if lines:
        mb = max(abs(l.b) for l in lines)
        ma = max(abs(l.a) for l in lines)
        R = max(R, mb + 1)
        if with_vertices:
            slopes = sorted({l.a for l in lines})
            if len(slopes) > 1:
                gap = min(b - a for a, b in zip(slopes, slopes[1:]))
                X = Fraction(2 * mb) / gap
                R = max(R, X + 1, ma * X + mb + 1)
    R = Fraction(math.ceil(R))
    return (Point(-4 * R, -2 * R), Point(4 * R, -2 * R), Point(Fraction(0), 4 * R))


# ------------------------------------------------------------ polygon ops


def _split(poly, line: Line):
    """Split a convex polygon by a line crossing its interior into (below, above)."""
    below, above = [], []
    k = len(poly)
    ds = [v.y - line.a * v.x - line.b for v in poly]
    for j in range(k):
        v, w = poly[j], poly[(j + 1) % k]
        dv, dw = ds[j], ds[(j + 1) % k]
        if dv <= 0:
            below.append(v)
        if dv >= 0:
            above.append(v)
        if (dv < 0 < dw) or (dw < 0 < dv):
            t = Fraction(dv) / (dv - dw)
            x = Point(v.x + t * (w.x - v.x), v.y + t * (w.y - v.y))
            below.append(x)
            above.append(x)
    return below, above


def _crosses_poly(line: Line, poly) -> bool:
    pos = neg = False
    for v in poly:
        d = v.y - line.a * v.x - line.b
        pos |= d > 0
        neg |= d < 0
    return pos and neg


class _Sites:
    """Sites with float copies for fast prefiltering of exact incidence tests."""

    def __init__(self, pts: Sequence[Point]):
        self.pts = list(pts)
        self.x = np.array([float(p.x) for p in pts], dtype=float)
        self.y = np.array([float(p.y) for p in pts], dtype=float)


def _on_open_segment(sites: _Sites, idx: np.ndarray, a: Point, b: Point) -> bool:
    if len(idx) == 0:
        return False
    ax, ay, bx, by = float(a.x), float(a.y), float(b.x), float(b.y)
    xs, ys = sites.x[idx], sites.y[idx]
    o = (bx - ax) * (ys - ay) - (by - ay) * (xs - ax)
    scale = (abs(bx - ax) + abs(by - ay)) * (np.abs(xs - ax) + np.abs(ys - ay)) + 1.0
    for j in idx[np.abs(o) <= _TOL * scale]:
        p = sites.pts[j]
        if orient(a, b, p) == 0 and min(a, b) < p < max(a, b):
            return True
    return False


def _fan(poly, sites: _Sites, idx: np.ndarray):
    """Fan triangulation from the bottom vertex, or from another apex when a site lies on a diagonal."""
    k = len(poly)
    if k == 3:
        return [tuple(poly)]
    start = min(range(k), key=lambda j: (poly[j].y, poly[j].x))
    for off in range(k):
        a = (start + off) % k
        if any(_on_open_segment(sites, idx, poly[a], poly[(a + j) % k]) for j in range(2, k - 1)):
            continue
        return [(poly[a], poly[(a + j) % k], poly[(a + j + 1) % k]) for j in range(1, k - 1)]
    return None


def _classify_sites(sites: _Sites, idx: np.ndarray, tris) -> Optional[list]:
    """Assign each site to the child containing it; None if some site sits on a child edge."""
    out = [[] for _ in tris]
    if len(idx) == 0:
        return out
    xs, ys = sites.x[idx], sites.y[idx]
    owner = np.full(len(idx), -1)
    unsure = np.zeros(len(idx), dtype=bool)
    for c, t in enumerate(tris):
        inside = np.ones(len(idx), dtype=bool)
        near = np.zeros(len(idx), dtype=bool)
        for e in range(3):
            a, b = t[e], t[(e + 1) % 3]
            ax, ay, bx, by = float(a.x), float(a.y), float(b.x), float(b.y)
            o = (bx - ax) * (ys - ay) - (by - ay) * (xs - ax)
            scale = (abs(bx - ax) + abs(by - ay)) * (np.abs(xs - ax) + np.abs(ys - ay)) + 1.0
            inside &= o > _TOL * scale
            near |= np.abs(o) <= _TOL * scale
        owner[inside & (owner < 0)] = c
        unsure |= near & ~inside
    for j in np.nonzero((owner < 0) | unsure)[0]:
        p = sites.pts[idx[j]]
        found = -1
        for c, t in enumerate(tris):
            s = point_in_triangle(p, t)
            if s == 0:
                return None
            if s > 0:
                found = c
                break
        if found < 0:
            raise PointOnCellEdge(f"site {p} not covered by the children")
        owner[j] = found
    for j, c in enumerate(owner.tolist()):
        out[c].append(int(idx[j]))
    return out


class _LineBank:
    def __init__(self, lines: Sequence[Line]):
        self.lines = list(lines)
        self.a = np.array([float(l.a) for l in lines], dtype=float)
        self.b = np.array([float(l.b) for l in lines], dtype=float)

    def crossing(self, tris, ids: np.ndarray) -> list:
        """For each triangle, the ids among ``ids`` whose line crosses its interior."""
        if len(ids) == 0:
            return [[] for _ in tris]
        a, b = self.a[ids], self.b[ids]
        out = []
        for t in tris:
            pos = np.zeros(len(ids), dtype=bool)
            neg = np.zeros(len(ids), dtype=bool)
            near = np.zeros(len(ids), dtype=bool)
            for v in t:
                vx, vy = float(v.x), float(v.y)
                d = vy - a * vx - b
                tol = _TOL * (abs(vy) + np.abs(a) * abs(vx) + np.abs(b) + 1.0)
                pos |= d > tol
                neg |= d < -tol
                near |= np.abs(d) <= tol
            res = pos & neg
            for j in np.nonzero(near & ~res)[0]:
                res[j] = line_crosses_triangle(self.lines[ids[j]], t)
            out.append(ids[res].tolist())
        return out


# ------------------------------------------------------------ construction


class _Builder:
    def __init__(self, lines, r, points, config: CuttingConfig):
        self.lines = list(lines)
        self.n = len(lines)
        self.r = r
        self.cfg = config
        self.rng = random.Random(f"{config.seed}:cutting")
        self.bank = _LineBank(self.lines)
        self.points = list(points)
        self.sites = _Sites(self.points)
        self.cells: list = []

    def new_cell(self, level, tri, parent, conflict, pts) -> CuttingCell:
        c = CuttingCell(len(self.cells), level, tri, parent, [], conflict, pts)
        self.cells.append(c)
        if parent is not None:
            self.cells[parent].children.append(c.id)
        return c

    def _cut(self, poly, lids, pidx):
        faces = [list(poly)]
        for lid in lids:
            line = self.lines[lid]
            self._check_sites_off(line, pidx)
            nxt = []
            for f in faces:
                if _crosses_poly(line, f):
                    nxt += _split(f, line)
                else:
                    nxt.append(f)
            faces = nxt
        tris = []
        for f in faces:
            tt = _fan(f, self.sites, pidx)
            if tt is None:
                return None
            tris += tt
        return tris

    def _check_sites_off(self, line: Line, pidx):
        if len(pidx) == 0:
            return
        xs, ys = self.sites.x[pidx], self.sites.y[pidx]
        fa, fb = float(line.a), float(line.b)
        d = ys - fa * xs - fb
        tol = _TOL * (np.abs(ys) + abs(fa) * np.abs(xs) + abs(fb) + 1.0)
        for j in pidx[np.abs(d) <= tol]:
            if side_of_line(line, self.sites.pts[j]) == 0:
                raise PointOnLine(f"site {self.sites.pts[j]} lies on line {line}")

    def _attempt(self, cell: CuttingCell, level: int, pidx):
        """One randomized refinement: cut by a small sample, then re-split violators worst first."""
        n, rho, cfg = self.n, self.cfg.rho, self.cfg
        conflict = cell.conflict
        s = min(cfg.sample_size, len(conflict))
        tris = self._cut(cell.triangle, self.rng.sample(conflict, s), pidx)
        if tris is None:
            return None
        out = list(zip(tris, self.bank.crossing(tris, np.array(conflict, dtype=np.int64))))
        while True:
            bad = [j for j, (_, c) in enumerate(out) if len(c) * rho**level > n]
            if not bad:
                return out
            if len(out) > cfg.child_cap:
                return None
            t, c = out.pop(max(bad, key=lambda j: len(out[j][1])))
            cids = np.array(c, dtype=np.int64)
            best = None
            for _ in range(cfg.split_candidates):
                tt = self._cut(t, [self.rng.choice(c)], pidx)
                if tt is None:
                    continue
                cc = self.bank.crossing(tt, cids)
                worst = max(len(x) for x in cc)
                if best is None or worst < best[0]:
                    best = (worst, tt, cc)
            if best is None or best[0] == len(c):
                return None
            out += list(zip(best[1], best[2]))

    def refine(self, cell: CuttingCell, level: int) -> list:
        rho, n = self.cfg.rho, self.n
        conflict = cell.conflict
        pidx = np.array(cell.points, dtype=np.int64)
        if len(conflict) * rho**level <= n:
            return [self.new_cell(level, cell.triangle, cell.id, list(conflict), list(cell.points))]
        for attempt in range(self.cfg.max_attempts):
            out = self._attempt(cell, level, pidx)
            if out is None or len(out) > self.cfg.child_cap:
                continue
            tris = [t for t, _ in out]
            assign = _classify_sites(self.sites, pidx, tris)
            if assign is None:
                continue
            cell.retries = attempt
            return [self.new_cell(level, t, cell.id, c, a) for (t, c), a in zip(out, assign)]
        raise DegenerateInput(f"cutting refinement of cell {cell.id} did not converge")

    def refine_points(self, cell: CuttingCell, level: int, cap: int) -> list:
        pts = cell.points
        if len(pts) <= cap:
            return [self.new_cell(level, cell.triangle, cell.id, list(cell.conflict), list(pts))]
        P = self.points
        xs = [P[q].x for q in pts]
        ys = [P[q].y for q in pts]
        gaps = [b - a for a, b in zip(xs, xs[1:]) if b > a]
        yr = max(ys) - min(ys)
        delta = Fraction(1) if not gaps else Fraction(min(gaps), 2 * yr + 1)
        keys = [x + delta * y for x, y in zip(xs, ys)]
        vkeys = {v.x + delta * v.y for v in cell.triangle}
        cuts = []
        for g in range(cap, len(pts), cap):
            lo, hi = keys[g - 1], keys[g]
            c = Fraction(lo + hi) / 2
            while c in vkeys:
                c = (lo + c) / 2
            cuts.append(c)
        # x + delta*y = c  is the line  y = -x/delta + c/delta
        pieces = []
        rest = list(cell.triangle)
        for c in cuts:
            line = Line(-1 / delta, c / delta)
            if not _crosses_poly(line, rest):
                continue
            below, above = _split(rest, line)
            pieces.append(below)
            rest = above
        pieces.append(rest)
        pidx = np.array(pts, dtype=np.int64)
        tris = []
        for f in pieces:
            tt = _fan(f, self.sites, pidx)
            if tt is None:
                raise PointOnCellEdge(f"no site-free triangulation of a slab in cell {cell.id}")
            tris += tt
        ids = np.array(cell.conflict, dtype=np.int64)
        confl = self.bank.crossing(tris, ids)
        assign = _classify_sites(self.sites, pidx, tris)
        if assign is None:
            raise PointOnCellEdge(f"site on a slab edge in cell {cell.id}")
        return [self.new_cell(level, t, cell.id, c, a) for t, c, a in zip(tris, confl, assign)]


def build_hierarchical_cutting(
    lines: Sequence[Line],
    r: int,
    *,
    points: Sequence[Point] = (),
    config: CuttingConfig = CuttingConfig(),
    box: Optional[tuple] = None,
) -> HierarchicalCutting:
    """Levels 0..k with k the smallest integer such that rho**k >= r.

    Points (sorted by (x, y)) are attached during construction so no
    refinement ever puts a point on a cell edge; with ``refine_points`` the
    extra level k + 1 holds at most ``len(points) // r**2`` points per cell.
    """
    lines = list(lines)
    n = len(lines)
    if n == 0:
        r = 1
    if not 1 <= r <= max(n, 1):
        raise ParamRange(f"r={r} outside [1, {n}]")
    points = list(points)
    for a, b in zip(points, points[1:]):
        if not a < b:
            raise DegenerateInput("points must be distinct and sorted by (x, y)")
    rho = config.rho
    k = levels_for(r, rho)
    if box is None:
        box = bounding_triangle(lines, points)
    b = _Builder(lines, r, points, config)
    root = b.new_cell(0, box, None, list(range(n)), list(range(len(points))))
    for p in points:
        if point_in_triangle(p, box) != 1:
            raise ParamRange(f"point {p} outside the bounding triangle")
    levels = [[root.id]]
    for i in range(1, k + 1):
        lev = []
        for cid in levels[-1]:
            lev += [c.id for c in b.refine(b.cells[cid], i)]
        levels.append(lev)
    if config.refine_points:
        cap = max(1, len(points) // (r * r))
        lev = []
        for cid in levels[-1]:
            lev += [c.id for c in b.refine_points(b.cells[cid], k + 1, cap)]
        levels.append(lev)
    crossed_by = [[] for _ in range(n)]
    for c in b.cells:
        for j in c.conflict:
            crossed_by[j].append(c.id)
    for c in b.cells:
        if c.level > 0:
            c.hull = hull_of_sorted([points[q] for q in c.points])
    split = [c for c in b.cells if c.level <= k and len(c.children) > 1]
    meta = {
        "level_sizes": [len(l) for l in levels],
        "max_children": max((len(c.children) for c in b.cells), default=0),
        "refined_cells": len(split),
        "retries_total": sum(c.retries for c in split),
        "retries_mean": (sum(c.retries for c in split) / len(split)) if split else 0.0,
        "size_constant": [len(levels[i]) / rho ** (2 * i) for i in range(k + 1)],
    }
    hc = HierarchicalCutting(lines, r, rho, k, b.cells, levels, points, box, crossed_by, meta)
    for hook in BUILD_HOOKS:
        hook(hc)
    hc._fx = _centroids(b.cells)
    return hc


def _centroids(cells) -> np.ndarray:
    out = np.empty((len(cells), 2))
    for c in cells:
        t = c.triangle
        out[c.id, 0] = float(sum(v.x for v in t) / 3)
        out[c.id, 1] = float(sum(v.y for v in t) / 3)
    return out


def attach_points(c: HierarchicalCutting, points: Sequence[Point], config: CuttingConfig = CuttingConfig()) -> HierarchicalCutting:
    """Rebuild with points; the same seed reproduces the same line levels only when no point forces a retry."""
    return build_hierarchical_cutting(c.lines, c.r, points=points, config=config, box=c.box)


# ------------------------------------------------------------ queries


def _side_of_cell(hc: HierarchicalCutting, cid: int, line: Line) -> int:
    """ABOVE or BELOW for a cell whose interior the line misses (judged at the centroid)."""
    cx, cy = hc._fx[cid]
    d = cy - float(line.a) * cx - float(line.b)
    if abs(d) > _TOL * (abs(cy) + abs(float(line.a) * cx) + abs(float(line.b)) + 1.0):
        return ABOVE if d > 0 else BELOW
    t = hc.cells[cid].triangle
    g = Point(Fraction(sum(v.x for v in t)) / 3, Fraction(sum(v.y for v in t)) / 3)
    return ABOVE if side_of_line(line, g) > 0 else BELOW


def crossing_cells(hc: HierarchicalCutting, line: Line) -> list:
    """Per level, the cells whose open interior the line meets, found by descent from the root."""
    out = [[hc.root.id]]
    frontier = [hc.root.id]
    for _ in range(1, len(hc.levels)):
        nxt = []
        for cid in frontier:
            for ch in hc.cells[cid].children:
                if line_crosses_triangle(line, hc.cells[ch].triangle):
                    nxt.append(ch)
        out.append(nxt)
        frontier = nxt
    return out


def split_cells(hc: HierarchicalCutting, line: Line, crossed: Optional[set] = None):
    """(above, below, crossed leaves) for the descent of one line.

    ``above`` holds the cells entirely above the line whose parent is crossed;
    ``crossed`` may be given as a precomputed set of crossed cell ids (the
    line's own conflict memberships), otherwise it is found by descent.
    """
    if crossed is None:
        crossed = {c for lev in crossing_cells(hc, line) for c in lev}
        crossed.add(hc.root.id)
    above, below, leaves = [], [], []
    last = hc.leaf_level
    frontier = [hc.root.id]
    while frontier:
        nxt = []
        for cid in frontier:
            cell = hc.cells[cid]
            if cell.level == last:
                leaves.append(cid)
                continue
            for ch in cell.children:
                if ch in crossed:
                    nxt.append(ch)
                elif _side_of_cell(hc, ch, line) == ABOVE:
                    above.append(ch)
                else:
                    below.append(ch)
        frontier = nxt
    return above, below, leaves


def above_cells(hc: HierarchicalCutting, line: Line) -> list:
    return split_cells(hc, line)[0]


def below_cells(hc: HierarchicalCutting, line: Line) -> list:
    return split_cells(hc, line)[1]
