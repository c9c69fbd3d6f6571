"""Computing many faces of a line arrangement.

``many_faces_fast`` works in the dual: every query point p becomes a line p*
and its face is read off the hulls of the dual points above and below p*,
assembled from precomputed cutting-cell hulls.  ``many_faces_main`` cuts the
primal plane, solves each cell with the fast algorithm and glues the face
portions that cross cell boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import chain_tree as ct
from .chain_tree import LOWER, UPPER
from .cuttings import CuttingConfig, HierarchicalCutting, build_hierarchical_cutting, split_cells
from .errors import DegenerateInput, PointOnLine
from .face import Face
from .geom import Line, Point, check_lines, orient, point_in_triangle, side_of_line
from .hulls import DualFace, face_from_hulls, lower_chain, merge_chains, upper_chain
from .oracle import many_faces_naive, zone_portion_at

__all__ = [
    "DualPreprocess",
    "QueryResult",
    "FastStats",
    "MainStats",
    "fast_r",
    "main_r",
    "preprocess_dual",
    "hull_above",
    "hull_below",
    "query_face",
    "many_faces_fast",
    "many_faces_fast_per_point",
    "many_faces_main",
    "triangles_interior_disjoint",
]


def fast_r(n: int, m: int) -> int:
    """min(m, floor(sqrt(n / log2 n))), at least 1."""
    if n < 2 or m < 1:
        return 1
    return max(1, min(m, math.isqrt(int(Fraction(n) / Fraction(math.log2(n))))))


def main_r(n: int, m: int) -> int:
    """max(m^(2/3) / (n^(1/3) log2^(1/3)(n / sqrt m)), 1), floored and capped at n."""
    if n < 2 or m < 1:
        return 1
    arg = n / math.sqrt(m)
    if arg <= 1:
        return 1
    r = m ** (2 / 3) / (n ** (1 / 3) * math.log2(arg) ** (1 / 3))
    return int(min(max(r, 1), n))


def _lcm_den(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


@dataclass
class FastStats:
    r: int = 0
    queries: int = 0
    hulls_plus: int = 0  # sum over queries of |H+ constituents|
    hulls_minus: int = 0
    cells_plus: int = 0
    union_violations: int = 0
    overlap_violations: int = 0
    cutting: dict = field(default_factory=dict)
    delegated: bool = False

    @property
    def C(self) -> float:
        """Sum of |H+ constituents| over queries, divided by m*r."""
        return self.hulls_plus / (self.queries * self.r) if self.queries and self.r else 0.0


@dataclass
class DualPreprocess:
    """Dual points (rescaled to integers) with a hierarchical cutting over the dual query lines."""

    lines: list
    points: list
    r: int
    cutting: HierarchicalCutting
    dual_points: list
    index_of: dict
    qlines: list
    scale: tuple
    disjoint_cache: dict = field(default_factory=dict, repr=False)
    _cell_arrays: Optional[tuple] = field(default=None, repr=False)

    def cell_arrays(self) -> tuple:
        """Float corners, orientation signs and exact vertex ids of every cutting cell."""
        if self._cell_arrays is None:
            cells = self.cutting.cells
            T = np.array([[[float(v.x), float(v.y)] for v in c.triangle] for c in cells])
            S = np.array([orient(*c.triangle) for c in cells], dtype=float)
            ids: dict = {}
            V = np.array([[ids.setdefault(v, len(ids)) for v in c.triangle] for c in cells])
            self._cell_arrays = (T, S, V)
        return self._cell_arrays


@dataclass
class QueryResult:
    hplus: ct.ChainHandle
    hminus: ct.ChainHandle
    dual: DualFace
    key: tuple


def _scaled(lines: Sequence[Line]):
    """Dual points (a, -b) scaled by positive integers to integer coordinates."""
    ax = _lcm_den(l.a for l in lines)
    by = _lcm_den(l.b for l in lines)
    pts = [Point(int(l.a * ax), int(-l.b * by)) for l in lines]
    return pts, (ax, by)


def _qline(p: Point, scale) -> Line:
    ax, by = scale
    return Line(Fraction(by) * p.x / ax, -by * p.y)


def preprocess_dual(
    lines: Sequence[Line], points: Sequence[Point], r: Optional[int] = None, config: CuttingConfig = CuttingConfig()
) -> DualPreprocess:
    lines = list(lines)
    check_lines(lines)
    points = list(points)
    if not points:
        raise DegenerateInput("at least one query point is required")
    if r is None:
        r = fast_r(len(lines), len(points))
    r = max(1, min(r, len(points)))
    dual, scale = _scaled(lines)
    index_of = {p: i for i, p in enumerate(dual)}
    order = sorted(range(len(lines)), key=dual.__getitem__)
    sorted_pts = [dual[i] for i in order]
    qlines = [_qline(p, scale) for p in points]
    hc = build_hierarchical_cutting(qlines, r, points=sorted_pts, config=config)
    return DualPreprocess(lines, points, r, hc, sorted_pts, index_of, qlines, scale)


def _leaf_split(pre: DualPreprocess, cid: int, line: Line):
    pts = pre.cutting.points
    above, below = [], []
    for q in pre.cutting.cells[cid].points:
        v = pts[q]
        s = side_of_line(line, v)
        if s > 0:
            above.append(v)
        elif s < 0:
            below.append(v)
        else:
            raise PointOnLine(f"query point lies on line {pre.index_of[v]}")
    return above, below


def _gather(pre: DualPreprocess, q: Optional[int], line: Line):
    hc = pre.cutting
    crossed = set(hc.crossed_by[q]) if q is not None else None
    above, below, leaves = split_cells(hc, line, crossed)
    up_parts, down_parts = [], []
    for cid in leaves:
        a, b = _leaf_split(pre, cid, line)
        up_parts.append(a)
        down_parts.append(b)
    return above, below, leaves, up_parts, down_parts


def _assemble(pre, cells, parts, side, stats_key, stats: Optional[FastStats]):
    hc = pre.cutting
    chains = []
    for cid in cells:
        h = hc.cells[cid].hull
        ch = h.lower if side == LOWER else h.upper
        if ch:
            chains.append(ch)
    for pts in parts:
        if pts:
            chains.append(lower_chain(pts) if side == LOWER else upper_chain(pts))
    if stats is not None:
        setattr(stats, stats_key, getattr(stats, stats_key) + len(chains))
    return merge_chains(chains, side)


def hull_above(pre: DualPreprocess, pstar: Line, q: Optional[int] = None, stats: Optional[FastStats] = None):
    """Lower hull of the dual points strictly above ``pstar`` (in the preprocessed dual frame)."""
    above, _, _, up, _ = _gather(pre, q, pstar)
    return _assemble(pre, above, up, LOWER, "hulls_plus", stats)


def hull_below(pre: DualPreprocess, pstar: Line, q: Optional[int] = None, stats: Optional[FastStats] = None):
    _, below, _, _, down = _gather(pre, q, pstar)
    return _assemble(pre, below, down, UPPER, "hulls_minus", stats)


def triangles_interior_disjoint(t1, t2) -> bool:
    """Separating-axis test over the six sides, exact."""
    for a, b in ((t1, t2), (t2, t1)):
        o = orient(*a)
        for i in range(3):
            p, q = a[i], a[(i + 1) % 3]
            if all(o * orient(p, q, v) <= 0 for v in b):
                return True
    return False


def _audit(pre: DualPreprocess, line: Line, above, below, leaves, up, down, stats: FastStats):
    hc = pre.cutting
    got = sorted([hc.points[i] for c in above for i in hc.cells[c].points] + [v for part in up for v in part])
    want = sorted(v for v in hc.points if side_of_line(line, v) > 0)
    got_b = sorted([hc.points[i] for c in below for i in hc.cells[c].points] + [v for part in down for v in part])
    want_b = sorted(v for v in hc.points if side_of_line(line, v) < 0)
    if got != want or got_b != want_b:
        stats.union_violations += 1
    for group in (above + leaves, below + leaves):
        tris = [hc.cells[c].triangle for c in group]
        cache = pre.disjoint_cache
        todo = []
        for i, j in _bbox_overlaps(pre, group):
            key = (min(group[i], group[j]), max(group[i], group[j]))
            ok = cache.get(key)
            if ok is None:
                todo.append((i, j, key))
            elif not ok:
                stats.overlap_violations += 1
        if not todo:
            continue
        sure = _surely_disjoint(pre.cell_arrays(), [group[t[0]] for t in todo], [group[t[1]] for t in todo])
        for (i, j, key), fast in zip(todo, sure):
            ok = cache[key] = bool(fast) or triangles_interior_disjoint(tris[i], tris[j])
            if not ok:
                stats.overlap_violations += 1


def _surely_disjoint(arrays: tuple, ci, cj) -> np.ndarray:
    """Float separating-axis test over cells that only answers True when rounding cannot matter.

    A vertex exactly equal to an endpoint of the axis edge counts as lying on it,
    which settles cells that share an edge without exact arithmetic.
    """
    T, S, V = arrays
    ci, cj = np.asarray(ci), np.asarray(cj)
    out = np.zeros(len(ci), dtype=bool)
    for a_idx, b_idx in ((ci, cj), (cj, ci)):
        A, B, VB = T[a_idx], T[b_idx], V[b_idx]
        # coordinates carry relative error 2**-53, so 1e-13 (S^2 + |terms|) bounds the total error
        span = (np.abs(A).max(axis=(1, 2)) + np.abs(B).max(axis=(1, 2)))[:, None]
        for e in range(3):
            p, q = A[:, e], A[:, (e + 1) % 3]
            d = q - p
            w = B - p[:, None, :]
            det = d[:, None, 0] * w[..., 1] - d[:, None, 1] * w[..., 0]
            mag = np.abs(d[:, None, 0] * w[..., 1]) + np.abs(d[:, None, 1] * w[..., 0])
            tol = 1e-13 * (mag + span * span)
            val = S[a_idx][:, None] * det
            ends = (VB == V[a_idx, e][:, None]) | (VB == V[a_idx, (e + 1) % 3][:, None])
            out |= np.all((val < -tol) | ends, axis=1)
    return out


def _bbox_overlaps(pre: DualPreprocess, group) -> list:
    """Index pairs whose bounding boxes may overlap; the float test is padded so it never drops a pair."""
    if len(group) < 2:
        return []
    T = pre.cell_arrays()[0][np.asarray(group)]
    box = np.concatenate([T.min(axis=1), T.max(axis=1)], axis=1)
    pad = 1e-9 * (np.abs(box).max() + 1.0)
    lo, hi = box[:, :2] - pad, box[:, 2:] + pad
    i, j = np.triu_indices(len(group), 1)
    keep = np.all((lo[i] <= hi[j]) & (lo[j] <= hi[i]), axis=1)
    return list(zip(i[keep].tolist(), j[keep].tolist()))


def query_face(pre: DualPreprocess, q: int, stats: Optional[FastStats] = None, audit: bool = False) -> QueryResult:
    """Implicit face of the q-th query point."""
    line = pre.qlines[q]
    above, below, leaves, up, down = _gather(pre, q, line)
    if audit and stats is not None:
        _audit(pre, line, above, below, leaves, up, down, stats)
    hp = _assemble(pre, above, up, LOWER, "hulls_plus", stats)
    hm = _assemble(pre, below, down, UPPER, "hulls_minus", stats)
    if stats is not None:
        stats.queries += 1
        stats.cells_plus += len(above) + len(leaves)
    df = face_from_hulls(hp, hm, line)
    return QueryResult(hp, hm, df, df.key)


def many_faces_fast_per_point(
    lines: Sequence[Line],
    points: Sequence[Point],
    r: Optional[int] = None,
    config: CuttingConfig = CuttingConfig(),
    stats: Optional[FastStats] = None,
    audit: bool = False,
) -> list:
    """The face of every query point, with each distinct face computed once."""
    lines = list(lines)
    points = list(points)
    if not points:
        return []
    if not lines:
        return [Face((), (), False)] * len(points)
    uniq = sorted(set(points))
    pre = preprocess_dual(lines, uniq, r, config)
    if stats is not None:
        stats.r = pre.r
        stats.cutting = dict(pre.cutting.meta)
    by_key: dict = {}
    face_of_point = {}
    for q, p in enumerate(uniq):
        res = query_face(pre, q, stats, audit)
        f = by_key.get(res.key)
        if f is None:
            f = by_key[res.key] = res.dual.explicit(pre.index_of, lines)
        face_of_point[p] = f
    return [face_of_point[p] for p in points]


def many_faces_fast(
    lines: Sequence[Line],
    points: Sequence[Point],
    r: Optional[int] = None,
    config: CuttingConfig = CuttingConfig(),
    stats: Optional[FastStats] = None,
    audit: bool = False,
) -> set:
    """Distinct faces containing the points, via dual cuttings and hull merging."""
    lines = list(lines)
    points = list(points)
    n, m = len(lines), len(points)
    if n and 2 * m >= n * n:
        if stats is not None:
            stats.delegated = True
        return many_faces_naive(lines, points)
    return set(many_faces_fast_per_point(lines, points, r, config, stats, audit))


# ------------------------------------------------------------ main algorithm


@dataclass
class MainStats:
    r: int = 0
    cells: int = 0
    final_faces: int = 0
    glued_faces: int = 0
    portions: int = 0
    zone_sizes: list = field(default_factory=list)
    fast: FastStats = field(default_factory=FastStats)
    cutting: dict = field(default_factory=dict)
    delegated: bool = False
    portion_owner_conflicts: int = 0


def _seg_key(a: Point, b: Point):
    """Supporting line of a segment and the coordinate used to parametrize it."""
    if a.x != b.x:
        s = Fraction(b.y - a.y) / (b.x - a.x)
        return ("n", s, a.y - s * a.x), (min(a.x, b.x), max(a.x, b.x))
    return ("v", a.x), (min(a.y, b.y), max(a.y, b.y))


def _side_of_key(key, p: Point) -> int:
    if key[0] == "n":
        d = p.y - key[1] * p.x - key[2]
    else:
        d = p.x - key[1]
    return (d > 0) - (d < 0)


def _at_param(key, t) -> Point:
    if key[0] == "n":
        return Point(t, key[1] * t + key[2])
    return Point(key[1], t)


class _Glue:
    def __init__(self, lines, hc: HierarchicalCutting, cells, stats: MainStats):
        self.lines = lines
        self.hc = hc
        self.stats = stats
        self.line_id = {("n", l.a, l.b): i for i, l in enumerate(lines)}
        self.index: dict = {}
        for cid in cells:
            t = hc.cells[cid].triangle
            for e in range(3):
                a, b, c = t[e], t[(e + 1) % 3], t[(e + 2) % 3]
                key, iv = _seg_key(a, b)
                self.index.setdefault((key, _side_of_key(key, c)), []).append((iv[0], iv[1], cid))
        for v in self.index.values():
            v.sort()
        self.owner: dict = {}  # (cell, sides) -> face slot
        self.faces: list = []

    def portion(self, cid: int, q: Point):
        cell = self.hc.cells[cid]
        P = zone_portion_at(self.lines, cell.conflict, cell.triangle, q)
        return (cid, P.sides), P

    def face_for(self, cid: int, q: Point) -> Face:
        key, P = self.portion(cid, q)
        slot = self.owner.get(key)
        if slot is not None:
            return self.faces[slot]
        slot = len(self.faces)
        self.faces.append(None)
        sides: dict = {}
        todo = [(key, P)]
        self.owner[key] = slot
        while todo:
            (c, _), P = todo.pop()
            self.stats.portions += 1
            self.stats.zone_sizes.append(P.size)
            side_map = dict(P.sides)
            for j, lab in enumerate(P.labels):
                if lab[0] == "line":
                    sides[lab[1]] = side_map[lab[1]]
            tri = self.hc.cells[c].triangle
            for e, a, b in P.edge_segments():
                lkey, (lo, hi) = _seg_key(a, b)
                opp = tri[(e + 2) % 3]
                my_side = _side_of_key(lkey, opp)
                lid = self.line_id.get(lkey)
                if lid is not None:
                    sides[lid] = my_side
                    continue
                for (nlo, nhi, nc) in self._neighbours(lkey, -my_side, lo, hi):
                    olo, ohi = max(lo, nlo), min(hi, nhi)
                    m = _at_param(lkey, Fraction(olo + ohi) / 2)
                    nkey, NP = self.portion(nc, m)
                    prev = self.owner.get(nkey)
                    if prev is None:
                        self.owner[nkey] = slot
                        todo.append((nkey, NP))
                    elif prev != slot:
                        self.stats.portion_owner_conflicts += 1
        f = Face.from_sides(self.lines, sides)
        self.faces[slot] = f
        return f

    def _neighbours(self, key, side, lo, hi):
        lst = self.index.get((key, side), ())
        for nlo, nhi, nc in lst:
            if nlo >= hi:
                break
            if nhi > lo:
                yield nlo, nhi, nc


def many_faces_main(
    lines: Sequence[Line],
    points: Sequence[Point],
    r: Optional[int] = None,
    config: CuttingConfig = CuttingConfig(),
    stats: Optional[MainStats] = None,
    audit: bool = False,
) -> set:
    """Distinct faces containing the points: cut, solve per cell, glue zone portions across cell edges."""
    lines = list(lines)
    check_lines(lines)
    points = sorted(set(points))
    n, m = len(lines), len(points)
    if stats is None:
        stats = MainStats()
    if m == 0:
        return set()
    if n == 0:
        return {Face((), (), False)}
    if 2 * m >= n * n:
        stats.delegated = True
        return many_faces_naive(lines, points)
    if r is None:
        r = main_r(n, m)
    r = max(1, min(r, n))
    stats.r = r
    cfg = CuttingConfig(**{**config.__dict__, "refine_points": False})
    hc = build_hierarchical_cutting(lines, r, points=points, config=cfg)
    stats.cutting = dict(hc.meta)
    cells = hc.levels[hc.k]
    stats.cells = len(cells)
    glue = _Glue(lines, hc, cells, stats)
    out = set()
    for cid in cells:
        cell = hc.cells[cid]
        if not cell.points:
            continue
        sub = [lines[j] for j in cell.conflict]
        pts = [points[q] for q in cell.points]
        if sub:
            local = many_faces_fast_per_point(sub, pts, config=config, stats=stats.fast, audit=audit)
        else:
            local = [Face((), (), False)] * len(pts)
        for p, f in zip(pts, local):
            if f.bounded and all(point_in_triangle(v, cell.triangle) == 1 for v in f.vertices):
                g = Face.canonical([cell.conflict[e] for e in f.edges], f.vertices, True)
                stats.final_faces += 1
                out.add(g)
            else:
                out.add(glue.face_for(cid, p))
    stats.glued_faces = len(glue.faces)
    return out
