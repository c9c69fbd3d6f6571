"""Brute-force ground truth for line arrangements.

The arrangement is stored implicitly: for every line the other lines sorted
by crossing abscissa, plus the inverse permutation.  Edge ``e`` of line ``i``
runs between its crossings ``e - 1`` and ``e``; a half-edge is ``(i, e, s)``
with ``s = +1`` traversed left to right (face above) and ``s = -1`` right to
left (face below).  Every face is walked counterclockwise.
"""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateInput, PointOnLine
from .face import Face
from .geom import Line, Point, Triangle, check_lines, intersect, orient, side_of_line

__all__ = [
    "Arrangement",
    "OracleStats",
    "ZonePortion",
    "build_arrangement",
    "face_of",
    "brute_face",
    "many_faces_naive",
    "zone_of_triangle",
    "zone_portion_at",
    "locate_below_above",
]


def _lcm_den(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


@dataclass
class OracleStats:
    K: int = 0
    face_sizes: list = field(default_factory=list)
    zone_sizes: list = field(default_factory=list)


class _Locator:
    """Exact 'line directly below / above a point' with a float prefilter."""

    def __init__(self, lines: Sequence[Line]):
        self.lines = list(lines)
        self.fa = np.array([float(l.a) for l in lines], dtype=float)
        self.fb = np.array([float(l.b) for l in lines], dtype=float)
        self.slope_rank = None

    def below_above(self, p: Point):
        if not self.lines:
            return None, None
        px, py = float(p.x), float(p.y)
        v = self.fa * px + self.fb
        d = py - v
        tol = 1e-9 * (abs(py) + np.abs(self.fa * px) + np.abs(self.fb) + 1.0)
        unsure = np.nonzero(np.abs(d) <= tol)[0]
        for i in unsure:
            if side_of_line(self.lines[i], p) == 0:
                raise PointOnLine(f"query point {p} lies on line {i}")
        return self._best(p, v, d, tol, unsure, 1), self._best(p, v, d, tol, unsure, -1)

    def _best(self, p, v, d, tol, unsure, sgn):
        # candidates strictly on the requested side of p
        mask = sgn * d > tol
        cand = list(np.nonzero(mask)[0])
        for i in unsure:
            if sgn * side_of_line(self.lines[i], p) > 0:
                cand.append(i)
        if not cand:
            return None
        cand = np.array(cand)
        vals = sgn * v[cand]
        top = vals.max()
        close = cand[vals >= top - 2 * tol[cand].max() - 1e-12 * abs(top)]
        x = p.x
        lines = self.lines
        # the best is the highest line below (sgn=+1) or lowest above; ties are vertices
        best = max(close, key=lambda i: (sgn * lines[i].at(x), sgn * lines[i].a))
        return int(best)


class Arrangement:
    """Full arrangement of lines in general position (parallel lines allowed)."""

    def __init__(self, lines: Sequence[Line], enumerate_faces: bool = True):
        check_lines(lines)
        self.lines = list(lines)
        n = len(lines)
        self.n = n
        la = _lcm_den(l.a for l in lines)
        lb = _lcm_den(l.b for l in lines)
        self.A = [int(l.a * la) for l in lines]
        self.B = [int(l.b * lb) for l in lines]
        self.order: list = []
        self.pos: list = []
        self._sort_crossings()
        self.base = array("q", [0] * (n + 1))
        for i in range(n):
            self.base[i + 1] = self.base[i] + 2 * (len(self.order[i]) + 1)
        self.num_halfedges = self.base[n]
        self.locator = _Locator(lines)
        self.face_id: Optional[array] = None
        self.face_start: list = []
        self.parallel_only = n > 0 and all(len(o) == 0 for o in self.order)
        if enumerate_faces:
            self._enumerate()

    # -- construction ---------------------------------------------------
    def _sort_crossings(self):
        n = self.n
        A, B = self.A, self.B
        fA = np.array(A, dtype=float)
        fB = np.array(B, dtype=float)
        for i in range(n):
            Ai, Bi = A[i], B[i]
            den = fA[i] - fA
            with np.errstate(divide="ignore", invalid="ignore"):
                key = (fB - fB[i]) / den
            valid = np.nonzero(den != 0)[0]
            # float division can claim parallel for huge integers; trust exact A
            others = [j for j in valid.tolist() if A[j] != Ai]
            exact_par = [j for j in range(n) if j != i and A[j] != Ai and fA[j] == fA[i]]
            others.extend(exact_par)
            idx = np.array(others, dtype=np.int64)
            if len(idx):
                idx = idx[np.argsort(key[idx], kind="stable")]
            ordl = idx.tolist()
            # exact verification of neighbours; any inversion falls back to an exact sort
            ok = True
            prev_n = prev_d = None
            for j in ordl:
                num, den_ = B[j] - Bi, Ai - A[j]
                if den_ < 0:
                    num, den_ = -num, -den_
                if prev_n is not None:
                    c = num * prev_d - prev_n * den_
                    if c == 0:
                        raise DegenerateInput(f"three concurrent lines at line {i}")
                    if c < 0:
                        ok = False
                        break
                prev_n, prev_d = num, den_
            if not ok:
                ordl.sort(key=lambda j: Fraction(B[j] - Bi, Ai - A[j]))
                for a, b in zip(ordl, ordl[1:]):
                    if Fraction(B[a] - Bi, Ai - A[a]) == Fraction(B[b] - Bi, Ai - A[b]):
                        raise DegenerateInput(f"three concurrent lines at line {i}")
            self.order.append(array("i", ordl))
        for i in range(n):
            p = array("i", [-1]) * n
            for t, j in enumerate(self.order[i]):
                p[j] = t
            self.pos.append(p)

    def hid(self, i: int, e: int, s: int) -> int:
        return self.base[i] + 2 * e + (0 if s > 0 else 1)

    # -- walking ----------------------------------------------------------
    def next_he(self, i: int, e: int, s: int):
        """Half-edge following (i, e, s) on its face, or None at a ray end."""
        order = self.order[i]
        if s > 0:
            if e >= len(order):
                return None
            j = order[e]
        else:
            if e == 0:
                return None
            j = order[e - 1]
        sj = 1 if s * (self.A[j] - self.A[i]) > 0 else -1
        k = self.pos[j][i]
        return (j, k + 1 if sj > 0 else k, sj)

    def prev_he(self, i: int, e: int, s: int):
        order = self.order[i]
        if s > 0:
            if e == 0:
                return None
            j = order[e - 1]
        else:
            if e >= len(order):
                return None
            j = order[e]
        sj = 1 if s * (self.A[i] - self.A[j]) > 0 else -1
        k = self.pos[j][i]
        return (j, k if sj > 0 else k + 1, sj)

    def cycle(self, he):
        """(half-edges in counterclockwise order starting at the incoming ray or at he, bounded)."""
        seq = [he]
        h = self.next_he(*he)
        while h is not None and h != he:
            seq.append(h)
            h = self.next_he(*h)
        if h == he:
            return seq, True
        back = []
        h = self.prev_he(*he)
        while h is not None:
            back.append(h)
            h = self.prev_he(*h)
        back.reverse()
        return back + seq, False

    def _enumerate(self):
        fid = array("i", [-1]) * self.num_halfedges
        self.face_id = fid
        if self.n == 0:
            self.face_start = [None]
            return
        if self.parallel_only:
            # strips between consecutive parallel lines, ordered by intercept
            idx = sorted(range(self.n), key=lambda i: self.lines[i].b)
            self.face_start.append((idx[0], 0, -1))
            fid[self.hid(idx[0], 0, -1)] = 0
            for t, i in enumerate(idx):
                self.face_start.append((i, 0, 1))
                fid[self.hid(i, 0, 1)] = t + 1
                if t + 1 < len(idx):
                    fid[self.hid(idx[t + 1], 0, -1)] = t + 1
            return
        nf = 0
        for i in range(self.n):
            for e in range(len(self.order[i]) + 1):
                for s in (1, -1):
                    if fid[self.hid(i, e, s)] >= 0:
                        continue
                    seq, _ = self.cycle((i, e, s))
                    for h in seq:
                        fid[self.hid(*h)] = nf
                    self.face_start.append(seq[0])
                    nf += 1

    # -- queries ----------------------------------------------------------
    @property
    def num_vertices(self) -> int:
        return sum(len(o) for o in self.order) // 2

    @property
    def num_edges(self) -> int:
        return sum(len(o) + 1 for o in self.order)

    @property
    def num_faces(self) -> int:
        return len(self.face_start)

    def _crossing_x(self, i: int, j: int) -> Fraction:
        li, lj = self.lines[i], self.lines[j]
        return Fraction(lj.b - li.b) / (li.a - lj.a)

    def locate_he(self, p: Point):
        """A half-edge on the boundary of the face containing p (None for the empty arrangement)."""
        below, above = self.locator.below_above(p)
        if below is None and above is None:
            return None
        i, s = (below, 1) if below is not None else (above, -1)
        order = self.order[i]
        lo, hi = 0, len(order)
        x = p.x
        # crossings with abscissa <= x lie left of the edge
        while lo < hi:
            mid = (lo + hi) // 2
            if self._crossing_x(i, order[mid]) <= x:
                lo = mid + 1
            else:
                hi = mid
        # a tie at a vertex picks the line whose edge right of the vertex bounds the face
        return (i, lo, s)

    def face_index(self, p: Point) -> int:
        he = self.locate_he(p)
        if he is None:
            return 0
        if self.face_id is not None:
            return self.face_id[self.hid(*he)]
        raise RuntimeError("faces were not enumerated")

    def face_from_he(self, he) -> Face:
        if he is None:
            return Face((), (), False)
        if self.parallel_only:
            i, _, s = he
            idx = sorted(range(self.n), key=lambda t: self.lines[t].b)
            t = idx.index(i)
            if s > 0:
                edges = [i] + ([idx[t + 1]] if t + 1 < len(idx) else [])
            else:
                edges = ([idx[t - 1]] if t > 0 else []) + [i]
            return Face.canonical(edges, (), False, 1 if s > 0 else -1)
        seq, bounded = self.cycle(he)
        edges = [h[0] for h in seq]
        k = len(edges)
        npairs = k if bounded else k - 1
        verts = [intersect(self.lines[edges[j]], self.lines[edges[(j + 1) % k]]) for j in range(npairs)]
        return Face.canonical(edges, verts, bounded)

    def face(self, fid: int) -> Face:
        return self.face_from_he(self.face_start[fid])

    def face_of(self, p: Point) -> Face:
        return self.face_from_he(self.locate_he(p))

    def faces(self) -> list:
        return [self.face(f) for f in range(self.num_faces)]

    def check_counts(self) -> bool:
        """Closed-form counts for general position without parallel pairs."""
        n = self.n
        return (
            self.num_vertices == n * (n - 1) // 2
            and self.num_faces == 1 + n + n * (n - 1) // 2
            and self.num_vertices - self.num_edges + self.num_faces == 1
        )


def build_arrangement(lines: Sequence[Line], enumerate_faces: bool = True) -> Arrangement:
    return Arrangement(lines, enumerate_faces)


def face_of(arr: Arrangement, p: Point) -> Face:
    return arr.face_of(p)


def locate_below_above(lines: Sequence[Line], p: Point):
    return _Locator(lines).below_above(p)


def brute_face(lines: Sequence[Line], p: Point) -> Face:
    """Cubic-time reference: a line bounds the face iff the other constraints leave an open interval on it."""
    sides = {}
    for i, l in enumerate(lines):
        s = side_of_line(l, p)
        if s == 0:
            raise PointOnLine(f"query point {p} lies on line {i}")
        sides[i] = s
    edges = {}
    for i, li in enumerate(lines):
        lo: Optional[Fraction] = None
        hi: Optional[Fraction] = None
        empty = False
        for j, lj in enumerate(lines):
            if j == i:
                continue
            # s_j * ((a_i - a_j) x + b_i - b_j) > 0 on line i
            c1 = sides[j] * (li.a - lj.a)
            c0 = sides[j] * (li.b - lj.b)
            if c1 == 0:
                if c0 <= 0:
                    empty = True
                    break
                continue
            bound = Fraction(-c0) / c1
            if c1 > 0:
                lo = bound if lo is None or bound > lo else lo
            else:
                hi = bound if hi is None or bound < hi else hi
        if empty or (lo is not None and hi is not None and lo >= hi):
            continue
        edges[i] = sides[i]
    return Face.from_sides(lines, edges)


def many_faces_naive(
    lines: Sequence[Line], points: Iterable[Point], stats: Optional[OracleStats] = None,
    arrangement: Optional[Arrangement] = None,
) -> set:
    """Build the whole arrangement, locate every point, report each face once."""
    arr = arrangement if arrangement is not None else build_arrangement(lines)
    seen: dict = {}
    for p in points:
        fid = arr.face_index(p)
        if fid not in seen:
            seen[fid] = arr.face(fid)
    if stats is not None:
        stats.K = arr.num_vertices
        stats.face_sizes = [f.size for f in seen.values()]
    return set(seen.values())


# ----------------------------------------------------------------- zones


@dataclass(frozen=True)
class ZonePortion:
    """F ∩ t for one face F meeting the boundary of t.

    ``labels[i]`` names the side from ``polygon[i]`` to ``polygon[i + 1]``:
    ``("line", id)`` for an input line or ``("edge", k)`` for side k of t.
    """

    polygon: tuple
    labels: tuple
    sides: tuple  # (line id, side of the portion) for every clipping line

    def edge_segments(self):
        k = len(self.polygon)
        for j, lab in enumerate(self.labels):
            if lab[0] == "edge":
                yield lab[1], self.polygon[j], self.polygon[(j + 1) % k]

    @property
    def size(self) -> int:
        return sum(1 for lab in self.labels if lab[0] == "line")


def _clip(poly, lid, line: Line, sgn: int):
    def d(v):
        return sgn * (v.y - line.a * v.x - line.b)

    out = []
    k = len(poly)
    ds = [d(v) for v, _ in poly]
    for j in range(k):
        (v, lab), (w, _) = poly[j], poly[(j + 1) % k]
        dv, dw = ds[j], ds[(j + 1) % k]
        if dv >= 0:
            if dw < 0:
                if dv == 0:
                    out.append((v, ("line", lid)))
                else:
                    out.append((v, lab))
                    t = Fraction(dv) / (dv - dw)
                    out.append((Point(v.x + t * (w.x - v.x), v.y + t * (w.y - v.y)), ("line", lid)))
            else:
                out.append((v, lab))
        elif dw > 0:
            t = Fraction(dv) / (dv - dw)
            out.append((Point(v.x + t * (w.x - v.x), v.y + t * (w.y - v.y)), lab))
    return out


def zone_portion_at(lines: Sequence[Line], ids: Sequence[int], t: Sequence[Point], q: Point) -> ZonePortion:
    """Portion of the face of the lines ``ids`` containing q, clipped to the convex polygon t."""
    poly = [(Point(v[0], v[1]), ("edge", j)) for j, v in enumerate(t)]
    sides = []
    for lid in ids:
        l = lines[lid]
        s = side_of_line(l, q)
        if s == 0:
            raise PointOnLine(f"point {q} lies on line {lid}")
        sides.append((lid, s))
        poly = _clip(poly, lid, l, s)
    return ZonePortion(tuple(v for v, _ in poly), tuple(lab for _, lab in poly), tuple(sides))


def _boundary_fragments(lines: Sequence[Line], ids: Sequence[int], t: Sequence[Point]):
    """Midpoints of the pieces into which crossing lines cut the boundary of t."""
    mids = []
    k = len(t)
    for j in range(k):
        v, w = t[j], t[(j + 1) % k]
        params = {Fraction(0), Fraction(1)}
        for lid in ids:
            l = lines[lid]
            dv = v[1] - l.a * v[0] - l.b
            dw = w[1] - l.a * w[0] - l.b
            if (dv > 0 and dw < 0) or (dv < 0 and dw > 0):
                params.add(Fraction(dv) / (dv - dw))
            elif dv == 0 and dw == 0:
                raise DegenerateInput(f"line {lid} contains a side of the triangle")
        ps = sorted(params)
        for a, b in zip(ps, ps[1:]):
            m = (a + b) / 2
            mids.append((j, Point(v[0] + m * (w[0] - v[0]), v[1] + m * (w[1] - v[1]))))
    return mids


def _on_segment(p, a, b) -> bool:
    return orient(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def zone_of_triangle(lines: Sequence[Line], t, stats: Optional[OracleStats] = None) -> list:
    """Face portions of the arrangement of the lines crossing t that touch t's boundary."""
    tri = [Point(v[0], v[1]) for v in t]
    if orient(*tri) < 0:
        tri = [tri[0], tri[2], tri[1]]
    ids = [i for i, l in enumerate(lines) if _crosses(l, tri)]
    for v in tri:
        hits = [i for i in ids if side_of_line(lines[i], v) == 0]
        if len(hits) > 1:
            raise DegenerateInput("a triangle corner is an arrangement vertex")
    portions = []
    for j, m in _boundary_fragments(lines, ids, tri):
        if any(_on_segment(m, a, b) for P in portions for (_, a, b) in P.edge_segments()):
            continue
        portions.append(zone_portion_at(lines, ids, tri, m))
    if stats is not None:
        stats.zone_sizes.append(sum(P.size for P in portions))
    return portions


def _crosses(l: Line, poly) -> bool:
    pos = neg = False
    for v in poly:
        d = v[1] - l.a * v[0] - l.b
        pos |= d > 0
        neg |= d < 0
    return pos and neg
