"""Faces of segment arrangements by brute force, with an independent cross-check.

``segment_faces_naive`` builds the planar subdivision explicitly: split the
segments at their crossings, sort half-edges around vertices, trace boundary
cycles and attach hole cycles to the faces around them.  A face is reported
as its outer cycle (None for the unbounded face) and the set of hole cycles,
each cycle a tuple of half-edge keys ``(segment, piece, side)`` where side is
+1 when the face lies above the piece.

``segment_faces_trapezoid`` is a second implementation that shares nothing
with the first beyond the predicates: it cuts the plane into vertical slabs,
splits each slab into trapezoids and flood-fills across slab boundaries.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import NamedTuple, Optional, Sequence

from .errors import DegenerateInput, PointOnLine
from .geom import Point, orient


class Segment(NamedTuple):
    p: Point
    q: Point

    @classmethod
    def of(cls, x1, y1, x2, y2) -> "Segment":
        a, b = Point.of(x1, y1), Point.of(x2, y2)
        return cls(*sorted((a, b)))

    def y_at(self, x) -> Fraction:
        p, q = self.p, self.q
        return p.y + Fraction((q.y - p.y) * (x - p.x)) / (q.x - p.x)


@dataclass(frozen=True)
class SegmentFace:
    outer: Optional[tuple]
    holes: frozenset

    @property
    def bounded(self) -> bool:
        return self.outer is not None

    def half_edges(self) -> frozenset:
        out = set(self.outer or ())
        for h in self.holes:
            out.update(h)
        return frozenset(out)

    @property
    def size(self) -> int:
        return len(self.outer or ()) + sum(len(h) for h in self.holes)


def _normalize(segments) -> list:
    out = []
    for s in segments:
        a, b = sorted((s[0], s[1]))
        if a.x == b.x:
            raise DegenerateInput(f"vertical or empty segment {s}")
        out.append(Segment(a, b))
    return out


def _crossing(s: Segment, t: Segment) -> Optional[Point]:
    """Proper crossing point, None when disjoint; touching and overlap are degenerate."""
    o1, o2 = orient(s.p, s.q, t.p), orient(s.p, s.q, t.q)
    o3, o4 = orient(t.p, t.q, s.p), orient(t.p, t.q, s.q)
    if o1 == o2 == 0:
        if max(s.p, t.p) <= min(s.q, t.q):
            raise DegenerateInput("overlapping collinear segments")
        return None
    if o1 * o2 > 0 or o3 * o4 > 0:
        return None
    if 0 in (o1, o2, o3, o4):
        raise DegenerateInput("a segment endpoint touches another segment")
    # parametric intersection
    dx1, dy1 = s.q.x - s.p.x, s.q.y - s.p.y
    dx2, dy2 = t.q.x - t.p.x, t.q.y - t.p.y
    den = dx1 * dy2 - dy1 * dx2
    u = Fraction((t.p.x - s.p.x) * dy2 - (t.p.y - s.p.y) * dx2) / den
    return Point(s.p.x + u * dx1, s.p.y + u * dy1)


def _split_points(segs: list):
    """Sorted vertex lists along every segment, checking for triple points."""
    pts = [[s.p, s.q] for s in segs]
    seen: dict = {}
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            x = _crossing(segs[i], segs[j])
            if x is None:
                continue
            if x in seen:
                raise DegenerateInput(f"three segments meet at {x}")
            seen[x] = (i, j)
            pts[i].append(x)
            pts[j].append(x)
    ends = [e for s in segs for e in s]
    if len(set(ends)) != len(ends):
        raise DegenerateInput("segments share an endpoint")
    if any(e in seen for e in ends):  # pragma: no cover - ruled out by the touch test
        raise DegenerateInput("an endpoint lies on a crossing")
    return [sorted(v) for v in pts]


def _direction_cmp(d1, d2) -> int:
    def half(d):
        return 0 if d[1] > 0 or (d[1] == 0 and d[0] > 0) else 1

    h1, h2 = half(d1), half(d2)
    if h1 != h2:
        return h1 - h2
    c = d1[0] * d2[1] - d1[1] * d2[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


def _winding(poly: Sequence[Point], p: Point) -> int:
    w = 0
    k = len(poly)
    for i in range(k):
        a, b = poly[i], poly[(i + 1) % k]
        if a.y <= p.y:
            if b.y > p.y and orient(a, b, p) > 0:
                w += 1
        elif b.y <= p.y and orient(a, b, p) < 0:
            w -= 1
    return w


def _area2(poly: Sequence[Point]):
    k = len(poly)
    return sum(poly[i].x * poly[(i + 1) % k].y - poly[(i + 1) % k].x * poly[i].y for i in range(k))


def _canonical_cycle(keys: list) -> tuple:
    k = len(keys)
    best = min(range(k), key=lambda r: keys[r:] + keys[:r])
    return tuple(keys[best:] + keys[:best])


class SegmentArrangement:
    """Explicit subdivision of the plane by segments in general position."""

    def __init__(self, segments):
        self.segments = _normalize(segments)
        segs = self.segments
        self.along = _split_points(segs)
        # half-edges: (seg, piece, side); side +1 runs left to right with the face above
        out: dict = {}
        self.ends = {}
        for s, vs in enumerate(self.along):
            for k in range(len(vs) - 1):
                a, b = vs[k], vs[k + 1]
                self.ends[(s, k, 1)] = (a, b)
                self.ends[(s, k, -1)] = (b, a)
                out.setdefault(a, []).append((s, k, 1))
                out.setdefault(b, []).append((s, k, -1))
        self.rot = {}
        for v, hs in out.items():
            def d(h, v=v):
                a, b = self.ends[h]
                return (b.x - a.x, b.y - a.y)

            hs.sort(key=cmp_to_key(lambda h1, h2: _direction_cmp(d(h1), d(h2))))
            for t, h in enumerate(hs):
                self.rot[h] = (hs, t)
        self._trace()
        self._assemble()

    def _next(self, h):
        s, k, side = h
        twin = (s, k, -side)
        hs, t = self.rot[twin]
        return hs[t - 1]

    def _trace(self):
        self.cycles = []
        cycle_of = {}
        for h in self.ends:
            if h in cycle_of:
                continue
            seq = [h]
            cycle_of[h] = len(self.cycles)
            g = self._next(h)
            while g != h:
                cycle_of[g] = len(self.cycles)
                seq.append(g)
                g = self._next(g)
            self.cycles.append(seq)
        self.cycle_of = cycle_of
        # components by union-find over crossing segments
        parent = list(range(len(self.segments)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        owner = {}
        for s, vs in enumerate(self.along):
            for v in vs[1:-1]:
                if v in owner:
                    parent[find(s)] = find(owner[v])
                else:
                    owner[v] = s
        self.component = [find(self.cycles[c][0][0]) for c in range(len(self.cycles))]
        self.polys = [[self.ends[h][0] for h in cyc] for cyc in self.cycles]
        self.areas = [_area2(p) for p in self.polys]

    def _enclosing(self, p: Point, skip_component=None) -> Optional[int]:
        best = None
        for c, area in enumerate(self.areas):
            if area <= 0 or self.component[c] == skip_component:
                continue
            if _winding(self.polys[c], p) != 0 and (best is None or area < self.areas[best]):
                best = c
        return best

    def _assemble(self):
        holes: dict = {}
        for c, area in enumerate(self.areas):
            if area > 0:
                continue
            host = self._enclosing(self.polys[c][0], self.component[c])
            holes.setdefault(host, []).append(c)
        self.face_of_cycle = {}
        self.faces = {}
        for c, area in enumerate(self.areas):
            if area > 0:
                self.faces[c] = self._face(c, holes.get(c, []))
        self.faces[None] = self._face(None, holes.get(None, []))

    def _face(self, outer, hole_ids) -> SegmentFace:
        o = _canonical_cycle(self.cycles[outer]) if outer is not None else None
        hs = frozenset(_canonical_cycle(self.cycles[h]) for h in hole_ids)
        return SegmentFace(o, hs)

    def face_of(self, p: Point) -> SegmentFace:
        for s in self.segments:
            if orient(s.p, s.q, p) == 0 and s.p <= p <= s.q:
                raise PointOnLine(f"point {p} lies on segment {s}")
        return self.faces[self._enclosing(p)]


def segment_faces_naive(segments, points: Sequence[Point]) -> set:
    """Distinct faces of the segment arrangement containing at least one point."""
    arr = SegmentArrangement(segments)
    return {arr.face_of(p) for p in points}


# ------------------------------------------------------------ flood-fill oracle


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def segment_faces_trapezoid(segments, points: Sequence[Point]) -> list:
    """Half-edge sets of the faces containing each point, via vertical slabs and flood fill.

    Returns one frozenset per query point, in order.
    """
    segs = _normalize(segments)
    along = _split_points(segs)
    xs = sorted({v.x for vs in along for v in vs})
    along_x = [[v.x for v in vs] for vs in along]
    if not xs:
        return [frozenset() for _ in points]

    # slab j spans (xs[j-1], xs[j]); slab 0 and slab len(xs) are unbounded
    def sample(j):
        if j == 0:
            return xs[0] - 1
        if j == len(xs):
            return xs[-1] + 1
        return Fraction(xs[j - 1] + xs[j]) / 2

    slabs = []
    for j in range(len(xs) + 1):
        x = sample(j)
        live = [s for s, g in enumerate(segs) if g.p.x < x < g.q.x]
        live.sort(key=lambda s: segs[s].y_at(x))
        slabs.append(live)

    def piece(s, j):
        return bisect_right(along_x[s], xs[j - 1]) - 1

    def bound_keys(j, t):
        live = slabs[j]
        keys = []
        if t > 0:
            s = live[t - 1]
            keys.append((s, piece(s, j), 1))
        if t < len(live):
            s = live[t]
            keys.append((s, piece(s, j), -1))
        return keys

    def interval(j, t, x):
        live = slabs[j]
        lo = segs[live[t - 1]].y_at(x) if t > 0 else None
        hi = segs[live[t]].y_at(x) if t < len(live) else None
        return lo, hi

    dsu = _DSU()
    for j in range(len(xs) + 1):
        for t in range(len(slabs[j]) + 1):
            dsu.find((j, t))
    for j in range(len(xs)):
        x = xs[j]
        left, right = slabs[j], slabs[j + 1]
        for a in range(len(left) + 1):
            la, ha = interval(j, a, x)
            for b in range(len(right) + 1):
                lb, hb = interval(j + 1, b, x)
                lo = la if lb is None else (lb if la is None else max(la, lb))
                hi = ha if hb is None else (hb if ha is None else min(ha, hb))
                if lo is None or hi is None or lo < hi:
                    dsu.union((j, a), (j + 1, b))
    edges: dict = {}
    for j in range(len(xs) + 1):
        for t in range(len(slabs[j]) + 1):
            edges.setdefault(dsu.find((j, t)), set()).update(bound_keys(j, t))
    out = []
    for p in points:
        j = bisect_left(xs, p.x)
        if j < len(xs) and xs[j] == p.x:
            # on a slab boundary: nudge into the slab on the right
            j += 1
        x = p.x
        live = slabs[j]
        t = 0
        for s in live:
            g = segs[s]
            if g.p.x <= x <= g.q.x:
                y = g.y_at(x)
                if y == p.y:
                    raise PointOnLine(f"point {p} lies on segment {s}")
                if y < p.y:
                    t += 1
        out.append(frozenset(edges[dsu.find((j, t))]))
    return out
