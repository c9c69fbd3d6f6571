"""Hull assembly on persistent chains.

Lower chains carry side = +1, upper chains side = -1; every turn test below
is multiplied by the side so one code path serves both orientations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from . import chain_tree as ct
from .chain_tree import LOWER, UPPER, ChainHandle
from .errors import DegenerateInput, EmptyChain, EmptyHull, HullsIntersect, NotSorted, SegmentsIntersect
from .face import Face
from .geom import Line, Point, intersect, orient

__all__ = [
    "Hull",
    "Face",
    "DualFace",
    "RepresentativeSegment",
    "EnvelopePiece",
    "hull_of_sorted",
    "lower_chain",
    "upper_chain",
    "tangent_from_point",
    "common_tangent",
    "common_tangent_lower",
    "envelope_of_disjoint_segments",
    "merge_chains",
    "merge_disjoint_hulls",
    "inner_common_tangents",
    "InnerTangents",
    "separating_slope",
    "tangent_line",
    "face_from_hulls",
]


@dataclass(frozen=True)
class Hull:
    lower: ChainHandle
    upper: ChainHandle

    @property
    def count(self) -> int:
        return max(self.lower.count, self.upper.count)

    def chain(self, side: int) -> ChainHandle:
        return self.lower if side == LOWER else self.upper


def _monotone(points: Sequence[Point], side: int) -> list:
    out: list = []
    for p in points:
        while len(out) >= 2 and side * orient(out[-2], out[-1], p) <= 0:
            out.pop()
        out.append(p)
    return out


def _dominant(points: Sequence[Point], side: int) -> list:
    """Keep one point per x: the lowest for a lower chain, the highest for an upper one."""
    out: list = []
    for p in points:
        if out and out[-1].x == p.x:
            if (side == LOWER) == (p.y < out[-1].y):
                out[-1] = p
            continue
        out.append(p)
    return out


def lower_chain(points: Sequence[Point]) -> ChainHandle:
    """Lower chain of points already sorted by (x, y); order is not rechecked."""
    return ct.build_from_sorted(_monotone(_dominant(points, LOWER), LOWER), LOWER, check=False)


def upper_chain(points: Sequence[Point]) -> ChainHandle:
    return ct.build_from_sorted(_monotone(_dominant(points, UPPER), UPPER), UPPER, check=False)


def hull_of_sorted(points: Sequence[Point]) -> Hull:
    """Monotone-chain hull of points sorted by (x, y).

    Points sharing an x-coordinate are allowed; the chains stay strictly
    x-monotone by keeping only the extreme point at that x.
    """
    for i in range(1, len(points)):
        if not points[i - 1] < points[i]:
            raise NotSorted(f"points not sorted at index {i}")
    return Hull(lower_chain(points), upper_chain(points))


def _violates(a: Point, b: Point, c: Point, side: int) -> bool:
    """c lies strictly on the wrong side (below for LOWER) of line ab."""
    if b.x < a.x:
        a, b = b, a
    return side * orient(a, b, c) < 0


def tangent_from_point(q: Point, chain: ChainHandle) -> Point:
    """Vertex v of the chain such that the line qv supports the chain; q lies outside its x-range."""
    if not chain:
        raise EmptyChain("tangent to an empty chain")
    side = chain.side

    def oracle(prev, v, nxt):
        if prev is not None and _violates(q, v, prev, side):
            return -1
        if nxt is not None and _violates(q, v, nxt, side):
            return 1
        return 0

    return ct.search(chain, oracle)


def common_tangent(a: ChainHandle, b: ChainHandle) -> tuple:
    """Supporting bitangent of two chains of the same side, ``a`` strictly left of ``b``."""
    if not a or not b:
        raise EmptyChain("common tangent with an empty chain")
    side = a.side
    found = {}

    def oracle(prev, u, nxt):
        w = tangent_from_point(u, b)
        if prev is not None and _violates(u, w, prev, side):
            return -1
        if nxt is not None and _violates(u, w, nxt, side):
            return 1
        found["w"] = w
        return 0

    u = ct.search(a, oracle)
    return u, found["w"]


def common_tangent_lower(a: ChainHandle, b: ChainHandle) -> tuple:
    return common_tangent(a, b)


class RepresentativeSegment(NamedTuple):
    owner: int
    left: Point
    right: Point


class EnvelopePiece(NamedTuple):
    lo: object
    hi: object
    owner: int
    lo_closed: bool
    hi_closed: bool


def _y_at(s: RepresentativeSegment, x):
    l, r = s.left, s.right
    if l.x == r.x:
        return l.y
    return l.y + Fraction((r.y - l.y) * (x - l.x)) / (r.x - l.x)


def _on_segment(p, a, b) -> bool:
    return orient(a, b, p) == 0 and min(a, b) <= p <= max(a, b)


def segments_intersect(s: RepresentativeSegment, t: RepresentativeSegment) -> bool:
    a, b, c, d = s.left, s.right, t.left, t.right
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return _on_segment(c, a, b) or _on_segment(d, a, b) or _on_segment(a, c, d) or _on_segment(b, c, d)


def envelope_of_disjoint_segments(
    segments: Sequence[RepresentativeSegment], side: int = LOWER
) -> list:
    """Maximal pieces of the lower (or upper) envelope, left to right.

    Each x on the envelope belongs to exactly one piece: an event abscissa is
    owned by the segment that is extreme there, open intervals between events
    by the segment extreme inside them.
    """
    if not segments:
        return []
    starts: dict = {}
    ends: dict = {}
    for i, s in enumerate(segments):
        if s.right.x < s.left.x:
            raise ValueError("representative segment endpoints out of order")
        starts.setdefault(s.left.x, []).append(i)
        ends.setdefault(s.right.x, []).append(i)
    xs = sorted(set(starts) | set(ends))

    active: list = []

    def key(i, x):
        return side * _y_at(segments[i], x)

    def check(i, j):
        if segments_intersect(segments[i], segments[j]):
            raise SegmentsIntersect(f"segments of owners {segments[i].owner} and {segments[j].owner} meet")

    entries: list = []  # (lo, hi, owner, lo_closed, hi_closed) or None for gaps
    for idx, x in enumerate(xs):
        for i in starts.get(x, ()):
            ki = key(i, x)
            lo, hi = 0, len(active)
            while lo < hi:
                mid = (lo + hi) // 2
                km = key(active[mid], x)
                if km == ki:
                    check(i, active[mid])
                    raise SegmentsIntersect("segments touch")
                if km < ki:
                    lo = mid + 1
                else:
                    hi = mid
            active.insert(lo, i)
            if lo > 0:
                check(active[lo - 1], i)
            if lo + 1 < len(active):
                check(i, active[lo + 1])
        entries.append((x, x, segments[active[0]].owner, True, True))
        for i in ends.get(x, ()):
            j = active.index(i)
            del active[j]
            if 0 < j < len(active):
                check(active[j - 1], active[j])
        if idx + 1 < len(xs):
            if active:
                entries.append((x, xs[idx + 1], segments[active[0]].owner, False, False))
            else:
                entries.append(None)

    pieces: list = []
    cur = None
    for e in entries:
        if e is None:
            if cur is not None:
                pieces.append(cur)
                cur = None
            continue
        if cur is not None and cur[2] == e[2]:
            cur = (cur[0], e[1], cur[2], cur[3], e[4])
        else:
            if cur is not None:
                pieces.append(cur)
            cur = e
    if cur is not None:
        pieces.append(cur)
    return [EnvelopePiece(*p) for p in pieces]


def _merge_two(a: ChainHandle, b: ChainHandle) -> ChainHandle:
    u, w = common_tangent(a, b)
    left, _ = ct.split_at_x(a, u.x)
    _, right = ct.split_before_x(b, w.x)
    return ct.join(left, right)


def merge_chains(chains: Sequence[ChainHandle], side: int = LOWER, stats: Optional[dict] = None) -> ChainHandle:
    """Hull chain of the union of pairwise disjoint convex chains.

    Envelope of representative segments, then clip each owner to its pieces
    and fold the pieces left to right with common tangents.  The inputs are
    untouched.
    """
    chains = [c for c in chains if c]
    if not chains:
        return ct.empty(side)
    if len(chains) == 1:
        return chains[0]
    segs = [RepresentativeSegment(i, c.leftmost, c.rightmost) for i, c in enumerate(chains)]
    try:
        pieces = envelope_of_disjoint_segments(segs, side)
    except SegmentsIntersect as exc:
        raise HullsIntersect(str(exc)) from exc
    if stats is not None:
        stats["pieces"] = stats.get("pieces", 0) + len(pieces)
    acc = None
    for pc in pieces:
        sub = ct.clip(chains[pc.owner], pc.lo, pc.hi, pc.lo_closed, pc.hi_closed)
        if not sub:
            continue
        acc = sub if acc is None else _merge_two(acc, sub)
    return acc if acc is not None else ct.empty(side)


def merge_disjoint_hulls(hulls: Sequence[Hull], side: int = LOWER) -> ChainHandle:
    return merge_chains([h.chain(side) for h in hulls], side)


# ---------------------------------------------------------------- tangents


def _extreme_value(chain: ChainHandle, s, side: int):
    """min over a lower chain (max over an upper chain) of y - s*x."""

    def val(p):
        return p.y - s * p.x

    def oracle(prev, v, nxt):
        fv = side * val(v)
        if prev is not None and side * val(prev) < fv:
            return -1
        if nxt is not None and side * val(nxt) < fv:
            return 1
        return 0

    return val(ct.search(chain, oracle))


def _slope(p: Point, q: Point):
    return Fraction(q.y - p.y) / (q.x - p.x)


class InnerTangents(NamedTuple):
    """Each tangent is a (vertex of H+, vertex of H-) pair, or None where the face is unbounded."""

    left: Optional[tuple]
    right: Optional[tuple]


def tangent_line(pair) -> Line:
    u, w = pair
    s = _slope(u, w)
    return Line(s, u.y - s * u.x)


def separating_slope(hplus: ChainHandle, hminus: ChainHandle):
    """Some slope s with min over H+ of (y - s x) above max over H- of (y - s x), or None."""

    def g(s):
        return _extreme_value(hplus, s, LOWER) - _extreme_value(hminus, s, UPPER)

    pts = {LOWER: hplus.to_list(), UPPER: hminus.to_list()}
    cands = [_slope(a, b) for vs in pts.values() for a, b in zip(vs, vs[1:])]
    cands.append(Fraction(0))
    lo, hi = min(cands), max(cands)
    step = Fraction(1)
    for _ in range(80):
        cands += [lo - step, hi + step]
        step *= 2
    for s in cands:
        if g(s) > 0:
            return s
    return None


def inner_common_tangents(hplus: ChainHandle, hminus: ChainHandle, slope=None) -> InnerTangents:
    """Public entry; finds a separating slope when none is given and rejects tangent-free inputs."""
    if not hplus or not hminus:
        raise EmptyHull("inner tangents need both hulls")
    if slope is None:
        slope = separating_slope(hplus, hminus)
        if slope is None:
            raise HullsIntersect("hulls are not separated by a non-vertical line")
    tg = _inner_tangents(hplus, hminus, slope)
    if tg.left is None and tg.right is None:
        raise DegenerateInput("hulls are separated only by a vertical line")
    return tg


def _inner_tangents(hplus: ChainHandle, hminus: ChainHandle, slope) -> InnerTangents:
    """Inner common tangents of a lower chain above and an upper chain below a line of the given slope.

    With g(s) = min_{H+}(y - s x) - max_{H-}(y - s x), the separating slopes
    form the interval where g > 0; the tangents are its finite endpoints.
    Both roots are located by binary search over chain breakpoints, each
    probe evaluating g with one more search on the other chain.
    """
    if not hplus or not hminus:
        raise EmptyChain("inner tangents need both hulls")
    s0 = slope

    def g_from_plus(u, e):
        return (u.y - e * u.x) - _extreme_value(hminus, e, UPPER)

    def g_from_minus(w, e):
        return _extreme_value(hplus, e, LOWER) - (w.y - e * w.x)

    left = right = None
    if hminus.rightmost.x > hplus.leftmost.x:
        # e > sL  <=>  e >= s0 or g(e) > 0
        def up_oracle(prev, u, nxt):
            if prev is not None:
                e = _slope(prev, u)
                if e >= s0 or g_from_plus(u, e) > 0:
                    return -1
            if nxt is not None:
                e = _slope(u, nxt)
                if not (e >= s0 or g_from_plus(u, e) > 0):
                    return 1
            return 0

        def down_oracle(prev, w, nxt):
            if prev is not None:
                e = _slope(prev, w)
                if not (e >= s0 or g_from_minus(w, e) > 0):
                    return -1
            if nxt is not None:
                e = _slope(w, nxt)
                if e >= s0 or g_from_minus(w, e) > 0:
                    return 1
            return 0

        left = (ct.search(hplus, up_oracle), ct.search(hminus, down_oracle))
    if hminus.leftmost.x < hplus.rightmost.x:
        # e < sR  <=>  e <= s0 or g(e) > 0
        def up_oracle_r(prev, u, nxt):
            if prev is not None:
                e = _slope(prev, u)
                if not (e <= s0 or g_from_plus(u, e) > 0):
                    return -1
            if nxt is not None:
                e = _slope(u, nxt)
                if e <= s0 or g_from_plus(u, e) > 0:
                    return 1
            return 0

        def down_oracle_r(prev, w, nxt):
            if prev is not None:
                e = _slope(prev, w)
                if e <= s0 or g_from_minus(w, e) > 0:
                    return -1
            if nxt is not None:
                e = _slope(w, nxt)
                if not (e <= s0 or g_from_minus(w, e) > 0):
                    return 1
            return 0

        right = (ct.search(hplus, up_oracle_r), ct.search(hminus, down_oracle_r))
    return InnerTangents(left, right)


def _dual_vertex(u: Point, w: Point) -> Point:
    """Primal point dual to the dual-plane line through u and w."""
    s = _slope(u, w)
    return Point(s, s * u.x - u.y)


@dataclass(frozen=True)
class DualFace:
    """Implicit face: the H+ and H- portions between the inner tangents."""

    lower: ChainHandle
    upper: ChainHandle
    tangents: InnerTangents

    @property
    def key(self):
        t = self.tangents
        if t.left is not None:
            return ("v", _dual_vertex(*t.left))
        return ("inf", self.lower.leftmost, self.upper.rightmost)

    @property
    def leftmost_vertex(self) -> Optional[Point]:
        return None if self.tangents.left is None else _dual_vertex(*self.tangents.left)

    @property
    def rightmost_vertex(self) -> Optional[Point]:
        return None if self.tangents.right is None else _dual_vertex(*self.tangents.right)

    def explicit(self, index_of, lines=None) -> Face:
        """Explicit primal face; vertices come from ``lines`` when the dual plane was rescaled."""
        lo = self.lower.to_list()
        up = self.upper.to_list()
        has_l = self.tangents.left is not None
        has_r = self.tangents.right is not None
        if has_l and has_r:
            seq, bounded = lo + up, True
        elif has_l:
            seq, bounded = up + lo, False
        elif has_r:
            seq, bounded = lo + up, False
        else:
            if lo and up:
                return Face.canonical([index_of[lo[0]], index_of[up[0]]], (), False)
            seq, bounded = lo or up, False
            if len(seq) == 1:
                return Face.canonical([index_of[seq[0]]], (), False, 1 if lo else -1)
        k = len(seq)
        npairs = k if bounded else k - 1
        edges = [index_of[p] for p in seq]
        if lines is None:
            verts = [_dual_vertex(seq[j], seq[(j + 1) % k]) for j in range(npairs)]
        else:
            verts = [intersect(lines[edges[j]], lines[edges[(j + 1) % k]]) for j in range(npairs)]
        return Face.canonical(edges, verts, bounded)


def face_from_hulls(hplus: ChainHandle, hminus: ChainHandle, pstar: Line) -> DualFace:
    """Implicit face of the query whose dual line is ``pstar``."""
    if hplus and hminus:
        tg = _inner_tangents(hplus, hminus, pstar.a)
    else:
        tg = InnerTangents(None, None)
    lo = hplus
    if tg.left is not None:
        _, lo = ct.split_before_x(lo, tg.left[0].x)
    if tg.right is not None:
        lo, _ = ct.split_at_x(lo, tg.right[0].x)
    up = hminus
    if tg.right is not None:
        _, up = ct.split_before_x(up, tg.right[1].x)
    if tg.left is not None:
        up, _ = ct.split_at_x(up, tg.left[1].x)
    return DualFace(lo, up, tg)
