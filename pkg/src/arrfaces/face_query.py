"""Single-face queries over a fixed set of lines.

The dual points of the lines are stored in a partition tree whose nodes carry
persistent hull chains.  A query point p has dual line p*; the canonical
nodes on either side of p* give the two hulls whose inner common tangents
delimit the face.  In the tradeoff variant leaves hold up to r points and
carry the full arrangement of their lines, so a crossed leaf contributes the
boundary chains of the face of p in that small arrangement.

The tree is a recursive four-way split: a halving line followed by a
ham-sandwich cut of the two halves.  Any line crosses at most three of the
four children, so canonical sets have size O(n^log4(3)).
"""
from __future__ import annotations

import math
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import chain_tree as ct
from .chain_tree import LOWER, UPPER, ChainHandle
from .cuttings import _split
from .errors import DegenerateInput, ParamRange, PointOnBoundary, PointOnLine
from .face import Face
from .geom import ABOVE, BELOW, Line, Point, check_lines, classify_polygon, side_of_line
from .hulls import Hull, face_from_hulls, lower_chain, merge_chains, upper_chain
from .many_faces import _qline, _scaled
from .oracle import Arrangement


@dataclass
class PartitionNode:
    id: int
    depth: int
    region: tuple  # convex polygon, counterclockwise
    points: list  # indices into the tree's point list, sorted by (x, y)
    children: list = field(default_factory=list)
    hull: Optional[Hull] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def count(self) -> int:
        return len(self.points)


@dataclass
class PartitionTree:
    points: list
    capacity: int
    nodes: list
    meta: dict = field(default_factory=dict)

    @property
    def root(self) -> PartitionNode:
        return self.nodes[0]

    @property
    def height(self) -> int:
        return max(v.depth for v in self.nodes)

    def leaves(self) -> list:
        return [v for v in self.nodes if v.is_leaf]

    def level(self, d: int) -> list:
        """Nodes at depth d together with leaves above d, which tile the point set."""
        return [v for v in self.nodes if v.depth == d or (v.is_leaf and v.depth < d)]


@dataclass
class CanonicalAnswer:
    """Nodes inside the half-plane plus crossed leaves with their points inside."""

    nodes: list
    partial: list  # (leaf id, point indices inside h)

    @property
    def size(self) -> int:
        return len(self.nodes) + len(self.partial)

    def points(self, tree: PartitionTree) -> list:
        out = [q for v in self.nodes for q in tree.nodes[v].points]
        out += [q for _, qs in self.partial for q in qs]
        return sorted(out)


# ------------------------------------------------------------ halving lines


def _values(pts: Sequence[Point], s: Fraction) -> list:
    # y - s*x scaled by s's denominator, exact integers for integer points
    p, q = s.numerator, s.denominator
    return [q * v.y - p * v.x for v in pts]


def _gap(vals: list):
    """Open interval of intercepts that splits vals into halves of size <= ceil(k/2).

    Returns (lo, hi, forbidden) with None for unbounded ends, or None when the
    median values collide and no such interval exists.
    """
    k = len(vals)
    if k == 0:
        return (None, None, ())
    v = sorted(vals)
    if k % 2 == 0:
        lo, hi = v[k // 2 - 1], v[k // 2]
        return None if lo == hi else (lo, hi, ())
    mid = v[k // 2]
    lo = v[k // 2 - 1] if k > 1 else None
    hi = v[k // 2 + 1] if k > 1 else None
    if (lo is not None and lo == mid) or (hi is not None and hi == mid):
        return None
    return (lo, hi, (mid,))


def _meet(g1, g2):
    """An intercept strictly inside both gaps avoiding the forbidden values, or None."""
    if g1 is None or g2 is None:
        return None
    los = [g[0] for g in (g1, g2) if g[0] is not None]
    his = [g[1] for g in (g1, g2) if g[1] is not None]
    lo = max(los) if los else None
    hi = min(his) if his else None
    if lo is not None and hi is not None and lo >= hi:
        return None
    bad = sorted(set(g1[2]) | set(g2[2]))
    if lo is None:
        lo = min(bad + ([hi] if hi is not None else []) + [0]) - 2
    if hi is None:
        hi = max(bad + [lo, 0]) + 2
    cuts = sorted({Fraction(lo), Fraction(hi)} | {Fraction(b) for b in bad if lo < b < hi})
    a, b = max(zip(cuts, cuts[1:]), key=lambda ab: ab[1] - ab[0])
    return (a + b) / 2


def _line_for(s: Fraction, c) -> Line:
    return Line(s, Fraction(c) / s.denominator)


def _center(g):
    lo, hi, bad = g
    if lo is None and hi is None:
        return Fraction(bad[0]) if bad else None
    if lo is None:
        return Fraction(hi) - 1
    if hi is None:
        return Fraction(lo) + 1
    return Fraction(lo + hi, 2)


def halving_line(pts: Sequence[Point]) -> Line:
    """A non-vertical line missing all points with at most ceil(k/2) on each side."""
    for s in _slope_candidates():
        g = _gap(_values(pts, s))
        if g is not None:
            c = _meet(g, (None, None, ()))
            return _line_for(s, c)
    raise DegenerateInput("no halving line found")  # pragma: no cover


def _slope_candidates():
    yield Fraction(0)
    k = 1
    while True:
        for num in range(1, 2 * k + 1):
            yield Fraction(num, k)
            yield Fraction(-num, k)
        k += 1


def ham_sandwich(a: Sequence[Point], b: Sequence[Point], max_steps: int = 400) -> Optional[Line]:
    """A line halving both point sets (each side at most ceil(|X|/2)), or None.

    Bisects over the slope until the two median gaps overlap.  The medians are
    continuous in the slope and swap order between steep positive and steep
    negative slopes, so a crossing exists whenever the x-medians differ.
    """
    if not a or not b:
        pts = a or b
        return halving_line(pts) if pts else None

    def probe(s):
        ga, gb = _gap(_values(a, s)), _gap(_values(b, s))
        c = _meet(ga, gb)
        if c is not None:
            return _line_for(s, c), 0
        if ga is None or gb is None:
            return None, None
        ca, cb = _center(ga), _center(gb)
        if ca is None or cb is None:
            return None, None
        return None, (1 if ca > cb else -1)

    pts = list(a) + list(b)
    xs = sorted({p.x for p in pts})
    ys = [p.y for p in pts]
    gap = min((q - p for p, q in zip(xs, xs[1:])), default=1)
    big = Fraction(2 * (max(ys) - min(ys)) + 2, gap) + 1
    ends = []
    for s in (Fraction(0), big, -big):
        line, sgn = probe(s)
        if line is not None:
            return line
        ends.append((s, sgn))
    lo = hi = None
    for s1, g1 in ends:
        for s2, g2 in ends:
            if g1 is not None and g2 is not None and g1 < 0 < g2:
                lo, hi = (s1, s2)
                break
        if lo is not None:
            break
    if lo is None:
        return None
    for _ in range(max_steps):
        mid = _round_slope((lo + hi) / 2, lo, hi)
        line, sgn = probe(mid)
        if line is not None:
            return line
        if sgn is None:
            # median tie at this slope; nudge
            mid = (lo + 2 * hi) / 3
            line, sgn = probe(mid)
            if line is not None:
                return line
            if sgn is None:
                return None
        if sgn < 0:
            lo = mid
        else:
            hi = mid
    return None


def _round_slope(s: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    # keep denominators small when an equally good nearby slope exists
    t = s.limit_denominator(1 << 20)
    return t if min(lo, hi) < t < max(lo, hi) else s


# ------------------------------------------------------------ partition tree


def _box(pts: Sequence[Point]) -> tuple:
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    x0, x1 = min(xs) - 1, max(xs) + 1
    y0, y1 = min(ys) - 1, max(ys) + 1
    return (Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1))


def _cut(region, pts, idx, line):
    """Split a region and its point indices by a line missing every point."""
    below, above = [], []
    for q in idx:
        s = side_of_line(line, pts[q])
        if s == 0:
            raise DegenerateInput("cut line passes through a point")
        (above if s > 0 else below).append(q)
    kind = classify_polygon(line, region)
    if kind == ABOVE:
        return [(tuple(region), above + below)]
    if kind == BELOW:
        return [(tuple(region), above + below)]
    rb, ra = _split(list(region), line)
    return [(tuple(rb), below), (tuple(ra), above)]


def build_partition_tree(points: Sequence[Point], r: int = 1) -> PartitionTree:
    """Partition tree with leaves of at most r points and hulls at every node.

    Points must be distinct.  Node hulls are built from point lists that stay
    sorted on the way down, so every node costs linear time in its size.
    """
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise DegenerateInput("duplicate points")
    if r < 1 or (pts and r > len(pts)):
        raise ParamRange(f"leaf capacity {r} outside [1, {len(pts)}]")
    order = sorted(range(len(pts)), key=pts.__getitem__)
    tree = PartitionTree(pts, r, [])
    if not pts:
        tree.nodes.append(PartitionNode(0, 0, (), [], hull=Hull(ct.empty(LOWER), ct.empty(UPPER))))
        return tree
    fallbacks = 0
    stack = [(0, _box(pts), order, None)]
    while stack:
        depth, region, idx, parent = stack.pop()
        node = PartitionNode(len(tree.nodes), depth, region, idx)
        sub = [pts[q] for q in idx]
        node.hull = Hull(lower_chain(sub), upper_chain(sub))
        tree.nodes.append(node)
        if parent is not None:
            tree.nodes[parent].children.append(node.id)
        if len(idx) <= r:
            continue
        l1 = halving_line(sub)
        halves = _cut(region, pts, idx, l1)
        a = [pts[q] for q in halves[0][1]] if len(halves) == 2 else []
        b = [pts[q] for q in halves[1][1]] if len(halves) == 2 else []
        l2 = ham_sandwich(a, b)
        if l2 is None:
            fallbacks += 1
        parts = []
        for reg, ids in halves:
            if l2 is None:
                parts.append((reg, ids))
                continue
            parts += _cut(reg, pts, ids, l2) if ids else []
        for reg, ids in parts:
            if ids:
                stack.append((depth + 1, reg, sorted(ids, key=pts.__getitem__), node.id))
    tree.meta = {"nodes": len(tree.nodes), "height": tree.height, "ham_sandwich_fallbacks": fallbacks}
    return tree


def halfplane_canonical(tree: PartitionTree, line: Line, side: int = 1) -> CanonicalAnswer:
    """Canonical nodes for the open half-plane on ``side`` (+1 above) of ``line``."""
    want = ABOVE if side > 0 else BELOW
    nodes, partial = [], []
    if not tree.points:
        return CanonicalAnswer(nodes, partial)
    stack = [0]
    while stack:
        v = tree.nodes[stack.pop()]
        kind = classify_polygon(line, v.region)
        if kind == want:
            nodes.append(v.id)
        elif kind != ABOVE and kind != BELOW:
            if v.is_leaf:
                inside = []
                for q in v.points:
                    s = side_of_line(line, tree.points[q])
                    if s == 0:
                        raise PointOnBoundary(f"point {q} lies on the half-plane boundary")
                    if s == side:
                        inside.append(q)
                if inside:
                    partial.append((v.id, inside))
            else:
                stack.extend(v.children)
    return CanonicalAnswer(nodes, partial)


def _split_query(tree: PartitionTree, line: Line):
    """Canonical answers above and below ``line`` in a single descent."""
    up, down, crossed = [], [], []
    stack = [0]
    while stack:
        v = tree.nodes[stack.pop()]
        kind = classify_polygon(line, v.region)
        if kind == ABOVE:
            up.append(v.id)
        elif kind == BELOW:
            down.append(v.id)
        elif v.is_leaf:
            crossed.append(v.id)
        else:
            stack.extend(v.children)
    return up, down, crossed


# ------------------------------------------------------------ leaf arrangements


class LeafArrangement:
    """Arrangement of a leaf's lines with slab point location and per-face dual chains."""

    def __init__(self, lines: Sequence[Line], ids: Sequence[int], dual: Sequence[Point]):
        self.ids = list(ids)
        self.arr = Arrangement([lines[i] for i in self.ids])
        arr = self.arr
        local = arr.lines
        k = len(local)
        # vertices sorted by x; the order of lines changes by one adjacent swap at each
        verts = []
        for i in range(k):
            for j in arr.order[i]:
                if i < j:
                    verts.append((arr._crossing_x(i, j), i, j))
        verts.sort()
        self.xs = [v[0] for v in verts]
        cur = sorted(range(k), key=lambda i: (-local[i].a, local[i].b))
        where = {l: t for t, l in enumerate(cur)}
        self.slabs = [tuple(cur)]
        for _, i, j in verts:
            a, b = where[i], where[j]
            if abs(a - b) != 1:
                raise DegenerateInput("slab sweep found non-adjacent crossing lines")
            cur[a], cur[b] = cur[b], cur[a]
            where[i], where[j] = b, a
            self.slabs.append(tuple(cur))
        self.chains = []
        for f in range(arr.num_faces):
            he = arr.face_start[f]
            lo, up = [], []
            if he is not None:
                if arr.parallel_only:
                    i, _, s = he
                    seq = [(i, 0, s)]
                    byb = sorted(range(k), key=lambda t: local[t].b)
                    t = byb.index(i)
                    if s > 0 and t + 1 < k:
                        seq.append((byb[t + 1], 0, -1))
                    if s < 0 and t > 0:
                        seq.append((byb[t - 1], 0, 1))
                else:
                    seq, _ = arr.cycle(he)
                for i, _, s in seq:
                    (lo if s > 0 else up).append(dual[self.ids[i]])
            self.chains.append((lower_chain(sorted(lo)), upper_chain(sorted(up))))

    @property
    def num_faces(self) -> int:
        return self.arr.num_faces

    def locate(self, p: Point) -> int:
        """Face index of p; the slab right of a vertex abscissa breaks ties."""
        arr = self.arr
        if arr.n == 0:
            return 0
        slab = self.slabs[bisect_right(self.xs, p.x)]
        lines = arr.lines
        lo, hi = 0, len(slab)
        while lo < hi:
            mid = (lo + hi) // 2
            s = side_of_line(lines[slab[mid]], p)
            if s == 0:
                raise PointOnLine(f"query point {p} lies on line {self.ids[slab[mid]]}")
            if s > 0:
                lo = mid + 1
            else:
                hi = mid
        if lo > 0:
            i, s = slab[lo - 1], 1
        else:
            i, s = slab[0], -1
        order = arr.order[i]
        a, b = 0, len(order)
        while a < b:
            m = (a + b) // 2
            if arr._crossing_x(i, order[m]) <= p.x:
                a = m + 1
            else:
                b = m
        if arr.parallel_only:
            a = 0
        return arr.face_id[arr.hid(i, a, s)]

    def space(self) -> int:
        return sum(len(s) for s in self.slabs) + sum(a.count + b.count for a, b in self.chains)


# ------------------------------------------------------------ query structure


@dataclass
class QueryStats:
    queries: int = 0
    canonical_sizes: list = field(default_factory=list)
    times: list = field(default_factory=list)


@dataclass
class FaceQueryStructure:
    lines: list
    dual: list
    index_of: dict
    scale: tuple
    tree: PartitionTree
    r: int
    tradeoff: bool
    leaves: dict
    meta: dict = field(default_factory=dict)
    stats: QueryStats = field(default_factory=QueryStats)

    def fingerprints(self) -> list:
        out = []
        for v in self.tree.nodes:
            out.append(ct.fingerprint(v.hull.lower))
            out.append(ct.fingerprint(v.hull.upper))
        for lid in sorted(self.leaves):
            for a, b in self.leaves[lid].chains:
                out.append(ct.fingerprint(a))
                out.append(ct.fingerprint(b))
        return out


def _build(lines: Sequence[Line], r: int, tradeoff: bool) -> FaceQueryStructure:
    t0 = time.perf_counter()
    lines = list(lines)
    check_lines(lines)
    n = len(lines)
    if n and not 1 <= r <= n:
        raise ParamRange(f"r={r} outside [1, {n}]")
    if n:
        dual, scale = _scaled(lines)
    else:
        dual, scale = [], (1, 1)
    index_of = {p: i for i, p in enumerate(dual)}
    if len(index_of) != n:
        raise DegenerateInput("duplicate lines")
    tree = build_partition_tree(dual, r if n else 1)
    leaves = {}
    if tradeoff:
        for v in tree.leaves():
            leaves[v.id] = LeafArrangement(lines, [index_of[tree.points[q]] for q in v.points], dual)
    hull_space = sum(v.hull.lower.count + v.hull.upper.count for v in tree.nodes)
    leaf_space = sum(l.space() for l in leaves.values())
    space = len(tree.nodes) + hull_space + leaf_space
    denom = n * max(1.0, math.log2(max(n, 2))) + (n * r if tradeoff else 0)
    meta = dict(tree.meta)
    meta.update(
        n=n,
        r=r,
        tradeoff=tradeoff,
        leaves=len(tree.leaves()),
        space=space,
        space_constant=space / denom if denom else 0.0,
        leaf_faces=sum(l.num_faces for l in leaves.values()),
        build_seconds=time.perf_counter() - t0,
    )
    return FaceQueryStructure(lines, dual, index_of, scale, tree, r, tradeoff, leaves, meta)


def fq_build(lines: Sequence[Line]) -> FaceQueryStructure:
    """Structure with one point per leaf."""
    return _build(lines, 1, False)


def fq_build_tradeoff(lines: Sequence[Line], r: int) -> FaceQueryStructure:
    """Leaves of up to r lines, each with its own arrangement."""
    return _build(lines, r, True)


def fq_query(s: FaceQueryStructure, p: Point) -> Face:
    """Face of the arrangement containing p."""
    t0 = time.perf_counter()
    if not s.lines:
        return Face((), (), False)
    tree = s.tree
    line = _qline(p, s.scale)
    up, down, crossed = _split_query(tree, line)
    plus = [tree.nodes[v].hull.lower for v in up]
    minus = [tree.nodes[v].hull.upper for v in down]
    for v in crossed:
        node = tree.nodes[v]
        if s.tradeoff:
            leaf = s.leaves[v]
            lo, hi = leaf.chains[leaf.locate(p)]
            plus.append(lo)
            minus.append(hi)
            continue
        a, b = [], []
        for q in node.points:
            d = tree.points[q]
            side = side_of_line(line, d)
            if side == 0:
                raise PointOnLine(f"query point {p} lies on line {s.index_of[d]}")
            (a if side > 0 else b).append(d)
        if a:
            plus.append(lower_chain(a))
        if b:
            minus.append(upper_chain(b))
    hp = merge_chains(plus, LOWER)
    hm = merge_chains(minus, UPPER)
    face = face_from_hulls(hp, hm, line).explicit(s.index_of, s.lines)
    st = s.stats
    st.queries += 1
    st.canonical_sizes.append(len(up) + len(down) + len(crossed))
    st.times.append(time.perf_counter() - t0)
    return face
