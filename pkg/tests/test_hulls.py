import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arrfaces import chain_tree as ct
from arrfaces.chain_tree import LOWER, UPPER
from arrfaces.errors import DegenerateInput, EmptyHull, HullsIntersect, SegmentsIntersect
from arrfaces.geom import Line, Point, dual_of_line, dual_of_point, orient, side_of_line
from arrfaces.hulls import (
    Hull,
    RepresentativeSegment,
    common_tangent_lower,
    envelope_of_disjoint_segments,
    face_from_hulls,
    hull_of_sorted,
    inner_common_tangents,
    lower_chain,
    merge_chains,
    merge_disjoint_hulls,
    tangent_line,
    upper_chain,
)
from arrfaces.oracle import Arrangement

from helpers import brute_lower_hull, brute_upper_hull, points, random_lines, random_points

P = Point.of


def test_hull_of_sorted_examples():
    h = hull_of_sorted([P(0, 0), P(1, 1), P(2, 0)])
    assert h.lower.to_list() == [P(0, 0), P(2, 0)]
    assert h.upper.to_list() == [P(0, 0), P(1, 1), P(2, 0)]
    h = hull_of_sorted([P(0, 0)])
    assert h.lower.to_list() == h.upper.to_list() == [P(0, 0)]


@given(st.lists(points, min_size=1, max_size=20, unique=True))
def test_hull_matches_cubic_oracle(pts):
    h = hull_of_sorted(sorted(pts))
    assert h.lower.to_list() == brute_lower_hull(pts)
    assert h.upper.to_list() == brute_upper_hull(pts)


def _brute_lower_tangent(a, b):
    allpts = a + b
    return [(u, w) for u, w in product(a, b) if all(orient(u, w, c) >= 0 for c in allpts)]


@pytest.mark.parametrize(
    "a,b,want",
    [
        ([(0, 0), (1, 1)], [(2, 0), (3, 1)], ((0, 0), (2, 0))),
        ([(0, 0)], [(1, 5)], ((0, 0), (1, 5))),
        ([(0, 0), (2, -2), (4, 0)], [(5, -1), (6, 0)], ((2, -2), (5, -1))),
    ],
)
def test_common_tangent_examples(a, b, want):
    A = lower_chain([P(*v) for v in a])
    B = lower_chain([P(*v) for v in b])
    got = common_tangent_lower(A, B)
    assert got == (P(*want[0]), P(*want[1]))
    assert got in _brute_lower_tangent(A.to_list(), B.to_list())


def test_common_tangent_random():
    rng = random.Random(11)
    for _ in range(60):
        pts = sorted(random_points(rng, rng.randint(2, 30)))
        k = rng.randint(1, len(pts) - 1)
        if pts[k - 1].x == pts[k].x:
            continue
        A, B = lower_chain(pts[:k]), lower_chain(pts[k:])
        assert common_tangent_lower(A, B) in _brute_lower_tangent(A.to_list(), B.to_list())


def _grid_envelope(segs, xs):
    out = []
    for x in xs:
        live = [(s.left.y + (s.right.y - s.left.y) * (x - s.left.x) / (s.right.x - s.left.x), s.owner) for s in segs if s.left.x <= x <= s.right.x]
        out.append(min(live)[1] if live else None)
    return out


def _owner_at(pieces, x):
    for p in pieces:
        if (p.lo < x < p.hi) or (x == p.lo and p.lo_closed) or (x == p.hi and p.hi_closed):
            return p.owner
    return None


def test_envelope_examples():
    s1 = RepresentativeSegment(1, P(0, 0), P(2, 0))
    s2 = RepresentativeSegment(2, P(1, 1), P(3, 1))
    pieces = envelope_of_disjoint_segments([s1, s2])
    assert [(p.lo, p.hi, p.owner) for p in pieces] == [(0, 2, 1), (2, 3, 2)]
    assert [(p.lo, p.hi, p.owner) for p in envelope_of_disjoint_segments([s1])] == [(0, 2, 1)]
    big = RepresentativeSegment(1, P(0, 5), P(10, 5))
    small = RepresentativeSegment(2, P(2, 0), P(4, 0))
    pieces = envelope_of_disjoint_segments([big, small])
    assert [(p.lo, p.hi, p.owner) for p in pieces] == [(0, 2, 1), (2, 4, 2), (4, 10, 1)]
    with pytest.raises(SegmentsIntersect):
        envelope_of_disjoint_segments([s1, RepresentativeSegment(3, P(1, -1), P(3, 1))])


def test_envelope_against_grid_sampling():
    rng = random.Random(5)
    for _ in range(40):
        # disjoint segments stacked at distinct heights with random tilts
        segs = []
        for i in range(rng.randint(1, 8)):
            x0 = rng.randint(0, 50)
            x1 = x0 + rng.randint(1, 30)
            y = 10 * i
            segs.append(RepresentativeSegment(i, P(x0, y + rng.randint(0, 3)), P(x1, y + rng.randint(0, 3))))
        pieces = envelope_of_disjoint_segments(segs)
        xs = [Fraction(k, 4) for k in range(-4, 4 * 85)]
        assert [_owner_at(pieces, x) for x in xs] == _grid_envelope(segs, xs)


def test_merge_disjoint_hulls_examples():
    h1 = hull_of_sorted([P(0, 0), P(1, 1)])
    h2 = hull_of_sorted([P(2, 0), P(3, 1)])
    assert merge_disjoint_hulls([h1, h2], LOWER).to_list() == [P(0, 0), P(2, 0), P(3, 1)]
    assert merge_disjoint_hulls([h1], LOWER).to_list() == h1.lower.to_list()


def test_merge_of_cutting_hulls():
    from arrfaces.cuttings import build_hierarchical_cutting

    rng = random.Random(9)
    for trial in range(5):
        lines = random_lines(rng, 16)
        pts = sorted(random_points(rng, 64, lines))
        hc = build_hierarchical_cutting(lines, 4, points=pts)
        hulls = [c.hull for c in hc.level(hc.leaf_level) if c.points]
        assert len(hulls) > 1
        assert merge_disjoint_hulls(hulls, LOWER).to_list() == brute_lower_hull(pts)
        assert merge_disjoint_hulls(hulls, UPPER).to_list() == brute_upper_hull(pts)


def test_merge_chains_random_groups():
    rng = random.Random(2)
    for _ in range(30):
        pts = sorted(random_points(rng, rng.randint(1, 60)))
        cuts = sorted(rng.sample(range(1, len(pts)), min(len(pts) - 1, rng.randint(0, 6)))) if len(pts) > 1 else []
        groups, prev = [], 0
        for c in cuts + [len(pts)]:
            groups.append(pts[prev:c])
            prev = c
        chains = [lower_chain(g) for g in groups if g]
        assert merge_chains(chains, LOWER).to_list() == brute_lower_hull(pts)


def _brute_inner(hp, hm):
    """Pairs whose connecting line keeps every H+ point on or above and every H- point on or below."""
    out = set()
    for u, w in product(hp, hm):
        if u.x == w.x:
            continue
        s = (w.y - u.y) / (w.x - u.x)
        line = Line(s, u.y - s * u.x)
        if all(side_of_line(line, c) >= 0 for c in hp) and all(side_of_line(line, c) <= 0 for c in hm):
            out.add((u, w))
    return out


def test_inner_tangent_examples():
    with pytest.raises(DegenerateInput):
        inner_common_tangents(lower_chain([P(0, 1)]), upper_chain([P(0, -1)]))
    tg = inner_common_tangents(lower_chain([P(0, 1)]), upper_chain([P(1, -1)]))
    # the second tangent degenerates to vertical, so only the connector is finite
    assert {tangent_line(t) for t in tg if t is not None} == {Line(-2, 1)}
    tg = inner_common_tangents(lower_chain([P(-1, 1), P(1, 1)]), upper_chain([P(-1, -1), P(1, -1)]))
    assert {tg.left, tg.right} == {(P(-1, 1), P(1, -1)), (P(1, 1), P(-1, -1))}
    with pytest.raises(EmptyHull):
        inner_common_tangents(ct.empty(LOWER), upper_chain([P(0, 0)]))
    with pytest.raises(HullsIntersect):
        inner_common_tangents(lower_chain([P(0, 0), P(2, 0)]), upper_chain([P(1, 1)]))


def test_inner_tangents_random_split():
    rng = random.Random(4)
    done = 0
    while done < 40:
        pts = random_points(rng, 30, [Line(0, 0)])
        pts.sort()
        hp = [p for p in pts if p.y > 0]
        hm = [p for p in pts if p.y < 0]
        if not hp or not hm:
            continue
        HP, HM = lower_chain(hp), upper_chain(hm)
        tg = inner_common_tangents(HP, HM)
        brute = _brute_inner(HP.to_list(), HM.to_list())
        got = {t for t in (tg.left, tg.right) if t is not None}
        assert got <= brute and len(got) == len(brute)
        done += 1


def _face_via_hulls(lines, p):
    index_of = {dual_of_line(l): i for i, l in enumerate(lines)}
    pstar = dual_of_point(p)
    above = sorted(d for d in index_of if side_of_line(pstar, d) > 0)
    below = sorted(d for d in index_of if side_of_line(pstar, d) < 0)
    df = face_from_hulls(lower_chain(above), upper_chain(below), pstar)
    return df.explicit(index_of, lines)


def test_face_from_hulls_examples():
    strip = [Line(0, 1), Line(0, -1)]
    f = _face_via_hulls(strip, P(0, 0))
    assert f.edges == (0, 1) and not f.bounded and f.vertices == ()
    tri = [Line(0, 0), Line(1, 0), Line(-1, 2)]
    f = _face_via_hulls(tri, P(1, Fraction(1, 2)))
    assert f.bounded and set(f.vertices) == {P(0, 0), P(2, 0), P(1, 1)}
    assert f == Arrangement(tri).face_of(P(1, Fraction(1, 2)))


def test_face_from_hulls_random():
    rng = random.Random(25)
    for _ in range(20):
        lines = random_lines(rng, 25)
        arr = Arrangement(lines)
        for p in random_points(rng, 10, lines):
            assert _face_via_hulls(lines, p) == arr.face_of(p)
