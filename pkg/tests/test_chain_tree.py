import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arrfaces import chain_tree as ct
from arrfaces.chain_tree import LOWER, UPPER
from arrfaces.errors import NotConvex, NotFound, NotSorted, XOverlap
from arrfaces.geom import Point, orient
from arrfaces.hulls import lower_chain, tangent_from_point, upper_chain

from helpers import brute_lower_hull, points

P = Point.of


def chain(*xy, side=LOWER):
    return ct.build_from_sorted([P(x, y) for x, y in xy], side)


def test_build_examples():
    h = chain((0, 0), (1, -1), (2, 0))
    assert h.count == 3 and h.leftmost == P(0, 0)
    e = ct.build_from_sorted([], LOWER)
    assert e.count == 0 and not e
    with pytest.raises(NotConvex):
        chain((0, 0), (1, 1), (2, 0))
    with pytest.raises(NotSorted):
        chain((1, 0), (0, 1))


def test_split_examples():
    h = chain((0, 0), (2, -1), (4, 0))
    left, right = ct.split_at_x(h, 2)
    assert left.to_list() == [P(0, 0), P(2, -1)] and right.to_list() == [P(4, 0)]
    left, right = ct.split_at_x(h, -(10**30))
    assert left.count == 0 and right.to_list() == h.to_list()
    left, right = ct.split_at_x(chain((0, 0)), 0)
    assert left.to_list() == [P(0, 0)] and right.count == 0
    assert h.to_list() == [P(0, 0), P(2, -1), P(4, 0)]


def test_join_examples():
    j = ct.join(chain((0, 0), (1, -1)), chain((3, 0)))
    assert j.count == 3
    h = chain((0, 0), (1, -1))
    assert ct.join(ct.empty(LOWER), h).to_list() == h.to_list()
    with pytest.raises(XOverlap):
        ct.join(chain((0, 0), (2, 0)), chain((1, 5)))
    with pytest.raises(NotConvex):
        ct.join(chain((0, 0), (1, -1)), chain((2, -3)))


def test_search_examples():
    h = chain((0, 2), (1, 0), (2, 3))

    def lowest(prev, v, nxt):
        if prev is not None and prev.y < v.y:
            return -1
        if nxt is not None and nxt.y < v.y:
            return 1
        return 0

    assert ct.search(h, lowest) == P(1, 0)
    assert ct.search(chain((5, 5)), lambda a, v, b: 0) == P(5, 5)
    with pytest.raises(NotFound):
        ct.search(h, lambda a, v, b: 1)


def _supports(q, v, vs):
    sides = {orient(q, v, w) for w in vs if w != v}
    return not ({1, -1} <= sides)


def test_tangent_from_external_point_matches_brute_force():
    vs = [P(0, 0), P(2, -1), P(4, 0)]
    q = P(-1, -5)
    brute = [v for v in vs if _supports(q, v, vs)]
    got = tangent_from_point(q, ct.build_from_sorted(vs, LOWER))
    assert got in brute
    # the chain must lie on or above the tangent
    assert all(orient(q, got, w) >= 0 for w in vs)


def test_fingerprint_properties():
    h = chain((0, 0), (1, -1), (3, 0), (4, 2))
    fp = ct.fingerprint(h)
    a, b = ct.split_at_x(h, 1)
    c = ct.join(a, b)
    assert ct.fingerprint(c) == fp
    assert ct.fingerprint(h) == fp
    other = chain((0, 0), (1, -1), (3, 0), (4, 3))
    assert ct.fingerprint(other) != fp
    assert ct.fingerprint(chain((0, 0), side=UPPER)) != ct.fingerprint(chain((0, 0)))


@given(st.lists(points, min_size=1, max_size=60, unique=True), st.lists(st.integers(0, 10**6), max_size=8))
def test_random_split_join_sequences(pts, cuts):
    h = lower_chain(sorted(pts))
    assert h.to_list() == brute_lower_hull(pts)
    fp = ct.fingerprint(h)
    vs = h.to_list()
    work = h
    for c in cuts:
        x = vs[c % len(vs)].x
        a, b = ct.split_at_x(work, x)
        for part in (a, b):
            seq = part.to_list()
            assert all(p.x < q.x for p, q in zip(seq, seq[1:]))
            assert ct.is_convex(seq, LOWER)
            assert part.height <= ct.HEIGHT_CONSTANT * math.log2(part.count + 2)
        work = ct.join(a, b)
        assert work.to_list() == vs
    assert ct.fingerprint(h) == fp


def test_height_stays_logarithmic_for_large_chains():
    rng = random.Random(3)
    # points on a parabola form a lower chain
    xs = sorted(rng.sample(range(-10**6, 10**6), 4000))
    h = ct.build_from_sorted([P(x, x * x) for x in xs], LOWER)
    assert h.height <= ct.HEIGHT_CONSTANT * math.log2(h.count + 2)
    u = upper_chain([P(x, -x * x) for x in xs])
    assert u.count == 4000
