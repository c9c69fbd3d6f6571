"""Shared generators and brute-force oracles for the test suite."""
import random
from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from arrfaces.geom import Line, Point, orient, side_of_line
from arrfaces.io import concurrency_witness


def rat(rng: random.Random, span: int = 100, den: int = 10**4) -> Fraction:
    return Fraction(rng.randint(-span * den, span * den), den)


def random_lines(rng: random.Random, n: int, span: int = 100, den: int = 10**4) -> list:
    lines = [Line(rat(rng, span, den), rat(rng, span, den)) for _ in range(n)]
    while (w := concurrency_witness(lines)) is not None:
        lines[w[-1]] = Line(rat(rng, span, den), rat(rng, span, den))
    return lines


def random_points(rng: random.Random, m: int, lines=(), span: int = 100, den: int = 10**4) -> list:
    out = []
    while len(out) < m:
        p = Point(rat(rng, span, den), rat(rng, span, den))
        if all(side_of_line(l, p) != 0 for l in lines):
            out.append(p)
    return out


rationals = st.builds(Fraction, st.integers(-10**6, 10**6), st.integers(1, 997))
points = st.builds(Point, rationals, rationals)
lines = st.builds(Line, rationals, rationals)


@st.composite
def general_lines(draw, min_size=1, max_size=12):
    ls = draw(st.lists(lines, min_size=min_size, max_size=max_size, unique=True))
    while concurrency_witness(ls) is not None:
        ls = ls[:-1]
    return ls


def brute_lower_hull(pts) -> list:
    """Vertices v such that some edge (v, w) has every point on or above it; O(n^3)."""
    pts = sorted(set(pts))
    if len(pts) <= 1:
        return pts
    # keep the lowest point per x, then take vertices of supporting edges
    lowest = {}
    for p in pts:
        if p.x not in lowest or p.y < lowest[p.x].y:
            lowest[p.x] = p
    pts = sorted(lowest.values())
    if len(pts) <= 2:
        return pts
    keep = set()
    for a, b in combinations(pts, 2):
        if all(orient(a, b, c) >= 0 for c in pts):
            if all(not (orient(a, b, c) == 0 and a < c < b) for c in pts):
                keep.update((a, b))
    return sorted(keep)


def brute_upper_hull(pts) -> list:
    flipped = brute_lower_hull([Point(p.x, -p.y) for p in pts])
    return [Point(p.x, -p.y) for p in flipped]
