"""Exact planar primitives over rationals, and the point/line duality."""
from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence, Union

from .errors import DegenerateInput, ParseError

CCW, CW, COLLINEAR = 1, -1, 0
ABOVE, BELOW, ON = 1, -1, 0


def scalar(v) -> Fraction:
    """Exact conversion; accepts ints, Fractions, floats and strings like '3/4' or '0.25'."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational number: {v!r}") from exc
    return Fraction(v)


def fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x, y) -> "Point":
        return cls(scalar(x), scalar(y))

    def __repr__(self) -> str:
        return f"({fmt(self.x)}, {fmt(self.y)})"


class Line(NamedTuple):
    """The non-vertical line y = a*x + b."""

    a: Fraction
    b: Fraction

    @classmethod
    def of(cls, a, b) -> "Line":
        return cls(scalar(a), scalar(b))

    def at(self, x) -> Fraction:
        return self.a * x + self.b

    def __repr__(self) -> str:
        return f"y={fmt(self.a)}x+{fmt(self.b)}"


class Ideal(NamedTuple):
    """A point at infinity in direction (dx, dy)."""

    dx: Fraction
    dy: Fraction


Vertex = Union[Point, Ideal]


class Triangle(NamedTuple):
    v0: Vertex
    v1: Vertex
    v2: Vertex

    @property
    def finite(self) -> bool:
        return not any(isinstance(v, Ideal) for v in self)


def orient(p, q, r) -> int:
    d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (d > 0) - (d < 0)


orientation = orient


def cross(p, q, r) -> Fraction:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def dual_of_point(p: Point) -> Line:
    return Line(p.x, -p.y)


def dual_of_line(l: Line) -> Point:
    return Point(l.a, -l.b)


def side_of_line(l: Line, p) -> int:
    d = p[1] - l.a * p[0] - l.b
    return (d > 0) - (d < 0)


def line_through(p, q) -> Line:
    if p[0] == q[0]:
        raise DegenerateInput(f"vertical line through {p} and {q}")
    a = Fraction(q[1] - p[1]) / (q[0] - p[0])
    return Line(a, p[1] - a * p[0])


def intersect(l1: Line, l2: Line) -> Point:
    if l1.a == l2.a:
        raise DegenerateInput(f"parallel lines {l1} and {l2}")
    x = Fraction(l2.b - l1.b) / (l1.a - l2.a)
    return Point(x, l1.a * x + l1.b)


def make_triangle(v0: Vertex, v1: Vertex, v2: Vertex) -> Triangle:
    """Triangle with finite vertices reordered counterclockwise."""
    vs = [v0, v1, v2]
    fin = [v for v in vs if isinstance(v, Point)]
    if len(fin) == 3:
        o = orient(*fin)
        if o == 0:
            raise DegenerateInput("triangle has empty interior")
        if o < 0:
            vs = [v0, v2, v1]
    elif len(fin) == 0:
        raise DegenerateInput("a triangle needs at least one finite vertex")
    return Triangle(*vs)


def line_crosses_triangle(l: Line, t: Sequence[Vertex]) -> bool:
    """True iff l meets the open interior of t (vertices may be ideal)."""
    pos = neg = False
    for v in t:
        if isinstance(v, Ideal):
            d = v.dy - l.a * v.dx
        else:
            d = v[1] - l.a * v[0] - l.b
        if d > 0:
            pos = True
        elif d < 0:
            neg = True
    return pos and neg


def classify_polygon(l: Line, poly: Sequence[Point]) -> int:
    """ABOVE / BELOW if the closed polygon lies on one closed side of l, else ON (crossed)."""
    pos = neg = False
    a, b = l
    for v in poly:
        d = v[1] - a * v[0] - b
        if d > 0:
            pos = True
        elif d < 0:
            neg = True
    if pos and neg:
        return ON
    return ABOVE if pos else BELOW


def point_in_triangle(p, t: Sequence[Point]) -> int:
    """1 strictly inside, 0 on the boundary, -1 outside (t counterclockwise)."""
    s = [orient(t[i], t[(i + 1) % 3], p) for i in range(3)]
    if min(s) < 0:
        return -1
    return 0 if min(s) == 0 else 1


def point_in_convex(p, poly: Sequence[Point]) -> int:
    """Same convention as point_in_triangle for a counterclockwise convex polygon."""
    k = len(poly)
    best = 1
    for i in range(k):
        o = orient(poly[i], poly[(i + 1) % k], p)
        if o < 0:
            return -1
        if o == 0:
            best = 0
    return best


def check_lines(lines: Sequence[Line]) -> None:
    """Reject duplicate lines.  Concurrency is caught where intersections get sorted."""
    seen = set()
    for l in lines:
        if l in seen:
            raise DegenerateInput(f"duplicate line {l}")
        seen.add(l)
