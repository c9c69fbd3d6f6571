"""Instance files, deterministic generators and a general-position filter.

Text format, one item per line, ``#`` starts a comment::

    L <a> <b>            line y = a*x + b
    P <x> <y>            point
    S <x1> <y1> <x2> <y2>  segment

Values are integers, decimals or ``num/den`` rationals, converted exactly.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateInput, ParamRange, ParseError, PointOnLine
from .geom import Line, Point, fmt, scalar
from .segment_oracle import Segment

KINDS = ("random-lines", "grid-lines", "random-points", "clustered-points")


@dataclass
class Instance:
    lines: list = field(default_factory=list)
    points: list = field(default_factory=list)
    segments: list = field(default_factory=list)


def parse_instance(text: str) -> Instance:
    inst = Instance()
    arity = {"L": 2, "P": 2, "S": 4}
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if not body:
            continue
        tag, vals = body[0].upper(), body[1:]
        if tag not in arity:
            raise ParseError(f"line {no}: unknown record {body[0]!r}")
        if len(vals) != arity[tag]:
            raise ParseError(f"line {no}: {tag} takes {arity[tag]} values, got {len(vals)}")
        try:
            nums = [scalar(v) for v in vals]
        except ParseError as exc:
            raise ParseError(f"line {no}: {exc}") from exc
        if tag == "L":
            inst.lines.append(Line(*nums))
        elif tag == "P":
            inst.points.append(Point(*nums))
        else:
            a, b = Point(nums[0], nums[1]), Point(nums[2], nums[3])
            if a.x == b.x:
                raise ParseError(f"line {no}: vertical segment")
            inst.segments.append(Segment(*sorted((a, b))))
    return inst


def read_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


def format_instance(inst: Instance, header: str = "") -> str:
    out = [f"# {h}" for h in header.splitlines()] if header else []
    out += [f"L {fmt(l.a)} {fmt(l.b)}" for l in inst.lines]
    out += [f"P {fmt(p.x)} {fmt(p.y)}" for p in inst.points]
    out += [f"S {fmt(s.p.x)} {fmt(s.p.y)} {fmt(s.q.x)} {fmt(s.q.y)}" for s in inst.segments]
    return "\n".join(out) + "\n"


# ------------------------------------------------------------ general position


def _common_den(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def _reduce(num: np.ndarray, den: np.ndarray):
    g = np.gcd(num, den)
    g[g == 0] = 1
    num, den = num // g, den // g
    neg = den < 0
    num[neg], den[neg] = -num[neg], -den[neg]
    return num, den


def concurrency_witness(lines: Sequence[Line]):
    """Indices of three concurrent lines (or two equal ones), or None."""
    lines = list(lines)
    seen = {}
    for i, l in enumerate(lines):
        if l in seen:
            return (seen[l], i)
        seen[l] = i
    n = len(lines)
    if n < 3:
        return None
    D = _common_den([l.a for l in lines] + [l.b for l in lines])
    A = [int(l.a * D) for l in lines]
    B = [int(l.b * D) for l in lines]
    if max(map(abs, A + B)) < 1 << 20:
        a, b = np.array(A, dtype=np.int64), np.array(B, dtype=np.int64)
        i, j = np.triu_indices(n, 1)
        keep = a[i] != a[j]
        i, j = i[keep], j[keep]
        # x = p/q, D*y = (a_i p + b_i q)/q
        p, q = b[j] - b[i], a[i] - a[j]
        yn = a[i] * p + b[i] * q
        xn, xd = _reduce(p.copy(), q.copy())
        yn, yd = _reduce(yn, q.copy())
        key = np.stack([xn, xd, yn, yd], axis=1)
        _, first, counts = np.unique(key, axis=0, return_index=True, return_counts=True)
        hit = np.nonzero(counts > 1)[0]
        if len(hit) == 0:
            return None
        k = key[first[hit[0]]]
        same = np.nonzero((key == k).all(axis=1))[0]
        ids = sorted({int(i[same[0]]), int(j[same[0]]), int(i[same[1]]), int(j[same[1]])})
        return tuple(ids[:3])
    where = {}
    for i in range(n):
        for j in range(i + 1, n):
            if A[i] == A[j]:
                continue
            x = Fraction(B[j] - B[i], A[i] - A[j])
            key = (x, A[i] * x + B[i])
            if key in where:
                return tuple(sorted({*where[key], i, j}))[:3]
            where[key] = (i, j)
    return None


def incidence_witness(lines: Sequence[Line], points: Sequence[Point]):
    """(line, point) indices of a point lying on a line, or None."""
    if not lines or not points:
        return None
    D = _common_den([l.a for l in lines] + [l.b for l in lines] + [p.x for p in points] + [p.y for p in points])
    A = [int(l.a * D) for l in lines]
    B = [int(l.b * D) for l in lines]
    X = [int(p.x * D) for p in points]
    Y = [int(p.y * D) for p in points]
    # D*y == A*x/D*D + B  ->  Y*D == A*X + B*D
    if max(map(abs, A + B + X + Y)) < 1 << 20 and D < 1 << 20:
        a, b = np.array(A, dtype=np.int64), np.array(B, dtype=np.int64)
        x, y = np.array(X, dtype=np.int64), np.array(Y, dtype=np.int64)
        on = (np.outer(a, x) + (b * D)[:, None]) == (y * D)[None, :]
        hit = np.argwhere(on)
        return tuple(int(v) for v in hit[0]) if len(hit) else None
    for i, l in enumerate(lines):
        for k, p in enumerate(points):
            if p.y == l.a * p.x + l.b:
                return (i, k)
    return None


def check_general_position(lines: Sequence[Line], points: Sequence[Point] = ()) -> None:
    w = concurrency_witness(lines)
    if w is not None:
        kind = "duplicate" if len(w) == 2 else "concurrent"
        raise DegenerateInput(f"{kind} lines {list(w)}")
    w = incidence_witness(lines, points)
    if w is not None:
        raise PointOnLine(f"point {w[1]} lies on line {w[0]}")


# ------------------------------------------------------------ generators


def component_rng(seed: int, component: str) -> random.Random:
    """Independent deterministic stream for one named component."""
    return random.Random(f"{seed}:{component}")


def _rational(rng: random.Random, span: int, den: int) -> Fraction:
    return Fraction(rng.randint(-span * den, span * den), den)


def generate(kind: str, n: int = 0, m: int = 0, seed: int = 0, span: int = 100, den: int = 1000) -> Instance:
    """Deterministic instance for (kind, sizes, seed); general position by rejection resampling.

    ``random-lines`` and ``grid-lines`` produce n lines plus m uniform points;
    ``random-points`` and ``clustered-points`` produce m points only.
    """
    if kind not in KINDS:
        raise ParamRange(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    if n < 0 or m < 0:
        raise ParamRange("sizes must be non-negative")
    if kind in ("random-points", "clustered-points"):
        if m < 1:
            raise ParamRange("point generators need m >= 1")
        if n:
            raise ParamRange("point generators take no lines")
    elif n < 1:
        raise ParamRange("line generators need n >= 1")
    lrng = component_rng(seed, "lines")
    prng = component_rng(seed, "points")
    inst = Instance()
    if kind == "random-lines":
        inst.lines = [Line(_rational(lrng, span, den), _rational(lrng, span, den)) for _ in range(n)]
        for _ in range(1000):
            w = concurrency_witness(inst.lines)
            if w is None:
                break
            inst.lines[w[-1]] = Line(_rational(lrng, span, den), _rational(lrng, span, den))
        else:  # pragma: no cover
            raise DegenerateInput("could not reach general position")
    elif kind == "grid-lines":
        k = max(3, math.isqrt(n) + 1)
        inst.lines = [Line(Fraction(i % k), Fraction(i // k)) for i in range(n)]
        w = concurrency_witness(inst.lines)
        if w is not None:
            raise DegenerateInput(f"grid lines violate general position: lines {list(w)} are concurrent")
    if kind == "clustered-points":
        centers = [(_rational(prng, span, den), _rational(prng, span, den)) for _ in range(max(1, math.isqrt(m)))]
        for _ in range(m):
            cx, cy = prng.choice(centers)
            inst.points.append(Point(cx + _rational(prng, 1, den), cy + _rational(prng, 1, den)))
    else:
        inst.points = [Point(_rational(prng, span, den), _rational(prng, span, den)) for _ in range(m)]
    for _ in range(10000):
        w = incidence_witness(inst.lines, inst.points)
        if w is None:
            break
        inst.points[w[1]] = Point(_rational(prng, span, den), _rational(prng, span, den))
    else:  # pragma: no cover
        raise DegenerateInput("could not keep points off the lines")
    return inst
