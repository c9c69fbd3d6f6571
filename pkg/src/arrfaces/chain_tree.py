"""Persistent treap over the vertices of a convex chain, ordered by x.

Every update path-copies, so a ChainHandle never changes after it is issued.
Priorities are a hash of the vertex, which makes the tree shape a function of
the vertex set alone: equal chains built through different split/join
histories share the same shape.
"""
from __future__ import annotations

import hashlib
from typing import Callable, Iterator, Optional, Sequence

from .errors import NotConvex, NotFound, NotSorted, XOverlap
from .geom import Point, orient

LOWER, UPPER = 1, -1

# Test suites flip this on to audit the height bound on every handle.
CHECK_HEIGHT = False
HEIGHT_CONSTANT = 4.0

_MASK = (1 << 64) - 1


def _priority(p: Point) -> int:
    z = (hash(p) + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class _Node:
    __slots__ = ("p", "prio", "left", "right", "size", "lo", "hi", "height")

    def __init__(self, p, prio, left, right):
        self.p = p
        self.prio = prio
        self.left = left
        self.right = right
        if left is None:
            self.size, self.lo, lh = 1, p, 0
        else:
            self.size, self.lo, lh = left.size + 1, left.lo, left.height
        if right is None:
            self.hi, rh = p, 0
        else:
            self.size += right.size
            self.hi, rh = right.hi, right.height
        self.height = 1 + (lh if lh > rh else rh)


def _join(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a.prio > b.prio:
        return _Node(a.p, a.prio, a.left, _join(a.right, b))
    return _Node(b.p, b.prio, _join(a, b.left), b.right)


def _split(t, x, strict):
    """(keys <= x, keys > x), or (< x, >= x) when strict."""
    if t is None:
        return None, None
    goes_left = t.p.x < x if strict else t.p.x <= x
    if goes_left:
        l, r = _split(t.right, x, strict)
        return _Node(t.p, t.prio, t.left, l), r
    l, r = _split(t.left, x, strict)
    return l, _Node(t.p, t.prio, r, t.right)


class ChainHandle:
    __slots__ = ("root", "side")

    def __init__(self, root, side: int):
        self.root = root
        self.side = side
        if CHECK_HEIGHT and root is not None:
            import math

            assert root.height <= HEIGHT_CONSTANT * math.log2(root.size + 2), (root.height, root.size)

    @property
    def count(self) -> int:
        return 0 if self.root is None else self.root.size

    def __len__(self) -> int:
        return self.count

    def __bool__(self) -> bool:
        return self.root is not None

    @property
    def leftmost(self) -> Optional[Point]:
        return None if self.root is None else self.root.lo

    @property
    def rightmost(self) -> Optional[Point]:
        return None if self.root is None else self.root.hi

    @property
    def height(self) -> int:
        return 0 if self.root is None else self.root.height

    def __iter__(self) -> Iterator[Point]:
        stack, t = [], self.root
        while stack or t is not None:
            while t is not None:
                stack.append(t)
                t = t.left
            t = stack.pop()
            yield t.p
            t = t.right

    def to_list(self) -> list:
        return list(self)

    def __repr__(self) -> str:
        kind = "LOWER" if self.side == LOWER else "UPPER"
        return f"ChainHandle({kind}, {self.to_list()!r})"


def is_convex(vs: Sequence[Point], side: int) -> bool:
    return all(side * orient(vs[i - 1], vs[i], vs[i + 1]) > 0 for i in range(1, len(vs) - 1))


def build_from_sorted(vertices: Sequence[Point], side: int = LOWER, check: bool = True) -> ChainHandle:
    """Linear-time Cartesian-tree construction."""
    vs = list(vertices)
    if check:
        for i in range(1, len(vs)):
            if not vs[i - 1].x < vs[i].x:
                raise NotSorted(f"x not strictly increasing at index {i}")
        if not is_convex(vs, side):
            raise NotConvex("vertex sequence is not convex in the declared orientation")
    if not vs:
        return ChainHandle(None, side)
    prios = [_priority(p) for p in vs]
    n = len(vs)
    left = [-1] * n
    right = [-1] * n
    stack: list[int] = []
    for i in range(n):
        last = -1
        while stack and prios[stack[-1]] < prios[i]:
            last = stack.pop()
        left[i] = last
        if stack:
            right[stack[-1]] = i
        stack.append(i)
    root = stack[0]

    # post-order without recursion
    nodes: list = [None] * n
    todo = [(root, False)]
    while todo:
        i, done = todo.pop()
        if done:
            nodes[i] = _Node(
                vs[i],
                prios[i],
                nodes[left[i]] if left[i] >= 0 else None,
                nodes[right[i]] if right[i] >= 0 else None,
            )
            continue
        todo.append((i, True))
        if left[i] >= 0:
            todo.append((left[i], False))
        if right[i] >= 0:
            todo.append((right[i], False))
    return ChainHandle(nodes[root], side)


def empty(side: int = LOWER) -> ChainHandle:
    return ChainHandle(None, side)


def split_at_x(h: ChainHandle, x) -> tuple[ChainHandle, ChainHandle]:
    """Left part keeps vertices with x-coordinate <= x."""
    l, r = _split(h.root, x, False)
    return ChainHandle(l, h.side), ChainHandle(r, h.side)


def split_before_x(h: ChainHandle, x) -> tuple[ChainHandle, ChainHandle]:
    """Left part keeps vertices with x-coordinate < x."""
    l, r = _split(h.root, x, True)
    return ChainHandle(l, h.side), ChainHandle(r, h.side)


def clip(h: ChainHandle, lo, hi, lo_closed: bool = True, hi_closed: bool = True) -> ChainHandle:
    _, rest = (split_before_x if lo_closed else split_at_x)(h, lo)
    mid, _ = (split_at_x if hi_closed else split_before_x)(rest, hi)
    return mid


def _second(t, from_left: bool):
    """Second vertex from the left (or right) end, or None."""
    if t is None or t.size < 2:
        return None
    # walk down the spine; the second element is either in the first
    # node's inner subtree or is that node's parent on the spine
    path = []
    while t is not None:
        path.append(t)
        t = t.left if from_left else t.right
    last = path[-1]
    inner = last.right if from_left else last.left
    if inner is not None:
        return inner.lo if from_left else inner.hi
    return path[-2].p


def join(left: ChainHandle, right: ChainHandle, check: bool = True) -> ChainHandle:
    if left.root is None:
        return ChainHandle(right.root, right.side)
    if right.root is None:
        return ChainHandle(left.root, left.side)
    if check:
        if not left.root.hi.x < right.root.lo.x:
            raise XOverlap("left chain reaches past the start of the right chain")
        a, b = left.root.hi, right.root.lo
        a0 = _second(left.root, False)
        b1 = _second(right.root, True)
        side = left.side
        if (a0 is not None and side * orient(a0, a, b) <= 0) or (b1 is not None and side * orient(a, b, b1) <= 0):
            raise NotConvex("concatenation breaks convexity at the seam")
    return ChainHandle(_join(left.root, right.root), left.side)


Oracle = Callable[[Optional[Point], Point, Optional[Point]], int]


def search(h: ChainHandle, oracle: Oracle) -> Point:
    """Descend the tree; ``oracle(prev, v, next)`` answers <0 (go left), 0 (found) or >0."""
    t = h.root
    pred = succ = None
    while t is not None:
        prev = t.left.hi if t.left is not None else pred
        nxt = t.right.lo if t.right is not None else succ
        d = oracle(prev, t.p, nxt)
        if d == 0:
            return t.p
        if d < 0:
            succ = t.p
            t = t.left
        else:
            pred = t.p
            t = t.right
    raise NotFound("oracle never answered FOUND")


def fingerprint(h: ChainHandle) -> str:
    digest = hashlib.blake2b(digest_size=16)
    digest.update(b"L" if h.side == LOWER else b"U")
    for p in h:
        digest.update(f"{p.x.numerator}/{p.x.denominator},{p.y.numerator}/{p.y.denominator};".encode())
    return digest.hexdigest()
