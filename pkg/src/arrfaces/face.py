"""Canonical record for a convex face of a line arrangement."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .geom import Line, Point, intersect, fmt


@dataclass(frozen=True)
class Face:
    """A face as its counterclockwise boundary.

    ``edges`` holds input-line indices in boundary order and
    ``vertices[i]`` is where ``edges[i]`` meets ``edges[i + 1]`` (cyclically
    when bounded).  Bounded faces start at their lexicographically smallest
    vertex; unbounded ones run from the incoming ray to the outgoing ray.  A
    face without vertices (half-plane, strip, whole plane) lists its edges
    sorted.  ``side`` tells a half-plane (one edge, no vertices) whether it
    lies above (+1) or below (-1) its line; it is 0 for every other face.
    """

    edges: tuple
    vertices: tuple
    bounded: bool
    side: int = 0

    @classmethod
    def canonical(cls, edges: Sequence[int], vertices: Sequence[Point], bounded: bool, side: int = 0) -> "Face":
        edges, vertices = tuple(edges), tuple(vertices)
        if not vertices:
            return cls(tuple(sorted(edges)), (), False, side if len(edges) == 1 else 0)
        if bounded:
            k = min(range(len(vertices)), key=vertices.__getitem__)
            edges = edges[k:] + edges[:k]
            vertices = vertices[k:] + vertices[:k]
        return cls(edges, vertices, bounded)

    @classmethod
    def from_sides(cls, lines: Sequence[Line], sides: Mapping[int, int]) -> "Face":
        """Build the face from its boundary lines and the side (+1 above, -1 below) it lies on.

        Every listed line must contribute an edge.
        """
        ids = list(sides)
        if len(ids) <= 1:
            return cls(tuple(ids), (), False, sides[ids[0]] if ids else 0)

        # traversal direction keeping the face on the left is s*(1, a)
        def key(i):
            return (0 if sides[i] > 0 else 1, lines[i].a)

        ids.sort(key=key)
        k = len(ids)
        gaps = []
        for j in range(k):
            i1, i2 = ids[j], ids[(j + 1) % k]
            s1, s2 = sides[i1], sides[i2]
            turn = s1 * s2 * (lines[i2].a - lines[i1].a)
            if turn <= 0:
                gaps.append(j)
        if not gaps:
            verts = [intersect(lines[ids[j]], lines[ids[(j + 1) % k]]) for j in range(k)]
            return cls.canonical(ids, verts, True)
        if len(gaps) == 1:
            g = gaps[0]
            seq = ids[g + 1:] + ids[: g + 1]
            verts = [intersect(lines[seq[j]], lines[seq[j + 1]]) for j in range(k - 1)]
            return cls.canonical(seq, verts, False)
        if k == 2:
            return cls(tuple(sorted(ids)), (), False)
        raise ValueError("boundary lines do not describe a convex face")

    @property
    def size(self) -> int:
        """Number of edges (the face's combinatorial complexity)."""
        return len(self.edges)

    @property
    def leftmost_vertex(self):
        return min(self.vertices) if self.vertices else None

    def to_json(self) -> dict:
        return {
            "edges": list(self.edges),
            "vertices": [[fmt(v.x), fmt(v.y)] for v in self.vertices],
            "bounded": self.bounded,
            **({"side": self.side} if self.side else {}),
        }

    def sort_key(self):
        return (len(self.edges), self.edges, self.vertices)
