"""Many faces in line arrangements: exact algorithms, oracles and a CLI."""
from .errors import (
    DegenerateInput,
    GeometryError,
    ParamRange,
    ParseError,
    PointOnBoundary,
    PointOnLine,
)
from .face import Face
from .face_query import fq_build, fq_build_tradeoff, fq_query
from .geom import Line, Point
from .many_faces import many_faces_fast, many_faces_main
from .oracle import build_arrangement, face_of, many_faces_naive
from .segment_oracle import Segment, segment_faces_naive

__version__ = "0.1.0"

__all__ = [
    "DegenerateInput",
    "Face",
    "GeometryError",
    "Line",
    "ParamRange",
    "ParseError",
    "Point",
    "PointOnBoundary",
    "PointOnLine",
    "Segment",
    "build_arrangement",
    "face_of",
    "fq_build",
    "fq_build_tradeoff",
    "fq_query",
    "many_faces_fast",
    "many_faces_main",
    "many_faces_naive",
    "segment_faces_naive",
]
