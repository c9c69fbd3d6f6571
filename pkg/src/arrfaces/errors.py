class GeometryError(ValueError):
    """Base error; ``code`` is the stable identifier reported by the CLI."""

    code = "GEOMETRY_ERROR"

    def __init__(self, message: str = ""):
        super().__init__(f"{self.code}: {message}" if message else self.code)


class DegenerateInput(GeometryError):
    code = "DEGENERATE_INPUT"


class PointOnLine(DegenerateInput):
    code = "POINT_ON_LINE"


class PointOnCellEdge(DegenerateInput):
    code = "POINT_ON_CELL_EDGE"


class ParseError(GeometryError):
    code = "PARSE_ERROR"


class ParamRange(GeometryError):
    code = "PARAM_RANGE"


class ChainError(GeometryError):
    code = "CHAIN_ERROR"


class NotSorted(ChainError):
    code = "NOT_SORTED"


class NotConvex(ChainError):
    code = "NOT_CONVEX"


class XOverlap(ChainError):
    code = "X_OVERLAP"


class NotFound(ChainError):
    code = "NOT_FOUND"


class EmptyChain(ChainError):
    code = "EMPTY_CHAIN"


class EmptyHull(EmptyChain):
    code = "EMPTY_HULL"


class SegmentsIntersect(GeometryError):
    code = "SEGMENTS_INTERSECT"


class HullsIntersect(GeometryError):
    code = "HULLS_INTERSECT"


class PointOnBoundary(DegenerateInput):
    code = "POINT_ON_BOUNDARY"
