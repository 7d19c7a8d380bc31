#!/usr/bin/env python3
"""
Convex Hull Module

Exact convex hulls of finite point sets in dimension at most 3, with their
H-representations. Coordinates are fractions.Fraction, or QuadraticNumber
for bodies over a quadratic field; floats are used only to let scipy's Qhull
propose candidate facets of full-dimensional 3-D hulls, and every proposed
facet is verified in exact arithmetic.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull

try:
    from .quadratic_field import Exact, exact_value
    from .utils.exceptions import DimensionMismatch, Unsupported, ValidationError
except ImportError:
    from quadratic_field import Exact, exact_value
    from utils.exceptions import DimensionMismatch, Unsupported, ValidationError

logger = logging.getLogger(__name__)

Point = Tuple[Exact, ...]


def to_point(values: Iterable) -> Point:
    """Exact point from ints, Fractions, quadratic numbers or their text forms."""
    return tuple(exact_value(v) for v in values)


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionMismatch(f"Dimensions {len(u)} and {len(v)} differ")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sub(u: Point, v: Point) -> Point:
    return tuple(a - b for a, b in zip(u, v))


def add(u: Point, v: Point) -> Point:
    return tuple(a + b for a, b in zip(u, v))


def scale(c, u: Point) -> Point:
    return tuple(c * a for a in u)


def cross(u: Point, v: Point) -> Point:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def row_reduce(vectors: Iterable[Point]) -> Tuple[List[Point], List[int]]:
    """Reduced row echelon basis of the span and its pivot columns."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return [], []
    width = len(rows[0])
    pivots: List[int] = []
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][col]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return [tuple(row) for row in rows[:r]], pivots


def nullspace(rows: Sequence[Point], width: int) -> List[Point]:
    """Basis of {x : <row, x> = 0 for every row}."""
    basis, pivots = row_reduce(rows)
    free = [c for c in range(width) if c not in pivots]
    vectors = []
    for f in free:
        x = [Fraction(0)] * width
        x[f] = Fraction(1)
        for row, p in zip(basis, pivots):
            x[p] = -row[f]
        vectors.append(tuple(x))
    return vectors


@dataclass(frozen=True)
class HalfSpace:
    """<normal, x> <= offset (or == offset for equalities)."""
    normal: Point
    offset: Fraction

    def value(self, x: Point) -> Fraction:
        return dot(self.normal, x) - self.offset


@dataclass(frozen=True)
class HRepresentation:
    equalities: Tuple[HalfSpace, ...]
    inequalities: Tuple[HalfSpace, ...]

    def contains(self, x: Point) -> bool:
        return (all(h.value(x) == 0 for h in self.equalities) and
                all(h.value(x) <= 0 for h in self.inequalities))


def _polygon_order(points: List[Point], pivots: Sequence[int]) -> List[Point]:
    """Monotone chain on the two pivot coordinates; collinear points dropped."""
    unique = sorted(set(points), key=lambda p: (p[pivots[0]], p[pivots[1]]))

    def turn(o: Point, a: Point, b: Point) -> Fraction:
        i, j = pivots
        return (a[i] - o[i]) * (b[j] - o[j]) - (a[j] - o[j]) * (b[i] - o[i])

    lower: List[Point] = []
    for p in unique:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in reversed(unique):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _normalized(normal: Point, offset: Fraction) -> Tuple[Point, Fraction]:
    lead = next(abs(a) for a in normal if a != 0)
    return tuple(a / lead for a in normal), offset / lead


def _facets_3d(points: List[Point]) -> Dict[Tuple[Point, Fraction], List[Point]]:
    """Supporting planes of a full-dimensional 3-D hull and the points on them."""
    hull = ConvexHull(np.array([[float(c) for c in p] for p in points]))
    planes: Dict[Tuple[Point, Fraction], List[Point]] = {}
    for simplex in hull.simplices:
        a, b, c = (points[i] for i in simplex)
        normal = cross(sub(b, a), sub(c, a))
        if not any(normal):
            continue
        offset = dot(normal, a)
        values = [dot(normal, p) - offset for p in points]
        if all(v <= 0 for v in values):
            pass
        elif all(v >= 0 for v in values):
            normal, offset = scale(-1, normal), -offset
        else:
            raise ValidationError("Qhull proposed a facet that is not supporting in exact arithmetic")
        key = _normalized(normal, offset)
        if key not in planes:
            planes[key] = [p for p in points if dot(key[0], p) == key[1]]
    return planes


def convex_hull(points: Iterable[Sequence]) -> Tuple[List[Point], HRepresentation]:
    """
    Vertices and H-representation of the convex hull of rational points.

    Args:
        points: Nonempty collection of points of a common dimension

    Returns:
        (vertices, hrep): vertices sorted lexicographically; hrep with the
        affine-hull equalities and facet inequalities

    Raises:
        DimensionMismatch: If dimensions differ
        Unsupported: For affine hulls of dimension above 3
    """
    pts = [to_point(p) for p in points]
    if not pts:
        raise ValidationError("The convex hull of no points is empty")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise DimensionMismatch("Points have different dimensions")
    pts = sorted(set(pts))
    origin = pts[0]
    basis, pivots = row_reduce(sub(p, origin) for p in pts[1:])
    rank = len(basis)
    equalities = tuple(HalfSpace(n, dot(n, origin)) for n in nullspace(basis, dim))

    if rank == 0:
        return [origin], HRepresentation(equalities, ())
    if rank == 1:
        direction = basis[0]
        low = min(pts, key=lambda p: dot(direction, p))
        high = max(pts, key=lambda p: dot(direction, p))
        inequalities = (HalfSpace(direction, dot(direction, high)),
                        HalfSpace(scale(-1, direction), -dot(direction, low)))
        return sorted([low, high]), HRepresentation(equalities, inequalities)
    if rank == 2:
        cycle = _polygon_order(pts, pivots)
        b1, b2 = basis
        inequalities = []
        for i, v in enumerate(cycle):
            w = cycle[(i + 1) % len(cycle)]
            e = sub(w, v)
            normal = tuple(dot(b2, e) * x - dot(b1, e) * y for x, y in zip(b1, b2))
            other = cycle[(i + 2) % len(cycle)]
            if dot(normal, sub(other, v)) > 0:
                normal = scale(-1, normal)
            inequalities.append(HalfSpace(normal, dot(normal, v)))
        return sorted(cycle), HRepresentation(equalities, tuple(inequalities))
    if rank == 3 and dim == 3:
        planes = _facets_3d(pts)
        vertices = set()
        for plane_points in planes.values():
            face_vertices, _ = convex_hull(plane_points)
            vertices.update(face_vertices)
        inequalities = tuple(HalfSpace(n, c) for n, c in sorted(planes))
        logger.debug(f"3-D hull with {len(vertices)} vertices and {len(inequalities)} facets")
        return sorted(vertices), HRepresentation(equalities, inequalities)
    raise Unsupported(f"Exact hulls are implemented up to dimension 3, got affine dimension {rank}")


def slice_by_hyperplane(vertices: Sequence[Point], normal: Point,
                        offset: Fraction = Fraction(0)) -> List[Point]:
    """
    Points whose hull is conv(vertices) ∩ {<normal, x> = offset}.

    Every vertex of the slice lies on a segment between two vertices on
    opposite sides, so all such crossings together with the vertices on the
    hyperplane suffice.
    """
    values = [dot(normal, v) - offset for v in vertices]
    result = [v for v, s in zip(vertices, values) if s == 0]
    for i, (p, sp) in enumerate(zip(vertices, values)):
        for q, sq in zip(vertices[i + 1:], values[i + 1:]):
            if sp * sq < 0:
                t = sp / (sp - sq)
                result.append(add(p, scale(t, sub(q, p))))
    return result
