#!/usr/bin/env python3
"""
Convex Cone Module

This module realizes the cone of compact convex bodies inside the unit ball
of a finite-dimensional space: support functions over a finite direction
set, Minkowski combinations, the support metric, barycenters of finitely
supported measures on bodies, exact orthogonal actions, fixed sets of
subgroups and the pushforward of an invariant random subgroup along
H -> Fix(H).

Bodies are polytopes with rational vertices, or vertices in a quadratic field
Q(√s) for the rotation groups of order 3 and 6; all identities are checked in
exact arithmetic.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

try:
    from .convex_hull import (
        HRepresentation, Point, add, convex_hull, dot, scale, slice_by_hyperplane, to_point
    )
    from .group_core import FiniteGroup
    from .irs import IRSDistribution, as_fraction, check_conjugation_invariance
    from .quadratic_field import Exact, quadratic
    from .subgroup_space import ElementSet, conjugate
    from .utils.exceptions import (
        AtomNotContained, DimensionMismatch, EmptyMeasure, LeavesUnitBall, NotContained,
        NotOrthogonal, Unsupported, ValidationError
    )
except ImportError:
    from convex_hull import (
        HRepresentation, Point, add, convex_hull, dot, scale, slice_by_hyperplane, to_point
    )
    from group_core import FiniteGroup
    from irs import IRSDistribution, as_fraction, check_conjugation_invariance
    from quadratic_field import Exact, quadratic
    from subgroup_space import ElementSet, conjugate
    from utils.exceptions import (
        AtomNotContained, DimensionMismatch, EmptyMeasure, LeavesUnitBall, NotContained,
        NotOrthogonal, Unsupported, ValidationError
    )

logger = logging.getLogger(__name__)

DEFAULT_COVERING_RADIUS = 0.2
STEREOGRAPHIC_DENOMINATOR = 1000

Matrix = Tuple[Tuple[Exact, ...], ...]


class DirectionSet:
    """
    Finite set of exact rational unit vectors.

    Rational points on the circle and the sphere come from inverse
    stereographic projection, so every vector has norm exactly 1. The
    coordinate vectors and their negatives are always included.
    """

    def __init__(self, dimension: int, vectors: Iterable[Sequence]):
        self.dimension = dimension
        unique = []
        for v in vectors:
            point = to_point(v)
            if len(point) != dimension:
                raise DimensionMismatch(f"Direction {point} is not in dimension {dimension}")
            if dot(point, point) != 1:
                raise ValidationError("Directions must be exact unit vectors", details={'vector': str(point)})
            if point not in unique:
                unique.append(point)
        for i in range(dimension):
            for sign in (1, -1):
                axis = tuple(Fraction(sign if j == i else 0) for j in range(dimension))
                if axis not in unique:
                    unique.append(axis)
        self.vectors: List[Point] = unique
        self._array = np.array([[float(c) for c in v] for v in unique])
        self.covering_radius = self._estimate_covering_radius()

    @classmethod
    def default(cls, dimension: int) -> "DirectionSet":
        """24 directions on the circle, about 200 on the sphere."""
        if dimension == 1:
            return cls(1, [])
        if dimension == 2:
            return cls(2, [_circle_point(2 * math.pi * k / 24) for k in range(24)])
        if dimension == 3:
            return cls(3, [_sphere_point(v) for v in _fibonacci_sphere(200)])
        raise ValidationError(f"Default direction sets exist in dimensions 1-3, not {dimension}")

    def _estimate_covering_radius(self) -> float:
        if self.dimension == 1:
            return 0.0
        if self.dimension == 2:
            angles = sorted(math.atan2(float(v[1]), float(v[0])) for v in self.vectors)
            gaps = [b - a for a, b in zip(angles, angles[1:])] + [angles[0] + 2 * math.pi - angles[-1]]
            return max(gaps) / 2
        reference = _fibonacci_sphere(5000)
        cosines = np.clip(reference @ self._array.T, -1.0, 1.0)
        return float(np.max(np.arccos(np.max(cosines, axis=1))))

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)


def _circle_point(angle: float) -> Point:
    if abs(math.cos(angle) + 1) < 1e-12:
        return (Fraction(-1), Fraction(0))
    t = Fraction(math.tan(angle / 2)).limit_denominator(STEREOGRAPHIC_DENOMINATOR)
    denominator = 1 + t * t
    return ((1 - t * t) / denominator, 2 * t / denominator)


def _fibonacci_sphere(count: int) -> np.ndarray:
    index = np.arange(count) + 0.5
    z = 1 - 2 * index / count
    radius = np.sqrt(1 - z * z)
    phi = math.pi * (3 - math.sqrt(5)) * index
    return np.stack([radius * np.cos(phi), radius * np.sin(phi), z], axis=1)


def _sphere_point(v: Sequence[float]) -> Point:
    """Rational point near v via stereographic projection from the north pole."""
    x, y, z = (float(c) for c in v)
    s = Fraction(x / (1 - z)).limit_denominator(STEREOGRAPHIC_DENOMINATOR)
    t = Fraction(y / (1 - z)).limit_denominator(STEREOGRAPHIC_DENOMINATOR)
    q = s * s + t * t
    return (2 * s / (q + 1), 2 * t / (q + 1), (q - 1) / (q + 1))


class ConvexBody:
    """
    Polytope in the closed unit ball given by its exact vertices.

    Equality is equality of the sorted vertex lists.
    """

    def __init__(self, points: Iterable[Sequence]):
        vertices, hrep = convex_hull(points)
        for v in vertices:
            if dot(v, v) > 1:
                raise LeavesUnitBall("Body leaves the unit ball", details={'vertex': [str(c) for c in v]})
        self.vertices: Tuple[Point, ...] = tuple(vertices)
        self.hrep: HRepresentation = hrep
        self.dimension = len(vertices[0])
        self._support_cache: Dict[int, Tuple[DirectionSet, List]] = {}

    @classmethod
    def point(cls, p: Sequence) -> "ConvexBody":
        return cls([p])

    @classmethod
    def segment(cls, p: Sequence, q: Sequence) -> "ConvexBody":
        return cls([p, q])

    def support(self, b: Sequence):
        """b+(C) = max over vertices of <b, v>."""
        if len(b) != self.dimension:
            raise DimensionMismatch(f"Direction of dimension {len(b)} for a body of dimension {self.dimension}")
        return max(dot(b, v) for v in self.vertices)

    def support_values(self, dirs: DirectionSet) -> List:
        """Cached support values over a direction set."""
        cached = self._support_cache.get(id(dirs))
        if cached is None or cached[0] is not dirs:
            cached = (dirs, [self.support(b) for b in dirs])
            self._support_cache[id(dirs)] = cached
        return cached[1]

    def contains_point(self, x: Sequence) -> bool:
        return self.hrep.contains(to_point(x))

    def key(self) -> Tuple[Point, ...]:
        return self.vertices

    def to_text_vertices(self) -> List[List[str]]:
        return [[str(c) for c in v] for v in self.vertices]

    def __eq__(self, other) -> bool:
        return isinstance(other, ConvexBody) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"ConvexBody({len(self.vertices)} vertices in dimension {self.dimension})"


def _require_dimension(*bodies: ConvexBody):
    dims = {body.dimension for body in bodies}
    if len(dims) > 1:
        raise DimensionMismatch(f"Bodies of dimensions {sorted(dims)}")


def support_eval(C: ConvexBody, b: Sequence) -> Tuple:
    """(b+(C), b-(C)) with b-(C) = -(-b)+(C)."""
    return C.support(b), -C.support([-c for c in b])


def minkowski_sum(A: ConvexBody, B: ConvexBody, lam=Fraction(1), mu=Fraction(1)) -> ConvexBody:
    """
    lam·A + mu·B as the hull of pairwise sums of scaled vertices.

    Raises:
        LeavesUnitBall: If the combination leaves the unit ball
    """
    _require_dimension(A, B)
    lam, mu = as_fraction(lam), as_fraction(mu)
    if lam < 0 or mu < 0:
        raise ValidationError("Minkowski coefficients must be nonnegative")
    return ConvexBody([add(scale(lam, a), scale(mu, b)) for a in A.vertices for b in B.vertices])


def cone_metric(A: ConvexBody, B: ConvexBody, dirs: DirectionSet):
    """
    max over dirs of |b+(A) - b+(B)|.

    Support functions are 2-Lipschitz on the unit ball, so the true supremum
    over all unit directions exceeds this by at most 2·dirs.covering_radius.
    """
    _require_dimension(A, B)
    if dirs.dimension != A.dimension:
        raise DimensionMismatch("Direction set and bodies differ in dimension")
    return max(abs(a - b) for a, b in zip(A.support_values(dirs), B.support_values(dirs)))


class BodyMeasure:
    """Finitely supported probability measure on convex bodies."""

    def __init__(self, atoms: Iterable[Tuple[ConvexBody, Union[Fraction, int, str]]]):
        pairs = [(body, as_fraction(w)) for body, w in atoms]
        if not pairs:
            raise EmptyMeasure("A body measure needs at least one atom")
        _require_dimension(*(body for body, _ in pairs))
        seen = set()
        for body, w in pairs:
            if w <= 0:
                raise ValidationError("Body weights must be positive", details={'weight': str(w)})
            if body in seen:
                raise ValidationError("Bodies of a measure must be pairwise distinct")
            seen.add(body)
        total = sum(w for _, w in pairs)
        if total != 1:
            raise ValidationError("Body weights must sum to 1", details={'sum': str(total)})
        self.atoms: Tuple[Tuple[ConvexBody, Fraction], ...] = tuple(pairs)
        self.dimension = pairs[0][0].dimension

    @classmethod
    def aggregate(cls, atoms: Iterable[Tuple[ConvexBody, Fraction]]) -> "BodyMeasure":
        merged: Dict[ConvexBody, Fraction] = {}
        for body, w in atoms:
            merged[body] = merged.get(body, Fraction(0)) + as_fraction(w)
        return cls([(body, w) for body, w in merged.items() if w != 0])

    @classmethod
    def dirac(cls, body: ConvexBody) -> "BodyMeasure":
        return cls([(body, Fraction(1))])

    def as_dict(self) -> Dict[ConvexBody, Fraction]:
        return dict(self.atoms)

    def is_dirac_at(self, body: ConvexBody) -> bool:
        return len(self.atoms) == 1 and self.atoms[0][0] == body

    def __eq__(self, other) -> bool:
        return isinstance(other, BodyMeasure) and self.as_dict() == other.as_dict()

    def __hash__(self) -> int:
        return hash(frozenset(self.atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"BodyMeasure({len(self.atoms)} atoms in dimension {self.dimension})"


def barycenter(nu: BodyMeasure) -> ConvexBody:
    """
    The body whose support function is sum_i w_i b+(C_i): the weighted
    Minkowski sum of the atoms.
    """
    if not isinstance(nu, BodyMeasure) or not nu.atoms:
        raise EmptyMeasure("Barycenter of an empty measure")
    (first, w0), rest = nu.atoms[0], nu.atoms[1:]
    result = ConvexBody([scale(w0, v) for v in first.vertices])
    for body, w in rest:
        result = minkowski_sum(result, body, 1, w)
    return result


def contains(C: ConvexBody, A: ConvexBody, dirs: Optional[DirectionSet] = None) -> bool:
    """A ⊆ C by exact vertex-in-polytope tests, with support dominance as a filter."""
    _require_dimension(A, C)
    if dirs is not None and any(a > c for a, c in zip(A.support_values(dirs), C.support_values(dirs))):
        return False
    return all(C.hrep.contains(v) for v in A.vertices)


def h_representation(C: ConvexBody) -> HRepresentation:
    return C.hrep


@dataclass
class ExtremePointReport:
    """Whether (A+B)/2 = C and, if so, whether A = B = C as forced."""
    midpoint_equals_body: bool
    forced_equalities: Optional[bool]

    @property
    def consistent(self) -> bool:
        return not self.midpoint_equals_body or bool(self.forced_equalities)

    def __bool__(self) -> bool:
        return self.consistent


def extreme_point_check(C: ConvexBody, A: ConvexBody, B: ConvexBody) -> ExtremePointReport:
    """
    C is an extreme point of the cone of its sub-bodies: (A+B)/2 = C with
    A, B ⊆ C forces A = B = C.

    Raises:
        NotContained: If A or B is not inside C
    """
    for name, body in (("A", A), ("B", B)):
        if not contains(C, body):
            raise NotContained(f"{name} is not contained in C")
    midpoint = minkowski_sum(A, B, Fraction(1, 2), Fraction(1, 2))
    if midpoint != C:
        return ExtremePointReport(False, None)
    forced = A == C and B == C
    if not forced:
        logger.error("Midpoint of two sub-bodies equals C without both being C")
    return ExtremePointReport(True, forced)


# ----------------------------------------------------------------------
# orthogonal actions

def to_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(to_point(row) for row in rows)


def identity_matrix(dimension: int) -> Matrix:
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(dimension)) for i in range(dimension))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    columns = list(zip(*b))
    return tuple(tuple(dot(row, col) for col in columns) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def apply_matrix(g: Matrix, v: Point) -> Point:
    return tuple(dot(row, v) for row in g)


def is_orthogonal(g: Matrix) -> bool:
    n = len(g)
    return all(len(row) == n for row in g) and matmul(transpose(g), g) == identity_matrix(n)


def check_orthogonal(g: Matrix):
    if not is_orthogonal(g):
        raise NotOrthogonal("Matrix is not exactly orthogonal", details={'matrix': [[str(c) for c in r] for r in g]})


def apply_action(g: Matrix, C: ConvexBody) -> ConvexBody:
    """
    Vertex-wise image g·C, with b+(gC) = (g^T b)+(C) checked on the axes.

    Raises:
        NotOrthogonal: If g is not exactly orthogonal
    """
    g = to_matrix(g)
    check_orthogonal(g)
    if len(g) != C.dimension:
        raise DimensionMismatch("Matrix and body differ in dimension")
    image = ConvexBody([apply_matrix(g, v) for v in C.vertices])
    gt = transpose(g)
    for b in identity_matrix(C.dimension):
        if image.support(b) != C.support(apply_matrix(gt, b)):
            raise ValidationError("Support covariance failed for an orthogonal image")
    return image


def act_on_measure(g: Matrix, nu: BodyMeasure) -> BodyMeasure:
    return BodyMeasure.aggregate((apply_action(g, body), w) for body, w in nu.atoms)


class OrthogonalGroup:
    """
    Finite group of exact orthogonal matrices closed from generators.

    ``marked`` is the same group as a tabulated FiniteGroup whose payload
    holds the matrices, so IRSs over it reuse the irs module.
    """

    def __init__(self, generators: Sequence[Tuple[str, Iterable[Iterable]]]):
        gens = []
        for label, rows in generators:
            g = to_matrix(rows)
            check_orthogonal(g)
            gens.append((label, g))
        if not gens:
            raise ValidationError("An orthogonal group needs at least one generator")
        self.dimension = len(gens[0][1])
        if any(len(g) != self.dimension for _, g in gens):
            raise DimensionMismatch("Generators act on different dimensions")
        self.generators = gens
        self.marked: FiniteGroup = FiniteGroup.from_elements(
            gens, matmul, identity_matrix(self.dimension), namer=_matrix_name, family="orthogonal"
        )

    def as_marked_group(self) -> FiniteGroup:
        return self.marked

    def matrix(self, element: int) -> Matrix:
        return self.marked.payload[element]

    def matrices(self, H: ElementSet) -> List[Matrix]:
        return [self.matrix(e) for e in H.sorted_elements()]

    def generator_matrices(self) -> List[Matrix]:
        return [g for _, g in self.generators]

    def __repr__(self) -> str:
        return f"OrthogonalGroup(order={self.marked.order}, dimension={self.dimension})"


def _matrix_name(g: Matrix) -> str:
    return "[" + "; ".join(" ".join(str(c) for c in row) for row in g) + "]"


def orthogonal_group(generators: Sequence[Tuple[str, Iterable[Iterable]]]) -> OrthogonalGroup:
    return OrthogonalGroup(generators)


def klein_group_on_square() -> Tuple[OrthogonalGroup, ConvexBody]:
    """The reflections in both axes acting on the square with vertices (±1/2, ±1/2)."""
    group = orthogonal_group([("x", [[1, 0], [0, -1]]), ("y", [[-1, 0], [0, 1]])])
    half = Fraction(1, 2)
    square = ConvexBody([(sx * half, sy * half) for sx in (1, -1) for sy in (1, -1)])
    return group, square


# cos and sin of 2π/n
_ROTATION_ENTRIES = {
    3: (Fraction(-1, 2), quadratic(0, Fraction(1, 2), 3)),
    4: (Fraction(0), Fraction(1)),
    6: (Fraction(1, 2), quadratic(0, Fraction(1, 2), 3)),
}
ROTATION_ORDERS = tuple(sorted(_ROTATION_ENTRIES))


def rotation_matrix(order: int) -> Matrix:
    """
    Rotation of the plane by 2π/order.

    Raises:
        Unsupported: Unless order is 3, 4 or 6
    """
    if order not in _ROTATION_ENTRIES:
        raise Unsupported(f"Exact rotations exist for orders {list(ROTATION_ORDERS)}, not {order}")
    c, s = _ROTATION_ENTRIES[order]
    return ((c, -s), (s, c))


def rotation_group_on_polygon(order: int, radius=Fraction(1, 2)) -> Tuple[OrthogonalGroup, ConvexBody]:
    """The cyclic rotation group of an order in (3, 4, 6) and the regular polygon with a vertex at (radius, 0)."""
    r = rotation_matrix(order)
    group = orthogonal_group([("r", r)])
    vertex: Point = (as_fraction(radius), Fraction(0))
    vertices = []
    for _ in range(order):
        vertices.append(vertex)
        vertex = apply_matrix(r, vertex)
    return group, ConvexBody(vertices)


def fix_set(matrices: Iterable[Iterable[Iterable]], C: ConvexBody) -> Optional[ConvexBody]:
    """
    C ∩ Fix(H) for H generated by the given matrices.

    Fix(H) is the common kernel of g - I; C is sliced by the hyperplanes
    given by the rows of the stacked g - I. Returns None when the slice is
    empty.
    """
    vertices = list(C.vertices)
    for rows in matrices:
        g = to_matrix(rows)
        if len(g) != C.dimension:
            raise DimensionMismatch("Matrix and body differ in dimension")
        for i, row in enumerate(g):
            normal = tuple(c - (1 if i == j else 0) for j, c in enumerate(row))
            if not any(normal):
                continue
            vertices = slice_by_hyperplane(vertices, normal)
            if not vertices:
                return None
    return ConvexBody(vertices)


def subgroup_fix_set(action: OrthogonalGroup, H: ElementSet, C: ConvexBody) -> Optional[ConvexBody]:
    return fix_set(action.matrices(H), C)


def pushforward_fix(mu: IRSDistribution, action: OrthogonalGroup, C: ConvexBody) -> BodyMeasure:
    """
    Image of mu under H -> Fix(H) ∩ C, with weights aggregated per body.

    Raises:
        EmptyMeasure: If some atom has an empty fixed set in C
    """
    action.marked.require_same(mu.parent, "IRS and matrix group")
    atoms = []
    for H, w in mu.atoms:
        fixed = subgroup_fix_set(action, H, C)
        if fixed is None:
            raise EmptyMeasure("An atom fixes no point of C", details={'atom': H.describe()})
        atoms.append((fixed, w))
    return BodyMeasure.aggregate(atoms)


def fix_equivariance_holds(mu: IRSDistribution, action: OrthogonalGroup, C: ConvexBody) -> bool:
    """g·Fix(H) = Fix(gHg^-1) for every atom and every group element (C invariant)."""
    group = action.marked
    for g in group.elements():
        matrix = action.matrix(g)
        for H, _ in mu.atoms:
            left = subgroup_fix_set(action, H, C)
            right = subgroup_fix_set(action, conjugate(H, g), C)
            if (left is None) != (right is None):
                return False
            if left is not None and apply_action(matrix, left) != right:
                return False
    return True


@dataclass
class MeasureVerdict:
    """Outcome of invariant_measure_test."""
    verdict: str
    barycenter: ConvexBody
    witness_direction: Optional[Point] = None
    gap: Optional[Fraction] = None

    def to_dict(self) -> Dict:
        return {
            'verdict': self.verdict,
            'barycenter': self.barycenter.to_text_vertices(),
            'witness_direction': [str(c) for c in self.witness_direction] if self.witness_direction else None,
            'gap': str(self.gap) if self.gap is not None else None,
        }


CONSISTENT = "Consistent"
VIOLATED = "Violated"
BARYCENTER_PROPER = "BarycenterProper"


def invariant_measure_test(nu: BodyMeasure, C: ConvexBody, dirs: DirectionSet) -> MeasureVerdict:
    """
    If bary(nu) = C then nu must be the point mass at C.

    Returns:
        MeasureVerdict: Consistent or Violated when the barycenter is C,
        otherwise BarycenterProper with the direction of largest support drop

    Raises:
        AtomNotContained: If an atom is not inside C
    """
    for body, _ in nu.atoms:
        if not contains(C, body):
            raise AtomNotContained("Measure atom is not contained in C", details={'atom': body.to_text_vertices()})
    bary = barycenter(nu)
    drops = [c - b for c, b in zip(C.support_values(dirs), bary.support_values(dirs))]
    if bary == C:
        if any(drops):
            raise ValidationError("Equal bodies with different support values")
        return MeasureVerdict(CONSISTENT if nu.is_dirac_at(C) else VIOLATED, bary)
    best = max(range(len(drops)), key=lambda i: (drops[i], -i))
    if drops[best] <= 0:
        # the direction set misses the drop; fall back to a vertex of C outside bary
        for v in C.vertices:
            if not bary.hrep.contains(v):
                violated = [h.normal for h in bary.hrep.inequalities if h.value(v) > 0]
                violated += [h.normal if h.value(v) > 0 else scale(-1, h.normal)
                             for h in bary.hrep.equalities if h.value(v) != 0]
                direction = violated[0]
                return MeasureVerdict(BARYCENTER_PROPER, bary, direction,
                                      C.support(direction) - bary.support(direction))
    return MeasureVerdict(BARYCENTER_PROPER, bary, dirs.vectors[best], drops[best])


@dataclass
class PipelineReport:
    """Step-by-step outcome of mu -> Fix pushforward -> barycenter."""
    mu_invariant: bool
    body_invariant: bool
    fix_equivariant: bool
    nu: Optional[BodyMeasure] = None
    nu_invariant: bool = False
    barycenter: Optional[ConvexBody] = None
    barycenter_fixed: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all([self.mu_invariant, self.body_invariant, self.fix_equivariant,
                    self.nu_invariant, self.barycenter_fixed])

    def to_dict(self) -> Dict:
        return {
            'mu_invariant': self.mu_invariant,
            'body_invariant': self.body_invariant,
            'fix_equivariant': self.fix_equivariant,
            'nu': [{'body': body.to_text_vertices(), 'weight': str(w)} for body, w in self.nu.atoms]
            if self.nu else None,
            'nu_invariant': self.nu_invariant,
            'barycenter': self.barycenter.to_text_vertices() if self.barycenter else None,
            'barycenter_fixed': self.barycenter_fixed,
            'passed': self.passed,
            'notes': self.notes,
        }


def fix_pipeline_report(mu: IRSDistribution, action: OrthogonalGroup, C: ConvexBody) -> PipelineReport:
    """Invariance of mu, pushforward nu, invariance of nu, barycenter, fixedness."""
    generators = action.generator_matrices()
    report = PipelineReport(
        mu_invariant=check_conjugation_invariance(mu).invariant,
        body_invariant=all(apply_action(g, C) == C for g in generators),
        fix_equivariant=False,
    )
    if not report.body_invariant:
        report.notes.append("C is not invariant under the group; later steps skipped")
        return report
    report.fix_equivariant = fix_equivariance_holds(mu, action, C)
    report.nu = pushforward_fix(mu, action, C)
    report.nu_invariant = all(act_on_measure(g, report.nu) == report.nu for g in generators)
    report.barycenter = barycenter(report.nu)
    report.barycenter_fixed = all(apply_action(g, report.barycenter) == report.barycenter for g in generators)
    logger.debug(f"Fix pipeline: passed={report.passed}")
    return report


def random_body(rng, dimension: int, points: int = 6, denominator: int = 8) -> ConvexBody:
    """Hull of random rational points in the cube [-1/2, 1/2]^d."""
    half = denominator // 2
    return ConvexBody([
        tuple(Fraction(rng.randint(-half, half), denominator) for _ in range(dimension))
        for _ in range(points)
    ])


def random_sub_body(rng, C: ConvexBody, points: int = 4) -> ConvexBody:
    """Hull of random convex combinations of the vertices of C."""
    result = []
    for _ in range(points):
        weights = [Fraction(rng.randint(0, 4)) for _ in C.vertices]
        if not any(weights):
            weights[rng.randrange(len(weights))] = Fraction(1)
        total = sum(weights)
        p = tuple(Fraction(0) for _ in range(C.dimension))
        for w, v in zip(weights, C.vertices):
            p = add(p, scale(w / total, v))
        result.append(p)
    return ConvexBody(result)


def face_of(C: ConvexBody, direction: Sequence) -> ConvexBody:
    """The face of C exposed by a direction."""
    top = C.support(direction)
    return ConvexBody([v for v in C.vertices if dot(direction, v) == top])


def support_difference(A: ConvexBody, B: ConvexBody, dirs: DirectionSet) -> List:
    return [a - b for a, b in zip(A.support_values(dirs), B.support_values(dirs))]


def body_from_vertices(rows: Iterable[Iterable]) -> ConvexBody:
    return ConvexBody([to_point(r) for r in rows])
