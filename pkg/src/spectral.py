#!/usr/bin/env python3
"""
Spectral Module

This module builds Schreier graphs of finite-index subgroups of free groups
and measures them: the spectral radius of the Markov averaging operator on
the orthogonal complement of constants, an interval for the spectral radius
of the free-group Cayley graph, and Benjamini-Schramm statistics of rooted
labeled balls.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import eigvalsh
from scipy.optimize import minimize_scalar
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import eigsh

try:
    from .group_core import DEFAULT_BALL_CAP, FreeGroup, Letter, invert_letter
    from .group_fixtures import cyclic_group
    from .subgroup_space import CosetTable, Subgroup
    from .utils.exceptions import (
        GraphTooSmall, IncompleteTable, NoConvergence, Unsupported, ValidationError
    )
except ImportError:
    from group_core import DEFAULT_BALL_CAP, FreeGroup, Letter, invert_letter
    from group_fixtures import cyclic_group
    from subgroup_space import CosetTable, Subgroup
    from utils.exceptions import (
        GraphTooSmall, IncompleteTable, NoConvergence, Unsupported, ValidationError
    )

logger = logging.getLogger(__name__)

DENSE_LIMIT = 2000
POWER_WINDOW = 10
MAX_POWER_ITERATIONS = 10 ** 5
DEFAULT_TRAILING_WINDOW = 3
DEFAULT_CAYLEY_RADIUS = 14
EXPLICIT_BALL_RADIUS = 6
# rounding allowance added to the numerically evaluated upper certificate
CERTIFICATE_SLACK = 1e-12


class SchreierGraph:
    """
    Labeled graph of a transitive permutation action of a free group.

    ``columns[letter][v]`` is the neighbor v·s; the column of s^-1 is the
    inverse permutation of the column of s. Vertex 0 is the base.
    """

    def __init__(self, group: FreeGroup, columns: Dict[Letter, Sequence[int]]):
        """
        Initialize a Schreier graph.

        Args:
            group (FreeGroup): Free group whose letters label the edges
            columns: letter -> neighbor list

        Raises:
            IncompleteTable: If a letter has no column
            ValidationError: If columns are not inverse permutations or the
                graph is disconnected
        """
        self.group = group
        self.letters: List[Letter] = group.letters()
        self.columns: Dict[Letter, np.ndarray] = {}
        n = None
        for letter in self.letters:
            if letter not in columns:
                raise IncompleteTable(f"No column for letter {group.letter_label(letter)}")
            column = np.asarray(columns[letter], dtype=np.int64)
            if n is None:
                n = len(column)
            if len(column) != n or not np.array_equal(np.sort(column), np.arange(n)):
                raise ValidationError(f"Column of {group.letter_label(letter)} is not a permutation")
            self.columns[letter] = column
        self.n = n
        for letter in self.letters:
            forward = self.columns[letter]
            backward = self.columns[invert_letter(letter)]
            if not np.array_equal(backward[forward], np.arange(n)):
                raise ValidationError("Column of an inverse letter is not the inverse permutation",
                                      details={'letter': group.letter_label(letter)})
        if n > 1 and connected_components(self.adjacency(), directed=False)[0] != 1:
            raise ValidationError("Schreier graph is not connected", details={'vertices': n})

    @classmethod
    def from_subgroup(cls, H: Subgroup) -> "SchreierGraph":
        """Graph of the coset action of a finite-index subgroup."""
        if not isinstance(H, CosetTable):
            raise IncompleteTable("Schreier graphs need a complete coset table",
                                  details={'subgroup': H.describe()})
        rows = H.rows()
        letters = H.parent.letters()
        columns = {letter: [row[p] for row in rows] for p, letter in enumerate(letters)}
        return cls(H.parent, columns)

    @property
    def degree(self) -> int:
        return len(self.letters)

    def neighbor(self, v: int, letter: Letter) -> int:
        return int(self.columns[letter][v])

    def adjacency(self) -> sparse.csr_matrix:
        """Unweighted adjacency with multiplicities."""
        rows = np.concatenate([np.arange(self.n) for _ in self.letters])
        cols = np.concatenate([self.columns[letter] for letter in self.letters])
        data = np.ones(len(rows))
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def markov_operator(self) -> sparse.csr_matrix:
        """M = (1/|S|) sum_s P_s, symmetric and doubly stochastic."""
        return self.adjacency() / float(self.degree)

    def relabeled(self, permutation: Sequence[int]) -> "SchreierGraph":
        """Same graph with vertex v renamed permutation[v]."""
        perm = np.asarray(permutation, dtype=np.int64)
        columns = {}
        for letter, column in self.columns.items():
            new = np.empty(self.n, dtype=np.int64)
            new[perm] = perm[column]
            columns[letter] = new
        return SchreierGraph(self.group, columns)

    def __repr__(self) -> str:
        return f"SchreierGraph(vertices={self.n}, degree={self.degree})"


@dataclass(frozen=True)
class CayleyInterval:
    """Certified interval for the spectral radius of a free-group Cayley graph."""
    lower: float
    upper: float
    radius: int
    rank: int

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass
class LocalBallStatistics:
    """Frequencies of rooted labeled R-balls over all vertices."""
    radius: int
    frequencies: Dict[Tuple, Fraction]
    vertex_count: int

    def classes(self) -> List[Tuple[Tuple, Fraction]]:
        return sorted(self.frequencies.items())

    def frequency(self, key: Tuple) -> Fraction:
        return self.frequencies.get(key, Fraction(0))


@dataclass
class ApproximationRow:
    index: int
    rho0: Optional[float]
    bs_distance: Fraction


@dataclass
class ApproximationReport:
    """Finite-family evidence for the local approximation statement."""
    rows: List[ApproximationRow]
    radius: int
    cayley: CayleyInterval
    tolerance: float
    window: int
    hypothesis_observed: bool
    conclusion_observed: bool
    theorem_consistent: bool
    notes: List[str] = field(default_factory=list)


def schreier_graph(H: Subgroup) -> SchreierGraph:
    """Schreier graph of a subgroup given by a complete coset table."""
    return SchreierGraph.from_subgroup(H)


def markov_spectral_radius_rho0(graph: SchreierGraph, tolerance: float = 1e-10,
                                method: str = "auto",
                                max_iterations: int = MAX_POWER_ITERATIONS) -> float:
    """
    Spectral radius of M on the orthogonal complement of constants.

    Dense symmetric eigendecomposition of M - J/n for n <= 2000, otherwise
    power iteration on (M - J/n)^2 with the mean removed every step.

    Args:
        graph (SchreierGraph): Connected Schreier graph
        tolerance (float): Relative Rayleigh-quotient change over the window
        method (str): "auto", "dense" or "power"
        max_iterations (int): Power-iteration cap

    Returns:
        float: rho_0

    Raises:
        GraphTooSmall: For a single vertex
        NoConvergence: When the power iteration hits its cap
    """
    if tolerance <= 0:
        raise ValidationError("tolerance must be positive", details={'tolerance': tolerance})
    n = graph.n
    if n == 1:
        raise GraphTooSmall("l2_0 of a one-vertex graph is empty; rho_0 is undefined")
    if method not in ("auto", "dense", "power"):
        raise ValidationError(f"Unknown method '{method}'")
    if method == "dense" or (method == "auto" and n <= DENSE_LIMIT):
        deflated = graph.markov_operator().toarray() - 1.0 / n
        eigenvalues = eigvalsh(deflated)
        return float(min(1.0, np.max(np.abs(eigenvalues))))
    return _power_rho0(graph, tolerance, max_iterations)


def _power_rho0(graph: SchreierGraph, tolerance: float, max_iterations: int) -> float:
    M = graph.markov_operator()

    def apply(x: np.ndarray) -> np.ndarray:
        y = M @ x
        return y - y.mean()

    rng = np.random.default_rng(0)
    x = rng.standard_normal(graph.n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    history = deque(maxlen=POWER_WINDOW + 1)
    value = 0.0
    for iteration in range(1, max_iterations + 1):
        y = apply(apply(x))
        value = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        history.append(value)
        if len(history) == history.maxlen:
            change = abs(history[-1] - history[0])
            if change <= tolerance * max(abs(value), np.finfo(float).tiny):
                residual = float(np.linalg.norm(y - value * x))
                logger.debug(f"Power iteration converged after {iteration} steps, residual {residual:.3e}")
                return float(min(1.0, math.sqrt(max(value, 0.0))))
        x = y / norm
        x -= x.mean()
        x /= np.linalg.norm(x)
    raise NoConvergence("Power iteration did not converge", iterations=max_iterations,
                        last_value=math.sqrt(max(value, 0.0)))


def _radial_jacobi(k: int, radius: int) -> np.ndarray:
    """
    Symmetrized radial part of M on F_k truncated to radii 0..radius.

    Off-diagonals are 1/sqrt(2k) between radii 0 and 1 and sqrt(2k-1)/(2k)
    further out.
    """
    size = radius + 1
    J = np.zeros((size, size))
    for r in range(radius):
        value = 1.0 / math.sqrt(2 * k) if r == 0 else math.sqrt(2 * k - 1) / (2 * k)
        J[r, r + 1] = J[r + 1, r] = value
    return J


def return_probability(group: FreeGroup, m: int) -> Fraction:
    """
    Exact return probability <M^(2m) delta_e, delta_e> on F_k.

    Radial dynamic programming: from radius 0 the walk moves out; from
    radius r >= 1 it moves in with probability 1/(2k) and out otherwise.
    """
    k2 = 2 * group.rank
    inward, outward = Fraction(1, k2), Fraction(k2 - 1, k2)
    distribution = {0: Fraction(1)}
    for _ in range(2 * m):
        step: Dict[int, Fraction] = {}
        for r, p in distribution.items():
            if r == 0:
                step[1] = step.get(1, Fraction(0)) + p
            else:
                step[r - 1] = step.get(r - 1, Fraction(0)) + p * inward
                step[r + 1] = step.get(r + 1, Fraction(0)) + p * outward
        distribution = step
    return distribution.get(0, Fraction(0))


def brute_force_return_probability(group: FreeGroup, m: int) -> Fraction:
    """Count closed walks of length 2m over all reduced words (small m only)."""
    walks = {(): 1}
    for _ in range(2 * m):
        step: Dict[Tuple, int] = {}
        for w, count in walks.items():
            for letter in group.letters():
                v = group._multiply(w, (letter,))
                step[v] = step.get(v, 0) + count
        walks = step
    return Fraction(walks.get((), 0), (2 * group.rank) ** (2 * m))


def _radius_bounds(k: int, radius: int) -> Tuple[float, float]:
    inward = 1.0 / (2 * k)
    outward = (2 * k - 1) / (2 * k)
    J = _radial_jacobi(k, radius)
    lower = float(eigvalsh(J)[-1])

    def tail(t: float) -> float:
        return inward / t + outward * t

    def certificate(t: float) -> float:
        corner = J.copy()
        corner[radius, radius] = outward * t
        return max(float(eigvalsh(corner)[-1]), tail(t))

    t0 = 1.0 / math.sqrt(2 * k - 1)
    result = minimize_scalar(certificate, bounds=(t0 / 2, 1.0), method="bounded",
                             options={'xatol': 1e-12})
    upper = min(certificate(t0), float(result.fun), 1.0) + CERTIFICATE_SLACK
    return lower, upper


def cayley_spectral_radius_estimate(group: FreeGroup, radius: int,
                                    cross_check: Optional[bool] = None,
                                    cap: int = DEFAULT_BALL_CAP) -> CayleyInterval:
    """
    Interval [lower, upper] containing the spectral radius of Cay(F_k, S).

    lower is the best of the truncated radial operator's top eigenvalue (a
    Rayleigh quotient of a finitely supported vector) and the roots
    p_2m^(1/2m) for m <= radius. upper is a Collatz-Wielandt bound: a
    positive radial function equal to the Perron vector of the truncation
    with boundary slope t, continued by t^r beyond the ball, satisfies
    Mh <= c h with c minimized over t. Bounds are intersected over radii
    1..radius, so the interval shrinks as the radius grows.

    Args:
        group (FreeGroup): Free group of rank at least 2
        radius (int): Truncation radius
        cross_check (bool): Also compute the truncated operator on the
            explicit ball (default: radius <= 6)
        cap (int): Ball cap for the explicit cross-check

    Raises:
        BallTooLarge: If the explicit cross-check ball exceeds cap
    """
    k = group.rank
    if k < 2:
        raise Unsupported("The interval method needs rank at least 2", details={'rank': k})
    if radius < 1:
        raise ValidationError("radius must be at least 1", details={'radius': radius})
    lower, upper = 0.0, 1.0
    for r in range(1, radius + 1):
        lo, hi = _radius_bounds(k, r)
        lower = max(lower, lo)
        upper = min(upper, hi)
    for m in range(1, radius + 1):
        lower = max(lower, float(return_probability(group, m)) ** (1.0 / (2 * m)))
    if cross_check is None:
        cross_check = radius <= EXPLICIT_BALL_RADIUS
    if cross_check:
        explicit = explicit_ball_eigenvalue(group, radius, cap)
        radial = float(eigvalsh(_radial_jacobi(k, radius))[-1])
        if abs(explicit - radial) > 1e-8:
            raise ValidationError("Explicit ball and radial truncation disagree",
                                  details={'explicit': explicit, 'radial': radial})
    logger.debug(f"Cayley interval at radius {radius}: [{lower:.12f}, {upper:.12f}]")
    return CayleyInterval(lower, upper, radius, k)


def explicit_ball_eigenvalue(group: FreeGroup, radius: int, cap: int = DEFAULT_BALL_CAP) -> float:
    """Top eigenvalue of M restricted (Dirichlet) to the explicit ball."""
    ball = group.ball(radius, cap)
    position = {w: i for i, w in enumerate(ball)}
    rows, cols = [], []
    for w, i in position.items():
        for letter in group.letters():
            j = position.get(group._multiply(w, (letter,)))
            if j is not None:
                rows.append(i)
                cols.append(j)
    n = len(ball)
    matrix = sparse.csr_matrix((np.full(len(rows), 1.0 / (2 * group.rank)), (rows, cols)), shape=(n, n))
    if n <= DENSE_LIMIT:
        return float(eigvalsh(matrix.toarray())[-1])
    return float(eigsh(matrix, k=1, which='LA', return_eigenvectors=False)[0])


def rooted_ball_key(neighbor: Callable[[Hashable, Letter], Hashable], root: Hashable,
                    letters: Sequence[Letter], radius: int) -> Tuple:
    """
    Canonical key of the rooted labeled ball of the given radius.

    Vertices are numbered in breadth-first discovery order with letters in
    canonical order; each vertex contributes its neighbor numbers per
    letter, -1 for neighbors outside the ball. Every vertex has exactly one
    edge per letter, so this numbering is an isomorphism invariant.
    """
    order = {root: 0}
    depth = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        if depth[v] == radius:
            continue
        for letter in letters:
            w = neighbor(v, letter)
            if w not in order:
                order[w] = len(order)
                depth[w] = depth[v] + 1
                queue.append(w)
    vertices = sorted(order, key=order.get)
    return tuple(tuple(order.get(neighbor(v, letter), -1) for letter in letters) for v in vertices)


def tree_ball_key(group: FreeGroup, radius: int) -> Tuple:
    """Key of the radius-R ball of the Cayley tree of F_k."""
    return rooted_ball_key(lambda w, letter: group._multiply(w, (letter,)), (), group.letters(), radius)


def bs_local_statistics(graph: SchreierGraph, radius: int) -> LocalBallStatistics:
    """Frequencies of the rooted labeled R-balls of all vertices."""
    if radius < 0:
        raise ValidationError("radius must be nonnegative", details={'radius': radius})
    counts: Dict[Tuple, int] = {}
    for v in range(graph.n):
        key = rooted_ball_key(graph.neighbor, v, graph.letters, radius)
        counts[key] = counts.get(key, 0) + 1
    return LocalBallStatistics(radius, {key: Fraction(c, graph.n) for key, c in counts.items()}, graph.n)


def bs_distance_to_cayley(stats: LocalBallStatistics, group: FreeGroup) -> Fraction:
    """Total-variation distance to the Cayley point mass: 1 - freq(tree ball)."""
    return 1 - stats.frequency(tree_ball_key(group, stats.radius))


def local_approximation_report(family: Sequence[Subgroup], radius: int, tolerance: float,
                               window: int = DEFAULT_TRAILING_WINDOW,
                               cayley_radius: int = DEFAULT_CAYLEY_RADIUS,
                               rho_tolerance: float = 1e-10,
                               on_row: Optional[Callable[[ApproximationRow], None]] = None) -> ApproximationReport:
    """
    Table of (index, rho_0, BS distance) with observed flags.

    hypothesis_observed: the largest defined rho_0 among the last ``window``
    members is at most the Cayley upper bound plus tolerance.
    conclusion_observed: the last BS distance is below the first one and the
    trailing mean is below the first one as well.
    theorem_consistent: not hypothesis or conclusion.
    """
    if not family:
        raise ValidationError("Family must not be empty")
    group = family[0].parent
    for H in family:
        group.require_same(H.parent, "family members")
    rows = []
    for H in family:
        graph = schreier_graph(H)
        try:
            rho0 = markov_spectral_radius_rho0(graph, rho_tolerance)
        except GraphTooSmall:
            rho0 = None
        distance = bs_distance_to_cayley(bs_local_statistics(graph, radius), group)
        rows.append(ApproximationRow(graph.n, rho0, distance))
        if on_row is not None:
            on_row(rows[-1])
    cayley = cayley_spectral_radius_estimate(group, cayley_radius, cross_check=False)

    trailing = rows[-window:]
    defined = [row.rho0 for row in trailing if row.rho0 is not None]
    notes = []
    if defined:
        hypothesis = max(defined) <= cayley.upper + tolerance
    else:
        hypothesis = False
        notes.append("no defined rho_0 in the trailing window")
    first, last = rows[0].bs_distance, rows[-1].bs_distance
    trailing_mean = sum((row.bs_distance for row in trailing), Fraction(0)) / len(trailing)
    conclusion = last < first and trailing_mean < first
    return ApproximationReport(rows, radius, cayley, tolerance, window, hypothesis, conclusion,
                               (not hypothesis) or conclusion, notes)


def cycle_family(n: int, rank: int = 2) -> CosetTable:
    """Kernel of F_k -> Z/n sending a to 1 and the other generators to 0."""
    group = FreeGroup(rank)
    images = {label: (1 % n if i == 0 else 0) for i, label in enumerate(group.generator_labels)}
    return CosetTable.kernel(group, images, cyclic_group(n))


def cycle_rho0(n: int) -> float:
    """Closed form (1 + cos(2 pi / n)) / 2 for the rank-2 cycle family."""
    return (1 + math.cos(2 * math.pi / n)) / 2


def random_schreier_subgroup(n: int, seed: int, rank: int = 2) -> CosetTable:
    """
    Point stabilizer of a random transitive action of F_k on n points.

    Permutations are drawn from numpy's default generator seeded with
    (seed, n) and redrawn until the graph is connected.
    """
    group = FreeGroup(rank)
    rng = np.random.default_rng([seed, n])
    while True:
        perms = [rng.permutation(n) for _ in range(rank)]
        rows = np.concatenate([np.arange(n)] * rank)
        cols = np.concatenate(perms)
        graph = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        if n == 1 or connected_components(graph, directed=False)[0] == 1:
            break
    return CosetTable.from_permutations(group, {
        label: perm.tolist() for label, perm in zip(group.generator_labels, perms)
    })


def random_family(indices: Sequence[int], seed: int, rank: int = 2) -> List[CosetTable]:
    """Random Schreier subgroups of the given indices, one seed for all."""
    return [random_schreier_subgroup(n, seed, rank) for n in indices]


def export_dot(graph: SchreierGraph, name: str = "schreier") -> str:
    """DOT text with one labeled edge per positive letter."""
    lines = [f"digraph {name} {{"]
    for v in range(graph.n):
        lines.append(f"  {v};")
    for letter in graph.letters:
        if letter[1] < 0:
            continue
        label = graph.group.letter_label(letter)
        for v in range(graph.n):
            lines.append(f'  {v} -> {graph.neighbor(v, letter)} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
