#!/usr/bin/env python3
"""
Subgroup Space Module

This module represents subgroups exactly and implements the discrete
specialization of the Chabauty topology: ball fingerprints, the dyadic
agreement metric, conjugation, normality, normal closures, projections to
quotients and intersections.

Three representations are used:
    ElementSet  - subgroups of finite groups, as sets of element indices
    CosetTable  - finite-index subgroups of free groups (complete graphs)
    CoreGraph   - finitely generated subgroups of free groups (folded graphs)
"""

import logging
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

try:
    from .folded_graphs import (
        DEFAULT_PRODUCT_BOUND, LabeledGraph, enumerate_cosets,
        fold_words, graph_from_table, product_graph
    )
    from .group_core import (
        DEFAULT_BALL_CAP, FiniteGroup, FreeGroup, MarkedGroup, Word,
        hom_letter_images, integer_group
    )
    from .utils.exceptions import (
        GroupTooLarge, IncompleteTable, NotNormal,
        SerializationError, Undecided, Unsupported, ValidationError
    )
except ImportError:
    from folded_graphs import (
        DEFAULT_PRODUCT_BOUND, LabeledGraph, enumerate_cosets,
        fold_words, graph_from_table, product_graph
    )
    from group_core import (
        DEFAULT_BALL_CAP, FiniteGroup, FreeGroup, MarkedGroup, Word,
        hom_letter_images, integer_group
    )
    from utils.exceptions import (
        GroupTooLarge, IncompleteTable, NotNormal,
        SerializationError, Undecided, Unsupported, ValidationError
    )

logger = logging.getLogger(__name__)

MAX_ENUMERATION_ORDER = 200


class Subgroup(ABC):
    """A subgroup of a marked group in one exact representation."""

    kind = "subgroup"

    def __init__(self, parent: MarkedGroup):
        self.parent = parent

    @abstractmethod
    def contains(self, g: Hashable) -> bool:
        """Membership of a canonical element of the parent."""
        pass

    @abstractmethod
    def key(self) -> Tuple:
        """Canonical key; equal keys over one parent mean equal subgroups."""
        pass

    @abstractmethod
    def index(self) -> Optional[int]:
        """Index in the parent, None when infinite."""
        pass

    def __contains__(self, g: Hashable) -> bool:
        return self.contains(g)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subgroup) and self.parent.same_group(other.parent)
                and self.key() == other.key())

    def __hash__(self) -> int:
        return hash((self.parent.signature, self.key()))

    def describe(self) -> str:
        return f"{self.kind} in {self.parent.describe()}"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


class ElementSet(Subgroup):
    """Subgroup of a finite group stored as its set of element indices."""

    kind = "elementset"

    def __init__(self, parent: FiniteGroup, elements: Iterable[int], check: bool = True):
        """
        Initialize an element-set subgroup.

        Args:
            parent (FiniteGroup): Ambient finite group
            elements: Element indices
            check (bool): Verify identity and closure under multiplication

        Raises:
            ValidationError: If the set is not a subgroup
        """
        super().__init__(parent)
        self.elements: FrozenSet[int] = frozenset(parent.check_element(g) for g in elements)
        if check:
            if parent.identity() not in self.elements:
                raise ValidationError("Subgroup must contain the identity")
            for x in self.elements:
                for y in self.elements:
                    if parent.table[x][y] not in self.elements:
                        raise ValidationError(
                            "Element set is not closed under multiplication",
                            details={'x': parent.element_name(x), 'y': parent.element_name(y)}
                        )

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains(self, g: int) -> bool:
        return g in self.elements

    def key(self) -> Tuple:
        return ("elements", tuple(sorted(self.elements)))

    def index(self) -> int:
        return self.parent.order // len(self.elements)

    def sorted_elements(self) -> List[int]:
        return sorted(self.elements)

    def element_names(self) -> List[str]:
        return [self.parent.element_name(g) for g in self.sorted_elements()]

    def describe(self) -> str:
        names = self.element_names()
        shown = ", ".join(names) if len(names) <= 8 else ", ".join(names[:8]) + ", ..."
        return f"{{{shown}}} (order {self.order}) in {self.parent.describe()}"


class FreeSubgroup(Subgroup):
    """Subgroup of a free group read off a canonical rooted labeled graph."""

    def __init__(self, parent: FreeGroup, graph: LabeledGraph):
        super().__init__(parent)
        if not isinstance(parent, FreeGroup):
            raise Unsupported("Graph subgroups live in free groups",
                              details={'parent': parent.describe()})
        self.graph = graph

    def contains(self, g: Word) -> bool:
        return self.graph.trace(g) == 0

    def key(self) -> Tuple:
        return ("graph", self.graph.key())

    def generators(self) -> List[Word]:
        """Free basis (Schreier generators of the spanning tree)."""
        return self.graph.schreier_generators(self.parent)

    def rank(self) -> int:
        return self.graph.rank()


class CosetTable(FreeSubgroup):
    """
    Finite-index subgroup of a free group as a complete coset table.

    Cosets are numbered canonically from the base coset 0; ``rows()[c][p]``
    is the coset c·s for the letter at position p of ``parent.letters()``.
    """

    kind = "cosettable"

    def __init__(self, parent: FreeGroup, graph: LabeledGraph):
        super().__init__(parent, graph)
        if not graph.is_complete():
            raise IncompleteTable("Coset table has undefined entries")

    @classmethod
    def from_rows(cls, parent: FreeGroup, rows: Sequence[Sequence[int]]) -> "CosetTable":
        """Build from table rows in letter order; renumbers canonically."""
        return cls(parent, graph_from_table(parent.letters(), rows))

    @classmethod
    def from_permutations(cls, parent: FreeGroup, permutations: Dict[str, Sequence[int]]) -> "CosetTable":
        """
        Stabilizer of point 0 for a right action given per positive generator.

        Args:
            parent (FreeGroup): Free group
            permutations: label -> 0-based image list, x·s = perm[x]
        """
        rows: List[List[int]] = []
        size = len(next(iter(permutations.values())))
        inverses = {}
        for label, perm in permutations.items():
            if sorted(perm) != list(range(size)):
                raise ValidationError(f"Image list for '{label}' is not a permutation")
            inv = [0] * size
            for x, y in enumerate(perm):
                inv[y] = x
            inverses[label] = inv
        for x in range(size):
            row = []
            for index, sign in parent.letters():
                label = parent.generator_labels[index]
                if label not in permutations:
                    raise ValidationError(f"No permutation for generator '{label}'")
                row.append(permutations[label][x] if sign > 0 else inverses[label][x])
            rows.append(row)
        return cls.from_rows(parent, rows)

    @classmethod
    def kernel(cls, parent: FreeGroup, images: Dict[str, Hashable], target: FiniteGroup) -> "CosetTable":
        """
        Kernel of the homomorphism F -> target given by generator images.

        Cosets are the image elements; coset of w times s is phi(w)phi(s).
        """
        letter_images = hom_letter_images(parent, images, target)
        letters = parent.letters()
        order = {target.identity(): 0}
        queue = deque([target.identity()])
        while queue:
            x = queue.popleft()
            for letter in letters:
                y = target.table[x][letter_images[letter]]
                if y not in order:
                    order[y] = len(order)
                    queue.append(y)
        rows = [[0] * len(letters) for _ in order]
        for x, c in order.items():
            for p, letter in enumerate(letters):
                rows[c][p] = order[target.table[x][letter_images[letter]]]
        return cls.from_rows(parent, rows)

    def rows(self) -> List[List[int]]:
        return self.graph.table_rows()

    def index(self) -> int:
        return self.graph.size

    def describe(self) -> str:
        return f"coset table of index {self.index()} in {self.parent.describe()}"


class CoreGraph(FreeSubgroup):
    """Finitely generated subgroup of a free group as a folded core graph."""

    kind = "generators"

    def index(self) -> Optional[int]:
        # a finite core graph that is not complete has infinite index
        return None

    def describe(self) -> str:
        gens = [self.parent.format_word(w) for w in self.generators()]
        return f"<{', '.join(gens)}> (rank {self.rank()}) in {self.parent.describe()}"


def free_subgroup(parent: FreeGroup, graph: LabeledGraph) -> FreeSubgroup:
    """Wrap a canonical graph in the representation it determines."""
    return CosetTable(parent, graph) if graph.is_complete() else CoreGraph(parent, graph)


@dataclass(frozen=True)
class BallFingerprint:
    """Membership bits over ball(R) in canonical element order."""
    radius: int
    bits: Tuple[bool, ...]

    def to_text(self) -> str:
        """``R`` then the bits as MSB-first hex, padded to whole nibbles."""
        width = (len(self.bits) + 3) // 4
        value = 0
        for bit in self.bits:
            value = (value << 1) | int(bit)
        value <<= 4 * width - len(self.bits)
        return f"{self.radius} {value:0{width}x}" if width else f"{self.radius} "

    @classmethod
    def from_text(cls, text: str, length: int) -> "BallFingerprint":
        """Parse ``to_text`` output; length is |ball(R)|."""
        parts = text.split()
        try:
            radius = int(parts[0])
            value = int(parts[1], 16) if len(parts) > 1 else 0
        except (IndexError, ValueError):
            raise SerializationError(f"Malformed fingerprint '{text}'")
        width = (length + 3) // 4
        value >>= 4 * width - length
        bits = tuple(bool((value >> (length - 1 - k)) & 1) for k in range(length))
        return cls(radius, bits)

    def set_count(self) -> int:
        return sum(self.bits)


@dataclass(frozen=True)
class ChabautyDistance:
    """Dyadic distance with its agreement radius."""
    value: Fraction
    agreement_radius: int
    indistinguishable: bool


# --- construction helpers ---------------------------------------------------

def _element(group: MarkedGroup, g: Union[str, Hashable]) -> Hashable:
    return group.element(g) if isinstance(g, str) else group.check_element(g)


def _closure(group: FiniteGroup, generators: Iterable[int]) -> FrozenSet[int]:
    gens = [g for g in set(generators) if g != group.identity()]
    elements = {group.identity()}
    queue = deque([group.identity()])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = group.table[x][g]
            if y not in elements:
                elements.add(y)
                queue.append(y)
    return frozenset(elements)


def whole_group(group: MarkedGroup) -> Subgroup:
    """The parent itself as a subgroup."""
    if isinstance(group, FiniteGroup):
        return ElementSet(group, group.elements(), check=False)
    if isinstance(group, FreeGroup):
        return CosetTable.from_rows(group, [[0] * len(group.letters())])
    raise Unsupported(f"No subgroup representation for {group.describe()}")


def trivial_subgroup(group: MarkedGroup) -> Subgroup:
    """The trivial subgroup."""
    if isinstance(group, FiniteGroup):
        return ElementSet(group, [group.identity()], check=False)
    if isinstance(group, FreeGroup):
        return free_subgroup(group, fold_words(group, []))
    raise Unsupported(f"No subgroup representation for {group.describe()}")


def subgroup_generated(group: MarkedGroup, elements: Iterable[Union[str, Hashable]]) -> Subgroup:
    """
    Subgroup generated by elements.

    Finite groups close the set under multiplication; free groups fold the
    generators into a core graph (a coset table when the result is complete).
    """
    resolved = [_element(group, g) for g in elements]
    if isinstance(group, FiniteGroup):
        return ElementSet(group, _closure(group, resolved), check=False)
    if isinstance(group, FreeGroup):
        return free_subgroup(group, fold_words(group, resolved))
    raise Unsupported(f"No subgroup representation for {group.describe()}")


def integer_subgroup(n: int) -> Subgroup:
    """The subgroup nZ of the integers (n = 0 gives the trivial subgroup)."""
    z = integer_group()
    if n == 0:
        return trivial_subgroup(z)
    n = abs(n)
    rows = [[(c + 1) % n, (c - 1) % n] for c in range(n)]
    return CosetTable.from_rows(z, rows)


def finite_index_subgroup(group: FreeGroup, generators: Iterable[Union[str, Word]],
                          index_bound: int) -> CosetTable:
    """Coset table of <generators> by bounded coset enumeration."""
    words = [_element(group, g) for g in generators]
    return CosetTable(group, enumerate_cosets(group, [], words, index_bound))


# --- operations ------------------------------------------------------------

def membership(H: Subgroup, g: Union[str, Hashable]) -> bool:
    """
    Whether g lies in H.

    Args:
        H (Subgroup): Subgroup
        g: Element of H.parent or its word text

    Returns:
        bool: True iff g is in H
    """
    return H.contains(_element(H.parent, g))


def fingerprint(H: Subgroup, radius: int, cap: int = DEFAULT_BALL_CAP) -> BallFingerprint:
    """
    Membership bits over ball(radius) of the parent.

    Raises:
        BallTooLarge: If the ball exceeds cap
    """
    ball = H.parent.ball(radius, cap)
    return BallFingerprint(radius, tuple(H.contains(g) for g in ball))


def chabauty_distance(first: Subgroup, second: Subgroup, max_radius: int,
                      cap: int = DEFAULT_BALL_CAP) -> ChabautyDistance:
    """
    Dyadic Chabauty distance 2^-r, r the largest radius <= max_radius with
    equal fingerprints.

    Returns value 0 flagged indistinguishable when the fingerprints agree
    up to max_radius.
    """
    first.parent.require_same(second.parent, "subgroups")
    if max_radius < 1:
        raise ValidationError("max_radius must be at least 1", details={'max_radius': max_radius})
    group = first.parent
    first_difference = None
    for g in group.ball(max_radius, cap):
        if first.contains(g) != second.contains(g):
            length = group.word_length(g)
            if first_difference is None or length < first_difference:
                first_difference = length
    if first_difference is None:
        return ChabautyDistance(Fraction(0), max_radius, True)
    agreement = first_difference - 1
    return ChabautyDistance(Fraction(1, 2 ** agreement), agreement, False)


def conjugate(H: Subgroup, g: Union[str, Hashable]) -> Subgroup:
    """
    The conjugate g H g^-1 in the representation of H.

    Coset tables are re-rooted at the coset base·g^-1; core graphs refold
    the conjugated free basis.
    """
    group = H.parent
    g = _element(group, g)
    if isinstance(H, ElementSet):
        return ElementSet(group, (group.conjugate_element(g, h) for h in H.elements), check=False)
    if isinstance(H, CosetTable):
        return CosetTable(group, H.graph.rebased(H.graph.trace(group.inverse(g))))
    if isinstance(H, CoreGraph):
        conjugated = [group.conjugate_element(g, u) for u in H.generators()]
        return free_subgroup(group, fold_words(group, conjugated))
    raise Unsupported(f"Conjugation is not implemented for {type(H).__name__}")


def is_normal(H: Subgroup) -> bool:
    """Whether s H s^-1 = H for every positive generator s."""
    group = H.parent
    return all(conjugate(H, group.letter_element((i, 1))) == H for i in range(group.rank))


def normal_closure_of_set(group: MarkedGroup, elements: Iterable[Union[str, Hashable]],
                          index_bound: Optional[int] = None) -> Subgroup:
    """
    Smallest normal subgroup containing the given elements.

    Finite groups saturate: every new generator enqueues its conjugates by
    the generators until the generated subgroup stops growing. Free groups
    run a coset enumeration of F/<<T>> bounded by index_bound.

    Raises:
        ClosureExceedsBound: For free groups when the index passes the bound
        Unsupported: For free groups without an index bound
    """
    resolved = [_element(group, g) for g in elements]
    if isinstance(group, FiniteGroup):
        generators: List[int] = []
        current = frozenset([group.identity()])
        queue = deque(resolved)
        while queue:
            t = queue.popleft()
            if t in current:
                continue
            generators.append(t)
            current = _closure(group, generators)
            for letter in group.letters():
                queue.append(group.conjugate_element(group.letter_element(letter), t))
        logger.debug(f"Normal closure saturated with {len(generators)} generators, order {len(current)}")
        return ElementSet(group, current, check=False)
    if isinstance(group, FreeGroup):
        relators = [w for w in resolved if w]
        if not relators:
            return trivial_subgroup(group)
        if index_bound is None:
            raise Unsupported("Normal closures in free groups need an index bound")
        return CosetTable(group, enumerate_cosets(group, relators, [], index_bound))
    raise Unsupported(f"Normal closures are not implemented for {group.describe()}")


@dataclass(frozen=True)
class QuotientMap:
    """Projection G -> G/N for a normal subgroup N of a finite group."""
    source: FiniteGroup
    kernel: ElementSet
    target: FiniteGroup
    projection: Tuple[int, ...]

    def image(self, g: int) -> int:
        return self.projection[g]


def quotient_map(N: ElementSet) -> QuotientMap:
    """
    The quotient G/N as a finite marked group with the same labels.

    Cosets are represented by their least element index; a coset is named
    after its representative followed by "N".

    Raises:
        NotNormal: If N is not normal
    """
    if not isinstance(N, ElementSet):
        raise Unsupported("Quotients are only formed by subgroups of finite groups")
    if not is_normal(N):
        raise NotNormal("Quotient requested by a subgroup that is not normal",
                        details={'subgroup': N.describe()})
    group: FiniteGroup = N.parent
    rep = [min(group.table[g][n] for n in N.elements) for g in group.elements()]
    target = FiniteGroup.from_elements(
        [(label, rep[g]) for label, g in zip(group.generator_labels, group.generator_elements)],
        lambda x, y: rep[group.table[x][y]],
        rep[group.identity()],
        namer=lambda r: f"{group.element_name(r)}N",
        family="finite-quotient",
    )
    position = {r: i for i, r in enumerate(target.payload)}
    return QuotientMap(group, N, target, tuple(position[rep[g]] for g in group.elements()))


def project_subgroup(H: Subgroup, N: Subgroup) -> ElementSet:
    """
    Image of H in G/N.

    Raises:
        Unsupported: Unless H and N are subgroups of a finite group
    """
    if not isinstance(H, ElementSet):
        raise Unsupported(f"Projection to a quotient is not implemented for {type(H).__name__}",
                          details={'subgroup': H.describe()})
    H.parent.require_same(N.parent, "subgroup and kernel")
    q = quotient_map(N)
    return ElementSet(q.target, {q.image(h) for h in H.elements}, check=False)


def preimage(K: Subgroup, N: Subgroup) -> ElementSet:
    """Full preimage in G of a subgroup K of G/N."""
    if not isinstance(K, ElementSet):
        raise Unsupported(f"Preimages are not implemented for {type(K).__name__}",
                          details={'subgroup': K.describe()})
    q = quotient_map(N)
    q.target.require_same(K.parent, "quotient subgroup")
    return ElementSet(q.source, [g for g in q.source.elements() if q.image(g) in K.elements],
                      check=False)


def intersect_with(H: Subgroup, K: Subgroup, index_bound: int = DEFAULT_PRODUCT_BOUND) -> Subgroup:
    """
    H ∩ K; the fiber product of the graphs for free groups.

    Raises:
        IndexOverflow: If the fiber product passes index_bound
    """
    H.parent.require_same(K.parent, "subgroups")
    if isinstance(H, ElementSet) and isinstance(K, ElementSet):
        return ElementSet(H.parent, H.elements & K.elements, check=False)
    if isinstance(H, FreeSubgroup) and isinstance(K, FreeSubgroup):
        return free_subgroup(H.parent, product_graph(H.parent, H.graph, K.graph, index_bound))
    raise Unsupported("Intersection needs two subgroups of the same representation family")


def join(H: Subgroup, K: Subgroup) -> Subgroup:
    """Subgroup generated by H and K."""
    H.parent.require_same(K.parent, "subgroups")
    if isinstance(H, ElementSet) and isinstance(K, ElementSet):
        return ElementSet(H.parent, _closure(H.parent, H.elements | K.elements), check=False)
    if isinstance(H, FreeSubgroup) and isinstance(K, FreeSubgroup):
        return free_subgroup(H.parent, fold_words(H.parent, H.generators() + K.generators()))
    raise Unsupported("Join needs two subgroups of the same representation family")


def schreier_generators(H: Subgroup) -> List[Word]:
    """Free basis of a subgroup of a free group."""
    if not isinstance(H, FreeSubgroup):
        raise Unsupported("Schreier generators are defined for subgroups of free groups")
    return H.generators()


def subgroup_rank(H: Subgroup) -> int:
    """Rank E - V + 1 of the core graph."""
    if not isinstance(H, FreeSubgroup):
        raise Unsupported("Rank is computed for subgroups of free groups")
    return H.rank()


def is_subgroup_of(H: Subgroup, K: Subgroup) -> bool:
    """Whether H ⊆ K (generators of H lie in K for free groups)."""
    H.parent.require_same(K.parent, "subgroups")
    if isinstance(H, ElementSet):
        return H.elements <= K.elements
    if isinstance(H, FreeSubgroup):
        return all(K.contains(u) for u in H.generators())
    raise Unsupported(f"Containment is not implemented for {type(H).__name__}")


def enumerate_subgroups(group: MarkedGroup, max_order: int = MAX_ENUMERATION_ORDER) -> List[ElementSet]:
    """
    All subgroups of a finite group, sorted by (order, elements).

    Every subgroup is a join of cyclic subgroups, so joins of the current
    frontier with cyclic subgroups are iterated until nothing new appears.

    Raises:
        GroupTooLarge: If |G| > max_order
    """
    if not isinstance(group, FiniteGroup):
        raise Unsupported("Subgroups are enumerated in finite groups only")
    if group.order > max_order:
        raise GroupTooLarge(f"Subgroup enumeration is limited to order {max_order}",
                            details={'order': group.order})
    cyclic = {_closure(group, [g]) for g in group.elements()}
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        fresh = set()
        for A in frontier:
            for C in cyclic:
                if C <= A:
                    continue
                joined = _closure(group, A | C)
                if joined not in found:
                    fresh.add(joined)
        found |= fresh
        frontier = fresh
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    logger.debug(f"Enumerated {len(ordered)} subgroups of {group.describe()}")
    return [ElementSet(group, s, check=False) for s in ordered]


def find_normal_generator(group: MarkedGroup, N: ElementSet) -> Optional[int]:
    """Least element whose normal closure is N, or None."""
    if not isinstance(group, FiniteGroup):
        raise Unsupported("Normal generators are searched in finite groups only")
    for g in N.sorted_elements():
        if normal_closure_of_set(group, [g]) == N:
            return g
    return None


def amenable_flag(H: Subgroup) -> bool:
    """
    Rule-based amenability of a subgroup.

    Finite subgroups are amenable; subgroups of free groups are amenable iff
    their rank is at most 1 (Nielsen-Schreier: index n in F_k has rank
    n(k-1)+1).

    Raises:
        Undecided: When no rule covers the representation
    """
    if isinstance(H, ElementSet):
        return True
    if isinstance(H, CosetTable):
        k = H.parent.rank
        return H.index() * (k - 1) + 1 <= 1
    if isinstance(H, CoreGraph):
        return H.rank() <= 1
    raise Undecided(f"No amenability rule for {type(H).__name__}")


def amenable_radical(group: MarkedGroup) -> Subgroup:
    """
    Largest amenable normal subgroup.

    Raises:
        Unsupported: Outside finite and free groups
    """
    if isinstance(group, FiniteGroup):
        return whole_group(group)
    if isinstance(group, FreeGroup):
        return whole_group(group) if group.rank == 1 else trivial_subgroup(group)
    raise Unsupported(f"No amenable radical rule for {group.describe()}")


def minimal_normal_containing(group: FiniteGroup, subgroups: Iterable[ElementSet]) -> ElementSet:
    """
    Brute-force least normal subgroup containing every given subgroup.

    Scans enumerate_subgroups; normal subgroups are closed under
    intersection, so the least one exists and is unique.
    """
    needed = frozenset().union(*(H.elements for H in subgroups)) or frozenset([group.identity()])
    candidates = [N for N in enumerate_subgroups(group) if needed <= N.elements and is_normal(N)]
    return min(candidates, key=lambda N: (N.order, N.sorted_elements()))
