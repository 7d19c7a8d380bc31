#!/usr/bin/env python3
"""
Tree Groups Module

This module handles truncated automorphism groups of rooted d-ary trees of
depth D: level stabilizers, decompositions of sets into cosets of level
stabilizers, exact Haar ratios by coset counting and the finite-depth
Følner search with an independent certificate check.

An element is stored as the permutation it induces on the leaves. Leaf x
has base-d digits x_1..x_D with x_1 most significant, so the level-j vertex
above x is x // d^(D-j). Composition is right to left: (g·h)(x) = g(h(x)).
"""

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from sympy.combinatorics import Permutation, PermutationGroup

try:
    from .utils.exceptions import (
        DepthOutOfRange, EmptySet, GroupTooLarge, MalformedCertificate, NotACosetUnion,
        RepNotInSubgroup, SerializationError, ValidationError
    )
except ImportError:
    from utils.exceptions import (
        DepthOutOfRange, EmptySet, GroupTooLarge, MalformedCertificate, NotACosetUnion,
        RepNotInSubgroup, SerializationError, ValidationError
    )

logger = logging.getLogger(__name__)

MAX_ENUMERATED_ORDER = 2 ** 15
EXHAUSTIVE_COSET_LIMIT = 16
DEFAULT_MAX_SUBSET = 8

TreeElement = Tuple[int, ...]
LevelKey = Tuple[int, ...]
Portrait = Tuple[Tuple[Tuple[int, ...], ...], ...]


class RootedTreeGroup:
    """Full automorphism group of the d-ary rooted tree truncated at depth D."""

    def __init__(self, arity: int, depth: int):
        if arity < 2:
            raise ValidationError("Tree arity must be at least 2", details={'arity': arity})
        if depth < 1:
            raise DepthOutOfRange(f"Tree depth must be at least 1, got {depth}")
        self.arity = arity
        self.depth = depth
        self.leaves = arity ** depth
        self.vertex_count = sum(arity ** j for j in range(1, depth + 1))
        self.order = math.factorial(arity) ** ((arity ** depth - 1) // (arity - 1))

    def describe(self) -> str:
        return f"Aut(T_{self.arity}) truncated at depth {self.depth}"

    def __repr__(self) -> str:
        return f"RootedTreeGroup(arity={self.arity}, depth={self.depth})"

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedTreeGroup) and (self.arity, self.depth) == (other.arity, other.depth)

    def __hash__(self) -> int:
        return hash((self.arity, self.depth))

    def check_level(self, level: int):
        if not 0 <= level <= self.depth:
            raise DepthOutOfRange(f"Level {level} outside 0..{self.depth}",
                                  details={'level': level, 'depth': self.depth})

    # ------------------------------------------------------------------
    # arithmetic

    def identity(self) -> TreeElement:
        return tuple(range(self.leaves))

    def multiply(self, g: TreeElement, h: TreeElement) -> TreeElement:
        return tuple(g[x] for x in h)

    def inverse(self, g: TreeElement) -> TreeElement:
        inv = [0] * self.leaves
        for x, y in enumerate(g):
            inv[y] = x
        return tuple(inv)

    def product(self, elements: Iterable[TreeElement]) -> TreeElement:
        result = self.identity()
        for g in elements:
            result = self.multiply(result, g)
        return result

    def level_action(self, g: TreeElement, level: int) -> LevelKey:
        """Permutation induced on the d^level vertices of a level."""
        block = self.arity ** (self.depth - level)
        return tuple(g[v * block] // block for v in range(self.arity ** level))

    def level_identity(self, level: int) -> LevelKey:
        return tuple(range(self.arity ** level))

    def contains_element(self, g) -> bool:
        if not isinstance(g, tuple) or len(g) != self.leaves or sorted(g) != list(range(self.leaves)):
            return False
        # leaves under a common vertex must stay together
        for j in range(1, self.depth):
            block = self.arity ** (self.depth - j)
            action = self.level_action(g, j)
            if any(g[x] // block != action[x // block] for x in range(self.leaves)):
                return False
        return True

    # ------------------------------------------------------------------
    # portraits

    def portrait(self, g: TreeElement) -> Portrait:
        """Level-order local permutations: sigma_u(c) is the child digit of g(uc)."""
        d = self.arity
        levels = []
        for j in range(self.depth):
            below = self.level_action(g, j + 1)
            levels.append(tuple(
                tuple(below[u * d + c] % d for c in range(d)) for u in range(d ** j)
            ))
        return tuple(levels)

    def from_portrait(self, portrait: Sequence[Sequence[Sequence[int]]]) -> TreeElement:
        d = self.arity
        if len(portrait) != self.depth or any(len(level) != d ** j for j, level in enumerate(portrait)):
            raise ValidationError("Portrait shape does not match the tree")
        for level in portrait:
            for sigma in level:
                if sorted(sigma) != list(range(d)):
                    raise ValidationError(f"Local label {tuple(sigma)} is not a permutation")
        image = []
        for x in range(self.leaves):
            u = y = 0
            for j in range(self.depth):
                c = (x // d ** (self.depth - j - 1)) % d
                y = y * d + portrait[j][u][c]
                u = u * d + c
            image.append(y)
        return tuple(image)

    def sort_key(self, g: TreeElement) -> Portrait:
        return self.portrait(g)

    def element_name(self, g: TreeElement) -> str:
        """Portrait text: levels joined by " | ", vertex labels by ","."""
        return " | ".join(",".join("".join(str(c) for c in sigma) for sigma in level)
                          for level in self.portrait(g))

    def parse_element(self, text: str) -> TreeElement:
        if self.arity > 10:
            raise SerializationError("Portrait text needs single-digit child labels")
        try:
            levels = [
                [tuple(int(ch) for ch in chunk.strip()) for chunk in level.split(",")]
                for level in text.split("|")
            ]
        except ValueError:
            raise SerializationError(f"Cannot parse portrait '{text}'")
        return self.from_portrait(levels)

    # ------------------------------------------------------------------
    # generation

    def vertex_element(self, level: int, vertex: int, sigma: Sequence[int]) -> TreeElement:
        """Element acting by sigma at one vertex and trivially elsewhere."""
        d = self.arity
        identity = tuple(range(d))
        portrait = [[identity] * d ** j for j in range(self.depth)]
        portrait[level] = list(portrait[level])
        portrait[level][vertex] = tuple(sigma)
        return self.from_portrait(portrait)

    def _local_generators(self) -> List[Tuple[int, ...]]:
        d = self.arity
        swap = tuple([1, 0] + list(range(2, d)))
        cycle = tuple((c + 1) % d for c in range(d))
        return [swap] if swap == cycle else [swap, cycle]

    def vertex_generators(self, from_level: int = 0) -> List[TreeElement]:
        """Generators of the subgroup trivial on levels <= from_level."""
        gens = []
        for j in range(from_level, self.depth):
            for u in range(self.arity ** j):
                for sigma in self._local_generators():
                    gens.append(self.vertex_element(j, u, sigma))
        return gens

    def enumerate_from_level(self, from_level: int) -> Iterator[TreeElement]:
        """All elements whose portrait is trivial above from_level."""
        d = self.arity
        identity = tuple(range(d))
        free_vertices = sum(d ** j for j in range(from_level, self.depth))
        count = math.factorial(d) ** free_vertices
        if count > MAX_ENUMERATED_ORDER:
            raise GroupTooLarge(f"Enumeration of {count} elements exceeds {MAX_ENUMERATED_ORDER}")
        local = list(itertools.permutations(range(d)))
        for labels in itertools.product(local, repeat=free_vertices):
            portrait, pos = [], 0
            for j in range(self.depth):
                if j < from_level:
                    portrait.append([identity] * d ** j)
                else:
                    portrait.append(list(labels[pos:pos + d ** j]))
                    pos += d ** j
            yield self.from_portrait(portrait)

    def vertex_permutation(self, g: TreeElement) -> Permutation:
        """g as a permutation of all non-root vertices, for Schreier-Sims."""
        image = []
        offset = 0
        for j in range(1, self.depth + 1):
            image.extend(offset + y for y in self.level_action(g, j))
            offset += self.arity ** j
        return Permutation(image)

    def random_element(self, rng) -> TreeElement:
        d = self.arity
        local = list(itertools.permutations(range(d)))
        return self.from_portrait([[local[rng.randrange(len(local))] for _ in range(d ** j)]
                                   for j in range(self.depth)])


class TreeSubgroup:
    """
    Closed subgroup of a truncated tree group.

    Given by generators, by an explicit element set, or both. Elements are
    enumerated on demand when the order is at most MAX_ENUMERATED_ORDER;
    larger subgroups answer order and coset counts through Schreier-Sims.
    """

    def __init__(self, group: RootedTreeGroup, generators: Iterable[TreeElement] = (),
                 elements: Optional[Iterable[TreeElement]] = None, label: str = None):
        self.group = group
        self.generators = tuple(generators)
        for g in self.generators:
            if not group.contains_element(g):
                raise ValidationError("Generator is not a tree automorphism of the right depth")
        self._elements: Optional[FrozenSet[TreeElement]] = frozenset(elements) if elements is not None else None
        self._sorted: Optional[List[TreeElement]] = None
        self._order: Optional[int] = None
        self._coset_counts: Dict[int, int] = {}
        self.label = label
        self.normal: Optional[bool] = None
        # Set to L when this is exactly V_L of the whole group.
        self.stabilizer_level: Optional[int] = None

    def describe(self) -> str:
        return self.label or f"subgroup with {len(self.generators)} generators of {self.group.describe()}"

    def __repr__(self) -> str:
        return f"TreeSubgroup({self.describe()})"

    def _sympy_group(self, level: Optional[int] = None) -> PermutationGroup:
        if level is None:
            perms = [self.group.vertex_permutation(g) for g in self.generators]
        else:
            perms = [Permutation(list(self.group.level_action(g, level))) for g in self.generators]
        return PermutationGroup(perms) if perms else None

    def order(self) -> int:
        if self._order is None:
            if self._elements is not None:
                self._order = len(self._elements)
            elif not self.generators:
                self._order = 1
            else:
                self._order = int(self._sympy_group().order())
        return self._order

    @property
    def is_enumerable(self) -> bool:
        return self.order() <= MAX_ENUMERATED_ORDER

    def element_set(self) -> FrozenSet[TreeElement]:
        if self._elements is None:
            if not self.is_enumerable:
                raise GroupTooLarge(f"Subgroup of order {self.order()} is above the enumeration cap",
                                    details={'cap': MAX_ENUMERATED_ORDER})
            self._elements = frozenset(_closure(self.group, self.generators))
        return self._elements

    def elements(self) -> List[TreeElement]:
        """All elements in portrait-lexicographic order."""
        if self._sorted is None:
            self._sorted = sorted(self.element_set(), key=self.group.portrait)
        return self._sorted

    def contains(self, g: TreeElement) -> bool:
        if self._elements is not None or self.is_enumerable:
            return g in self.element_set()
        group = self._sympy_group()
        return group.contains(self.group.vertex_permutation(g))

    def __contains__(self, g: TreeElement) -> bool:
        return self.contains(g)

    def coset_count(self, level: int) -> int:
        """[C : C∩V_level], the number of level-action classes of C."""
        self.group.check_level(level)
        if level not in self._coset_counts:
            if level == 0 or (not self.generators and self._elements is None):
                count = 1
            elif self._elements is not None or self.is_enumerable:
                count = len(self.level_image(level))
            else:
                count = int(self._sympy_group(level).order())
            self._coset_counts[level] = count
        return self._coset_counts[level]

    def level_image(self, level: int) -> Set[LevelKey]:
        return {self.group.level_action(g, level) for g in self.element_set()}

    def level_order(self, level: int) -> int:
        """|C ∩ V_level|."""
        return self.order() // self.coset_count(level)

    def level_subgroup(self, level: int) -> "TreeSubgroup":
        """C ∩ V_level."""
        self.group.check_level(level)
        trivial = self.group.level_identity(level)
        members = [g for g in self.element_set() if self.group.level_action(g, level) == trivial]
        return TreeSubgroup(self.group, elements=members, label=f"{self.describe()} ∩ V_{level}")

    def same_as(self, other: "TreeSubgroup") -> bool:
        if self is other:
            return True
        if self.group != other.group or self.order() != other.order():
            return False
        return all(other.contains(g) for g in (self.generators or self.elements()))


def _closure(group: RootedTreeGroup, generators: Sequence[TreeElement]) -> Set[TreeElement]:
    seen = {group.identity()}
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for s in generators:
            y = group.multiply(x, s)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def whole_tree_group(group: RootedTreeGroup) -> TreeSubgroup:
    return level_stabilizer(group, 0)


def level_stabilizer(group: RootedTreeGroup, level: int) -> TreeSubgroup:
    """
    V_level: automorphisms trivial on all levels up to and including level.

    The returned subgroup carries ``stabilizer_level`` and ``normal``, the
    latter decided by conjugating the generators of V_level by the vertex
    generators of the whole group.

    Raises:
        DepthOutOfRange: If level is outside 0..D
    """
    group.check_level(level)
    generators = group.vertex_generators(level)
    free_vertices = sum(group.arity ** j for j in range(level, group.depth))
    order = math.factorial(group.arity) ** free_vertices
    elements = list(group.enumerate_from_level(level)) if order <= MAX_ENUMERATED_ORDER else None
    V = TreeSubgroup(group, generators, elements, label=f"V_{level}")
    V._order = order
    V.stabilizer_level = level
    trivial = group.level_identity(level)
    V.normal = all(
        group.level_action(group.product([s, v, group.inverse(s)]), level) == trivial
        for s in group.vertex_generators(0) for v in generators
    )
    return V


def subgroup_from_generators(group: RootedTreeGroup, generators: Iterable[TreeElement],
                             label: str = None) -> TreeSubgroup:
    return TreeSubgroup(group, generators, label=label)


def level_constant_subgroup(group: RootedTreeGroup) -> TreeSubgroup:
    """The diagonal subgroup: one local label shared by all vertices of each level."""
    d = group.arity
    identity = tuple(range(d))
    generators = []
    for j in range(group.depth):
        for sigma in group._local_generators():
            portrait = [[identity] * d ** k for k in range(group.depth)]
            portrait[j] = [sigma] * d ** j
            generators.append(group.from_portrait(portrait))
    return TreeSubgroup(group, generators, label="level-constant subgroup")


def odometer(group: RootedTreeGroup) -> TreeElement:
    """Adding machine: leaf digits read as a number with x_1 least significant, plus one."""
    d, D = group.arity, group.depth
    image = []
    for x in range(group.leaves):
        digits = [(x // d ** (D - 1 - k)) % d for k in range(D)]
        for k in range(D):
            digits[k] = (digits[k] + 1) % d
            if digits[k] != 0:
                break
        image.append(sum(c * d ** (D - 1 - k) for k, c in enumerate(digits)))
    return tuple(image)


def named_tree_subgroup(group: RootedTreeGroup, name: str) -> TreeSubgroup:
    """
    Subgroup by name: ``G``, ``V<i>`` (level stabilizer), ``diagonal``
    (level-constant subgroup) or ``odometer`` (the cyclic group of the adding
    machine).

    Raises:
        ValidationError: For unknown names
        DepthOutOfRange: For stabilizer levels outside 0..D
    """
    text = name.strip()
    if text == "G":
        return whole_tree_group(group)
    if text in ("diagonal", "D"):
        return level_constant_subgroup(group)
    if text == "odometer":
        return TreeSubgroup(group, [odometer(group)], label="odometer")
    if text.startswith("V") and text[1:].lstrip("_").isdigit():
        return level_stabilizer(group, int(text[1:].lstrip("_")))
    raise ValidationError(f"Unknown tree subgroup '{name}'; expected G, V<i>, diagonal or odometer")


@dataclass(frozen=True)
class CosetUnion:
    """
    Union of left cosets w(C∩V_level) inside an ambient subgroup C.

    A coset is identified by the permutation its elements induce on the
    level, so translation and set operations act on these keys.
    """
    ambient: TreeSubgroup = field(compare=False)
    level: int
    keys: FrozenSet[LevelKey]

    def __len__(self) -> int:
        return len(self.keys)

    def is_empty(self) -> bool:
        return not self.keys

    def representatives(self) -> List[TreeElement]:
        """Least-portrait element of every coset, in portrait order."""
        best: Dict[LevelKey, TreeElement] = {}
        for g in self.ambient.elements():
            key = self.ambient.group.level_action(g, self.level)
            if key in self.keys and key not in best:
                best[key] = g
        return sorted(best.values(), key=self.ambient.group.portrait)

    def elements(self) -> Set[TreeElement]:
        group = self.ambient.group
        return {g for g in self.ambient.element_set() if group.level_action(g, self.level) in self.keys}

    def translate(self, g: TreeElement) -> "CosetUnion":
        """g·O for g in the ambient subgroup."""
        action = self.ambient.group.level_action(g, self.level)
        return CosetUnion(self.ambient, self.level, frozenset(tuple(action[v] for v in k) for k in self.keys))

    def refine(self, level: int) -> "CosetUnion":
        """The same set written at a deeper level."""
        group = self.ambient.group
        group.check_level(level)
        if level < self.level:
            raise ValidationError("Coset unions refine only to deeper levels")
        block = group.arity ** (level - self.level)
        keys = frozenset(
            key for key in self.ambient.level_image(level)
            if tuple(key[v * block] // block for v in range(group.arity ** self.level)) in self.keys
        )
        return CosetUnion(self.ambient, level, keys)

    def symmetric_difference(self, other: "CosetUnion") -> "CosetUnion":
        level = max(self.level, other.level)
        first, second = self.refine(level), other.refine(level)
        return CosetUnion(self.ambient, level, first.keys ^ second.keys)


def coset_union(ambient: TreeSubgroup, level: int, representatives: Iterable[TreeElement]) -> CosetUnion:
    """Union of the cosets of the given representatives."""
    ambient.group.check_level(level)
    keys = set()
    for w in representatives:
        if not ambient.contains(w):
            raise RepNotInSubgroup("Coset representative is not in the ambient subgroup",
                                   details={'element': ambient.group.element_name(w)})
        keys.add(ambient.group.level_action(w, level))
    return CosetUnion(ambient, level, frozenset(keys))


def coset_decomposition(X: Iterable[TreeElement], level: int,
                        ambient: Optional[TreeSubgroup] = None,
                        group: Optional[RootedTreeGroup] = None) -> Tuple[CosetUnion, List[TreeElement]]:
    """
    Write X as a disjoint union of cosets w(C∩V_level).

    Args:
        X: Elements of the ambient subgroup
        level: Level i
        ambient: Subgroup C (default: the whole tree group)
        group: Tree group, needed only when ambient is omitted

    Returns:
        (CosetUnion, representatives): one least-portrait representative
        per coset, in portrait order

    Raises:
        NotACosetUnion: With a witness whose coset is only partly in X
    """
    if ambient is None:
        if group is None:
            raise ValidationError("coset_decomposition needs an ambient subgroup or a group")
        ambient = whole_tree_group(group)
    tree = ambient.group
    tree.check_level(level)
    classes: Dict[LevelKey, List[TreeElement]] = {}
    for g in X:
        if not ambient.contains(g):
            raise RepNotInSubgroup("Element is not in the ambient subgroup",
                                   details={'element': tree.element_name(g)})
        classes.setdefault(tree.level_action(g, level), []).append(g)
    size = ambient.level_order(level)
    representatives = []
    for key in sorted(classes, key=lambda k: min(tree.portrait(g) for g in classes[k])):
        members = sorted(set(classes[key]), key=tree.portrait)
        if len(members) != size:
            raise NotACosetUnion(
                f"Coset at level {level} is covered by {len(members)} of {size} elements",
                witness=tree.element_name(members[0])
            )
        representatives.append(members[0])
    representatives.sort(key=tree.portrait)
    return CosetUnion(ambient, level, frozenset(classes)), representatives


def subgroup_as_coset_union(K: TreeSubgroup, ambient: Optional[TreeSubgroup] = None) -> CosetUnion:
    """
    An open subgroup K of C as a coset union of C.

    Level stabilizers are a single coset at their own level; any other
    subgroup is decomposed at depth D, which needs K enumerable.
    """
    tree = K.group
    whole = ambient is None
    ambient = whole_tree_group(tree) if whole else ambient
    level = K.stabilizer_level
    if whole and level is not None:
        return CosetUnion(ambient, level, frozenset([tree.level_identity(level)]))
    union, _ = coset_decomposition(K.elements(), tree.depth, ambient)
    return union


def haar_ratio(O: CosetUnion, L: CosetUnion) -> Fraction:
    """
    mu(O)/mu(L) as |W|/|K| after refining both to a common level.

    The refinement count is [C∩V_i : C∩V_m] = coset_count(m)/coset_count(i),
    so no element enumeration is needed.

    Raises:
        EmptySet: If either union is empty
        ValidationError: If the ambient subgroups differ
    """
    if O.is_empty() or L.is_empty():
        raise EmptySet("Haar ratios need nonempty coset unions")
    if not O.ambient.same_as(L.ambient):
        raise ValidationError("Coset unions live in different ambient subgroups")
    C = O.ambient
    level = max(O.level, L.level)
    top = C.coset_count(level)
    first = len(O.keys) * top // C.coset_count(O.level)
    second = len(L.keys) * top // C.coset_count(L.level)
    return Fraction(first, second)


def dense_selector(C: TreeSubgroup) -> List[TreeElement]:
    """Every element of C in portrait order; stable across calls."""
    return list(C.elements())


@dataclass
class FolnerCertificate:
    """U = union of h(C∩V_level) over h in H, with its worst boundary ratio."""
    level: int
    H: List[TreeElement]
    worst_ratio: Fraction
    n: int
    test_level: int

    def to_dict(self, group: RootedTreeGroup) -> Dict:
        return {
            'found': True,
            'level': self.level,
            'H': [group.element_name(h) for h in self.H],
            'worst_ratio': f"{self.worst_ratio.numerator}/{self.worst_ratio.denominator}",
            'n': self.n,
            'test_level': self.test_level,
        }


@dataclass
class FolnerExhaustion:
    """No certificate at this truncation depth; not a non-amenability claim."""
    levels_searched: List[int]
    candidates_tried: int
    best_ratio: Optional[Fraction]
    best_level: Optional[int]
    best_H: List[TreeElement]
    n: int
    message: str = "no Følner set at this truncation depth; deeper truncations may still have one"

    def to_dict(self, group: RootedTreeGroup) -> Dict:
        return {
            'found': False,
            'levels_searched': self.levels_searched,
            'candidates_tried': self.candidates_tried,
            'best_ratio': (f"{self.best_ratio.numerator}/{self.best_ratio.denominator}"
                           if self.best_ratio is not None else None),
            'best_level': self.best_level,
            'best_H': [group.element_name(h) for h in self.best_H],
            'n': self.n,
            'message': self.message,
        }


def folner_test_set(C: TreeSubgroup, Q_reps: Sequence[TreeElement], test_level: int) -> List[TreeElement]:
    """Q = union of f(C∩V_test_level) over the given representatives."""
    tree = C.group
    for f in Q_reps:
        if not C.contains(f):
            raise RepNotInSubgroup("Test representative is not in C",
                                   details={'element': tree.element_name(f)})
    inner = C.level_subgroup(test_level).elements() if test_level < tree.depth else [tree.identity()]
    return sorted({tree.multiply(f, v) for f in Q_reps for v in inner}, key=tree.portrait)


def _worst_ratio(U: CosetUnion, Q: Sequence[TreeElement]) -> Fraction:
    worst = Fraction(0)
    size = len(U.keys)
    for g in Q:
        moved = U.translate(g).keys
        ratio = Fraction(len(moved ^ U.keys), size)
        if ratio > worst:
            worst = ratio
    return worst


def _candidate_key_sets(keys: List[LevelKey], max_subset: int, Q: Sequence[TreeElement],
                        make_union) -> Iterator[Tuple[LevelKey, ...]]:
    """Exhaustive subsets for few cosets, else prefixes and a greedy growth."""
    total = len(keys)
    if total <= EXHAUSTIVE_COSET_LIMIT:
        for size in range(1, min(total, max_subset) + 1):
            yield from itertools.combinations(keys, size)
        if total > max_subset:
            yield tuple(keys)
        return
    for size in range(1, min(total, max_subset) + 1):
        yield tuple(keys[:size])
    chosen = [keys[0]]
    remaining = keys[1:]
    while remaining:
        best_index = min(range(len(remaining)),
                         key=lambda k: (_worst_ratio(make_union(chosen + [remaining[k]]), Q), k))
        chosen.append(remaining.pop(best_index))
        yield tuple(chosen)


def folner_search(C: TreeSubgroup, Q_reps: Sequence[TreeElement], n: int,
                  test_level: Optional[int] = None, allow_whole: bool = True,
                  max_subset: int = DEFAULT_MAX_SUBSET):
    """
    Search for U = union of h(C∩V_i) with mu(gU Δ U)/mu(U) <= 1/n for g in Q.

    Levels are tried from 0 to D; within a level, candidate sets of cosets
    grow in size in selector order. The first hit is returned.

    Args:
        C (TreeSubgroup): Enumerable subgroup
        Q_reps: Representatives of the test set
        n (int): Required quality
        test_level (int): Q = union of f(C∩V_test_level) (default D)
        allow_whole (bool): Whether U = C is acceptable
        max_subset (int): Largest number of cosets per exhaustive candidate

    Returns:
        FolnerCertificate or FolnerExhaustion

    Raises:
        RepNotInSubgroup: If a test representative is not in C
    """
    if n < 1:
        raise ValidationError("n must be at least 1", details={'n': n})
    tree = C.group
    test_level = tree.depth if test_level is None else test_level
    tree.check_level(test_level)
    Q = folner_test_set(C, Q_reps, test_level)
    bound = Fraction(1, n)
    tried = 0
    best: Tuple[Optional[Fraction], Optional[int], Tuple] = (None, None, ())
    for level in range(tree.depth + 1):
        # cosets in selector order of their least elements
        first_seen: Dict[LevelKey, TreeElement] = {}
        for g in C.elements():
            first_seen.setdefault(tree.level_action(g, level), g)
        keys = list(first_seen)
        whole = len(keys)

        def make_union(chosen):
            return CosetUnion(C, level, frozenset(chosen))

        for chosen in _candidate_key_sets(keys, max_subset, Q, make_union):
            if not allow_whole and len(chosen) == whole:
                continue
            tried += 1
            ratio = _worst_ratio(make_union(chosen), Q)
            if best[0] is None or ratio < best[0]:
                best = (ratio, level, chosen)
            if ratio <= bound:
                H = sorted((first_seen[k] for k in chosen), key=tree.portrait)
                logger.debug(f"Følner certificate at level {level} with {len(H)} cosets after {tried} candidates")
                return FolnerCertificate(level, H, ratio, n, test_level)
    logger.info(f"Følner search exhausted {tried} candidates without a certificate")
    best_ratio, best_level, best_keys = best
    best_H = []
    if best_level is not None:
        reps = {tree.level_action(g, best_level): g for g in reversed(C.elements())}
        best_H = sorted((reps[k] for k in best_keys), key=tree.portrait)
    return FolnerExhaustion(list(range(tree.depth + 1)), tried, best_ratio, best_level, best_H, n)


def folner_certificate_check(certificate: FolnerCertificate, C: TreeSubgroup,
                             Q_reps: Sequence[TreeElement], n: int) -> bool:
    """
    Recompute every boundary ratio of a certificate from element sets.

    Raises:
        MalformedCertificate: If the level is out of range, H is empty, an
            element of H is not in C or two elements of H share a coset
    """
    tree = C.group
    if not isinstance(certificate, FolnerCertificate) or not 0 <= certificate.level <= tree.depth:
        raise MalformedCertificate("Certificate level is out of range")
    if not certificate.H:
        raise MalformedCertificate("Certificate has an empty H")
    level = certificate.level
    seen = set()
    for h in certificate.H:
        if not tree.contains_element(h) or not C.contains(h):
            raise MalformedCertificate("Certificate element is not in C")
        key = tree.level_action(h, level)
        if key in seen:
            raise MalformedCertificate("Two elements of H lie in the same coset")
        seen.add(key)
    inner = C.level_subgroup(level).elements()
    U_elements = {tree.multiply(h, v) for h in certificate.H for v in inner}
    U, _ = coset_decomposition(U_elements, level, C)
    bound = Fraction(1, n)
    for g in folner_test_set(C, Q_reps, certificate.test_level):
        moved = {tree.multiply(g, u) for u in U_elements}
        difference = moved ^ U_elements
        if not difference:
            continue
        D_union, _ = coset_decomposition(difference, level, C)
        if haar_ratio(D_union, U) > bound:
            return False
    return True


def brute_force_folner(C: TreeSubgroup, Q_reps: Sequence[TreeElement], n: int,
                       max_cosets: int = DEFAULT_MAX_SUBSET, test_level: Optional[int] = None,
                       allow_whole: bool = True) -> Optional[Tuple[int, int, Fraction]]:
    """
    Smallest (level, |H|) over all unions of at most max_cosets cosets.

    Ratios are element counts |gU Δ U|/|U|. Returns (level, size, best
    ratio at that size) or None.
    """
    tree = C.group
    test_level = tree.depth if test_level is None else test_level
    Q = folner_test_set(C, Q_reps, test_level)
    bound = Fraction(1, n)
    for level in range(tree.depth + 1):
        cosets: Dict[LevelKey, Set[TreeElement]] = {}
        for g in C.elements():
            cosets.setdefault(tree.level_action(g, level), set()).add(g)
        blocks = list(cosets.values())
        for size in range(1, min(len(blocks), max_cosets) + 1):
            if not allow_whole and size == len(blocks):
                continue
            best = None
            for chosen in itertools.combinations(blocks, size):
                U = set().union(*chosen)
                ratio = max((Fraction(len({tree.multiply(g, u) for u in U} ^ U), len(U)) for g in Q),
                            default=Fraction(0))
                if best is None or ratio < best:
                    best = ratio
            if best is not None and best <= bound:
                return level, size, best
    return None
