#!/usr/bin/env python3
"""
IRS Module

This module handles finitely supported invariant random subgroups with
exact rational weights: stabilizer pushforwards of finite measure
preserving actions, conjugation-invariance certificates, inclusion
probabilities, normal closures, spanning, ergodic decomposition and the
amenable-radical consistency report.

An IRS with finite support is ergodic exactly when its support is a single
conjugation orbit; ergodic components are the orbits.
"""

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

try:
    from .folded_graphs import canonical_graph
    from .group_core import INVERSE_SUFFIXES, FiniteGroup, FreeGroup, MarkedGroup
    from .group_fixtures import elementary_abelian_group, lamp_element, lamplighter_group
    from .subgroup_space import (
        CosetTable, ElementSet, Subgroup, amenable_flag, amenable_radical, conjugate,
        is_subgroup_of, join, minimal_normal_containing, normal_closure_of_set,
        subgroup_generated, trivial_subgroup, whole_group
    )
    from .utils.exceptions import (
        ClosureExceedsBound, NotAHomomorphism, NotInvariant, NotInvariantMeasure,
        Unsupported, ValidationError
    )
except ImportError:
    from folded_graphs import canonical_graph
    from group_core import INVERSE_SUFFIXES, FiniteGroup, FreeGroup, MarkedGroup
    from group_fixtures import elementary_abelian_group, lamp_element, lamplighter_group
    from subgroup_space import (
        CosetTable, ElementSet, Subgroup, amenable_flag, amenable_radical, conjugate,
        is_subgroup_of, join, minimal_normal_containing, normal_closure_of_set,
        subgroup_generated, trivial_subgroup, whole_group
    )
    from utils.exceptions import (
        ClosureExceedsBound, NotAHomomorphism, NotInvariant, NotInvariantMeasure,
        Unsupported, ValidationError
    )

logger = logging.getLogger(__name__)

# Normal closures of finite groups up to this order are cross-checked
# against the brute-force minimal normal subgroup.
ORACLE_CROSS_CHECK_ORDER = 60


def as_fraction(value: Union[Fraction, int, str]) -> Fraction:
    """Exact weight from a Fraction, an int or a "p/q" string."""
    if isinstance(value, float):
        raise ValidationError("Weights must be exact rationals, not floats", details={'value': value})
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"Cannot read weight '{value}'")


class IRSDistribution:
    """
    Finitely supported probability distribution on subgroups.

    Atoms keep their given order, which is the serialization order.
    """

    def __init__(self, parent: MarkedGroup, atoms: Iterable[Tuple[Subgroup, Union[Fraction, int, str]]]):
        """
        Initialize an IRS distribution.

        Args:
            parent (MarkedGroup): Ambient group
            atoms: (subgroup, weight) pairs

        Raises:
            ValidationError: On nonpositive weights, weights not summing to 1,
                repeated atoms or atoms of another group
        """
        self.parent = parent
        pairs = [(H, as_fraction(w)) for H, w in atoms]
        if not pairs:
            raise ValidationError("An IRS needs at least one atom")
        seen = set()
        for H, w in pairs:
            parent.require_same(H.parent, "atom and IRS")
            if w <= 0:
                raise ValidationError("Atom weights must be positive", details={'weight': str(w)})
            if H in seen:
                raise ValidationError("Atoms must be pairwise distinct", details={'atom': H.describe()})
            seen.add(H)
        total = sum(w for _, w in pairs)
        if total != 1:
            raise ValidationError("Atom weights must sum to 1", details={'sum': str(total)})
        self.atoms: Tuple[Tuple[Subgroup, Fraction], ...] = tuple(pairs)

    @classmethod
    def aggregate(cls, parent: MarkedGroup, atoms: Iterable[Tuple[Subgroup, Fraction]]) -> "IRSDistribution":
        """Merge repeated atoms by adding weights, dropping zero weights."""
        merged: Dict[Subgroup, Fraction] = {}
        for H, w in atoms:
            merged[H] = merged.get(H, Fraction(0)) + as_fraction(w)
        return cls(parent, [(H, w) for H, w in merged.items() if w != 0])

    @classmethod
    def dirac(cls, H: Subgroup) -> "IRSDistribution":
        return cls(H.parent, [(H, Fraction(1))])

    def support(self) -> List[Subgroup]:
        return [H for H, _ in self.atoms]

    def weight_of(self, H: Subgroup) -> Fraction:
        for K, w in self.atoms:
            if K == H:
                return w
        return Fraction(0)

    def as_dict(self) -> Dict[Subgroup, Fraction]:
        return dict(self.atoms)

    def __eq__(self, other) -> bool:
        return (isinstance(other, IRSDistribution) and self.parent.same_group(other.parent)
                and self.as_dict() == other.as_dict())

    def __hash__(self) -> int:
        return hash((self.parent.signature, frozenset(self.atoms)))

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"IRSDistribution({len(self.atoms)} atoms over {self.parent.describe()})"


class FinitePMPAction:
    """
    Measure preserving left action of a marked group on points 0..n-1.

    Generator actions are permutations given per positive label; inverse
    labels ("a^-1") may be listed and must then be the inverse permutation.
    """

    def __init__(self, parent: MarkedGroup, action: Dict[str, Sequence[int]],
                 measure: Optional[Sequence[Union[Fraction, int, str]]] = None):
        """
        Initialize a finite p.m.p. action.

        Args:
            parent (MarkedGroup): Acting group
            action: label -> image list, s·x = action[label][x]
            measure: Point weights (uniform when omitted)

        Raises:
            NotAHomomorphism: If the permutations are inconsistent with the group
            NotInvariantMeasure: If the measure is not preserved
            ValidationError: On malformed permutations or weights
        """
        self.parent = parent
        self.permutations: Dict[int, Tuple[int, ...]] = {}
        size = None
        for label in parent.generator_labels:
            if label not in action:
                raise NotAHomomorphism(f"No permutation given for generator '{label}'")
            perm = tuple(action[label])
            if size is None:
                size = len(perm)
            if len(perm) != size or sorted(perm) != list(range(size)):
                raise ValidationError(f"Action of '{label}' is not a permutation of {size} points")
            self.permutations[parent.generator_labels.index(label)] = perm
        self.size = size
        self.inverse_permutations: Dict[int, Tuple[int, ...]] = {}
        for i, perm in self.permutations.items():
            inv = [0] * size
            for x, y in enumerate(perm):
                inv[y] = x
            self.inverse_permutations[i] = tuple(inv)
        labels = set(parent.generator_labels)
        for key, perm in action.items():
            if key in labels:
                continue
            base = next((key[:-len(s)] for s in INVERSE_SUFFIXES if key.endswith(s)), None)
            if base not in labels:
                raise NotAHomomorphism(f"Action given for unknown generator '{key}'")
            if tuple(perm) != self.inverse_permutations[parent.generator_labels.index(base)]:
                raise NotAHomomorphism(f"Action of '{key}' is not the inverse of the action of '{base}'")

        if measure is None:
            self.measure = tuple(Fraction(1, size) for _ in range(size))
        else:
            self.measure = tuple(as_fraction(w) for w in measure)
        if len(self.measure) != size:
            raise ValidationError("Measure must give one weight per point")
        if any(w < 0 for w in self.measure) or sum(self.measure) != 1:
            raise ValidationError("Point weights must be nonnegative and sum to 1")
        for i, perm in self.permutations.items():
            for x in range(size):
                if self.measure[perm[x]] != self.measure[x]:
                    raise NotInvariantMeasure(
                        "Measure is not invariant under the action",
                        details={'generator': parent.generator_labels[i], 'point': x}
                    )
        self._element_perms: Optional[Dict[int, Tuple[int, ...]]] = None
        if isinstance(parent, FiniteGroup):
            self._element_perms = self._tabulate_finite_action(parent)

    def _tabulate_finite_action(self, group: FiniteGroup) -> Dict[int, Tuple[int, ...]]:
        """Permutation of every element; checks the action factors through G."""
        letter_perm = {}
        for i, perm in self.permutations.items():
            letter_perm[(i, 1)] = perm
            letter_perm[(i, -1)] = self.inverse_permutations[i]
        perms = {group.identity(): tuple(range(self.size))}
        queue = deque([group.identity()])
        while queue:
            g = queue.popleft()
            for letter in group.letters():
                h = group.table[g][group.letter_element(letter)]
                s = letter_perm[letter]
                # (g s)·x = g·(s·x)
                candidate = tuple(perms[g][s[x]] for x in range(self.size))
                if h in perms:
                    if perms[h] != candidate:
                        raise NotAHomomorphism(
                            "Generator permutations violate a relation of the group",
                            details={'element': group.element_name(h)}
                        )
                else:
                    perms[h] = candidate
                    queue.append(h)
        return perms

    def act(self, g: Hashable, x: int) -> int:
        """Image g·x."""
        if self._element_perms is not None:
            return self._element_perms[self.parent.check_element(g)][x]
        for index, sign in reversed(self.parent.word_of(self.parent.check_element(g))):
            x = (self.permutations[index] if sign > 0 else self.inverse_permutations[index])[x]
        return x

    def orbits(self) -> List[List[int]]:
        """Orbits of the generators, each sorted, ordered by least point."""
        seen = set()
        result = []
        for x in range(self.size):
            if x in seen:
                continue
            orbit = {x}
            queue = deque([x])
            while queue:
                y = queue.popleft()
                for perm in list(self.permutations.values()) + list(self.inverse_permutations.values()):
                    z = perm[y]
                    if z not in orbit:
                        orbit.add(z)
                        queue.append(z)
            seen |= orbit
            result.append(sorted(orbit))
        return result

    def stabilizer(self, x: int) -> Subgroup:
        """
        Stabilizer of the point x.

        Over a free group the stabilizer is read as a coset table of the
        orbit of x: the coset Hw corresponds to the point w^-1·x, so the
        coset Hw·s is s^-1 applied to that point.
        """
        group = self.parent
        if isinstance(group, FiniteGroup):
            return ElementSet(group, [g for g, perm in self._element_perms.items() if perm[x] == x],
                              check=False)
        if isinstance(group, FreeGroup):
            adjacency = []
            for y in range(self.size):
                row = {}
                for i in self.permutations:
                    row[(i, 1)] = self.inverse_permutations[i][y]
                    row[(i, -1)] = self.permutations[i][y]
                adjacency.append(row)
            return CosetTable(group, canonical_graph(group.letters(), adjacency, x))
        raise Unsupported(f"Stabilizers are not implemented for {group.describe()}")


@dataclass
class InvarianceCertificate:
    """Outcome of the conjugation-invariance check."""
    invariant: bool
    generators_checked: List[str] = field(default_factory=list)
    witness_generator: Optional[str] = None
    witness_atom: Optional[Subgroup] = None

    def witness(self) -> Optional[Tuple[str, Subgroup]]:
        if self.invariant:
            return None
        return self.witness_generator, self.witness_atom


@dataclass
class ErgodicComponent:
    """One conjugation orbit of atoms with its total weight."""
    weight: Fraction
    irs: IRSDistribution


@dataclass
class RadicalReport:
    """Amenable-radical consistency report for one IRS."""
    is_amenable_irs: bool
    radical: Subgroup
    contained_in_radical: bool
    theorem_consistent: bool
    atom_flags: List[bool] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'is_amenable_irs': self.is_amenable_irs,
            'radical': self.radical.describe(),
            'contained_in_radical': self.contained_in_radical,
            'theorem_consistent': self.theorem_consistent,
            'atom_flags': list(self.atom_flags),
        }


def stabilizer_pushforward(action: FinitePMPAction) -> IRSDistribution:
    """
    Push the point measure forward along x -> Stab(x).

    Atoms appear in order of their least point; weights are the measures of
    their fibers.
    """
    atoms: Dict[Subgroup, Fraction] = {}
    for x in range(action.size):
        w = action.measure[x]
        if w == 0:
            continue
        H = action.stabilizer(x)
        atoms[H] = atoms.get(H, Fraction(0)) + w
    return IRSDistribution(action.parent, list(atoms.items()))


def check_conjugation_invariance(mu: IRSDistribution) -> InvarianceCertificate:
    """
    Check that conjugation by every generator permutes the atoms preserving
    weights.

    Returns:
        InvarianceCertificate: invariant=True, or the first (generator, atom)
        whose conjugate has a different weight
    """
    group = mu.parent
    weights = mu.as_dict()
    checked = []
    for i, label in enumerate(group.generator_labels):
        s = group.letter_element((i, 1))
        for H, w in mu.atoms:
            if weights.get(conjugate(H, s), Fraction(0)) != w:
                logger.debug(f"Invariance fails at generator {label} on {H.describe()}")
                return InvarianceCertificate(False, checked + [label], label, H)
        checked.append(label)
    return InvarianceCertificate(True, checked)


def require_invariant(mu: IRSDistribution):
    """Raise NotInvariant with the witness unless mu is invariant."""
    certificate = check_conjugation_invariance(mu)
    if not certificate.invariant:
        raise NotInvariant(
            "IRS is not invariant under conjugation",
            witness=(certificate.witness_generator, certificate.witness_atom.describe())
        )


def inclusion_probability(mu: IRSDistribution, h: Union[str, Hashable]) -> Fraction:
    """Total weight of the atoms containing h."""
    group = mu.parent
    h = group.element(h) if isinstance(h, str) else group.check_element(h)
    return sum((w for H, w in mu.atoms if H.contains(h)), Fraction(0))


def irs_normal_closure(mu: IRSDistribution, index_bound: Optional[int] = None) -> Subgroup:
    """
    Normal closure of an invariant IRS.

    Computed as the subgroup generated by the elements of positive inclusion
    probability, i.e. by the union of the atoms. On finite groups of order
    at most 60 it is cross-checked against the least normal subgroup
    containing every atom.

    Raises:
        NotInvariant: If mu is not conjugation invariant
        ClosureExceedsBound: Free parent and the closure has infinite index or
            index above index_bound
    """
    require_invariant(mu)
    group = mu.parent
    if isinstance(group, FiniteGroup):
        positive = set()
        for H, _ in mu.atoms:
            positive |= H.elements
        closure = subgroup_generated(group, sorted(positive))
        if group.order <= ORACLE_CROSS_CHECK_ORDER:
            oracle = minimal_normal_containing(group, mu.support())
            if oracle != closure:
                raise ValidationError("Generated subgroup differs from the minimal normal subgroup",
                                      details={'generated': closure.describe(), 'minimal': oracle.describe()})
        return closure
    if isinstance(group, FreeGroup):
        closure = trivial_subgroup(group)
        for H, _ in mu.atoms:
            closure = join(closure, H)
        if closure == trivial_subgroup(group):
            return closure
        if closure.index() is None:
            raise ClosureExceedsBound("Normal closure has infinite index")
        if index_bound is not None:
            if closure.index() > index_bound:
                raise ClosureExceedsBound(f"Index {closure.index()} exceeds the bound {index_bound}")
            words = [u for H, _ in mu.atoms for u in H.generators()]
            if normal_closure_of_set(group, words, index_bound) != closure:
                raise ValidationError("Join of the atoms is not their normal closure")
        return closure
    raise Unsupported(f"Normal closures are not implemented for {group.describe()}")


def is_spanning(mu: IRSDistribution, index_bound: Optional[int] = None) -> bool:
    """Whether the normal closure of mu is the whole group."""
    return irs_normal_closure(mu, index_bound) == whole_group(mu.parent)


def ergodic_components(mu: IRSDistribution) -> List[ErgodicComponent]:
    """
    Split an invariant IRS into its conjugation orbits.

    Raises:
        NotInvariant: If mu is not conjugation invariant
    """
    require_invariant(mu)
    group = mu.parent
    generators = [group.letter_element((i, 1)) for i in range(group.rank)]
    weights = mu.as_dict()
    assigned = set()
    components = []
    for H, _ in mu.atoms:
        if H in assigned:
            continue
        orbit = [H]
        assigned.add(H)
        queue = deque([H])
        while queue:
            K = queue.popleft()
            for s in generators:
                C = conjugate(K, s)
                if C not in assigned:
                    assigned.add(C)
                    orbit.append(C)
                    queue.append(C)
        total = sum(weights[K] for K in orbit)
        components.append(ErgodicComponent(total, IRSDistribution(group, [(K, weights[K] / total) for K in orbit])))
    return components


def amenable_irs_radical_check(mu: IRSDistribution) -> RadicalReport:
    """
    Compare an IRS with the amenable radical.

    Any amenable IRS lies in the amenable radical, so theorem_consistent is
    expected to be True on every supported input.

    Raises:
        NotInvariant: If mu is not conjugation invariant
        Undecided: When an atom has no amenability rule
    """
    require_invariant(mu)
    flags = [amenable_flag(H) for H, _ in mu.atoms]
    radical = amenable_radical(mu.parent)
    contained = all(is_subgroup_of(H, radical) for H, _ in mu.atoms)
    amenable = all(flags)
    return RadicalReport(amenable, radical, contained, (not amenable) or contained, flags)


def as_irs_of_normal_closure(mu: IRSDistribution) -> Tuple[FiniteGroup, IRSDistribution, InvarianceCertificate]:
    """
    Re-express an IRS of G as an IRS of its normal closure N.

    N becomes a finite marked group generated greedily by its elements in
    index order; labels are the element names in G.

    Returns:
        (N as a marked group, mu over N, invariance certificate over N)
    """
    group = mu.parent
    if not isinstance(group, FiniteGroup):
        raise Unsupported("Restriction to the normal closure needs a finite group")
    N = irs_normal_closure(mu)
    generators: List[int] = []
    span = {group.identity()}
    for g in N.sorted_elements():
        if g not in span:
            generators.append(g)
            span = set(subgroup_generated(group, generators).elements)
    if not generators:
        generators = [group.identity()]
    sub = FiniteGroup.from_elements(
        [(group.element_name(g), g) for g in generators],
        lambda x, y: group.table[x][y],
        group.identity(),
        namer=group.element_name,
        family="finite",
    )
    position = {g: i for i, g in enumerate(sub.payload)}
    restricted = IRSDistribution(sub, [
        (ElementSet(sub, [position[h] for h in H.elements], check=False), w) for H, w in mu.atoms
    ])
    return sub, restricted, check_conjugation_invariance(restricted)


def support_generates(mu: IRSDistribution) -> bool:
    """Whether the atoms jointly generate the group, without taking a normal closure."""
    group = mu.parent
    generated = trivial_subgroup(group)
    for H, _ in mu.atoms:
        generated = join(generated, H)
    return generated == whole_group(group)


def uniform_on_conjugacy_class(H: Subgroup) -> IRSDistribution:
    """Uniform IRS on the conjugacy class of H (finite classes only)."""
    group = H.parent
    generators = [group.letter_element((i, 1)) for i in range(group.rank)]
    orbit = [H]
    seen = {H}
    queue = deque([H])
    while queue:
        K = queue.popleft()
        for s in generators:
            C = conjugate(K, s)
            if C not in seen:
                seen.add(C)
                orbit.append(C)
                queue.append(C)
                if len(orbit) > 10000:
                    raise Unsupported("Conjugacy class is too large to be an atom set")
    return IRSDistribution(group, [(K, Fraction(1, len(orbit))) for K in orbit])


def direct_sum_irs(copies: int) -> IRSDistribution:
    """
    Truncation of the IRS on a countable direct sum of Z/2 that puts weight
    proportional to 1/n^2 on the n-th coordinate copy.

    The group is (Z/2)^copies; the atom for n is the copy <x_n>.
    """
    group = elementary_abelian_group(copies)
    raw = [Fraction(1, n * n) for n in range(1, copies + 1)]
    total = sum(raw)
    atoms = [(subgroup_generated(group, [1 << (n - 1)]), w / total) for n, w in enumerate(raw, start=1)]
    return IRSDistribution(group, atoms)


def lamplighter_irs(m: int) -> IRSDistribution:
    """
    Truncation of the lamplighter IRS: uniform over the m single-lamp
    subgroups of Z/2 wr Z/m. Its normal closure is the lamp group.
    """
    group = lamplighter_group(m)
    atoms = [(subgroup_generated(group, [lamp_element(group, j)]), Fraction(1, m)) for j in range(m)]
    return IRSDistribution(group, atoms)


def random_pmp_action(group: FiniteGroup, rng: random.Random, max_points: int = 12,
                      max_orbits: int = 3) -> FinitePMPAction:
    """
    Random measure preserving action of a finite group.

    A disjoint union of coset spaces G/K for random subgroups K of small
    index; weights are random and constant on each orbit.
    """
    elements = group.elements()
    orbit_subgroups: List[ElementSet] = []
    points = 0
    wanted = rng.randint(1, max_orbits)
    attempts = 0
    while len(orbit_subgroups) < wanted and attempts < 50:
        attempts += 1
        K = subgroup_generated(group, rng.sample(elements, rng.randint(0, 2)))
        if points + K.index() <= max_points:
            orbit_subgroups.append(K)
            points += K.index()
    if not orbit_subgroups:
        orbit_subgroups.append(whole_group(group))
        points = 1
    cosets: List[frozenset] = []
    orbit_of_point: List[int] = []
    for o, K in enumerate(orbit_subgroups):
        local = []
        for g in elements:
            coset = frozenset(group.table[g][k] for k in K.elements)
            if coset not in local:
                local.append(coset)
        cosets.extend(local)
        orbit_of_point.extend([o] * len(local))
    position = {(orbit_of_point[p], c): p for p, c in enumerate(cosets)}
    action = {}
    for i, label in enumerate(group.generator_labels):
        s = group.generator_elements[i]
        action[label] = [
            position[(orbit_of_point[p], frozenset(group.table[s][g] for g in c))]
            for p, c in enumerate(cosets)
        ]
    orbit_weights = [Fraction(rng.randint(1, 9)) for _ in orbit_subgroups]
    total = sum(orbit_weights)
    sizes = [orbit_of_point.count(o) for o in range(len(orbit_subgroups))]
    measure = [orbit_weights[o] / total / sizes[o] for o in orbit_of_point]
    return FinitePMPAction(group, action, measure)


def random_invariant_irs(group: FiniteGroup, rng: random.Random, max_classes: int = 3) -> IRSDistribution:
    """Random convex combination of uniform measures on conjugacy classes of subgroups."""
    elements = group.elements()
    classes: Dict[frozenset, IRSDistribution] = {}
    for _ in range(rng.randint(1, max_classes)):
        H = subgroup_generated(group, rng.sample(elements, rng.randint(0, 2)))
        mu = uniform_on_conjugacy_class(H)
        classes[frozenset(mu.support())] = mu
    weights = [Fraction(rng.randint(1, 9)) for _ in classes]
    total = sum(weights)
    atoms = []
    for w, mu in zip(weights, classes.values()):
        atoms.extend((H, w / total * a) for H, a in mu.atoms)
    return IRSDistribution.aggregate(group, atoms)
