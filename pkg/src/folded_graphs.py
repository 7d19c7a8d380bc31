#!/usr/bin/env python3
"""
Folded Graphs Module

This module implements the labeled-graph machinery behind subgroups of free
groups: Stallings folding of generator loops into core graphs, canonical
renumbering, graph products (subgroup intersections) and a bounded
Haselgrove-Leech-Trotter coset enumeration used for normal closures.

A labeled graph has vertices 0..n-1 with base vertex 0 and, for every vertex,
a partial map from letters (generator index, sign) to vertices. An edge
v --(i,+1)--> w is always stored together with w --(i,-1)--> v.
"""

import logging
from collections import deque
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

try:
    from .group_core import FreeGroup, Letter, Word, invert_letter
    from .utils.exceptions import ClosureExceedsBound, IncompleteTable, IndexOverflow, ValidationError
except ImportError:
    from group_core import FreeGroup, Letter, Word, invert_letter
    from utils.exceptions import ClosureExceedsBound, IncompleteTable, IndexOverflow, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_PRODUCT_BOUND = 100000


class LabeledGraph:
    """
    Immutable rooted labeled graph in canonical form.

    Vertices are numbered in breadth-first order from the base vertex with
    letters tried in canonical order, so two graphs describe the same rooted
    labeled graph iff their keys are equal.
    """

    def __init__(self, letters: Sequence[Letter], adjacency: Sequence[Dict[Letter, int]]):
        self.letters: Tuple[Letter, ...] = tuple(letters)
        self.adjacency: Tuple[Dict[Letter, int], ...] = tuple(dict(row) for row in adjacency)
        self._key: Optional[Tuple] = None

    @property
    def size(self) -> int:
        """Number of vertices."""
        return len(self.adjacency)

    def follow(self, vertex: int, letter: Letter) -> Optional[int]:
        """Target of the letter-edge at vertex, or None."""
        return self.adjacency[vertex].get(letter)

    def trace(self, word: Iterable[Letter], start: int = 0) -> Optional[int]:
        """Endpoint of the path reading word from start, or None if it falls off."""
        vertex: Optional[int] = start
        for letter in word:
            vertex = self.adjacency[vertex].get(letter)
            if vertex is None:
                return None
        return vertex

    def is_complete(self) -> bool:
        """Whether every letter is defined at every vertex."""
        return all(len(row) == len(self.letters) for row in self.adjacency)

    def positive_edges(self) -> List[Tuple[int, int, int]]:
        """Edges (source, generator index, target) in canonical order."""
        edges = []
        for v, row in enumerate(self.adjacency):
            for letter in self.letters:
                if letter[1] > 0 and letter in row:
                    edges.append((v, letter[0], row[letter]))
        return edges

    def key(self) -> Tuple:
        """Hashable canonical key."""
        if self._key is None:
            self._key = tuple(
                tuple(row.get(letter, -1) for letter in self.letters) for row in self.adjacency
            )
        return self._key

    def rank(self) -> int:
        """Rank of the fundamental group at the base: E - V + 1."""
        return len(self.positive_edges()) - self.size + 1

    def tree_paths(self) -> List[Word]:
        """Breadth-first spanning-tree words from the base to every vertex."""
        paths: List[Optional[Word]] = [None] * self.size
        paths[0] = ()
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for letter in self.letters:
                w = self.adjacency[v].get(letter)
                if w is not None and paths[w] is None:
                    paths[w] = paths[v] + (letter,)
                    queue.append(w)
        return [p if p is not None else () for p in paths]

    def schreier_generators(self, group: FreeGroup) -> List[Word]:
        """
        Free basis of the subgroup read at the base vertex.

        One generator per non-tree positive edge: path(u) x path(v)^-1.
        """
        paths = self.tree_paths()
        tree_edges = set()
        for v in range(1, self.size):
            path = paths[v]
            parent = self.trace(path[:-1])
            tree_edges.add((parent, path[-1], v))
            tree_edges.add((v, invert_letter(path[-1]), parent))
        generators = []
        for u, index, v in self.positive_edges():
            if (u, (index, 1), v) in tree_edges:
                continue
            word = paths[u] + ((index, 1),) + group.inverse(paths[v])
            generators.append(group.evaluate_word(word))
        return generators

    def table_rows(self) -> List[List[int]]:
        """Rows of the coset table; requires a complete graph."""
        if not self.is_complete():
            raise IncompleteTable("Graph is not complete; it is no coset table")
        return [[row[letter] for letter in self.letters] for row in self.adjacency]

    def rebased(self, vertex: int) -> "LabeledGraph":
        """The same graph rooted at another vertex, canonicalized."""
        return canonical_graph(self.letters, [dict(row) for row in self.adjacency], vertex)

    def __eq__(self, other) -> bool:
        return isinstance(other, LabeledGraph) and self.letters == other.letters and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.letters, self.key()))

    def __repr__(self) -> str:
        return f"LabeledGraph(vertices={self.size}, complete={self.is_complete()})"


def canonical_graph(letters: Sequence[Letter], adjacency: Sequence[Dict[Letter, int]],
                    base: int = 0) -> LabeledGraph:
    """
    Renumber the component of base breadth-first.

    Args:
        letters: Canonical letter order
        adjacency: Partial letter maps per vertex (any numbering)
        base (int): Base vertex

    Returns:
        LabeledGraph: Canonical graph of the base component
    """
    order = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for letter in letters:
            w = adjacency[v].get(letter)
            if w is not None and w not in order:
                order[w] = len(order)
                queue.append(w)
    rows: List[Dict[Letter, int]] = [dict() for _ in order]
    for v, new_v in order.items():
        rows[new_v] = {letter: order[w] for letter, w in adjacency[v].items()}
    return LabeledGraph(letters, rows)


def graph_from_table(letters: Sequence[Letter], rows: Sequence[Sequence[int]]) -> LabeledGraph:
    """
    Build a canonical graph from coset-table rows.

    Raises:
        IncompleteTable: If an entry is undefined or out of range
        ValidationError: If inverse columns are not inverse permutations
    """
    n = len(rows)
    adjacency = []
    for c, row in enumerate(rows):
        if len(row) != len(letters):
            raise IncompleteTable(f"Row {c} has {len(row)} entries, expected {len(letters)}")
        mapping = {}
        for letter, target in zip(letters, row):
            if target is None or not 0 <= target < n:
                raise IncompleteTable(f"Undefined entry at coset {c}, letter {letter}")
            mapping[letter] = target
        adjacency.append(mapping)
    for c, mapping in enumerate(adjacency):
        for letter, target in mapping.items():
            if adjacency[target][invert_letter(letter)] != c:
                raise ValidationError("Column of an inverse letter is not the inverse permutation",
                                      details={'coset': c, 'letter': letter})
    graph = canonical_graph(letters, adjacency, 0)
    if graph.size != n:
        raise ValidationError("Coset table is not transitive from the base coset",
                              details={'reachable': graph.size, 'cosets': n})
    return graph


def fold_words(group: FreeGroup, words: Iterable[Word]) -> LabeledGraph:
    """
    Stallings core graph of the subgroup generated by words.

    Each generator becomes a loop at the base; folding identifies the two
    targets of equally labeled edges leaving one vertex until none remain,
    then hanging trees are trimmed.

    Args:
        group (FreeGroup): Ambient free group
        words: Generating words (need not be reduced)

    Returns:
        LabeledGraph: Folded, trimmed, canonical core graph
    """
    edges = set()
    vertex_count = 1
    for word in words:
        word = group.evaluate_word(word)
        if not word:
            continue
        v = 0
        for pos, (index, sign) in enumerate(word):
            if pos == len(word) - 1:
                w = 0
            else:
                w = vertex_count
                vertex_count += 1
            edges.add((v, index, w) if sign > 0 else (w, index, v))
            v = w

    while True:
        targets: Dict[Tuple[int, Letter], int] = {}
        pair = None
        for u, index, v in sorted(edges):
            for key, target in (((u, (index, 1)), v), ((v, (index, -1)), u)):
                other = targets.setdefault(key, target)
                if other != target:
                    pair = (other, target)
                    break
            if pair:
                break
        if pair is None:
            break
        keep, drop = min(pair), max(pair)
        edges = {(keep if a == drop else a, index, keep if b == drop else b) for a, index, b in edges}

    adjacency: Dict[int, Dict[Letter, int]] = {0: {}}
    for u, index, v in edges:
        adjacency.setdefault(u, {})[(index, 1)] = v
        adjacency.setdefault(v, {})[(index, -1)] = u
    return _trim_and_canonicalize(group, adjacency, 0)


def _trim_and_canonicalize(group: FreeGroup, adjacency: Dict[int, Dict[Letter, int]],
                           base: int) -> LabeledGraph:
    """Remove hanging trees away from the base and renumber."""
    adjacency = {v: dict(row) for v, row in adjacency.items()}
    changed = True
    while changed:
        changed = False
        for v in list(adjacency):
            if v == base:
                continue
            row = adjacency[v]
            if len(row) <= 1:
                for letter, w in row.items():
                    if w in adjacency:
                        adjacency[w].pop(invert_letter(letter), None)
                del adjacency[v]
                changed = True
    index = {v: i for i, v in enumerate(sorted(adjacency))}
    rows = [dict() for _ in index]
    for v, row in adjacency.items():
        rows[index[v]] = {letter: index[w] for letter, w in row.items()}
    return canonical_graph(group.letters(), rows, index[base])


def trimmed(group: FreeGroup, graph: LabeledGraph) -> LabeledGraph:
    """Core of a rooted graph (hanging trees removed), canonical."""
    return _trim_and_canonicalize(group, {v: dict(row) for v, row in enumerate(graph.adjacency)}, 0)


def product_graph(group: FreeGroup, first: LabeledGraph, second: LabeledGraph,
                  bound: int = DEFAULT_PRODUCT_BOUND) -> LabeledGraph:
    """
    Base component of the fiber product of two rooted graphs.

    For coset tables this is the coset table of the intersection; for core
    graphs it is the core graph of the intersection after trimming.

    Raises:
        IndexOverflow: If the component has more than bound vertices
    """
    letters = group.letters()
    order = {(0, 0): 0}
    rows: List[Dict[Letter, int]] = [dict()]
    queue = deque([(0, 0)])
    while queue:
        pair = queue.popleft()
        v = order[pair]
        for letter in letters:
            a = first.follow(pair[0], letter)
            b = second.follow(pair[1], letter)
            if a is None or b is None:
                continue
            target = (a, b)
            if target not in order:
                order[target] = len(order)
                rows.append(dict())
                if len(order) > bound:
                    raise IndexOverflow("Fiber product exceeds the index bound",
                                        details={'bound': bound})
                queue.append(target)
            rows[v][letter] = order[target]
    graph = canonical_graph(letters, rows, 0)
    return graph if graph.is_complete() else trimmed(group, graph)


def enumerate_cosets(group: FreeGroup, relators: Sequence[Word], subgroup_words: Sequence[Word],
                     index_bound: int, coset_limit: Optional[int] = None) -> LabeledGraph:
    """
    Coset enumeration of <subgroup_words> in F / <<relators>>.

    Haselgrove-Leech-Trotter strategy: every live coset scans every relator,
    undefined entries are defined on the way, and coincidences are merged
    with a union-find queue.

    Args:
        group (FreeGroup): Free group carrying the relators
        relators: Words that must act trivially at every coset
        subgroup_words: Words that must fix the base coset
        index_bound (int): Largest acceptable index
        coset_limit (int): Largest number of cosets ever defined
            (defaults to max(64 * index_bound, 4096))

    Returns:
        LabeledGraph: Complete canonical coset table

    Raises:
        ClosureExceedsBound: If the limit or the bound is exceeded
    """
    letters = group.letters()
    if coset_limit is None:
        coset_limit = max(64 * index_bound, 4096)
    table: List[Dict[Letter, int]] = [dict()]
    parent: List[int] = [0]

    def rep(c: int) -> int:
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def define(c: int, letter: Letter):
        if len(table) >= coset_limit:
            raise ClosureExceedsBound(
                "Coset enumeration exceeded its coset limit",
                details={'coset_limit': coset_limit, 'index_bound': index_bound}
            )
        d = len(table)
        table.append(dict())
        parent.append(d)
        table[c][letter] = d
        table[d][invert_letter(letter)] = c

    def merge(k: int, m: int, queue: List[int]):
        k, m = rep(k), rep(m)
        if k != m:
            low, high = min(k, m), max(k, m)
            parent[high] = low
            queue.append(high)

    def coincidence(a: int, b: int):
        queue: List[int] = []
        merge(a, b, queue)
        i = 0
        while i < len(queue):
            dead = queue[i]
            i += 1
            for letter in letters:
                target = table[dead].get(letter)
                if target is None:
                    continue
                inverse = invert_letter(letter)
                table[target].pop(inverse, None)
                mu, nu = rep(dead), rep(target)
                if letter in table[mu]:
                    merge(nu, table[mu][letter], queue)
                elif inverse in table[nu]:
                    merge(mu, table[nu][inverse], queue)
                else:
                    table[mu][letter] = nu
                    table[nu][inverse] = mu

    def scan_and_fill(c: int, word: Word):
        if not word:
            return
        while True:
            f, i = c, 0
            b, j = c, len(word) - 1
            while i <= j and word[i] in table[f]:
                f = table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and invert_letter(word[j]) in table[b]:
                b = table[b][invert_letter(word[j])]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][word[i]] = b
                table[b][invert_letter(word[i])] = f
                return
            define(f, word[i])

    reduced_relators = [group.evaluate_word(w) for w in relators]
    for word in subgroup_words:
        scan_and_fill(0, group.evaluate_word(word))
    c = 0
    while c < len(table):
        if rep(c) == c:
            for word in reduced_relators:
                scan_and_fill(c, word)
                if rep(c) != c:
                    break
            if rep(c) == c:
                for letter in letters:
                    if rep(c) != c:
                        break
                    if letter not in table[c]:
                        define(c, letter)
        c += 1

    live = [c for c in range(len(table)) if rep(c) == c]
    if len(live) > index_bound:
        raise ClosureExceedsBound(
            f"Index {len(live)} exceeds the bound {index_bound}",
            details={'index': len(live), 'index_bound': index_bound}
        )
    rows = {c: {letter: rep(target) for letter, target in table[c].items()} for c in live}
    logger.debug(f"Coset enumeration finished: {len(live)} live of {len(table)} defined cosets")
    graph = canonical_graph(letters, rows, 0)
    if not graph.is_complete():
        raise ValidationError("Coset enumeration ended with an incomplete table")
    return graph
