#!/usr/bin/env python3
"""
Group Core Module

This module provides marked groups (a group together with a finite symmetric
generating set) and exact word arithmetic for the families the rest of
irs-lab works with: free groups of finite rank and finite groups stored as
full multiplication tables.
"""

import csv
import logging
import re
from abc import ABC, abstractmethod
from collections import deque
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

try:
    from .utils.exceptions import (
        BallTooLarge, FamilyMismatch, GroupTooLarge, NotAHomomorphism,
        SerializationError, UnknownGenerator, UnsupportedSource, ValidationError
    )
except ImportError:
    from utils.exceptions import (
        BallTooLarge, FamilyMismatch, GroupTooLarge, NotAHomomorphism,
        SerializationError, UnknownGenerator, UnsupportedSource, ValidationError
    )

# A letter of the symmetric generating set: (generator index, +1 or -1).
Letter = Tuple[int, int]
Word = Tuple[Letter, ...]

DEFAULT_BALL_CAP = 10 ** 7
MAX_TABLE_ORDER = 5000
INVERSE_SUFFIXES = ("⁻¹", "^-1")
SERIAL_INVERSE_SUFFIX = "^-1"

logger = logging.getLogger(__name__)


def invert_letter(letter: Letter) -> Letter:
    """Return the inverse letter."""
    return (letter[0], -letter[1])


class MarkedGroup(ABC):
    """
    A group with a finite symmetric generating set S.

    Generators are named by string labels; the symmetric set is made of
    letters (index, sign), ordered a, a^-1, b, b^-1, ... This order is the
    canonical letter order used by shortlex orders, coset tables and
    Schreier graphs.
    """

    family: str = "abstract"

    def __init__(self, generator_labels: Sequence[str]):
        labels = list(generator_labels)
        if not labels:
            raise ValidationError("A marked group needs at least one generator")
        if len(set(labels)) != len(labels):
            raise ValidationError("Generator labels must be distinct", details={'labels': labels})
        for label in labels:
            if not label or any(ch.isspace() for ch in label) or label.endswith(INVERSE_SUFFIXES):
                raise ValidationError(f"Invalid generator label '{label}'")
        self.generator_labels: List[str] = labels
        self._letters: List[Letter] = [(i, sign) for i in range(len(labels)) for sign in (1, -1)]
        self._letter_position = {letter: pos for pos, letter in enumerate(self._letters)}
        # longest labels first so that "ab" never shadows "abc"
        self._tokens = sorted(
            ((label, i) for i, label in enumerate(labels)),
            key=lambda item: -len(item[0])
        )

    # ------------------------------------------------------------------
    # generating set

    @property
    def rank(self) -> int:
        """Number of positive generators k (so |S| = 2k)."""
        return len(self.generator_labels)

    def letters(self) -> List[Letter]:
        """Letters of S in canonical order."""
        return list(self._letters)

    def letter_position(self, letter: Letter) -> int:
        """Position of a letter in the canonical letter order."""
        try:
            return self._letter_position[letter]
        except KeyError:
            raise UnknownGenerator(f"Letter {letter} is not in the generating set")

    def letter_label(self, letter: Letter, inverse_suffix: str = SERIAL_INVERSE_SUFFIX) -> str:
        """Printable label of a letter."""
        label = self.generator_labels[letter[0]]
        return label if letter[1] > 0 else label + inverse_suffix

    def parse_word(self, text: str) -> List[Letter]:
        """
        Parse a word over S.

        Tokens are matched greedily against the generator labels (longest
        label first), each optionally followed by an inverse suffix
        ("⁻¹" or "^-1"). Whitespace is ignored. The empty text and "e"
        (unless "e" is a generator label) denote the identity.

        Args:
            text (str): Word text, e.g. "a a⁻¹ b" or "(12)(13)"

        Returns:
            List[Letter]: Letters of the word, left to right

        Raises:
            UnknownGenerator: If some part of the text is not a label
        """
        word: List[Letter] = []
        pos = 0
        text = text.strip()
        if text == "" or (text == "e" and "e" not in self.generator_labels):
            return word
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            for label, index in self._tokens:
                if text.startswith(label, pos):
                    pos += len(label)
                    sign = 1
                    for suffix in INVERSE_SUFFIXES:
                        if text.startswith(suffix, pos):
                            pos += len(suffix)
                            sign = -1
                            break
                    word.append((index, sign))
                    break
            else:
                raise UnknownGenerator(
                    f"Cannot read a generator at position {pos} of '{text}'",
                    details={'labels': self.generator_labels}
                )
        return word

    def format_word(self, word: Iterable[Letter], inverse_suffix: str = SERIAL_INVERSE_SUFFIX) -> str:
        """Format a list of letters as space separated labels ("e" for empty)."""
        parts = [self.letter_label(letter, inverse_suffix) for letter in word]
        return " ".join(parts) if parts else "e"

    def _check_letters(self, word: Iterable[Letter]) -> List[Letter]:
        letters = list(word)
        for letter in letters:
            if letter not in self._letter_position:
                raise UnknownGenerator(f"Letter {letter} is not in the generating set")
        return letters

    # ------------------------------------------------------------------
    # element arithmetic

    @abstractmethod
    def identity(self) -> Hashable:
        """Canonical form of the identity."""

    @abstractmethod
    def letter_element(self, letter: Letter) -> Hashable:
        """Element represented by a single letter."""

    @abstractmethod
    def _multiply(self, g: Hashable, h: Hashable) -> Hashable:
        """Multiply canonical forms without validation."""

    @abstractmethod
    def inverse(self, g: Hashable) -> Hashable:
        """Inverse of an element."""

    @abstractmethod
    def contains_element(self, g: Any) -> bool:
        """Whether g is a canonical form of this group."""

    @abstractmethod
    def element_name(self, g: Hashable) -> str:
        """Printable canonical name of an element."""

    @abstractmethod
    def sort_key(self, g: Hashable) -> Tuple:
        """Key of the canonical element order."""

    @property
    @abstractmethod
    def is_finite(self) -> bool:
        """Whether the group is finite."""

    @property
    @abstractmethod
    def signature(self) -> Tuple:
        """Hashable description identifying the marked group."""

    def same_group(self, other: "MarkedGroup") -> bool:
        """Whether other is the same marked group."""
        return self is other or (isinstance(other, MarkedGroup) and self.signature == other.signature)

    def require_same(self, other: "MarkedGroup", what: str = "operands"):
        """Raise FamilyMismatch unless other is the same marked group."""
        if not self.same_group(other):
            raise FamilyMismatch(f"The {what} belong to different marked groups",
                                 details={'left': self.describe(), 'right': other.describe()})

    def check_element(self, g: Any) -> Hashable:
        """Validate an element of this group and return it."""
        if not self.contains_element(g):
            raise FamilyMismatch(f"{g!r} is not an element of {self.describe()}")
        return g

    def multiply(self, g: Hashable, h: Hashable) -> Hashable:
        """
        Multiply two elements.

        Args:
            g: Left factor
            h: Right factor

        Returns:
            Canonical form of g·h

        Raises:
            FamilyMismatch: If either factor is not an element of this group
        """
        return self._multiply(self.check_element(g), self.check_element(h))

    def product(self, elements: Iterable[Hashable]) -> Hashable:
        """Product of a sequence of elements, left to right."""
        result = self.identity()
        for g in elements:
            result = self._multiply(result, g)
        return result

    def conjugate_element(self, g: Hashable, h: Hashable) -> Hashable:
        """Return g h g^-1."""
        return self._multiply(self._multiply(g, h), self.inverse(g))

    def evaluate_word(self, word: Iterable[Letter]) -> Hashable:
        """Evaluate a word over S without reduction rules beyond the group law."""
        result = self.identity()
        for letter in self._check_letters(word):
            result = self._multiply(result, self.letter_element(letter))
        return result

    def reduce_word(self, word: Union[str, Iterable[Letter]]) -> Hashable:
        """
        Canonical form of a word over S.

        Args:
            word: Word text or sequence of letters

        Returns:
            Canonical element (reduced word for free groups, table index for
            finite groups)

        Raises:
            UnknownGenerator: If a letter is not in S
        """
        if isinstance(word, str):
            word = self.parse_word(word)
        return self.evaluate_word(word)

    def element(self, text: str) -> Hashable:
        """Element from its printable name or from a word over S."""
        return self.reduce_word(text)

    # ------------------------------------------------------------------
    # metric

    def word_length(self, g: Hashable) -> int:
        """Word length of g with respect to S."""
        return len(self.word_of(g))

    @abstractmethod
    def word_of(self, g: Hashable) -> Word:
        """A shortest word representing g."""

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> List[Hashable]:
        """
        Elements of word length at most radius, in canonical order.

        Args:
            radius (int): Nonnegative radius R
            cap (int): Maximal number of elements

        Returns:
            List: The ball, sorted by the canonical element order

        Raises:
            BallTooLarge: If the ball has more than cap elements
        """
        if radius < 0:
            raise ValidationError(f"Ball radius must be nonnegative, got {radius}")
        identity = self.identity()
        seen = {identity}
        frontier = [identity]
        for _ in range(radius):
            next_frontier = []
            for g in frontier:
                for letter in self._letters:
                    h = self._multiply(g, self.letter_element(letter))
                    if h not in seen:
                        seen.add(h)
                        next_frontier.append(h)
                        if len(seen) > cap:
                            raise BallTooLarge(radius, cap)
            if not next_frontier:
                break
            frontier = next_frontier
        return sorted(seen, key=self.sort_key)

    def describe(self) -> str:
        """Short human-readable description."""
        return f"{self.family}<{','.join(self.generator_labels)}>"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


class FreeGroup(MarkedGroup):
    """
    Free group of rank k on labeled generators.

    Elements are freely reduced words, stored as tuples of letters.
    """

    family = "free"

    def __init__(self, rank: int = 2, labels: Optional[Sequence[str]] = None):
        if labels is None:
            if rank < 1 or rank > 26:
                raise ValidationError(f"Free group rank must be between 1 and 26, got {rank}")
            labels = [chr(ord('a') + i) for i in range(rank)]
        elif len(labels) != rank:
            raise ValidationError("Number of labels does not match the rank",
                                  details={'rank': rank, 'labels': list(labels)})
        super().__init__(labels)

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def signature(self) -> Tuple:
        return ("free", tuple(self.generator_labels))

    def identity(self) -> Word:
        return ()

    def letter_element(self, letter: Letter) -> Word:
        return (letter,)

    def _multiply(self, g: Word, h: Word) -> Word:
        i = 0
        # cancel the longest suffix of g against the prefix of h
        while i < len(g) and i < len(h) and g[len(g) - 1 - i] == invert_letter(h[i]):
            i += 1
        return g[:len(g) - i] + h[i:]

    def inverse(self, g: Word) -> Word:
        return tuple(invert_letter(letter) for letter in reversed(g))

    def contains_element(self, g: Any) -> bool:
        if not isinstance(g, tuple):
            return False
        for pos, letter in enumerate(g):
            if letter not in self._letter_position:
                return False
            if pos and g[pos - 1] == invert_letter(letter):
                return False
        return True

    def evaluate_word(self, word: Iterable[Letter]) -> Word:
        stack: List[Letter] = []
        for letter in self._check_letters(word):
            if stack and stack[-1] == invert_letter(letter):
                stack.pop()
            else:
                stack.append(letter)
        return tuple(stack)

    def element_name(self, g: Word) -> str:
        return self.format_word(g)

    def sort_key(self, g: Word) -> Tuple:
        return (len(g), tuple(self._letter_position[letter] for letter in g))

    def word_of(self, g: Word) -> Word:
        return g

    def word_length(self, g: Word) -> int:
        return len(g)

    def sphere_sizes(self, radius: int) -> List[int]:
        """Exact sizes |S_r| for r = 0..radius: 1, 2k, 2k(2k-1), ..."""
        k2 = 2 * self.rank
        return [1] + [k2 * (k2 - 1) ** (r - 1) for r in range(1, radius + 1)]

    def ball_size(self, radius: int) -> int:
        """Exact ball size 1 + sum 2k(2k-1)^(r-1)."""
        return sum(self.sphere_sizes(radius))

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> List[Word]:
        if radius < 0:
            raise ValidationError(f"Ball radius must be nonnegative, got {radius}")
        if self.ball_size(radius) > cap:
            raise BallTooLarge(radius, cap)
        result: List[Word] = [()]
        shell: List[Word] = [()]
        for _ in range(radius):
            next_shell = []
            for w in shell:
                for letter in self._letters:
                    if w and w[-1] == invert_letter(letter):
                        continue
                    next_shell.append(w + (letter,))
            result.extend(next_shell)
            shell = next_shell
        result.sort(key=self.sort_key)
        return result

    def to_integer(self, g: Word) -> int:
        """Value of an element of the rank-one free group as an integer."""
        if self.rank != 1:
            raise FamilyMismatch("Integer coordinates exist only in rank one")
        return sum(sign for _, sign in g)

    def from_integer(self, n: int) -> Word:
        """Element t^n of the rank-one free group."""
        if self.rank != 1:
            raise FamilyMismatch("Integer coordinates exist only in rank one")
        return tuple([(0, 1 if n > 0 else -1)] * abs(n))

    def random_element(self, rng, max_length: int) -> Word:
        """Random reduced word of length at most max_length (rng is random.Random)."""
        length = rng.randint(0, max_length)
        word: List[Letter] = []
        while len(word) < length:
            letter = rng.choice(self._letters)
            if word and word[-1] == invert_letter(letter):
                continue
            word.append(letter)
        return tuple(word)


def integer_group() -> FreeGroup:
    """The integers as the rank-one free group on the label 't'."""
    return FreeGroup(1, ["t"])


class FiniteGroup(MarkedGroup):
    """
    Finite group stored as a full multiplication table.

    Elements are table indices; index order is the canonical element order.
    """

    family = "finite"

    def __init__(self, table: Sequence[Sequence[int]], generators: Sequence[Tuple[str, int]],
                 names: Optional[Sequence[str]] = None, family: str = "finite",
                 payload: Optional[Sequence[Any]] = None):
        """
        Initialize a finite group.

        Args:
            table: Multiplication table, table[i][j] = index of i·j
            generators: (label, element index) pairs of the positive generators
            names: Printable element names (defaults to g0, g1, ...)
            family (str): Family tag ("finite" or "finite-quotient", ...)
            payload: Optional concrete objects behind each index (permutations, matrices)
        """
        order = len(table)
        if order == 0:
            raise ValidationError("A finite group needs at least one element")
        if order > MAX_TABLE_ORDER:
            raise GroupTooLarge(f"Multiplication tables are limited to order {MAX_TABLE_ORDER}",
                                details={'order': order})
        self.table: List[List[int]] = [list(row) for row in table]
        for row in self.table:
            if len(row) != order or sorted(row) != list(range(order)):
                raise ValidationError("Multiplication table rows must be permutations of the elements")
        self.order = order
        self.family = family
        self._identity = self._find_identity()
        self._inverses = [row.index(self._identity) for row in self.table]
        super().__init__([label for label, _ in generators])
        self.generator_elements: List[int] = [index for _, index in generators]
        for index in self.generator_elements:
            if not 0 <= index < order:
                raise ValidationError(f"Generator index {index} out of range")
        self.names: List[str] = list(names) if names is not None else [f"g{i}" for i in range(order)]
        if len(self.names) != order or len(set(self.names)) != order:
            raise ValidationError("Element names must be distinct, one per element")
        self._name_index = {name: i for i, name in enumerate(self.names)}
        self.payload = list(payload) if payload is not None else None
        self._words = self._cayley_words()
        if len(self._words) != order:
            raise ValidationError("Generators do not generate the group",
                                  details={'generated': len(self._words), 'order': order})
        self._signature: Optional[Tuple] = None

    def _find_identity(self) -> int:
        for i, row in enumerate(self.table):
            if row == list(range(self.order)) and all(self.table[j][i] == j for j in range(self.order)):
                return i
        raise ValidationError("Multiplication table has no identity element")

    def _cayley_words(self) -> Dict[int, Word]:
        words: Dict[int, Word] = {self._identity: ()}
        queue = deque([self._identity])
        while queue:
            g = queue.popleft()
            for letter in self._letters:
                h = self.table[g][self.letter_element(letter)]
                if h not in words:
                    words[h] = words[g] + (letter,)
                    queue.append(h)
        return words

    # --- constructors -------------------------------------------------

    @classmethod
    def from_elements(cls, generators: Sequence[Tuple[str, Hashable]],
                      multiply: Callable[[Hashable, Hashable], Hashable],
                      identity: Hashable,
                      namer: Optional[Callable[[Hashable], str]] = None,
                      family: str = "finite",
                      max_order: int = MAX_TABLE_ORDER) -> "FiniteGroup":
        """
        Close concrete generators under a multiplication and tabulate.

        Elements are numbered in breadth-first order from the identity, with
        letters tried in canonical order, so index 0 is the identity.

        Args:
            generators: (label, concrete element) pairs
            multiply: Concrete multiplication
            identity: Concrete identity
            namer: Printable name of a concrete element
            family (str): Family tag
            max_order (int): Abort when the closure grows past this order

        Returns:
            FiniteGroup: The tabulated group with payload = concrete elements
        """
        concrete_gens = [g for _, g in generators]
        inverses = []
        for g in concrete_gens:
            # inverse by repeated multiplication; orders are small here
            power, previous = g, identity
            steps = 0
            while power != identity:
                previous = power
                power = multiply(power, g)
                steps += 1
                if steps > max_order:
                    raise GroupTooLarge("Generator order exceeds the closure limit")
            inverses.append(previous)
        elements: List[Hashable] = [identity]
        index = {identity: 0}
        queue = deque([identity])
        while queue:
            x = queue.popleft()
            for g, g_inv in zip(concrete_gens, inverses):
                for y in (multiply(x, g), multiply(x, g_inv)):
                    if y not in index:
                        index[y] = len(elements)
                        elements.append(y)
                        if len(elements) > max_order:
                            raise GroupTooLarge(f"Closure exceeds order {max_order}")
                        queue.append(y)
        table = [[index[multiply(x, y)] for y in elements] for x in elements]
        names = [namer(x) for x in elements] if namer else None
        return cls(table, [(label, index[g]) for (label, _), g in zip(generators, concrete_gens)],
                   names=names, family=family, payload=elements)

    @classmethod
    def from_permutations(cls, generators: Sequence[Tuple[str, Sequence[int]]],
                          family: str = "finite") -> "FiniteGroup":
        """
        Permutation group on {1..n} given by images of 1..n (as 0-based tuples).

        Composition is right to left: (g·h)(x) = g(h(x)), so (12)(13) = (132).
        Element names are cycle notation with 1-based points, "e" for identity.
        """
        degree = len(generators[0][1])
        identity = tuple(range(degree))
        return cls.from_elements(
            [(label, tuple(perm)) for label, perm in generators],
            lambda g, h: tuple(g[h[x]] for x in range(degree)),
            identity,
            namer=cycle_notation,
            family=family,
        )

    @classmethod
    def from_table_csv(cls, path: Union[str, Path], generators: Sequence[Tuple[str, int]],
                       names: Optional[Sequence[str]] = None) -> "FiniteGroup":
        """
        Load a multiplication table from a CSV of 0-based triples.

        The file has the header line ``i,j,k`` and one row per product
        i·j = k.

        Args:
            path: CSV file
            generators: (label, element index) pairs

        Returns:
            FiniteGroup: Loaded group

        Raises:
            SerializationError: On malformed files
        """
        path = Path(path)
        triples: Dict[Tuple[int, int], int] = {}
        with open(path, newline='', encoding='utf-8') as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["i", "j", "k"]:
                raise SerializationError("Table CSV must start with the header 'i,j,k'",
                                         source=str(path), line=1)
            for line_number, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                try:
                    i, j, k = (int(cell) for cell in row)
                except ValueError:
                    raise SerializationError(f"Bad table row {row}", source=str(path), line=line_number)
                triples[(i, j)] = k
        order = int(round(len(triples) ** 0.5))
        if order * order != len(triples):
            raise SerializationError("Table CSV does not describe a square table", source=str(path))
        try:
            table = [[triples[(i, j)] for j in range(order)] for i in range(order)]
        except KeyError as missing:
            raise SerializationError(f"Missing product {missing}", source=str(path))
        logger.debug(f"Loaded a table of order {order} from {path}")
        return cls(table, generators, names=names)

    def to_table_csv(self, path: Union[str, Path]):
        """Write the multiplication table as ``i,j,k`` triples."""
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(["i", "j", "k"])
            for i, row in enumerate(self.table):
                for j, k in enumerate(row):
                    writer.writerow([i, j, k])

    # --- group law ----------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return True

    @property
    def signature(self) -> Tuple:
        if self._signature is None:
            self._signature = ("finite", tuple(self.generator_labels), tuple(self.generator_elements),
                               tuple(tuple(row) for row in self.table))
        return self._signature

    def identity(self) -> int:
        return self._identity

    def letter_element(self, letter: Letter) -> int:
        g = self.generator_elements[letter[0]]
        return g if letter[1] > 0 else self._inverses[g]

    def _multiply(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inverse(self, g: int) -> int:
        return self._inverses[g]

    def contains_element(self, g: Any) -> bool:
        return isinstance(g, int) and not isinstance(g, bool) and 0 <= g < self.order

    def element_name(self, g: int) -> str:
        return self.names[g]

    def element(self, text: str) -> int:
        text = text.strip()
        if text in self._name_index:
            return self._name_index[text]
        return self.reduce_word(text)

    def sort_key(self, g: int) -> Tuple:
        return (g,)

    def word_of(self, g: int) -> Word:
        return self._words[g]

    def elements(self) -> List[int]:
        """All elements in canonical (index) order."""
        return list(range(self.order))

    def element_order(self, g: int) -> int:
        """Order of an element."""
        n, power = 1, g
        while power != self._identity:
            power = self.table[power][g]
            n += 1
        return n

    def describe(self) -> str:
        return f"{self.family}[order {self.order}]<{','.join(self.generator_labels)}>"


def cycle_notation(perm: Sequence[int]) -> str:
    """Cycle notation of a 0-based permutation with 1-based points; "e" for the identity."""
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cycle.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append(cycle)
    if not cycles:
        return "e"
    separator = "," if len(perm) > 9 else ""
    return "".join("(" + separator.join(str(x + 1) for x in cycle) + ")" for cycle in cycles)


def parse_cycles(text: str, degree: int) -> Tuple[int, ...]:
    """Parse cycle notation such as "(12)(34)" or "(1,10)" into a 0-based image tuple."""
    text = text.strip()
    if text in ("", "e"):
        return tuple(range(degree))
    # cycles compose right to left
    result = tuple(range(degree))
    for body in reversed(re.findall(r"\(([^()]*)\)", text)):
        parts = body.split(",") if "," in body else list(body)
        points = [int(p) - 1 for p in parts if p.strip()]
        cycle = list(range(degree))
        for a, b in zip(points, points[1:] + points[:1]):
            cycle[a] = b
        result = tuple(cycle[result[x]] for x in range(degree))
    return result


def evaluate_hom(source: MarkedGroup, images: Dict[str, Hashable], w: Union[str, Hashable],
                 target: FiniteGroup) -> int:
    """
    Image of w under the homomorphism determined by generator images.

    Args:
        source (MarkedGroup): Free marked group
        images: Map from generator labels to target elements; inverse labels
            such as "a^-1" may be present and must then map to the inverse
        w: Element of source (or word text)
        target (FiniteGroup): Finite target group

    Returns:
        int: Image element of target

    Raises:
        UnsupportedSource: If source has relations
        NotAHomomorphism: If inverse images are inconsistent or missing
    """
    if not isinstance(source, FreeGroup):
        raise UnsupportedSource(
            "Homomorphisms are only induced from free marked groups",
            details={'source': source.describe()}
        )
    letter_images = hom_letter_images(source, images, target)
    word = source.reduce_word(w) if isinstance(w, str) else source.check_element(w)
    result = target.identity()
    for letter in word:
        result = target.table[result][letter_images[letter]]
    return result


def hom_letter_images(source: MarkedGroup, images: Dict[str, Hashable],
                      target: FiniteGroup) -> Dict[Letter, int]:
    """Validate generator images and return the image of every letter of S."""
    resolved: Dict[str, int] = {}
    for label, value in images.items():
        resolved[label] = target.element(value) if isinstance(value, str) else target.check_element(value)
    letter_images: Dict[Letter, int] = {}
    for i, label in enumerate(source.generator_labels):
        if label not in resolved:
            raise NotAHomomorphism(f"No image given for generator '{label}'")
        positive = resolved[label]
        letter_images[(i, 1)] = positive
        expected_inverse = target.inverse(positive)
        for suffix in INVERSE_SUFFIXES:
            key = label + suffix
            if key in resolved and resolved[key] != expected_inverse:
                raise NotAHomomorphism(
                    f"Image of '{key}' is not the inverse of the image of '{label}'",
                    details={'label': label}
                )
        letter_images[(i, -1)] = expected_inverse
    known = set(source.generator_labels) | {
        label + suffix for label in source.generator_labels for suffix in INVERSE_SUFFIXES
    }
    unknown = set(resolved) - known
    if unknown:
        raise UnknownGenerator(f"Images given for unknown generators {sorted(unknown)}")
    return letter_images


def quotient_image(source: FreeGroup, images: Dict[str, Hashable], target: FiniteGroup) -> FiniteGroup:
    """
    The finite quotient of a free marked group through a homomorphism.

    The result is the image subgroup of target, marked by the source labels.
    """
    letter_images = hom_letter_images(source, images, target)
    return FiniteGroup.from_elements(
        [(label, letter_images[(i, 1)]) for i, label in enumerate(source.generator_labels)],
        target._multiply,
        target.identity(),
        namer=target.element_name,
        family="finite-quotient",
    )
