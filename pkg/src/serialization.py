#!/usr/bin/env python3
"""
Serialization Module

This module reads and writes the versioned text blocks used for subgroups,
IRS distributions, convex bodies and body measures.

Formats (one directive per line, "#" starts a comment):

    subgroup v1                 irs v1
    group fixture S3            group fixture S3
    kind elements               atom 1/3 elements
    element e                   element e
    element (12)                element (12)
    end                         atom 2/3 elements
                                ...
                                end

    body v1 2                   measure v1
    vertex 1/2 1/2              atom 9/10
    vertex -1/2 1/2             body v1 2
    end                         vertex ...
                                end
                                end

Vertex coordinates are "p/q" rationals or "(a+b√s)/q" quadratic
irrationals, written without spaces.

Subgroup kinds are ``elements`` (finite groups, one ``element`` line per
element name), ``cosettable`` (one ``row`` line per coset, entries in
letter order a, a^-1, b, b^-1, ...) and ``generators`` (one ``generator``
line per word).
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

try:
    from .convex_cone import BodyMeasure, ConvexBody
    from .group_core import FiniteGroup, FreeGroup, MarkedGroup
    from .group_fixtures import fixture_group
    from .irs import IRSDistribution, as_fraction
    from .quadratic_field import Exact, format_exact, parse_exact
    from .subgroup_space import CosetTable, ElementSet, FreeSubgroup, Subgroup, subgroup_generated
    from .utils.exceptions import IRSLabError, SerializationError, Unsupported
except ImportError:
    from convex_cone import BodyMeasure, ConvexBody
    from group_core import FiniteGroup, FreeGroup, MarkedGroup
    from group_fixtures import fixture_group
    from irs import IRSDistribution, as_fraction
    from quadratic_field import Exact, format_exact, parse_exact
    from subgroup_space import CosetTable, ElementSet, FreeSubgroup, Subgroup, subgroup_generated
    from utils.exceptions import IRSLabError, SerializationError, Unsupported

logger = logging.getLogger(__name__)

FORMAT_VERSION = "v1"
SUBGROUP_KINDS = ("elements", "cosettable", "generators")


class _Lines:
    """Cursor over significant lines with their 1-based numbers."""

    def __init__(self, text: str, source: Optional[str] = None):
        self.source = source
        self.items: List[Tuple[int, str]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.items.append((number, line))
        self.pos = 0

    def peek(self) -> Optional[Tuple[int, str]]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self, expected: str = "a directive") -> Tuple[int, str]:
        item = self.peek()
        if item is None:
            raise SerializationError(f"Unexpected end of input, expected {expected}", source=self.source)
        self.pos += 1
        return item

    def error(self, message: str, line: int) -> SerializationError:
        return SerializationError(message, source=self.source, line=line)

    def header(self, keyword: str) -> Tuple[int, List[str]]:
        number, line = self.next(f"'{keyword} {FORMAT_VERSION}'")
        parts = line.split()
        if parts[0] != keyword:
            raise self.error(f"Expected a '{keyword}' block, found '{parts[0]}'", number)
        if len(parts) < 2 or parts[1] != FORMAT_VERSION:
            raise self.error(f"Unsupported {keyword} format version", number)
        return number, parts[2:]


def _directive(line: str) -> Tuple[str, str]:
    head, _, rest = line.partition(" ")
    return head, rest.strip()


# --- groups ------------------------------------------------------------------

def group_line(group: MarkedGroup, fixture: Optional[str] = None) -> str:
    """The ``group`` directive for a group: a fixture name, a free group or "config"."""
    if fixture is not None:
        return f"group fixture {fixture}"
    if isinstance(group, FreeGroup):
        return f"group free {group.rank} " + " ".join(group.generator_labels)
    return "group config"


def _resolve_group(lines: _Lines, group: Optional[MarkedGroup]) -> MarkedGroup:
    item = lines.peek()
    if item is None or not item[1].startswith("group"):
        if group is None:
            raise SerializationError("No group line and no group supplied", source=lines.source)
        return group
    number, line = lines.next()
    parts = line.split()[1:]
    if not parts:
        raise lines.error("Empty group directive", number)
    try:
        if parts[0] == "fixture" and len(parts) == 2:
            described = fixture_group(parts[1])
        elif parts[0] == "free" and len(parts) >= 2:
            rank = int(parts[1])
            described = FreeGroup(rank, parts[2:] or None)
        elif parts[0] == "config":
            if group is None:
                raise lines.error("'group config' needs a group from the experiment config", number)
            return group
        else:
            raise lines.error(f"Unknown group directive '{line}'", number)
    except ValueError:
        raise lines.error(f"Malformed group directive '{line}'", number)
    except Unsupported as e:
        raise lines.error(e.message, number)
    if group is not None:
        if not group.same_group(described):
            raise lines.error("Group line does not match the configured group", number)
        return group
    return described


# --- subgroups -----------------------------------------------------------------

def _subgroup_lines(H: Subgroup) -> Tuple[str, List[str]]:
    if isinstance(H, ElementSet):
        return "elements", [f"element {name}" for name in H.element_names()]
    if isinstance(H, CosetTable):
        return "cosettable", ["row " + " ".join(str(c) for c in row) for row in H.rows()]
    if isinstance(H, FreeSubgroup):
        words = H.generators()
        return "generators", [f"generator {H.parent.format_word(w)}" for w in words]
    raise Unsupported(f"No text form for {H.describe()}")


def _read_subgroup_body(lines: _Lines, group: MarkedGroup, kind: str, number: int) -> Subgroup:
    entries: List[Tuple[int, str]] = []
    while True:
        item = lines.peek()
        if item is None:
            raise SerializationError("Unterminated subgroup", source=lines.source, line=number)
        head, rest = _directive(item[1])
        if head not in ("element", "row", "generator"):
            break
        lines.next()
        entries.append((item[0], item[1]))
    try:
        if kind == "elements":
            if not isinstance(group, FiniteGroup):
                raise lines.error("Element lists need a finite group", number)
            elements = []
            for line_no, line in entries:
                head, rest = _directive(line)
                if head != "element":
                    raise lines.error(f"'{head}' line in an element list", line_no)
                elements.append(group.element(rest))
            return ElementSet(group, elements)
        if kind == "cosettable":
            rows = []
            for line_no, line in entries:
                head, rest = _directive(line)
                if head != "row":
                    raise lines.error(f"'{head}' line in a coset table", line_no)
                rows.append([int(c) for c in rest.split()])
            return CosetTable.from_rows(group, rows)
        if kind == "generators":
            words = []
            for line_no, line in entries:
                head, rest = _directive(line)
                if head != "generator":
                    raise lines.error(f"'{head}' line in a generator list", line_no)
                words.append(rest)
            return subgroup_generated(group, words)
    except SerializationError:
        raise
    except (IRSLabError, ValueError) as e:
        message = e.message if isinstance(e, IRSLabError) else str(e)
        raise lines.error(f"Invalid {kind} subgroup: {message}", number)
    raise lines.error(f"Unknown subgroup kind '{kind}'; expected one of {list(SUBGROUP_KINDS)}", number)


def _expect_end(lines: _Lines, what: str):
    number, line = lines.next("'end'")
    if line != "end":
        raise lines.error(f"Expected 'end' after the {what}, found '{line}'", number)


def subgroup_to_text(H: Subgroup, group_directive: Optional[str] = None) -> str:
    kind, body = _subgroup_lines(H)
    lines = [f"subgroup {FORMAT_VERSION}", group_directive or group_line(H.parent), f"kind {kind}"]
    lines.extend(body)
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_subgroup(text: str, group: Optional[MarkedGroup] = None, source: Optional[str] = None) -> Subgroup:
    lines = _Lines(text, source)
    number, _ = lines.header("subgroup")
    parent = _resolve_group(lines, group)
    kind_no, kind_line = lines.next("'kind'")
    head, kind = _directive(kind_line)
    if head != "kind":
        raise lines.error("Expected a 'kind' line", kind_no)
    H = _read_subgroup_body(lines, parent, kind, kind_no)
    _expect_end(lines, "subgroup")
    return H


# --- IRS -------------------------------------------------------------------------

def irs_to_text(mu: IRSDistribution, group_directive: Optional[str] = None) -> str:
    lines = [f"irs {FORMAT_VERSION}", group_directive or group_line(mu.parent)]
    for H, w in mu.atoms:
        kind, body = _subgroup_lines(H)
        lines.append(f"atom {w.numerator}/{w.denominator} {kind}")
        lines.extend(body)
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_irs(text: str, group: Optional[MarkedGroup] = None, source: Optional[str] = None) -> IRSDistribution:
    """
    Read an IRS block.

    Raises:
        SerializationError: With the offending line number
    """
    lines = _Lines(text, source)
    lines.header("irs")
    parent = _resolve_group(lines, group)
    atoms = []
    while True:
        number, line = lines.next("'atom' or 'end'")
        if line == "end":
            break
        head, rest = _directive(line)
        parts = rest.split()
        if head != "atom" or len(parts) != 2:
            raise lines.error(f"Expected 'atom <weight> <kind>', found '{line}'", number)
        try:
            weight = as_fraction(parts[0])
        except IRSLabError as e:
            raise lines.error(e.message, number)
        atoms.append((_read_subgroup_body(lines, parent, parts[1], number), weight))
    try:
        return IRSDistribution(parent, atoms)
    except IRSLabError as e:
        raise SerializationError(f"Invalid IRS: {e.message}", source=source)


# --- bodies ----------------------------------------------------------------------

def _coordinate(text: str, lines: _Lines, number: int) -> Exact:
    try:
        return parse_exact(text)
    except IRSLabError:
        raise lines.error(f"Bad coordinate '{text}'", number)


def _read_body(lines: _Lines) -> ConvexBody:
    number, args = lines.header("body")
    if len(args) != 1 or not args[0].isdigit():
        raise lines.error("Expected 'body v1 <dimension>'", number)
    dimension = int(args[0])
    vertices = []
    while True:
        line_no, line = lines.next("'vertex' or 'end'")
        if line == "end":
            break
        head, rest = _directive(line)
        coords = rest.split()
        if head != "vertex" or len(coords) != dimension:
            raise lines.error(f"Expected 'vertex' with {dimension} coordinates", line_no)
        vertices.append(tuple(_coordinate(c, lines, line_no) for c in coords))
    if not vertices:
        raise lines.error("Body without vertices", number)
    try:
        return ConvexBody(vertices)
    except SerializationError:
        raise
    except IRSLabError as e:
        e.details.setdefault('line', number)
        raise


def body_to_text(C: ConvexBody) -> str:
    lines = [f"body {FORMAT_VERSION} {C.dimension}"]
    lines.extend("vertex " + " ".join(format_exact(c) for c in v) for v in C.vertices)
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_body(text: str, source: Optional[str] = None) -> ConvexBody:
    return _read_body(_Lines(text, source))


def measure_to_text(nu: BodyMeasure) -> str:
    lines = [f"measure {FORMAT_VERSION}"]
    for body, w in nu.atoms:
        lines.append(f"atom {w.numerator}/{w.denominator}")
        lines.append(body_to_text(body).rstrip("\n"))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_measure(text: str, source: Optional[str] = None) -> BodyMeasure:
    lines = _Lines(text, source)
    lines.header("measure")
    atoms = []
    while True:
        number, line = lines.next("'atom' or 'end'")
        if line == "end":
            break
        head, rest = _directive(line)
        if head != "atom":
            raise lines.error(f"Expected 'atom <weight>', found '{line}'", number)
        try:
            weight = as_fraction(rest)
        except IRSLabError as e:
            raise lines.error(e.message, number)
        atoms.append((_read_body(lines), weight))
    try:
        return BodyMeasure(atoms)
    except IRSLabError as e:
        raise SerializationError(f"Invalid measure: {e.message}", source=source)


# --- files -----------------------------------------------------------------------

def _read(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SerializationError(f"Cannot read {path}: {e}", source=str(path))


def load_irs(path: Union[str, Path], group: Optional[MarkedGroup] = None) -> IRSDistribution:
    return parse_irs(_read(path), group, source=str(path))


def load_subgroup(path: Union[str, Path], group: Optional[MarkedGroup] = None) -> Subgroup:
    return parse_subgroup(_read(path), group, source=str(path))


def load_body(path: Union[str, Path]) -> ConvexBody:
    return parse_body(_read(path), source=str(path))


def load_measure(path: Union[str, Path]) -> BodyMeasure:
    return parse_measure(_read(path), source=str(path))


def save_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path
