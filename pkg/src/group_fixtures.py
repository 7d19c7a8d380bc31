#!/usr/bin/env python3
"""
Group Fixtures Module

This module builds the named marked groups used by experiments and tests:
small permutation groups, cyclic and elementary abelian groups, the
lamplighter truncations and free groups, plus the lookup used by the
``group`` block of experiment configs.
"""

import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

try:
    from .group_core import FiniteGroup, FreeGroup, MarkedGroup, integer_group
    from .utils.exceptions import ConfigInvalid, Unsupported
except ImportError:
    from group_core import FiniteGroup, FreeGroup, MarkedGroup, integer_group
    from utils.exceptions import ConfigInvalid, Unsupported

# Finite groups of order at most 60 used by the oracle sweeps.
ORACLE_FIXTURES = ("S3", "S4", "D4", "Z4", "A4", "Z2xZ2")

GROUP_FAMILIES = ("free", "fixture", "table")


def _perm(cycles: List[Tuple[int, ...]], degree: int) -> Tuple[int, ...]:
    """0-based image tuple of a product of disjoint 1-based cycles."""
    image = list(range(degree))
    for cycle in cycles:
        for pos, point in enumerate(cycle):
            image[point - 1] = cycle[(pos + 1) % len(cycle)] - 1
    return tuple(image)


def symmetric_group(n: int) -> FiniteGroup:
    """
    Symmetric group on {1..n}.

    S3 is generated by "(12)" and "(13)"; larger n by a transposition and
    the long cycle.
    """
    if n < 2:
        return cyclic_group(1)
    if n == 3:
        generators = [("(12)", _perm([(1, 2)], 3)), ("(13)", _perm([(1, 3)], 3))]
    elif n == 2:
        generators = [("(12)", _perm([(1, 2)], 2))]
    else:
        long_cycle = tuple(range(1, n + 1))
        generators = [("(12)", _perm([(1, 2)], n)),
                      ("(" + "".join(str(i) for i in long_cycle) + ")", _perm([long_cycle], n))]
    return FiniteGroup.from_permutations(generators, family="finite")


def alternating_group_4() -> FiniteGroup:
    """A4 generated by a 3-cycle and a double transposition."""
    return FiniteGroup.from_permutations(
        [("(123)", _perm([(1, 2, 3)], 4)), ("(12)(34)", _perm([(1, 2), (3, 4)], 4))]
    )


def dihedral_group(n: int = 4) -> FiniteGroup:
    """Symmetries of a regular n-gon with rotation "r" and reflection "s"."""
    rotation = _perm([tuple(range(1, n + 1))], n)
    # reflection fixing vertex 1
    reflection = tuple((-i) % n for i in range(n))
    return FiniteGroup.from_permutations([("r", rotation), ("s", reflection)])


def cyclic_group(n: int) -> FiniteGroup:
    """Z/n with generator "1"; element i is the residue i, named str(i)."""
    if n < 1:
        raise Unsupported(f"Cyclic group order must be positive, got {n}")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, [("1", 1 % n)], names=[str(i) for i in range(n)])


def elementary_abelian_group(copies: int) -> FiniteGroup:
    """
    (Z/2)^N with generators x1..xN.

    Element m is the bitmask whose bit n-1 is the coordinate of copy n; its
    name lists the coordinates copy 1 first ("100" is x1 in (Z/2)^3).
    """
    if copies < 1:
        raise Unsupported("At least one copy of Z/2 is needed")
    order = 2 ** copies
    table = [[i ^ j for j in range(order)] for i in range(order)]
    names = ["".join(str((m >> k) & 1) for k in range(copies)) for m in range(order)]
    return FiniteGroup(table, [(f"x{k + 1}", 1 << k) for k in range(copies)], names=names)


def lamplighter_group(m: int) -> FiniteGroup:
    """
    The truncated lamplighter Z/2 wr Z/m.

    Elements are (lamp configuration bitmask, cursor position); "a" toggles
    the lamp under the cursor and "t" moves the cursor. Order m * 2^m.
    """
    if m < 1:
        raise Unsupported("The lamplighter base needs at least one lamp")
    full = (1 << m) - 1

    def rotate(mask: int, shift: int) -> int:
        shift %= m
        return ((mask << shift) | (mask >> (m - shift))) & full if shift else mask

    def multiply(x, y):
        return (x[0] ^ rotate(y[0], x[1]), (x[1] + y[1]) % m)

    def name(x) -> str:
        return "".join(str((x[0] >> k) & 1) for k in range(m)) + f"@{x[1]}"

    return FiniteGroup.from_elements(
        [("a", (1, 0)), ("t", (0, 1 % m))], multiply, (0, 0),
        namer=name, family="finite",
    )


def lamp_element(group: FiniteGroup, position: int) -> int:
    """Index of the element lighting only lamp position (cursor at 0)."""
    for index, (mask, cursor) in enumerate(group.payload):
        if cursor == 0 and mask == 1 << position:
            return index
    raise Unsupported(f"No lamp at position {position}")


def trivial_group() -> FiniteGroup:
    """The group with one element, marked by a single trivial generator."""
    return cyclic_group(1)


def fixture_group(name: str) -> MarkedGroup:
    """
    Look up a named fixture.

    Recognized names: S2..S5, A4, D<n>, Z<n>, Z (integers), Z2xZ2, Z2^<N>,
    lamplighter<m> (or L<m>), F<k>, trivial.

    Raises:
        Unsupported: For unknown names
    """
    text = name.strip()
    if text == "Z":
        return integer_group()
    if text == "trivial":
        return trivial_group()
    if text == "A4":
        return alternating_group_4()
    if text == "Z2xZ2":
        return elementary_abelian_group(2)
    patterns = [
        (r"S([2-5])", lambda k: symmetric_group(k)),
        (r"D([3-9])", lambda k: dihedral_group(k)),
        (r"Z2\^(\d+)", lambda k: elementary_abelian_group(k)),
        (r"Z(\d+)", lambda k: cyclic_group(k)),
        (r"(?:lamplighter|L)(\d+)", lambda k: lamplighter_group(k)),
        (r"F(\d+)", lambda k: FreeGroup(k)),
    ]
    for pattern, build in patterns:
        match = re.fullmatch(pattern, text)
        if match:
            return build(int(match.group(1)))
    raise Unsupported(f"Unknown group fixture '{name}'")


def group_from_config(block: Dict[str, Any], base_dir: Optional[Union[str, Path]] = None) -> MarkedGroup:
    """
    Build the marked group described by a config ``group`` block.

    Args:
        block: Mapping with ``family`` and the family's keys:
            free: ``rank`` (and optional ``generators`` labels);
            fixture: ``name``;
            table: ``table_file`` and ``generators`` (label -> element index),
            optional ``names``.
        base_dir: Directory relative table files are resolved against

    Returns:
        MarkedGroup: The group

    Raises:
        ConfigInvalid: When required keys are missing or inconsistent
    """
    family = block.get('family')
    if family == "free":
        rank = block.get('rank', 2)
        labels = block.get('generators')
        if labels is not None and len(labels) != rank:
            raise ConfigInvalid("Number of generator labels must equal the rank",
                                field='group.generators')
        return FreeGroup(rank, labels)
    if family == "fixture":
        if 'name' not in block:
            raise ConfigInvalid("Fixture groups need a name", field='group.name')
        try:
            return fixture_group(str(block['name']))
        except Unsupported as e:
            raise ConfigInvalid(e.message, field='group.name')
    if family == "table":
        if 'table_file' not in block or 'generators' not in block:
            raise ConfigInvalid("Table groups need table_file and generators", field='group.table_file')
        path = Path(block['table_file'])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        generators = block['generators']
        if not isinstance(generators, dict):
            raise ConfigInvalid("Table generators must map labels to element indices",
                                field='group.generators')
        return FiniteGroup.from_table_csv(path, list(generators.items()), names=block.get('names'))
    raise ConfigInvalid(f"Unknown group family '{family}'; expected one of {list(GROUP_FAMILIES)}",
                        field='group.family')
