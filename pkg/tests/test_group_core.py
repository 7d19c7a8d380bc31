#!/usr/bin/env python3
"""
Test Suite for Marked Groups

Covers word parsing and reduction in free groups, tabulated finite groups,
cycle notation, induced homomorphisms and the named fixtures.
"""

import sys
import tempfile
import unittest
from pathlib import Path

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from group_core import (
    FiniteGroup, FreeGroup, cycle_notation, evaluate_hom, integer_group, parse_cycles, quotient_image
)
from group_fixtures import (
    cyclic_group, dihedral_group, elementary_abelian_group, fixture_group, group_from_config,
    lamplighter_group, symmetric_group
)
from utils.exceptions import (
    BallTooLarge, ConfigInvalid, FamilyMismatch, NotAHomomorphism, SerializationError,
    UnknownGenerator, Unsupported, UnsupportedSource, ValidationError
)

A, A_INV, B, B_INV = (0, 1), (0, -1), (1, 1), (1, -1)


class TestFreeGroup(unittest.TestCase):
    """Word arithmetic in free groups."""

    def setUp(self):
        self.F2 = FreeGroup(2)

    def test_parse_word_with_both_inverse_suffixes(self):
        self.assertEqual(self.F2.parse_word("a⁻¹b"), [A_INV, B])
        self.assertEqual(self.F2.parse_word("a^-1 b"), [A_INV, B])
        self.assertEqual(self.F2.parse_word("e"), [])

    def test_unknown_generator(self):
        with self.assertRaises(UnknownGenerator):
            self.F2.parse_word("a c")

    def test_reduction_cancels(self):
        self.assertEqual(self.F2.reduce_word("a b b^-1 a^-1"), ())
        self.assertEqual(self.F2.multiply((A, B), (B_INV, A)), (A, A))

    def test_inverse(self):
        g = self.F2.reduce_word("a b^-1 a")
        self.assertEqual(self.F2.multiply(g, self.F2.inverse(g)), ())

    def test_contains_only_reduced_words(self):
        self.assertTrue(self.F2.contains_element((A, B)))
        self.assertFalse(self.F2.contains_element((A, A_INV)))
        with self.assertRaises(FamilyMismatch):
            self.F2.multiply((A, A_INV), ())

    def test_ball_sizes(self):
        self.assertEqual(self.F2.sphere_sizes(3), [1, 4, 12, 36])
        self.assertEqual(self.F2.ball_size(2), 17)
        self.assertEqual(len(self.F2.ball(2)), 17)

    def test_ball_is_shortlex_ordered(self):
        self.assertEqual(self.F2.ball(1), [(), (A,), (A_INV,), (B,), (B_INV,)])

    def test_ball_cap(self):
        with self.assertRaises(BallTooLarge):
            self.F2.ball(3, cap=10)

    def test_format_word(self):
        self.assertEqual(self.F2.format_word((A, B_INV)), "a b^-1")
        self.assertEqual(self.F2.format_word(()), "e")

    def test_integer_coordinates(self):
        z = integer_group()
        self.assertEqual(z.to_integer(z.from_integer(-3)), -3)
        with self.assertRaises(FamilyMismatch):
            self.F2.to_integer((A,))

    def test_invalid_labels(self):
        with self.assertRaises(ValidationError):
            FreeGroup(2, ["a", "a"])
        with self.assertRaises(ValidationError):
            FreeGroup(2, ["a"])


class TestFiniteGroup(unittest.TestCase):
    """Tabulated finite groups."""

    def setUp(self):
        self.S3 = symmetric_group(3)

    def test_order_and_names(self):
        self.assertEqual(self.S3.order, 6)
        self.assertEqual(sorted(self.S3.names), sorted(["e", "(12)", "(13)", "(23)", "(123)", "(132)"]))
        self.assertEqual(self.S3.identity(), 0)

    def test_composition_is_right_to_left(self):
        product = self.S3.element("(12)(13)")
        self.assertEqual(self.S3.element_name(product), "(132)")

    def test_element_order(self):
        self.assertEqual(self.S3.element_order(self.S3.element("(123)")), 3)
        self.assertEqual(self.S3.element_order(self.S3.element("(23)")), 2)

    def test_foreign_element(self):
        with self.assertRaises(FamilyMismatch):
            self.S3.multiply(0, 10)

    def test_generators_must_generate(self):
        table = [[(i + j) % 4 for j in range(4)] for i in range(4)]
        with self.assertRaises(ValidationError):
            FiniteGroup(table, [("x", 2)])

    def test_same_group(self):
        self.assertTrue(self.S3.same_group(symmetric_group(3)))
        self.assertFalse(self.S3.same_group(cyclic_group(6)))

    def test_table_csv_round_trip(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "d4.csv"
            D4 = dihedral_group(4)
            D4.to_table_csv(path)
            loaded = FiniteGroup.from_table_csv(path, list(zip(D4.generator_labels, D4.generator_elements)))
            self.assertEqual(loaded.table, D4.table)

    def test_table_csv_bad_header(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "bad.csv"
            path.write_text("a,b,c\n0,0,0\n")
            with self.assertRaises(SerializationError) as ctx:
                FiniteGroup.from_table_csv(path, [("x", 0)])
            self.assertEqual(ctx.exception.line, 1)


class TestCycleNotation(unittest.TestCase):

    def test_parse_and_print(self):
        perm = parse_cycles("(12)(13)", 3)
        self.assertEqual(perm, (2, 0, 1))
        self.assertEqual(cycle_notation(perm), "(132)")

    def test_identity(self):
        self.assertEqual(cycle_notation((0, 1, 2)), "e")
        self.assertEqual(parse_cycles("e", 3), (0, 1, 2))

    def test_commas_above_nine_points(self):
        perm = tuple([9] + list(range(1, 9)) + [0])
        self.assertEqual(cycle_notation(perm), "(1,10)")
        self.assertEqual(parse_cycles("(1,10)", 10), perm)


class TestHomomorphisms(unittest.TestCase):
    """Homomorphisms from free groups to finite groups."""

    def setUp(self):
        self.F2 = FreeGroup(2)
        self.S3 = symmetric_group(3)

    def test_evaluate(self):
        image = evaluate_hom(self.F2, {'a': "(12)", 'b': "(13)"}, "a b", self.S3)
        self.assertEqual(image, self.S3.element("(132)"))

    def test_missing_image(self):
        with self.assertRaises(NotAHomomorphism):
            evaluate_hom(self.F2, {'a': "(12)"}, "a", self.S3)

    def test_inconsistent_inverse(self):
        with self.assertRaises(NotAHomomorphism):
            evaluate_hom(self.F2, {'a': "(12)", 'a^-1': "(13)", 'b': "(13)"}, "a", self.S3)

    def test_unknown_image_label(self):
        with self.assertRaises(UnknownGenerator):
            evaluate_hom(self.F2, {'a': "(12)", 'b': "(13)", 'c': "e"}, "a", self.S3)

    def test_source_must_be_free(self):
        with self.assertRaises(UnsupportedSource):
            evaluate_hom(self.S3, {'(12)': "(12)", '(13)': "(13)"}, "(12)", self.S3)

    def test_quotient_image(self):
        self.assertEqual(quotient_image(self.F2, {'a': "(12)", 'b': "(13)"}, self.S3).order, 6)
        self.assertEqual(quotient_image(self.F2, {'a': "(12)", 'b': "(12)"}, self.S3).order, 2)


class TestFixtures(unittest.TestCase):

    def test_orders(self):
        expected = {"S3": 6, "S4": 24, "D4": 8, "Z4": 4, "A4": 12, "Z2xZ2": 4, "L3": 24, "Z2^3": 8}
        for name, order in expected.items():
            with self.subTest(name=name):
                self.assertEqual(fixture_group(name).order, order)

    def test_infinite_fixtures(self):
        self.assertEqual(fixture_group("Z").rank, 1)
        self.assertEqual(fixture_group("F3").rank, 3)

    def test_unknown_fixture(self):
        with self.assertRaises(Unsupported):
            fixture_group("Q8")

    def test_elementary_abelian_names(self):
        group = elementary_abelian_group(3)
        self.assertEqual(group.element_name(group.element("x1")), "100")

    def test_lamplighter_order(self):
        self.assertEqual(lamplighter_group(2).order, 8)

    def test_group_from_config(self):
        self.assertEqual(group_from_config({'family': 'fixture', 'name': 'A4'}).order, 12)
        self.assertEqual(group_from_config({'family': 'free', 'rank': 3}).rank, 3)
        with self.assertRaises(ConfigInvalid) as ctx:
            group_from_config({'family': 'fixture', 'name': 'nope'})
        self.assertEqual(ctx.exception.field, 'group.name')


if __name__ == '__main__':
    unittest.main()
