#!/usr/bin/env python3
"""
Test Suite for Subgroups and the Chabauty Space

Element-set subgroups of finite groups, coset tables and core graphs of
free groups, the operations between them and the dyadic Chabauty metric.
"""

import sys
import unittest
from fractions import Fraction
from pathlib import Path

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from group_core import FreeGroup, integer_group
from group_fixtures import fixture_group, symmetric_group
from subgroup_space import (
    BallFingerprint, CosetTable, ElementSet, amenable_flag, amenable_radical, chabauty_distance,
    conjugate, enumerate_subgroups, find_normal_generator, fingerprint, finite_index_subgroup,
    integer_subgroup, intersect_with, is_normal, is_subgroup_of, join, membership,
    minimal_normal_containing, normal_closure_of_set, preimage, project_subgroup, quotient_map,
    subgroup_generated, subgroup_rank, trivial_subgroup, whole_group
)
from utils.exceptions import NotNormal, Unsupported, ValidationError


class TestFiniteSubgroups(unittest.TestCase):
    """Subgroups of S3 and the oracle fixtures."""

    def setUp(self):
        self.S3 = symmetric_group(3)
        self.transposition = subgroup_generated(self.S3, ["(12)"])
        self.rotations = subgroup_generated(self.S3, ["(123)"])

    def test_subgroup_counts(self):
        expected = {"S3": 6, "S4": 30, "D4": 10, "Z4": 3, "A4": 10, "Z2xZ2": 5}
        for name, count in expected.items():
            with self.subTest(name=name):
                self.assertEqual(len(enumerate_subgroups(fixture_group(name))), count)

    def test_normal_subgroups_of_s3(self):
        normal = [H.order for H in enumerate_subgroups(self.S3) if is_normal(H)]
        self.assertEqual(normal, [1, 3, 6])

    def test_element_set_must_be_a_subgroup(self):
        with self.assertRaises(ValidationError):
            ElementSet(self.S3, [self.S3.identity(), self.S3.element("(12)"), self.S3.element("(13)")])
        with self.assertRaises(ValidationError):
            ElementSet(self.S3, [self.S3.element("(12)")])

    def test_conjugate(self):
        self.assertEqual(conjugate(self.transposition, "(13)"), subgroup_generated(self.S3, ["(23)"]))
        self.assertEqual(conjugate(self.rotations, "(13)"), self.rotations)

    def test_normal_closure(self):
        self.assertEqual(normal_closure_of_set(self.S3, ["(12)"]).order, 6)
        self.assertEqual(normal_closure_of_set(self.S3, ["(123)"]).order, 3)
        self.assertEqual(normal_closure_of_set(self.S3, []).order, 1)

    def test_quotient(self):
        q = quotient_map(self.rotations)
        self.assertEqual(q.target.order, 2)
        image = project_subgroup(self.transposition, self.rotations)
        self.assertEqual(image.order, 2)
        self.assertEqual(preimage(image, self.rotations).order, 6)

    def test_quotient_needs_normal_subgroup(self):
        with self.assertRaises(NotNormal):
            quotient_map(self.transposition)

    def test_lattice_operations(self):
        other = subgroup_generated(self.S3, ["(13)"])
        self.assertEqual(intersect_with(self.transposition, other).order, 1)
        self.assertEqual(join(self.transposition, other).order, 6)
        self.assertTrue(is_subgroup_of(trivial_subgroup(self.S3), self.transposition))
        self.assertFalse(is_subgroup_of(self.transposition, self.rotations))

    def test_normal_generator(self):
        g = find_normal_generator(self.S3, self.rotations)
        self.assertIsNotNone(g)
        self.assertEqual(normal_closure_of_set(self.S3, [g]), self.rotations)
        klein = fixture_group("Z2xZ2")
        self.assertIsNone(find_normal_generator(klein, whole_group(klein)))

    def test_minimal_normal_containing(self):
        self.assertEqual(minimal_normal_containing(self.S3, [self.transposition]).order, 6)
        self.assertEqual(minimal_normal_containing(self.S3, []).order, 1)

    def test_finite_groups_are_amenable(self):
        self.assertTrue(amenable_flag(self.transposition))
        self.assertEqual(amenable_radical(self.S3), whole_group(self.S3))

    def test_rank_needs_free_parent(self):
        with self.assertRaises(Unsupported):
            subgroup_rank(self.transposition)


class TestFreeSubgroups(unittest.TestCase):
    """Coset tables and core graphs in free groups."""

    def setUp(self):
        self.F2 = FreeGroup(2)
        self.S3 = symmetric_group(3)

    def test_kernel_is_normal(self):
        K = CosetTable.kernel(self.F2, {'a': "(12)", 'b': "(13)"}, self.S3)
        self.assertEqual(K.index(), 6)
        self.assertTrue(is_normal(K))
        self.assertEqual(subgroup_rank(K), 7)

    def test_point_stabilizer(self):
        H = CosetTable.from_permutations(self.F2, {'a': [1, 2, 0], 'b': [0, 2, 1]})
        self.assertEqual(H.index(), 3)
        self.assertFalse(is_normal(H))
        self.assertTrue(membership(H, "b"))
        self.assertFalse(membership(H, "a"))
        self.assertTrue(membership(conjugate(H, "a"), "a b a^-1"))

    def test_quotients_need_element_sets(self):
        K = CosetTable.kernel(self.F2, {'a': "(12)", 'b': "(13)"}, self.S3)
        H = subgroup_generated(self.F2, ["a b"])
        rotations = subgroup_generated(self.S3, ["(123)"])
        for subgroup, kernel in ((H, K), (K, K), (H, rotations)):
            with self.subTest(subgroup=type(subgroup).__name__, kernel=type(kernel).__name__):
                with self.assertRaises(Unsupported):
                    project_subgroup(subgroup, kernel)
        with self.assertRaises(Unsupported):
            preimage(H, rotations)

    def test_finite_index_subgroup(self):
        H = finite_index_subgroup(self.F2, ["a", "b b", "b a b^-1"], index_bound=10)
        self.assertEqual(H.index(), 2)

    def test_normal_closure_by_enumeration(self):
        N = normal_closure_of_set(self.F2, ["a a", "b b", "a b a^-1 b^-1"], index_bound=10)
        self.assertEqual(N.index(), 4)
        self.assertEqual(normal_closure_of_set(self.F2, ["a", "b"], index_bound=1), whole_group(self.F2))

    def test_normal_closure_needs_bound(self):
        with self.assertRaises(Unsupported):
            normal_closure_of_set(self.F2, ["a"])

    def test_amenability_rules(self):
        self.assertTrue(amenable_flag(subgroup_generated(self.F2, ["a b"])))
        self.assertFalse(amenable_flag(subgroup_generated(self.F2, ["a", "b a b^-1"])))
        self.assertFalse(amenable_flag(CosetTable.kernel(self.F2, {'a': "(12)", 'b': "(13)"}, self.S3)))
        self.assertEqual(amenable_radical(self.F2), trivial_subgroup(self.F2))


class TestIntegerSubgroups(unittest.TestCase):
    """nZ in the integers."""

    def setUp(self):
        self.Z = integer_group()

    def test_membership(self):
        H = integer_subgroup(3)
        self.assertEqual(H.index(), 3)
        self.assertTrue(membership(H, "t t t"))
        self.assertFalse(membership(H, "t^-1 t^-1"))

    def test_intersection_and_join(self):
        self.assertEqual(intersect_with(integer_subgroup(2), integer_subgroup(3)), integer_subgroup(6))
        self.assertEqual(join(integer_subgroup(2), integer_subgroup(3)), whole_group(self.Z))
        self.assertTrue(is_subgroup_of(integer_subgroup(4), integer_subgroup(2)))
        self.assertFalse(is_subgroup_of(integer_subgroup(2), integer_subgroup(4)))

    def test_subgroups_of_z_are_amenable(self):
        self.assertTrue(amenable_flag(integer_subgroup(5)))
        self.assertEqual(amenable_radical(self.Z), whole_group(self.Z))


class TestChabautyDistance(unittest.TestCase):

    def test_first_difference(self):
        d = chabauty_distance(integer_subgroup(2), integer_subgroup(4), 10)
        self.assertEqual(d.agreement_radius, 1)
        self.assertEqual(d.value, Fraction(1, 2))
        self.assertFalse(d.indistinguishable)

    def test_indistinguishable_up_to_radius(self):
        d = chabauty_distance(integer_subgroup(6), trivial_subgroup(integer_group()), 5)
        self.assertTrue(d.indistinguishable)
        self.assertEqual(d.value, 0)
        self.assertEqual(d.agreement_radius, 5)

    def test_radius_must_be_positive(self):
        with self.assertRaises(ValidationError):
            chabauty_distance(integer_subgroup(2), integer_subgroup(2), 0)

    def test_fingerprint_text(self):
        fp = fingerprint(integer_subgroup(2), 2)
        self.assertEqual(fp.bits, (True, False, False, True, True))
        self.assertEqual(fp.to_text(), "2 98")
        self.assertEqual(BallFingerprint.from_text("2 98", 5), fp)
        self.assertEqual(fp.set_count(), 3)


if __name__ == '__main__':
    unittest.main()
