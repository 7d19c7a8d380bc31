#!/usr/bin/env python3
"""
Test Suite for Tree Groups

Truncated automorphism groups of rooted trees, level stabilizers, coset
unions with their Haar ratios and the finite-depth Følner search.
"""

import random
import sys
import unittest
from fractions import Fraction
from pathlib import Path

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from tree_groups import (
    CosetUnion, FolnerCertificate, FolnerExhaustion, RootedTreeGroup, brute_force_folner,
    coset_decomposition, coset_union, folner_certificate_check, folner_search, haar_ratio,
    level_constant_subgroup, level_stabilizer, named_tree_subgroup, odometer, subgroup_as_coset_union,
    subgroup_from_generators, whole_tree_group
)
from utils.exceptions import (
    DepthOutOfRange, EmptySet, GroupTooLarge, MalformedCertificate, NotACosetUnion, RepNotInSubgroup,
    ValidationError
)


class TestRootedTreeGroup(unittest.TestCase):
    """Leaf permutations and portraits of the binary tree of depth 2."""

    def setUp(self):
        self.T = RootedTreeGroup(2, 2)
        self.root_swap = self.T.vertex_element(0, 0, (1, 0))

    def test_order(self):
        self.assertEqual(self.T.leaves, 4)
        self.assertEqual(self.T.order, 8)
        self.assertEqual(RootedTreeGroup(3, 2).order, 6 ** 4)

    def test_invalid_shapes(self):
        with self.assertRaises(ValidationError):
            RootedTreeGroup(1, 2)
        with self.assertRaises(DepthOutOfRange):
            RootedTreeGroup(2, 0)
        with self.assertRaises(DepthOutOfRange):
            self.T.check_level(3)

    def test_root_swap(self):
        self.assertEqual(self.root_swap, (2, 3, 0, 1))
        self.assertEqual(self.T.element_name(self.root_swap), "10 | 01,01")
        self.assertEqual(self.T.level_action(self.root_swap, 1), (1, 0))
        self.assertEqual(self.T.multiply(self.root_swap, self.root_swap), self.T.identity())

    def test_tree_structure_is_checked(self):
        self.assertTrue(self.T.contains_element(self.root_swap))
        self.assertFalse(self.T.contains_element((1, 2, 0, 3)))
        self.assertFalse(self.T.contains_element((0, 1, 2)))

    def test_portrait_round_trip(self):
        T = RootedTreeGroup(3, 2)
        rng = random.Random(11)
        for _ in range(20):
            g = T.random_element(rng)
            self.assertTrue(T.contains_element(g))
            self.assertEqual(T.from_portrait(T.portrait(g)), g)
            self.assertEqual(T.parse_element(T.element_name(g)), g)

    def test_bad_portrait(self):
        with self.assertRaises(ValidationError):
            self.T.from_portrait([[(0, 0)], [(0, 1), (0, 1)]])
        with self.assertRaises(ValidationError):
            self.T.from_portrait([[(0, 1)]])

    def test_inverse(self):
        g = self.T.product([self.root_swap, self.T.vertex_element(1, 0, (1, 0))])
        self.assertEqual(self.T.multiply(g, self.T.inverse(g)), self.T.identity())

    def test_enumeration_cap(self):
        with self.assertRaises(GroupTooLarge):
            list(RootedTreeGroup(2, 5).enumerate_from_level(0))


class TestTreeSubgroups(unittest.TestCase):

    def setUp(self):
        self.T = RootedTreeGroup(2, 2)
        self.G = whole_tree_group(self.T)

    def test_level_stabilizers(self):
        self.assertEqual([level_stabilizer(self.T, i).order() for i in range(3)], [8, 4, 1])
        self.assertTrue(level_stabilizer(self.T, 1).normal)
        self.assertEqual(level_stabilizer(RootedTreeGroup(3, 2), 1).order(), 216)

    def test_named_subgroups(self):
        self.assertTrue(named_tree_subgroup(self.T, "G").same_as(self.G))
        self.assertEqual(named_tree_subgroup(self.T, "V1").order(), 4)
        self.assertEqual(named_tree_subgroup(self.T, "V_2").order(), 1)
        self.assertEqual(named_tree_subgroup(self.T, "diagonal").order(), 4)
        self.assertEqual(named_tree_subgroup(self.T, "odometer").order(), 4)

    def test_unknown_names(self):
        with self.assertRaises(ValidationError):
            named_tree_subgroup(self.T, "W")
        with self.assertRaises(DepthOutOfRange):
            named_tree_subgroup(self.T, "V5")

    def test_odometer(self):
        self.assertEqual(odometer(self.T), (2, 3, 1, 0))

    def test_coset_counts(self):
        diagonal = level_constant_subgroup(self.T)
        self.assertEqual(diagonal.coset_count(1), 2)
        self.assertEqual(diagonal.level_order(1), 2)
        self.assertEqual(diagonal.level_subgroup(1).order(), 2)
        self.assertEqual(self.G.coset_count(2), 8)

    def test_large_group_uses_schreier_sims(self):
        big = whole_tree_group(RootedTreeGroup(2, 5))
        self.assertFalse(big.is_enumerable)
        self.assertEqual(big.order(), 2 ** 31)
        self.assertEqual(big.coset_count(1), 2)
        self.assertEqual(big.coset_count(3), 2 ** 7)
        with self.assertRaises(GroupTooLarge):
            big.element_set()


class TestCosetUnions(unittest.TestCase):
    """Coset decompositions and Haar ratios."""

    def setUp(self):
        self.T = RootedTreeGroup(2, 2)
        self.G = whole_tree_group(self.T)
        self.root_swap = self.T.vertex_element(0, 0, (1, 0))

    def test_translate_and_refine(self):
        u = coset_union(self.G, 1, [self.T.identity()])
        moved = u.translate(self.root_swap)
        self.assertEqual(moved.keys, frozenset([(1, 0)]))
        self.assertEqual(len(u.symmetric_difference(moved)), 2)
        self.assertEqual(len(u.refine(2)), 4)
        with self.assertRaises(ValidationError):
            u.refine(2).refine(1)

    def test_representative_must_be_in_ambient(self):
        diagonal = level_constant_subgroup(self.T)
        with self.assertRaises(RepNotInSubgroup):
            coset_union(diagonal, 1, [self.T.vertex_element(1, 0, (1, 0))])

    def test_decomposition(self):
        V1 = level_stabilizer(self.T, 1)
        union, reps = coset_decomposition(V1.elements(), 1, self.G)
        self.assertEqual(reps, [self.T.identity()])
        self.assertEqual(len(union), 1)

    def test_partial_coset(self):
        with self.assertRaises(NotACosetUnion) as ctx:
            coset_decomposition([self.T.identity()], 1, self.G)
        self.assertEqual(ctx.exception.witness, "01 | 01,01")

    def test_haar_ratios(self):
        whole = coset_union(self.G, 0, [self.T.identity()])
        V1 = subgroup_as_coset_union(level_stabilizer(self.T, 1))
        V2 = subgroup_as_coset_union(level_stabilizer(self.T, 2))
        self.assertEqual(haar_ratio(whole, V1), 2)
        self.assertEqual(haar_ratio(V1, V2), 4)
        # multiplicative through the intermediate subgroup
        self.assertEqual(haar_ratio(whole, V2), haar_ratio(whole, V1) * haar_ratio(V1, V2))

    def test_level_stabilizers_are_recognized_by_level(self):
        V1 = level_stabilizer(self.T, 1)
        self.assertEqual(V1.stabilizer_level, 1)
        V1.label = "renamed"
        union = subgroup_as_coset_union(V1)
        self.assertEqual(union.level, 1)
        self.assertEqual(union.keys, frozenset([self.T.level_identity(1)]))

        lookalike = subgroup_from_generators(self.T, V1.generators, label="V_2")
        self.assertIsNone(lookalike.stabilizer_level)
        decomposed = subgroup_as_coset_union(lookalike)
        self.assertEqual(decomposed.level, self.T.depth)
        self.assertEqual(haar_ratio(decomposed, union), 1)

        intersection = self.G.level_subgroup(1)
        self.assertIsNone(intersection.stabilizer_level)
        self.assertEqual(haar_ratio(subgroup_as_coset_union(intersection), union), 1)

    def test_index_of_diagonal(self):
        whole = coset_union(self.G, 0, [self.T.identity()])
        diagonal = subgroup_as_coset_union(level_constant_subgroup(self.T))
        self.assertEqual(len(diagonal), 4)
        self.assertEqual(haar_ratio(diagonal, whole), Fraction(1, 2))

    def test_empty_union(self):
        whole = coset_union(self.G, 0, [self.T.identity()])
        with self.assertRaises(EmptySet):
            haar_ratio(CosetUnion(self.G, 1, frozenset()), whole)


class TestFolnerSearch(unittest.TestCase):
    """Følner sets at finite depth and their certificates."""

    def setUp(self):
        self.T = RootedTreeGroup(2, 2)
        self.G = whole_tree_group(self.T)
        self.diagonal = level_constant_subgroup(self.T)
        self.level_one = self.T.vertex_generators(1)

    def test_certificate_below_the_root(self):
        result = folner_search(self.G, self.level_one, 1, allow_whole=False)
        self.assertIsInstance(result, FolnerCertificate)
        self.assertEqual(result.level, 1)
        self.assertEqual(result.H, [self.T.identity()])
        self.assertEqual(result.worst_ratio, 0)
        self.assertTrue(folner_certificate_check(result, self.G, self.level_one, 1))
        self.assertEqual(brute_force_folner(self.G, self.level_one, 1, allow_whole=False), (1, 1, Fraction(0)))

    def test_diagonal_exhausts_without_whole_group(self):
        gens = list(self.diagonal.generators)
        result = folner_search(self.diagonal, gens, 2, allow_whole=False)
        self.assertIsInstance(result, FolnerExhaustion)
        self.assertEqual(result.candidates_tried, 16)
        self.assertEqual(result.best_ratio, Fraction(2, 3))
        self.assertEqual(result.best_level, 2)
        self.assertEqual(result.to_dict(self.T)['best_ratio'], "2/3")
        self.assertFalse(result.to_dict(self.T)['found'])
        self.assertIsNone(brute_force_folner(self.diagonal, gens, 2, allow_whole=False))

    def test_whole_group_is_trivially_folner(self):
        result = folner_search(self.diagonal, list(self.diagonal.generators), 2)
        self.assertIsInstance(result, FolnerCertificate)
        self.assertEqual(result.level, 0)
        data = result.to_dict(self.T)
        self.assertEqual(data['H'], ["01 | 01,01"])
        self.assertEqual(data['worst_ratio'], "0/1")

    def test_wrong_certificate_fails_check(self):
        claimed = FolnerCertificate(1, [self.T.identity()], Fraction(0), 1, 2)
        root_swap = self.T.vertex_element(0, 0, (1, 0))
        self.assertFalse(folner_certificate_check(claimed, self.G, [root_swap], 1))

    def test_malformed_certificates(self):
        identity = self.T.identity()
        inside_v1 = self.level_one[0]
        for certificate in (FolnerCertificate(5, [identity], Fraction(0), 1, 2),
                            FolnerCertificate(1, [], Fraction(0), 1, 2),
                            FolnerCertificate(1, [identity, inside_v1], Fraction(0), 1, 2)):
            with self.subTest(certificate=certificate):
                with self.assertRaises(MalformedCertificate):
                    folner_certificate_check(certificate, self.G, self.level_one, 1)

    def test_bad_arguments(self):
        with self.assertRaises(ValidationError):
            folner_search(self.G, self.level_one, 0)
        with self.assertRaises(RepNotInSubgroup):
            folner_search(self.diagonal, [self.T.vertex_element(1, 0, (1, 0))], 2)


if __name__ == '__main__':
    unittest.main()
