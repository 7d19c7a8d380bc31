#!/usr/bin/env python3
"""
Test Suite for Folded Graphs

Stallings folding, coset tables, fiber products and coset enumeration.
"""

import sys
import unittest
from pathlib import Path

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from folded_graphs import enumerate_cosets, fold_words, graph_from_table, product_graph
from group_core import FreeGroup
from utils.exceptions import ClosureExceedsBound, IncompleteTable, ValidationError

A, A_INV, B, B_INV = (0, 1), (0, -1), (1, 1), (1, -1)

# index-3 normal subgroup: a and b both rotate the three cosets
CYCLIC_ROWS = [[1, 2, 1, 2], [2, 0, 2, 0], [0, 1, 0, 1]]
# kernels of the a-parity and the b-parity maps onto Z/2
A_PARITY_ROWS = [[1, 1, 0, 0], [0, 0, 1, 1]]
B_PARITY_ROWS = [[0, 0, 1, 1], [1, 1, 0, 0]]


class TestFolding(unittest.TestCase):
    """Core graphs from generating words."""

    def setUp(self):
        self.F2 = FreeGroup(2)

    def test_trivial_subgroup(self):
        graph = fold_words(self.F2, [(A, A_INV)])
        self.assertEqual(graph.size, 1)
        self.assertEqual(graph.rank(), 0)

    def test_whole_group(self):
        graph = fold_words(self.F2, [(A,), (B,)])
        self.assertEqual(graph.size, 1)
        self.assertTrue(graph.is_complete())
        self.assertEqual(graph.schreier_generators(self.F2), [(A,), (B,)])

    def test_redundant_generator_folds_away(self):
        self.assertEqual(fold_words(self.F2, [(A, A)]), fold_words(self.F2, [(A, A), (A, A, A, A)]))

    def test_conjugate_keeps_its_stem(self):
        graph = fold_words(self.F2, [(A, B, A_INV)])
        self.assertEqual(graph.size, 2)
        self.assertEqual(graph.rank(), 1)
        self.assertEqual(graph.trace((A, B, A_INV)), 0)
        self.assertIsNone(graph.trace((B,)))

    def test_incomplete_graph_has_no_table(self):
        with self.assertRaises(IncompleteTable):
            fold_words(self.F2, [(A, B, A_INV)]).table_rows()


class TestCosetTables(unittest.TestCase):
    """Complete graphs read from coset-table rows."""

    def setUp(self):
        self.F2 = FreeGroup(2)
        self.letters = self.F2.letters()

    def test_index_three(self):
        graph = graph_from_table(self.letters, CYCLIC_ROWS)
        self.assertTrue(graph.is_complete())
        self.assertEqual(graph.size, 3)
        # Schreier index formula: 1 + 3 (2 - 1)
        self.assertEqual(graph.rank(), 4)
        self.assertEqual(graph.table_rows(), CYCLIC_ROWS)

    def test_normal_subgroup_rebases_to_itself(self):
        graph = graph_from_table(self.letters, CYCLIC_ROWS)
        self.assertEqual(graph.rebased(1), graph)

    def test_entry_out_of_range(self):
        with self.assertRaises(IncompleteTable):
            graph_from_table(self.letters, [[5, 0, 0, 0]])

    def test_inverse_columns_must_match(self):
        with self.assertRaises(ValidationError):
            graph_from_table(self.letters, [[1, 0, 0, 0], [0, 1, 1, 1]])

    def test_table_must_be_transitive(self):
        with self.assertRaises(ValidationError):
            graph_from_table(self.letters, [[0, 0, 0, 0], [1, 1, 1, 1]])

    def test_product_of_parity_kernels(self):
        first = graph_from_table(self.letters, A_PARITY_ROWS)
        second = graph_from_table(self.letters, B_PARITY_ROWS)
        meet = product_graph(self.F2, first, second)
        self.assertTrue(meet.is_complete())
        self.assertEqual(meet.size, 4)


class TestCosetEnumeration(unittest.TestCase):
    """Enumeration in the presentation <a, b | a^3, b^2, (ab)^2> of S3."""

    def setUp(self):
        self.F2 = FreeGroup(2)
        self.relators = [(A, A, A), (B, B), (A, B, A, B)]

    def test_regular_action(self):
        graph = enumerate_cosets(self.F2, self.relators, [], index_bound=10)
        self.assertTrue(graph.is_complete())
        self.assertEqual(graph.size, 6)

    def test_point_stabilizer(self):
        graph = enumerate_cosets(self.F2, self.relators, [(B,)], index_bound=10)
        self.assertEqual(graph.size, 3)

    def test_index_bound(self):
        with self.assertRaises(ClosureExceedsBound):
            enumerate_cosets(self.F2, self.relators, [], index_bound=5)


if __name__ == '__main__':
    unittest.main()
