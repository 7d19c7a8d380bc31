#!/usr/bin/env python3
"""
Test Suite for Exact Convex Hulls

Hulls of rational point sets in dimensions 1 to 3, their H-representations
and hyperplane slices.
"""

import sys
import unittest
from fractions import Fraction
from pathlib import Path

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from convex_hull import convex_hull, nullspace, row_reduce, slice_by_hyperplane, to_point
from utils.exceptions import DimensionMismatch, Unsupported, ValidationError

HALF = Fraction(1, 2)
SQUARE = [(sx * HALF, sy * HALF) for sx in (1, -1) for sy in (1, -1)]


class TestLinearAlgebra(unittest.TestCase):

    def test_row_reduce(self):
        basis, pivots = row_reduce([to_point([1, 2]), to_point([2, 4]), to_point([0, 1])])
        self.assertEqual(len(basis), 2)
        self.assertEqual(pivots, [0, 1])

    def test_nullspace(self):
        vectors = nullspace([to_point([1, 1, 0])], 3)
        self.assertEqual(len(vectors), 2)
        for v in vectors:
            self.assertEqual(v[0] + v[1], 0)

    def test_coordinates_must_be_exact(self):
        self.assertEqual(to_point(["1/3", 2]), (Fraction(1, 3), Fraction(2)))
        with self.assertRaises(ValidationError):
            to_point([0.5, 0])
        with self.assertRaises(ValidationError):
            to_point(["half", 0])


class TestConvexHull(unittest.TestCase):
    """Vertices and facets by affine dimension."""

    def test_single_point(self):
        vertices, hrep = convex_hull([(HALF, 0)])
        self.assertEqual(vertices, [(HALF, Fraction(0))])
        self.assertEqual(len(hrep.equalities), 2)
        self.assertTrue(hrep.contains((HALF, Fraction(0))))

    def test_collinear_points(self):
        vertices, hrep = convex_hull([(0, 0), (HALF, 0), (Fraction(1, 4), 0)])
        self.assertEqual(vertices, [(0, 0), (HALF, 0)])
        self.assertEqual(len(hrep.inequalities), 2)
        self.assertTrue(hrep.contains(to_point(["1/8", 0])))
        self.assertFalse(hrep.contains(to_point(["1/8", "1/8"])))

    def test_square_drops_interior_points(self):
        vertices, hrep = convex_hull(SQUARE + [(0, 0), (HALF, 0)])
        self.assertEqual(vertices, sorted(to_point(p) for p in SQUARE))
        self.assertEqual(len(hrep.inequalities), 4)
        self.assertTrue(hrep.contains(to_point([HALF, HALF])))
        self.assertFalse(hrep.contains(to_point([1, 0])))

    def test_cube(self):
        cube = [(sx * HALF, sy * HALF, sz * HALF) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]
        vertices, hrep = convex_hull(cube + [(0, 0, 0)])
        self.assertEqual(len(vertices), 8)
        self.assertEqual(len(hrep.inequalities), 6)
        self.assertEqual(hrep.equalities, ())

    def test_triangle_in_space(self):
        vertices, hrep = convex_hull([(0, 0, 0), (HALF, 0, 0), (0, HALF, 0)])
        self.assertEqual(len(vertices), 3)
        self.assertEqual(len(hrep.equalities), 1)
        self.assertFalse(hrep.contains(to_point([0, 0, "1/8"])))

    def test_errors(self):
        with self.assertRaises(ValidationError):
            convex_hull([])
        with self.assertRaises(DimensionMismatch):
            convex_hull([(0, 0), (0, 0, 0)])
        with self.assertRaises(Unsupported):
            convex_hull([(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])


class TestSlices(unittest.TestCase):

    def test_square_through_its_center(self):
        points = slice_by_hyperplane([to_point(p) for p in SQUARE], to_point([1, 0]))
        vertices, _ = convex_hull(points)
        self.assertEqual(vertices, [(0, -HALF), (0, HALF)])

    def test_slice_missing_the_body(self):
        self.assertEqual(slice_by_hyperplane([to_point(p) for p in SQUARE], to_point([1, 0]), Fraction(1)), [])


if __name__ == '__main__':
    unittest.main()
