#!/usr/bin/env python3
"""
Test Suite for the Self-Test Runner

Module filtering, failing and raising criteria, the written report and its
CSV tables, and reproducibility of whole self-test reports.
"""

import json
import sys
import tempfile
import unittest
from pathlib import Path
from statistics import median
from unittest.mock import patch

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from selftest import (
    CRITERIA, DETERMINISM_SELFTEST_MODULE, MODULES, RANDOM_FAMILY_CSV, CheckOutcome, Criterion, SelfTest,
    check_determinism, check_klein_pipeline, check_random_family, serialized_report
)
from utils.exceptions import ConfigInvalid, ValidationError


def passing():
    return CheckOutcome(True, "ok")


def failing():
    return CheckOutcome(False, "off by one", {'expected': 1})


def raising():
    raise ValidationError("bad input")


def crashing():
    raise ZeroDivisionError("division by zero")


def tabulating():
    return CheckOutcome(True, "ok", tables={'values.csv': (["n", "value"], [[1, "1/2"], [2, None]])})


class TestCriteria(unittest.TestCase):

    def test_numbering(self):
        self.assertEqual([c.number for c in CRITERIA], list(range(1, len(CRITERIA) + 1)))

    def test_every_criterion_has_a_module(self):
        for criterion in CRITERIA:
            self.assertIn(criterion.module, MODULES)
        self.assertEqual({c.module for c in CRITERIA}, set(MODULES))

    def test_klein_pipeline(self):
        outcome = check_klein_pipeline()
        self.assertTrue(outcome.passed, outcome.detail)


class TestSelfTestRunner(unittest.TestCase):
    """SelfTest with stand-in criteria."""

    def setUp(self):
        self.criteria = [
            Criterion(1, "passing", "spectral", passing),
            Criterion(2, "failing", "tdlc", failing),
            Criterion(3, "raising", "irs", raising),
            Criterion(4, "crashing", "irs", crashing),
        ]
        self.selftest = SelfTest(show_progress=False, criteria=self.criteria)

    def test_select(self):
        self.assertEqual(len(self.selftest.select()), 4)
        self.assertEqual([c.name for c in self.selftest.select("irs")], ["raising", "crashing"])
        self.assertEqual(self.selftest.select("cli"), [])
        with self.assertRaises(ConfigInvalid) as ctx:
            self.selftest.select("geometry")
        self.assertEqual(ctx.exception.field, 'filter')

    def test_filtered_run_passes(self):
        report = self.selftest.run("spectral")
        self.assertTrue(report.passed)
        self.assertEqual(report.config, {'filter': "spectral"})
        self.assertEqual(report.results['counters']['criteria_passed'], 1)

    def test_failures_are_report_content(self):
        report = self.selftest.run()
        self.assertFalse(report.passed)
        by_name = {item['name']: item for item in report.results['criteria']}
        self.assertTrue(by_name['passing']['passed'])
        self.assertEqual(by_name['failing']['data'], {'expected': 1})
        self.assertEqual(by_name['raising']['error'], "ValidationError: bad input")
        self.assertTrue(by_name['crashing']['error'].startswith("ZeroDivisionError"))
        self.assertEqual(report.results['counters']['criteria_failed'], 3)

    def test_report_file(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            report = self.selftest.run("tdlc", temp_dir)
            self.assertEqual(report.artifacts, ["report.json"])
            with open(Path(temp_dir) / "report.json", 'r', encoding='utf-8') as f:
                payload = json.load(f)
        self.assertEqual(payload['experiment'], 'selftest')
        self.assertFalse(payload['passed'])
        self.assertEqual(payload['results']['criteria'][0]['detail'], "off by one")

    def test_tables_are_written_as_csv(self):
        selftest = SelfTest(show_progress=False, criteria=[Criterion(1, "tabulating", "spectral", tabulating)])
        with tempfile.TemporaryDirectory() as temp_dir:
            report = selftest.run(output_dir=temp_dir)
            lines = (Path(temp_dir) / "values.csv").read_text(encoding='utf-8').splitlines()
        self.assertEqual(report.artifacts, ["values.csv", "report.json"])
        self.assertEqual(lines, ["n,value", "1,1/2", "2,"])
        self.assertEqual(report.results['criteria'][0]['tables'], ["values.csv"])

    def test_tables_need_an_output_dir(self):
        selftest = SelfTest(show_progress=False, criteria=[Criterion(1, "tabulating", "spectral", tabulating)])
        self.assertEqual(selftest.run().artifacts, [])


class TestRandomFamilyCriterion(unittest.TestCase):
    """Both BS radii are reported at index 200; only radius 1 gates."""

    @patch('selftest.RANDOM_SEEDS', range(1, 4))
    def test_both_radii_are_reported(self):
        outcome = check_random_family()
        short, wide = outcome.data['bs_distance_at_200'], outcome.data['bs_distance_at_200_R2']
        self.assertEqual(len(short), 3)
        self.assertEqual(len(wide), 3)
        self.assertEqual(outcome.data['median_bs_distance'], median(short))
        self.assertEqual(outcome.data['median_bs_distance_R2'], median(wide))
        for r1, r2 in zip(short, wide):
            self.assertGreaterEqual(r2, r1)
        self.assertIn("at R=2", outcome.detail)

        header, rows = outcome.tables[RANDOM_FAMILY_CSV]
        self.assertEqual(header, ["seed", "rho0", "bs_distance_R1", "bs_distance_R2"])
        self.assertEqual([row[0] for row in rows], [1, 2, 3])
        self.assertEqual([row[2] for row in rows], short)
        self.assertEqual([row[3] for row in rows], wide)


class TestReproducibility(unittest.TestCase):
    """Two self-test runs serialize to the same report.json text."""

    def test_selftest_reports_are_identical(self):
        first = serialized_report(SelfTest(show_progress=False).run(DETERMINISM_SELFTEST_MODULE))
        second = serialized_report(SelfTest(show_progress=False).run(DETERMINISM_SELFTEST_MODULE))
        self.assertEqual(first, second)
        payload = json.loads(first)
        self.assertNotIn('wall_clock_seconds', payload)
        self.assertEqual(payload['experiment'], 'selftest')
        self.assertTrue(payload['results']['criteria'])

    def test_reports_with_failures_are_identical(self):
        criteria = [Criterion(1, "failing", "tdlc", failing), Criterion(2, "raising", "irs", raising)]
        reports = [serialized_report(SelfTest(show_progress=False, criteria=criteria).run()) for _ in range(2)]
        self.assertEqual(reports[0], reports[1])

    def test_determinism_criterion_compares_selftest_reports(self):
        outcome = check_determinism()
        self.assertTrue(outcome.passed, outcome.detail)
        self.assertEqual(outcome.data['selftest_module'], DETERMINISM_SELFTEST_MODULE)
        self.assertTrue(outcome.data['selftest_identical'])
        self.assertNotEqual(DETERMINISM_SELFTEST_MODULE, 'cli')



if __name__ == '__main__':
    unittest.main()
