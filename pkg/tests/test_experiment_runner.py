#!/usr/bin/env python3
"""
Test Suite for the Experiment Runner

Runs the shipped configs and small inline configs into temporary output
directories and checks report.json, the CSV tables and the plots.
"""

import json
import os
import shutil
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from experiment_runner import OUTPUT_DIR_ENV, REPORT_FILE, ExperimentRunner, build_group
from utils.exceptions import ConfigInvalid, SerializationError

CONFIGS = Path(__file__).parent.parent / "configs"


class RunnerTestCase(unittest.TestCase):
    """Runs into a fresh temporary directory; the output override is cleared."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.env = patch.dict(os.environ)
        self.env.start()
        os.environ.pop(OUTPUT_DIR_ENV, None)
        self.runner = ExperimentRunner(show_progress=False)

    def tearDown(self):
        self.env.stop()
        shutil.rmtree(self.temp_dir)

    def run_shipped(self, name: str):
        raw = self.runner.load_config(CONFIGS / name)
        raw['output_dir'] = self.temp_dir
        return self.runner.run(raw, base_dir=CONFIGS)

    def run_inline(self, config):
        return self.runner.run(dict(config, output_dir=self.temp_dir))

    def read_report(self):
        with open(Path(self.temp_dir) / REPORT_FILE, 'r', encoding='utf-8') as f:
            return json.load(f)

    def read_csv(self, name: str):
        return (Path(self.temp_dir) / name).read_text(encoding='utf-8').splitlines()


class TestSpectraExperiments(RunnerTestCase):

    def config(self, **parameters):
        params = {'family': 'cycle', 'indices': [4, 8], 'radius': 1, 'cayley_radius': 6}
        params.update(parameters)
        return {'experiment': 'schreier-spectra', 'seed': 0, 'parameters': params}

    def test_cycle_family(self):
        report = self.run_inline(self.config())
        self.assertEqual(report.artifacts, ["spectra.csv", "spectra.svg"])
        self.assertLess(report.results['max_closed_form_error'], 1e-9)
        self.assertFalse(report.results['conclusion_observed'])

        lines = self.read_csv("spectra.csv")
        self.assertEqual(lines[0], "index,rho0,bs_distance_R1")
        self.assertTrue(lines[1].startswith("4,"))
        self.assertTrue(lines[1].endswith(",1/1"))

        payload = self.read_report()
        self.assertEqual(payload['experiment'], 'schreier-spectra')
        self.assertEqual(payload['schema_version'], 1)
        self.assertIn('wall_clock_seconds', payload)
        self.assertEqual(payload['results']['counters']['artifacts_written'], 2)

    def test_reruns_are_identical(self):
        config = dict(self.config(family='random', indices=[12, 24]), seed=5)
        self.run_inline(config)
        first = self.read_report()
        first_csv = self.read_csv("spectra.csv")
        self.run_inline(config)
        second = self.read_report()
        first.pop('wall_clock_seconds')
        second.pop('wall_clock_seconds')
        self.assertEqual(first, second)
        self.assertEqual(first_csv, self.read_csv("spectra.csv"))

    def test_bs_convergence(self):
        config = {'experiment': 'bs-convergence', 'seed': 3,
                  'parameters': {'family': 'random', 'indices': [10, 20], 'radius': 1,
                                 'cayley_radius': 6, 'trials': 2}}
        report = self.run_inline(config)
        self.assertEqual([trial['seed'] for trial in report.results['trials']], [3, 4])
        self.assertEqual(sorted(report.results['median_bs_distance']), ["10", "20"])
        self.assertEqual(report.artifacts, ["bs_convergence.csv", "bs_distance.svg"])
        self.assertEqual(len(self.read_csv("bs_convergence.csv")), 1 + 2 * 2)

    def test_output_dir_override(self):
        override = Path(self.temp_dir) / "override"
        os.environ[OUTPUT_DIR_ENV] = str(override)
        report = self.run_inline(self.config())
        self.assertEqual(report.config['output_dir'], str(override))
        self.assertTrue((override / REPORT_FILE).exists())


class TestGroupExperiments(RunnerTestCase):
    """The shipped IRS, tree and cone configs."""

    def test_irs_check(self):
        report = self.run_shipped("irs_s3.yaml")
        self.assertTrue(report.results['invariant'])
        self.assertTrue(report.results['spanning'])
        self.assertEqual(report.results['atoms'], 3)
        self.assertEqual(report.results['ergodic_components'], 1)
        self.assertEqual(self.read_csv("atoms.csv")[0], "atom,weight,index,component")

    def test_haar_ratio(self):
        report = self.run_shipped("haar_ratio.yaml")
        self.assertEqual(report.results['ratio'], 2)
        self.assertTrue(report.results['cocycle_holds'])
        self.assertEqual(self.read_report()['results']['ratio'], "2/1")
        self.assertEqual(self.read_csv("haar_ratio.csv"), ["numerator,denominator,ratio", "G,V1,2/1",
                                                           "G,V2,8/1", "V2,V1,1/4"])

    def test_folner_diagonal(self):
        report = self.run_shipped("folner_diagonal.yaml")
        outcome = report.results['outcome']
        self.assertFalse(outcome['found'])
        self.assertEqual(outcome['best_ratio'], "2/3")
        self.assertIsNone(report.results['brute_force'])
        self.assertEqual(self.read_csv("folner.csv")[1], "false,2,3,2/3")

    def test_cone_measure(self):
        report = self.run_shipped("cone_measure.yaml")
        self.assertEqual(report.results['verdict']['verdict'], "BarycenterProper")
        self.assertEqual(sorted(report.results['barycenter']),
                         [["-1/4", "-1/4"], ["-1/4", "1/4"], ["1/4", "-1/4"], ["1/4", "1/4"]])
        self.assertEqual(report.artifacts, ["barycenter.txt", "support.csv", "bodies.svg"])
        self.assertTrue((Path(self.temp_dir) / "barycenter.txt").read_text().startswith("body v1 2"))

    def test_cone_from_irs(self):
        report = self.run_shipped("cone_klein.yaml")
        self.assertTrue(report.results['pipeline']['passed'])
        self.assertEqual(report.results['atoms'], 2)

    def test_cone_over_quadratic_field(self):
        report = self.run_shipped("cone_hexagon.yaml")
        self.assertTrue(report.results['pipeline']['passed'])
        self.assertEqual(report.results['atoms'], 2)
        self.assertIn(["1/8", "(0+1√3)/8"], report.results['barycenter'])
        self.assertIn(["1/4", "0"], report.results['barycenter'])
        self.assertEqual(self.read_report()['results']['barycenter'], report.results['barycenter'])
        self.assertIn("vertex 1/8 (0+1√3)/8", self.read_csv("barycenter.txt"))

    def test_radical_check(self):
        report = self.run_shipped("radical_klein.yaml")
        self.assertTrue(report.results['radical']['is_amenable_irs'])
        self.assertTrue(report.results['radical']['theorem_consistent'])
        self.assertTrue(report.results['pipeline']['passed'])
        self.assertEqual(len(self.read_csv("radical.csv")), 5)


class TestRunnerErrors(RunnerTestCase):

    def test_invalid_config(self):
        with self.assertRaises(ConfigInvalid):
            self.run_inline({'experiment': 'haar-ratio'})

    def test_missing_config_file(self):
        with self.assertRaises(ConfigInvalid):
            self.runner.load_config(Path(self.temp_dir) / "missing.yaml")

    def test_bad_yaml(self):
        path = Path(self.temp_dir) / "bad.yaml"
        path.write_text("experiment: [unclosed\n", encoding='utf-8')
        with self.assertRaises(ConfigInvalid) as ctx:
            self.runner.load_config(path)
        self.assertIn("line", ctx.exception.message)

    def test_missing_input_file(self):
        config = {'experiment': 'cone-barycenter',
                  'parameters': {'body_file': 'missing.body', 'measure_file': 'missing.measure'}}
        with self.assertRaises(SerializationError):
            self.runner.run(dict(config, output_dir=self.temp_dir), base_dir=self.temp_dir)

    def test_unknown_orthogonal_fixture(self):
        with self.assertRaises(ConfigInvalid) as ctx:
            build_group({'family': 'orthogonal', 'name': 'cube'}, ".")
        self.assertEqual(ctx.exception.field, 'group.name')

    def test_group_block_required(self):
        with self.assertRaises(ConfigInvalid):
            build_group(None, ".")


if __name__ == '__main__':
    unittest.main()
