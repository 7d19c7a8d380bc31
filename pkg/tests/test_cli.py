#!/usr/bin/env python3
"""
Test Suite for the Command-Line Interface

Exit codes and outputs of the run, export-dot and version subcommands.
"""

import io
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest.mock import patch

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from experiment_runner import OUTPUT_DIR_ENV
from irs_lab import EXIT_CONFIG, EXIT_OK, VERSION, create_cli_parser, main

CONFIGS = Path(__file__).parent.parent / "configs"
DATA = Path(__file__).parent.parent / "data"


def run_cli(argv):
    """Run main with captured output; returns (code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class TestParser(unittest.TestCase):

    def test_global_flags(self):
        args = create_cli_parser().parse_args(['--log-level', 'DEBUG', '--no-progress', 'run', 'a.yaml'])
        self.assertEqual(args.log_level, 'DEBUG')
        self.assertTrue(args.no_progress)
        self.assertEqual(args.config, 'a.yaml')

    def test_unknown_filter_is_rejected(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                create_cli_parser().parse_args(['selftest', '--filter', 'geometry'])


class TestCommands(unittest.TestCase):
    """Each subcommand through main()."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.tmp = Path(self.temp_dir.name)

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_version(self):
        code, out, _ = run_cli(['version'])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), f"irs-lab {VERSION}")

    def test_run(self):
        with patch.dict(os.environ, {OUTPUT_DIR_ENV: str(self.tmp / "haar")}):
            code, out, _ = run_cli(['--no-progress', 'run', str(CONFIGS / "haar_ratio.yaml")])
        self.assertEqual(code, EXIT_OK)
        self.assertIn("haar_ratio.csv", out)
        self.assertTrue((self.tmp / "haar" / "report.json").exists())

    def test_invalid_config_exits_with_config_code(self):
        path = self.tmp / "bad.yaml"
        path.write_text("experiment: haar-ratio\nparameters:\n  numerator: G\n", encoding='utf-8')
        code, _, err = run_cli(['--no-progress', 'run', str(path)])
        self.assertEqual(code, EXIT_CONFIG)
        self.assertTrue(err)

    def test_missing_config_exits_with_config_code(self):
        code, _, _ = run_cli(['--no-progress', 'run', str(self.tmp / "missing.yaml")])
        self.assertEqual(code, EXIT_CONFIG)

    def test_export_dot_to_file(self):
        target = self.tmp / "cycle.dot"
        code, out, _ = run_cli(['--no-progress', 'export-dot', 'cycle:3', '-o', str(target)])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "")
        self.assertTrue(target.read_text(encoding='utf-8').startswith("digraph schreier {"))

    def test_export_dot_to_stdout(self):
        code, out, _ = run_cli(['--no-progress', 'export-dot', str(DATA / "f2_index3.subgroup")])
        self.assertEqual(code, EXIT_OK)
        self.assertIn("  2;", out)

    def test_malformed_graph_argument(self):
        for graph in ('cycle:x', 'cycle:0', 'random:5:1:2'):
            with self.subTest(graph=graph):
                code, _, _ = run_cli(['--no-progress', 'export-dot', graph])
                self.assertEqual(code, EXIT_CONFIG)


if __name__ == '__main__':
    unittest.main()
