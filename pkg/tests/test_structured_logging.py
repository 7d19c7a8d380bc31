#!/usr/bin/env python3
"""
Test Suite for Structured Logging

Formatters, handler configuration from a logging section and the run-event
helpers.
"""

import json
import logging
import sys
import tempfile
import unittest
from pathlib import Path

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from utils.config_validator import default_logging_config
from utils.structured_logging import (
    TRACE, DetailLevel, HumanReadableFormatter, IRSLabLogger, JSONFormatter, LoggerManager, level_value
)


def make_record(**fields) -> logging.LogRecord:
    record = logging.LogRecord('irs_lab', logging.INFO, __file__, 10, "rho_0 computed", None, None)
    record.__dict__.update(fields)
    return record


class TestFormatters(unittest.TestCase):

    def test_level_names(self):
        self.assertEqual(level_value('trace'), TRACE)
        self.assertEqual(level_value('WARNING'), logging.WARNING)
        self.assertEqual(logging.getLevelName(TRACE), "TRACE")

    def test_json_promotes_run_fields(self):
        entry = json.loads(JSONFormatter().format(make_record(experiment='haar-ratio', event='finished',
                                                              artifacts=2)))
        self.assertEqual(entry['message'], "rho_0 computed")
        self.assertEqual(entry['experiment'], 'haar-ratio')
        self.assertEqual(entry['event'], 'finished')
        self.assertEqual(entry['extra'], {'artifacts': 2})

    def test_json_without_extra(self):
        entry = json.loads(JSONFormatter(include_extra=False).format(make_record(artifacts=2)))
        self.assertNotIn('extra', entry)

    def test_human_readable_detail(self):
        minimal = HumanReadableFormatter(DetailLevel.MINIMAL).format(make_record(index=8))
        self.assertEqual(minimal, "INFO: rho_0 computed")
        verbose = HumanReadableFormatter(DetailLevel.VERBOSE).format(make_record(index=8))
        self.assertTrue(verbose.endswith("rho_0 computed [index=8]"))


class TestIRSLabLogger(unittest.TestCase):
    """Handlers built from a logging section, writing into a temporary directory."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.log_dir = Path(self.temp_dir.name)
        config = default_logging_config('DEBUG')
        config['console']['enabled'] = False
        config['json_logging'].update(enabled=True, level='DEBUG', path=str(self.log_dir / "run.jsonl"))
        config['file'].update(enabled=True, path=str(self.log_dir / "run.log"))
        self.logger = IRSLabLogger('irs_lab.test', config)

    def tearDown(self):
        self.logger.configure({'console': {'enabled': False}})
        self.temp_dir.cleanup()

    def read_entries(self):
        for handler in self.logger.logger.handlers:
            handler.flush()
        lines = (self.log_dir / "run.jsonl").read_text(encoding='utf-8').splitlines()
        return [json.loads(line) for line in lines]

    def test_handlers(self):
        self.assertEqual(len(self.logger.logger.handlers), 2)
        self.assertFalse(self.logger.logger.propagate)

    def test_experiment_events(self):
        self.logger.log_experiment_event('irs-check', 'started', seed=3)
        self.logger.log_experiment_event('irs-check', 'run', success=False, error="not invariant")
        started, failed = self.read_entries()
        self.assertEqual(started['level'], 'INFO')
        self.assertEqual(started['extra'], {'seed': 3})
        self.assertEqual(failed['level'], 'ERROR')
        self.assertFalse(failed['success'])
        self.assertIn("irs-check: run failed", (self.log_dir / "run.log").read_text(encoding='utf-8'))

    def test_criterion_and_summary(self):
        self.logger.log_criterion_result("5. Følner certificates", False, "1/3 found")
        self.logger.log_run_summary({'criteria_passed': 9, 'criteria_failed': 1}, 2.5)
        criterion, summary = self.read_entries()
        self.assertEqual(criterion['level'], 'WARNING')
        self.assertEqual(criterion['message'], "[FAIL] 5. Følner certificates - 1/3 found")
        self.assertEqual(summary['message'], "Self-test complete: 9/10 criteria passed in 2.50 s")

    def test_performance_metric_is_debug(self):
        self.logger.log_performance_metric('wall_clock', 0.25, 's')
        self.assertEqual(self.read_entries()[0]['level'], 'DEBUG')
        self.logger.configure(dict(self.logger.config, level='INFO'))
        self.logger.log_performance_metric('wall_clock', 0.5, 's')
        self.assertEqual(len(self.read_entries()), 1)


class TestLoggerManager(unittest.TestCase):

    def tearDown(self):
        LoggerManager.shutdown()

    def test_loggers_are_shared_and_reconfigured(self):
        first = LoggerManager.get_logger('irs_lab.manager')
        self.assertIs(first, LoggerManager.get_logger('irs_lab.manager'))
        LoggerManager.configure_all_loggers({'level': 'WARNING', 'console': {'enabled': False}})
        self.assertEqual(first.logger.level, logging.WARNING)
        self.assertEqual(first.logger.handlers, [])


if __name__ == '__main__':
    unittest.main()
