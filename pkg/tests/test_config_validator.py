#!/usr/bin/env python3
"""
Test Suite for Configuration Validation

Strict per-section schemas for experiment configs, dotted field names in
errors, cross-section checks and defaults.
"""

import sys
import unittest
from pathlib import Path

import yaml

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from utils.config_validator import EXPERIMENT_KINDS, ConfigValidator, default_logging_config
from utils.exceptions import ConfigInvalid

CONFIGS = Path(__file__).parent.parent / "configs"


def spectra_config(**parameters):
    params = {'indices': [4, 8]}
    params.update(parameters)
    return {'experiment': 'schreier-spectra', 'group': {'family': 'free', 'rank': 2}, 'parameters': params}


class TestConfigValidator(unittest.TestCase):
    """Test cases for ConfigValidator."""

    def setUp(self):
        self.validator = ConfigValidator()

    def test_shipped_configs_validate(self):
        paths = sorted(CONFIGS.glob("*.yaml"))
        self.assertGreater(len(paths), 0)
        for path in paths:
            with self.subTest(config=path.name):
                with open(path, 'r', encoding='utf-8') as f:
                    config = yaml.safe_load(f)
                is_valid, errors, _ = self.validator.validate(config)
                self.assertTrue(is_valid, errors)

    def test_every_kind_is_shipped(self):
        kinds = set()
        for path in CONFIGS.glob("*.yaml"):
            with open(path, 'r', encoding='utf-8') as f:
                kinds.add(yaml.safe_load(f)['experiment'])
        self.assertEqual(kinds, set(EXPERIMENT_KINDS))

    def test_minimal_config(self):
        is_valid, errors, warnings = self.validator.validate(spectra_config())
        self.assertTrue(is_valid, errors)
        self.assertEqual(warnings, [])

    def test_not_a_mapping(self):
        is_valid, errors, _ = self.validator.validate(["experiment"])
        self.assertFalse(is_valid)
        self.assertIn("mapping", errors[0])

    def test_missing_experiment(self):
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid({'seed': 1})
        self.assertEqual(ctx.exception.field, 'experiment')

    def test_unknown_experiment(self):
        is_valid, errors, _ = self.validator.validate({'experiment': 'spectra'})
        self.assertFalse(is_valid)
        self.assertTrue(errors[0].startswith("experiment:"))

    def test_unknown_keys_are_errors(self):
        config = spectra_config(radius=2)
        config['parameters']['radious'] = 3
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid(config)
        self.assertEqual(ctx.exception.field, 'parameters.radious')

    def test_bool_is_not_a_number(self):
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid(spectra_config(radius=True))
        self.assertEqual(ctx.exception.field, 'parameters.radius')

    def test_ranges(self):
        for params, field in (({'radius': 7}, 'parameters.radius'),
                              ({'tolerance': -1}, 'parameters.tolerance'),
                              ({'indices': [4, 0]}, 'parameters.indices[1]'),
                              ({'indices': []}, 'parameters.indices')):
            with self.subTest(field=field):
                with self.assertRaises(ConfigInvalid) as ctx:
                    self.validator.require_valid(spectra_config(**params))
                self.assertEqual(ctx.exception.field, field)

    def test_required_parameters(self):
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid({'experiment': 'irs-check', 'group': {'family': 'fixture', 'name': 'S3'}})
        self.assertEqual(ctx.exception.field, 'parameters.irs_file')

    def test_family_requirements(self):
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid({'experiment': 'haar-ratio', 'group': {'family': 'tree', 'arity': 2},
                                          'parameters': {'numerator': 'G', 'denominator': 'V1'}})
        self.assertEqual(ctx.exception.field, 'group.depth')

    def test_cross_section_checks(self):
        config = {'experiment': 'folner-search', 'group': {'family': 'free', 'rank': 2}}
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid(config)
        self.assertEqual(ctx.exception.field, 'group.family')

        config = {'experiment': 'cone-barycenter', 'group': {'family': 'orthogonal', 'name': 'klein-square'},
                  'parameters': {'body_file': 'square.body'}}
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid(config)
        self.assertEqual(ctx.exception.field, 'parameters.measure_file')

    def test_large_tree_warns(self):
        config = {'experiment': 'haar-ratio', 'group': {'family': 'tree', 'arity': 3, 'depth': 4},
                  'parameters': {'numerator': 'G', 'denominator': 'V1'}}
        is_valid, _, warnings = self.validator.validate(config)
        self.assertTrue(is_valid)
        self.assertEqual(len(warnings), 1)

    def test_logging_section(self):
        config = spectra_config()
        config['logging'] = {'level': 'LOUD'}
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid(config)
        self.assertEqual(ctx.exception.field, 'logging.level')

        config['logging'] = {'file': {'max_size_mb': 0}}
        with self.assertRaises(ConfigInvalid) as ctx:
            self.validator.require_valid(config)
        self.assertEqual(ctx.exception.field, 'logging.file.max_size_mb')


class TestDefaults(unittest.TestCase):

    def setUp(self):
        self.validator = ConfigValidator()

    def test_apply_defaults(self):
        config = self.validator.require_valid(spectra_config())
        self.assertEqual(config['seed'], 0)
        self.assertEqual(config['output_dir'], 'results')
        self.assertEqual(config['parameters']['family'], 'cycle')
        self.assertEqual(config['parameters']['radius'], 1)
        self.assertEqual(config['logging']['level'], 'INFO')
        self.assertFalse(config['logging']['file']['enabled'])

    def test_defaults_do_not_touch_input(self):
        original = spectra_config()
        self.validator.require_valid(original)
        self.assertNotIn('seed', original)
        self.assertNotIn('radius', original['parameters'])

    def test_explicit_values_win(self):
        config = self.validator.require_valid(spectra_config(radius=3))
        self.assertEqual(config['parameters']['radius'], 3)

    def test_default_logging_config(self):
        config = default_logging_config('DEBUG', 'verbose')
        self.assertEqual(config['level'], 'DEBUG')
        self.assertEqual(config['console']['detail_level'], 'verbose')
        self.assertTrue(config['console']['enabled'])


if __name__ == '__main__':
    unittest.main()
