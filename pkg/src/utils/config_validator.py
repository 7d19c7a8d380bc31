#!/usr/bin/env python3
"""
Configuration Validator Module

This module validates irs-lab experiment configs. Validation is strict:
unknown keys are errors, each message names the dotted field it concerns,
and defaults are applied only after a config validates.
"""

import copy
import logging
from typing import Any, Dict, List, Optional

try:
    from .exceptions import ConfigInvalid
    from .interfaces import ConfigSchemaValidator, ValidationResult
except ImportError:
    from utils.exceptions import ConfigInvalid
    from utils.interfaces import ConfigSchemaValidator, ValidationResult

EXPERIMENT_KINDS = (
    'schreier-spectra',
    'bs-convergence',
    'irs-check',
    'folner-search',
    'haar-ratio',
    'cone-barycenter',
    'radical-check',
)

GROUP_FAMILIES = ('free', 'fixture', 'table', 'orthogonal', 'tree')

LOG_LEVELS = ['TRACE', 'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
DETAIL_LEVELS = ['minimal', 'standard', 'detailed', 'verbose', 'debug']

MAX_SEED = 2 ** 64 - 1
NUMBER = (int, float)


class ConfigValidator(ConfigSchemaValidator):
    """
    Validates experiment configurations against per-section schemas.
    """

    def __init__(self):
        """Initialize the configuration validator."""
        self.logger = logging.getLogger(__name__)
        self.errors: List[str] = []
        self.warnings: List[str] = []
        self.fields: List[str] = []

        self.schema = {
            'experiment': {'type': str, 'required': True, 'choices': list(EXPERIMENT_KINDS)},
            'seed': {'type': int, 'min': 0, 'max': MAX_SEED, 'default': 0},
            'output_dir': {'type': str, 'default': 'results'},
            'group': {'type': dict, 'required': False},
            'parameters': {'type': dict, 'required': False},
            'logging': {'type': dict, 'required': False},
        }

        self.group_schema = {
            'family': {'type': str, 'required': True, 'choices': list(GROUP_FAMILIES)},
            'rank': {'type': int, 'min': 1, 'max': 8},
            'generators': {'type': (list, dict)},
            'name': {'type': str},
            'table_file': {'type': str},
            'names': {'type': list},
            'matrices': {'type': dict},
            'arity': {'type': int, 'min': 2, 'max': 5},
            'depth': {'type': int, 'min': 1, 'max': 6},
        }

        family_schema = {
            'family': {'type': str, 'choices': ['cycle', 'random'], 'default': 'cycle'},
            'indices': {'type': list, 'required': True},
            'radius': {'type': int, 'min': 1, 'max': 6, 'default': 1},
            'tolerance': {'type': NUMBER, 'min': 0, 'default': 1e-9},
            'rho_tolerance': {'type': NUMBER, 'min': 0, 'default': 1e-10},
            'cayley_radius': {'type': int, 'min': 1, 'max': 60, 'default': 14},
            'window': {'type': int, 'min': 1, 'default': 3},
        }

        # parameters section, one schema per experiment kind
        self.parameter_schemas: Dict[str, Dict[str, Dict[str, Any]]] = {
            'schreier-spectra': dict(family_schema),
            'bs-convergence': dict(family_schema, trials={'type': int, 'min': 1, 'max': 1000, 'default': 1}),
            'irs-check': {
                'irs_file': {'type': str, 'required': True},
                'index_bound': {'type': int, 'min': 1},
            },
            'folner-search': {
                'n': {'type': int, 'min': 1, 'default': 2},
                'subgroup': {'type': str, 'default': 'G'},
                'test_set': {'type': str, 'choices': ['dense', 'generators'], 'default': 'dense'},
                'test_level': {'type': int, 'min': 0},
                'allow_whole': {'type': bool, 'default': True},
                'max_subset': {'type': int, 'min': 1, 'max': 16, 'default': 8},
                'brute_force': {'type': bool, 'default': False},
            },
            'haar-ratio': {
                'numerator': {'type': str, 'required': True},
                'denominator': {'type': str, 'required': True},
                'via': {'type': str},
            },
            'cone-barycenter': {
                'body_file': {'type': str, 'required': True},
                'measure_file': {'type': str},
                'irs_file': {'type': str},
                'render': {'type': bool, 'default': True},
            },
            'radical-check': {
                'irs_file': {'type': str, 'required': True},
                'body_file': {'type': str},
            },
        }

        self.logging_schema = {
            'level': {'type': str, 'choices': LOG_LEVELS, 'default': 'INFO'},
            'console': {'type': dict},
            'file': {'type': dict},
            'json_logging': {'type': dict},
        }

        self.console_schema = {
            'enabled': {'type': bool, 'default': True},
            'level': {'type': str, 'choices': LOG_LEVELS},
            'detail_level': {'type': str, 'choices': DETAIL_LEVELS, 'default': 'minimal'},
        }

        self.file_schema = {
            'enabled': {'type': bool, 'default': False},
            'path': {'type': str, 'default': 'logs/irs_lab.log'},
            'level': {'type': str, 'choices': LOG_LEVELS},
            'detail_level': {'type': str, 'choices': DETAIL_LEVELS},
            'max_size_mb': {'type': int, 'min': 1, 'max': 1000, 'default': 10},
            'backup_count': {'type': int, 'min': 0, 'max': 20, 'default': 5},
        }

        self.json_schema = {
            'enabled': {'type': bool, 'default': False},
            'path': {'type': str, 'default': 'logs/irs_lab.jsonl'},
            'level': {'type': str, 'choices': LOG_LEVELS},
            'max_size_mb': {'type': int, 'min': 1, 'max': 1000, 'default': 50},
            'backup_count': {'type': int, 'min': 0, 'max': 20, 'default': 3},
            'include_extra_fields': {'type': bool, 'default': True},
        }

    def validate(self, config: Any) -> ValidationResult:
        """
        Validate a configuration dictionary.

        Args:
            config (Dict[str, Any]): Configuration to validate

        Returns:
            Tuple[bool, List[str], List[str]]: (is_valid, errors, warnings)
        """
        self.errors = []
        self.warnings = []
        self.fields = []

        if not isinstance(config, dict):
            self._error('', f"Configuration must be a mapping, got {type(config).__name__}")
            return False, self.errors.copy(), self.warnings.copy()

        self._validate_section(config, self.schema, '')

        kind = config.get('experiment')
        if isinstance(config.get('group'), dict):
            self._validate_group(config['group'])
        if isinstance(config.get('parameters'), dict) and kind in self.parameter_schemas:
            self._validate_section(config['parameters'], self.parameter_schemas[kind], 'parameters')
        elif kind in self.parameter_schemas:
            self._require_keys({}, self.parameter_schemas[kind], 'parameters')
        if isinstance(config.get('logging'), dict):
            self._validate_logging(config['logging'])

        self._cross_validate(config)

        is_valid = len(self.errors) == 0
        return is_valid, self.errors.copy(), self.warnings.copy()

    def require_valid(self, config: Any) -> Dict[str, Any]:
        """
        Validate and apply defaults in one step.

        Raises:
            ConfigInvalid: With the first offending field and all messages
        """
        is_valid, errors, warnings = self.validate(config)
        for warning in warnings:
            self.logger.warning(f"Configuration warning: {warning}")
        if not is_valid:
            raise ConfigInvalid(f"Invalid configuration: {'; '.join(errors)}",
                                field=self.fields[0] or None, errors=errors)
        return self.apply_defaults(config)

    def _error(self, field: str, message: str):
        self.fields.append(field)
        self.errors.append(f"{field}: {message}" if field else message)

    @staticmethod
    def _path(section: str, key: str) -> str:
        return f"{section}.{key}" if section else key

    def _require_keys(self, section_config: Dict[str, Any], schema: Dict[str, Any], section: str):
        for key, key_schema in schema.items():
            if key_schema.get('required', False) and key not in section_config:
                self._error(self._path(section, key), "required key is missing")

    def _validate_section(self, section_config: Dict[str, Any], schema: Dict[str, Any], section: str):
        """Validate one mapping; unknown keys are errors."""
        self._require_keys(section_config, schema, section)
        for key, value in section_config.items():
            field = self._path(section, str(key))
            if key not in schema:
                self._error(field, f"unknown key (allowed: {', '.join(sorted(schema))})")
                continue

            key_schema = schema[key]
            expected_type = key_schema['type']
            # bool is an int subclass; never accept it where a number is expected
            if isinstance(value, bool) and expected_type is not bool and bool not in (
                    expected_type if isinstance(expected_type, tuple) else (expected_type,)):
                self._error(field, f"must be of type {self._type_name(expected_type)}, got bool")
                continue
            if not isinstance(value, expected_type):
                self._error(field, f"must be of type {self._type_name(expected_type)}, got {type(value).__name__}")
                continue

            if 'choices' in key_schema and value not in key_schema['choices']:
                self._error(field, f"must be one of {key_schema['choices']}, got '{value}'")

            if 'min' in key_schema and isinstance(value, NUMBER) and value < key_schema['min']:
                self._error(field, f"must be >= {key_schema['min']}, got {value}")

            if 'max' in key_schema and isinstance(value, NUMBER) and value > key_schema['max']:
                self._error(field, f"must be <= {key_schema['max']}, got {value}")

    @staticmethod
    def _type_name(expected_type) -> str:
        if isinstance(expected_type, tuple):
            return " or ".join(t.__name__ for t in expected_type)
        return expected_type.__name__

    def _validate_group(self, group: Dict[str, Any]):
        self._validate_section(group, self.group_schema, 'group')
        family = group.get('family')
        needed = {
            'fixture': ['name'],
            'table': ['table_file', 'generators'],
            'tree': ['arity', 'depth'],
        }.get(family, [])
        for key in needed:
            if key not in group:
                self._error(f"group.{key}", f"required for family '{family}'")
        if family == 'orthogonal' and 'matrices' not in group and 'name' not in group:
            self._error('group.matrices', "orthogonal groups need matrices or a fixture name")

    def _validate_logging(self, log_config: Dict[str, Any]):
        self._validate_section(log_config, self.logging_schema, 'logging')
        for key, schema in (('console', self.console_schema), ('file', self.file_schema),
                            ('json_logging', self.json_schema)):
            if isinstance(log_config.get(key), dict):
                self._validate_section(log_config[key], schema, f"logging.{key}")

    def _cross_validate(self, config: Dict[str, Any]):
        """Checks that span sections."""
        kind = config.get('experiment')
        params = config.get('parameters') if isinstance(config.get('parameters'), dict) else {}
        group = config.get('group') if isinstance(config.get('group'), dict) else None
        family = group.get('family') if group else None

        if kind in ('schreier-spectra', 'bs-convergence'):
            if family not in (None, 'free'):
                self._error('group.family', f"{kind} runs on free groups")
            indices = params.get('indices')
            if isinstance(indices, list):
                if not indices:
                    self._error('parameters.indices', "must not be empty")
                for i, n in enumerate(indices):
                    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                        self._error(f"parameters.indices[{i}]", f"must be a positive integer, got {n!r}")
        if kind in ('folner-search', 'haar-ratio') and family != 'tree':
            self._error('group.family', f"{kind} needs a rooted tree group (family 'tree')")
        if kind in ('irs-check', 'radical-check') and group is None:
            self._error('group', f"{kind} needs a group block")
        if kind == 'cone-barycenter':
            if ('measure_file' in params) == ('irs_file' in params):
                self._error('parameters.measure_file', "give exactly one of measure_file and irs_file")
            if 'irs_file' in params and family != 'orthogonal':
                self._error('group.family', "pushing an IRS forward needs an orthogonal group")
        if kind == 'radical-check' and 'body_file' in params and family != 'orthogonal':
            self._error('group.family', "the fix-set pipeline needs an orthogonal group")
        if family == 'tree' and isinstance(group.get('arity'), int) and isinstance(group.get('depth'), int):
            if group['arity'] ** group['depth'] > 64:
                self.warnings.append("group: trees with more than 64 leaves only support generator-given subgroups")

    def apply_defaults(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """
        Apply default values to missing configuration options.

        Args:
            config (Dict[str, Any]): Validated configuration

        Returns:
            Dict[str, Any]: Deep copy of the configuration with defaults applied
        """
        result = copy.deepcopy(config)
        for key, key_schema in self.schema.items():
            if 'default' in key_schema and key not in result:
                result[key] = key_schema['default']

        kind = result.get('experiment')
        if kind in self.parameter_schemas:
            self._apply_section_defaults(result, 'parameters', self.parameter_schemas[kind])

        self._apply_section_defaults(result, 'logging', self.logging_schema)
        log_config = result['logging']
        for key, schema in (('console', self.console_schema), ('file', self.file_schema),
                            ('json_logging', self.json_schema)):
            self._apply_section_defaults(log_config, key, schema)
        return result

    @staticmethod
    def _apply_section_defaults(config: Dict[str, Any], section_name: str, schema: Dict[str, Any]):
        """Apply default values to a configuration section."""
        section = config.setdefault(section_name, {})
        for key, key_schema in schema.items():
            if 'default' in key_schema and key not in section:
                section[key] = key_schema['default']


def default_logging_config(level: str = 'INFO', detail_level: Optional[str] = None) -> Dict[str, Any]:
    """Logging section with defaults, for commands that run without a config file."""
    validator = ConfigValidator()
    config = validator.apply_defaults({'experiment': EXPERIMENT_KINDS[0],
                                       'logging': {'level': level}})['logging']
    if detail_level:
        config['console']['detail_level'] = detail_level
    return config
