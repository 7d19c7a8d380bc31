#!/usr/bin/env python3
"""
Utils Package

This package contains utility modules for the irs-lab application.
"""

from .statistics import StatisticsCollector, RunStatistics
from .exceptions import (
    IRSLabError, ConfigInvalid, SerializationError, ValidationError, Unsupported, Undecided,
    GroupTooLarge, BallTooLarge, ClosureExceedsBound, NotInvariant, handle_exception, format_error_report,
    CONFIGURATION_ERRORS, COMPUTATION_LIMIT_ERRORS, DECISION_ERRORS, ALL_IRS_LAB_ERRORS
)
from .config_validator import ConfigValidator, default_logging_config
from .interfaces import (
    ExperimentHandler, ProgressReporter, ConfigSchemaValidator, ExperimentContext, LoggerMixin
)
from .structured_logging import (
    IRSLabLogger, LoggerManager, JSONFormatter, HumanReadableFormatter,
    TRACE, DetailLevel, setup_structured_logging
)

__all__ = [
    # Statistics
    'StatisticsCollector', 'RunStatistics',
    # Configuration
    'ConfigValidator', 'default_logging_config',
    # Exceptions
    'IRSLabError', 'ConfigInvalid', 'SerializationError', 'ValidationError', 'Unsupported', 'Undecided',
    'GroupTooLarge', 'BallTooLarge', 'ClosureExceedsBound', 'NotInvariant', 'handle_exception',
    'format_error_report', 'CONFIGURATION_ERRORS', 'COMPUTATION_LIMIT_ERRORS', 'DECISION_ERRORS',
    'ALL_IRS_LAB_ERRORS',
    # Interfaces and abstractions
    'ExperimentHandler', 'ProgressReporter', 'ConfigSchemaValidator', 'ExperimentContext', 'LoggerMixin',
    # Structured logging
    'IRSLabLogger', 'LoggerManager', 'JSONFormatter', 'HumanReadableFormatter',
    'TRACE', 'DetailLevel', 'setup_structured_logging'
]
