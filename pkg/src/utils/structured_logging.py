#!/usr/bin/env python3
"""
Structured Logging Module

Console, rotating-file and JSON-lines logging for experiment runs and the
self-test. Run events carry their experiment, event and criterion fields as
structured data so JSON logs can be filtered per run.
"""

import json
import logging
import logging.handlers
import sys
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

TRACE = 5
logging.addLevelName(TRACE, "TRACE")

# extra fields promoted to the top level of JSON entries
RUN_FIELDS = ('experiment', 'event', 'criterion', 'passed', 'success')

_RECORD_ATTRIBUTES = frozenset(vars(logging.LogRecord('', 0, '', 0, '', None, None))) | {'message', 'asctime'}


class DetailLevel(Enum):
    """How much of each record the human-readable formatter prints."""
    MINIMAL = "minimal"
    STANDARD = "standard"
    DETAILED = "detailed"
    VERBOSE = "verbose"
    DEBUG = "debug"


_FORMATS = {
    DetailLevel.MINIMAL: "%(levelname)s: %(message)s",
    DetailLevel.STANDARD: "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    DetailLevel.DETAILED: "%(asctime)s - %(name)s - %(levelname)s - %(module)s:%(lineno)d - %(message)s",
    DetailLevel.VERBOSE: "%(asctime)s - %(name)s - %(levelname)s - %(module)s:%(funcName)s:%(lineno)d - %(message)s",
    DetailLevel.DEBUG: "%(asctime)s - %(name)s - %(levelname)s - %(pathname)s:%(funcName)s:%(lineno)d - %(message)s",
}


def level_value(name: str) -> int:
    """Numeric level for a configured level name, TRACE included."""
    name = name.upper()
    return TRACE if name == "TRACE" else getattr(logging, name)


def extra_fields(record: logging.LogRecord) -> Dict[str, Any]:
    """Attributes attached to a record through ``extra``."""
    return {k: v for k, v in record.__dict__.items() if k not in _RECORD_ATTRIBUTES}


class JSONFormatter(logging.Formatter):
    """One JSON object per line; run fields sit next to the message."""

    def __init__(self, include_extra: bool = True):
        super().__init__()
        self.include_extra = include_extra

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "line": record.lineno,
        }
        fields = extra_fields(record)
        for key in RUN_FIELDS:
            if key in fields:
                entry[key] = fields.pop(key)
        if self.include_extra and fields:
            entry["extra"] = fields
        if record.exc_info and record.exc_info[0] is not None:
            entry["exception"] = {
                "type": record.exc_info[0].__name__,
                "message": str(record.exc_info[1]),
                "traceback": self.formatException(record.exc_info),
            }
        return json.dumps(entry, default=str, ensure_ascii=False)


class HumanReadableFormatter(logging.Formatter):
    """
    Text formatter whose layout follows a detail level. At verbose and debug
    detail the structured fields are appended as ``[key=value | ...]``.
    """

    def __init__(self, detail_level: DetailLevel = DetailLevel.STANDARD):
        self.detail_level = detail_level
        super().__init__(_FORMATS[detail_level], datefmt='%Y-%m-%d %H:%M:%S')

    def format(self, record: logging.LogRecord) -> str:
        formatted = super().format(record)
        if self.detail_level in (DetailLevel.VERBOSE, DetailLevel.DEBUG):
            fields = extra_fields(record)
            if fields:
                formatted += " [" + " | ".join(f"{k}={v}" for k, v in fields.items()) + "]"
        return formatted


class IRSLabLogger:
    """
    Named logger configured from the ``logging`` section of a config.

    The console handler writes to stderr so stdout stays free for reports
    and DOT output.
    """

    def __init__(self, name: str, config: Optional[Dict[str, Any]] = None):
        self.name = name
        self.logger = logging.getLogger(name)
        self.configure(config or {})

    def configure(self, config: Dict[str, Any]):
        """Replace all handlers according to ``config``."""
        self.config = config
        for handler in list(self.logger.handlers):
            handler.close()
            self.logger.removeHandler(handler)
        self.logger.setLevel(level_value(config.get('level', 'INFO')))
        self.logger.propagate = False

        console = config.get('console', {})
        if console.get('enabled', True):
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(HumanReadableFormatter(DetailLevel(console.get('detail_level', 'minimal'))))
            handler.setLevel(level_value(console.get('level') or config.get('level', 'INFO')))
            self.logger.addHandler(handler)

        file_config = config.get('file', {})
        if file_config.get('enabled', False):
            formatter = HumanReadableFormatter(DetailLevel(file_config.get('detail_level') or 'detailed'))
            self._add_rotating_handler(file_config, 'logs/irs_lab.log', 10, 5, 'DEBUG', formatter)

        json_config = config.get('json_logging', {})
        if json_config.get('enabled', False):
            formatter = JSONFormatter(include_extra=json_config.get('include_extra_fields', True))
            self._add_rotating_handler(json_config, 'logs/irs_lab.jsonl', 50, 3, 'INFO', formatter)

    def _add_rotating_handler(self, section: Dict[str, Any], default_path: str, default_mb: int,
                              default_backups: int, default_level: str, formatter: logging.Formatter):
        path = Path(section.get('path') or default_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.handlers.RotatingFileHandler(
            path,
            maxBytes=section.get('max_size_mb', default_mb) * 1024 * 1024,
            backupCount=section.get('backup_count', default_backups),
            encoding='utf-8',
        )
        handler.setFormatter(formatter)
        handler.setLevel(level_value(section.get('level') or default_level))
        self.logger.addHandler(handler)

    def _log(self, level: int, message: str, **fields):
        if self.logger.isEnabledFor(level):
            self.logger.log(level, message, extra=fields)

    def log_experiment_event(self, experiment: str, event: str, success: bool = True,
                             duration: Optional[float] = None, **fields):
        """
        Lifecycle event of one run (started, finished, a failed step).

        Failures log at ERROR, everything else at INFO.
        """
        if duration is not None:
            fields['duration_seconds'] = duration
        message = f"{experiment}: {event}" + ("" if success else " failed")
        self._log(logging.INFO if success else logging.ERROR, message,
                  experiment=experiment, event=event, success=success, **fields)

    def log_criterion_result(self, criterion: str, passed: bool, detail: str = "", **fields):
        """One acceptance criterion; failures log at WARNING."""
        message = f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f" - {detail}" if detail else "")
        self._log(logging.INFO if passed else logging.WARNING, message,
                  criterion=criterion, passed=passed, **fields)

    def log_run_summary(self, counters: Dict[str, int], duration: Optional[float] = None):
        """Counters of a finished self-test or run."""
        passed = counters.get('criteria_passed', 0)
        failed = counters.get('criteria_failed', 0)
        message = f"Self-test complete: {passed}/{passed + failed} criteria passed"
        if duration is not None:
            message += f" in {duration:.2f} s"
        self._log(logging.INFO, message, event='summary', counters=counters)

    def log_performance_metric(self, metric_name: str, value: Union[int, float],
                               unit: Optional[str] = None, **fields):
        """Timings and sizes, at DEBUG."""
        message = f"{metric_name} = {value}" + (f" {unit}" if unit else "")
        self._log(logging.DEBUG, message, metric=metric_name, value=value, unit=unit, **fields)


class LoggerManager:
    """Registry of the named structured loggers."""

    _loggers: Dict[str, IRSLabLogger] = {}
    _config: Dict[str, Any] = {}

    @classmethod
    def get_logger(cls, name: str) -> IRSLabLogger:
        if name not in cls._loggers:
            cls._loggers[name] = IRSLabLogger(name, cls._config)
        return cls._loggers[name]

    @classmethod
    def configure_all_loggers(cls, config: Dict[str, Any]):
        cls._config = config
        for logger in cls._loggers.values():
            logger.configure(config)

    @classmethod
    def shutdown(cls):
        """Close every handler and forget the loggers."""
        for logger in cls._loggers.values():
            for handler in list(logger.logger.handlers):
                handler.close()
                logger.logger.removeHandler(handler)
        cls._loggers.clear()
        cls._config = {}


def setup_structured_logging(config: Dict[str, Any]) -> IRSLabLogger:
    """
    Configure the root logger and the ``irs_lab`` logger from a logging section.

    Library modules log through plain module loggers, which reach the
    handlers installed on the root logger.
    """
    LoggerManager.configure_all_loggers(config)
    LoggerManager.get_logger('')
    return LoggerManager.get_logger('irs_lab')
