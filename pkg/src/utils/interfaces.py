#!/usr/bin/env python3
"""
Interfaces and Abstractions Module

Abstract base classes shared by the experiment runner, the self-test and the
service container, the per-run ExperimentContext and the logging mixin.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

ValidationResult = Tuple[bool, List[str], List[str]]  # (is_valid, errors, warnings)


class ExperimentHandler(ABC):
    """
    One experiment kind. Handlers are resolved from the container under
    ``handler:<kind>`` and receive a validated context.
    """

    #: Experiment kind handled, as written in the config
    kind: str = ""

    @abstractmethod
    def run(self, context: "ExperimentContext") -> Dict[str, Any]:
        """
        Run the experiment described by the context.

        Returns:
            Dict[str, Any]: Result payload placed under ``results`` in the report
        """

    @abstractmethod
    def parameter_names(self) -> List[str]:
        """Allowed keys of the ``parameters`` section."""


class ProgressReporter(ABC):
    """Progress over family members, trials and criteria."""

    @abstractmethod
    def start(self, total: int, description: str = "Processing"):
        pass

    @abstractmethod
    def update(self, amount: int = 1):
        pass

    @abstractmethod
    def finish(self):
        pass

    @abstractmethod
    def set_description(self, description: str):
        pass


class ConfigSchemaValidator(ABC):
    """Validation of experiment configs against section schemas."""

    @abstractmethod
    def validate(self, config: Any) -> ValidationResult:
        """Return (is_valid, errors, warnings) without raising."""

    @abstractmethod
    def apply_defaults(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """Return a copy of ``config`` with every schema default filled in."""


class ExperimentContext:
    """Everything a handler needs for one run."""

    def __init__(self, config: Dict[str, Any], output_dir: Path, base_dir: Path,
                 progress: ProgressReporter, statistics: Any):
        self.config = config
        self.output_dir = output_dir
        self.base_dir = base_dir
        self.progress = progress
        self.statistics = statistics
        self.artifacts: List[Path] = []

    @property
    def seed(self) -> int:
        return self.config['seed']

    @property
    def parameters(self) -> Dict[str, Any]:
        return self.config.get('parameters', {})

    def resolve_path(self, value: Union[str, Path]) -> Path:
        """Paths in the config are relative to the config file."""
        path = Path(value)
        return path if path.is_absolute() else self.base_dir / path

    def add_artifact(self, path: Path):
        self.artifacts.append(path)
        self.statistics.increment('artifacts_written')


class LoggerMixin:
    """Adds a ``logger`` named after the concrete class."""

    @property
    def logger(self) -> logging.Logger:
        if not hasattr(self, '_logger'):
            self._logger = logging.getLogger(self.__class__.__module__ + '.' + self.__class__.__name__)
        return self._logger
