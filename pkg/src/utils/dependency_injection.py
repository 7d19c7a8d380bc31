#!/usr/bin/env python3
"""
Service Container Module

The experiment runner, the self-test and the CLI resolve their config
validator, statistics collector, progress reporter and experiment handlers
from a DIContainer. Tests swap any of these by registering an instance under
the same key.
"""

import inspect
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Type, Union

try:
    from .interfaces import ProgressReporter
except ImportError:
    from utils.interfaces import ProgressReporter

logger = logging.getLogger(__name__)

HANDLER_PREFIX = 'handler:'

SINGLETON = 'singleton'
TRANSIENT = 'transient'
FACTORY = 'factory'

ServiceKey = Union[str, Type]


@dataclass
class Registration:
    """How one key is built. ``factory`` is None for plain instances."""
    lifetime: str
    factory: Optional[Callable] = None
    instance: Any = None
    built: bool = False


def service_key(interface: ServiceKey) -> str:
    """Registry key: strings as given, classes by qualified module path."""
    if isinstance(interface, str):
        return interface
    if hasattr(interface, '__name__'):
        return f"{interface.__module__}.{interface.__name__}"
    return str(interface)


class DIContainer:
    """
    Registry of run services.

    Classes are built with constructor injection: a parameter is filled from
    a keyword argument, then from a registration matching its annotation,
    then from its default, then from a registration matching its name.
    Other callables are invoked as ``factory(container, **kwargs)``.
    """

    def __init__(self):
        self._registry: Dict[str, Registration] = {}
        self._in_progress: set = set()

    def _register(self, interface: ServiceKey, registration: Registration) -> 'DIContainer':
        key = service_key(interface)
        self._registry[key] = registration
        logger.debug(f"Registered {registration.lifetime}: {key}")
        return self

    def register_singleton(self, interface: ServiceKey, implementation: Any) -> 'DIContainer':
        """One shared instance; ``implementation`` may be a class, a factory or an instance."""
        if callable(implementation):
            return self._register(interface, Registration(SINGLETON, factory=implementation))
        return self.register_instance(interface, implementation)

    def register_transient(self, interface: ServiceKey, implementation: Callable) -> 'DIContainer':
        """A fresh instance on every resolve."""
        return self._register(interface, Registration(TRANSIENT, factory=implementation))

    def register_factory(self, interface: ServiceKey, factory: Callable) -> 'DIContainer':
        """``factory(container, **kwargs)`` called on every resolve."""
        return self._register(interface, Registration(FACTORY, factory=factory))

    def register_instance(self, interface: ServiceKey, instance: Any) -> 'DIContainer':
        return self._register(interface, Registration(SINGLETON, instance=instance, built=True))

    def clear_cache(self) -> 'DIContainer':
        """Forget singletons built from factories; registered instances stay."""
        for registration in self._registry.values():
            if registration.factory is not None and registration.built:
                registration.instance = None
                registration.built = False
        return self

    def is_registered(self, interface: ServiceKey) -> bool:
        return service_key(interface) in self._registry

    def get_registered_services(self) -> Dict[str, str]:
        """Registered keys mapped to their lifetimes."""
        return {key: registration.lifetime for key, registration in self._registry.items()}

    def resolve(self, interface: ServiceKey, **kwargs) -> Any:
        """
        Build or return the service registered under ``interface``.

        Raises:
            ValueError: The key is not registered, or resolving it needs itself
        """
        key = service_key(interface)
        registration = self._registry.get(key)
        if registration is None:
            raise ValueError(f"Service not registered: {key}")
        if key in self._in_progress:
            raise ValueError(f"Circular dependency detected for {key}")

        if registration.lifetime == SINGLETON and registration.built:
            return registration.instance

        self._in_progress.add(key)
        try:
            instance = self._build(registration.factory, **kwargs)
        finally:
            self._in_progress.discard(key)

        if registration.lifetime == SINGLETON:
            registration.instance = instance
            registration.built = True
        return instance

    def _build(self, factory: Callable, **kwargs) -> Any:
        if not isinstance(factory, type):
            return factory(self, **kwargs)

        arguments = {}
        for name, param in inspect.signature(factory.__init__).parameters.items():
            if name == 'self' or param.kind in (param.VAR_POSITIONAL, param.VAR_KEYWORD):
                continue
            if name in kwargs:
                arguments[name] = kwargs[name]
            elif param.annotation is not param.empty and self.is_registered(param.annotation):
                arguments[name] = self.resolve(param.annotation)
            elif param.default is not param.empty:
                continue
            elif self.is_registered(name):
                arguments[name] = self.resolve(name)
            else:
                logger.warning(f"Could not resolve parameter '{name}' for {factory.__name__}")
        return factory(**arguments)

    def handler_for(self, kind: str) -> Any:
        """The handler registered for an experiment kind."""
        key = HANDLER_PREFIX + kind
        if key not in self._registry:
            raise ValueError(f"No handler registered for experiment '{kind}'")
        return self.resolve(key)


class ServiceProvider(ABC):
    """Fills a container with services."""

    @abstractmethod
    def configure_services(self, container: DIContainer):
        pass


class TqdmProgressReporter(ProgressReporter):
    """Progress bars on stderr; with ``enabled`` False the bar is silent."""

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self.pbar = None

    def start(self, total: int, description: str = "Processing"):
        from tqdm import tqdm
        self.pbar = tqdm(total=total, desc=description, disable=not self.enabled, leave=False)

    def update(self, amount: int = 1):
        if self.pbar is not None:
            self.pbar.update(amount)

    def finish(self):
        if self.pbar is not None:
            self.pbar.close()
            self.pbar = None

    def set_description(self, description: str):
        if self.pbar is not None:
            self.pbar.set_description(description)


class DefaultServiceProvider(ServiceProvider):
    """
    The irs-lab services: a shared validator, statistics collector and
    ``irs_lab`` logger, a new progress reporter per resolve, and one
    transient handler per experiment kind under ``handler:<kind>``.
    """

    def __init__(self, show_progress: bool = True):
        self.show_progress = show_progress

    def configure_services(self, container: DIContainer):
        try:
            from .config_validator import ConfigValidator
            from .statistics import StatisticsCollector
        except ImportError:
            from utils.config_validator import ConfigValidator
            from utils.statistics import StatisticsCollector

        container.register_singleton('config_validator', lambda c: ConfigValidator())
        container.register_singleton('statistics', lambda c: StatisticsCollector())
        container.register_singleton('logger', lambda c: logging.getLogger('irs_lab'))
        container.register_transient('progress_reporter', lambda c: TqdmProgressReporter(self.show_progress))

        for handler_class in self._handler_classes():
            container.register_transient(HANDLER_PREFIX + handler_class.kind, handler_class)

    @staticmethod
    def _handler_classes():
        try:
            from ..experiment_runner import HANDLER_CLASSES
        except (ImportError, ValueError):
            from experiment_runner import HANDLER_CLASSES
        return HANDLER_CLASSES


_container: Optional[DIContainer] = None


def get_container() -> DIContainer:
    """The process-wide container, built with the default services on first use."""
    global _container
    if _container is None:
        _container = configure_container(DefaultServiceProvider())
    return _container


def configure_container(provider: ServiceProvider) -> DIContainer:
    """Replace the process-wide container with one filled by ``provider``."""
    global _container
    _container = DIContainer()
    provider.configure_services(_container)
    return _container


def reset_container():
    global _container
    _container = None
