#!/usr/bin/env python3
"""
Test Suite for Dependency Injection Container and Run Services

This module contains tests for the service container the experiment runner
resolves its validator, statistics, progress reporter and handlers from.
"""

import unittest
import tempfile
from pathlib import Path
from unittest.mock import Mock
import sys

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from experiment_runner import HANDLER_CLASSES, ExperimentRunner, HaarRatioHandler
from utils.config_validator import EXPERIMENT_KINDS, ConfigValidator
from utils.dependency_injection import (
    DIContainer, DefaultServiceProvider, TqdmProgressReporter, configure_container, get_container,
    reset_container
)
from utils.exceptions import ConfigInvalid, IRSLabError, SerializationError
from utils.interfaces import ExperimentContext
from utils.statistics import StatisticsCollector


class TestDIContainer(unittest.TestCase):
    """Test cases for the Dependency Injection Container."""

    def setUp(self):
        """Set up test fixtures."""
        self.container = DIContainer()

    def test_register_singleton(self):
        """Test singleton registration and resolution."""
        class TestService:
            def __init__(self):
                self.value = "test"

        self.container.register_singleton('test_service', TestService)

        # Should return same instance
        instance1 = self.container.resolve('test_service')
        instance2 = self.container.resolve('test_service')

        self.assertIs(instance1, instance2)
        self.assertEqual(instance1.value, "test")

    def test_register_transient(self):
        """Test transient registration and resolution."""
        class TestService:
            def __init__(self):
                self.value = "test"

        self.container.register_transient('test_service', TestService)

        instance1 = self.container.resolve('test_service')
        instance2 = self.container.resolve('test_service')

        self.assertIsNot(instance1, instance2)
        self.assertEqual(instance2.value, "test")

    def test_register_factory(self):
        """Factories receive the container and any keyword arguments."""
        def test_factory(container, label="default"):
            return {"created_by": "factory", "label": label}

        self.container.register_factory('test_service', test_factory)

        self.assertEqual(self.container.resolve('test_service')["label"], "default")
        self.assertEqual(self.container.resolve('test_service', label="custom")["label"], "custom")

    def test_register_instance(self):
        """Test instance registration and resolution."""
        test_instance = {"value": "test_instance"}

        self.container.register_instance('test_service', test_instance)

        self.assertIs(self.container.resolve('test_service'), test_instance)

    def test_dependency_injection(self):
        """Test automatic dependency injection."""
        class Dependency:
            def __init__(self):
                self.name = "dependency"

        class Service:
            def __init__(self, dependency: Dependency):
                self.dependency = dependency

        self.container.register_singleton(Dependency, Dependency)
        self.container.register_transient(Service, Service)

        service = self.container.resolve(Service)
        self.assertIsInstance(service.dependency, Dependency)
        self.assertEqual(service.dependency.name, "dependency")

    def test_circular_dependency_detection(self):
        """Test circular dependency detection."""
        self.container.register_transient('service_a', lambda c: c.resolve('service_b'))
        self.container.register_transient('service_b', lambda c: c.resolve('service_a'))

        with self.assertRaises(ValueError) as context:
            self.container.resolve('service_a')

        self.assertIn("Circular dependency", str(context.exception))

    def test_service_not_registered(self):
        """Test error when resolving unregistered service."""
        with self.assertRaises(ValueError) as context:
            self.container.resolve('nonexistent_service')

        self.assertIn("Service not registered", str(context.exception))

    def test_clear_cache(self):
        """Singletons built by factories are rebuilt after clearing the cache."""
        self.container.register_singleton('service', lambda c: object())
        first = self.container.resolve('service')
        self.container.clear_cache()
        self.assertIsNot(first, self.container.resolve('service'))

    def test_get_registered_services(self):
        """Test getting all registered services."""
        self.container.register_singleton('service1', lambda c: "test1")
        self.container.register_transient('service2', lambda c: "test2")

        services = self.container.get_registered_services()

        self.assertEqual(services['service1'], 'singleton')
        self.assertEqual(services['service2'], 'transient')

    def test_unknown_handler(self):
        with self.assertRaises(ValueError):
            self.container.handler_for('schreier-spectra')


class TestDefaultServiceProvider(unittest.TestCase):
    """Test cases for the default service provider."""

    def setUp(self):
        """Set up test fixtures."""
        self.container = DIContainer()
        DefaultServiceProvider(show_progress=False).configure_services(self.container)

    def test_resolve_core_services(self):
        """Test resolving key services."""
        self.assertIsInstance(self.container.resolve('config_validator'), ConfigValidator)
        self.assertIsInstance(self.container.resolve('statistics'), StatisticsCollector)
        self.assertIs(self.container.resolve('statistics'), self.container.resolve('statistics'))
        self.assertIsNotNone(self.container.resolve('logger'))

        reporter = self.container.resolve('progress_reporter')
        self.assertIsInstance(reporter, TqdmProgressReporter)
        self.assertFalse(reporter.enabled)

    def test_one_handler_per_kind(self):
        self.assertEqual(sorted(cls.kind for cls in HANDLER_CLASSES), sorted(EXPERIMENT_KINDS))
        for kind in EXPERIMENT_KINDS:
            with self.subTest(kind=kind):
                handler = self.container.handler_for(kind)
                self.assertEqual(handler.kind, kind)
                self.assertGreater(len(handler.parameter_names()), 0)

    def test_handler_can_be_replaced(self):
        """Runs dispatch to whatever handler the container holds."""
        fake = Mock()
        fake.run.return_value = {'answer': 42}
        self.container.register_instance('handler:haar-ratio', fake)
        with tempfile.TemporaryDirectory() as temp_dir:
            runner = ExperimentRunner(self.container)
            report = runner.run({'experiment': 'haar-ratio', 'output_dir': temp_dir,
                                 'group': {'family': 'tree', 'arity': 2, 'depth': 2},
                                 'parameters': {'numerator': 'G', 'denominator': 'V1'}})
        self.assertEqual(report.results['answer'], 42)
        self.assertIsInstance(fake.run.call_args[0][0], ExperimentContext)


class TestProgressReporter(unittest.TestCase):

    def test_disabled_reporter_accepts_calls(self):
        reporter = TqdmProgressReporter(enabled=False)
        reporter.start(3, "spectra")
        reporter.update()
        reporter.set_description("spectra (seed 1)")
        reporter.finish()
        self.assertIsNone(reporter.pbar)

    def test_calls_before_start_are_ignored(self):
        reporter = TqdmProgressReporter(enabled=False)
        reporter.update()
        reporter.finish()
        self.assertIsNone(reporter.pbar)


class TestStatisticsCollector(unittest.TestCase):
    """Test cases for the statistics collector."""

    def setUp(self):
        """Set up test fixtures."""
        self.stats = StatisticsCollector()

    def test_increment_counter(self):
        """Test counter increment functionality."""
        self.assertEqual(self.stats.stats.items_processed, 0)

        self.stats.increment('items_processed')
        self.stats.increment('items_processed', 5)
        self.assertEqual(self.stats.stats.items_processed, 6)

    def test_unknown_counter_is_ignored(self):
        self.stats.increment('edges_folded')
        self.assertNotIn('edges_folded', self.stats.get_counters())

    def test_session_timing(self):
        """Test session timing functionality."""
        self.stats.start_session()
        self.assertIsNone(self.stats.get_duration())

        self.stats.end_session()
        duration = self.stats.get_duration()
        self.assertIsNotNone(duration)
        self.assertGreaterEqual(duration, 0)

    def test_record_item(self):
        self.stats.record_item("index 4", True)
        self.stats.record_item("index 8", False, "no convergence")

        summary = self.stats.get_summary()
        self.assertEqual(summary['counters']['items_processed'], 1)
        self.assertEqual(summary['counters']['items_failed'], 1)
        self.assertEqual(summary['failed_items'], ["index 8"])

    def test_counters_are_integers_only(self):
        self.assertEqual(set(self.stats.get_counters()), {
            'items_processed', 'items_failed', 'criteria_passed', 'criteria_failed', 'artifacts_written'
        })

    def test_export_log(self):
        self.stats.record_item("invariance", True)
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "stats.json"
            self.stats.export_log(path)
            self.assertIn('"invariance"', path.read_text(encoding='utf-8'))

    def test_reset(self):
        """Test statistics reset functionality."""
        self.stats.record_item("atom 0", False, "bad atom")
        self.stats.reset()

        self.assertEqual(self.stats.stats.items_failed, 0)
        self.assertEqual(self.stats.get_summary()['failed_items'], [])


class TestErrorHandling(unittest.TestCase):
    """Test cases for the error hierarchy."""

    def test_error_hierarchy(self):
        self.assertIsInstance(ConfigInvalid("bad"), IRSLabError)
        self.assertIsInstance(SerializationError("bad"), IRSLabError)

    def test_error_with_context(self):
        """Test error creation with context information."""
        error = IRSLabError("Test error", source="configs/run.yaml", details={'key': 'value'})

        error_str = str(error)
        self.assertIn("Test error", error_str)
        self.assertIn("configs/run.yaml", error_str)
        self.assertIn("key=value", error_str)

    def test_config_error_names_field(self):
        error = ConfigInvalid("must be >= 1", field='parameters.radius')
        self.assertEqual(error.field, 'parameters.radius')

    def test_serialization_error_line(self):
        error = SerializationError("Bad coordinate", source="square.body", line=3)
        self.assertEqual(error.line, 3)
        self.assertIn("line=3", str(error))


class TestGlobalContainer(unittest.TestCase):
    """Test cases for global container management."""

    def setUp(self):
        """Set up test fixtures."""
        reset_container()

    def tearDown(self):
        """Clean up test fixtures."""
        reset_container()

    def test_get_container_singleton(self):
        """Test that get_container returns the same instance."""
        self.assertIs(get_container(), get_container())

    def test_container_auto_configuration(self):
        """Test that container is automatically configured."""
        container = get_container()
        self.assertTrue(container.is_registered('config_validator'))
        self.assertIsInstance(container.handler_for('haar-ratio'), HaarRatioHandler)

    def test_configure_container(self):
        container = configure_container(DefaultServiceProvider(show_progress=False))
        self.assertIs(get_container(), container)

    def test_reset_container(self):
        """Test container reset functionality."""
        container1 = get_container()
        reset_container()
        container2 = get_container()

        self.assertIsNot(container1, container2)


if __name__ == '__main__':
    unittest.main()
