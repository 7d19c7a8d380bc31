#!/usr/bin/env python3
"""
irs-lab - Main Application Script

This is the command-line entry point. It runs experiment configs, the
bundled self-test and DOT export of Schreier graphs.

Exit codes: 0 on success, 1 when a criterion or computation fails, 2 when
the config or an input file is invalid.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional

# Add src directory to Python path
sys.path.insert(0, str(Path(__file__).parent))

try:
    from .experiment_runner import OUTPUT_DIR_ENV, ExperimentRunner, RunReport
    from .selftest import MODULES, SelfTest
    from .serialization import load_subgroup, save_text
    from .spectral import cycle_family, export_dot, random_schreier_subgroup, schreier_graph
    from .utils.config_validator import LOG_LEVELS, default_logging_config
    from .utils.dependency_injection import DefaultServiceProvider, DIContainer
    from .utils.exceptions import CONFIGURATION_ERRORS, ConfigInvalid, IRSLabError, format_error_report
    from .utils.interfaces import LoggerMixin
    from .utils.structured_logging import setup_structured_logging
except ImportError:
    from experiment_runner import OUTPUT_DIR_ENV, ExperimentRunner, RunReport
    from selftest import MODULES, SelfTest
    from serialization import load_subgroup, save_text
    from spectral import cycle_family, export_dot, random_schreier_subgroup, schreier_graph
    from utils.config_validator import LOG_LEVELS, default_logging_config
    from utils.dependency_injection import DefaultServiceProvider, DIContainer
    from utils.exceptions import CONFIGURATION_ERRORS, ConfigInvalid, IRSLabError, format_error_report
    from utils.interfaces import LoggerMixin
    from utils.structured_logging import setup_structured_logging

VERSION = "1.0.0"
DEFAULT_SELFTEST_DIR = "results/selftest"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


class IRSLab(LoggerMixin):
    """
    Application class behind the subcommands.
    """

    def __init__(self, container: Optional[DIContainer] = None, show_progress: bool = True,
                 log_level: Optional[str] = None):
        """
        Initialize the application.

        Args:
            container (Optional[DIContainer]): Service container
            show_progress (bool): Whether to draw progress bars
            log_level (Optional[str]): Level that overrides the config's logging level
        """
        if container is None:
            container = DIContainer()
            DefaultServiceProvider(show_progress).configure_services(container)
        self.container = container
        self.show_progress = show_progress
        self.log_level = log_level
        setup_structured_logging(default_logging_config(log_level or 'INFO'))
        self.runner = ExperimentRunner(container, show_progress)

    def run_config(self, config_path: str) -> RunReport:
        """
        Validate and run one experiment config.

        Raises:
            ConfigInvalid: If the config does not validate
            IRSLabError: When the experiment fails
        """
        path = Path(config_path)
        config = self.runner.prepare(self.runner.load_config(path))
        logging_config = config['logging']
        if self.log_level:
            logging_config = dict(logging_config, level=self.log_level)
        setup_structured_logging(logging_config)
        return self.runner.run(config, base_dir=path.parent)

    def selftest(self, module: Optional[str] = None, output_dir: Optional[str] = None) -> RunReport:
        """Run the acceptance criteria, writing report.json to the output directory."""
        target = output_dir or os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_SELFTEST_DIR
        return SelfTest(self.container, self.show_progress).run(module, target)

    def export_dot(self, graph: str, output: Optional[str] = None) -> str:
        """
        DOT text of a Schreier graph.

        Args:
            graph (str): ``cycle:<n>``, ``random:<n>[:<seed>]`` or a subgroup
                file holding a coset table of a free group
            output (Optional[str]): File to write instead of returning only

        Raises:
            ConfigInvalid: For a malformed graph argument
        """
        H = self._graph_subgroup(graph)
        text = export_dot(schreier_graph(H))
        if output:
            save_text(output, text)
            self.logger.info(f"Wrote {output}")
        return text

    @staticmethod
    def _graph_subgroup(graph: str):
        parts = graph.split(":")
        if parts[0] in ("cycle", "random") and not Path(graph).exists():
            try:
                numbers = [int(p) for p in parts[1:]]
            except ValueError:
                raise ConfigInvalid(f"Malformed graph argument '{graph}'", field='graph')
            if parts[0] == "cycle" and len(numbers) == 1 and numbers[0] >= 1:
                return cycle_family(numbers[0])
            if parts[0] == "random" and len(numbers) in (1, 2) and numbers[0] >= 1:
                return random_schreier_subgroup(numbers[0], numbers[1] if len(numbers) == 2 else 0)
            raise ConfigInvalid(f"Malformed graph argument '{graph}'; expected cycle:<n> or random:<n>[:<seed>]",
                                field='graph')
        return load_subgroup(graph)


def print_run_report(report: RunReport):
    print(f"Experiment: {report.experiment} (seed {report.seed})")
    print(f"Output directory: {report.config.get('output_dir')}")
    for name in report.artifacts:
        print(f"  {name}")
    print(f"Completed in {report.wall_clock_seconds:.2f} s")


def print_selftest_report(report: RunReport):
    criteria = report.results['criteria']
    for item in criteria:
        status = "PASS" if item['passed'] else "FAIL"
        line = f"[{status}] {item['number']:>2}. {item['name']} ({item['module']})"
        detail = item['error'] or item['detail']
        if detail:
            line += f" - {detail}"
        print(line)
    passed = sum(1 for item in criteria if item['passed'])
    print(f"\n{passed}/{len(criteria)} criteria passed")


def create_cli_parser() -> argparse.ArgumentParser:
    """
    Create command-line interface parser.

    Returns:
        argparse.ArgumentParser: Configured argument parser
    """
    parser = argparse.ArgumentParser(
        prog="irs-lab",
        description="Experiments on invariant random subgroups, Schreier spectra and amenability",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s run configs/cycle_spectra.yaml       # Run one experiment
  %(prog)s selftest                             # Run every acceptance criterion
  %(prog)s selftest --filter spectral           # Only the spectral criteria
  %(prog)s export-dot cycle:8                   # DOT of the 8-cycle Schreier graph
  %(prog)s export-dot random:50:7 -o g.dot      # Random Schreier graph to a file
        """
    )

    parser.add_argument(
        '--log-level',
        choices=LOG_LEVELS,
        help='Override the logging level'
    )

    parser.add_argument(
        '--no-progress',
        action='store_true',
        help='Disable progress bars'
    )

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    run_parser = subparsers.add_parser('run', help='Run an experiment config')
    run_parser.add_argument('config', help='Path to the YAML experiment config')

    selftest_parser = subparsers.add_parser('selftest', help='Run the acceptance suite')
    selftest_parser.add_argument('--filter', choices=MODULES, help='Only run the criteria of one module')
    selftest_parser.add_argument('--output-dir', help=f'Report directory (default: {DEFAULT_SELFTEST_DIR})')

    dot_parser = subparsers.add_parser('export-dot', help='Write a Schreier graph as DOT')
    dot_parser.add_argument('graph', help='cycle:<n>, random:<n>[:<seed>] or a subgroup file')
    dot_parser.add_argument('--output', '-o', help='Write to this file instead of stdout')

    subparsers.add_parser('version', help='Print the version')

    return parser


def main(argv: Optional[list] = None) -> int:
    """Main entry point for the application."""
    parser = create_cli_parser()
    args = parser.parse_args(argv)

    if args.command == 'version':
        print(f"irs-lab {VERSION}")
        return EXIT_OK

    try:
        app = IRSLab(show_progress=not args.no_progress, log_level=args.log_level)

        if args.command == 'run':
            report = app.run_config(args.config)
            print_run_report(report)
            return EXIT_OK if report.passed else EXIT_FAILED

        if args.command == 'selftest':
            report = app.selftest(args.filter, args.output_dir)
            print_selftest_report(report)
            return EXIT_OK if report.passed else EXIT_FAILED

        text = app.export_dot(args.graph, args.output)
        if not args.output:
            sys.stdout.write(text)
        return EXIT_OK

    except CONFIGURATION_ERRORS as e:
        print(format_error_report(e), file=sys.stderr)
        return EXIT_CONFIG
    except IRSLabError as e:
        print(format_error_report(e), file=sys.stderr)
        return EXIT_FAILED
    except KeyboardInterrupt:
        print("\nOperation cancelled by user", file=sys.stderr)
        return EXIT_FAILED
    except Exception as e:
        logging.getLogger(__name__).debug("Unexpected error", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
