#!/usr/bin/env python3
"""
Experiment Runner Module

This module runs one experiment described by a YAML config. The config is
validated strictly, the group block is built, and the handler registered
for the experiment kind in the service container does the work. Every run
writes ``report.json`` plus the kind's CSV tables and SVG plots into the
output directory. Two runs of the same config write identical files; only
the wall-clock entry of the report differs.
"""

import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

try:
    from .convex_cone import (
        ConvexBody, DirectionSet, OrthogonalGroup, barycenter, fix_pipeline_report,
        invariant_measure_test, klein_group_on_square, orthogonal_group, rotation_group_on_polygon
    )
    from .group_fixtures import group_from_config
    from .irs import (
        amenable_irs_radical_check, check_conjugation_invariance, ergodic_components,
        irs_normal_closure, support_generates
    )
    from .reporting import (
        REPORT_SCHEMA_VERSION, plot_bs_distance, plot_spectra, render_svg, spectra_header,
        write_csv, write_json, write_spectra_csv
    )
    from .serialization import body_to_text, load_body, load_irs, load_measure, save_text
    from .spectral import (
        ApproximationReport, cycle_family, cycle_rho0, local_approximation_report, random_family
    )
    from .subgroup_space import ElementSet, Subgroup, whole_group
    from .tree_groups import (
        FolnerCertificate, RootedTreeGroup, brute_force_folner, dense_selector,
        folner_certificate_check, folner_search, haar_ratio, named_tree_subgroup,
        subgroup_as_coset_union
    )
    from .utils.config_validator import ConfigValidator
    from .utils.dependency_injection import DefaultServiceProvider, DIContainer
    from .utils.exceptions import ConfigInvalid, IRSLabError, NotInvariant
    from .utils.interfaces import ExperimentContext, ExperimentHandler, LoggerMixin
    from .utils.structured_logging import LoggerManager
except ImportError:
    from convex_cone import (
        ConvexBody, DirectionSet, OrthogonalGroup, barycenter, fix_pipeline_report,
        invariant_measure_test, klein_group_on_square, orthogonal_group, rotation_group_on_polygon
    )
    from group_fixtures import group_from_config
    from irs import (
        amenable_irs_radical_check, check_conjugation_invariance, ergodic_components,
        irs_normal_closure, support_generates
    )
    from reporting import (
        REPORT_SCHEMA_VERSION, plot_bs_distance, plot_spectra, render_svg, spectra_header,
        write_csv, write_json, write_spectra_csv
    )
    from serialization import body_to_text, load_body, load_irs, load_measure, save_text
    from spectral import (
        ApproximationReport, cycle_family, cycle_rho0, local_approximation_report, random_family
    )
    from subgroup_space import ElementSet, Subgroup, whole_group
    from tree_groups import (
        FolnerCertificate, RootedTreeGroup, brute_force_folner, dense_selector,
        folner_certificate_check, folner_search, haar_ratio, named_tree_subgroup,
        subgroup_as_coset_union
    )
    from utils.config_validator import ConfigValidator
    from utils.dependency_injection import DefaultServiceProvider, DIContainer
    from utils.exceptions import ConfigInvalid, IRSLabError, NotInvariant
    from utils.interfaces import ExperimentContext, ExperimentHandler, LoggerMixin
    from utils.structured_logging import LoggerManager

OUTPUT_DIR_ENV = "IRS_LAB_OUTPUT_DIR"
REPORT_FILE = "report.json"
ORTHOGONAL_FIXTURES = ("klein-square", "triangle-rotations", "square-rotations", "hexagon-rotations")
POLYGON_ROTATION_ORDERS = {"triangle-rotations": 3, "square-rotations": 4, "hexagon-rotations": 6}


@dataclass
class RunReport:
    """Outcome of one run or self-test."""
    experiment: str
    seed: int
    config: Dict[str, Any]
    results: Dict[str, Any]
    artifacts: List[str] = field(default_factory=list)
    wall_clock_seconds: float = 0.0
    passed: bool = True
    schema_version: int = REPORT_SCHEMA_VERSION

    def payload(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            'schema_version': self.schema_version,
            'experiment': self.experiment,
            'seed': self.seed,
            'config': self.config,
            'results': self.results,
            'artifacts': list(self.artifacts),
            'passed': self.passed,
        }
        if include_timing:
            data['wall_clock_seconds'] = self.wall_clock_seconds
        return data


@dataclass
class GroupSetup:
    """The group of a config, plus the matrix action and body of orthogonal fixtures."""
    group: Any
    action: Optional[OrthogonalGroup] = None
    body: Optional[ConvexBody] = None


def build_group(block: Optional[Dict[str, Any]], base_dir: Union[str, Path]) -> GroupSetup:
    """
    Build the group described by a config ``group`` block.

    Raises:
        ConfigInvalid: When the block does not describe a usable group
    """
    if block is None:
        raise ConfigInvalid("This experiment needs a group block", field='group')
    family = block.get('family')
    try:
        if family == 'orthogonal':
            if 'matrices' in block:
                action = orthogonal_group(list(block['matrices'].items()))
                return GroupSetup(action.marked, action)
            if block.get('name') == 'klein-square':
                action, square = klein_group_on_square()
                return GroupSetup(action.marked, action, square)
            if block.get('name') in POLYGON_ROTATION_ORDERS:
                action, polygon = rotation_group_on_polygon(POLYGON_ROTATION_ORDERS[block['name']])
                return GroupSetup(action.marked, action, polygon)
            raise ConfigInvalid(f"Unknown orthogonal fixture '{block.get('name')}'; "
                                f"expected one of {list(ORTHOGONAL_FIXTURES)}", field='group.name')
        if family == 'tree':
            return GroupSetup(RootedTreeGroup(block['arity'], block['depth']))
        return GroupSetup(group_from_config(block, base_dir))
    except ConfigInvalid:
        raise
    except IRSLabError as e:
        raise ConfigInvalid(f"Cannot build group: {e.message}", field='group')


def subgroup_summary(H: Subgroup) -> Dict[str, Any]:
    """Printable facts about a subgroup for reports."""
    summary = {
        'description': H.describe(),
        'index': H.index(),
        'is_whole_group': H == whole_group(H.parent),
    }
    if isinstance(H, ElementSet):
        summary['order'] = H.order
        summary['elements'] = H.element_names()
    return summary


def approximation_summary(report: ApproximationReport, closed_form: bool = False) -> Dict[str, Any]:
    """JSON view of a family report; with closed_form, adds the cycle-family formula."""
    rows = []
    errors = []
    for row in report.rows:
        entry = {'index': row.index, 'rho0': row.rho0, 'bs_distance': row.bs_distance}
        if closed_form:
            expected = cycle_rho0(row.index) if row.index > 1 else None
            entry['rho0_closed_form'] = expected
            if expected is not None and row.rho0 is not None:
                errors.append(abs(row.rho0 - expected))
        rows.append(entry)
    summary = {
        'rows': rows,
        'radius': report.radius,
        'cayley_interval': {
            'lower': report.cayley.lower,
            'upper': report.cayley.upper,
            'radius': report.cayley.radius,
            'width': report.cayley.width,
        },
        'tolerance': report.tolerance,
        'window': report.window,
        'hypothesis_observed': report.hypothesis_observed,
        'conclusion_observed': report.conclusion_observed,
        'theorem_consistent': report.theorem_consistent,
        'notes': list(report.notes),
    }
    if closed_form:
        summary['max_closed_form_error'] = max(errors) if errors else None
    return summary


def _median(values: List[Fraction]) -> Fraction:
    ordered = sorted(values)
    middle = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[middle]
    return (ordered[middle - 1] + ordered[middle]) / 2


class BaseHandler(ExperimentHandler, LoggerMixin):
    """Shared plumbing for the experiment handlers."""

    kind = ""

    def parameter_names(self) -> List[str]:
        return sorted(ConfigValidator().parameter_schemas[self.kind])

    def group_setup(self, context: ExperimentContext) -> GroupSetup:
        return build_group(context.config.get('group'), context.base_dir)

    def write_csv(self, context: ExperimentContext, name: str, header, rows) -> Path:
        path = write_csv(context.output_dir / name, header, rows)
        context.add_artifact(path)
        return path


class SchreierSpectraHandler(BaseHandler):
    """rho_0 and BS distances along a family of finite-index subgroups of F_k."""

    kind = 'schreier-spectra'

    def family_report(self, context: ExperimentContext, seed: int) -> Tuple[ApproximationReport, bool]:
        params = context.parameters
        block = context.config.get('group') or {'family': 'free', 'rank': 2}
        rank = build_group(block, context.base_dir).group.rank
        if params['family'] == 'cycle':
            family = [cycle_family(n, rank) for n in params['indices']]
        else:
            family = random_family(params['indices'], seed, rank)

        context.progress.start(len(family), f"{self.kind} (seed {seed})")

        def on_row(row):
            context.statistics.record_item(f"index {row.index}", True)
            context.progress.update()

        try:
            report = local_approximation_report(
                family, params['radius'], params['tolerance'], window=params['window'],
                cayley_radius=params['cayley_radius'], rho_tolerance=params['rho_tolerance'],
                on_row=on_row,
            )
        finally:
            context.progress.finish()
        return report, params['family'] == 'cycle' and rank == 2

    def run(self, context: ExperimentContext) -> Dict[str, Any]:
        report, closed_form = self.family_report(context, context.seed)
        path = write_spectra_csv(context.output_dir / "spectra.csv", report)
        context.add_artifact(path)
        context.add_artifact(plot_spectra(report, context.output_dir / "spectra.svg"))
        self.logger.info(f"Wrote {len(report.rows)} rows to {path}")
        return approximation_summary(report, closed_form)


class BSConvergenceHandler(SchreierSpectraHandler):
    """BS distances over several seeded random families."""

    kind = 'bs-convergence'

    def run(self, context: ExperimentContext) -> Dict[str, Any]:
        params = context.parameters
        trials = params['trials'] if params['family'] == 'random' else 1
        reports = []
        for t in range(trials):
            seed = context.seed + t
            report, _ = self.family_report(context, seed)
            reports.append((seed, report))

        rows = []
        by_index: Dict[int, List[Fraction]] = {}
        for seed, report in reports:
            for row in report.rows:
                rows.append([seed, row.index, row.rho0, row.bs_distance])
                by_index.setdefault(row.index, []).append(row.bs_distance)
        self.write_csv(context, "bs_convergence.csv", ["seed"] + spectra_header(params['radius']), rows)
        context.add_artifact(plot_bs_distance(reports[0][1], context.output_dir / "bs_distance.svg"))

        return {
            'trials': [dict(approximation_summary(report), seed=seed) for seed, report in reports],
            'median_bs_distance': {str(n): _median(values) for n, values in sorted(by_index.items())},
            'all_theorem_consistent': all(report.theorem_consistent for _, report in reports),
        }


class IRSCheckHandler(BaseHandler):
    """Invariance, normal closure, spanning and ergodic decomposition of an IRS file."""

    kind = 'irs-check'

    def run(self, context: ExperimentContext) -> Dict[str, Any]:
        params = context.parameters
        setup = self.group_setup(context)
        mu = load_irs(context.resolve_path(params['irs_file']), setup.group)
        certificate = check_conjugation_invariance(mu)
        results: Dict[str, Any] = {
            'atoms': len(mu),
            'invariant': certificate.invariant,
            'generators_checked': certificate.generators_checked,
        }
        context.statistics.record_item("invariance", True)
        if not certificate.invariant:
            generator, atom = certificate.witness()
            results['witness'] = {'generator': generator, 'atom': atom.describe()}
            self.logger.warning(f"IRS is not invariant: conjugating by {generator} leaves the support")

        component_of: Dict[Subgroup, int] = {}
        try:
            closure = irs_normal_closure(mu, params.get('index_bound'))
            results['normal_closure'] = subgroup_summary(closure)
            results['spanning'] = results['normal_closure']['is_whole_group']
            components = ergodic_components(mu)
            results['ergodic_components'] = len(components)
            results['component_weights'] = [c.weight for c in components]
            for k, component in enumerate(components):
                for H in component.irs.support():
                    component_of[H] = k
        except NotInvariant:
            results['normal_closure'] = None
            results['spanning'] = None
            results['ergodic_components'] = None
        results['support_generates'] = support_generates(mu)

        rows = [[k, w, H.index(), component_of.get(H)] for k, (H, w) in enumerate(mu.atoms)]
        self.write_csv(context, "atoms.csv", ["atom", "weight", "index", "component"], rows)
        return results


class FolnerSearchHandler(BaseHandler):
    """Finite-depth Følner search in a truncated tree group."""

    kind = 'folner-search'

    def run(self, context: ExperimentContext) -> Dict[str, Any]:
        params = context.parameters
        tree = self.group_setup(context).group
        C = named_tree_subgroup(tree, params['subgroup'])
        Q_reps = dense_selector(C) if params['test_set'] == 'dense' else list(C.generators)
        test_level = params.get('test_level')
        outcome = folner_search(C, Q_reps, params['n'], test_level=test_level,
                                allow_whole=params['allow_whole'], max_subset=params['max_subset'])
        results: Dict[str, Any] = {'subgroup': C.describe(), 'outcome': outcome.to_dict(tree)}
        found = isinstance(outcome, FolnerCertificate)
        if found:
            results['certificate_check'] = folner_certificate_check(outcome, C, Q_reps, params['n'])
        context.statistics.record_item("folner search", True)

        if params['brute_force']:
            oracle = brute_force_folner(C, Q_reps, params['n'], test_level=test_level,
                                        allow_whole=params['allow_whole'])
            results['brute_force'] = (None if oracle is None else
                                      {'level': oracle[0], 'size': oracle[1], 'ratio': oracle[2]})

        row = ([True, outcome.level, len(outcome.H), outcome.worst_ratio] if found else
               [False, outcome.best_level, len(outcome.best_H), outcome.best_ratio])
        self.write_csv(context, "folner.csv", ["found", "level", "cosets", "worst_ratio"], [row])
        return results


class HaarRatioHandler(BaseHandler):
    """mu(O)/mu(L) for named open subgroups of a truncated tree group."""

    kind = 'haar-ratio'

    def run(self, context: ExperimentContext) -> Dict[str, Any]:
        params = context.parameters
        tree = self.group_setup(context).group
        names = [params['numerator'], params['denominator']] + ([params['via']] if 'via' in params else [])
        unions = {name: subgroup_as_coset_union(named_tree_subgroup(tree, name)) for name in names}
        O, L = unions[params['numerator']], unions[params['denominator']]
        ratio = haar_ratio(O, L)
        results: Dict[str, Any] = {'numerator': params['numerator'], 'denominator': params['denominator'],
                                   'ratio': ratio}
        rows = [[params['numerator'], params['denominator'], ratio]]
        if 'via' in params:
            M = unions[params['via']]
            first, second = haar_ratio(O, M), haar_ratio(M, L)
            results['via'] = params['via']
            results['cocycle_holds'] = first * second == ratio
            rows += [[params['numerator'], params['via'], first], [params['via'], params['denominator'], second]]
        context.statistics.record_item("haar ratio", True)
        self.write_csv(context, "haar_ratio.csv", ["numerator", "denominator", "ratio"], rows)
        return results


class ConeBarycenterHandler(BaseHandler):
    """Barycenter of a measure on convex bodies and the invariant-measure verdict."""

    kind = 'cone-barycenter'

    def run(self, context: ExperimentContext) -> Dict[str, Any]:
        params = context.parameters
        C = load_body(context.resolve_path(params['body_file']))
        results: Dict[str, Any] = {}
        if 'measure_file' in params:
            nu = load_measure(context.resolve_path(params['measure_file']))
        else:
            setup = self.group_setup(context)
            mu = load_irs(context.resolve_path(params['irs_file']), setup.group)
            pipeline = fix_pipeline_report(mu, setup.action, C)
            results['pipeline'] = pipeline.to_dict()
            if pipeline.nu is None:
                raise ConfigInvalid("The body is not invariant under the group", field='parameters.body_file')
            nu = pipeline.nu

        dirs = DirectionSet.default(C.dimension)
        verdict = invariant_measure_test(nu, C, dirs)
        bary = barycenter(nu)
        results.update({
            'atoms': len(nu),
            'barycenter': bary.to_text_vertices(),
            'verdict': verdict.to_dict(),
            'directions': len(dirs),
            'covering_radius': dirs.covering_radius,
        })
        context.statistics.record_item("barycenter", True)

        path = save_text(context.output_dir / "barycenter.txt", body_to_text(bary))
        context.add_artifact(path)
        rows = [list(b) + [hc, hb] for b, hc, hb in
                zip(dirs.vectors, C.support_values(dirs), bary.support_values(dirs))]
        header = [f"b{i + 1}" for i in range(C.dimension)] + ["h_C", "h_barycenter"]
        self.write_csv(context, "support.csv", header, rows)
        if params['render'] and C.dimension == 2:
            bodies = [C] + [body for body, _ in nu.atoms] + [bary]
            labels = ["C"] + [f"atom {k} ({w})" for k, (_, w) in enumerate(nu.atoms)] + ["barycenter"]
            context.add_artifact(render_svg(bodies, context.output_dir / "bodies.svg", labels))
        return results


class RadicalCheckHandler(BaseHandler):
    """Amenable-radical consistency of an IRS, plus the fix-set pipeline for matrix groups."""

    kind = 'radical-check'

    def run(self, context: ExperimentContext) -> Dict[str, Any]:
        params = context.parameters
        setup = self.group_setup(context)
        mu = load_irs(context.resolve_path(params['irs_file']), setup.group)
        report = amenable_irs_radical_check(mu)
        results: Dict[str, Any] = {'radical': report.to_dict()}
        context.statistics.record_item("radical check", True)
        if setup.action is not None:
            body = load_body(context.resolve_path(params['body_file'])) if 'body_file' in params else setup.body
            if body is not None:
                pipeline = fix_pipeline_report(mu, setup.action, body)
                results['pipeline'] = pipeline.to_dict()
                context.statistics.record_item("fix pipeline", pipeline.passed)
        rows = [[k, w, flag] for k, ((_, w), flag) in enumerate(zip(mu.atoms, report.atom_flags))]
        self.write_csv(context, "radical.csv", ["atom", "weight", "amenable"], rows)
        return results


HANDLER_CLASSES = (
    SchreierSpectraHandler,
    BSConvergenceHandler,
    IRSCheckHandler,
    FolnerSearchHandler,
    HaarRatioHandler,
    ConeBarycenterHandler,
    RadicalCheckHandler,
)


class ExperimentRunner(LoggerMixin):
    """
    Validates configs and dispatches them to the registered handlers.
    """

    def __init__(self, container: Optional[DIContainer] = None, show_progress: bool = True):
        """
        Initialize the runner.

        Args:
            container (Optional[DIContainer]): Service container (default services when omitted)
            show_progress (bool): Whether to draw progress bars
        """
        if container is None:
            container = DIContainer()
            DefaultServiceProvider(show_progress).configure_services(container)
        self.container = container
        self.structured = LoggerManager.get_logger('irs_lab')

    def load_config(self, config_path: Union[str, Path]) -> Dict[str, Any]:
        """
        Read a YAML config file.

        Raises:
            ConfigInvalid: If the file is missing or not valid YAML
        """
        path = Path(config_path)
        if not path.exists():
            raise ConfigInvalid(f"Configuration file not found: {path}", field=str(path))
        try:
            with open(path, 'r', encoding='utf-8') as f:
                raw = yaml.safe_load(f)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
            raise ConfigInvalid(f"Error parsing YAML configuration{where}: {e}", field=str(path))
        return raw if raw is not None else {}

    def prepare(self, raw: Any) -> Dict[str, Any]:
        """Validate, apply defaults and the output directory override."""
        validator = self.container.resolve('config_validator')
        config = validator.require_valid(raw)
        override = os.environ.get(OUTPUT_DIR_ENV)
        if override:
            config['output_dir'] = override
        return config

    def run_file(self, config_path: Union[str, Path]) -> RunReport:
        path = Path(config_path)
        return self.run(self.load_config(path), base_dir=path.parent)

    def run(self, raw_config: Any, base_dir: Union[str, Path] = ".") -> RunReport:
        """
        Run one experiment.

        Args:
            raw_config: Parsed config mapping (validated here)
            base_dir: Directory that relative input paths are resolved against

        Returns:
            RunReport: The report also written to ``<output_dir>/report.json``

        Raises:
            ConfigInvalid: If the config does not validate
            IRSLabError: Module errors, with the experiment kind as source
        """
        config = self.prepare(raw_config)
        kind = config['experiment']
        output_dir = Path(config['output_dir'])
        output_dir.mkdir(parents=True, exist_ok=True)

        statistics = self.container.resolve('statistics')
        statistics.reset()
        statistics.start_session()
        context = ExperimentContext(config, output_dir, Path(base_dir),
                                    self.container.resolve('progress_reporter'), statistics)
        handler = self.container.handler_for(kind)

        self.structured.log_experiment_event(kind, "started", seed=config['seed'])
        started = time.perf_counter()
        try:
            results = handler.run(context)
        except IRSLabError as e:
            statistics.record_item(kind, False, e.message)
            self.structured.log_experiment_event(kind, "run", success=False, error=e.message)
            if e.source is None:
                e.source = kind
            raise
        elapsed = time.perf_counter() - started
        statistics.end_session()

        report = RunReport(
            experiment=kind,
            seed=config['seed'],
            config=config,
            results=dict(results, counters=statistics.get_counters()),
            artifacts=[p.name for p in context.artifacts],
            wall_clock_seconds=elapsed,
        )
        write_json(output_dir / REPORT_FILE, report.payload())
        self.structured.log_experiment_event(kind, "finished", duration=elapsed,
                                             artifacts=len(report.artifacts))
        self.structured.log_performance_metric('wall_clock', elapsed, 's', experiment=kind)
        return report
