#!/usr/bin/env python3
"""
Self-Test Module

This module runs the bundled acceptance suite: exact closed forms for the
cycle family, the Cayley interval, random Schreier families, Haar ratios and
Følner certificates on rooted-tree truncations, the IRS normal-closure
oracle, convex-cone properties, the Klein-square pipeline, Chabauty
fingerprints and run determinism. Every criterion is seeded; a failing
criterion is report content, never an exception.
"""

import itertools
import json
import math
import random
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import median
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

try:
    from .convex_cone import (
        VIOLATED, BodyMeasure, ConvexBody, DirectionSet, act_on_measure, apply_action, barycenter,
        contains, extreme_point_check, face_of, fix_pipeline_report, fix_set, klein_group_on_square,
        matmul, minkowski_sum, random_body, random_sub_body, transpose, invariant_measure_test
    )
    from .experiment_runner import REPORT_FILE, ExperimentRunner, RunReport
    from .group_fixtures import fixture_group
    from .irs import (
        IRSDistribution, check_conjugation_invariance, irs_normal_closure, random_invariant_irs,
        random_pmp_action, stabilizer_pushforward
    )
    from .reporting import to_jsonable, write_csv, write_json
    from .spectral import (
        bs_distance_to_cayley, bs_local_statistics, cayley_spectral_radius_estimate, cycle_family, cycle_rho0,
        local_approximation_report, markov_spectral_radius_rho0, random_family, random_schreier_subgroup,
        schreier_graph
    )
    from .group_core import FreeGroup, integer_group
    from .subgroup_space import (
        chabauty_distance, enumerate_subgroups, fingerprint, integer_subgroup, is_normal,
        is_subgroup_of, subgroup_generated, trivial_subgroup
    )
    from .tree_groups import (
        CosetUnion, FolnerCertificate, RootedTreeGroup, brute_force_folner, dense_selector,
        folner_certificate_check, folner_search, haar_ratio, level_constant_subgroup,
        named_tree_subgroup, subgroup_as_coset_union, level_stabilizer, whole_tree_group
    )
    from .utils.dependency_injection import DefaultServiceProvider, DIContainer
    from .utils.exceptions import ConfigInvalid, IRSLabError
    from .utils.structured_logging import LoggerManager
except ImportError:
    from convex_cone import (
        VIOLATED, BodyMeasure, ConvexBody, DirectionSet, act_on_measure, apply_action, barycenter,
        contains, extreme_point_check, face_of, fix_pipeline_report, fix_set, klein_group_on_square,
        matmul, minkowski_sum, random_body, random_sub_body, transpose, invariant_measure_test
    )
    from experiment_runner import REPORT_FILE, ExperimentRunner, RunReport
    from group_fixtures import fixture_group
    from irs import (
        IRSDistribution, check_conjugation_invariance, irs_normal_closure, random_invariant_irs,
        random_pmp_action, stabilizer_pushforward
    )
    from reporting import to_jsonable, write_csv, write_json
    from spectral import (
        bs_distance_to_cayley, bs_local_statistics, cayley_spectral_radius_estimate, cycle_family, cycle_rho0,
        local_approximation_report, markov_spectral_radius_rho0, random_family, random_schreier_subgroup,
        schreier_graph
    )
    from group_core import FreeGroup, integer_group
    from subgroup_space import (
        chabauty_distance, enumerate_subgroups, fingerprint, integer_subgroup, is_normal,
        is_subgroup_of, subgroup_generated, trivial_subgroup
    )
    from tree_groups import (
        CosetUnion, FolnerCertificate, RootedTreeGroup, brute_force_folner, dense_selector,
        folner_certificate_check, folner_search, haar_ratio, level_constant_subgroup,
        named_tree_subgroup, subgroup_as_coset_union, level_stabilizer, whole_tree_group
    )
    from utils.dependency_injection import DefaultServiceProvider, DIContainer
    from utils.exceptions import ConfigInvalid, IRSLabError
    from utils.structured_logging import LoggerManager

SELFTEST_SEED = 0
MODULES = ("spectral", "tdlc", "irs", "convex-cone", "subgroup-space", "cli")

CYCLE_INDICES = (4, 8, 16, 32, 64)
RANDOM_INDICES = (50, 200, 800)
RANDOM_SEEDS = range(1, 21)
TREE_SHAPES = ((2, 2), (2, 3), (3, 2))
FOLNER_SHAPES = ((2, 2), (2, 3))
FOLNER_SUBGROUPS = ("G", "V1", "diagonal", "odometer")
IRS_FIXTURES = ("S3", "S4", "D4", "Z4", "A4", "Z2xZ2")
RANDOM_FAMILY_CSV = "random_family.csv"

Table = Tuple[Sequence[str], List[Sequence[Any]]]


@dataclass
class CheckOutcome:
    """What one criterion observed. Tables are written as CSV next to report.json."""
    passed: bool
    detail: str
    data: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, Table] = field(default_factory=dict)


@dataclass
class Criterion:
    number: int
    name: str
    module: str
    check: Callable[[], CheckOutcome]


@dataclass
class CriterionResult:
    number: int
    name: str
    module: str
    passed: bool
    detail: str
    data: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None
    tables: Dict[str, Table] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'number': self.number,
            'name': self.name,
            'module': self.module,
            'passed': self.passed,
            'detail': self.detail,
            'data': self.data,
            'error': self.error,
            'tables': sorted(self.tables),
        }


# ----------------------------------------------------------------------
# spectral

def check_cycle_spectra() -> CheckOutcome:
    """rho_0 of the cycle family against (1 + cos(2 pi / n)) / 2."""
    rows = []
    worst = 0.0
    for n in CYCLE_INDICES:
        rho0 = markov_spectral_radius_rho0(schreier_graph(cycle_family(n)))
        expected = cycle_rho0(n)
        worst = max(worst, abs(rho0 - expected))
        rows.append({'index': n, 'rho0': rho0, 'closed_form': expected})
    two_vertex = markov_spectral_radius_rho0(schreier_graph(cycle_family(2)))
    passed = worst <= 1e-9 and abs(two_vertex) <= 1e-12
    return CheckOutcome(passed, f"max error {worst:.3g}, two-vertex rho_0 {two_vertex:.3g}",
                        {'rows': rows, 'two_vertex_rho0': two_vertex})


def check_cayley_interval() -> CheckOutcome:
    """The interval at radius 14 contains sqrt(3)/2, is narrow and shrinks with the radius."""
    group = FreeGroup(2)
    target = math.sqrt(3) / 2
    intervals = [cayley_spectral_radius_estimate(group, r) for r in range(4, 15)]
    last = intervals[-1]
    nested = all(b.lower >= a.lower and b.upper <= a.upper for a, b in zip(intervals, intervals[1:]))
    passed = last.contains(target) and last.width <= 0.04 and nested
    return CheckOutcome(passed, f"[{last.lower:.6f}, {last.upper:.6f}] width {last.width:.4f}", {
        'intervals': [{'radius': c.radius, 'lower': c.lower, 'upper': c.upper} for c in intervals],
        'nested': nested,
    })


def check_random_family() -> CheckOutcome:
    """
    Random two-permutation Schreier graphs: rho_0 at index 200, radius-1 BS
    distance, and theorem consistency on every trial and on the cycle family.
    The radius-2 median at index 200 is recorded alongside; it does not gate.
    """
    middle = RANDOM_INDICES.index(200)
    rho_values, distances, wide_distances, consistent = [], [], [], []
    for seed in RANDOM_SEEDS:
        family = random_family(RANDOM_INDICES, seed)
        report = local_approximation_report(family, radius=1, tolerance=1e-9)
        rho_values.append(report.rows[middle].rho0)
        distances.append(report.rows[middle].bs_distance)
        H = family[middle]
        wide_distances.append(bs_distance_to_cayley(bs_local_statistics(schreier_graph(H), 2), H.parent))
        consistent.append(report.theorem_consistent)
    cycles = local_approximation_report([cycle_family(n) for n in CYCLE_INDICES], radius=1, tolerance=1e-9)
    small = sum(1 for rho in rho_values if rho is not None and rho <= 0.95)
    median_distance = median(distances)
    median_wide = median(wide_distances)
    passed = (small >= 18 and median_distance <= Fraction(1, 10) and all(consistent)
              and cycles.theorem_consistent and not cycles.hypothesis_observed)
    rows = [[seed, rho, r1, r2] for seed, rho, r1, r2 in zip(RANDOM_SEEDS, rho_values, distances, wide_distances)]
    return CheckOutcome(passed, f"{small}/20 with rho_0 <= 0.95, median BS distance {float(median_distance):.4f} "
                                f"at R=1, {float(median_wide):.4f} at R=2", {
        'rho0_at_200': rho_values,
        'bs_distance_at_200': distances,
        'median_bs_distance': median_distance,
        'bs_distance_at_200_R2': wide_distances,
        'median_bs_distance_R2': median_wide,
        'trials_consistent': sum(consistent),
        'cycle_family_consistent': cycles.theorem_consistent,
        'cycle_family_hypothesis': cycles.hypothesis_observed,
    }, tables={RANDOM_FAMILY_CSV: (["seed", "rho0", "bs_distance_R1", "bs_distance_R2"], rows)})


# ----------------------------------------------------------------------
# tdlc

def _random_union(rng: random.Random, C, images: Dict[int, List]) -> CosetUnion:
    level = rng.randint(0, C.group.depth)
    keys = images[level]
    return CosetUnion(C, level, frozenset(rng.sample(keys, rng.randint(1, len(keys)))))


def check_haar_ratios() -> CheckOutcome:
    """Haar ratios against element counts, and the cocycle identity."""
    rng = random.Random(SELFTEST_SEED + 4)
    setups = []
    for arity, depth in TREE_SHAPES:
        C = whole_tree_group(RootedTreeGroup(arity, depth))
        setups.append((C, {i: sorted(C.level_image(i)) for i in range(depth + 1)}))
    pairs = 500
    matches = cocycles = 0
    for i in range(pairs):
        C, images = setups[i % len(setups)]
        O, L, M = (_random_union(rng, C, images) for _ in range(3))
        ratio = haar_ratio(O, L)
        if ratio == Fraction(len(O.elements()), len(L.elements())):
            matches += 1
        if haar_ratio(O, M) * haar_ratio(M, L) == ratio:
            cocycles += 1
    tree = RootedTreeGroup(2, 2)
    G = whole_tree_group(tree)
    fixed = haar_ratio(subgroup_as_coset_union(G), subgroup_as_coset_union(level_stabilizer(tree, 1)))
    passed = matches == pairs and cocycles == pairs and fixed == 2
    return CheckOutcome(passed, f"{matches}/{pairs} count matches, {cocycles}/{pairs} cocycles, mu(G)/mu(V_1) = {fixed}", {
        'pairs': pairs, 'count_matches': matches, 'cocycle_matches': cocycles, 'G_over_V1': fixed,
    })


def check_folner() -> CheckOutcome:
    """Certificates check, Q = C yields ratio 0, the diagonal fixture matches brute force."""
    rng = random.Random(SELFTEST_SEED + 5)
    subgroups = {}
    for arity, depth in FOLNER_SHAPES:
        tree = RootedTreeGroup(arity, depth)
        for name in FOLNER_SUBGROUPS:
            subgroups[(arity, depth, name)] = named_tree_subgroup(tree, name)
    keys = sorted(subgroups)
    instances = 100
    found = checked = 0
    for _ in range(instances):
        C = subgroups[keys[rng.randrange(len(keys))]]
        elements = C.elements()
        Q_reps = rng.sample(elements, min(len(elements), rng.randint(1, 3)))
        n = rng.randint(1, 4)
        result = folner_search(C, Q_reps, n)
        if isinstance(result, FolnerCertificate):
            found += 1
            if folner_certificate_check(result, C, Q_reps, n):
                checked += 1

    whole_set = 0
    for C in subgroups.values():
        result = folner_search(C, dense_selector(C), 10 ** 6)
        if isinstance(result, FolnerCertificate) and result.worst_ratio == 0:
            whole_set += 1

    tree = RootedTreeGroup(2, 2)
    diagonal = level_constant_subgroup(tree)
    root_swap = tree.vertex_element(0, 0, (1, 0))
    certificate = folner_search(diagonal, [root_swap], 2, allow_whole=False)
    brute = brute_force_folner(diagonal, [root_swap], 2, allow_whole=False)
    diagonal_agrees = (isinstance(certificate, FolnerCertificate) and brute is not None
                       and (certificate.level, len(certificate.H), certificate.worst_ratio) == brute)

    passed = found > 0 and checked == found and whole_set == len(subgroups) and diagonal_agrees
    return CheckOutcome(passed, f"{checked}/{found} certificates check, {whole_set}/{len(subgroups)} ratio-0 with Q = C", {
        'instances': instances,
        'certificates_found': found,
        'certificates_checked': checked,
        'ratio_zero_with_Q_equal_C': whole_set,
        'diagonal_fixture': certificate.to_dict(tree) if isinstance(certificate, FolnerCertificate) else None,
        'diagonal_brute_force': list(brute) if brute else None,
        'diagonal_agrees': diagonal_agrees,
    })


# ----------------------------------------------------------------------
# irs

def check_irs_oracle() -> CheckOutcome:
    """Normal closure against the least normal subgroup over all atoms; pushforwards are invariant."""
    rng = random.Random(SELFTEST_SEED + 6)
    groups = [fixture_group(name) for name in IRS_FIXTURES]
    normal = {id(G): [N for N in enumerate_subgroups(G) if is_normal(N)] for G in groups}
    measures = 200
    agreements = 0
    for i in range(measures):
        G = groups[i % len(groups)]
        mu = random_invariant_irs(G, rng)
        candidates = [N for N in normal[id(G)] if all(is_subgroup_of(H, N) for H in mu.support())]
        brute = min(candidates, key=lambda N: (N.order, N.sorted_elements()))
        if irs_normal_closure(mu) == brute:
            agreements += 1
    actions = 500
    invariant = 0
    for i in range(actions):
        mu = stabilizer_pushforward(random_pmp_action(groups[i % len(groups)], rng))
        if check_conjugation_invariance(mu).invariant:
            invariant += 1
    passed = agreements == measures and invariant == actions
    return CheckOutcome(passed, f"{agreements}/{measures} closures agree, {invariant}/{actions} pushforwards invariant", {
        'fixtures': list(IRS_FIXTURES), 'closure_agreements': agreements, 'invariant_pushforwards': invariant,
    })


# ----------------------------------------------------------------------
# convex-cone

def _signed_permutation(rng: random.Random, dimension: int):
    perm = list(range(dimension))
    rng.shuffle(perm)
    return tuple(
        tuple(Fraction(rng.choice((1, -1)) if perm[i] == j else 0) for j in range(dimension))
        for i in range(dimension)
    )


def _symmetric_body(rng: random.Random, dimension: int) -> ConvexBody:
    """Hull of the orbit of a random point under all signed coordinate permutations."""
    p = [Fraction(rng.randint(1, 4), 8) for _ in range(dimension)]
    points = set()
    for perm in itertools.permutations(range(dimension)):
        for signs in range(2 ** dimension):
            points.add(tuple(p[perm[i]] * (-1 if signs >> i & 1 else 1) for i in range(dimension)))
    return ConvexBody(sorted(points))


def check_convex_cone() -> CheckOutcome:
    """Additivity, equivariance, antitonicity, extreme points and measure verdicts."""
    rng = random.Random(SELFTEST_SEED + 7)
    dirs = {d: DirectionSet.default(d) for d in (2, 3)}
    counts = {'additivity': 0, 'barycenter_equivariance': 0, 'fix_equivariance': 0,
              'antitonicity': 0, 'extreme_point': 0}
    instances = 500
    for i in range(instances):
        d = 2 if i % 2 == 0 else 3
        A, B = random_body(rng, d), random_body(rng, d)
        quarters = rng.randint(0, 4)
        lam, mu = Fraction(quarters, 4), Fraction(rng.randint(0, 4 - quarters), 4)
        S = minkowski_sum(A, B, lam, mu)
        if all(s == lam * a + mu * b for s, a, b in zip(S.support_values(dirs[d]), A.support_values(dirs[d]),
                                                       B.support_values(dirs[d]))):
            counts['additivity'] += 1

        g = _signed_permutation(rng, d)
        nu = BodyMeasure.aggregate([(A, Fraction(1, 3)), (B, Fraction(2, 3))])
        if barycenter(act_on_measure(g, nu)) == apply_action(g, barycenter(nu)):
            counts['barycenter_equivariance'] += 1

        C = _symmetric_body(rng, d)
        H = [_signed_permutation(rng, d) for _ in range(rng.randint(1, 2))]
        conjugated = [matmul(matmul(g, h), transpose(g)) for h in H]
        if fix_set(conjugated, C) == apply_action(g, fix_set(H, C)):
            counts['fix_equivariance'] += 1
        if contains(fix_set(H, C), fix_set(H + [_signed_permutation(rng, d)], C)):
            counts['antitonicity'] += 1

        first = C if rng.random() < 0.3 else random_sub_body(rng, C)
        second = C if rng.random() < 0.3 else random_sub_body(rng, C)
        if extreme_point_check(C, first, second).consistent:
            counts['extreme_point'] += 1

    sweeps = 300
    violated = 0
    for i in range(sweeps):
        d = 2 if i % 2 == 0 else 3
        C = random_body(rng, d)
        candidates = [C, random_sub_body(rng, C), face_of(C, dirs[d].vectors[rng.randrange(len(dirs[d]))])]
        chosen = rng.sample(candidates, rng.randint(1, 3))
        weights = [Fraction(rng.randint(1, 9)) for _ in chosen]
        total = sum(weights)
        nu = BodyMeasure.aggregate((body, w / total) for body, w in zip(chosen, weights))
        if invariant_measure_test(nu, C, dirs[d]).verdict == VIOLATED:
            violated += 1

    half = Fraction(1, 2)
    horizontal = ConvexBody.segment((0, 0), (1, 0))
    vertical = ConvexBody.segment((0, 0), (0, 1))
    square = ConvexBody([(0, 0), (half, 0), (0, half), (half, half)])
    square_ok = (minkowski_sum(horizontal, vertical, half, half) == square
                 and barycenter(BodyMeasure([(horizontal, half), (vertical, half)])) == square)

    passed = all(c == instances for c in counts.values()) and violated == 0 and square_ok
    return CheckOutcome(passed, f"{min(counts.values())}/{instances} instances, {violated} violated verdicts", {
        'instances': instances, 'holds': counts, 'sweeps': sweeps, 'violated': violated,
        'minkowski_square': square_ok,
    })


def check_klein_pipeline() -> CheckOutcome:
    """Fix pushforward of invariant IRSs of the Klein group on the square."""
    action, square = klein_group_on_square()
    group = action.marked
    reflections = IRSDistribution(group, [(subgroup_generated(group, ["x"]), Fraction(1, 2)),
                                          (subgroup_generated(group, ["y"]), Fraction(1, 2))])
    report = fix_pipeline_report(reflections, action, square)
    half = Fraction(1, 2)
    expected_nu = BodyMeasure([(ConvexBody.segment((-half, 0), (half, 0)), half),
                               (ConvexBody.segment((0, -half), (0, half)), half)])
    quarter = Fraction(1, 4)
    expected_bary = ConvexBody([(sx * quarter, sy * quarter) for sx in (1, -1) for sy in (1, -1)])
    exact = report.passed and report.nu == expected_nu and report.barycenter == expected_bary

    rng = random.Random(SELFTEST_SEED + 8)
    random_passed = sum(1 for _ in range(20) if fix_pipeline_report(random_invariant_irs(group, rng),
                                                                     action, square).passed)
    passed = exact and random_passed == 20
    return CheckOutcome(passed, f"reflection IRS pipeline {'exact' if exact else 'differs'}, "
                                f"{random_passed}/20 random IRSs pass", {
                            'reflection_pipeline': report.to_dict(), 'random_pipelines_passed': random_passed,
                        })


# ----------------------------------------------------------------------
# subgroup-space

def check_chabauty() -> CheckOutcome:
    """Ultrametric inequality on seeded triples; n!Z agrees with {0} exactly below radius n!."""
    rng = random.Random(SELFTEST_SEED + 9)
    triples = 200
    ultrametric = 0
    for i in range(triples):
        if i % 2 == 0:
            subgroups = [integer_subgroup(rng.randint(0, 30)) for _ in range(3)]
            radius = 12
        else:
            subgroups = [random_schreier_subgroup(rng.randint(2, 6), rng.randint(0, 10 ** 6))
                         for _ in range(3)]
            radius = 4
        a, b, c = subgroups
        ab = chabauty_distance(a, b, radius).value
        bc = chabauty_distance(b, c, radius).value
        ac = chabauty_distance(a, c, radius).value
        if ac <= max(ab, bc) and chabauty_distance(a, a, radius).value == 0 \
                and chabauty_distance(b, a, radius).value == ab:
            ultrametric += 1

    zero = trivial_subgroup(integer_group())
    stabilization = []
    exact = True
    for n in range(1, 6):
        H = integer_subgroup(math.factorial(n))
        agree = [r for r in range(1, 25) if fingerprint(H, r) == fingerprint(zero, r)]
        expected = [r for r in range(1, 25) if r < math.factorial(n)]
        exact = exact and agree == expected
        stabilization.append({'n': n, 'agreement_radii': len(agree)})
    passed = ultrametric == triples and exact
    return CheckOutcome(passed, f"{ultrametric}/{triples} ultrametric triples, n!Z fingerprints "
                                f"{'exact' if exact else 'wrong'}", {
                            'triples': triples, 'ultrametric': ultrametric, 'factorial_fingerprints': stabilization,
                        })


# ----------------------------------------------------------------------
# cli

DETERMINISM_CONFIGS = (
    {'experiment': 'schreier-spectra', 'seed': 0,
     'parameters': {'family': 'cycle', 'indices': [4, 8, 16], 'cayley_radius': 6}},
    {'experiment': 'bs-convergence', 'seed': 3,
     'parameters': {'family': 'random', 'indices': [20, 40], 'trials': 2, 'cayley_radius': 6}},
    {'experiment': 'haar-ratio', 'seed': 0,
     'group': {'family': 'tree', 'arity': 2, 'depth': 2},
     'parameters': {'numerator': 'G', 'denominator': 'V1', 'via': 'V2'}},
)

# Re-run by the determinism check. The cli module would recurse.
DETERMINISM_SELFTEST_MODULE = "subgroup-space"


def _run_snapshot(runner: ExperimentRunner, config: Dict[str, Any], output_dir: Path) -> Dict[str, Any]:
    report = runner.run(dict(config, output_dir=str(output_dir)))
    produced = Path(report.config['output_dir'])
    return {
        'payload': report.payload(include_timing=False),
        'files': {name: (produced / name).read_bytes() for name in sorted(report.artifacts)},
    }


def serialized_report(report: RunReport) -> str:
    """report.json text without the wall-clock field."""
    return json.dumps(to_jsonable(report.payload(include_timing=False)), indent=2, sort_keys=True,
                      ensure_ascii=False)


def check_determinism() -> CheckOutcome:
    """
    Two runs of the same configs produce identical payloads and artifacts,
    and two self-test runs produce identical reports once timing is removed.
    """
    runner = ExperimentRunner(show_progress=False)
    identical = 0
    with tempfile.TemporaryDirectory() as tmp:
        for k, config in enumerate(DETERMINISM_CONFIGS):
            first = _run_snapshot(runner, config, Path(tmp) / f"{k}-first")
            second = _run_snapshot(runner, config, Path(tmp) / f"{k}-second")
            first['payload']['config'].pop('output_dir', None)
            second['payload']['config'].pop('output_dir', None)
            if first == second:
                identical += 1

    reports = [serialized_report(SelfTest(show_progress=False).run(module=DETERMINISM_SELFTEST_MODULE))
               for _ in range(2)]
    selftest_identical = reports[0] == reports[1]

    passed = identical == len(DETERMINISM_CONFIGS) and selftest_identical
    return CheckOutcome(passed, f"{identical}/{len(DETERMINISM_CONFIGS)} configs reproduce byte for byte, "
                                f"self-test reports {'identical' if selftest_identical else 'differ'}", {
        'experiments': [c['experiment'] for c in DETERMINISM_CONFIGS], 'identical': identical,
        'selftest_module': DETERMINISM_SELFTEST_MODULE, 'selftest_identical': selftest_identical,
    })


CRITERIA: List[Criterion] = [
    Criterion(1, "cycle-family spectra", "spectral", check_cycle_spectra),
    Criterion(2, "Cayley interval", "spectral", check_cayley_interval),
    Criterion(3, "random Schreier family", "spectral", check_random_family),
    Criterion(4, "Haar ratios", "tdlc", check_haar_ratios),
    Criterion(5, "Følner certificates", "tdlc", check_folner),
    Criterion(6, "IRS oracle equivalence", "irs", check_irs_oracle),
    Criterion(7, "convex cone properties", "convex-cone", check_convex_cone),
    Criterion(8, "Klein-square pipeline", "convex-cone", check_klein_pipeline),
    Criterion(9, "Chabauty fingerprints", "subgroup-space", check_chabauty),
    Criterion(10, "determinism", "cli", check_determinism),
]


class SelfTest:
    """
    Runs the acceptance criteria, optionally restricted to one module.
    """

    def __init__(self, container: Optional[DIContainer] = None, show_progress: bool = True,
                 criteria: Optional[List[Criterion]] = None):
        if container is None:
            container = DIContainer()
            DefaultServiceProvider(show_progress).configure_services(container)
        self.container = container
        self.criteria = list(CRITERIA if criteria is None else criteria)
        self.structured = LoggerManager.get_logger('irs_lab')

    def select(self, module: Optional[str] = None) -> List[Criterion]:
        """
        Criteria of one module, or all of them.

        Raises:
            ConfigInvalid: For an unknown module name
        """
        if module is None:
            return list(self.criteria)
        if module not in MODULES:
            raise ConfigInvalid(f"Unknown module '{module}'; expected one of {list(MODULES)}", field='filter')
        return [c for c in self.criteria if c.module == module]

    def run_criterion(self, criterion: Criterion) -> CriterionResult:
        try:
            outcome = criterion.check()
            result = CriterionResult(criterion.number, criterion.name, criterion.module,
                                     bool(outcome.passed), outcome.detail, outcome.data,
                                     tables=outcome.tables)
        except IRSLabError as e:
            result = CriterionResult(criterion.number, criterion.name, criterion.module, False,
                                     "raised an error", error=f"{type(e).__name__}: {e.message}")
        except Exception as e:
            result = CriterionResult(criterion.number, criterion.name, criterion.module, False,
                                     "raised an unexpected error", error=f"{type(e).__name__}: {e}")
        self.structured.log_criterion_result(f"{result.number}. {result.name}", result.passed,
                                             result.error or result.detail, selftest_module=result.module)
        return result

    def run(self, module: Optional[str] = None,
            output_dir: Optional[Union[str, Path]] = None) -> RunReport:
        """
        Run the selected criteria in order.

        Args:
            module (str): Restrict to one module (see MODULES)
            output_dir: Write ``report.json`` there when given

        Returns:
            RunReport: passed is True iff every selected criterion passed
        """
        selected = self.select(module)
        statistics = self.container.resolve('statistics')
        progress = self.container.resolve('progress_reporter')
        statistics.reset()
        statistics.start_session()
        started = time.perf_counter()

        results = []
        progress.start(len(selected), "Self-test")
        try:
            for criterion in selected:
                progress.set_description(criterion.name)
                result = self.run_criterion(criterion)
                statistics.increment('criteria_passed' if result.passed else 'criteria_failed')
                statistics.record_item(criterion.name, result.passed, result.error)
                results.append(result)
                progress.update(1)
        finally:
            progress.finish()

        elapsed = time.perf_counter() - started
        statistics.end_session()
        passed = all(r.passed for r in results)
        report = RunReport(
            experiment='selftest',
            seed=SELFTEST_SEED,
            config={'filter': module},
            results={'criteria': [r.to_dict() for r in results], 'counters': statistics.get_counters()},
            wall_clock_seconds=elapsed,
            passed=passed,
        )
        if output_dir is not None:
            for result in results:
                for name, (header, rows) in sorted(result.tables.items()):
                    report.artifacts.append(write_csv(Path(output_dir) / name, header, rows).name)
            path = write_json(Path(output_dir) / REPORT_FILE, report.payload())
            report.artifacts.append(path.name)
        self.structured.log_run_summary(statistics.get_counters(), elapsed)
        return report
