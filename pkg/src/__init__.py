"""
irs-lab - Experiments on invariant random subgroups and amenability.

This package provides modules for:
- Marked groups, subgroups and the Chabauty space of subgroups
- Invariant random subgroups, normal closures and ergodic components
- Schreier graph spectra and Benjamini-Schramm statistics
- Haar ratios and Følner sets in rooted-tree automorphism groups
- Convex bodies, barycenters and fixed-set pushforwards
- Command-line interface for experiment configs and the self-test

Main modules:
- group_core: Free and finite marked groups
- subgroup_space: Subgroups, fingerprints and Chabauty distances
- irs: Invariant random subgroups
- spectral: Schreier graphs and local approximation reports
- tree_groups: Rooted-tree truncations, Haar ratios and Følner search
- convex_cone: Convex bodies and orthogonal actions
- irs_lab: Main application with CLI interface
"""

__version__ = "1.0.0"
__author__ = "irs-lab Team"
__description__ = "Experiments on invariant random subgroups and amenability"

try:
    from .convex_cone import BodyMeasure, ConvexBody, DirectionSet, OrthogonalGroup
    from .experiment_runner import ExperimentRunner, RunReport
    from .group_core import FiniteGroup, FreeGroup, MarkedGroup
    from .irs import FinitePMPAction, IRSDistribution
    from .irs_lab import IRSLab
    from .selftest import SelfTest
    from .spectral import SchreierGraph
    from .subgroup_space import CosetTable, ElementSet, Subgroup
    from .tree_groups import CosetUnion, RootedTreeGroup, TreeSubgroup
except ImportError:
    from convex_cone import BodyMeasure, ConvexBody, DirectionSet, OrthogonalGroup
    from experiment_runner import ExperimentRunner, RunReport
    from group_core import FiniteGroup, FreeGroup, MarkedGroup
    from irs import FinitePMPAction, IRSDistribution
    from irs_lab import IRSLab
    from selftest import SelfTest
    from spectral import SchreierGraph
    from subgroup_space import CosetTable, ElementSet, Subgroup
    from tree_groups import CosetUnion, RootedTreeGroup, TreeSubgroup

__all__ = [
    'BodyMeasure', 'ConvexBody', 'DirectionSet', 'OrthogonalGroup',
    'ExperimentRunner', 'RunReport',
    'FiniteGroup', 'FreeGroup', 'MarkedGroup',
    'FinitePMPAction', 'IRSDistribution',
    'IRSLab',
    'SelfTest',
    'SchreierGraph',
    'CosetTable', 'ElementSet', 'Subgroup',
    'CosetUnion', 'RootedTreeGroup', 'TreeSubgroup',
]
