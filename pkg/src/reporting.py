#!/usr/bin/env python3
"""
Reporting Module

This module writes run artifacts: JSON reports, CSV tables with full
precision numbers and deterministic SVG plots.
"""

import csv
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

try:
    from .convex_cone import ConvexBody
    from .quadratic_field import QuadraticNumber
    from .spectral import ApproximationReport
except ImportError:
    from convex_cone import ConvexBody
    from quadratic_field import QuadraticNumber
    from spectral import ApproximationReport

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1

# fixed ids and no date metadata keep SVG output byte-identical across runs
plt.rcParams['svg.hashsalt'] = 'irs-lab'
plt.rcParams['svg.fonttype'] = 'none'
SVG_METADATA = {'Date': None, 'Creator': None}


def format_number(value: Any) -> str:
    """17 significant digits for floats, p/q for rationals, empty for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Exact numbers become "p/q" or "(a+b√s)/q" strings, tuples lists, sets sorted lists."""
    if isinstance(value, (Fraction, QuadraticNumber)):
        return format_number(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    return value


def write_json(path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(to_jsonable(payload), f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    return path


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])
    return path


def spectra_header(radius: int) -> List[str]:
    return ["index", "rho0", f"bs_distance_R{radius}"]


def spectra_rows(report: ApproximationReport) -> List[List[Any]]:
    return [[row.index, row.rho0, row.bs_distance] for row in report.rows]


def write_spectra_csv(path: Union[str, Path], report: ApproximationReport) -> Path:
    return write_csv(path, spectra_header(report.radius), spectra_rows(report))


def plot_spectra(report: ApproximationReport, path: Union[str, Path]) -> Path:
    """Index against rho_0 with the Cayley interval as a band."""
    indices = [row.index for row in report.rows if row.rho0 is not None]
    values = [row.rho0 for row in report.rows if row.rho0 is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if indices:
        ax.plot(indices, values, marker='o', label='rho_0')
    all_indices = [row.index for row in report.rows]
    ax.fill_between([min(all_indices), max(all_indices)], report.cayley.lower, report.cayley.upper,
                    alpha=0.3, label='Cayley interval')
    ax.set_xscale('log')
    ax.set_xlabel('index')
    ax.set_ylabel('spectral radius on l2_0')
    ax.legend()
    return _save(fig, path)


def plot_bs_distance(report: ApproximationReport, path: Union[str, Path]) -> Path:
    """Index against the distance to the Cayley ball distribution."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([row.index for row in report.rows], [float(row.bs_distance) for row in report.rows], marker='o')
    ax.set_xscale('log')
    ax.set_xlabel('index')
    ax.set_ylabel(f'BS distance at radius {report.radius}')
    return _save(fig, path)


def render_svg(bodies: Sequence[ConvexBody], path: Union[str, Path],
               labels: Optional[Sequence[str]] = None) -> Path:
    """Draw 2-D bodies inside the unit circle."""
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.add_patch(plt.Circle((0, 0), 1, fill=False, linestyle=':', color='grey'))
    for k, body in enumerate(bodies):
        if body.dimension != 2:
            raise ValueError("Only planar bodies can be drawn")
        label = labels[k] if labels else None
        points = _cyclic([(float(x), float(y)) for x, y in body.vertices])
        if len(points) >= 3:
            ax.add_patch(Polygon(points, closed=True, fill=False, label=label, color=f"C{k % 10}"))
        else:
            xs, ys = zip(*points)
            ax.plot(xs, ys, marker='o', label=label, color=f"C{k % 10}")
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect('equal')
    if labels:
        ax.legend(loc='upper right', fontsize='small')
    return _save(fig, path)


def _cyclic(points: List[tuple]) -> List[tuple]:
    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)
    return sorted(points, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format='svg', metadata=SVG_METADATA)
    plt.close(fig)
    logger.debug(f"Wrote plot {path}")
    return path
