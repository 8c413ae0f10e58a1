"""Quality indicators for archives of metric points.

Points are (n, T) arrays of metric values. `higher_is_better` gives the direction of
each metric; indicators that need a single convention convert internally.
"""

from collections.abc import Sequence

import numpy as np
from pymoo.indicators.hv import HV
from scipy.spatial import ConvexHull, QhullError

from src.core.exceptions import ContractViolationError
from src.core.models import MetricBounds

# Points closer than this on one metric are the same level.
LEVEL_TOL = 1e-9
HV_REFERENCE = 1.1


def bounded_levels(points: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Sorted lo, the distinct clipped points strictly inside (lo, hi), and hi."""
    kept = [float(lo)]
    for value in np.sort(np.clip(np.asarray(points, dtype=float), lo, hi)):
        if value - kept[-1] > LEVEL_TOL and hi - value > LEVEL_TOL:
            kept.append(float(value))
    kept.append(float(hi))
    return np.array(kept)


def max_adjacent_gap(points: np.ndarray, lo: float, hi: float) -> float:
    """Largest gap between adjacent levels, bounds included."""
    return float(np.max(np.diff(bounded_levels(points, lo, hi))))


def _check(points: np.ndarray, bounds: MetricBounds | None = None) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise ContractViolationError(f"expected a non-empty (n, T) array, got shape {points.shape}")
    if bounds is not None and points.shape[1] != len(bounds):
        raise ContractViolationError(f"points have {points.shape[1]} metrics, bounds {len(bounds)}")
    return points


def coverage_span(points: np.ndarray, bounds: MetricBounds) -> np.ndarray:
    """Per-metric range max - min of the points clipped into the bounds."""
    clipped = np.clip(_check(points, bounds), bounds.lo, bounds.hi)
    return clipped.max(axis=0) - clipped.min(axis=0)


def hypervolume(
    points: np.ndarray,
    bounds: MetricBounds,
    higher_is_better: Sequence[bool] | None = None,
) -> float:
    """Hypervolume of the points after scaling the bounds box to the unit cube.

    Metrics are turned into minimisation form; the reference point is 1.1 on every axis.
    """
    points = _check(points, bounds)
    scaled = (np.clip(points, bounds.lo, bounds.hi) - bounds.lo) / (bounds.hi - bounds.lo)
    maximize = np.ones(points.shape[1], dtype=bool) if higher_is_better is None else np.array(higher_is_better)
    objectives = np.where(maximize, 1.0 - scaled, scaled)
    indicator = HV(ref_point=np.full(points.shape[1], HV_REFERENCE))
    return float(indicator(objectives))


def supported_mask(
    points: np.ndarray,
    higher_is_better: Sequence[bool] | None = None,
    tol: float = 1e-6,
) -> np.ndarray:
    """Which points lie on the convex hull of the set, i.e. are reachable by weighted sums.

    The hull is taken over the points plus their componentwise-worst corner, so the
    upper boundary is the supported part of the frontier. Degenerate sets (too few or
    affinely dependent points) count as fully supported.
    """
    points = _check(points)
    maximize = np.ones(points.shape[1], dtype=bool) if higher_is_better is None else np.array(higher_is_better)
    oriented = np.where(maximize, points, -points)
    corner = oriented.min(axis=0)
    try:
        hull = ConvexHull(np.vstack([oriented, corner]))
    except (QhullError, ValueError):
        return np.ones(len(points), dtype=bool)
    normals, offsets = hull.equations[:, :-1], hull.equations[:, -1]
    distances = oriented @ normals.T + offsets
    return distances.max(axis=1) >= -tol
