"""Pareto dominance and stationarity predicates."""

import numpy as np

from src.core.exceptions import ContractViolationError
from src.core.models import GradientSet, ObjectiveValues
from src.optim.minnorm import frank_wolfe_solve


def dominates(a: ObjectiveValues, b: ObjectiveValues) -> bool:
    """True iff `a` is no worse than `b` everywhere and differs somewhere (minimisation)."""
    if len(a) != len(b):
        raise ContractViolationError(
            f"objective vectors differ in length: {len(a)} != {len(b)}"
        )
    return bool(np.all(a.losses <= b.losses) and np.any(a.losses != b.losses))


def is_pareto_stationary(g: GradientSet, tol: float) -> bool:
    """True iff the min-norm element of the gradients' convex hull has norm <= tol."""
    if tol <= 0:
        raise ContractViolationError(f"tol must be positive, got {tol}")
    result = frank_wolfe_solve(g)
    return float(np.sqrt(result.sq_norm)) <= tol


def dominates_with_tol(
    a: np.ndarray, b: np.ndarray, maximize: bool = False, tol: float = 0.0
) -> bool:
    """Dominance on raw arrays where a strict improvement must exceed `tol`."""
    if a.shape != b.shape:
        raise ContractViolationError(f"shape mismatch: {a.shape} != {b.shape}")
    if maximize:
        a, b = -a, -b
    return bool(np.all(a <= b) and np.any(a < b - tol))


def non_dominated_mask(points: np.ndarray, maximize: bool = False, tol: float = 0.0) -> np.ndarray:
    """Boolean mask of the rows of `points` no other row dominates."""
    points = np.asarray(points, dtype=float)
    mask = np.ones(len(points), dtype=bool)
    for i, candidate in enumerate(points):
        for j, other in enumerate(points):
            if i != j and dominates_with_tol(other, candidate, maximize=maximize, tol=tol):
                mask[i] = False
                break
    return mask
