"""Analytic toy problems with known Pareto sets."""

import numpy as np

from src.core.exceptions import ContractViolationError
from src.problems.base import Problem


class QuadraticProblem(Problem):
    """T convex quadratics L_t(theta) = ||theta - c_t||^2.

    The Pareto set is the convex hull of the centres. The metric of objective t is the
    normalised negated loss clip(1 - L_t / D, 0, 1), D being the largest squared
    distance between two centres, so on the Pareto set every metric spans [0, 1].
    """

    def __init__(
        self,
        centers: np.ndarray,
        init: np.ndarray | None = None,
        init_scale: float = 1.0,
    ) -> None:
        centers = np.array(centers, dtype=float)
        if centers.ndim != 2 or centers.shape[0] < 1 or centers.shape[1] < 1:
            raise ContractViolationError(f"centers must be a (T, d) array, got {centers.shape}")
        self.centers = centers
        self.init = None if init is None else np.array(init, dtype=float)
        if self.init is not None and self.init.shape != (centers.shape[1],):
            raise ContractViolationError(f"init must have length {centers.shape[1]}")
        self.init_scale = init_scale
        diffs = centers[:, None, :] - centers[None, :, :]
        spread = float(np.max(np.sum(diffs**2, axis=-1)))
        self.scale = spread if spread > 0 else 1.0
        self.metric_names = tuple(f"m{t + 1}" for t in range(len(centers)))
        self.higher_is_better = (True,) * len(centers)

    @property
    def n_params(self) -> int:
        return int(self.centers.shape[1])

    def initial_params(self, seed: int) -> np.ndarray:
        if self.init is not None:
            return self.init.copy()
        rng = np.random.default_rng(seed)
        return self.centers.mean(axis=0) + self.init_scale * rng.standard_normal(self.n_params)

    def losses(self, theta: np.ndarray, indices: np.ndarray | None = None) -> np.ndarray:
        return np.sum((theta[None, :] - self.centers) ** 2, axis=1)

    def gradients(self, theta: np.ndarray, indices: np.ndarray | None = None) -> np.ndarray:
        return 2.0 * (theta[None, :] - self.centers)

    def metrics(self, theta: np.ndarray) -> np.ndarray:
        return np.clip(1.0 - self.losses(theta) / self.scale, 0.0, 1.0)


class ConcaveProblem(Problem):
    """Two objectives f_t = 1 - exp(-||x -+ u||^2) with u = (1, 1) / sqrt(2).

    The Pareto set is the segment between -u and u and the frontier is concave, so
    weighted sums of the losses only reach points near its two ends. Metrics are
    exp(-||x -+ u||^2) = 1 - f_t.

    The start point sits on the perpendicular bisector of the segment, shifted by
    `tie_break` toward u so that equal weights do not converge to the symmetric saddle.
    """

    metric_names = ("m1", "m2")
    higher_is_better = (True, True)

    def __init__(self, offset: float = 0.5, tie_break: float = 0.05) -> None:
        self.u = np.array([1.0, 1.0]) / np.sqrt(2.0)
        self.v = np.array([1.0, -1.0]) / np.sqrt(2.0)
        self.offset = offset
        self.tie_break = tie_break

    @property
    def n_params(self) -> int:
        return 2

    def initial_params(self, seed: int) -> np.ndarray:
        return self.tie_break * self.u + self.offset * self.v

    def _sq_dists(self, x: np.ndarray) -> np.ndarray:
        return np.array([np.sum((x - self.u) ** 2), np.sum((x + self.u) ** 2)])

    def losses(self, theta: np.ndarray, indices: np.ndarray | None = None) -> np.ndarray:
        return 1.0 - np.exp(-self._sq_dists(theta))

    def gradients(self, theta: np.ndarray, indices: np.ndarray | None = None) -> np.ndarray:
        weights = np.exp(-self._sq_dists(theta))
        return 2.0 * np.vstack([(theta - self.u) * weights[0], (theta + self.u) * weights[1]])

    def metrics(self, theta: np.ndarray) -> np.ndarray:
        return np.exp(-self._sq_dists(theta))
