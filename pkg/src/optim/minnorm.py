"""Frank-Wolfe solver for the min-norm point in the convex hull of T gradients.

Minimises ||sum_t alpha_t g_t||^2 over the probability simplex. The Gram matrix is
computed once per solve; every iteration after that works in T dimensions only.
"""

import numpy as np
from pydantic import Field, ValidationError, field_validator

from src.core.config import settings
from src.core.exceptions import ContractViolationError, DivergenceError
from src.core.models import ArrayModel, GradientSet, Matrix, SimplexWeights, Vector

# Curvature below which the line-search quadratic is treated as flat.
FLAT_CURVATURE = 1e-12
# Weights above this count as part of the support during refinement.
SUPPORT_TOL = 1e-10


class GramMatrix(ArrayModel):
    """Pairwise inner products of the gradients."""

    m: Matrix

    @field_validator("m")
    @classmethod
    def _check(cls, m: np.ndarray) -> np.ndarray:
        if m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"Gram matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("Gram matrix contains NaN or Inf")
        scale = max(1.0, float(np.max(np.abs(m))))
        if not np.allclose(m, m.T, atol=1e-9 * scale, rtol=0.0):
            raise ValueError("Gram matrix must be symmetric")
        if m.shape[0] <= 16 and float(np.linalg.eigvalsh(m).min()) < -1e-8 * scale:
            raise ValueError("Gram matrix must be positive semidefinite")
        return m

    def __len__(self) -> int:
        return int(self.m.shape[0])


class MinNormResult(ArrayModel):
    """Solution of the min-norm problem.

    `q_history` holds alpha^T M alpha at the start and after every iteration.
    """

    alpha: SimplexWeights
    direction: Vector
    sq_norm: float = Field(ge=0.0)
    iterations: int = Field(ge=0)
    q_history: Vector


def gram_matrix(g: GradientSet) -> GramMatrix:
    """Raises DivergenceError when finite gradients overflow their inner products."""
    grads = g.grads
    with np.errstate(over="ignore", invalid="ignore"):
        m = grads @ grads.T
    if not np.all(np.isfinite(m)):
        raise DivergenceError("Gram matrix overflowed", step=0)
    return GramMatrix(m=(m + m.T) / 2.0)


def fw_linear_minimizer(alpha: SimplexWeights, m: GramMatrix) -> int:
    """Vertex of the simplex minimising the linearised objective; lowest index on ties."""
    if len(alpha) != len(m):
        raise ContractViolationError(f"alpha has {len(alpha)} entries, Gram matrix is {len(m)}x{len(m)}")
    return int(np.argmin(m.m @ alpha.alpha))


def fw_line_search(alpha: SimplexWeights, t_hat: int, m: GramMatrix) -> float:
    """Exact step toward vertex `t_hat`, clipped to [0, 1]."""
    if len(alpha) != len(m):
        raise ContractViolationError(f"alpha has {len(alpha)} entries, Gram matrix is {len(m)}x{len(m)}")
    if not 0 <= t_hat < len(alpha):
        raise ContractViolationError(f"vertex index {t_hat} out of range")
    return _line_search(alpha.alpha, t_hat, m.m)


def _line_search(alpha: np.ndarray, t_hat: int, m: np.ndarray) -> float:
    # q(gamma) = (1-gamma)^2 a + 2 gamma (1-gamma) b + gamma^2 c
    m_alpha = m @ alpha
    a = float(alpha @ m_alpha)
    b = float(m_alpha[t_hat])
    c = float(m[t_hat, t_hat])
    curvature = a - 2.0 * b + c
    if curvature <= FLAT_CURVATURE:
        return 0.0 if a <= c else 1.0
    return float(np.clip((a - b) / curvature, 0.0, 1.0))


def _affine_minimizer(m: np.ndarray, support: list[int]) -> np.ndarray:
    """Minimiser of w^T M w on the affine hull of the support vertices."""
    k = len(support)
    sub = m[np.ix_(support, support)]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * sub
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    weights = np.zeros(m.shape[0])
    weights[support] = solution[:k]
    return weights


def _refine(m: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Wolfe's corral iterations started from a Frank-Wolfe iterate.

    The minor cycle moves toward the affine minimiser of the current support and drops
    the vertices that reach zero; the major cycle adds the vertex violating the KKT
    conditions most. Returns the refined point unless it is worse than `alpha`.
    """
    x = alpha.copy()
    support = [int(t) for t in np.flatnonzero(x > SUPPORT_TOL)]
    for _ in range(4 * m.shape[0] + 4):
        while True:
            y = _affine_minimizer(m, support)
            negative = [t for t in support if y[t] < -1e-12]
            if not negative:
                x = np.clip(y, 0.0, None)
                break
            theta = min(x[t] / (x[t] - y[t]) for t in negative)
            x = np.clip(x + theta * (y - x), 0.0, None)
            support = [t for t in support if x[t] > SUPPORT_TOL]
            x[[t for t in range(len(x)) if t not in support]] = 0.0
        x /= x.sum()
        q = float(x @ m @ x)
        grad = m @ x
        violator = int(np.argmin(grad))
        if grad[violator] >= q - 1e-12 * max(1.0, abs(q)) or violator in support:
            break
        support = sorted([*support, violator])
    return x if float(x @ m @ x) <= float(alpha @ m @ alpha) else alpha


def frank_wolfe_solve(
    g: GradientSet,
    max_iters: int | None = None,
    gamma_tol: float | None = None,
    polish: bool = True,
) -> MinNormResult:
    """Min-norm element of the convex hull of the gradients.

    Starts from the uniform alpha and iterates linear minimiser, exact line search and
    the convex update until the step falls below `gamma_tol` or `max_iters` is reached.
    With `polish` the final iterate is refined on its active set.
    """
    max_iters = settings.fw_max_iters if max_iters is None else max_iters
    gamma_tol = settings.fw_gamma_tol if gamma_tol is None else gamma_tol
    if max_iters < 1:
        raise ContractViolationError(f"max_iters must be >= 1, got {max_iters}")
    if gamma_tol <= 0:
        raise ContractViolationError(f"gamma_tol must be positive, got {gamma_tol}")
    if not isinstance(g, GradientSet):
        try:
            g = GradientSet(grads=g)
        except ValidationError as e:
            raise ContractViolationError(f"invalid gradient set: {e}") from e

    grads = g.grads
    n = g.n_objectives
    m = gram_matrix(g).m
    alpha = np.full(n, 1.0 / n)
    q_history = [float(alpha @ m @ alpha)]
    iterations = 0

    # Any alpha satisfies the stationarity conditions when every gradient vanishes.
    if n > 1 and np.any(m):
        for iterations in range(1, max_iters + 1):  # noqa: B007
            t_hat = int(np.argmin(m @ alpha))
            gamma = _line_search(alpha, t_hat, m)
            alpha = (1.0 - gamma) * alpha
            alpha[t_hat] += gamma
            q_history.append(float(alpha @ m @ alpha))
            if gamma <= gamma_tol:
                break
        if polish:
            alpha = _refine(m, alpha)

    weights = SimplexWeights(alpha=alpha)
    direction = weights.alpha @ grads
    return MinNormResult(
        alpha=weights,
        direction=direction,
        sq_norm=max(0.0, float(direction @ direction)),
        iterations=iterations,
        q_history=q_history,
    )
