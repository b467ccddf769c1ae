"""ADMM solver for the adaptive graph-convolutional self-expressive model.

The model couples feature aggregation through the operator S = (C + I)/2
with self-expression of the data by its own coefficient matrix:

    min_{F,C}  ||2F - (C + I)X||_F^2 + alpha ||X - CF||_F^2
               + beta ||C - C^2||_F^2
    s.t.       C = C^T,  C1 = 1,  C >= 0,  diag(C) = 0

After splitting the constraints onto an auxiliary copy Z of C (which
carries symmetry, nonnegativity, and the zero diagonal, while C keeps
the row-sum constraint), the augmented Lagrangian

    L = ||2F - (C + I)X||_F^2 + alpha ||X - CF||_F^2 + beta ||C - CZ||_F^2
        + <Gamma, C - Z> + <Lambda, C1 - 1>
        + mu/2 (||C - Z||_F^2 + ||C1 - 1||_F^2)

is minimized block-wise in C, F, and Z. Every block subproblem is an
unconstrained convex quadratic whose stationarity condition is a linear
system with a symmetric positive-definite factor for mu > 0, solved by
Cholesky factorization (never by forming an explicit inverse). Z is then
projected onto its constraint set, the multipliers take a dual ascent
step, and the penalty grows geometrically up to a cap.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve


class FactorizationError(RuntimeError):
    """A block system could not be factorized numerically."""

    def __init__(self, block: str, iteration: int):
        self.block = block
        self.iteration = iteration
        super().__init__(
            f"Cholesky factorization failed in the {block} update at iteration {iteration}"
        )


@dataclass(frozen=True)
class SolverConfig:
    """Model weights and ADMM schedule constants.

    alpha weighs the self-expression residual ||X - CF||^2, beta the
    smoothing term ||C - CZ||^2. The penalty starts at mu0, grows by rho
    each iteration, and is capped at mu_max; iteration stops when both
    feasibility residuals fall to epsilon or max_iter is reached.
    """

    alpha: float
    beta: float
    mu0: float = 1e-6
    rho: float = 1.1
    mu_max: float = 1e30
    epsilon: float = 1e-7
    max_iter: int = 500

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.mu0 <= 0:
            raise ValueError("initial penalty mu0 must be positive")
        if self.rho <= 1:
            raise ValueError("penalty growth rho must exceed 1")
        if self.mu_max < self.mu0:
            raise ValueError("penalty cap mu_max must be at least mu0")
        if self.epsilon <= 0:
            raise ValueError("stopping tolerance epsilon must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")


@dataclass
class SolverState:
    """Mutable iterates of one ADMM run.

    C is n-by-n, F n-by-d, Z an n-by-n feasible copy of C, Gamma the
    n-by-n multiplier for C = Z, Lambda the length-n multiplier for
    C1 = 1. residual_history holds one (max|C - Z|, max|C1 - 1|) pair
    per completed iteration; delta_history the squared Frobenius change
    of C, F, Z per iteration.
    """

    C: np.ndarray
    F: np.ndarray
    Z: np.ndarray
    Gamma: np.ndarray
    Lambda: np.ndarray
    mu: float
    t: int = 0
    residual_history: list = field(default_factory=list)
    delta_history: list = field(default_factory=list)


@dataclass(frozen=True)
class SolverResult:
    """Final iterates and convergence diagnostics of :func:`solve`."""

    C_star: np.ndarray
    Z_star: np.ndarray
    F_star: np.ndarray
    converged: bool
    iterations: int
    residual_history: list
    delta_history: list
    iter_seconds: list


def _data_values(X) -> np.ndarray:
    values = np.asarray(getattr(X, "values", X), dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-d sample matrix, got shape {values.shape}")
    return values


def initialize(X, config: SolverConfig) -> SolverState:
    """Start state: F = X, C = Z = 0, zero multipliers, mu = mu0, t = 0."""
    Xv = _data_values(X)
    n = Xv.shape[0]
    return SolverState(
        C=np.zeros((n, n)),
        F=Xv.copy(),
        Z=np.zeros((n, n)),
        Gamma=np.zeros((n, n)),
        Lambda=np.zeros(n),
        mu=config.mu0,
    )


def _spd_solve(M: np.ndarray, B: np.ndarray, block: str, iteration: int) -> np.ndarray:
    try:
        return cho_solve(cho_factor(M, lower=True), B)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(block, iteration) from exc


def update_C(state: SolverState, X, config: SolverConfig) -> np.ndarray:
    """Exact minimizer of the augmented Lagrangian in C, all else fixed.

    Stationarity in C gives C M = R with the symmetric positive-definite
    right factor

        M = 2 X X^T + 2 alpha F F^T + 2 beta (I - Z)(I - Z)^T
            + mu (I + 1 1^T)
        R = 4 F X^T - 2 X X^T + 2 alpha X F^T + mu (Z + 1 1^T)
            - Gamma - Lambda 1^T

    solved as M C^T = R^T by Cholesky.
    """
    Xv = _data_values(X)
    n = Xv.shape[0]
    alpha, beta, mu = config.alpha, config.beta, state.mu
    eye = np.eye(n)
    ones = np.ones((n, n))
    XXt = Xv @ Xv.T
    ImZ = eye - state.Z
    M = 2.0 * XXt + 2.0 * alpha * (state.F @ state.F.T) + 2.0 * beta * (ImZ @ ImZ.T)
    M += mu * (eye + ones)
    R = 4.0 * (state.F @ Xv.T) - 2.0 * XXt + 2.0 * alpha * (Xv @ state.F.T)
    R += mu * (state.Z + ones) - state.Gamma - np.outer(state.Lambda, np.ones(n))
    return _spd_solve(M, R.T, "C", state.t).T


def update_F(state: SolverState, X, config: SolverConfig) -> np.ndarray:
    """Exact minimizer in F: solve (alpha C^T C + 4I) F = (2C + 2I + alpha C^T) X."""
    Xv = _data_values(X)
    n = Xv.shape[0]
    C = state.C
    eye = np.eye(n)
    M = config.alpha * (C.T @ C) + 4.0 * eye
    B = (2.0 * C + 2.0 * eye + config.alpha * C.T) @ Xv
    return _spd_solve(M, B, "F", state.t)


def update_Z(state: SolverState, config: SolverConfig) -> np.ndarray:
    """Exact minimizer in Z before projection.

    Solves (2 beta C^T C + mu I) Z = 2 beta C^T C + Gamma + mu C.
    """
    C = state.C
    n = C.shape[0]
    G = 2.0 * config.beta * (C.T @ C)
    M = G + state.mu * np.eye(n)
    B = G + state.Gamma + state.mu * C
    return _spd_solve(M, B, "Z", state.t)


def project_Z(Z: np.ndarray) -> np.ndarray:
    """Map onto {Z : Z = Z^T, Z >= 0, diag(Z) = 0}.

    Order matters and is fixed: zero the diagonal, clamp negatives to 0,
    then symmetrize by (Z + Z^T)/2. The output is exactly symmetric with
    an exactly zero diagonal, and the map is idempotent.
    """
    P = np.array(Z, dtype=np.float64, copy=True)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {P.shape}")
    np.fill_diagonal(P, 0.0)
    np.maximum(P, 0.0, out=P)
    return (P + P.T) / 2.0


def update_multipliers(state: SolverState, config: SolverConfig):
    """Dual ascent and penalty growth.

    Gamma' = Gamma + mu (C - Z);  Lambda' = Lambda + mu (C1 - 1);
    mu' = min(mu_max, rho mu).
    """
    Gamma = state.Gamma + state.mu * (state.C - state.Z)
    Lambda = state.Lambda + state.mu * (state.C.sum(axis=1) - 1.0)
    mu = min(config.mu_max, config.rho * state.mu)
    return Gamma, Lambda, mu


def residuals(state: SolverState) -> tuple[float, float]:
    """Feasibility residuals (max|C - Z|, max|C1 - 1|)."""
    r1 = float(np.max(np.abs(state.C - state.Z)))
    r2 = float(np.max(np.abs(state.C.sum(axis=1) - 1.0)))
    return r1, r2


def augmented_lagrangian(state: SolverState, X, config: SolverConfig) -> float:
    """Evaluate the augmented Lagrangian at the current iterates.

    All norms are Frobenius; the multiplier pairings are trace inner
    products.
    """
    Xv = _data_values(X)
    n = Xv.shape[0]
    C, F, Z = state.C, state.F, state.Z
    recon = 2.0 * F - (C + np.eye(n)) @ Xv
    self_expr = Xv - C @ F
    smooth = C - C @ Z
    gap = C - Z
    row_gap = C.sum(axis=1) - 1.0
    value = np.sum(recon * recon)
    value += config.alpha * np.sum(self_expr * self_expr)
    value += config.beta * np.sum(smooth * smooth)
    value += np.sum(state.Gamma * gap) + np.dot(state.Lambda, row_gap)
    value += 0.5 * state.mu * (np.sum(gap * gap) + np.dot(row_gap, row_gap))
    return float(value)


def solve(X, config: SolverConfig) -> SolverResult:
    """Run the full ADMM loop on the sample matrix X.

    Per iteration, in order: C update, F update, Z update plus
    projection, then multiplier/penalty updates. Stops once both
    feasibility residuals are at most epsilon, or after max_iter
    iterations (converged=False in that case, final iterates still
    returned).

    Raises
    ------
    ValueError
        If X has fewer than two samples: the row-sum and zero-diagonal
        constraints are jointly infeasible for a single sample.
    FactorizationError
        If a block system fails to factorize mid-run.
    """
    Xv = _data_values(X)
    if Xv.shape[0] < 2:
        raise ValueError("need at least 2 samples; constraints are infeasible for n = 1")
    state = initialize(Xv, config)
    iter_seconds: list[float] = []
    r1, r2 = residuals(state)
    while (r1 > config.epsilon or r2 > config.epsilon) and state.t < config.max_iter:
        tic = time.perf_counter()
        state.t += 1
        C_prev, F_prev, Z_prev = state.C, state.F, state.Z
        state.C = update_C(state, Xv, config)
        state.F = update_F(state, Xv, config)
        state.Z = project_Z(update_Z(state, config))
        state.Gamma, state.Lambda, state.mu = update_multipliers(state, config)
        r1, r2 = residuals(state)
        state.residual_history.append((r1, r2))
        state.delta_history.append(
            (
                float(np.sum((state.C - C_prev) ** 2)),
                float(np.sum((state.F - F_prev) ** 2)),
                float(np.sum((state.Z - Z_prev) ** 2)),
            )
        )
        iter_seconds.append(time.perf_counter() - tic)
    return SolverResult(
        C_star=state.C,
        Z_star=state.Z,
        F_star=state.F,
        converged=bool(r1 <= config.epsilon and r2 <= config.epsilon),
        iterations=state.t,
        residual_history=list(state.residual_history),
        delta_history=list(state.delta_history),
        iter_seconds=iter_seconds,
    )
