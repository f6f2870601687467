"""ADMM solvers for the element-wise l1 and row-wise l2,1 self-expression programs.

Both solve penalized problems of the form

    min_C  R(C) + lam/2 * ||X_t - X_d C||_F^2     [s.t. diag(C) = 0]

with ``R`` either the entry-wise l1 norm or the sum of row l2 norms. The
split ``A = C`` gives one linear system per iteration whose matrix
``lam * X_d^T X_d + rho * I`` never changes, so it is Cholesky-factored once.

The data-fidelity weight is set relative to the smallest weight at which the
all-zero solution stops being optimal: ``lam = gamma / lambda0``. Equivalently,
in the form ``tau * R(C) + 1/2 ||.||^2`` the regularization weight is
``tau = lambda0 / gamma``; ``gamma > 1`` guarantees a nonzero solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DegenerateDataError, SolverDivergence

A_STEPS = ("exact", "printed")


@dataclass(frozen=True)
class AdmmConfig:
    """ADMM parameters.

    ``gamma`` scales the fidelity weight above the null-solution threshold;
    ``lam`` bypasses that and fixes the weight directly. ``a_step`` selects
    how the zero-diagonal constraint enters the A-update: ``"exact"`` solves
    the constrained least-squares step (a rank-one correction per column,
    reusing the cached factorization), ``"printed"`` solves it unconstrained
    and then zeroes the diagonal.
    """

    gamma: float = 5.0
    rho: float = 1.0
    epsilon: float = 1e-7
    max_iter: int = 2000
    lam: float | None = None
    a_step: str = "exact"

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.lam is not None and not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.a_step not in A_STEPS:
            raise ValueError(f"a_step must be one of {A_STEPS}, got {self.a_step!r}")


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    converged: bool
    final_residual: float
    objective: float
    lam: float
    dual_residual: float = 0.0

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "final_residual": self.final_residual,
            "dual_residual": self.dual_residual,
            "objective": self.objective,
            "lam": self.lam,
        }


def shrink_row(z, mu: float) -> np.ndarray:
    """Group soft-thresholding ``max(||z|| - mu, 0) * z / ||z||``.

    Returns the zero vector whenever ``||z|| <= mu`` (so ``z = 0`` is safe).
    """
    z = np.asarray(z, dtype=np.float64)
    norm = np.linalg.norm(z)
    if norm <= mu:
        return np.zeros_like(z)
    return (1.0 - mu / norm) * z


def shrink_rows(M: np.ndarray, mu: float) -> np.ndarray:
    """Apply :func:`shrink_row` to every row of ``M``."""
    norms = np.linalg.norm(M, axis=1)
    scale = np.zeros_like(norms)
    keep = norms > mu
    scale[keep] = 1.0 - mu / norms[keep]
    return M * scale[:, None]


def shrink_scalar(z, mu: float):
    """Soft-thresholding ``sign(z) * max(|z| - mu, 0)``; works element-wise on arrays."""
    out = np.sign(z) * np.maximum(np.abs(z) - mu, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def lambda0(Y, mode: str = "row", target=None) -> float:
    """Null-solution threshold computed from the data.

    ``mode="row"``: ``max_i ||Y^T y_i||_2`` with the i-th inner product left out.
    ``mode="element"``: ``max_{i != j} |y_j^T y_i|``.

    With ``target`` given, the cross inner products ``Y^T target`` are used
    and nothing is excluded (dictionary and targets are different frames).
    For fidelity weights ``lam <= 1 / lambda0`` the zero matrix is optimal.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.size == 0:
        raise ValueError("lambda0 of an empty matrix")
    with np.errstate(over="ignore", invalid="ignore"):
        if target is None:
            G = Y.T @ Y
            np.fill_diagonal(G, 0.0)
        else:
            G = Y.T @ np.asarray(target, dtype=np.float64)
    if mode == "row":
        value = float(np.max(np.linalg.norm(G, axis=1)))
    elif mode == "element":
        value = float(np.max(np.abs(G)))
    else:
        raise ValueError(f"mode must be 'row' or 'element', got {mode!r}")
    if value == 0.0:
        raise DegenerateDataError(
            "all inner products between frames are zero; nothing can be represented by "
            "anything else (use a larger or less orthogonal dataset)"
        )
    return value


def fidelity_weight(lambda0_value: float, cfg: AdmmConfig) -> float:
    return cfg.lam if cfg.lam is not None else cfg.gamma / lambda0_value


def l21_norm(Z: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(Z, axis=1)))


def l21_objective(Y, Z, lam: float) -> float:
    """``||Z||_{2,1} + lam/2 ||Y - Y Z||_F^2``."""
    R = Y - Y @ Z
    return l21_norm(Z) + 0.5 * lam * float(np.sum(R * R))


def l1_objective(X_dict, X_target, C, lam: float) -> float:
    R = X_target - X_dict @ C
    return float(np.sum(np.abs(C))) + 0.5 * lam * float(np.sum(R * R))


def _admm(G_dd, G_dt, lam, cfg: AdmmConfig, prox, zero_diag, cached, callback):
    n_d, n_t = G_dt.shape
    rho = cfg.rho
    if not (np.all(np.isfinite(G_dd)) and np.all(np.isfinite(G_dt)) and np.isfinite(lam)):
        raise SolverDivergence("Gram matrix overflowed; rescale the input")
    M = lam * G_dd + rho * np.eye(n_d)
    fixed = lam * G_dt

    if cached:
        factor = scipy.linalg.cho_factor(M, lower=True, check_finite=False)

        def solve(rhs):
            return scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    else:
        def solve(rhs):
            return np.linalg.solve(M, rhs)

    exact = zero_diag and cfg.a_step == "exact"
    if exact and cached:
        M_inv = solve(np.eye(n_d))
        M_inv_diag = np.diag(M_inv).copy()

    A = np.zeros((n_d, n_t))
    Z = np.zeros((n_d, n_t))
    B = np.zeros((n_d, n_t))
    residual = dual = np.inf
    t = 0
    for t in range(1, int(cfg.max_iter) + 1):
        A = solve(fixed + rho * Z - B)
        if exact:
            if not cached:
                M_inv = solve(np.eye(n_d))
                M_inv_diag = np.diag(M_inv).copy()
            # minimizer of the same quadratic restricted to A_jj = 0, column by column
            A = A - M_inv * (np.diag(A) / M_inv_diag)[None, :]
        if zero_diag:
            np.fill_diagonal(A, 0.0)
        Z_prev = Z
        Z = prox(A + B / rho, 1.0 / rho)
        if zero_diag:
            np.fill_diagonal(Z, 0.0)
        B = B + rho * (A - Z)
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise SolverDivergence(f"non-finite iterate at t={t} (rho={rho}, lam={lam:.3g})")
        residual = float(np.max(np.abs(A - Z)))
        # A == Z can hold exactly while Z is still moving (a saturated dual
        # entry makes the shrinkage return A), so Z must also have settled
        dual = rho * float(np.max(np.abs(Z - Z_prev)))
        if callback is not None:
            callback(t, A, Z, B)
        if residual <= cfg.epsilon and dual <= cfg.epsilon:
            break
    return A, Z, t, residual, dual


def solve_l21(Y, cfg: AdmmConfig | None = None, zero_diag: bool = True, *,
              cached: bool = True,
              callback: Callable | None = None) -> tuple[np.ndarray, SolveReport]:
    """Row-sparse self-representation ``min ||Z||_{2,1} + lam/2 ||Y - YZ||_F^2``.

    Parameters
    ----------
    Y : ndarray, shape (d, N)
        Data matrix, one point per column.
    cfg : AdmmConfig
    zero_diag : bool
        Constrain ``diag(Z) = 0`` so no point represents itself.
    cached : bool
        Factor the system matrix once (default) or re-solve it from scratch
        every iteration; both give the same iterates up to rounding.
    callback : callable, optional
        Called as ``callback(t, A, Z, B)`` after every iteration.

    Returns
    -------
    Z : ndarray, shape (N, N)
    report : SolveReport
        ``converged`` is true when, within ``max_iter`` iterations, both
        ``max|A - Z|`` and ``rho * max|Z_t - Z_{t-1}|`` fell to ``epsilon``.
    """
    cfg = cfg or AdmmConfig()
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] < 2:
        raise ValueError(f"need a d x N matrix with N >= 2, got shape {Y.shape}")
    if not np.all(np.isfinite(Y)):
        raise SolverDivergence("non-finite input data")
    if np.any(~np.any(Y != 0.0, axis=0)):
        raise ValueError("Y has an all-zero column")
    lam = fidelity_weight(lambda0(Y, "row") if cfg.lam is None else 0.0, cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        G = Y.T @ Y
    _, Z, t, residual, dual = _admm(G, G, lam, cfg, shrink_rows, zero_diag, cached, callback)
    report = SolveReport(t, residual <= cfg.epsilon and dual <= cfg.epsilon, residual,
                         l21_objective(Y, Z, lam), lam, dual)
    return Z, report


def solve_l1_selfexpress(X_dict, X_target, cfg: AdmmConfig | None = None, zero_diag: bool = False, *,
                         cached: bool = True,
                         callback: Callable | None = None) -> tuple[np.ndarray, SolveReport]:
    """Sparse coding of ``X_target`` over the columns of ``X_dict``.

    Minimizes ``||C||_1 + lam/2 ||X_target - X_dict C||_F^2`` (optionally with
    ``diag(C) = 0``, which requires ``X_dict`` and ``X_target`` to be the same
    frames). Column i of the returned ``C`` (shape N_dict x N_target) codes
    target frame i.
    """
    cfg = cfg or AdmmConfig()
    X_dict = np.asarray(X_dict, dtype=np.float64)
    X_target = np.asarray(X_target, dtype=np.float64)
    if X_dict.ndim != 2 or X_target.ndim != 2 or X_dict.shape[0] != X_target.shape[0]:
        raise ValueError(f"row dimensions differ: {X_dict.shape} vs {X_target.shape}")
    if zero_diag and X_dict.shape[1] != X_target.shape[1]:
        raise ValueError("zero_diag needs a square coefficient matrix")
    if not (np.all(np.isfinite(X_dict)) and np.all(np.isfinite(X_target))):
        raise SolverDivergence("non-finite input data")
    if cfg.lam is None:
        l0 = lambda0(X_dict, "element") if zero_diag else lambda0(X_dict, "element", target=X_target)
    else:
        l0 = 0.0
    lam = fidelity_weight(l0, cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        G_dd = X_dict.T @ X_dict
        G_dt = X_dict.T @ X_target
    _, C, t, residual, dual = _admm(G_dd, G_dt, lam, cfg, shrink_scalar, zero_diag, cached, callback)
    report = SolveReport(t, residual <= cfg.epsilon and dual <= cfg.epsilon, residual,
                         l1_objective(X_dict, X_target, C, lam), lam, dual)
    return C, report
