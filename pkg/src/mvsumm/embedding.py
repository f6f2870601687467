"""Laplacian embedding of the similarity graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.csgraph

from .errors import DataError

DEGREE_REG = 1e-9
ZERO_TOL = 1e-8


@dataclass(frozen=True)
class LaplacianPair:
    L: np.ndarray
    D: np.ndarray  # diagonal degree matrix (unregularized)

    @property
    def degrees(self) -> np.ndarray:
        return np.diag(self.D).copy()


@dataclass(frozen=True)
class Embedding:
    """Rows of ``Y`` are the embedded frames; columns are D-orthonormal."""

    Y: np.ndarray  # N x d
    eigenvalues: np.ndarray
    n_components: int = 1

    @property
    def dim(self) -> int:
        return self.Y.shape[1]


def build_laplacian(graph) -> LaplacianPair:
    """``L = D - W`` with ``D`` the diagonal of row sums."""
    W = np.asarray(getattr(graph, "W", graph), dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DataError(f"W must be square, got {W.shape}")
    deg = W.sum(axis=1)
    D = np.diag(deg)
    return LaplacianPair(D - W, D)


def count_components(W: np.ndarray) -> int:
    n, _ = scipy.sparse.csgraph.connected_components(np.asarray(W) > 0, directed=False)
    return int(n)


def embed(pair: LaplacianPair, d: int, zero_tol: float = ZERO_TOL) -> Embedding:
    """Solve ``L y = lambda D y`` and keep the ``d`` smallest nonzero eigenpairs.

    The generalized problem is reduced to the symmetric eigenproblem of
    ``D^{-1/2} L D^{-1/2}`` and mapped back, so ``Y^T D Y = I``. A tiny ridge
    (``1e-9 * max degree``) keeps ``D`` invertible when some frames are
    isolated. Eigenvalues at or below ``zero_tol * lambda_max`` count as zero
    and are skipped; each eigenvector is signed so its largest-magnitude
    entry is positive.
    """
    if d < 1:
        raise ValueError(f"embedding dimension must be >= 1, got {d}")
    L = np.asarray(pair.L, dtype=np.float64)
    deg = np.diag(pair.D).astype(np.float64)
    N = L.shape[0]
    max_deg = float(deg.max()) if N else 0.0
    if max_deg <= 0:
        raise DataError("graph has no edges; nothing to embed")
    deg_reg = deg + DEGREE_REG * max_deg
    s = 1.0 / np.sqrt(deg_reg)
    S = s[:, None] * L * s[None, :]
    S = 0.5 * (S + S.T)
    vals, vecs = np.linalg.eigh(S)
    lam_max = float(vals[-1])
    nonzero = np.flatnonzero(vals > zero_tol * lam_max)
    n_comp = count_components(-L + np.diag(np.diag(L)))
    if nonzero.size < d:
        raise DataError(
            f"only {nonzero.size} nonzero eigenvalues for a requested dimension {d} "
            f"({n_comp} connected components over {N} frames)"
        )
    keep = nonzero[:d]
    Y = s[:, None] * vecs[:, keep]
    # deterministic sign: largest-magnitude entry of each column positive
    pivot = np.argmax(np.abs(Y), axis=0)
    signs = np.sign(Y[pivot, np.arange(d)])
    signs[signs == 0] = 1.0
    Y = Y * signs[None, :]
    return Embedding(Y, vals[keep].copy(), n_comp)


def embedding_objective(Y, pair_or_W) -> float:
    """``sum_ij ||y_i - y_j||^2 W_ij`` (equals ``2 tr(Y^T L Y)``)."""
    Y = np.asarray(getattr(Y, "Y", Y), dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if isinstance(pair_or_W, LaplacianPair):
        W = np.diag(np.diag(pair_or_W.L)) - pair_or_W.L
    else:
        W = np.asarray(getattr(pair_or_W, "W", pair_or_W), dtype=np.float64)
    total = 0.0
    for col in Y.T:
        diff = col[:, None] - col[None, :]
        total += float(np.sum(diff * diff * W))
    return total
