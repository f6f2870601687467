"""Sparse-coding similarity blocks and the symmetric similarity graph."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import FeatureMatrix, GlobalIndexMap, MultiViewDataset
from .errors import DataError
from .solvers import AdmmConfig, SolveReport, solve_l1_selfexpress

CLAMP_FLOOR = 1e-10


@dataclass
class SimilarityBlocks:
    """``intra[k]`` is N_k x N_k; ``inter[(m, n)]`` is N_m x N_n for m != n."""

    intra: list
    inter: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SimilarityGraph:
    W: np.ndarray
    index_map: GlobalIndexMap
    C_total: np.ndarray | None = None

    def block(self, m: int, n: int) -> np.ndarray:
        return self.W[self.index_map.block(m), self.index_map.block(n)]


def _clamp(C: np.ndarray) -> np.ndarray:
    C = np.abs(C)
    C[C < CLAMP_FLOOR] = 0.0
    return C


def _is_degenerate(X_dict: np.ndarray, X_target: np.ndarray, exclude_diag: bool) -> bool:
    G = X_dict.T @ X_target
    if exclude_diag:
        np.fill_diagonal(G, 0.0)
    return not np.any(G != 0.0)


def intra_similarity(view: FeatureMatrix, cfg: AdmmConfig | None = None,
                     return_report: bool = False):
    """Similarities among the frames of one view.

    Each frame is sparsely coded over the other frames of the view; the result
    is ``|C|^T`` so row i holds frame i's similarity to every other frame.
    """
    X = view.data if isinstance(view, FeatureMatrix) else np.asarray(view, dtype=np.float64)
    n = X.shape[1]
    if n < 2:
        raise DataError("intra-view similarity needs at least two frames")
    if _is_degenerate(X, X, exclude_diag=True):
        # zero is the exact optimum: no frame helps reconstruct any other
        S, report = np.zeros((n, n)), None
    else:
        C, report = solve_l1_selfexpress(X, X, cfg, zero_diag=True)
        S = _clamp(C).T.copy()
        np.fill_diagonal(S, 0.0)
    return (S, report) if return_report else S


def inter_similarity(view_m: FeatureMatrix, view_n: FeatureMatrix, cfg: AdmmConfig | None = None,
                     return_report: bool = False):
    """Similarities of view m's frames (rows) to view n's frames (columns).

    Frames of view m are coded over the dictionary of view n's frames.
    """
    Xm = view_m.data if isinstance(view_m, FeatureMatrix) else np.asarray(view_m, dtype=np.float64)
    Xn = view_n.data if isinstance(view_n, FeatureMatrix) else np.asarray(view_n, dtype=np.float64)
    if Xm.shape[0] != Xn.shape[0]:
        raise DataError(f"feature dimensions differ: {Xm.shape[0]} vs {Xn.shape[0]}")
    if _is_degenerate(Xn, Xm, exclude_diag=False):
        S, report = np.zeros((Xm.shape[1], Xn.shape[1])), None
    else:
        C, report = solve_l1_selfexpress(Xn, Xm, cfg, zero_diag=False)
        S = _clamp(C).T.copy()
    return (S, report) if return_report else S


def compute_blocks(dataset: MultiViewDataset, cfg: AdmmConfig | None = None,
                   include_inter: bool = True, workers: int = 1) -> SimilarityBlocks:
    """All intra blocks and, unless disabled, every ordered inter block.

    The solves are independent; with ``workers > 1`` they run on a thread
    pool. Results are collected in a fixed order, so output does not depend
    on scheduling.
    """
    K = dataset.n_views
    tasks = [("intra", k, k) for k in range(K)]
    if include_inter:
        tasks += [("inter", m, n) for m in range(K) for n in range(K) if m != n]

    def run(task):
        kind, m, n = task
        if kind == "intra":
            return intra_similarity(dataset.views[m], cfg, return_report=True)
        return inter_similarity(dataset.views[m], dataset.views[n], cfg, return_report=True)

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    blocks = SimilarityBlocks(intra=[None] * K)
    for (kind, m, n), (S, report) in zip(tasks, results):
        if kind == "intra":
            blocks.intra[m] = S
        else:
            blocks.inter[(m, n)] = S
        blocks.reports[(m, n)] = report
    return blocks


def assemble_total(blocks: SimilarityBlocks, index_map: GlobalIndexMap,
                   include_inter: bool = True) -> np.ndarray:
    """Place the blocks into one N x N matrix following the global frame layout."""
    K = index_map.n_views
    if len(blocks.intra) != K:
        raise DataError(f"expected {K} intra blocks, got {len(blocks.intra)}")
    N = index_map.total
    C = np.zeros((N, N))
    for m in range(K):
        for n in range(K):
            if m == n:
                S = blocks.intra[m]
            elif not include_inter:
                continue
            else:
                if (m, n) not in blocks.inter:
                    raise DataError(f"missing inter-view block ({m}, {n})")
                S = blocks.inter[(m, n)]
            shape = (index_map.size(m), index_map.size(n))
            if S is None or np.shape(S) != shape:
                raise DataError(f"block ({m}, {n}) has shape {np.shape(S)}, expected {shape}")
            C[index_map.block(m), index_map.block(n)] = S
    return C


def symmetrize_normalize(C_total, index_map: GlobalIndexMap | None = None) -> SimilarityGraph:
    """``W = C + C^T``, rows scaled by their max entry, then averaged with the transpose.

    Row scaling breaks the symmetry of ``C + C^T``; the final averaging
    restores it. All-zero rows stay zero.
    """
    C = np.asarray(C_total, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DataError(f"C_total must be square, got {C.shape}")
    W = C + C.T
    np.fill_diagonal(W, 0.0)
    row_max = np.max(np.abs(W), axis=1)
    scale = np.divide(1.0, row_max, out=np.zeros_like(row_max), where=row_max > 0)
    W = W * scale[:, None]
    W = 0.5 * (W + W.T)
    W[W < CLAMP_FLOOR] = 0.0
    if index_map is None:
        index_map = GlobalIndexMap((0, C.shape[0]))
    return SimilarityGraph(W, index_map, C)


def build_graph(dataset: MultiViewDataset, cfg: AdmmConfig | None = None, single_view: bool = False,
                workers: int = 1) -> tuple[SimilarityGraph, SimilarityBlocks]:
    """Similarity graph of a dataset; ``single_view`` drops the inter-view blocks."""
    include_inter = not single_view
    blocks = compute_blocks(dataset, cfg, include_inter=include_inter, workers=workers)
    C = assemble_total(blocks, dataset.index_map, include_inter=include_inter)
    return symmetrize_normalize(C, dataset.index_map), blocks
