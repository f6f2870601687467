"""End-to-end summarization: similarities -> embedding -> selection -> ranked summaries."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dataset import MultiViewDataset, write_matrix_binary
from .embedding import ZERO_TOL, Embedding, build_laplacian, embed
from .errors import DataError
from .selection import (
    LINK_REL,
    THRESHOLD_REL,
    RepresentativeSet,
    group_representatives,
    rank,
    select,
    summarize,
    write_summary_csv,
    write_summary_json,
)
from .similarity import SimilarityBlocks, SimilarityGraph, build_graph
from .solvers import AdmmConfig, SolveReport

MODES = ("multi", "single")


@dataclass
class PipelineConfig:
    manifest: str | None = None
    dim: int | None = None  # default: twice the number of views
    gamma: float = 5.0
    rho: float = 1.0
    epsilon: float = 1e-7
    max_iter: int = 2000
    threshold_rel: float = THRESHOLD_REL
    lengths: tuple = (3, 4, 7)
    mode: str = "multi"
    out: str | None = None
    dump_intermediates: bool = False
    zero_tol: float = ZERO_TOL
    group: bool = True
    link_rel: float = LINK_REL
    workers: int = 1

    def __post_init__(self):
        self.lengths = tuple(int(n) for n in self.lengths)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.dim is not None and self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not self.lengths or min(self.lengths) < 1:
            raise ValueError(f"summary lengths must be >= 1, got {self.lengths}")
        if not 0 <= self.threshold_rel < 1:
            raise ValueError(f"threshold must be in [0, 1), got {self.threshold_rel}")
        if not 0 < self.link_rel <= 1:
            raise ValueError(f"link_rel must be in (0, 1], got {self.link_rel}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.admm()  # validates gamma / rho / epsilon / max_iter

    def admm(self) -> AdmmConfig:
        return AdmmConfig(gamma=self.gamma, rho=self.rho, epsilon=self.epsilon, max_iter=self.max_iter)

    def resolved_dim(self, dataset: MultiViewDataset) -> int:
        return self.dim if self.dim is not None else 2 * dataset.n_views

    def as_dict(self) -> dict:
        d = asdict(self)
        d["lengths"] = list(self.lengths)
        return d


@dataclass
class PipelineResult:
    config: PipelineConfig
    dim: int
    graph: SimilarityGraph
    blocks: SimilarityBlocks
    embedding: Embedding
    Z: np.ndarray
    selection_report: SolveReport
    representatives: RepresentativeSet  # every nonzero row, by importance
    ranked: RepresentativeSet  # what summaries are cut from (grouped unless disabled)
    summaries: dict
    frame_ids: list
    timings: dict = field(default_factory=dict)

    def report(self) -> dict:
        """Run report; contains no timings so identical runs give identical reports."""
        sims = []
        for (m, n), rep in sorted(self.blocks.reports.items()):
            entry = {"kind": "intra" if m == n else "inter", "views": [m, n]}
            entry.update(rep.as_dict() if rep is not None else {"skipped": "no inner products; exact zero block"})
            sims.append(entry)
        return {
            "config": self.config.as_dict(),
            "n_frames": int(self.graph.W.shape[0]),
            "n_views": self.graph.index_map.n_views,
            "embedding": {
                "dim": self.dim,
                "eigenvalues": [float(v) for v in self.embedding.eigenvalues],
                "connected_components": self.embedding.n_components,
            },
            "similarity_solves": sims,
            "selection_solve": self.selection_report.as_dict(),
            "representatives": [{"global_index": g, "importance": imp} for g, imp in self.representatives.rows],
            "ranked": [
                {"global_index": g, "importance": imp, "members": list(m) if m is not None else [g]}
                for (g, imp), m in zip(self.ranked.rows, self.ranked.members or [None] * len(self.ranked))
            ],
        }


def run_pipeline(dataset: MultiViewDataset, config: PipelineConfig | None = None) -> PipelineResult:
    config = config or PipelineConfig()
    single = config.mode == "single"
    d = config.resolved_dim(dataset)
    if d >= dataset.dim:
        raise DataError(f"embedding dimension {d} must be smaller than the feature dimension {dataset.dim}")
    cfg = config.admm()
    timings = {}

    t0 = time.perf_counter()
    graph, blocks = build_graph(dataset, cfg, single_view=single, workers=config.workers)
    timings["similarity"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    emb = embed(build_laplacian(graph), d, config.zero_tol)
    timings["embedding"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    Z, sel_report = select(emb, cfg)
    reps = rank(Z, config.threshold_rel, dataset.index_map)
    ranked = group_representatives(reps, Z, config.link_rel) if config.group else reps
    frame_ids = [v.frame_ids for v in dataset.views]
    summaries = {n: summarize(ranked, n, dataset.index_map, frame_ids) for n in config.lengths}
    timings["selection"] = time.perf_counter() - t0

    return PipelineResult(config, d, graph, blocks, emb, Z, sel_report, reps, ranked, summaries, frame_ids, timings)


def write_run(result: PipelineResult, out_dir) -> Path:
    """Write summaries, the ranked list, the run report and optional dumps under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(result.config.as_dict(), indent=2, sort_keys=True) + "\n")
    every = summarize(result.representatives, max(len(result.representatives), 1), result.graph.index_map,
                      result.frame_ids)
    write_summary_csv(out / "representatives.csv", every)
    ranked = summarize(result.ranked, max(len(result.ranked), 1), result.graph.index_map, result.frame_ids)
    write_summary_csv(out / "ranked.csv", ranked)
    for n, summary in sorted(result.summaries.items()):
        write_summary_csv(out / f"summary_{n}.csv", summary)
        write_summary_json(out / f"summary_{n}.json", summary)
    (out / "report.json").write_text(json.dumps(result.report(), indent=2, sort_keys=True) + "\n")
    (out / "timings.json").write_text(json.dumps(result.timings, indent=2, sort_keys=True) + "\n")
    if result.config.dump_intermediates:
        write_matrix_binary(out / "W.bin", result.graph.W)
        write_matrix_binary(out / "C_total.bin", result.graph.C_total)
        write_matrix_binary(out / "Y.bin", result.embedding.Y.T)
        write_matrix_binary(out / "eigenvalues.bin", result.embedding.eigenvalues)
        write_matrix_binary(out / "Z.bin", result.Z)
    return out
