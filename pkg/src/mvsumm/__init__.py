"""Multi-view video summarization via sparse-coding similarity graphs,
Laplacian embedding and row-sparse representative selection."""

from .dataset import (
    ANY_VIEW,
    FeatureMatrix,
    GlobalIndexMap,
    GroundTruthEvent,
    MultiViewDataset,
    load_dataset,
)
from .embedding import Embedding, LaplacianPair, build_laplacian, embed, embedding_objective
from .errors import DataError, DegenerateDataError, SolverDivergence
from .evaluation import EvalResult, match_events, score
from .pipeline import PipelineConfig, PipelineResult, run_pipeline
from .selection import RepresentativeSet, Summary, group_representatives, rank, select, summarize
from .similarity import (
    SimilarityBlocks,
    SimilarityGraph,
    assemble_total,
    build_graph,
    inter_similarity,
    intra_similarity,
    symmetrize_normalize,
)
from .solvers import (
    AdmmConfig,
    SolveReport,
    lambda0,
    shrink_row,
    shrink_scalar,
    solve_l1_selfexpress,
    solve_l21,
)

__version__ = "0.1.0"
