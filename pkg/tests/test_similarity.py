import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mvsumm.dataset import FeatureMatrix, GlobalIndexMap, MultiViewDataset
from mvsumm.errors import DataError
from mvsumm.similarity import (
    SimilarityBlocks,
    assemble_total,
    build_graph,
    compute_blocks,
    inter_similarity,
    intra_similarity,
    symmetrize_normalize,
)
from mvsumm.solvers import AdmmConfig
from mvsumm.synth import reference_l1


def _view(X, k=0):
    return FeatureMatrix(k, X, np.arange(X.shape[1]))


def _random_dataset(seed, sizes=(5, 6), dim=8):
    rng = np.random.default_rng(seed)
    views = [_view(rng.standard_normal((dim, n)), k).normalized() for k, n in enumerate(sizes)]
    return MultiViewDataset(tuple(views))


def test_orthonormal_view_gives_zero_similarity():
    S, report = intra_similarity(_view(np.eye(4)[:, :2]), return_report=True)
    assert not np.any(S)
    assert report is None


def test_duplicate_frames_dominate():
    rng = np.random.default_rng(0)
    Q, _ = np.linalg.qr(rng.standard_normal((5, 2)))
    v, u = Q[:, 0], Q[:, 1]
    X = np.stack([v, v, u], 1)
    S, report = intra_similarity(_view(X), return_report=True)
    C_ref = reference_l1(X, X, report.lam, zero_diag=True)
    np.testing.assert_allclose(S, np.abs(C_ref).T, atol=1e-6)
    assert S[0, 1] > 0.5 and S[1, 0] > 0.5
    assert np.all(S[2] < 1e-8) and np.all(S[:, 2] < 1e-8)


@pytest.mark.parametrize("seed", range(3))
def test_intra_diagonal_is_zero(seed):
    X = np.random.default_rng(seed).standard_normal((6, 7))
    S = intra_similarity(_view(X))
    assert not np.any(np.diag(S))
    assert np.all(S >= 0)


def test_inter_same_view_matches_columns():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((10, 4))
    X /= np.linalg.norm(X, axis=0)
    S = inter_similarity(_view(X, 0), _view(X, 1))
    assert S.shape == (4, 4)
    assert np.argmax(S, axis=1).tolist() == [0, 1, 2, 3]


def test_inter_orthogonal_views_and_shape():
    E = np.eye(5)
    S = inter_similarity(_view(E[:, :2], 0), _view(E[:, 2:], 1))
    assert S.shape == (2, 3) and not np.any(S)
    rng = np.random.default_rng(2)
    S = inter_similarity(_view(rng.standard_normal((5, 2)), 0), _view(rng.standard_normal((5, 3)), 1))
    assert S.shape == (2, 3)


def test_inter_dimension_mismatch():
    with pytest.raises(DataError):
        inter_similarity(_view(np.ones((3, 2))), _view(np.ones((4, 2)), 1))


def test_assemble_single_view_is_intra():
    ds = _random_dataset(3, sizes=(6,))
    blocks = compute_blocks(ds)
    C = assemble_total(blocks, ds.index_map)
    np.testing.assert_array_equal(C, blocks.intra[0])


def test_assemble_shapes_and_addresses():
    ds = _random_dataset(4, sizes=(2, 3))
    blocks = compute_blocks(ds)
    C = assemble_total(blocks, ds.index_map)
    assert C.shape == (5, 5)
    m = GlobalIndexMap.from_sizes((2, 3, 4))
    tagged = SimilarityBlocks(
        intra=[np.full((n, n), 10.0 * k) for k, n in enumerate((2, 3, 4))],
        inter={(a, b): np.full((m.size(a), m.size(b)), 10.0 * a + b) for a in range(3) for b in range(3) if a != b},
    )
    C = assemble_total(tagged, m)
    assert C.shape == (9, 9)
    # view 2 local 1 -> global 6; view 0 local 1 -> global 1
    assert C[6, 1] == 20.0 and C[1, 6] == 2.0
    for a in range(3):
        for b in range(3):
            src = tagged.intra[a] if a == b else tagged.inter[(a, b)]
            np.testing.assert_array_equal(C[m.block(a), m.block(b)], src)


def test_assemble_rejects_bad_block():
    m = GlobalIndexMap.from_sizes((2, 3))
    blocks = SimilarityBlocks(intra=[np.zeros((2, 2)), np.zeros((3, 3))], inter={(0, 1): np.zeros((2, 3))})
    with pytest.raises(DataError, match="missing"):
        assemble_total(blocks, m)
    blocks.inter[(1, 0)] = np.zeros((2, 3))
    with pytest.raises(DataError, match="shape"):
        assemble_total(blocks, m)


def test_symmetrize_normalize_examples():
    W = symmetrize_normalize(np.array([[0.0, 1.0], [0.0, 0.0]])).W
    np.testing.assert_array_equal(W, [[0.0, 1.0], [1.0, 0.0]])
    W = symmetrize_normalize(np.zeros((3, 3))).W
    assert not np.any(W)


def test_symmetrize_uniform_rescale_keeps_argmax():
    rng = np.random.default_rng(5)
    row = rng.random(4)
    C = np.array([np.roll(row, k) for k in range(4)])
    C = C + C.T
    np.fill_diagonal(C, 0.0)
    W = symmetrize_normalize(C).W
    np.testing.assert_array_equal(np.argmax(W, axis=1), np.argmax(C, axis=1))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9))
def test_graph_invariants(seed, n):
    rng = np.random.default_rng(seed)
    C = np.abs(rng.standard_normal((n, n))) * (rng.random((n, n)) < 0.5)
    W = symmetrize_normalize(C).W
    assert np.array_equal(W, W.T)
    assert np.all(W >= 0) and W.max() <= 1.0
    assert not np.any(np.diag(W))


def test_single_view_graph_equals_normalized_intra():
    ds = _random_dataset(6, sizes=(7,))
    graph, blocks = build_graph(ds)
    np.testing.assert_array_equal(graph.W, symmetrize_normalize(blocks.intra[0]).W)


def test_single_view_flag_drops_inter_blocks():
    ds = _random_dataset(7)
    graph, blocks = build_graph(ds, single_view=True)
    assert not blocks.inter
    assert not np.any(graph.block(0, 1))


def test_permutation_equivariance():
    ds = _random_dataset(8, sizes=(5, 4))
    perm0 = np.array([3, 0, 4, 1, 2])
    views = (FeatureMatrix(0, ds.views[0].data[:, perm0], np.arange(5)), ds.views[1])
    W = build_graph(ds)[0].W
    Wp = build_graph(MultiViewDataset(views))[0].W
    full = np.concatenate([perm0, 5 + np.arange(4)])
    np.testing.assert_allclose(Wp, W[np.ix_(full, full)], atol=1e-7)


def test_parallel_blocks_identical_to_serial():
    ds = _random_dataset(9, sizes=(5, 6, 4))
    a = build_graph(ds, workers=1)[0].W
    b = build_graph(ds, workers=4)[0].W
    assert a.tobytes() == b.tobytes()


def test_reports_recorded_per_block():
    ds = _random_dataset(10)
    _, blocks = build_graph(ds, AdmmConfig())
    assert sorted(blocks.reports) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(r.converged for r in blocks.reports.values())
