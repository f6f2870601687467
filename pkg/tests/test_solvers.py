import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mvsumm.errors import DegenerateDataError, SolverDivergence
from mvsumm.selection import group_representatives, rank
from mvsumm.solvers import (
    AdmmConfig,
    l1_objective,
    l21_objective,
    lambda0,
    shrink_row,
    shrink_rows,
    shrink_scalar,
    solve_l1_selfexpress,
    solve_l21,
)
from mvsumm.synth import reference_l1, reference_l21

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def _unit(v):
    return v / np.linalg.norm(v)


def _two_directions(rng, cos=0.2, dim=4):
    Q, _ = np.linalg.qr(rng.standard_normal((dim, 2)))
    return Q[:, 0], cos * Q[:, 0] + np.sqrt(1 - cos**2) * Q[:, 1]


# -- shrinkage ---------------------------------------------------------------------

def test_shrink_row_examples():
    np.testing.assert_allclose(shrink_row([3.0, 4.0], 1.0), [2.4, 3.2], rtol=0, atol=1e-15)
    np.testing.assert_array_equal(shrink_row([0.3, 0.4], 1.0), [0.0, 0.0])
    np.testing.assert_array_equal(shrink_row([3.0, 4.0], 0.0), [3.0, 4.0])
    np.testing.assert_array_equal(shrink_row([0.0, 0.0], 0.5), [0.0, 0.0])


def test_shrink_scalar_examples():
    assert shrink_scalar(-2.0, 0.5) == -1.5
    assert shrink_scalar(0.2, 0.5) == 0.0
    assert shrink_scalar(7.0, 0.0) == 7.0
    np.testing.assert_array_equal(shrink_scalar(np.array([-2.0, 0.2]), 0.5), [-1.5, 0.0])


@given(arrays(np.float64, st.integers(1, 8), elements=finite), st.floats(0, 100))
def test_shrink_row_norm_and_contraction(z, mu):
    out = shrink_row(z, mu)
    norm = np.linalg.norm(z)
    assert abs(np.linalg.norm(out) - max(norm - mu, 0.0)) <= 1e-12 * max(1.0, norm)
    assert np.linalg.norm(out) <= norm


@given(arrays(np.float64, (5, 3), elements=finite), st.floats(0, 50))
def test_shrink_rows_matches_rowwise(M, mu):
    expected = np.stack([shrink_row(r, mu) for r in M])
    np.testing.assert_allclose(shrink_rows(M, mu), expected, rtol=1e-14, atol=1e-300)


# -- lambda0 -----------------------------------------------------------------------

def test_lambda0_examples():
    u = _unit(np.array([1.0, 2.0, 2.0]))
    assert lambda0(np.stack([u, u], 1), "element") == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DegenerateDataError):
        lambda0(np.eye(3), "element")
    assert lambda0(np.stack([u, u, u], 1), "row") == pytest.approx(np.sqrt(2.0), abs=1e-15)


def test_lambda0_is_null_threshold():
    # at lam = 1/lambda0 zero is optimal; slightly above it is not
    rng = np.random.default_rng(4)
    Y = rng.standard_normal((4, 6))
    l0 = lambda0(Y, "row")
    Z, _ = solve_l21(Y, AdmmConfig(lam=0.999 / l0))
    assert not np.any(Z)
    Z, _ = solve_l21(Y, AdmmConfig(lam=1.2 / l0))
    assert np.any(Z)


def test_config_validation():
    for bad in ({"gamma": 1.0}, {"rho": 0.0}, {"epsilon": 0.0}, {"max_iter": 0}, {"lam": -1.0},
                {"a_step": "other"}):
        with pytest.raises(ValueError):
            AdmmConfig(**bad)


# -- l2,1 ----------------------------------------------------------------------------

def test_l21_two_identical_columns():
    u = _unit(np.array([1.0, -2.0, 0.5]))
    Y = np.stack([u, u], 1)
    Z, rep = solve_l21(Y)
    assert rep.converged
    assert Z[0, 1] > 0 and Z[0, 1] == pytest.approx(Z[1, 0], rel=1e-9)
    assert rep.objective < 0.5 * rep.lam * np.sum(Y * Y)
    Zr = reference_l21(Y, rep.lam)
    assert rep.objective == pytest.approx(l21_objective(Y, Zr, rep.lam), rel=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_l21_matches_reference(seed):
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((4, 8))
    Z, rep = solve_l21(Y)
    Zr = reference_l21(Y, rep.lam)
    assert rep.objective == pytest.approx(l21_objective(Y, Zr, rep.lam), rel=1e-6)
    np.testing.assert_allclose(Z, Zr, atol=1e-5)


def test_l21_small_weight_gives_zero():
    rng = np.random.default_rng(5)
    Y = rng.standard_normal((3, 5))
    Z, rep = solve_l21(Y, AdmmConfig(lam=1e-6))
    assert not np.any(Z)
    assert rep.converged


def test_l21_duplicate_groups_vs_reference():
    rng = np.random.default_rng(6)
    a, b = _two_directions(rng)
    Y = np.stack([a, a, a, b, b, b], 1)
    Z, rep = solve_l21(Y)
    Zr = reference_l21(Y, rep.lam)
    np.testing.assert_allclose(np.linalg.norm(Z, axis=1), np.linalg.norm(Zr, axis=1), atol=1e-6)
    # duplicates share weight evenly; grouping yields one entry per duplicate set
    groups = group_representatives(rank(Z), Z)
    assert sorted(sorted(m) for m in groups.members) == [[0, 1, 2], [3, 4, 5]]


def test_l21_diagonal_zero_at_every_iterate():
    rng = np.random.default_rng(7)
    Y = rng.standard_normal((3, 7))
    diags = []
    solve_l21(Y, callback=lambda t, A, Z, B: diags.append((np.diag(A).copy(), np.diag(Z).copy())))
    assert diags
    for dA, dZ in diags:
        assert not np.any(dA) and not np.any(dZ)


def test_l21_residual_bound_when_converged():
    rng = np.random.default_rng(8)
    cfg = AdmmConfig(epsilon=1e-9)
    Z, rep = solve_l21(rng.standard_normal((4, 10)), cfg)
    assert rep.converged and rep.final_residual <= cfg.epsilon


def test_l21_max_iter_respected():
    rng = np.random.default_rng(9)
    cfg = AdmmConfig(max_iter=3)
    _, rep = solve_l21(rng.standard_normal((4, 10)), cfg)
    assert rep.iterations == 3 and not rep.converged


@pytest.mark.parametrize("zero_diag", [True, False])
def test_cached_matches_naive(zero_diag):
    rng = np.random.default_rng(10)
    Y = rng.standard_normal((4, 9))
    runs = {}
    for cached in (True, False):
        its = []
        solve_l21(Y, zero_diag=zero_diag, cached=cached, callback=lambda t, A, Z, B: its.append(Z.copy()))
        runs[cached] = its
    assert len(runs[True]) == len(runs[False])
    for a, b in zip(runs[True], runs[False]):
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_exact_a_step_not_worse_than_printed():
    rng = np.random.default_rng(11)
    Y = rng.standard_normal((4, 8))
    _, exact = solve_l21(Y, AdmmConfig(a_step="exact"))
    _, printed = solve_l21(Y, AdmmConfig(a_step="printed"))
    assert exact.objective <= printed.objective + 1e-9


def test_non_finite_input_raises():
    Y = np.ones((2, 3))
    Y[0, 0] = np.inf
    with pytest.raises(SolverDivergence):
        solve_l21(Y)


def test_overflowing_iterates_raise():
    Y = np.array([[1e200, 2e200, 1e200], [1.0, 0.0, 3e200]])
    with pytest.raises(SolverDivergence):
        solve_l21(Y, AdmmConfig(lam=1e200))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 8))
def test_l21_property_matches_reference(seed, d, n):
    Y = np.random.default_rng(seed).standard_normal((d, n))
    Z, rep = solve_l21(Y)
    ref = l21_objective(Y, reference_l21(Y, rep.lam), rep.lam)
    assert rep.objective <= ref * (1 + 1e-4) + 1e-12
    assert ref <= rep.objective * (1 + 1e-4) + 1e-12
    assert not np.any(np.diag(Z))


# -- l1 ------------------------------------------------------------------------------

def test_l1_duplicate_column_dominates():
    rng = np.random.default_rng(12)
    a, b = _two_directions(rng, cos=0.3, dim=5)
    X = np.stack([a, b, a], 1)
    C, rep = solve_l1_selfexpress(X, X, zero_diag=True)
    Cr = reference_l1(X, X, rep.lam, zero_diag=True)
    np.testing.assert_allclose(C, Cr, atol=1e-6)
    assert abs(C[0, 2]) > 0.5
    assert abs(C[1, 2]) < 1e-6


def test_l1_diagonal_zero_at_every_iterate():
    rng = np.random.default_rng(13)
    X = rng.standard_normal((4, 6))
    seen = []
    solve_l1_selfexpress(X, X, zero_diag=True, callback=lambda t, A, Z, B: seen.append(np.diag(Z).copy()))
    assert all(not np.any(d) for d in seen)


def test_l1_orthogonal_target_codes_to_zero():
    X_dict = np.eye(4)[:, :2]
    X_target = np.eye(4)[:, 2:]
    with pytest.raises(DegenerateDataError):
        solve_l1_selfexpress(X_dict, X_target)
    C, _ = solve_l1_selfexpress(X_dict, X_target, AdmmConfig(lam=1e-3))
    assert not np.any(C)


@pytest.mark.parametrize("seed", range(4))
def test_l1_inter_matches_reference(seed):
    rng = np.random.default_rng(seed)
    X_dict, X_target = rng.standard_normal((5, 4)), rng.standard_normal((5, 3))
    C, rep = solve_l1_selfexpress(X_dict, X_target)
    assert C.shape == (4, 3)
    ref = l1_objective(X_dict, X_target, reference_l1(X_dict, X_target, rep.lam), rep.lam)
    assert rep.objective == pytest.approx(ref, rel=1e-6)


def test_l1_cached_matches_naive():
    rng = np.random.default_rng(14)
    X = rng.standard_normal((5, 7))
    out = [solve_l1_selfexpress(X, X, zero_diag=True, cached=c)[0] for c in (True, False)]
    np.testing.assert_allclose(out[0], out[1], rtol=0, atol=1e-12)
