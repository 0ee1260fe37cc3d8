"""Gram matrices, the median bandwidth heuristic, and CV bandwidth selection."""

import numpy as np
import pytest

from srp.exceptions import ContractViolation, DataError, NumericalError
from srp.kernels import (KernelSpec, gram, median_sigma, select_sigma_cv,
                         sigma_grid)


def test_spec_validation():
    with pytest.raises(ContractViolation):
        KernelSpec("poly")
    with pytest.raises(ContractViolation):
        KernelSpec("rbf")
    with pytest.raises(ContractViolation):
        KernelSpec("rbf", 0.0)
    with pytest.raises(ContractViolation):
        KernelSpec("rbf", -1.0)
    assert KernelSpec("linear").sigma is None
    assert KernelSpec("delta").sigma is None


def test_rbf_identical_columns_entry_one():
    A = np.array([[0.5, 1.5], [2.0, -1.0]])
    B = np.array([[9.0, 0.5], [9.0, 2.0]])
    K = gram(KernelSpec("rbf", 0.7), A, B)
    assert K[0, 1] == 1.0


def test_rbf_known_value():
    K = gram(KernelSpec("rbf", 1.0), np.array([0.0]), np.array([np.sqrt(2.0)]))
    assert K.shape == (1, 1)
    assert abs(K[0, 0] - np.exp(-1.0)) < 1e-15


def test_delta_matrix_example():
    codes = np.array([0.0, 1.0, 0.0])  # labels (a, b, a)
    K = gram(KernelSpec("delta"), codes, codes)
    want = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
    assert np.array_equal(K, want)


def test_square_rbf_exactly_symmetric_unit_diagonal():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((4, 30))
    K = gram(KernelSpec("rbf", 1.3), X, X)
    assert np.array_equal(K, K.T)
    assert np.array_equal(np.diag(K), np.ones(30))
    # the square case must be detected for an equal copy as well (exact
    # symmetry again; values may differ in the last bit via the BLAS route)
    K2 = gram(KernelSpec("rbf", 1.3), X, X.copy())
    assert np.array_equal(K2, K2.T)
    assert np.array_equal(np.diag(K2), np.ones(30))
    assert np.allclose(K, K2, atol=1e-14)


def test_gram_matches_bruteforce_loops():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 5))
    B = rng.standard_normal((3, 4))
    got = gram(KernelSpec("rbf", 0.9), A, B)
    for i in range(5):
        for j in range(4):
            d2 = float(np.sum((A[:, i] - B[:, j]) ** 2))
            assert abs(got[i, j] - np.exp(-d2 / (2 * 0.9**2))) < 1e-12
    lin = gram(KernelSpec("linear"), A, B)
    assert np.array_equal(lin, A.T @ B)
    C = np.floor(A * 2)
    D = np.floor(B * 2)
    dl = gram(KernelSpec("delta"), C, D)
    for i in range(5):
        for j in range(4):
            assert dl[i, j] == float(np.array_equal(C[:, i], D[:, j]))


def test_tiny_sigma_rbf_equals_delta():
    X = np.array([[0.0, 1.0, 3.0, 0.0, 1.0]])
    tiny = gram(KernelSpec("rbf", 1e-10), X, X)
    assert np.array_equal(tiny, gram(KernelSpec("delta"), X, X))


def test_gram_row_mismatch():
    with pytest.raises(ContractViolation):
        gram(KernelSpec("linear"), np.ones((2, 3)), np.ones((3, 3)))


def test_median_sigma():
    assert median_sigma(np.array([[0.0, 3.0]])) == 3.0
    assert median_sigma(np.array([[1.0, 1.0, 1.0]])) == 1.0  # duplicates
    assert median_sigma(np.array([[2.0]])) == 1.0            # single column
    # 3 points on a line: pairwise distances 1, 1, 2 -> median 1
    assert median_sigma(np.array([[0.0, 1.0, 2.0]])) == 1.0


def test_sigma_grid():
    g = sigma_grid(1.0)
    assert len(g) == 9
    assert g[0] == 2.0**-4 and g[4] == 1.0 and g[-1] == 16.0
    with pytest.raises(ContractViolation):
        sigma_grid(0.0)


def _two_blobs(seed=3, n=16, spread=1.0, gap=6.0):
    rng = np.random.default_rng(seed)
    X = np.hstack([rng.normal(0.0, spread, (2, n // 2)),
                   rng.normal(gap, spread, (2, n // 2))])
    y = np.r_[np.zeros(n // 2), np.ones(n // 2)].astype(int)
    return X, y


def test_cv_two_blobs_selects_better_sigma():
    X, y = _two_blobs()
    best, scores = select_sigma_cv(X, y, folds=4, grid=[0.01, 1.0], k=2,
                                   seed=0, return_scores=True)
    assert scores[best] >= max(scores.values()) - 1e-12
    assert best == 1.0


def test_cv_grid_of_one():
    X, y = _two_blobs(seed=4)
    assert select_sigma_cv(X, y, folds=4, grid=[0.7], seed=0) == 0.7


def test_cv_deterministic():
    X, y = _two_blobs(seed=5)
    a = select_sigma_cv(X, y, folds=4, seed=9)
    b = select_sigma_cv(X, y, folds=4, seed=9)
    assert a == b


def test_cv_tie_prefers_smaller_sigma():
    # wide blobs: both bandwidths land on the same fold accuracy
    X, y = _two_blobs(seed=6, spread=3.0, gap=60.0)
    best, scores = select_sigma_cv(X, y, folds=4, grid=[2.0, 4.0], k=2,
                                   seed=0, return_scores=True)
    assert scores[2.0] == scores[4.0]
    assert best == 2.0


def test_cv_disqualifies_numerically_failing_sigma():
    # sigma 1e6 flattens the kernel to all-ones: singular beyond ridge repair
    rng = np.random.default_rng(0)
    n = 40
    X = np.hstack([rng.normal(0, 0.5, (2, n // 2)),
                   rng.normal(4, 0.5, (2, n // 2))])
    y = np.r_[np.zeros(n // 2), np.ones(n // 2)].astype(int)
    best, scores = select_sigma_cv(X, y, folds=5, grid=[0.3, 1e6], k=2,
                                   seed=1, return_scores=True)
    assert best == 0.3
    assert set(scores) == {0.3}


def test_cv_all_sigmas_failing_raises():
    rng = np.random.default_rng(0)
    n = 40
    X = np.hstack([rng.normal(0, 0.5, (2, n // 2)),
                   rng.normal(4, 0.5, (2, n // 2))])
    y = np.r_[np.zeros(n // 2), np.ones(n // 2)].astype(int)
    with pytest.raises(NumericalError):
        select_sigma_cv(X, y, folds=5, grid=[1e4, 1e6], k=2, seed=1)


def test_cv_skips_folds_missing_a_class():
    # the only class-1 sample sits in one fold; that fold is skipped, the
    # other folds keep a two-class training part
    X = np.array([[0.0, 1.0, 2.0, 3.0, 10.0]])
    y = np.array([0, 0, 0, 0, 1])
    best = select_sigma_cv(X, y, folds=5, grid=[1.0], seed=2)
    assert best == 1.0


def test_cv_every_fold_missing_a_class_raises():
    X = np.array([[0.0, 5.0]])
    y = np.array([0, 1])
    with pytest.raises(DataError):
        select_sigma_cv(X, y, folds=2, grid=[1.0], seed=0)


def test_cv_argument_validation():
    X, y = _two_blobs(seed=7)
    with pytest.raises(ContractViolation):
        select_sigma_cv(X, y[:-1], folds=4)
    with pytest.raises(ContractViolation):
        select_sigma_cv(X, y, folds=1)
    with pytest.raises(ContractViolation):
        select_sigma_cv(X, y, folds=4, downstream="pca")
    with pytest.raises(ContractViolation):
        select_sigma_cv(X, y, folds=4, grid=[])
