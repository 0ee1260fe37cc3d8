"""HSIC checks against a literal centering-matrix oracle and closed forms."""

import numpy as np
import pytest

from srp.embeddings import fit_spca
from srp.exceptions import ContractViolation
from srp.hsic import hsic_empirical


def _hsic_literal(K, L):
    # textbook form with an explicit H = I - (1/n) 1 1^T
    n = K.shape[0]
    H = np.eye(n) - np.ones((n, n)) / n
    return np.trace(K @ H @ L @ H) / (n - 1) ** 2


def _random_psd(rng, n):
    A = rng.normal(size=(n, n + 2))
    return A @ A.T


def test_matches_literal_centering_oracle():
    rng = np.random.default_rng(42)
    for _ in range(50):
        n = int(rng.integers(2, 21))
        K = _random_psd(rng, n)
        L = _random_psd(rng, n)
        got = hsic_empirical(K, L)
        want = _hsic_literal(K, L)
        assert abs(got - want) <= 1e-12 * max(abs(want), 1.0)


def test_constant_kernel_gives_zero():
    # H annihilates the all-ones matrix, so a constant kernel carries no signal
    rng = np.random.default_rng(1)
    L = _random_psd(rng, 8)
    assert abs(hsic_empirical(np.ones((8, 8)), L)) < 1e-12


def test_identity_pair_closed_form():
    # trace(H^2)/(n-1)^2 = (n-1)/(n-1)^2; n=3 gives 0.5
    assert abs(hsic_empirical(np.eye(3), np.eye(3)) - 0.5) < 1e-15


def test_argument_symmetry():
    rng = np.random.default_rng(2)
    K = _random_psd(rng, 11)
    L = _random_psd(rng, 11)
    a = hsic_empirical(K, L)
    b = hsic_empirical(L, K)
    assert abs(a - b) <= 1e-12 * abs(a)


def test_invariant_to_constant_offset():
    rng = np.random.default_rng(3)
    K = _random_psd(rng, 9)
    L = _random_psd(rng, 9)
    base = hsic_empirical(K, L)
    shifted = hsic_empirical(K, L + 7.5 * np.ones((9, 9)))
    assert abs(shifted - base) <= 1e-10 * max(abs(base), 1.0)


def test_nonnegative_on_psd_pairs():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(2, 15))
        val = hsic_empirical(_random_psd(rng, n), _random_psd(rng, n))
        assert val >= -1e-12


def test_spca_objective_totals_hsic():
    # with k = d the eigenvalue sum is trace(Xc L Xc^T); the same trace
    # normalised by (n-1)^2 is HSIC between the linear kernel and L
    rng = np.random.default_rng(5)
    d, n = 4, 12
    X = rng.normal(size=(d, n))
    y = rng.integers(0, 2, size=n)
    L = (y[:, None] == y[None, :]).astype(np.float64)
    model = fit_spca(X, L, k=d)
    total = float(np.sum(model.meta["objective_values"]))
    want = (n - 1) ** 2 * hsic_empirical(X.T @ X, L)
    assert abs(total - want) <= 1e-10 * max(abs(want), 1.0)


def test_validation():
    with pytest.raises(ContractViolation):
        hsic_empirical(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(ContractViolation):
        hsic_empirical(np.eye(3), np.eye(4))
    with pytest.raises(ContractViolation):
        hsic_empirical(np.eye(1), np.eye(1))
    bad = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ContractViolation):
        hsic_empirical(bad, np.eye(2))
