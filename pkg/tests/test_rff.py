"""Random Fourier feature checks: distributional moments and kernel error."""

import numpy as np
import pytest

from srp.exceptions import ContractViolation
from srp.kernels import KernelSpec, gram
from srp.rff import apply_map, sample_map


def test_map_shapes():
    fm = sample_map(1.5, 7, 40, seed=0)
    assert fm.frequencies.shape == (40, 7)
    assert fm.phases.shape == (40,)
    assert fm.scale == np.sqrt(2.0 / 40)
    assert np.all(fm.phases >= 0.0) and np.all(fm.phases < 2.0 * np.pi)


def test_map_deterministic():
    a = sample_map(0.8, 3, 25, seed=11)
    b = sample_map(0.8, 3, 25, seed=11)
    assert np.array_equal(a.frequencies, b.frequencies)
    assert np.array_equal(a.phases, b.phases)
    c = sample_map(0.8, 3, 25, seed=12)
    assert not np.array_equal(a.frequencies, c.frequencies)


def test_frequency_moments():
    # W entries are i.i.d. Normal(0, sigma^-2); with 10^4 draws the sample
    # mean sits within 4 standard errors and the variance within 10%
    sigma = 2.0
    fm = sample_map(sigma, 10, 1000, seed=5)
    w = fm.frequencies.ravel()
    se = (1.0 / sigma) / np.sqrt(w.size)
    assert abs(w.mean()) < 4.0 * se
    assert abs(w.var() - sigma ** -2) < 0.1 * sigma ** -2


def test_apply_map_shape_and_bounds():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(4, 9))
    fm = sample_map(1.0, 4, 50, seed=3)
    Psi = apply_map(fm, X)
    assert Psi.shape == (50, 9)
    bound = np.sqrt(2.0 / 50) + 1e-15
    assert np.all(np.abs(Psi) <= bound)


def test_apply_map_promotes_vector():
    fm = sample_map(1.0, 1, 8, seed=4)
    Psi = apply_map(fm, np.array([0.0, 1.0, 2.0]))
    assert Psi.shape == (8, 3)


def test_self_kernel_unbiased():
    # psi(x).psi(x) estimates k(x,x) = 1; average the estimator over seeds
    rng = np.random.default_rng(7)
    x = rng.normal(size=(5, 1))
    vals = []
    for seed in range(50):
        fm = sample_map(1.0, 5, 2000, seed=seed)
        p = apply_map(fm, x)
        vals.append(float(p[:, 0] @ p[:, 0]))
    assert abs(np.mean(vals) - 1.0) < 0.05


def test_kernel_error_shrinks_with_d():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(3, 30))
    K = gram(KernelSpec("rbf", 1.0), X, X)
    errs = []
    for D in (50, 500, 5000):
        fm = sample_map(1.0, 3, D, seed=21)
        Psi = apply_map(fm, X)
        errs.append(float(np.max(np.abs(Psi.T @ Psi - K))))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.05


def test_kernel_estimate_shift_invariant():
    # the estimate depends on x - y only through W(x - y), so translating
    # both inputs moves the estimate very little at large D
    rng = np.random.default_rng(13)
    x = rng.normal(size=(4, 1))
    y = rng.normal(size=(4, 1))
    shift = rng.normal(size=(4, 1))
    fm = sample_map(1.0, 4, 20000, seed=1)
    a = float(apply_map(fm, x)[:, 0] @ apply_map(fm, y)[:, 0])
    b = float(apply_map(fm, x + shift)[:, 0] @ apply_map(fm, y + shift)[:, 0])
    assert abs(a - b) < 0.02


def test_sample_map_validation():
    with pytest.raises(ContractViolation):
        sample_map(0.0, 3, 10, seed=0)
    with pytest.raises(ContractViolation):
        sample_map(1.0, 0, 10, seed=0)
    with pytest.raises(ContractViolation):
        sample_map(1.0, 3, 0, seed=0)


def test_apply_map_rejects_wrong_rows():
    fm = sample_map(1.0, 3, 10, seed=0)
    with pytest.raises(ContractViolation):
        apply_map(fm, np.zeros((4, 5)))
