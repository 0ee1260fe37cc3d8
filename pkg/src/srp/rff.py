"""Random Fourier feature maps for the RBF kernel.

Single-cosine construction: psi(x) = sqrt(2/D) * cos(W x + b) with
W ~ Normal(0, sigma^-2) i.i.d. and b ~ Uniform[0, 2pi), so that
psi(x)^T psi(y) is an unbiased D-sample estimate of
exp(-||x - y||^2 / (2 sigma^2)).
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolation


@dataclass(frozen=True)
class FeatureMap:
    frequencies: np.ndarray  # (D, d)
    phases: np.ndarray       # (D,) in [0, 2pi)
    scale: float             # sqrt(2/D)
    sigma: float
    seed: int


def sample_map(sigma, d, D, seed):
    """Draw a feature map; fully determined by (sigma, d, D, seed)."""
    if not sigma > 0:
        raise ContractViolation("sigma must be positive")
    d = int(d)
    D = int(D)
    if d < 1 or D < 1:
        raise ContractViolation("d and D must be at least 1")
    rng = np.random.default_rng(seed)
    W = rng.normal(0.0, 1.0 / sigma, size=(D, d))
    b = rng.uniform(0.0, 2.0 * np.pi, size=D)
    return FeatureMap(
        frequencies=W, phases=b, scale=float(np.sqrt(2.0 / D)),
        sigma=float(sigma), seed=int(seed),
    )


def apply_map(fmap, X):
    """Feature matrix Psi (D x n) for the columns of X (d x n)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[0] != fmap.frequencies.shape[1]:
        raise ContractViolation(
            f"X must have {fmap.frequencies.shape[1]} rows, got shape {X.shape}"
        )
    return fmap.scale * np.cos(fmap.frequencies @ X + fmap.phases[:, None])
