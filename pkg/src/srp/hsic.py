"""Empirical Hilbert-Schmidt independence criterion between two Gram matrices."""

import numpy as np

from .exceptions import ContractViolation
from .linalg import double_center, frobenius


def hsic_empirical(K, L):
    """trace(K H L H) / (n-1)^2, via O(n^2) double-centering of L.

    K and L must be square, the same size n >= 2, and symmetric within 1e-8
    relative. Larger on strongly dependent kernel pairs, ~0 on independent
    ones; >= 0 up to roundoff when both inputs are PSD.
    """
    K = np.asarray(K, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ContractViolation(f"K must be square, got {K.shape}")
    if L.shape != K.shape:
        raise ContractViolation(f"shape mismatch: K {K.shape} vs L {L.shape}")
    n = K.shape[0]
    if n < 2:
        raise ContractViolation("need n >= 2 samples")
    for name, M in (("K", K), ("L", L)):
        if frobenius(M - M.T) > 1e-8 * max(frobenius(M), 1e-300):
            raise ContractViolation(f"{name} is not symmetric within 1e-8")
    Lc = double_center(L)
    # trace(K @ Lc) without forming the product
    return float(np.sum(K * Lc.T)) / (n - 1) ** 2
