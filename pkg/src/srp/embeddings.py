"""Supervised embeddings: SPCA, KSPCA, SRP, KSRP.

All four maximize the empirical HSIC between the projected data and the
labels' kernel. The *PCA pair solves the constrained trace problem exactly
by eigendecomposition; the *RP pair replaces the label kernel with an
explicit factor Psi_Y and reads the projection off a single matrix product.

Sample layout everywhere: columns are samples (X is d x n).
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import linalg
from .exceptions import ContractViolation, NumericalError
from .kernels import KernelSpec, gram
from .rff import FeatureMap, apply_map

_RIDGE = 1e-8
_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class LinearModel:
    """Linear projection x -> projector^T x.

    SPCA projectors have orthonormal columns; SRP projectors carry an extra
    Sigma^(1/2)-and-rotation factor and are deliberately left unwhitened.
    """

    projector: np.ndarray  # d x k
    method: str            # "spca" | "pca" | "srp"
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def k(self):
        return self.projector.shape[1]


@dataclass(frozen=True)
class KernelModel:
    """Kernelized projection; keeps the training columns for cross-kernels.

    KSPCA: z(x) = beta^T k(X_train, x).
    KSRP (exact backend): z(x) = W k(X_train, x) with W = Psi_Y H.
    KSRP (feature backend): z(x) = A psi(x) with A = W Psi_X^T.
    """

    method: str            # "kspca" | "ksrp"
    X_train: np.ndarray    # d x n
    coefficients: Any = None   # beta (n x k) for kspca, A (k x D) for rff ksrp
    label_factor: Any = None   # W = Psi_Y H (k x n) for ksrp
    data_kernel: Any = None    # KernelSpec when the kernel is computed exactly
    feature_map: Any = None    # FeatureMap when the data kernel is approximated
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def k(self):
        if self.method == "kspca":
            return self.coefficients.shape[1]
        return (self.label_factor if self.label_factor is not None
                else self.coefficients).shape[0]


def _data_matrix(X, name="X"):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ContractViolation(f"{name} must be d x n, got ndim={X.ndim}")
    if not np.isfinite(X).all():
        raise ContractViolation(f"{name} contains non-finite entries")
    return X


def fit_spca(X, L, k, method="spca"):
    """Supervised PCA: top-k eigenvectors of X H L H X^T.

    L is the label Gram matrix (symmetric PSD). L = I recovers PCA on
    column-centered X.
    """
    X = _data_matrix(X)
    d, n = X.shape
    if n < 2:
        raise ContractViolation("need at least 2 samples")
    k = int(k)
    if k < 1 or k > d:
        raise ContractViolation(f"k must be in 1..{d}, got {k}")
    L = _data_matrix(L, "L")
    if L.shape != (n, n):
        raise ContractViolation(f"L must be {n}x{n}, got {L.shape}")
    Xc = linalg.center_columns(X)
    Q = Xc @ L @ Xc.T
    Q = 0.5 * (Q + Q.T)
    pair = linalg.sym_eig_topk(Q, k)
    U = pair.vectors
    resid = linalg.frobenius(U.T @ U - np.eye(k))
    return LinearModel(
        projector=U, method=method,
        meta={"k": k, "objective_values": pair.values,
              "constraint_residual": resid},
    )


def fit_kspca(X, spec, L, k, *, gram_K=None):
    """Kernel SPCA via the ridged symmetric reduction.

    Solves max_beta trace(beta^T K H L H K beta) s.t. beta^T K beta = I:
    with Ktilde = K + 1e-8 I = G G^T (Cholesky), eigendecompose
    S = G^T (H L H) G and back-substitute beta = G^-T V. The fitted model
    records ||beta^T K beta - I||_F against the *unridged* K; if that
    residual reaches 1e-6 the kernel was singular beyond ridge repair and
    the fit fails.

    `gram_K` optionally supplies a precomputed gram(spec, X, X) so callers
    timing kernel construction separately don't pay for it twice.
    """
    X = _data_matrix(X)
    n = X.shape[1]
    if n < 2:
        raise ContractViolation("need at least 2 samples")
    k = int(k)
    if k < 1 or k > n:
        raise ContractViolation(f"k must be in 1..{n}, got {k}")
    L = _data_matrix(L, "L")
    if L.shape != (n, n):
        raise ContractViolation(f"L must be {n}x{n}, got {L.shape}")
    K = gram(spec, X, X) if gram_K is None else _data_matrix(gram_K, "gram_K")
    Kt = K + _RIDGE * np.eye(n)
    try:
        G = linalg.cholesky_lower(Kt)
    except NumericalError as ex:
        raise NumericalError(f"kernel matrix is not PSD: {ex}") from ex
    M = linalg.double_center(L)
    S = G.T @ M @ G
    S = 0.5 * (S + S.T)
    pair = linalg.sym_eig_topk(S, k)
    beta = linalg.solve_transpose_lower(G, pair.vectors)
    resid = linalg.frobenius(beta.T @ (K @ beta) - np.eye(k))
    if not resid < _RESIDUAL_TOL:
        raise NumericalError(
            f"kernel matrix singular beyond ridge repair: "
            f"||beta^T K beta - I||_F = {resid:.3e}"
        )
    return KernelModel(
        method="kspca", X_train=X.copy(), coefficients=beta, data_kernel=spec,
        meta={"k": k, "objective_values": pair.values,
              "constraint_residual": resid, "ridge": _RIDGE},
    )


def fit_srp(X, PsiY):
    """Supervised random projection: projector Uhat = (X H) Psi_Y^T.

    PsiY is a k x n factor of the label kernel (from psd_factor or an RFF
    map of the labels). The training embedding is Uhat^T X = Psi_Y H X^T X;
    note X enters uncentered on the right, so the embedding matches SPCA's
    only up to rotation and a Sigma^(1/2) scaling.
    """
    X = _data_matrix(X)
    PsiY = _data_matrix(np.atleast_2d(PsiY), "PsiY")
    if PsiY.shape[1] != X.shape[1]:
        raise ContractViolation(
            f"PsiY must have {X.shape[1]} columns, got {PsiY.shape[1]}"
        )
    U = linalg.center_columns(X) @ PsiY.T
    return LinearModel(projector=U, method="srp",
                       meta={"k": U.shape[1], "psi_rows": PsiY.shape[0]})


def fit_ksrp(X, data_backend, PsiY, *, gram_K=None, features_X=None):
    """Kernelized SRP: training embedding Psi_Y H K.

    `data_backend` is either a KernelSpec (K computed exactly) or a
    FeatureMap (K approximated as Psi_X^T Psi_X, in which case only the
    k x D matrix A = Psi_Y H Psi_X^T is kept and transforms cost O(Dm)).
    `gram_K` / `features_X` optionally inject the precomputed kernel or
    feature matrix for the training columns.
    """
    X = _data_matrix(X)
    n = X.shape[1]
    PsiY = _data_matrix(np.atleast_2d(PsiY), "PsiY")
    if PsiY.shape[1] != n:
        raise ContractViolation(f"PsiY must have {n} columns, got {PsiY.shape[1]}")
    W = linalg.center_columns(PsiY)
    if isinstance(data_backend, KernelSpec):
        return KernelModel(
            method="ksrp", X_train=X.copy(), label_factor=W,
            data_kernel=data_backend, meta={"k": W.shape[0], "backend": "exact"},
        )
    if isinstance(data_backend, FeatureMap):
        PsiX = apply_map(data_backend, X) if features_X is None else features_X
        if PsiX.shape != (data_backend.frequencies.shape[0], n):
            raise ContractViolation("features_X shape does not match the map")
        A = W @ PsiX.T
        return KernelModel(
            method="ksrp", X_train=X.copy(), coefficients=A,
            feature_map=data_backend,
            meta={"k": W.shape[0], "backend": "rff",
                  "D": data_backend.frequencies.shape[0]},
        )
    raise ContractViolation(
        f"data_backend must be a KernelSpec or FeatureMap, got {type(data_backend)}"
    )


def transform(model, X_new):
    """Embed new columns with a fitted model; returns k x m."""
    X_new = _data_matrix(X_new, "X_new")
    if isinstance(model, LinearModel):
        if X_new.shape[0] != model.projector.shape[0]:
            raise ContractViolation(
                f"X_new must have {model.projector.shape[0]} rows, "
                f"got {X_new.shape[0]}"
            )
        return model.projector.T @ X_new
    if isinstance(model, KernelModel):
        if X_new.shape[0] != model.X_train.shape[0]:
            raise ContractViolation(
                f"X_new must have {model.X_train.shape[0]} rows, "
                f"got {X_new.shape[0]}"
            )
        if model.method == "kspca":
            return model.coefficients.T @ gram(model.data_kernel,
                                               model.X_train, X_new)
        if model.feature_map is not None:
            return model.coefficients @ apply_map(model.feature_map, X_new)
        return model.label_factor @ gram(model.data_kernel,
                                         model.X_train, X_new)
    raise ContractViolation(f"not a fitted model: {type(model)}")


def claim1_check(X, L):
    """Gram-level discrepancy between the eigen route and the factor route.

    With an exact full-rank factor Psi of L, the randomized embedding
    Z2 = Psi H X^T X and the exact one Z1 = U^T X (at k = rank(XHLHX^T))
    coincide up to an unobservable rotation and a Sigma^(1/2) scaling, so
    Z2^T Z2 must equal Z1^T Sigma Z1. Returns the relative Frobenius gap.
    """
    X = _data_matrix(X)
    n = X.shape[1]
    L = _data_matrix(L, "L")
    if L.shape != (n, n):
        raise ContractViolation(f"L must be {n}x{n}, got {L.shape}")
    Xc = linalg.center_columns(X)
    Q = Xc @ L @ Xc.T
    Q = 0.5 * (Q + Q.T)
    pair = linalg.sym_eig_topk(Q, Q.shape[0])
    lam_max = float(pair.values[0]) if pair.values.size else 0.0
    r = int(np.sum(pair.values > 1e-10 * max(lam_max, 0.0)))
    if r == 0:
        return 0.0
    U = pair.vectors[:, :r]
    sigma = pair.values[:r]
    Z1 = U.T @ X
    Psi = linalg.psd_factor(L, n)
    Z2 = linalg.center_columns(Psi) @ (X.T @ X)
    G1 = Z1.T @ (sigma[:, None] * Z1)
    G2 = Z2.T @ Z2
    denom = linalg.frobenius(G1)
    if denom == 0.0:
        return linalg.frobenius(G2)
    return linalg.frobenius(G2 - G1) / denom
