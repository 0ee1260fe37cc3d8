"""Kernel Gram matrices (rbf, linear, delta) and bandwidth selection."""

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolation, DataError

_KINDS = ("rbf", "linear", "delta")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice. `sigma` is required (positive) for rbf, ignored otherwise."""

    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ContractViolation(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf":
            if self.sigma is None or not (self.sigma > 0):
                raise ContractViolation("rbf kernel needs sigma > 0")


def _columns(A, name):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2:
        raise ContractViolation(f"{name} must be a d x n matrix")
    return A


def gram(spec, A, B):
    """Gram matrix k(a_i, b_j) for columns of A (d x m) and B (d x n).

    rbf:    exp(-||a-b||^2 / (2 sigma^2))
    linear: A^T B
    delta:  1.0 where columns are identical, else 0.0

    The square case (B is A, or equal to it entrywise) is returned exactly
    symmetric, with unit diagonal for rbf/delta.
    """
    A = _columns(A, "A")
    B = _columns(B, "B")
    if A.shape[0] != B.shape[0]:
        raise ContractViolation(
            f"row-count mismatch: A has {A.shape[0]} rows, B has {B.shape[0]}"
        )
    square = A is B or (A.shape == B.shape and np.array_equal(A, B))
    if spec.kind == "linear":
        return A.T @ B
    if spec.kind == "delta":
        m, n = A.shape[1], B.shape[1]
        eq = np.ones((m, n), dtype=bool)
        for i in range(A.shape[0]):
            eq &= A[i][:, None] == B[i][None, :]
        return eq.astype(np.float64)
    # rbf: expanded squared distances, clamped against cancellation
    an = np.sum(A * A, axis=0)
    bn = np.sum(B * B, axis=0)
    d2 = an[:, None] + bn[None, :] - 2.0 * (A.T @ B)
    np.maximum(d2, 0.0, out=d2)
    if square:
        d2 = 0.5 * (d2 + d2.T)
        np.fill_diagonal(d2, 0.0)
    return np.exp(d2 / (-2.0 * spec.sigma**2))


def median_sigma(X):
    """Median pairwise distance between columns (the usual bandwidth heuristic).

    Falls back to 1.0 when the median distance is zero (all-duplicate data).
    """
    X = _columns(X, "X")
    n = X.shape[1]
    if n < 2:
        return 1.0
    sq = np.sum(X * X, axis=0)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X.T @ X)
    np.maximum(d2, 0.0, out=d2)
    iu = np.triu_indices(n, k=1)
    med = float(np.median(np.sqrt(d2[iu])))
    return med if med > 0.0 else 1.0


def sigma_grid(sigma0):
    """Default CV grid: sigma0 * 2^{-4..4}."""
    if not sigma0 > 0:
        raise ContractViolation("sigma0 must be positive")
    return [sigma0 * 2.0**p for p in range(-4, 5)]


def select_sigma_cv(X, labels, folds=10, grid=None, *, downstream="kspca",
                    k=2, seed=0, return_scores=False):
    """Pick the rbf bandwidth maximizing mean held-out 1-NN accuracy.

    K-fold CV (default 10) over a seeded shuffle; the score of each sigma is
    the accuracy of the `downstream` embedding ("kspca" or "ksrp") at
    dimension k on the held-out fold. Folds whose training part misses a
    class are skipped; ties go to the smaller sigma. A sigma whose fit fails
    numerically (kernel singular beyond ridge repair) is disqualified rather
    than fatal; if every sigma fails, the error propagates.
    """
    from .embeddings import fit_kspca, fit_ksrp, transform
    from .evaluate import one_nn_accuracy
    from .exceptions import NumericalError
    from .linalg import psd_factor

    X = _columns(X, "X")
    labels = np.asarray(labels)
    n = X.shape[1]
    if labels.shape[0] != n:
        raise ContractViolation("labels length must match column count")
    if not (2 <= folds <= n):
        raise ContractViolation(f"need n >= folds >= 2, got n={n}, folds={folds}")
    if downstream not in ("kspca", "ksrp"):
        raise ContractViolation(f"unknown downstream method {downstream!r}")
    if grid is None:
        grid = sigma_grid(median_sigma(X))
    grid = sorted(float(s) for s in grid)
    if not grid:
        raise ContractViolation("sigma grid is empty")

    classes = np.unique(labels)
    # integer class codes so the delta kernel sees numeric columns
    codes = np.searchsorted(classes, labels).astype(np.float64)[None, :]

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    chunks = np.array_split(perm, folds)
    fold_sets = []
    for te in chunks:
        tr = np.setdiff1d(perm, te)
        if te.size == 0 or np.unique(labels[tr]).size < classes.size:
            continue  # a class is absent from this training fold
        fold_sets.append((np.sort(tr), np.sort(te)))
    if not fold_sets:
        raise DataError("every CV fold had a class missing from its training part")

    scores = {}
    last_err = None
    for sigma in grid:
        spec = KernelSpec("rbf", sigma)
        accs = []
        try:
            for tr, te in fold_sets:
                Xtr, Xte = X[:, tr], X[:, te]
                ytr, yte = labels[tr], labels[te]
                kk = min(k, Xtr.shape[1])
                L = gram(KernelSpec("delta"), codes[:, tr], codes[:, tr])
                if downstream == "kspca":
                    model = fit_kspca(Xtr, spec, L, kk)
                else:
                    model = fit_ksrp(Xtr, spec, psd_factor(L, kk))
                Ztr = transform(model, Xtr)
                Zte = transform(model, Xte)
                accs.append(one_nn_accuracy(Ztr, ytr, Zte, yte))
        except NumericalError as ex:
            last_err = ex
            continue
        scores[sigma] = float(np.mean(accs))
    if not scores:
        raise NumericalError(
            f"every sigma in the grid failed numerically: {last_err}"
        )
    best = max(scores, key=lambda s: (scores[s], -s))
    if return_scores:
        return best, scores
    return best
