"""Dense symmetric matrix primitives: centering, top-k eigendecomposition, PSD factorization.

All decompositions are implemented here from scratch (cyclic Jacobi for small
matrices; Householder tridiagonalization + Sturm bisection + inverse iteration
for larger ones; Cholesky and triangular solves for the kernel solvers).
numpy supplies array storage and BLAS matrix products only; the hand-written
loops are compiled with numba.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .exceptions import ContractViolation, NumericalError

_EPS = float(np.finfo(np.float64).eps)

# Cyclic Jacobi handles matrices up to this dimension; it is the simplest
# robust solver for the d x d and fold-sized problems the library produces.
# Above it, the tridiagonal path keeps the same contract at O(n^3) with a
# far smaller constant.
_JACOBI_DIM_MAX = 64


@dataclass(frozen=True)
class EigPair:
    """Top-k eigenpairs: `values` descending, `vectors` has the matching unit
    eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray


def _as_matrix(A, name="matrix"):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ContractViolation(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    if not np.isfinite(A).all():
        raise ContractViolation(f"{name} contains non-finite entries")
    return A


def frobenius(A):
    A = np.asarray(A, dtype=np.float64)
    return float(np.sqrt(np.sum(A * A)))


def center_columns(M):
    """Subtract the mean column: M -> M (I - ee^T/n).

    Every row of the result has zero mean; n = 1 gives the zero matrix.
    """
    M = _as_matrix(M)
    if M.shape[1] < 1:
        raise ContractViolation("need at least one column to center")
    return M - M.mean(axis=1, keepdims=True)


def double_center(M):
    """Both-sided centering H M H without materializing H (O(n^2))."""
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ContractViolation("double_center expects a square matrix")
    row = M.mean(axis=1, keepdims=True)
    col = M.mean(axis=0, keepdims=True)
    return M - row - col + M.mean()


# ----------------------------------------------------------------------------
# compiled kernels
# ----------------------------------------------------------------------------

@njit(cache=True)
def _jacobi(A, V, tol_off, max_sweeps):
    # Cyclic-by-row Jacobi; returns the final off-diagonal Frobenius mass.
    n = A.shape[0]
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * A[i, j] * A[i, j]
        if np.sqrt(off) <= tol_off:
            return np.sqrt(off)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                # 2x2 symmetric Schur decomposition, smaller rotation angle
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
    off = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            off += 2.0 * A[i, j] * A[i, j]
    return np.sqrt(off)


@njit(cache=True)
def _tridiagonalize(A):
    # Householder reduction A -> T = Q^T A Q. Returns (diag, offdiag, R) where
    # column j of R stores the unit reflector acting on rows j+1..n-1.
    n = A.shape[0]
    R = np.zeros((n, n))
    d = np.empty(n)
    e = np.zeros(n - 1)
    w = np.empty(n)
    for j in range(n - 2):
        # scale the column first so near-zero tails can't underflow beta
        scale = 0.0
        for i in range(j + 1, n):
            scale += abs(A[i, j])
        if scale == 0.0:
            e[j] = 0.0
            continue
        s = 0.0
        for i in range(j + 1, n):
            # divide (not multiply by a reciprocal): 1/scale overflows once
            # the tail of a rank-deficient matrix decays into denormals
            A[i, j] /= scale
            s += A[i, j] * A[i, j]
        s = np.sqrt(s)
        if A[j + 1, j] < 0.0:
            s = -s
        e[j] = -s * scale
        # v = x + sign(x0)*||x||*e1 (no cancellation), stored in A[:, j]
        A[j + 1, j] += s
        vn2 = 0.0
        for i in range(j + 1, n):
            vn2 += A[i, j] * A[i, j]
        beta = 2.0 / vn2
        # w = beta * B v ; c = v^T (B v)
        cc = 0.0
        for i in range(j + 1, n):
            t = 0.0
            for k in range(j + 1, n):
                t += A[i, k] * A[k, j]
            w[i] = t
            cc += A[i, j] * t
        half = 0.5 * beta * beta * cc
        for i in range(j + 1, n):
            w[i] = beta * w[i] - half * A[i, j]
        # B <- B - v w^T - w v^T
        for i in range(j + 1, n):
            vi = A[i, j]
            wi = w[i]
            for k in range(j + 1, n):
                A[i, k] -= vi * w[k] + wi * A[k, j]
        inv = 1.0 / np.sqrt(vn2)
        for i in range(j + 1, n):
            R[i, j] = A[i, j] * inv
    for i in range(n):
        d[i] = A[i, i]
    if n >= 2:
        e[n - 2] = A[n - 1, n - 2]
    return d, e, R


@njit(cache=True)
def _apply_reflectors(R, Y):
    # Y <- Q Y, accumulating the Householder reflectors in reverse order.
    n = R.shape[0]
    k = Y.shape[1]
    for j in range(n - 3, -1, -1):
        for c in range(k):
            t = 0.0
            for i in range(j + 1, n):
                t += R[i, j] * Y[i, c]
            t *= 2.0
            for i in range(j + 1, n):
                Y[i, c] -= t * R[i, j]


@njit(cache=True)
def _sturm_count(d, e2, lam):
    # number of eigenvalues of the tridiagonal strictly below lam
    n = d.shape[0]
    cnt = 0
    q = d[0] - lam
    if q < 0.0:
        cnt += 1
    for i in range(1, n):
        if q == 0.0:
            q = 1e-307
        q = d[i] - lam - e2[i - 1] / q
        if q < 0.0:
            cnt += 1
    return cnt


@njit(cache=True)
def _bisect_ranks(d, e2, ranks, lo0, hi0):
    # eigenvalue of ascending rank r (0-indexed) for each requested rank,
    # via Sturm-count bisection on the Gershgorin interval
    m = ranks.shape[0]
    lo = np.full(m, lo0)
    hi = np.full(m, hi0)
    out = np.empty(m)
    for it in range(210):
        done = True
        for j in range(m):
            sc = max(abs(lo[j]), abs(hi[j]), 1e-300)
            if hi[j] - lo[j] > 8.0 * 2.220446049250313e-16 * sc:
                done = False
                mid = 0.5 * (lo[j] + hi[j])
                if _sturm_count(d, e2, mid) <= ranks[j]:
                    lo[j] = mid
                else:
                    hi[j] = mid
        if done:
            break
    for j in range(m):
        out[j] = 0.5 * (lo[j] + hi[j])
    return out


@njit(cache=True)
def _tridiag_invit(d, e, lams, starts, Z):
    # Inverse iteration on the tridiagonal for each shift in lams (descending),
    # orthogonalizing within clusters of nearby eigenvalues. Returns True when
    # every vector passed its residual check.
    n = d.shape[0]
    k = lams.shape[0]
    tnorm = 0.0
    for i in range(n):
        s = abs(d[i])
        if i > 0:
            s += abs(e[i - 1])
        if i < n - 1:
            s += abs(e[i])
        if s > tnorm:
            tnorm = s
    if tnorm == 0.0:
        for j in range(k):
            for i in range(n):
                Z[i, j] = 0.0
            Z[j % n, j] = 1.0
        return True
    eps = 2.220446049250313e-16
    eps3 = eps * tnorm
    gtol = 1e-6 * tnorm
    low = np.empty(n)
    dg = np.empty(n)
    u1 = np.empty(n)
    u2 = np.empty(n)
    piv = np.empty(n, np.bool_)
    x = np.empty(n)
    ok = True
    mu_prev = 0.0
    for j in range(k):
        mu = lams[j]
        if j > 0 and abs(lams[j] - lams[j - 1]) <= gtol:
            if mu >= mu_prev - eps3:
                mu = mu_prev - eps3  # separate identical shifts
        mu_prev = mu
        # LU factorization of (T - mu I) with adjacent-row pivoting
        u = d[0] - mu
        v = e[0] if n > 1 else 0.0
        for i in range(n - 1):
            if abs(e[i]) > abs(u):
                piv[i] = True
                dg[i] = e[i]
                u1[i] = d[i + 1] - mu
                u2[i] = e[i + 1] if i + 1 < n - 1 else 0.0
                m = u / e[i]
                u = v - m * u1[i]
                v = -m * u2[i]
            else:
                piv[i] = False
                if u == 0.0:
                    # eps3, not a denormal: a spike of 1/pivot must stay far
                    # from overflow so its square norm is representable
                    u = eps3
                dg[i] = u
                u1[i] = v
                u2[i] = 0.0
                m = e[i] / u
                u = (d[i + 1] - mu) - m * v
                v = e[i + 1] if i + 1 < n - 1 else 0.0
            low[i] = m
        dg[n - 1] = u if u != 0.0 else eps3
        u1[n - 1] = 0.0
        u2[n - 1] = 0.0
        # start of this shift's cluster (transitive grouping by gtol)
        gstart = j
        while gstart > 0 and abs(lams[gstart] - lams[gstart - 1]) <= gtol:
            gstart -= 1
        for i in range(n):
            x[i] = starts[i, j]
        accepted = False
        for itn in range(6):
            for p in range(gstart, j):
                dot = 0.0
                for i in range(n):
                    dot += Z[i, p] * x[i]
                for i in range(n):
                    x[i] -= dot * Z[i, p]
            # solve (T - mu I) y = x in place
            for i in range(n - 1):
                if piv[i]:
                    t = x[i]
                    x[i] = x[i + 1]
                    x[i + 1] = t
                x[i + 1] -= low[i] * x[i]
            x[n - 1] = x[n - 1] / dg[n - 1]
            if n >= 2:
                x[n - 2] = (x[n - 2] - u1[n - 2] * x[n - 1]) / dg[n - 2]
            for i in range(n - 3, -1, -1):
                x[i] = (x[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / dg[i]
            bad = False
            nrm = 0.0
            for i in range(n):
                if not np.isfinite(x[i]):
                    bad = True
                    break
                nrm += x[i] * x[i]
            if bad or nrm == 0.0 or not np.isfinite(nrm):
                for i in range(n):
                    x[i] = starts[i, j] + (itn + 1.0) / (i + 2.0)
                continue
            inv = 1.0 / np.sqrt(nrm)
            for i in range(n):
                x[i] *= inv
            if itn >= 1:
                # residual against the unperturbed eigenvalue
                rn = 0.0
                for i in range(n):
                    r = (d[i] - lams[j]) * x[i]
                    if i > 0:
                        r += e[i - 1] * x[i - 1]
                    if i < n - 1:
                        r += e[i] * x[i + 1]
                    rn += r * r
                if np.sqrt(rn) <= 64.0 * eps * tnorm:
                    accepted = True
                    break
        # final in-cluster orthogonalization + normalization
        for p in range(gstart, j):
            dot = 0.0
            for i in range(n):
                dot += Z[i, p] * x[i]
            for i in range(n):
                x[i] -= dot * Z[i, p]
        nrm = 0.0
        for i in range(n):
            nrm += x[i] * x[i]
        if nrm == 0.0:
            ok = False
            nrm = 1.0
        inv = 1.0 / np.sqrt(nrm)
        for i in range(n):
            Z[i, j] = x[i] * inv
        if not accepted:
            rn = 0.0
            for i in range(n):
                r = (d[i] - lams[j]) * Z[i, j]
                if i > 0:
                    r += e[i - 1] * Z[i - 1, j]
                if i < n - 1:
                    r += e[i] * Z[i + 1, j]
                rn += r * r
            if np.sqrt(rn) > 1e-11 * tnorm:
                ok = False
    return ok


@njit(cache=True)
def _cholesky_lower(A):
    # A = G G^T with G lower triangular; flag False when not SPD
    n = A.shape[0]
    G = np.zeros_like(A)
    for j in range(n):
        s = A[j, j]
        for k in range(j):
            s -= G[j, k] * G[j, k]
        if s <= 0.0:
            return G, False
        G[j, j] = np.sqrt(s)
        inv = 1.0 / G[j, j]
        for i in range(j + 1, n):
            t = A[i, j]
            for k in range(j):
                t -= G[i, k] * G[j, k]
            G[i, j] = t * inv
    return G, True


@njit(cache=True)
def _solve_transpose_lower(G, B):
    # solves G^T X = B for X, G lower triangular (so G^T is upper)
    n = G.shape[0]
    k = B.shape[1]
    X = np.empty((n, k))
    for c in range(k):
        for i in range(n - 1, -1, -1):
            s = B[i, c]
            for j in range(i + 1, n):
                s -= G[j, i] * X[j, c]
            X[i, c] = s / G[i, i]
    return X


# ----------------------------------------------------------------------------
# public solvers
# ----------------------------------------------------------------------------

def _check_symmetric(A, rel_tol, name):
    if A.shape[0] != A.shape[1]:
        raise ContractViolation(f"{name} must be square, got {A.shape}")
    scale = frobenius(A)
    skew = frobenius(A - A.T)
    if skew > rel_tol * max(scale, 1e-300):
        raise ContractViolation(
            f"{name} is not symmetric within {rel_tol:g} relative "
            f"(asymmetry {skew:.3e} vs scale {scale:.3e})"
        )


def _eig_all_jacobi(A):
    n = A.shape[0]
    work = np.ascontiguousarray(A.copy())
    V = np.eye(n)
    tol = 1e-12 * frobenius(A)
    off = _jacobi(work, V, tol, 100)
    if off > tol and off > 0.0:
        raise NumericalError(
            f"Jacobi sweep limit reached with off-diagonal mass {off:.3e}"
        )
    return np.diag(work).copy(), V


def _eig_topk_tridiag(A, k):
    n = A.shape[0]
    d, e, R = _tridiagonalize(np.ascontiguousarray(A.copy()))
    e2 = e * e
    rad = np.abs(e)
    g = np.zeros(n)
    g[:-1] += rad
    g[1:] += rad
    lo = float(np.min(d - g)) - 1e-3 * max(1.0, float(np.max(np.abs(d) + g)))
    hi = float(np.max(d + g)) + 1e-3 * max(1.0, float(np.max(np.abs(d) + g)))
    ranks = np.arange(n - 1, n - 1 - k, -1).astype(np.int64)
    lams = _bisect_ranks(d, e2, ranks, lo, hi)
    starts = np.random.default_rng(20260819).standard_normal((n, k))
    Z = np.empty((n, k))
    ok = _tridiag_invit(d, e, lams, starts, Z)
    if not ok:
        raise NumericalError("inverse iteration failed its residual check")
    _apply_reflectors(R, Z)
    return lams, Z


def _fix_signs(V):
    # largest-magnitude component of each eigenvector made positive
    idx = np.argmax(np.abs(V), axis=0)
    flip = V[idx, np.arange(V.shape[1])] < 0.0
    V[:, flip] *= -1.0
    return V


def sym_eig_topk(A, k):
    """Top-k eigenpairs of a symmetric matrix, eigenvalues descending.

    Sign convention: the largest-magnitude component of each eigenvector is
    positive. Raises ContractViolation for non-square/asymmetric input or a
    k outside 1..dim.
    """
    A = _as_matrix(A, "A")
    _check_symmetric(A, 1e-10, "A")
    n = A.shape[0]
    k = int(k)
    if k < 1 or k > n:
        raise ContractViolation(f"k must be in 1..{n}, got {k}")
    As = 0.5 * (A + A.T)
    if n <= _JACOBI_DIM_MAX:
        vals, vecs = _eig_all_jacobi(As)
        order = np.argsort(-vals, kind="stable")[:k]
        vals = vals[order]
        vecs = vecs[:, order]
    else:
        vals, vecs = _eig_topk_tridiag(As, k)
        order = np.argsort(-vals, kind="stable")
        vals = vals[order]
        vecs = vecs[:, order]
    return EigPair(values=vals, vectors=_fix_signs(np.ascontiguousarray(vecs)))


def psd_factor(L, k):
    """Best rank-k factor Psi (k x n) of a PSD matrix: L ~= Psi^T Psi.

    Eigen-based: Psi = sqrt(Lambda_k) V_k^T. Eigenvalues in [-1e-8, 0) are
    clamped to zero; anything below -1e-8 raises (indefinite input).
    """
    L = _as_matrix(L, "L")
    _check_symmetric(L, 1e-8, "L")
    n = L.shape[0]
    k = int(k)
    if k < 1 or k > n:
        raise ContractViolation(f"k must be in 1..{n}, got {k}")
    Ls = 0.5 * (L + L.T)
    if n <= _JACOBI_DIM_MAX:
        vals, vecs = _eig_all_jacobi(Ls)
        if float(vals.min()) < -1e-8:
            raise ContractViolation(
                f"matrix is indefinite: eigenvalue {vals.min():.3e} < -1e-8"
            )
        order = np.argsort(-vals, kind="stable")[:k]
        top = vals[order]
        V = vecs[:, order]
    else:
        d, e, _ = _tridiagonalize(np.ascontiguousarray(Ls.copy()))
        if _sturm_count(d, e * e, -1e-8) > 0:
            raise ContractViolation("matrix is indefinite: eigenvalue < -1e-8")
        top, V = _eig_topk_tridiag(Ls, k)
        order = np.argsort(-top, kind="stable")
        top = top[order]
        V = V[:, order]
    V = _fix_signs(np.ascontiguousarray(V))
    return np.sqrt(np.maximum(top, 0.0))[:, None] * V.T


def cholesky_lower(A):
    """A = G G^T for symmetric positive definite A; raises NumericalError otherwise."""
    A = np.ascontiguousarray(_as_matrix(A, "A"))
    G, ok = _cholesky_lower(A)
    if not ok:
        raise NumericalError("Cholesky failed: matrix is not positive definite")
    return G

def solve_transpose_lower(G, B):
    """Solve G^T X = B with G lower triangular."""
    B = np.ascontiguousarray(_as_matrix(B, "B"))
    return _solve_transpose_lower(np.ascontiguousarray(G), B)


def warmup():
    """Compile the numba kernels on tiny inputs (cached on disk afterwards)."""
    rng = np.random.default_rng(0)
    small = rng.standard_normal((6, 6))
    small = small @ small.T
    sym_eig_topk(small, 3)
    big = rng.standard_normal((_JACOBI_DIM_MAX + 6, _JACOBI_DIM_MAX + 6))
    big = big @ big.T
    sym_eig_topk(big, 3)
    psd_factor(big @ big.T + np.eye(big.shape[0]), 2)
    spd = small + 10.0 * np.eye(6)
    G = cholesky_lower(spd)
    solve_transpose_lower(G, np.eye(6))
