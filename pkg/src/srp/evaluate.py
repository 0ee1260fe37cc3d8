"""1-NN embedding quality, wall-clock benchmark harness, report serialization."""

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg
from .datasets import normalize01, split as split_dataset
from .embeddings import fit_kspca, fit_spca, fit_srp, fit_ksrp, transform
from .exceptions import ContractViolation, NumericalError
from .kernels import KernelSpec, gram, median_sigma, select_sigma_cv
from .rff import sample_map, apply_map

METHODS = ("pca", "spca", "kspca", "srp", "ksrp")


def one_nn_accuracy(Z_train, y_train, Z_test, y_test):
    """Fraction of test columns whose nearest training column (Euclidean)
    shares their label. Distance ties resolve to the lowest training index."""
    Ztr = np.atleast_2d(np.asarray(Z_train, dtype=np.float64))
    Zte = np.atleast_2d(np.asarray(Z_test, dtype=np.float64))
    y_train = np.asarray(y_train)
    y_test = np.asarray(y_test)
    if Ztr.shape[1] == 0:
        raise ContractViolation("empty training set")
    if Ztr.shape[0] != Zte.shape[0]:
        raise ContractViolation(
            f"dimension mismatch: train {Ztr.shape[0]}, test {Zte.shape[0]}"
        )
    if y_train.shape[0] != Ztr.shape[1] or y_test.shape[0] != Zte.shape[1]:
        raise ContractViolation("label counts must match column counts")
    if Zte.shape[1] == 0:
        raise ContractViolation("empty test set")
    tn = np.sum(Ztr * Ztr, axis=0)
    sn = np.sum(Zte * Zte, axis=0)
    d2 = tn[:, None] + sn[None, :] - 2.0 * (Ztr.T @ Zte)
    nearest = np.argmin(d2, axis=0)  # first minimum = lowest training index
    return float(np.mean(y_train[nearest] == y_test))


@dataclass
class BenchRow:
    method: str
    k: int
    repeat: int
    seed: int
    accuracy: float | None
    fit_ns: int
    kernel_ns: int
    solve_ns: int
    transform_ns: int
    skipped: bool = False
    contended: bool = False
    note: str = ""


_CSV_FIELDS = [f.strip() for f in (
    "method,k,repeat,seed,accuracy,fit_ns,kernel_ns,solve_ns,"
    "transform_ns,skipped,contended,note"
).split(",")]


@dataclass
class BenchReport:
    """One row per (method, k, repeat) plus per-(method, k) aggregates."""

    rows: list
    config: dict = field(default_factory=dict)

    def aggregates(self):
        out = []
        seen = []
        for row in self.rows:
            key = (row.method, row.k)
            if key not in seen:
                seen.append(key)
        for method, k in seen:
            group = [r for r in self.rows
                     if (r.method, r.k) == (method, k) and not r.skipped]
            rec = {"method": method, "k": k, "repeats": len(group)}
            if group:
                acc = np.array([r.accuracy for r in group])
                fit = np.array([r.fit_ns for r in group], dtype=np.float64)
                tra = np.array([r.transform_ns for r in group], dtype=np.float64)
                rec.update(
                    mean_accuracy=float(acc.mean()),
                    std_accuracy=float(acc.std()),
                    mean_fit_ns=float(fit.mean()),
                    std_fit_ns=float(fit.std()),
                    mean_transform_ns=float(tra.mean()),
                )
            else:
                rec["skipped"] = True
            out.append(rec)
        return out

    def to_csv_text(self):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            rec = asdict(row)
            rec["accuracy"] = "" if row.accuracy is None else repr(row.accuracy)
            rec["skipped"] = int(row.skipped)
            rec["contended"] = int(row.contended)
            w.writerow(rec)
        return buf.getvalue()

    def to_json_text(self):
        doc = {"config": self.config, "aggregates": self.aggregates()}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _derived_seeds(master, repeat):
    ss = np.random.SeedSequence((int(master), int(repeat)))
    state = ss.generate_state(3)
    return int(state[0]), int(state[1]), int(state[2])


class _Stopwatch:
    def __init__(self):
        self.ns = 0

    def __enter__(self):
        self._t0 = time.perf_counter_ns()
        return self

    def __exit__(self, *exc):
        self.ns += time.perf_counter_ns() - self._t0
        return False


def _fit_one(method, k, trn, ten, sigma, sigma_y, kx, psi_backend,
             seed_x, seed_y):
    """Fit + score one (method, k) on a normalized split.

    Returns (accuracy, kernel_ns, solve_ns, transform_ns) or a skip note.
    Kernel/feature construction is timed apart from the solve so the report
    can attribute fit time to its two phases.
    """
    X = trn.X
    d, n = X.shape
    if method in ("pca", "spca", "srp") and k > d:
        return f"k={k} exceeds d={d}"
    if k > n:
        return f"k={k} exceeds n={n}"
    codes = trn.label_codes()
    kern = _Stopwatch()
    solve = _Stopwatch()

    if method in ("pca", "spca"):
        with kern:
            L = np.eye(n) if method == "pca" else gram(
                KernelSpec("delta"), codes, codes)
        with solve:
            model = fit_spca(X, L, k, method=method)
    elif method == "kspca":
        spec = KernelSpec("rbf", sigma)
        with kern:
            L = gram(KernelSpec("delta"), codes, codes)
            K = gram(spec, X, X)
        with solve:
            model = fit_kspca(X, spec, L, k, gram_K=K)
    else:  # srp / ksrp
        with kern:
            if psi_backend == "rff":
                fmap_y = sample_map(sigma_y, 1, k, seed_y)
                PsiY = apply_map(fmap_y, codes)
            else:
                L = gram(KernelSpec("delta"), codes, codes)
                PsiY = linalg.psd_factor(L, k)
        if method == "srp":
            with solve:
                model = fit_srp(X, PsiY)
        else:
            if psi_backend == "rff":
                with kern:
                    fmap_x = sample_map(sigma, d, kx, seed_x)
                    PsiX = apply_map(fmap_x, X)
                with solve:
                    model = fit_ksrp(X, fmap_x, PsiY, features_X=PsiX)
            else:
                spec = KernelSpec("rbf", sigma)
                with kern:
                    K = gram(spec, X, X)
                with solve:
                    model = fit_ksrp(X, spec, PsiY, gram_K=K)

    tra = _Stopwatch()
    with tra:
        Zte = transform(model, ten.X)
    Ztr = transform(model, trn.X)
    acc = one_nn_accuracy(Ztr, trn.labels, Zte, ten.labels)
    return acc, kern.ns, solve.ns, tra.ns


def run_benchmark(ds, methods, ks, repeats, seed, *, train_fraction=0.7,
                  sigma_x="cv", sigma_y=1e-10, kx=1000, psi_backend="rff",
                  cv_downstream="kspca", cv_folds=10, parallel=False):
    """Repeated split/normalize/fit/score sweep over methods and ks.

    Per repeat: a fresh stratified split and [0,1] normalization, then every
    (method, k) is fitted and scored on the held-out part. `sigma_x` is a
    number, "median" (per-repeat median heuristic), or "cv" (10-fold
    cross-validated once on the first repeat's training split and reused).
    Infeasible combinations are recorded as skipped rows. Results are
    deterministic functions of `seed`; with parallel=True repeats run in a
    thread pool and timing columns are flagged as contended.
    """
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise ContractViolation(f"unknown method {m!r}")
    ks = [int(k) for k in ks]
    if not ks or min(ks) < 1:
        raise ContractViolation("ks must be positive")
    repeats = int(repeats)
    if repeats < 1:
        raise ContractViolation("repeats must be >= 1")

    needs_sigma = any(m in ("kspca", "ksrp") for m in methods)
    sigma_cached = None
    if needs_sigma:
        if isinstance(sigma_x, (int, float)):
            sigma_cached = float(sigma_x)
        elif sigma_x == "cv":
            split_seed, _, _ = _derived_seeds(seed, 0)
            tr0, te0 = split_dataset(ds, train_fraction, split_seed)
            trn0, _, _ = normalize01(tr0, te0)
            folds = min(cv_folds, trn0.n)
            sigma_cached = select_sigma_cv(
                trn0.X, trn0.labels, folds=folds, downstream=cv_downstream,
                seed=split_seed,
            )
        elif sigma_x != "median":
            raise ContractViolation(
                f'sigma_x must be a number, "median", or "cv", got {sigma_x!r}'
            )

    def one_repeat(r):
        split_seed, seed_x, seed_y = _derived_seeds(seed, r)
        tr, te = split_dataset(ds, train_fraction, split_seed)
        trn, ten, _ = normalize01(tr, te)
        sigma = sigma_cached
        if needs_sigma and sigma is None:
            sigma = median_sigma(trn.X)
        rows = []
        for method in methods:
            for k in ks:
                try:
                    res = _fit_one(method, k, trn, ten, sigma, sigma_y, kx,
                                   psi_backend, seed_x, seed_y)
                except NumericalError as ex:
                    res = f"numerical: {ex}"
                if isinstance(res, str):
                    rows.append(BenchRow(
                        method=method, k=k, repeat=r, seed=split_seed,
                        accuracy=None, fit_ns=0, kernel_ns=0, solve_ns=0,
                        transform_ns=0, skipped=True, note=res,
                    ))
                else:
                    acc, kern_ns, solve_ns, tra_ns = res
                    rows.append(BenchRow(
                        method=method, k=k, repeat=r, seed=split_seed,
                        accuracy=acc, fit_ns=kern_ns + solve_ns,
                        kernel_ns=kern_ns, solve_ns=solve_ns,
                        transform_ns=tra_ns, contended=bool(parallel),
                    ))
        return rows

    if parallel:
        with ThreadPoolExecutor() as pool:
            per_repeat = list(pool.map(one_repeat, range(repeats)))
    else:
        per_repeat = [one_repeat(r) for r in range(repeats)]
    rows = [row for chunk in per_repeat for row in chunk]
    config = {
        "methods": methods, "ks": ks, "repeats": repeats, "seed": int(seed),
        "train_fraction": train_fraction,
        "sigma_x": sigma_x if isinstance(sigma_x, str) else float(sigma_x),
        "sigma_x_resolved": sigma_cached, "sigma_y": sigma_y, "kx": kx,
        "psi_backend": psi_backend, "parallel": bool(parallel),
        "dataset": {k: str(v) for k, v in ds.provenance.items()},
        "n": ds.n, "d": ds.d,
    }
    return BenchReport(rows=rows, config=config)
