"""Synthetic generators, CSV ingestion, [0,1] normalization, stratified splits."""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractViolation, DataError, ParseError


@dataclass
class LabeledDataset:
    X: np.ndarray                    # d x n, samples as columns
    labels: np.ndarray               # length n, class identifiers
    feature_names: list | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.labels = np.asarray(self.labels)
        if self.X.ndim != 2:
            raise ContractViolation("X must be 2-dimensional")
        if self.labels.shape[0] != self.X.shape[1]:
            raise ContractViolation(
                f"{self.labels.shape[0]} labels for {self.X.shape[1]} columns"
            )
        if self.labels.shape[0] and np.unique(self.labels).size < 1:
            raise ContractViolation("need at least one class")

    @property
    def n(self):
        return self.X.shape[1]

    @property
    def d(self):
        return self.X.shape[0]

    def label_codes(self):
        """Labels as a 1 x n float matrix of integer class codes (sorted order)."""
        classes = np.unique(self.labels)
        return np.searchsorted(classes, self.labels).astype(np.float64)[None, :]

    def subset(self, idx):
        return LabeledDataset(
            X=self.X[:, idx], labels=self.labels[idx],
            feature_names=self.feature_names,
            provenance=dict(self.provenance, subset=len(idx)),
        )


def gen_xor(n=500, noise_dims=8, seed=0):
    """Two classes in four Gaussian clusters at (+-1, +-1), opposite corners
    sharing a class (the XOR pattern), plus uniform noise dimensions.

    Cluster std 0.25; noise ~ Uniform[0, 1] per appended dimension. Defaults
    give 500 samples in 10 dimensions, 125 per cluster.
    """
    n = int(n)
    if n < 4:
        raise ContractViolation("need n >= 4")
    rng = np.random.default_rng(seed)
    centers = [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)]
    cls = [0, 0, 1, 1]
    counts = [n // 4] * 4
    for i in range(n % 4):
        counts[i] += 1
    sig = np.empty((2, n))
    labels = np.empty(n, dtype=np.int64)
    pos = 0
    for (cx, cy), c, m in zip(centers, cls, counts):
        sig[0, pos:pos + m] = cx + 0.25 * rng.standard_normal(m)
        sig[1, pos:pos + m] = cy + 0.25 * rng.standard_normal(m)
        labels[pos:pos + m] = c
        pos += m
    X = sig if noise_dims == 0 else np.vstack([sig, rng.random((int(noise_dims), n))])
    return LabeledDataset(X=X, labels=labels, provenance={
        "generator": "xor", "n": n, "noise_dims": int(noise_dims), "seed": seed,
    })


def gen_spirals(n=500, noise_dims=8, seed=0, jitter=0.05):
    """Two interleaved Archimedean spiral arms, one class per arm.

    Angles run over [pi/2, 1.5pi] with radius theta/(1.5pi) (max radius 1),
    the second arm is the first reflected through the origin, and Gaussian
    jitter of std `jitter` (default 0.05 = 5% of the max radius) is added to
    the two signal dimensions. Noise dimensions are centered Gaussian with
    std 0.25 (the same dispersion as gen_xor's clusters). The inner starting
    angle keeps the arms' endpoints a winding gap apart instead of meeting
    at the origin; the half-turn span keeps the arm gap wide enough that an
    RBF kernel separates the classes at the default noise level.
    """
    n = int(n)
    if n < 2:
        raise ContractViolation("need n >= 2")
    rng = np.random.default_rng(seed)
    m0 = (n + 1) // 2
    m1 = n - m0
    sig = np.empty((2, n))
    labels = np.empty(n, dtype=np.int64)
    tmax = 1.5 * np.pi
    for arm, (m, lo) in enumerate(((m0, 0), (m1, m0))):
        theta = np.linspace(np.pi / 2, tmax, m)
        r = theta / tmax
        x = r * np.cos(theta)
        y = r * np.sin(theta)
        if arm == 1:
            x, y = -x, -y
        sig[0, lo:lo + m] = x
        sig[1, lo:lo + m] = y
        labels[lo:lo + m] = arm
    if jitter:
        sig = sig + jitter * rng.standard_normal(sig.shape)
    X = sig if noise_dims == 0 else np.vstack(
        [sig, 0.25 * rng.standard_normal((int(noise_dims), n))])
    return LabeledDataset(X=X, labels=labels, provenance={
        "generator": "spirals", "n": n, "noise_dims": int(noise_dims),
        "seed": seed, "jitter": jitter,
    })


def _is_number(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False


def load_csv(path, label_column):
    """Read a labeled dataset from CSV (samples as rows, features as columns).

    `label_column` selects the label field by 0-based index or by header
    name. A header is auto-detected: if any feature cell in the first row
    fails to parse as a number, the row is treated as column names. Feature
    cells must be numeric; labels are kept as strings.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh)]
    except OSError as ex:
        raise DataError(f"cannot read {path}: {ex}") from ex
    rows = [[cell.strip() for cell in row] for row in rows if row]
    if not rows:
        raise DataError(f"{path} is empty")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(
                f"ragged row: expected {width} fields, got {len(row)}", row=i + 1
            )

    names = None
    if isinstance(label_column, str):
        if rows[0].count(label_column) != 1:
            raise DataError(
                f"label column {label_column!r} not found in header {rows[0]}"
            )
        label_idx = rows[0].index(label_column)
        names = rows[0]
        body = rows[1:]
    else:
        label_idx = int(label_column)
        if not 0 <= label_idx < width:
            raise DataError(
                f"label column index {label_idx} out of range for {width} fields"
            )
        header = any(
            not _is_number(cell)
            for j, cell in enumerate(rows[0]) if j != label_idx
        )
        if header:
            names = rows[0]
            body = rows[1:]
        else:
            body = rows
    if not body:
        raise DataError(f"{path} has a header but no data rows")

    feat_idx = [j for j in range(width) if j != label_idx]
    X = np.empty((len(feat_idx), len(body)))
    labels = []
    for i, row in enumerate(body):
        rowno = i + 1 + (1 if names is not None else 0)
        for r, j in enumerate(feat_idx):
            try:
                X[r, i] = float(row[j])
            except ValueError:
                raise ParseError(
                    f"non-numeric feature cell {row[j]!r}",
                    row=rowno, column=j + 1,
                ) from None
        labels.append(row[label_idx])
    feature_names = [names[j] for j in feat_idx] if names is not None else None
    return LabeledDataset(
        X=X, labels=np.asarray(labels), feature_names=feature_names,
        provenance={"path": str(path), "label_column": label_column},
    )


@dataclass(frozen=True)
class Scaler:
    """Per-feature affine map to [0, 1] learned on a training set."""

    mins: np.ndarray
    ranges: np.ndarray   # zero entries mark constant training features

    def apply(self, X, clamp=True):
        X = np.asarray(X, dtype=np.float64)
        safe = np.where(self.ranges > 0.0, self.ranges, 1.0)
        out = (X - self.mins[:, None]) / safe[:, None]
        out[self.ranges == 0.0, :] = 0.5
        if clamp:
            np.clip(out, 0.0, 1.0, out=out)
        return out


def normalize01(train, test):
    """Map each feature to [0, 1] using the training min/max.

    Constant training features become 0.5 everywhere; test values outside
    the training range are clamped. Returns (train', test', scaler).
    """
    if train.n < 1:
        raise ContractViolation("training set is empty")
    mins = train.X.min(axis=1)
    maxs = train.X.max(axis=1)
    scaler = Scaler(mins=mins, ranges=maxs - mins)
    tr = LabeledDataset(
        X=scaler.apply(train.X, clamp=False), labels=train.labels,
        feature_names=train.feature_names,
        provenance=dict(train.provenance, normalized="train-minmax"),
    )
    te = LabeledDataset(
        X=scaler.apply(test.X, clamp=True), labels=test.labels,
        feature_names=test.feature_names,
        provenance=dict(test.provenance, normalized="train-minmax"),
    )
    return tr, te, scaler


def split(ds, train_fraction, seed):
    """Seeded stratified train/test split.

    Each class is shuffled and divided as close to `train_fraction` as
    half-up rounding allows; a single-sample class goes entirely to train
    (with a warning).
    """
    f = float(train_fraction)
    if not 0.0 < f < 1.0:
        raise ContractViolation(f"train_fraction must be in (0, 1), got {f}")
    if ds.n < 2:
        raise ContractViolation("need at least 2 samples to split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(ds.n)
    train_idx, test_idx = [], []
    for c in np.unique(ds.labels):
        members = perm[np.isin(ds.labels[perm], [c])]
        m = members.size
        if m == 1:
            warnings.warn(
                f"class {c!r} has a single sample; assigning it to train",
                stacklevel=2,
            )
            train_idx.extend(members.tolist())
            continue
        n_tr = int(np.floor(f * m + 0.5))
        train_idx.extend(members[:n_tr].tolist())
        test_idx.extend(members[n_tr:].tolist())
    train_idx = sorted(train_idx)
    test_idx = sorted(test_idx)
    prov = dict(ds.provenance, split_seed=seed, train_fraction=f)
    tr = ds.subset(np.asarray(train_idx, dtype=np.int64))
    te = ds.subset(np.asarray(test_idx, dtype=np.int64))
    tr.provenance = dict(prov, part="train")
    te.provenance = dict(prov, part="test")
    return tr, te
