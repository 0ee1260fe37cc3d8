"""File emission helpers: atomic writes and the CSV layouts the CLI produces."""

import csv
import io
import os
import tempfile

import numpy as np


def atomic_write_text(path, text):
    """Write text to path via a temp file + rename; no partial files on failure."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def embedding_csv_text(Z, labels):
    """k feature rows, then one label row; columns are samples."""
    Z = np.atleast_2d(np.asarray(Z))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in range(Z.shape[0]):
        w.writerow([repr(float(v)) for v in Z[r]])
    w.writerow([str(l) for l in labels])
    return buf.getvalue()


def dataset_csv_text(ds):
    """Samples as rows: feature columns then a final `label` column."""
    names = ds.feature_names or [f"f{i}" for i in range(ds.d)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(names) + ["label"])
    for j in range(ds.n):
        w.writerow([repr(float(v)) for v in ds.X[:, j]] + [str(ds.labels[j])])
    return buf.getvalue()
