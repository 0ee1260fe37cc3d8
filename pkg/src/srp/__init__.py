"""Supervised dimensionality reduction via HSIC: SPCA/KSPCA and their
randomized counterparts SRP/KSRP, with kernels, random Fourier features,
datasets, and a benchmark harness."""

from .datasets import (LabeledDataset, Scaler, gen_spirals, gen_xor, load_csv,
                       normalize01, split)
from .embeddings import (KernelModel, LinearModel, claim1_check, fit_kspca,
                         fit_spca, fit_srp, fit_ksrp, transform)
from .evaluate import BenchReport, BenchRow, one_nn_accuracy, run_benchmark
from .exceptions import (ContractViolation, DataError, NumericalError,
                         ParseError)
from .hsic import hsic_empirical
from .kernels import (KernelSpec, gram, median_sigma, select_sigma_cv,
                      sigma_grid)
from .linalg import (EigPair, center_columns, cholesky_lower, double_center,
                     psd_factor, solve_transpose_lower, sym_eig_topk)
from .rff import FeatureMap, apply_map, sample_map

__version__ = "0.1.0"

__all__ = [
    "BenchReport", "BenchRow", "ContractViolation", "DataError", "EigPair",
    "FeatureMap", "KernelModel", "KernelSpec", "LabeledDataset",
    "LinearModel", "NumericalError", "ParseError", "Scaler", "apply_map",
    "center_columns", "cholesky_lower", "claim1_check", "double_center",
    "fit_kspca", "fit_spca", "fit_srp", "fit_ksrp", "gen_spirals", "gen_xor",
    "gram", "hsic_empirical", "load_csv", "median_sigma", "normalize01",
    "one_nn_accuracy", "psd_factor", "run_benchmark", "sample_map",
    "select_sigma_cv", "sigma_grid", "solve_transpose_lower", "split",
    "sym_eig_topk", "transform", "__version__",
]
