import pytest

from srp import linalg


@pytest.fixture(scope="session", autouse=True)
def _warm_numba():
    # compile (or load from cache) every jitted kernel once, so individual
    # tests measure math, not compilation
    linalg.warmup()
