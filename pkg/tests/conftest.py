"""Shared fixtures, tolerances and independent oracles."""

import numpy as np
import pytest

from naqm import instances
from naqm import scalars as sc

TOL = 1e-10
TIGHT = 1e-12
LOOSE = 1e-8


@pytest.fixture(autouse=True)
def _clear_tol_env(monkeypatch):
    monkeypatch.delenv("NAQM_TOL", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture(scope="session")
def octo():
    return instances.octonion_algebra()


@pytest.fixture(scope="session")
def octo_f():
    return instances.octonion_algebra(exact=False)


@pytest.fixture(scope="session")
def jordan2():
    return instances.jordan_matrix_algebra(2)


@pytest.fixture(scope="session")
def pauli():
    return instances.pauli_jordan()


def cplx(x):
    """Complex ndarray of anything the package returns."""
    return sc.as_complex(np.asarray(x))


def rand_element(A, rng, real=False):
    fa = A.to_float()
    v = rng.normal(size=fa.dim)
    if not real:
        v = v + 1j * rng.normal(size=fa.dim)
    return fa.element(v)


def rand_observable(A, rng):
    a = rand_element(A, rng)
    return (a + a.star()) * 0.5


def jordan_oracle_product(a, b):
    """Symmetrized product of two matrices, computed with plain numpy."""
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    return 0.5 * (a @ b + b @ a)


def octonion_norm_sq(v):
    return float(np.sum(np.abs(np.asarray(v)) ** 2))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
