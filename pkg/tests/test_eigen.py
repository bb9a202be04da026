import math

import numpy as np
import pytest

from naqm import instances
from naqm import scalars as sc
from naqm.enveloping import as_op, compose, left_op, multiplication_algebra, right_op
from naqm.eigen import eigenstate_check, jordan_spectral_eigen, operator_eigen
from naqm.errors import (InvalidInputError, NoEigenvectorError, NormalizationError,
                         ObservableViolationError)
from naqm.algebra import multiply
from naqm.states import TraceFunctional, uncertainty, vector_state

from conftest import LOOSE, cplx, rand_observable


def test_pauli_z_spectrum(pauli):
    vals = [p.value for p in operator_eigen(left_op(pauli.basis(3)))]
    assert np.allclose(vals, [1, 0, 0, -1], atol=1e-12)


def test_octonion_unit_spectrum(octo):
    vals = [p.value for p in operator_eigen(left_op(octo.basis(7)))]
    assert np.allclose(vals, [1j] * 4 + [-1j] * 4, atol=1e-12)


def test_eigenvectors_are_trace_normalized(octo):
    tau = TraceFunctional.of(octo).to_float()
    for p in operator_eigen(left_op(octo.basis(7)) * sc.I):
        assert tau.norm_sq(p.vector) == pytest.approx(1)
        assert p.residual < LOOSE


def test_defective_operator_reports_generalized_vectors(jordan2):
    # a nilpotent Jordan block: one true eigenvector, one generalized one
    N = np.zeros((4, 4))
    N[0, 1] = 1.0
    pairs = operator_eigen(as_op(jordan2.to_float(), N))
    assert sum(p.generalized for p in pairs) == 1


@pytest.mark.parametrize("case", ["pauli_z", "pauli_x", "octonion", "jordan_random"])
def test_every_eigenvector_is_an_eigenstate(case, rng):
    if case.startswith("pauli"):
        A = instances.pauli_jordan()
        X = left_op(A.basis(3 if case == "pauli_z" else 1))
    elif case == "octonion":
        A = instances.octonion_algebra()
        X = left_op(A.basis(7)) * sc.I
    else:
        A = instances.jordan_matrix_algebra(2)
        X = left_op(rand_observable(A, rng))
    basis = multiplication_algebra(A)
    for p in operator_eigen(X):
        omega = vector_state(p.vector)
        rep = eigenstate_check(omega, X, op_basis=basis)
        assert rep.passed and rep.real_value
        assert abs(rep.value - p.value) < LOOSE
        assert uncertainty(omega, X.to_float()) <= LOOSE


def test_non_eigenvector_fails_check(pauli):
    X = left_op(pauli.basis(3))
    psi = (pauli.basis(0) + pauli.basis(1)).to_float() / math.sqrt(2)
    rep = eigenstate_check(vector_state(psi), X, op_basis=multiplication_algebra(pauli))
    assert not rep.passed


def test_eigenstate_check_needs_basis(pauli):
    with pytest.raises(InvalidInputError):
        eigenstate_check(vector_state(pauli.one()), left_op(pauli.basis(3)))


def test_jordan_spectral_eigen(jordan2):
    a = jordan2.element(sc.exact_array([1, 0, 0, -1]))
    phi = jordan_spectral_eigen(a, 1.0, [2])
    assert np.allclose(cplx(phi.coeffs), [math.sqrt(2), 0, 0, 0])
    assert multiply(a.to_float(), phi).isclose(phi)


def test_jordan_spectral_eigen_errors(jordan2):
    a = jordan2.element(sc.exact_array([1, 0, 0, -1]))
    with pytest.raises(NoEigenvectorError):
        jordan_spectral_eigen(a, 3.0, [2])
    with pytest.raises(NormalizationError):
        jordan_spectral_eigen(a, 1.0, [1])
    with pytest.raises(InvalidInputError):
        jordan_spectral_eigen(a, 1.0, [1, 1])
    with pytest.raises(ObservableViolationError):
        jordan_spectral_eigen(jordan2.basis(1), 0.0, [2])


def test_jordan_degenerate_eigenspace():
    J = instances.jordan_matrix_algebra(3)
    a = J.element(sc.exact_array([1, 0, 0, 0, 1, 0, 0, 0, -1]))
    phi = jordan_spectral_eigen(a, 1.0, [1.5, 1.5])
    assert multiply(a.to_float(), phi).isclose(phi)
