import math

import numpy as np
import pytest

from naqm import instances
from naqm import scalars as sc
from naqm.dynamics import (Hamiltonian, KraussFamily, dual_state, heisenberg_evolve,
                           heisenberg_rhs, krauss_density, krauss_map, lindblad_rhs,
                           schrodinger_evolve, trajectory, unitary, vector_state_family)
from naqm.enveloping import compose, identity_op, left_op, right_op, star_op
from naqm.errors import (InvalidInputError, NormalizationError, ObservableViolationError)
from naqm.states import (TraceFunctional, check_positivity, mixed_state, random_word_op,
                         tracial_state, vector_state)

from conftest import LOOSE, TOL, cplx, rand_element


def random_hamiltonian(A, rng):
    X = random_word_op(A, rng, terms=2, max_length=2)
    return Hamiltonian(X + star_op(X))


def closed_form(A0, phi, varpi, b, c, t):
    return np.array([A0 * math.cos(varpi * t + phi), b, c, -1j * A0 * math.sin(varpi * t + phi)])


def test_pauli_z_dynamics_closed_form(pauli):
    varpi, hbar = 1.7, 0.6
    A0, phi, b, c = 0.6, 0.3, 0.2 + 0.1j, -0.4j
    H = Hamiltonian(left_op(pauli.basis(3)) * (hbar * varpi), hbar)
    psi0 = pauli.to_float().element(closed_form(A0, phi, varpi, b, c, 0.0))
    for t in np.linspace(0, 10 / varpi, 41):
        got = cplx(schrodinger_evolve(H, psi0, t).coeffs)
        assert np.allclose(got, closed_form(A0, phi, varpi, b, c, t), atol=1e-9)


def test_z_is_conserved_exactly(pauli):
    z = left_op(pauli.basis(3))
    out = heisenberg_rhs(Hamiltonian(z), z)
    assert out.exact and sc.is_zero(out.matrix)


def test_unitary_is_unitary(octo_f, rng):
    U = unitary(random_hamiltonian(octo_f, rng), 0.7)
    prod = compose(star_op(U), U)
    assert np.allclose(cplx(prod.matrix), np.eye(8), atol=1e-10)


def test_heisenberg_matches_schrodinger(octo_f, jordan2, rng):
    for A in (octo_f, jordan2.to_float()):
        for _ in range(5):
            H = random_hamiltonian(A, rng)
            X = random_word_op(A, rng)
            O = X + star_op(X)
            psi = rand_element(A, rng)
            w0 = vector_state(psi, normalize=True)
            t = float(rng.uniform(0, 2))
            psit = schrodinger_evolve(H, w0.vectors[0], t)
            lhs = complex(vector_state(psit, normalize=True)(O))
            rhs = complex(w0(heisenberg_evolve(H, O, t)))
            assert abs(lhs - rhs) < LOOSE


def test_heisenberg_rhs_is_derivative(pauli, rng):
    fa = pauli.to_float()
    H = Hamiltonian(left_op(fa.basis(1)) + left_op(fa.basis(3)) * 0.5)
    O = left_op(fa.basis(2))
    h = 1e-5
    fd = (cplx(heisenberg_evolve(H, O, h).matrix) - cplx(heisenberg_evolve(H, O, -h).matrix)) / (2 * h)
    assert np.allclose(fd, cplx(heisenberg_rhs(H, O).matrix), atol=1e-8)


def test_hamiltonian_must_be_observable(octo):
    with pytest.raises(ObservableViolationError):
        Hamiltonian(left_op(octo.basis(1)))
    with pytest.raises(InvalidInputError):
        Hamiltonian(left_op(octo.one()), hbar=0)


def test_krauss_normalization_and_positivity(octo_f, rng):
    U1 = unitary(random_hamiltonian(octo_f, rng), 0.4)
    U2 = unitary(random_hamiltonian(octo_f, rng), 1.1)
    th = 0.3
    F = KraussFamily([U1 * math.cos(th), U2 * math.sin(th)])
    assert F.normalization_residual() < TOL
    w = vector_state(rand_element(octo_f, rng), normalize=True)
    out = krauss_map(F, w)
    assert complex(out(identity_op(octo_f))) == pytest.approx(1)
    assert check_positivity(out, samples=100).passed
    with pytest.raises(NormalizationError):
        KraussFamily([U1 * 0.5])


def test_vector_family_reproduces_mixture(pauli):
    fa = pauli.to_float()
    r = 1 / math.sqrt(2)
    psis = [(fa.basis(0) + fa.basis(3)) * r, (fa.basis(0) - fa.basis(1)) * r]
    probs = [0.25, 0.75]
    tau = TraceFunctional.of(fa)
    out = krauss_map(vector_state_family(psis, probs), tracial_state(tau))
    want = mixed_state(probs, psis)
    assert np.allclose(cplx(out.weight), cplx(want.weight), atol=1e-12)


def test_krauss_density(octo_f):
    F = KraussFamily([identity_op(octo_f)])
    psi = octo_f.basis(2)
    rho = krauss_density(F, psi).rho
    assert rho.isclose(octo_f.one())


def test_lindblad_annihilates_identity(octo, pauli):
    jumps = [left_op(octo.basis(1)), compose(left_op(octo.basis(2)), right_op(octo.basis(3)))]
    out = lindblad_rhs(None, jumps, identity_op(octo))
    assert out.exact and sc.is_zero(out.matrix)
    out = lindblad_rhs(Hamiltonian(left_op(pauli.basis(3))), [left_op(pauli.basis(1))],
                       identity_op(pauli))
    assert sc.is_zero(out.matrix)


def test_dual_state(octo):
    mu = dual_state(octo.one(), [octo.basis(1)])
    assert mu(octo.basis(2)) == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        dual_state(octo.one(), [])


def test_trajectory_grid(pauli):
    H = Hamiltonian(left_op(pauli.basis(3)))
    traj = trajectory(H, pauli.one(), [0, 0.5, 1.0], {"z": left_op(pauli.basis(3))})
    assert traj.states.shape == (3, 4)
    assert np.allclose(traj.states[:, 0], np.cos([0, 0.5, 1.0]))
    with pytest.raises(InvalidInputError):
        trajectory(H, pauli.one(), [1.0, 0.5])
