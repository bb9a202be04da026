"""End-to-end acceptance criteria, one check per criterion.

Each check returns ``(passed, detail)``.  Run with ``pytest tests/test_acceptance.py``
(the summary lines are printed at the end of the session) or directly with
``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from naqm import instances
from naqm import scalars as sc
from naqm.algebra import multiply
from naqm.dynamics import (Hamiltonian, KraussFamily, heisenberg_evolve, heisenberg_rhs,
                           krauss_map, lindblad_rhs, schrodinger_evolve, unitary)
from naqm.eigen import eigenstate_check, operator_eigen
from naqm.enveloping import (compose, identity_op, left_op, multiplication_algebra, prime_op,
                             right_op, star_op)
from naqm.gns import purity, tracial_gns
from naqm.states import (TraceFunctional, bracketing_classes, check_positivity,
                         check_trace_axioms, check_uncertainty_relation, random_word_op,
                         tracial_state, uncertainty, vector_state)

RESULTS: dict[int, tuple[bool, str]] = {}
SEED = 1234


def _octonion_pair(O):
    A = left_op(O.basis(7)) * sc.I
    B = compose(compose(left_op(O.basis(1)), left_op(O.basis(2))), left_op(O.basis(4)))
    return A, B


def criterion_1():
    details, ok = [], True
    for name, A, dim in (("J2", instances.jordan_matrix_algebra(2), 16),
                         ("J3", instances.jordan_matrix_algebra(3), 81),
                         ("O", instances.octonion_algebra(), 64)):
        start = time.perf_counter()
        sub = multiplication_algebra(A)
        dt = time.perf_counter() - start
        good = sub.closed and sub.dim == dim and dt < 5.0 and sub.basis[0].exact
        ok &= good
        details.append(f"{name}={sub.dim} ({dt:.2f}s)")
    return ok, ", ".join(details)


def criterion_2():
    O = instances.octonion_algebra()
    A, B = _octonion_pair(O)
    val = complex(tracial_state(TraceFunctional.of(O))(A @ B - B @ A))
    return abs(val - 2j) <= 1e-12, f"omega([A,B]) = {val}"


def criterion_3():
    O = instances.octonion_algebra()
    A, B = _octonion_pair(O)
    rel = check_uncertainty_relation(tracial_state(TraceFunctional.of(O)), A, B)
    ok = (abs(rel.delta_1 - 1) <= 1e-10 and abs(rel.delta_2 - 1) <= 1e-10
          and abs(rel.slack) <= 1e-10)
    return ok, f"dA={rel.delta_1}, dB={rel.delta_2}, slack={rel.slack}"


def criterion_4():
    P = instances.pauli_jordan()
    hbar, varpi = 0.7, 2.3
    A0, phi, b, c = 0.5, 0.4, 0.3 - 0.2j, 0.1j
    H = Hamiltonian(left_op(P.basis(3)) * (hbar * varpi), hbar)

    def exact(t):
        return np.array([A0 * math.cos(varpi * t + phi), b, c,
                         -1j * A0 * math.sin(varpi * t + phi)])

    psi0 = P.to_float().element(exact(0.0))
    worst = 0.0
    for t in np.linspace(0, 10 / varpi, 101):
        got = sc.as_complex(schrodinger_evolve(H, psi0, t).coeffs)
        worst = max(worst, float(np.max(np.abs(got - exact(t)))))
    z = left_op(P.basis(3))
    rhs = heisenberg_rhs(Hamiltonian(z), z)
    conserved = rhs.exact and sc.is_zero(rhs.matrix)
    return worst <= 1e-9 and conserved, f"max error {worst:.2e}, [H,z] exact zero: {conserved}"


def criterion_5():
    P = instances.pauli_jordan()
    hbar, varpi = 1.1, 0.9
    H = instances.bonafide_hamiltonian(P.basis(2), P.basis(3), hbar * varpi)
    err = float(np.max(np.abs(sc.as_complex(H.matrix)
                              - hbar * varpi * sc.as_complex(left_op(P.basis(3)).matrix))))
    M = instances.associative_matrix_algebra(2)
    y, z = M.basis(1) + M.basis(2), M.basis(0) - M.basis(3)
    zero = sc.is_zero(instances.bonafide_hamiltonian(y, z).matrix)
    return err <= 1e-12 and zero, f"deviation {err:.2e}, associative control zero: {zero}"


def criterion_6():
    traces_ok = all(check_trace_axioms(TraceFunctional.of(A)).passed
                    for A in (instances.octonion_algebra(), instances.jordan_matrix_algebra(2)))
    Of = instances.octonion_algebra(exact=False)
    tau = TraceFunctional.of(Of)
    rng = np.random.default_rng(SEED)
    worst = 0
    for _ in range(1000):
        els = [Of.element(rng.normal(size=8) + 1j * rng.normal(size=8)) for _ in range(4)]
        worst = max(worst, bracketing_classes(tau, els).count)
    return traces_ok and worst <= 2, f"trace axioms: {traces_ok}, max classes {worst}"


def criterion_7():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for A in (instances.octonion_algebra(), instances.jordan_matrix_algebra(2)):
        fa = A.to_float()
        _, pi = tracial_gns(TraceFunctional.of(A))
        for _ in range(100):
            X, Y = random_word_op(fa, rng), random_word_op(fa, rng)
            worst = max(worst, float(np.max(np.abs(pi(compose(X, Y)) - pi(X) @ pi(Y)))),
                        float(np.max(np.abs(pi(star_op(X)) - pi(X).conj().T))))
    O = instances.octonion_algebra()
    rep = purity(tracial_state(TraceFunctional.of(O)), multiplication_algebra(O))
    return worst <= 1e-10 and rep.pure, f"max deviation {worst:.2e}, commutant dim {rep.commutant_dim}"


def criterion_8():
    rng = np.random.default_rng(SEED)
    P, O, J = (instances.pauli_jordan(), instances.octonion_algebra(),
               instances.jordan_matrix_algebra(2))
    a = J.to_float().element(rng.normal(size=4) + 1j * rng.normal(size=4))
    cases = [(P, left_op(P.basis(3))), (P, left_op(P.basis(1))),
             (O, left_op(O.basis(7)) * sc.I), (J, left_op((a + a.star()) * 0.5))]
    count, ok, worst = 0, True, 0.0
    for A, X in cases:
        basis = multiplication_algebra(A)
        for pair in operator_eigen(X):
            omega = vector_state(pair.vector)
            rep = eigenstate_check(omega, X, op_basis=basis, tol=1e-8)
            du = uncertainty(omega, X.to_float())
            ok &= rep.passed and rep.real_value and du <= 1e-8
            worst = max(worst, rep.max_residual, du)
            count += 1
    return ok, f"{count} eigenvectors, worst residual/uncertainty {worst:.2e}"


def criterion_9():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for A in (instances.octonion_algebra(exact=False),
              instances.jordan_matrix_algebra(2, exact=False)):
        for _ in range(10):
            X = random_word_op(A, rng, terms=2, max_length=2)
            H = Hamiltonian(X + star_op(X))
            Y = random_word_op(A, rng)
            Obs = Y + star_op(Y)
            w0 = vector_state(A.element(rng.normal(size=A.dim) + 1j * rng.normal(size=A.dim)),
                              normalize=True)
            t = float(rng.uniform(0, 2))
            s = complex(vector_state(schrodinger_evolve(H, w0.vectors[0], t))(Obs))
            h = complex(w0(heisenberg_evolve(H, Obs, t)))
            worst = max(worst, abs(s - h))
    Of = instances.octonion_algebra(exact=False)
    U1 = unitary(Hamiltonian(left_op(Of.basis(1)) * sc.I), 0.5)
    U2 = unitary(Hamiltonian(left_op(Of.basis(2)) * sc.I + left_op(Of.basis(3)) * sc.I), 1.5)
    F = KraussFamily([U1 * math.sqrt(0.3), U2 * math.sqrt(0.7)])
    cp = check_positivity(krauss_map(F, tracial_state(TraceFunctional.of(Of))),
                          samples=100, seed=SEED).passed
    O = instances.octonion_algebra()
    lind = lindblad_rhs(None, [left_op(O.basis(1)), right_op(O.basis(5))], identity_op(O))
    lind_ok = lind.exact and sc.is_zero(lind.matrix)
    ok = worst <= 1e-8 and F.normalization_residual() <= 1e-10 and cp and lind_ok
    return ok, f"H/S gap {worst:.2e}, CP sampling {cp}, Lindblad(1) exact zero {lind_ok}"


def criterion_10():
    M = instances.associative_matrix_algebra(2)
    ok = True
    for i in range(4):
        for j in range(4):
            a, b = M.basis(i), M.basis(j)
            ok &= compose(left_op(a), left_op(b)).isclose(left_op(multiply(a, b)), 0)
            ok &= sc.is_zero((compose(left_op(a), right_op(b))
                              - compose(right_op(b), left_op(a))).matrix)
    comm_ok = True
    for A in (instances.pauli_jordan(), instances.jordan_matrix_algebra(2)):
        for i in range(A.dim):
            op = left_op(A.basis(i))
            comm_ok &= op.exact and sc.is_zero(prime_op(op).matrix - op.matrix)
    return ok and comm_ok, f"associative collapse {ok}, commutative collapse {comm_ok}"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    passed, detail = CRITERIA[number]()
    RESULTS[number] = (passed, detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, detail


def summary_lines() -> list[str]:
    return [f"criterion {k}: {'PASS' if ok else 'FAIL'} ({d})"
            for k, (ok, d) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for k, fn in CRITERIA.items():
        RESULTS[k] = fn()
    print("\n".join(summary_lines()))
