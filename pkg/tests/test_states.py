import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from naqm import instances
from naqm import scalars as sc
from naqm.algebra import algebra_from_dict, multiply
from naqm.enveloping import (compose, identity_op, left_op, multiplication_algebra, right_op,
                             star_op)
from naqm.errors import (InvalidInputError, NormalizationError, ObservableViolationError)
from naqm.states import (TraceFunctional, bracketing_classes, bracketings, catalan,
                         check_positivity, check_trace_axioms, check_uncertainty_relation,
                         density_element, mixed_state, random_word_op, raw_state,
                         shannon_entropy, state_from_dict, tracial_state, uncertainty,
                         vector_state)

from conftest import TOL, TIGHT, cplx, rand_element


@pytest.mark.parametrize("factory", [instances.octonion_algebra,
                                     lambda: instances.jordan_matrix_algebra(2),
                                     lambda: instances.jordan_matrix_algebra(3),
                                     instances.pauli_jordan])
def test_canonical_traces_pass_exactly(factory):
    report = check_trace_axioms(TraceFunctional.of(factory()))
    assert report.passed
    assert all(c.residual == 0 for c in report.checks)


def test_non_cyclic_trace_is_flagged(octo):
    # an e1 component in the covector breaks the axioms
    t = sc.exact_array([1, 1, 0, 0, 0, 0, 0, 0])
    report = check_trace_axioms(TraceFunctional(octo, t))
    assert not report.passed


def test_tracial_state_values(octo):
    w = tracial_state(TraceFunctional.of(octo))
    assert w(identity_op(octo)) == 1
    assert w(left_op(octo.basis(3))) == 0
    # omega(X) = tau(X 1)
    X = compose(left_op(octo.basis(1)), right_op(octo.basis(1)))
    assert w(X) == -1


def test_octonion_commutator_trace_exact(octo):
    w = tracial_state(TraceFunctional.of(octo))
    A = left_op(octo.basis(7)) * sc.I
    B = compose(compose(left_op(octo.basis(1)), left_op(octo.basis(2))), left_op(octo.basis(4)))
    assert w(A @ B - B @ A) == 2 * sc.I


def test_vector_state_requires_normalization(octo):
    with pytest.raises(NormalizationError):
        vector_state(octo.basis(1) * 2)
    w = vector_state(octo.basis(1) * 2, normalize=True)
    assert complex(w(identity_op(octo))) == pytest.approx(1)


def test_vector_state_of_unit_is_tracial(octo):
    tau = TraceFunctional.of(octo)
    X = compose(left_op(octo.basis(2)), right_op(octo.basis(5)))
    assert vector_state(octo.one(), tau)(X) == tracial_state(tau)(X)


def test_mixed_state_is_convex(jordan2):
    half = sc.ONE / 2
    r2 = math.sqrt(2)
    fa = jordan2.to_float()
    p, q = fa.basis(0) * r2, fa.basis(3) * r2
    w = mixed_state([0.5, 0.5], [p, q])
    X = left_op(fa.basis(0))
    expect = 0.5 * vector_state(p)(X) + 0.5 * vector_state(q)(X)
    assert complex(w(X)) == pytest.approx(complex(expect))
    with pytest.raises(InvalidInputError):
        mixed_state([half, half, half], [p, q, p])


def test_state_from_dict(octo):
    w = state_from_dict(octo, {"kind": "vector", "psi": [0, 1, 0, 0, 0, 0, 0, 0]})
    assert w.kind == "vector"
    with pytest.raises(InvalidInputError):
        state_from_dict(octo, {"kind": "thermal"})


def test_raw_state_normalization(octo):
    with pytest.raises(NormalizationError):
        raw_state(octo, np.zeros((8, 8)))


def test_density_element_hermitian(octo_f, rng):
    psi = rand_element(octo_f, rng)
    rho = density_element(psi, normalize=True).rho
    assert rho.isclose(rho.star())


def test_positivity_sampling_and_certificate(octo, jordan2):
    w = tracial_state(TraceFunctional.of(octo))
    assert check_positivity(w, samples=50).passed
    cert = check_positivity(w, multiplication_algebra(octo))
    assert cert.passed and cert.certified
    wj = tracial_state(TraceFunctional.of(jordan2))
    assert check_positivity(wj, multiplication_algebra(jordan2)).passed


def test_cauchy_schwarz_on_random_words(octo_f, rng):
    w = tracial_state(TraceFunctional.of(octo_f))
    for _ in range(20):
        X, Y = random_word_op(octo_f, rng), random_word_op(octo_f, rng)
        lhs = abs(complex(w(compose(star_op(X), Y)))) ** 2
        rhs = (complex(w(compose(star_op(X), X))).real
               * complex(w(compose(star_op(Y), Y))).real)
        assert lhs <= rhs * (1 + 1e-9) + 1e-9


def test_octonion_minimum_uncertainty(octo):
    w = tracial_state(TraceFunctional.of(octo))
    A = left_op(octo.basis(7)) * sc.I
    B = compose(compose(left_op(octo.basis(1)), left_op(octo.basis(2))), left_op(octo.basis(4)))
    rel = check_uncertainty_relation(w, A, B)
    assert rel.delta_1 == pytest.approx(1, abs=TOL)
    assert rel.delta_2 == pytest.approx(1, abs=TOL)
    assert abs(rel.slack) <= TOL
    assert rel.commutator_mean == pytest.approx(2j, abs=TIGHT)


def test_uncertainty_relation_holds_randomly(pauli, rng):
    fa = pauli.to_float()
    psi = rand_element(fa, rng)
    w = vector_state(psi, normalize=True)
    for _ in range(10):
        a, b = rand_element(fa, rng, real=True), rand_element(fa, rng, real=True)
        rel = check_uncertainty_relation(w, left_op(a), left_op(b))
        assert rel.passed


def test_uncertainty_rejects_non_observables(octo):
    w = tracial_state(TraceFunctional.of(octo))
    with pytest.raises(ObservableViolationError):
        uncertainty(w, left_op(octo.basis(1)))


def test_shannon_entropy():
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(math.log(2))
    assert shannon_entropy([1, 0]) == 0
    with pytest.raises(InvalidInputError):
        shannon_entropy([0.7, 0.7])


@pytest.mark.parametrize("n", range(2, 7))
def test_bracketing_count_is_catalan(n):
    assert len(bracketings(0, n)) == catalan(n - 1)


def test_octonion_four_factor_bracketings_split_in_two(octo):
    # frozen oracle: exact classes for a generic exact quadruple
    els = [octo.basis(1), octo.basis(2), octo.basis(4),
           octo.element(sc.exact_array([1, 0, 0, 1, 0, 0, 0, 1]))]
    res = bracketing_classes(TraceFunctional.of(octo), els)
    assert res.count <= 2 and res.class_count_bound == 2


def test_five_factor_bound(octo_f, rng):
    els = [rand_element(octo_f, rng) for _ in range(5)]
    res = bracketing_classes(TraceFunctional.of(octo_f), els)
    assert res.count <= catalan(3)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=8, max_size=8),
       st.lists(st.integers(-2, 2), min_size=8, max_size=8),
       st.lists(st.integers(-2, 2), min_size=8, max_size=8))
def test_octonion_trace_is_cyclic_on_triples(u, v, x):
    O = instances.octonion_algebra()
    tau = TraceFunctional.of(O)
    a, b, c = (O.element(sc.exact_array(w)) for w in (u, v, x))
    assert tau(multiply(a, multiply(b, c))) == tau(multiply(c, multiply(a, b)))
    assert tau(multiply(multiply(a, b), c)) == tau(multiply(a, multiply(b, c)))


def test_uncertainty_agrees_with_direct_variance(octo_f, rng):
    from naqm.states import variance
    w = vector_state(rand_element(octo_f, rng), normalize=True)
    X = random_word_op(octo_f, rng)
    O = X + star_op(X)
    direct = complex(variance(w, O)).real
    assert uncertainty(w, O) == pytest.approx(math.sqrt(direct), rel=1e-9)
