"""Concrete algebras: octonions, Jordan and ordinary matrix algebras, Lie unitizations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import scalars as sc
from .algebra import AlgebraSpec, Element, multiply
from .enveloping import MultOp, left_op
from .errors import InvalidInputError, ObservableViolationError, UnsupportedOperationError


# ---------------------------------------------------------------------------
# octonions

_N0 = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


@dataclass(frozen=True)
class OctonionTable:
    """Totally antisymmetric ``eta[i, j, k]`` for the imaginary units ``e1..e7``.

    ``eta`` is indexed 0..7 with row/column 0 unused so that indices match
    the basis labels.
    """

    eta: np.ndarray
    N0: tuple[tuple[int, int, int], ...]
    N_plus: frozenset
    N_minus: frozenset

    @property
    def N(self) -> frozenset:
        return self.N_plus | self.N_minus

    @classmethod
    def standard(cls) -> "OctonionTable":
        eta = np.zeros((8, 8, 8), dtype=int)
        plus, minus = set(), set()
        for i, j, k in _N0:
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                eta[a, b, c] = 1
                plus.add((a, b, c))
                eta[b, a, c] = -1
                minus.add((b, a, c))
        eta.setflags(write=False)
        return cls(eta, _N0, frozenset(plus), frozenset(minus))


@lru_cache(maxsize=None)
def _octonion(exact: bool) -> AlgebraSpec:
    table = OctonionTable.standard()
    c = sc.zeros((8, 8, 8), exact)
    one = sc.ONE if exact else 1.0
    for mu in range(8):
        c[0, mu, mu] = one
        c[mu, 0, mu] = one
    for i in range(1, 8):
        c[i, i, 0] = -one
        for j in range(1, 8):
            for k in range(1, 8):
                if table.eta[i, j, k]:
                    c[i, j, k] = one * int(table.eta[i, j, k])
    S = sc.zeros((8, 8), exact)
    S[0, 0] = one
    for i in range(1, 8):
        S[i, i] = -one
    unit = sc.zeros(8, exact)
    unit[0] = one
    trace = unit.copy()
    return AlgebraSpec(c, S, unit, 0, tuple(f"e{i}" for i in range(8)), "octonion", trace,
                       kind="octonion")


def octonion_algebra(exact: bool = True) -> AlgebraSpec:
    """The octonions on ``e0..e7`` with ``e_i e_j = -delta_ij e0 + eta_ijk e_k``.

    The star fixes ``e0`` and negates the imaginary units; the attached trace
    covector picks out the ``e0`` coefficient.
    """
    return _octonion(bool(exact))


def octonion_E(i: int, exact: bool = True) -> np.ndarray:
    """Left multiplication matrix ``E_i`` (``E_0`` is the identity)."""
    return octonion_algebra(exact).left_matrices[i]


# ---------------------------------------------------------------------------
# matrix algebras

def _matrix_units(n: int, exact: bool) -> np.ndarray:
    mb = sc.zeros((n * n, n, n), exact)
    one = sc.ONE if exact else 1.0
    for i in range(n):
        for j in range(n):
            mb[i * n + j, i, j] = one
    return mb


def _matrix_algebra(n: int, exact: bool, jordan: bool) -> AlgebraSpec:
    d = n * n
    c = sc.zeros((d, d, d), exact)
    half = sc.GaussianRational(1, 0) / 2 if exact else 0.5
    one = sc.ONE if exact else 1.0
    for i, j, k, l in itertools.product(range(n), repeat=4):
        a, b = i * n + j, k * n + l
        if jordan:
            # e_ij e_kl = 1/2 (delta_jk e_il + delta_li e_kj)
            if j == k:
                c[a, b, i * n + l] = c[a, b, i * n + l] + half
            if l == i:
                c[a, b, k * n + j] = c[a, b, k * n + j] + half
        elif j == k:
            c[a, b, i * n + l] = one
    S = sc.zeros((d, d), exact)
    unit = sc.zeros(d, exact)
    trace = sc.zeros(d, exact)
    inv_n = sc.GaussianRational(1, 0) / n if exact else 1.0 / n
    for i in range(n):
        unit[i * n + i] = one
        trace[i * n + i] = inv_n
        for j in range(n):
            S[i * n + j, j * n + i] = one
    labels = tuple(f"e{i + 1}{j + 1}" for i in range(n) for j in range(n))
    kind = "jordan" if jordan else "associative"
    label = f"{kind}_M{n}"
    return AlgebraSpec(c, S, unit, None, labels, label, trace, _matrix_units(n, exact), kind)


@lru_cache(maxsize=None)
def _jordan(n: int, exact: bool) -> AlgebraSpec:
    return _matrix_algebra(n, exact, True)


@lru_cache(maxsize=None)
def _assoc(n: int, exact: bool) -> AlgebraSpec:
    return _matrix_algebra(n, exact, False)


def jordan_matrix_algebra(n: int, exact: bool = True) -> AlgebraSpec:
    """``M_n(C)`` with the Jordan product ``a b = (a.b + b.a)/2``.

    The basis is the matrix units ``e_ij`` in row-major order; the unit is
    ``sum_i e_ii`` (not a basis element), the star is the conjugate
    transpose and the trace is ``Tr/n``.
    """
    if int(n) < 2:
        raise InvalidInputError("Jordan matrix algebra needs n >= 2")
    return _jordan(int(n), bool(exact))


def associative_matrix_algebra(n: int, exact: bool = True) -> AlgebraSpec:
    """``M_n(C)`` with the ordinary matrix product, on the same basis as the Jordan version."""
    if int(n) < 1:
        raise InvalidInputError("matrix algebra needs n >= 1")
    return _assoc(int(n), bool(exact))


PAULI = np.array([[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])


@lru_cache(maxsize=None)
def _pauli(exact: bool) -> AlgebraSpec:
    c = sc.zeros((4, 4, 4), exact)
    one = sc.ONE if exact else 1.0
    for mu in range(4):
        c[0, mu, mu] = one
        c[mu, 0, mu] = one
    for i in range(1, 4):
        c[i, i, 0] = one
    S = sc.eye(4, exact)
    unit = sc.zeros(4, exact)
    unit[0] = one
    mb = sc.exact_array(PAULI.astype(complex)) if exact else PAULI.astype(complex)
    return AlgebraSpec(c, S, unit, 0, ("1", "x", "y", "z"), "pauli_jordan", unit.copy(), mb,
                       "jordan")


def pauli_jordan(exact: bool = True) -> AlgebraSpec:
    """Jordan ``M_2(C)`` on ``{1, x, y, z} = {1, sigma_1, sigma_2, sigma_3}``.

    In this basis ``sigma_i sigma_j = delta_ij 1`` and the trace ``Tr/2`` reads off
    the ``1`` coefficient.
    """
    return _pauli(bool(exact))


def jordan_pi(a: np.ndarray) -> np.ndarray:
    """``(a (x) 1 + 1 (x) a^T)/2`` with the left factor acting on the row index."""
    a = np.asarray(a)
    n = a.shape[0]
    ident = np.eye(n)
    return 0.5 * (np.kron(a, ident) + np.kron(ident, a.T))


# ---------------------------------------------------------------------------
# Lie unitization

def lie_unitization(f, exact: bool = True, tol: float | None = None,
                    label: str = "lie") -> AlgebraSpec:
    """Unitize a Lie algebra: ``(k, a)(l, b) = (k l, l a + k b + [a, b])``.

    Args:
        f: bracket constants with ``[e_i, e_j] = sum_k f[i, j, k] e_k``.
        exact: store exact constants when ``f`` allows it.
        tol: tolerance for the antisymmetry and Jacobi checks in float mode.

    Raises:
        InvalidInputError: if ``f`` is not antisymmetric or violates Jacobi.
    """
    f = np.asarray(f)
    if f.ndim != 3 or len(set(f.shape)) != 1:
        raise InvalidInputError("bracket constants must be an m x m x m array")
    m = f.shape[0]
    F = sc.exact_array(f) if exact else sc.as_complex(f)
    if not sc.is_zero(F + np.transpose(F, (1, 0, 2)), tol):
        raise InvalidInputError("bracket constants are not antisymmetric")
    # Jacobi: sum_l f_jkl f_ilm + f_kil f_jlm + f_ijl f_klm = 0
    jac = (np.einsum("jkl,ilm->ijkm", F, F) + np.einsum("kil,jlm->ijkm", F, F)
           + np.einsum("ijl,klm->ijkm", F, F))
    if not sc.is_zero(jac, tol):
        raise InvalidInputError(f"Jacobi identity fails (residual {sc.max_abs(jac):.3g})")
    d = m + 1
    c = sc.zeros((d, d, d), exact)
    one = sc.ONE if exact else 1.0
    for mu in range(d):
        c[0, mu, mu] = one
        c[mu, 0, mu] = one
    c[0, 0, 0] = one
    c[1:, 1:, 1:] = F
    S = sc.zeros((d, d), exact)
    S[0, 0] = one
    for i in range(1, d):
        S[i, i] = -one
    unit = sc.zeros(d, exact)
    unit[0] = one
    labels = ("1",) + tuple(f"g{i + 1}" for i in range(m))
    return AlgebraSpec(c, S, unit, 0, labels, label, kind="lie")


def su2_constants() -> np.ndarray:
    """``[t_i, t_j] = eps_ijk t_k`` for the real basis of ``su(2)``."""
    f = np.zeros((3, 3, 3), dtype=int)
    for i, j, k in itertools.permutations(range(3)):
        f[i, j, k] = int(np.sign(np.linalg.det(np.eye(3)[[i, j, k]])))
    return f


# ---------------------------------------------------------------------------
# octonion matrix structure

def signed_permutation_check(X) -> bool:
    """True iff every row and column has exactly one nonzero entry, equal to +-1."""
    m = X.matrix if isinstance(X, MultOp) else np.asarray(X)
    m = sc.as_complex(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    nz = np.abs(m) > 0
    if not (np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)):
        return False
    vals = m[nz]
    return bool(np.all((vals == 1) | (vals == -1)))


@dataclass(frozen=True)
class PhaseMatrix:
    indices: tuple[int, int, int]
    matrix: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix)


def phase_matrix(i: int, j: int, k: int) -> PhaseMatrix:
    """``P_ijk = E_i E_j E_k`` for ``(i, j, k)`` in the octonion triple set.

    The diagonal is ``-eta_ijk`` at positions ``0, i, j, k`` and ``+eta_ijk``
    elsewhere, so odd orderings give the negated pattern.

    Raises:
        InvalidInputError: for triples outside the set, or if the product is
            not the expected diagonal sign pattern.
    """
    table = OctonionTable.standard()
    triple = (int(i), int(j), int(k))
    if triple not in table.N:
        raise InvalidInputError(f"{triple} is not an octonion triple")
    E = [np.real(sc.as_complex(octonion_E(a))).astype(int) for a in triple]
    P = E[0] @ E[1] @ E[2]
    # the -1 pattern at {0, i, j, k} holds for even orderings; odd ones flip sign
    expected = np.ones(8, dtype=int)
    expected[[0, *triple]] = -1
    expected *= int(table.eta[triple])
    if not np.array_equal(P, np.diag(expected)):
        raise InvalidInputError(f"E_i E_j E_k for {triple} is not the expected phase pattern")
    return PhaseMatrix(triple, P)


def clifford_gamma() -> list[np.ndarray]:
    """Sixteen-dimensional gamma matrices built from the octonion ``E_mu``.

    ``Gamma_mu = [[0, E_mu], [Ebar_mu, 0]]`` with ``Ebar_0 = E_0`` and
    ``Ebar_i = -E_i``; the relation ``Ebar_mu E_nu + Ebar_nu E_mu = 2 delta``
    is verified on construction.
    """
    E = [np.real(sc.as_complex(octonion_E(mu))).astype(int) for mu in range(8)]
    Ebar = [E[0]] + [-e for e in E[1:]]
    ident = np.eye(8, dtype=int)
    for mu in range(8):
        for nu in range(8):
            if not np.array_equal(Ebar[mu] @ E[nu] + Ebar[nu] @ E[mu], 2 * (mu == nu) * ident):
                raise AssertionError(f"Clifford relation fails for ({mu}, {nu})")
    zero = np.zeros((8, 8), dtype=int)
    return [np.block([[zero, E[mu]], [Ebar[mu], zero]]) for mu in range(8)]


# ---------------------------------------------------------------------------
# bona fide nonassociative Hamiltonian

def bonafide_hamiltonian(y: Element, z: Element, scale=1) -> MultOp:
    """``scale * L_{z(yy) - (zy)y}``, a left multiplication built from an associator.

    On Jordan instances the element agrees with ``[[z, y], y]/4`` in the
    underlying matrix product, which is verified here.  On an associative
    instance it vanishes identically.

    Raises:
        ObservableViolationError: if ``y`` or ``z`` is not star-fixed.
        UnsupportedOperationError: if the Jordan cross-check fails.
    """
    for name, v in (("y", y), ("z", z)):
        if not v.isclose(v.star()):
            raise ObservableViolationError(f"{name} is not self-adjoint")
    h = multiply(z, multiply(y, y)) - multiply(multiply(z, y), y)
    A = h.algebra
    if A.kind == "jordan" and A.matrix_basis is not None:
        Y, Z = A.matrix_of(y), A.matrix_of(z)
        Hm = A.matrix_of(h)
        cz = Z @ Y - Y @ Z
        expected = (cz @ Y - Y @ cz) / 4
        if not sc.allclose(Hm, expected):
            raise UnsupportedOperationError(
                "Jordan associator does not match the double commutator")
    return left_op(h) * scale
