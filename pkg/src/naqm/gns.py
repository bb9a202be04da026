"""GNS constructions: tracial on the algebra, and from a state on an operator basis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from . import scalars as sc
from .algebra import Element
from .enveloping import GeneratedSubalgebra, MultOp, basis_ops, star_op
from .errors import InvalidInputError, PositivityViolationError, TraceAxiomError
from .states import StateFunctional, TraceFunctional, _trace_of, check_trace_axioms, state_gram

KERNEL_RTOL = 1e-8


@dataclass
class ZeroNormIdeal:
    """Kernel of the trace Gram matrix, i.e. elements with ``tau(a* a) = 0``."""

    basis: list[Element]
    is_left_ideal: bool

    @property
    def dim(self) -> int:
        return len(self.basis)


def zero_norm_ideal(tau, tol: float | None = None) -> ZeroNormIdeal:
    """Basis of ``{a : tau(a* a) = 0}`` and whether it is stable under all generators."""
    tau = _trace_of(tau)
    A = tau.algebra
    G = tau.gram()
    kernel = linalg.nullspace(G)
    tol = sc.default_tol() if tol is None else tol
    stable = True
    for X in basis_ops(A):
        for v in kernel:
            m, w = sc.unify(X.matrix, v)
            Gm, image = sc.unify(G, m @ w)
            if not sc.is_zero(Gm @ image, tol):
                stable = False
    return ZeroNormIdeal([A.element(v) for v in kernel], stable)


@dataclass
class PreHilbert:
    """Quotient space with orthonormal coordinates.

    Attributes:
        ambient_dim: dimension of the space before quotienting.
        quotient_basis: representatives (columns) of an orthonormal quotient basis.
        gram: inner product matrix in these coordinates (the identity up to rounding).
        vacuum: coordinates of the cyclic vector.
        gram_eigenvalues: spectrum of the ambient Gram matrix, descending.
    """

    ambient_dim: int
    quotient_basis: np.ndarray
    gram: np.ndarray
    vacuum: np.ndarray
    gram_eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.quotient_basis.shape[1]


@dataclass
class Representation:
    """``map`` sends an operator to its matrix on the quotient coordinates."""

    dim: int
    map: Callable[[MultOp], np.ndarray]

    def __call__(self, X: MultOp) -> np.ndarray:
        return self.map(X)


def _quotient(G: np.ndarray, keep_diagonal: bool = True):
    """Orthonormal representatives ``R`` with ``R^H G R = 1`` on the positive part.

    A nonsingular diagonal Gram keeps the original basis (rescaled), so that
    e.g. the octonion units stay the standard coordinates.
    """
    G = sc.as_complex(G)
    G = 0.5 * (G + G.conj().T)
    lam, vecs = np.linalg.eigh(G)
    order = np.argsort(lam)[::-1]
    lam, vecs = lam[order], vecs[:, order]
    lmax = lam[0] if lam.size else 0.0
    if lam.size and lam[-1] < -KERNEL_RTOL * max(1.0, abs(lmax)):
        raise PositivityViolationError(f"Gram matrix has negative eigenvalue {lam[-1]:.3g}")
    keep = lam > KERNEL_RTOL * lmax
    d = np.real(np.diag(G))
    offdiag = G - np.diag(np.diag(G))
    if keep_diagonal and keep.all() and np.max(np.abs(offdiag), initial=0.0) == 0.0:
        return np.diag(1.0 / np.sqrt(d)).astype(complex), lam
    R = vecs[:, keep] / np.sqrt(lam[keep])
    return R, lam


def tracial_gns(tau, check: bool = True) -> tuple[PreHilbert, Representation]:
    """GNS space of the trace: the algebra modulo zero-norm vectors.

    ``pi(X)`` acts on coordinates by ``R^H G X R`` with ``R`` the quotient
    representatives and ``G`` the trace Gram; the vacuum is the class of 1.

    Raises:
        TraceAxiomError: if ``check`` is on and the trace fails an axiom.
    """
    tau = _trace_of(tau)
    if check:
        report = check_trace_axioms(tau)
        if not report.passed:
            names = ", ".join(c.name for c in report.failures)
            raise TraceAxiomError(f"trace fails axioms: {names}")
    G = sc.as_complex(tau.gram())
    R, lam = _quotient(G)
    RG = R.conj().T @ G
    vac = RG @ sc.as_complex(tau.algebra.unit)
    H = PreHilbert(tau.algebra.dim, R, R.conj().T @ G @ R, vac, lam)

    def pi(X: MultOp) -> np.ndarray:
        return RG @ sc.as_complex(X.matrix) @ R

    return H, Representation(H.dim, pi)


def gns_coordinates(H: PreHilbert, tau: TraceFunctional, a: Element) -> np.ndarray:
    """Quotient coordinates of the class of ``a`` in the tracial GNS space."""
    G = sc.as_complex(tau.gram())
    return H.quotient_basis.conj().T @ G @ sc.as_complex(a.coeffs)


def gns_from_state(omega: StateFunctional,
                   op_basis: GeneratedSubalgebra) -> tuple[PreHilbert, Representation]:
    """GNS construction of ``omega`` restricted to the span of a closed operator basis.

    Raises:
        InvalidInputError: if the basis is not closed.
        PositivityViolationError: if the Gram matrix has a negative eigenvalue.
    """
    if not op_basis.closed:
        raise InvalidInputError("gns_from_state needs a closed operator basis")
    m = op_basis.dim
    G = state_gram(omega, op_basis)
    R, lam = _quotient(G, keep_diagonal=False)
    RG = R.conj().T @ G
    B = op_basis.matrices()
    flat = B.reshape(m, -1).T
    pinv = np.linalg.pinv(flat)
    n = B.shape[1]
    ident = np.eye(n, dtype=complex).ravel()
    unit_coords = pinv @ ident
    vac = RG @ unit_coords
    H = PreHilbert(m, R, R.conj().T @ G @ R, vac, lam)

    def pi(X: MultOp) -> np.ndarray:
        XB = np.einsum("ab,jbc->jac", sc.as_complex(X.matrix), B)
        C = pinv @ XB.reshape(m, -1).T
        return RG @ C @ R

    return H, Representation(H.dim, pi)


def commutant(rep, generators: Sequence) -> list[np.ndarray]:
    """Basis of matrices commuting with ``rep(g)`` for every generator.

    ``rep`` may be a :class:`Representation` or any callable returning
    matrices; generators may also be given directly as matrices when ``rep``
    is None.
    """
    mats = [np.asarray(g if rep is None else rep(g), dtype=complex) for g in generators]
    if not mats:
        raise InvalidInputError("commutant needs at least one generator")
    q = mats[0].shape[0]
    ident = np.eye(q)
    rows = [np.kron(M, ident) - np.kron(ident, M.T) for M in mats]
    ns = linalg.float_nullspace(np.vstack(rows), KERNEL_RTOL)
    return [ns[:, k].reshape(q, q) for k in range(ns.shape[1])]


@dataclass
class PurityReport:
    pure: bool
    quotient_dim: int
    commutant_dim: int
    gram_eigenvalues: np.ndarray


def purity(omega: StateFunctional, op_basis: GeneratedSubalgebra) -> PurityReport:
    """GNS data of ``omega`` and the dimension of the commutant of its representation."""
    H, rep = gns_from_state(omega, op_basis)
    comm = commutant(rep, op_basis.basis)
    return PurityReport(len(comm) == 1, H.dim, len(comm), H.gram_eigenvalues)


def is_pure(omega: StateFunctional, op_basis: GeneratedSubalgebra) -> bool:
    """True iff the GNS representation of ``omega`` has a one-dimensional commutant."""
    return purity(omega, op_basis).pure


def adjoint_in(H: PreHilbert, M: np.ndarray) -> np.ndarray:
    """Adjoint of ``M`` with respect to ``H.gram``."""
    G = H.gram
    return np.linalg.solve(G, M.conj().T @ G)


def represented_star(rep: Representation, X: MultOp) -> np.ndarray:
    return rep(star_op(X))
