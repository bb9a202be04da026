"""Eigenvectors of multiplication operators and eigenstate checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from . import scalars as sc
from .algebra import Element
from .enveloping import GeneratedSubalgebra, MultOp, identity_op, star_op
from .errors import (InvalidInputError, NoEigenvectorError, NormalizationError,
                     ObservableViolationError)
from .states import StateFunctional, TraceFunctional, _trace_of

EIGEN_TOL = 1e-8
CLUSTER_TOL = 1e-8


@dataclass
class EigenPair:
    value: complex
    vector: Element
    residual: float
    generalized: bool = False


def _cluster(values: np.ndarray) -> list[list[int]]:
    clusters: list[list[int]] = []
    for i in range(len(values)):
        for cl in clusters:
            if abs(values[i] - values[cl[0]]) < CLUSTER_TOL:
                cl.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def _snap(z: complex, scale: float) -> complex:
    """Zero out real or imaginary parts that are pure rounding noise."""
    re_, im_ = z.real, z.imag
    if abs(re_) < 1e-12 * scale:
        re_ = 0.0
    if abs(im_) < 1e-12 * scale:
        im_ = 0.0
    return complex(re_, im_)


def _orthonormalize(vecs: list[np.ndarray], G: np.ndarray | None) -> list[np.ndarray]:
    """Gram-Schmidt in the trace inner product; null vectors fall back to the Euclidean norm."""
    out = []
    for v in vecs:
        w = v.astype(complex).copy()
        for u in out:
            ip = u.conj() @ G @ w if G is not None else u.conj() @ w
            nu = u.conj() @ G @ u if G is not None else 1.0
            if abs(nu) > 1e-14:
                w = w - (ip / nu) * u
        nrm = (w.conj() @ G @ w).real if G is not None else (w.conj() @ w).real
        if G is None or nrm <= 1e-14:
            e = np.linalg.norm(w)
            if e > 1e-14:
                w = w / e
        else:
            w = w / math.sqrt(nrm)
        out.append(w)
    return out


def operator_eigen(X: MultOp, trace: TraceFunctional | None = None) -> list[EigenPair]:
    """Full eigen-decomposition of the operator matrix.

    Pairs are sorted by real part then imaginary part (both descending), ties
    broken by residual.  Within a cluster of equal eigenvalues the vectors
    span the geometric eigenspace and are orthonormalized in the trace inner
    product (``tau(psi* psi) = 1``).  If the eigenspace is smaller than the
    algebraic multiplicity the missing directions come from the generalized
    eigenspace and are flagged.
    """
    if trace is None and X.algebra.trace is not None:
        trace = TraceFunctional.of(X.algebra)
    M = sc.as_complex(X.matrix)
    n = M.shape[0]
    G = sc.as_complex(trace.gram()) if trace is not None else None
    vals = scipy.linalg.eigvals(M)
    scale = max(1.0, float(np.max(np.abs(M))))
    pairs: list[EigenPair] = []
    falg = X.algebra.to_float()
    for cl in _cluster(vals):
        lam = _snap(complex(np.mean(vals[cl])), scale)
        mult = len(cl)
        K = M - lam * np.eye(n)
        eig = linalg.float_nullspace(K, 1e-8)
        vecs = [eig[:, k] for k in range(min(eig.shape[1], mult))]
        flags = [False] * len(vecs)
        if len(vecs) < mult:
            gen = linalg.float_nullspace(np.linalg.matrix_power(K, mult), 1e-8)
            # directions of the generalized eigenspace outside the eigenspace
            proj = gen - eig @ (eig.conj().T @ gen)
            u, s, _ = np.linalg.svd(proj, full_matrices=False)
            extra = [u[:, k] for k in range(len(s)) if s[k] > 1e-8]
            vecs += extra[:mult - len(vecs)]
            flags += [True] * (len(vecs) - len(flags))
        vecs = _orthonormalize(vecs, G)
        for v, flag in zip(vecs, flags):
            res = float(np.linalg.norm(M @ v - lam * v))
            pairs.append(EigenPair(lam, falg.element(v), res / scale if flag else res, flag))
    pairs.sort(key=lambda p: (-round(p.value.real, 9), -round(p.value.imag, 9), p.residual))
    return pairs


@dataclass
class EigenstateReport:
    passed: bool
    value: complex
    max_residual: float
    variance: complex | None
    real_value: bool


def eigenstate_check(omega: StateFunctional, X: MultOp, lam=None,
                     op_basis: GeneratedSubalgebra | None = None,
                     tol: float = EIGEN_TOL) -> EigenstateReport:
    """Check ``omega(B o X) = lam omega(B)`` for every basis operator ``B``.

    ``lam`` defaults to ``omega(X)``.  The variance ``omega((X - lam)* o (X - lam))``
    is reported too when ``X`` can be starred.
    """
    if op_basis is None:
        raise InvalidInputError("eigenstate_check needs an operator basis")
    if not op_basis.closed:
        raise InvalidInputError("eigenstate_check needs a closed operator basis")
    if lam is None:
        lam = omega(X)
    lam = complex(lam)
    W = sc.as_complex(omega.weight)
    B = op_basis.matrices()
    Mx = sc.as_complex(X.matrix)
    BX = np.einsum("jab,bc->jac", B, Mx)
    lhs = np.einsum("ab,jab->j", W, BX)
    rhs = lam * np.einsum("ab,jab->j", W, B)
    worst = float(np.max(np.abs(lhs - rhs)))
    var = None
    try:
        D = X.to_float() - identity_op(X.algebra.to_float()) * lam
        var = complex(omega.to_float()(star_op(D) @ D))
    except Exception:  # no star available for a bare matrix
        var = None
    observable = False
    try:
        observable = sc.allclose(X.matrix, star_op(X).matrix, tol)
    except Exception:
        pass
    real_ok = (not observable) or abs(lam.imag) <= tol
    return EigenstateReport(worst <= tol and real_ok, lam, worst, var, abs(lam.imag) <= tol)


def jordan_spectral_eigen(a: Element, lam: float, p, tau=None,
                          tol: float = EIGEN_TOL) -> Element:
    """Jordan eigenvector ``phi = sum_i sqrt(p_i) phi_i phi_i^H`` of the observable ``a``.

    ``phi_i`` are orthonormal eigenvectors of the underlying matrix of ``a`` for
    ``lam``; the result satisfies ``a phi = lam phi`` in the Jordan product.
    With ``tau = Tr/n`` one has ``tau(phi^2) = sum(p)/n``, so the weights must
    add up to the matrix size ``n``.

    Raises:
        ObservableViolationError: if ``a`` is not self-adjoint.
        NoEigenvectorError: if ``lam`` is not an eigenvalue.
        InvalidInputError: if more weights than eigenvectors are given, or a weight is negative.
        NormalizationError: if ``tau(phi^2) != 1``.
    """
    A = a.algebra
    if A.kind != "jordan" or A.matrix_basis is None:
        raise InvalidInputError("jordan_spectral_eigen needs a Jordan matrix instance")
    if not a.isclose(a.star()):
        raise ObservableViolationError("a is not self-adjoint")
    M = sc.as_complex(A.matrix_of(a))
    n = M.shape[0]
    w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
    idx = [i for i in range(n) if abs(w[i] - lam) <= tol]
    if not idx:
        raise NoEigenvectorError(f"{lam} is not an eigenvalue of the underlying matrix")
    p = [float(x) for x in np.atleast_1d(p)]
    if len(p) > len(idx):
        raise InvalidInputError(f"{len(p)} weights for an eigenspace of rank {len(idx)}")
    if any(x < 0 for x in p):
        raise InvalidInputError("weights must be nonnegative")
    phi = np.zeros((n, n), dtype=complex)
    for x, i in zip(p, idx):
        v = V[:, i]
        phi += math.sqrt(x) * np.outer(v, v.conj())
    out = A.from_matrix(phi)
    tau = _trace_of(tau if tau is not None else A).to_float()
    from .algebra import multiply
    norm = complex(tau(multiply(out, out)))
    if abs(norm - 1) > tol:
        raise NormalizationError(f"tau(phi^2) = {norm.real:.6g}; weights must sum to {n}")
    return out
