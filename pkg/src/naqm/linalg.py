"""Rank, nullspace and positivity kernels in exact and float modes."""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from . import scalars as sc

RANK_RTOL = 1e-8


def _gaussian_integer_row(vec: np.ndarray) -> tuple[list[int], list[int]]:
    """Scale an exact vector to Gaussian integers (re and im part lists)."""
    den = 1
    for z in vec:
        if z:
            den = math.lcm(den, int(z.re.denominator), int(z.im.denominator))
    re = [int(z.re * den) for z in vec]
    im = [int(z.im * den) for z in vec]
    return re, im


def _primitive(re: list[int], im: list[int]) -> tuple[list[int], list[int]]:
    g = math.gcd(*re, *im)
    if g > 1:
        re = [x // g for x in re]
        im = [x // g for x in im]
    return re, im


class ExactEchelon:
    """Incremental fraction-free row echelon form over the Gaussian integers.

    Rows are kept with their pivot at the leading nonzero column, so a
    candidate is reduced in one left-to-right sweep.
    """

    def __init__(self, width: int):
        self.width = width
        self.rows: dict[int, tuple[list[int], list[int]]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, re: list[int], im: list[int]):
        col = 0
        n = self.width
        while col < n:
            if re[col] == 0 and im[col] == 0:
                col += 1
                continue
            row = self.rows.get(col)
            if row is None:
                return col, re, im
            pr, pi = row[0][col], row[1][col]
            vr, vi = re[col], im[col]
            rr, ri = row
            # v <- p * v - v_col * r  (Gaussian integer arithmetic)
            new_re = [pr * a - pi * b - (vr * c - vi * d)
                      for a, b, c, d in zip(re, im, rr, ri)]
            new_im = [pr * b + pi * a - (vr * d + vi * c)
                      for a, b, c, d in zip(re, im, rr, ri)]
            re, im = _primitive(new_re, new_im)
            col += 1
        return None, re, im

    def add(self, vec: np.ndarray) -> bool:
        """Insert ``vec`` if independent of the current rows; report whether it was."""
        return self.add_gaussian(*_gaussian_integer_row(vec))

    def add_gaussian(self, re: list[int], im: list[int]) -> bool:
        """As :meth:`add` for a vector already split into integer parts."""
        pivot, re, im = self._reduce(list(re), list(im))
        if pivot is None:
            return False
        self.rows[pivot] = _primitive(re, im)
        return True

    def contains(self, vec: np.ndarray) -> bool:
        re, im = _gaussian_integer_row(vec)
        pivot, _, _ = self._reduce(re, im)
        return pivot is None


class FloatEchelon:
    """Incremental reduced row echelon form with partial pivoting.

    A reduced candidate counts as dependent when its largest entry is below
    ``rtol`` times the largest entry of the unreduced candidate.
    """

    def __init__(self, width: int, rtol: float = RANK_RTOL):
        self.width = width
        self.rtol = rtol
        self.pivots: list[int] = []
        self.rows: list[np.ndarray] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: np.ndarray) -> np.ndarray:
        v = np.array(vec, dtype=complex)
        for p, row in zip(self.pivots, self.rows):
            if v[p] != 0:
                v = v - v[p] * row
        return v

    def _independent(self, vec, v) -> int | None:
        scale = float(np.max(np.abs(vec))) if len(vec) else 0.0
        if scale == 0.0:
            return None
        p = int(np.argmax(np.abs(v)))
        if abs(v[p]) <= self.rtol * scale:
            return None
        return p

    def add(self, vec: np.ndarray) -> bool:
        vec = sc.as_complex(vec)
        v = self._reduce(vec)
        p = self._independent(vec, v)
        if p is None:
            return False
        v = v / v[p]
        v[p] = 1.0
        for i, row in enumerate(self.rows):
            if row[p] != 0:
                self.rows[i] = row - row[p] * v
        self.pivots.append(p)
        self.rows.append(v)
        return True

    def contains(self, vec: np.ndarray) -> bool:
        vec = sc.as_complex(vec)
        return self._independent(vec, self._reduce(vec)) is None


def echelon(width: int, exact: bool):
    return ExactEchelon(width) if exact else FloatEchelon(width)


def rank(rows) -> int:
    """Rank of a stack of row vectors, exact for object arrays."""
    rows = np.asarray(rows)
    if rows.size == 0:
        return 0
    if sc.is_exact(rows):
        ech = ExactEchelon(rows.shape[1])
        for r in rows:
            ech.add(r)
        return ech.rank
    s = np.linalg.svd(rows, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


def exact_nullspace(M: np.ndarray) -> list[np.ndarray]:
    """Right nullspace of an exact matrix via reduced row echelon form."""
    A = np.array(M, dtype=object, copy=True)
    m, n = A.shape
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if A[i, col] != 0), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * (sc.ONE / A[r, col])
        for i in range(m):
            if i != r and A[i, col] != 0:
                A[i] = A[i] - A[i, col] * A[r]
        pivots.append(col)
        r += 1
        if r == m:
            break
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = sc.zeros(n, True)
        v[f] = sc.ONE
        for i, p in enumerate(pivots):
            v[p] = -A[i, f]
        basis.append(v)
    return basis


def float_nullspace(M: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal nullspace columns with singular-value cutoff ``rtol * s_max``."""
    M = sc.as_complex(M)
    if M.size == 0:
        return np.eye(M.shape[1], dtype=complex)
    return scipy.linalg.null_space(M, rcond=rtol)


def nullspace(M: np.ndarray) -> list[np.ndarray]:
    if sc.is_exact(M):
        return exact_nullspace(M)
    ns = float_nullspace(M)
    return [ns[:, k] for k in range(ns.shape[1])]


def is_hermitian(G: np.ndarray, tol: float | None = None) -> bool:
    return sc.allclose(G, np.conj(G).T, tol)


def exact_is_psd(G: np.ndarray) -> bool:
    """Exact positive semidefiniteness of a Hermitian Gaussian-rational matrix.

    Symmetric elimination: a zero pivot forces its whole row to vanish,
    otherwise the pivot must be a positive rational.
    """
    A = np.array(G, dtype=object, copy=True)
    n = A.shape[0]
    if not bool(np.all(A == np.conj(A).T)):
        return False
    for k in range(n):
        d = A[k, k]
        if d.im != 0 or d.re < 0:
            return False
        if d.re == 0:
            if any(A[k, j] != 0 for j in range(k + 1, n)):
                return False
            continue
        inv = sc.ONE / d
        for i in range(k + 1, n):
            if A[i, k] != 0:
                f = A[i, k] * inv
                A[i, k:] = A[i, k:] - f * A[k, k:]
    return True


def min_eigenvalue(G: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``G``."""
    G = sc.as_complex(G)
    if G.size == 0:
        return 0.0
    H = 0.5 * (G + G.conj().T)
    return float(np.linalg.eigvalsh(H)[0])
