"""Unitary, Heisenberg, Krauss and Lindblad dynamics on the multiplication algebra."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from . import scalars as sc
from .algebra import Element, multiply
from .enveloping import (MultOp, anticommutator_op, as_op, commutator_op, compose,
                         identity_op, left_op, star_op, zero_op)
from .errors import (InvalidInputError, NormalizationError, ObservableViolationError,
                     PositivityViolationError)
from .states import (DensityElement, StateFunctional, TraceFunctional, _trace_of,
                     _vector_weight)


def _check_observable(O: MultOp, name: str, tol=None):
    tol = sc.default_tol() if tol is None else tol
    diff = sc.residual(O.matrix, star_op(O).matrix)
    if diff > tol:
        raise ObservableViolationError(f"{name} is not star-fixed (residual {diff:.3g})")


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """A star-fixed generator with its scale ``hbar``.

    Raises:
        ObservableViolationError: if ``op`` is not star-fixed.
    """

    op: MultOp
    hbar: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise InvalidInputError("hbar must be positive")
        _check_observable(self.op, "Hamiltonian")


def _as_hamiltonian(H) -> Hamiltonian:
    return H if isinstance(H, Hamiltonian) else Hamiltonian(H)


def _i_over_hbar(hbar):
    z = sc.exact_scalar(1j / hbar) if isinstance(hbar, int) else None
    if z is None and float(hbar) == 1.0:
        z = sc.I
    return z if z is not None else 1j / float(hbar)


def unitary(H, t: float) -> MultOp:
    """``exp(-(i/hbar) t H)`` with its star ``exp(+(i/hbar) t H)`` attached."""
    H = _as_hamiltonian(H)
    M = sc.as_complex(H.op.matrix)
    Ms = sc.as_complex(star_op(H.op).matrix)
    k = 1j * float(t) / float(H.hbar)
    U = scipy.linalg.expm(-k * M)
    Us = scipy.linalg.expm(k * Ms)
    return as_op(H.op.algebra, U, Us)


def schrodinger_evolve(H, psi0: Element, t: float) -> Element:
    """``psi(t) = U_t |> psi0``."""
    U = unitary(H, t)
    m = U.matrix
    return Element(psi0.algebra.to_float(), m @ sc.as_complex(psi0.coeffs))


def heisenberg_rhs(H, O: MultOp) -> MultOp:
    """``(i/hbar) [H, O]``; exact when both operators are exact and ``hbar`` is 1 or an integer."""
    H = _as_hamiltonian(H)
    _check_observable(O, "observable")
    return commutator_op(H.op, O) * _i_over_hbar(H.hbar)


def heisenberg_evolve(H, O: MultOp, t: float) -> MultOp:
    """``U_t* o O o U_t``."""
    U = unitary(H, t)
    return compose(compose(star_op(U), O.to_float()), U)


@dataclass(frozen=True, eq=False)
class KraussFamily:
    """Operators ``A_k`` with ``sum_k A_k* o A_k = 1``.

    ``normalized=False`` marks a family (e.g. Lindblad jump operators, or
    vector-state families) that is exempt from the check.
    """

    ops: tuple[MultOp, ...]
    normalized: bool = True
    tol: float | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if not self.ops:
            raise InvalidInputError("Krauss family needs at least one operator")
        if self.normalized:
            res = self.normalization_residual()
            tol = sc.default_tol() if self.tol is None else self.tol
            if res > tol:
                raise NormalizationError(f"sum A_k* A_k differs from 1 by {res:.3g}")

    def normalization_residual(self) -> float:
        total = None
        for A in self.ops:
            term = compose(star_op(A), A)
            total = term if total is None else total + term
        return sc.residual(total.matrix, sc.eye(total.algebra.dim, total.exact))


def krauss_map(F: KraussFamily, omega: StateFunctional) -> StateFunctional:
    """``omega~(O) = sum_k omega(A_k* o O o A_k)``.

    The result is a state of kind ``"raw"`` carrying the family and the input
    state as provenance.
    """
    W = None
    for A in F.ops:
        S = star_op(A).matrix
        Wk, Sk, Ak = sc.unify(omega.weight, S, A.matrix)
        term = Sk.T @ Wk @ Ak.T
        W = term if W is None else np.add(*sc.unify(W, term))
    return StateFunctional("raw", omega.trace, W, (), (), (F, omega))


def krauss_density(F: KraussFamily, psi: Element, tau=None) -> DensityElement:
    """``rho~ = sum_k (A_k |> psi)(A_k |> psi)*``."""
    rho = None
    for A in F.ops:
        m, v = sc.unify(A.matrix, psi.coeffs)
        phi = Element(psi.algebra if sc.is_exact(v) else psi.algebra.to_float(), m @ v)
        term = multiply(phi, phi.star())
        rho = term if rho is None else rho + term
    return DensityElement(rho, (F, psi))


def vector_state_family(psis: Sequence[Element], probs) -> KraussFamily:
    """``A_l = sqrt(p_l) L_{psi_l}``; mapping the tracial state gives the mixture of the ``psi_l``.

    Such a family is not normalized as an operator identity, so it is built
    with ``normalized=False``.
    """
    ops = [left_op(p.to_float()) * math.sqrt(float(complex(q).real))
           for p, q in zip(psis, probs)]
    return KraussFamily(tuple(ops), normalized=False)


def lindblad_rhs(H, jumps: Sequence[MultOp], O: MultOp) -> MultOp:
    """``(i/hbar)[H, O] + sum_k (L_k* o O o L_k - {L_k* o L_k, O}/2)``; ``H`` may be None."""
    if H is None:
        out = zero_op(O.algebra)
    else:
        H = _as_hamiltonian(H)
        out = commutator_op(H.op, O) * _i_over_hbar(H.hbar)
    half = sc.GaussianRational(1, 0) / 2
    for L in jumps:
        Ls = star_op(L)
        LsL = compose(Ls, L)
        term = compose(compose(Ls, O), L) - anticommutator_op(LsL, O) * half
        out = out + term
    return out


def dual_state(psi: Element, a_ks: Sequence[Element], tau=None,
               tol: float | None = None):
    """Return ``b -> sum_k tau(b (a_k (psi (psi* (a_k* b*)))))``.

    This is the value of the dual state on ``b* b``, obtained by applying the
    left multiplications ``b^ o a_k^ o psi^ o psi*^ o a_k*^ o b*^`` to the unit.

    Raises (from the returned callable):
        PositivityViolationError: if the value is below ``-tol``.
    """
    tau = _trace_of(tau if tau is not None else psi.algebra)
    tol = sc.default_tol() if tol is None else tol
    a_ks = list(a_ks)
    if not a_ks:
        raise InvalidInputError("dual_state needs at least one a_k")

    def mu(b: Element) -> float:
        total = 0
        for a in a_ks:
            chain = [b, a, psi, psi.star(), a.star(), b.star()]
            x = tau.algebra.one()
            for el in reversed(chain):
                x = multiply(el, x)
            total = total + tau(x)
        val = complex(total)
        if val.real < -tol or abs(val.imag) > max(tol, 1e-8 * abs(val)):
            raise PositivityViolationError(f"dual state value {val} is not nonnegative")
        return val.real

    return mu


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    expectations: dict[str, np.ndarray]


def trajectory(H, psi0: Element, times: Sequence[float], observables: dict | None = None,
               tau=None) -> Trajectory:
    """Schrodinger trajectory on a time grid with expectation values ``omega_psi(t)(O)``."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or (len(times) > 1 and np.any(np.diff(times) <= 0)):
        raise InvalidInputError("time grid must be strictly increasing")
    observables = observables or {}
    tau = _trace_of(tau if tau is not None else psi0.algebra) if observables else None
    rows = []
    exps = {k: [] for k in observables}
    for t in times:
        psi = schrodinger_evolve(H, psi0, float(t))
        rows.append(sc.as_complex(psi.coeffs))
        if observables:
            W = _vector_weight(tau.to_float(), psi)
            for k, O in observables.items():
                exps[k].append(complex(np.sum(W * sc.as_complex(O.matrix))))
    return Trajectory(times, np.array(rows), {k: np.array(v) for k, v in exps.items()})
