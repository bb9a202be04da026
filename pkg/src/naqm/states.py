"""Traces, states on the multiplication algebra, uncertainties and entropy.

Every state here is linear in the operator matrix, so it is stored as a
weight matrix ``W`` with ``omega(X) = sum_ij W[i, j] X[i, j]``.  The kind
(tracial, vector, mixed, raw) and its ingredients are kept alongside for
provenance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from . import scalars as sc
from .algebra import AlgebraSpec, AxiomCheck, AxiomReport, Element, multiply
from .enveloping import (GeneratedSubalgebra, MultOp, Word, Factor, commutator_op, compose,
                         identity_op, star_op, _from_word)
from .errors import (InvalidInputError, NormalizationError, ObservableViolationError,
                     PositivityViolationError, TraceAxiomError)

GROUP_TOL = 1e-8


# ---------------------------------------------------------------------------
# traces

@dataclass(frozen=True, eq=False)
class TraceFunctional:
    """Linear functional ``tau(a) = sum_mu t_mu a_mu`` on the algebra."""

    algebra: AlgebraSpec
    covector: np.ndarray

    def __post_init__(self):
        if self.covector.shape != (self.algebra.dim,):
            raise InvalidInputError(f"trace covector must have length {self.algebra.dim}")

    @classmethod
    def of(cls, algebra: AlgebraSpec) -> "TraceFunctional":
        """The trace attached to ``algebra``."""
        if algebra.trace is None:
            raise InvalidInputError(f"algebra {algebra.label!r} has no trace covector")
        return cls(algebra, algebra.trace)

    @property
    def exact(self) -> bool:
        return sc.is_exact(self.covector) and self.algebra.exact

    def __call__(self, a: Element):
        t, x = sc.unify(self.covector, a.coeffs)
        return t @ x

    def contracted(self) -> np.ndarray:
        """``M[mu, nu] = tau(e_mu e_nu)``."""
        c, t = sc.unify(self.algebra.structure_constants, self.covector)
        return np.tensordot(c, t, axes=(2, 0))

    def gram(self) -> np.ndarray:
        """``G[mu, nu] = tau(e_mu* e_nu)``, so ``tau(a* b) = conj(a) @ G @ b``."""
        S, M = sc.unify(self.algebra.star_map, self.contracted())
        return S @ M

    def inner(self, a: Element, b: Element):
        """``tau(a* b)``."""
        G, x, y = sc.unify(self.gram(), a.coeffs, b.coeffs)
        return np.conj(x) @ G @ y

    def norm_sq(self, a: Element) -> float:
        return float(complex(self.inner(a, a)).real)

    def to_float(self) -> "TraceFunctional":
        return TraceFunctional(self.algebra.to_float(), sc.as_complex(self.covector))


def _trace_of(trace_or_algebra) -> TraceFunctional:
    if isinstance(trace_or_algebra, TraceFunctional):
        return trace_or_algebra
    if isinstance(trace_or_algebra, AlgebraSpec):
        return TraceFunctional.of(trace_or_algebra)
    raise InvalidInputError("expected a TraceFunctional or an AlgebraSpec with a trace")


def check_trace_axioms(tau: TraceFunctional, tol: float | None = None) -> AxiomReport:
    """Normalization, 2- and 3-cyclicity on basis elements, and Gram positivity."""
    tol = sc.default_tol() if tol is None else tol
    report = AxiomReport(f"trace on {tau.algebra.label or 'algebra'}")
    A = tau.algebra
    try:
        one = tau(A.one())
        report.add("normalized", np.array([one - 1]), tol)
        M = tau.contracted()
        report.add("cyclic_2", M - M.T, tol)
        c, M = sc.unify(A.structure_constants, M)
        lhs = np.einsum("bcr,ar->abc", c, M)     # tau(a (b c))
        rhs = np.einsum("abr,cr->abc", c, M)     # tau(c (a b))
        report.add("cyclic_3", lhs - rhs, tol)
        G = tau.gram()
        if sc.is_exact(G):
            ok = linalg.exact_is_psd(G)
            lam = linalg.min_eigenvalue(G)
            report.checks.append(AxiomCheck("positive", ok, max(0.0, -lam)))
        else:
            herm = sc.max_abs(G - G.conj().T)
            lam = linalg.min_eigenvalue(G)
            ok = herm <= tol and lam >= -tol
            report.checks.append(AxiomCheck("positive", ok, max(herm, -lam, 0.0)))
    except Exception as exc:  # still report rather than abort
        report.checks.append(AxiomCheck("evaluation", False, float("inf"), repr(exc)))
    return report


# ---------------------------------------------------------------------------
# states

@dataclass(frozen=True, eq=False)
class StateFunctional:
    """A state on the multiplication algebra.

    Attributes:
        kind: ``"tracial"``, ``"vector"``, ``"mixed"`` or ``"raw"``.
        trace: the trace the state is built from (None for raw states).
        weight: matrix ``W`` with ``omega(X) = sum(W * X.matrix)``.
        probs, vectors: mixture weights and vectors for vector/mixed kinds.
        source: free-form provenance (e.g. the Krauss family that produced it).
    """

    kind: str
    trace: TraceFunctional | None
    weight: np.ndarray
    probs: tuple = ()
    vectors: tuple[Element, ...] = ()
    source: object = None

    @property
    def algebra(self) -> AlgebraSpec:
        if self.trace is not None:
            return self.trace.algebra
        return self.vectors[0].algebra

    @property
    def exact(self) -> bool:
        return sc.is_exact(self.weight)

    def __call__(self, X: MultOp):
        W, M = sc.unify(self.weight, X.matrix)
        return np.sum(W * M)

    def on_element(self, a: Element):
        """``omega(a^)`` for the left multiplication by ``a``."""
        W, L = sc.unify(self.weight, a.algebra.left_matrix(a.coeffs))
        return np.sum(W * L)

    def values(self, ops) -> np.ndarray:
        """Evaluate on a stack of operator matrices (float)."""
        mats = np.stack([sc.as_complex(o.matrix if isinstance(o, MultOp) else o) for o in ops])
        return np.einsum("ij,kij->k", sc.as_complex(self.weight), mats)

    def to_float(self) -> "StateFunctional":
        return StateFunctional(self.kind, None if self.trace is None else self.trace.to_float(),
                               sc.as_complex(self.weight), self.probs,
                               tuple(v.to_float() for v in self.vectors), self.source)


def _vector_weight(tau: TraceFunctional, psi: Element) -> np.ndarray:
    G, p = sc.unify(tau.gram(), psi.coeffs)
    return np.outer(G.T @ np.conj(p), p)


def tracial_state(tau) -> StateFunctional:
    """``omega_tau(X) = tau(X |> 1)``."""
    tau = _trace_of(tau)
    t, u = sc.unify(tau.covector, tau.algebra.unit)
    return StateFunctional("tracial", tau, np.outer(t, u), (1,), (tau.algebra.one(),))


def _normalized(tau: TraceFunctional, psi: Element, normalize: bool, tol) -> Element:
    tol = sc.default_tol() if tol is None else tol
    nrm = tau.inner(psi, psi)
    if isinstance(nrm, sc.GaussianRational):
        if nrm == 1:
            return psi
    elif abs(complex(nrm) - 1) <= tol:
        return psi
    if not normalize:
        raise NormalizationError(f"tau(psi* psi) = {complex(nrm):.6g}, expected 1")
    n = complex(nrm).real
    if n <= tol:
        raise NormalizationError("cannot normalize a zero-norm vector")
    return psi.to_float() / math.sqrt(n)


def vector_state(psi: Element, tau=None, normalize: bool = False,
                 tol: float | None = None) -> StateFunctional:
    """``omega_psi(X) = tau(psi* (X |> psi))``.

    Raises:
        NormalizationError: if ``tau(psi* psi) != 1`` and ``normalize`` is off.
    """
    tau = _trace_of(tau if tau is not None else psi.algebra)
    psi = _normalized(tau, psi, normalize, tol)
    return StateFunctional("vector", tau, _vector_weight(tau, psi), (1,), (psi,))


def _check_probs(probs, tol) -> list:
    tol = sc.default_tol() if tol is None else tol
    ps = list(probs)
    if not ps:
        raise InvalidInputError("empty probability vector")
    for p in ps:
        if complex(p).imag != 0 or complex(p).real < -tol:
            raise InvalidInputError(f"invalid probability {p!r}")
    total = sum(complex(p).real for p in ps)
    if abs(total - 1) > tol:
        raise InvalidInputError(f"probabilities sum to {total:.6g}, expected 1")
    return ps


def mixed_state(probs, psis, tau=None, normalize: bool = False,
                tol: float | None = None) -> StateFunctional:
    """Convex combination ``sum_l p_l omega_{psi_l}``."""
    psis = list(psis)
    if len(psis) != len(list(probs)):
        raise InvalidInputError("one probability per vector required")
    ps = _check_probs(probs, tol)
    tau = _trace_of(tau if tau is not None else psis[0].algebra)
    psis = [_normalized(tau, v, normalize, tol) for v in psis]
    W = None
    for p, v in zip(ps, psis):
        term = sc.scale(_vector_weight(tau, v), p)
        W = term if W is None else np.add(*sc.unify(W, term))
    return StateFunctional("mixed", tau, W, tuple(ps), tuple(psis))


def raw_state(algebra: AlgebraSpec, weight, trace: TraceFunctional | None = None,
              source=None) -> StateFunctional:
    """State given directly by its weight matrix (normalization is checked)."""
    W = np.asarray(weight)
    if W.shape != (algebra.dim, algebra.dim):
        raise InvalidInputError(f"weight must be {algebra.dim} x {algebra.dim}")
    tr = W.trace()
    if not sc.allclose(np.array([tr]), np.array([1])):
        raise NormalizationError(f"raw state has omega(1) = {complex(tr):.6g}")
    if trace is None and algebra.trace is not None:
        trace = TraceFunctional.of(algebra)
    return StateFunctional("raw", trace, W, (), (), source)


def state_from_dict(algebra: AlgebraSpec, d: dict, tau=None) -> StateFunctional:
    """Parse ``{"kind": "tracial"|"vector"|"mixed", "psi": [...], "probs": [...]}``."""
    from .algebra import _parse_vector
    tau = _trace_of(tau if tau is not None else algebra)
    kind = d.get("kind", "tracial")
    exact = algebra.exact
    normalize = bool(d.get("normalize", False))
    if kind == "tracial":
        return tracial_state(tau)
    if kind == "vector":
        psi = algebra.element(_parse_vector(d["psi"], algebra.dim, exact, "state.psi"))
        return vector_state(psi, tau, normalize)
    if kind == "mixed":
        psis = [algebra.element(_parse_vector(v, algebra.dim, exact, f"state.psi[{k}]"))
                for k, v in enumerate(d["psi"])]
        probs = [float(p) if not exact else sc.GaussianRational.coerce(p) for p in d["probs"]]
        return mixed_state(probs, psis, tau, normalize)
    raise InvalidInputError(f"unknown state kind {kind!r}")


# ---------------------------------------------------------------------------
# density elements

@dataclass(frozen=True, eq=False)
class DensityElement:
    rho: Element
    source: object = None


def density_element(psi, tau=None, probs=None, normalize: bool = False,
                    tol: float | None = None) -> DensityElement:
    """``rho = psi psi*`` or ``sum_l p_l psi_l psi_l*`` for a mixture."""
    if probs is None:
        psis, ps = [psi], [sc.ONE if psi.exact else 1.0]
    else:
        psis = list(psi)
        ps = _check_probs(probs, tol)
        if len(psis) != len(ps):
            raise InvalidInputError("one probability per vector required")
    tau = _trace_of(tau if tau is not None else psis[0].algebra)
    rho = None
    for p, v in zip(ps, psis):
        v = _normalized(tau, v, normalize, tol)
        term = multiply(v, v.star()) * p
        rho = term if rho is None else rho + term
    return DensityElement(rho, psi if probs is None else (tuple(probs), tuple(psis)))


# ---------------------------------------------------------------------------
# positivity and Cauchy-Schwarz helpers

def random_word_op(algebra: AlgebraSpec, rng: np.random.Generator, terms: int = 3,
                   max_length: int = 3) -> MultOp:
    """Random float operator carrying a word (so that it can be starred)."""
    fa = algebra.to_float()
    n = fa.dim
    word = Word()
    for _ in range(terms):
        length = int(rng.integers(1, max_length + 1))
        mono = Word.identity(complex(rng.normal(), rng.normal()))
        for _ in range(length):
            kind = "L" if rng.random() < 0.5 else "R"
            a = fa.element(rng.normal(size=n) + 1j * rng.normal(size=n))
            mono = mono.compose(Word.generator(Factor(kind, a)))
        word = word + mono
    return _from_word(fa, word, False)


@dataclass
class PositivityReport:
    passed: bool
    min_value: float
    samples: int
    certified: bool


def check_positivity(omega: StateFunctional, basis: GeneratedSubalgebra | None = None,
                     samples: int = 100, seed: int = 0,
                     tol: float | None = None) -> PositivityReport:
    """Spot-check ``omega(X* o X) >= 0`` on random words, or certify it on a basis.

    With a closed operator basis, positivity of the Gram matrix
    ``omega(B_i* o B_j)`` is a certificate for the whole span.
    """
    tol = sc.default_tol() if tol is None else tol
    if basis is not None:
        G = state_gram(omega, basis)
        lam = linalg.min_eigenvalue(G)
        scale = max(1.0, sc.max_abs(G))
        return PositivityReport(lam >= -tol * scale, lam, basis.dim, True)
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(samples):
        X = random_word_op(omega.algebra, rng)
        v = complex(omega(compose(star_op(X), X)))
        scale = max(1.0, sc.max_abs(X.matrix) ** 2)
        worst = min(worst, v.real / scale)
    return PositivityReport(worst >= -tol, worst, samples, False)


def state_gram(omega: StateFunctional, basis: GeneratedSubalgebra) -> np.ndarray:
    """``G[i, j] = omega(B_i* o B_j)`` (float)."""
    B = basis.matrices()
    S = np.stack([sc.as_complex(star_op(b).matrix) for b in basis.basis])
    W = sc.as_complex(omega.weight)
    return np.einsum("ab,iac,jcb->ij", W, S, B, optimize=True)


# ---------------------------------------------------------------------------
# uncertainty

def _require_observable(O: MultOp, tol, name="operator"):
    tol = sc.default_tol() if tol is None else tol
    diff = sc.residual(O.matrix, star_op(O).matrix)
    if diff > tol:
        raise ObservableViolationError(f"{name} is not star-fixed (residual {diff:.3g})")


def expectation(omega: StateFunctional, O: MultOp):
    return omega(O)


def variance(omega: StateFunctional, O: MultOp):
    """``omega((O - <O>) o (O - <O>))`` without the observable check."""
    mean = omega(O)
    D = O - identity_op(O.algebra) * mean
    return omega(compose(D, D))


def _vector_variance(omega: StateFunctional, O: MultOp):
    """``sum_l p_l tau((D psi_l)* (D psi_l))`` with ``D = O - <O>``.

    For a star-fixed ``O`` this equals ``omega(D o D)`` on vector-type states
    but is a sum of squared norms, so it does not lose precision near zero.
    Returns None for states without vectors.
    """
    if omega.trace is None or not omega.vectors or len(omega.probs) != len(omega.vectors):
        return None
    mean = omega(O)
    D = O - identity_op(O.algebra) * mean
    total = 0
    for p, psi in zip(omega.probs, omega.vectors):
        m, v = sc.unify(D.matrix, psi.coeffs)
        phi = psi.algebra.to_float().element(sc.as_complex(m @ v))
        total = total + complex(p).real * omega.trace.to_float().norm_sq(phi)
    return complex(total)


def uncertainty(omega: StateFunctional, O: MultOp, tol: float | None = None) -> float:
    """``sqrt(omega((O - <O>)^2))`` for an observable ``O``.

    Raises:
        ObservableViolationError: if ``O`` is not star-fixed.
        PositivityViolationError: if the variance is below ``-tol``.
    """
    tol = sc.default_tol() if tol is None else tol
    _require_observable(O, tol)
    var = _vector_variance(omega, O)
    if var is None:
        var = complex(variance(omega, O))
    if var.real < -tol:
        raise PositivityViolationError(f"negative variance {var.real:.3g}")
    return math.sqrt(max(0.0, var.real))


@dataclass
class UncertaintyReport:
    lhs: float
    rhs: float
    slack: float
    passed: bool
    delta_1: float
    delta_2: float
    commutator_mean: complex


def check_uncertainty_relation(omega: StateFunctional, O1: MultOp, O2: MultOp,
                               tol: float | None = None) -> UncertaintyReport:
    """Compare ``Delta O1 * Delta O2`` with ``|<[O1, O2]>|/2``."""
    tol = sc.default_tol() if tol is None else tol
    d1 = uncertainty(omega, O1, tol)
    d2 = uncertainty(omega, O2, tol)
    cm = complex(omega(commutator_op(O1, O2)))
    lhs, rhs = d1 * d2, 0.5 * abs(cm)
    return UncertaintyReport(lhs, rhs, lhs - rhs, lhs >= rhs - tol, d1, d2, cm)


# ---------------------------------------------------------------------------
# entropy

def shannon_entropy(probs, tol: float | None = None) -> float:
    """``-sum p log p`` with ``0 log 0 = 0``.

    Raises:
        InvalidInputError: for negative entries or a sum other than one.
    """
    ps = [complex(p).real for p in _check_probs(probs, tol)]
    return float(-sum(p * math.log(p) for p in ps if p > 0))


# ---------------------------------------------------------------------------
# bracketings

def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def bracketings(lo: int, hi: int) -> tuple:
    """All full bracketings of factors ``lo..hi-1`` as nested index tuples."""
    if hi - lo == 1:
        return (lo,)
    out = []
    for mid in range(lo + 1, hi):
        for left in bracketings(lo, mid):
            for right in bracketings(mid, hi):
                out.append((left, right))
    return tuple(out)


def bracket_repr(tree) -> str:
    if isinstance(tree, int):
        return f"a{tree + 1}"
    return f"({bracket_repr(tree[0])} {bracket_repr(tree[1])})"


def _evaluate_tree(tree, elements, cache):
    if isinstance(tree, int):
        return elements[tree]
    if tree not in cache:
        cache[tree] = multiply(_evaluate_tree(tree[0], elements, cache),
                               _evaluate_tree(tree[1], elements, cache))
    return cache[tree]


@dataclass
class BracketingResult:
    distinct_values: list
    class_count_bound: int
    classes: list[list[str]]

    @property
    def count(self) -> int:
        return len(self.distinct_values)


def bracketing_classes(tau, elements, tol: float = GROUP_TOL) -> BracketingResult:
    """Group the trace values of all bracketings of ``a_1 a_2 ... a_n``.

    Values are grouped exactly in exact mode and within ``tol`` otherwise.

    Raises:
        InvalidInputError: unless ``2 <= n <= 7``.
        TraceAxiomError: if more than ``C_{n-2}`` classes appear.
    """
    tau = _trace_of(tau)
    elements = list(elements)
    n = len(elements)
    if not 2 <= n <= 7:
        raise InvalidInputError("bracketing_classes supports 2 <= n <= 7 factors")
    trees = bracketings(0, n)
    cache: dict = {}
    values, classes = [], []
    for tree in trees:
        v = tau(_evaluate_tree(tree, elements, cache))
        for k, w in enumerate(values):
            same = (v == w) if isinstance(v, sc.GaussianRational) and isinstance(
                w, sc.GaussianRational) else abs(complex(v) - complex(w)) <= tol
            if same:
                classes[k].append(bracket_repr(tree))
                break
        else:
            values.append(v)
            classes.append([bracket_repr(tree)])
    bound = catalan(n - 2)
    if len(values) > bound:
        raise TraceAxiomError(f"{len(values)} bracketing classes exceed the bound {bound}")
    return BracketingResult(values, bound, classes)
