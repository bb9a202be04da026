"""Finite-dimensional unital *-algebras given by structure constants."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import scalars as sc
from .errors import AlgebraFileError, DimensionMismatchError


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """Structure constants ``c[mu, nu, rho]`` with ``e_mu e_nu = sum_rho c e_rho``.

    ``star_map[mu, nu]`` gives ``(e_mu)* = sum_nu S[mu, nu] e_nu``, extended
    antilinearly.  The unit is a coefficient vector; ``unit_index`` is set
    when the unit happens to be a basis element.
    """

    structure_constants: np.ndarray
    star_map: np.ndarray
    unit: np.ndarray
    unit_index: int | None = 0
    labels: tuple[str, ...] = ()
    label: str = ""
    trace: np.ndarray | None = None
    # underlying associative matrices of each basis element, when there are any
    matrix_basis: np.ndarray | None = None
    kind: str = "generic"

    def __post_init__(self):
        c = self.structure_constants
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise DimensionMismatchError(f"structure constants must be n x n x n, got {c.shape}")
        n = c.shape[0]
        if self.star_map.shape != (n, n):
            raise DimensionMismatchError(f"star map must be {n} x {n}")
        if self.unit.shape != (n,):
            raise DimensionMismatchError(f"unit vector must have length {n}")
        if self.trace is not None and self.trace.shape != (n,):
            raise DimensionMismatchError(f"trace covector must have length {n}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(n)))
        elif len(self.labels) != n:
            raise DimensionMismatchError("one label per basis element required")

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    @property
    def exact(self) -> bool:
        return sc.is_exact(self.structure_constants)

    # elements -------------------------------------------------------------

    def element(self, coeffs) -> "Element":
        coeffs = np.asarray(coeffs)
        if self.exact and not sc.is_exact(coeffs):
            if coeffs.dtype.kind in "iub":
                coeffs = sc.exact_array(coeffs)
            elif coeffs.dtype.kind in "fc" and all(
                    sc.exact_scalar(z) is not None for z in coeffs.ravel()):
                coeffs = sc.exact_array(coeffs)
        if not sc.is_exact(coeffs):
            return Element(self.to_float(), sc.as_complex(coeffs))
        return Element(self, coeffs)

    def basis(self, mu: int) -> "Element":
        v = sc.zeros(self.dim, self.exact)
        v[mu] = sc.ONE if self.exact else 1.0
        return Element(self, v)

    def one(self) -> "Element":
        return Element(self, self.unit.copy())

    def zero(self) -> "Element":
        return Element(self, sc.zeros(self.dim, self.exact))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    # operator matrices -----------------------------------------------------

    @cached_property
    def left_matrices(self) -> np.ndarray:
        """``L[mu]`` with ``L[mu] @ x`` the coefficients of ``e_mu x``."""
        return np.ascontiguousarray(np.transpose(self.structure_constants, (0, 2, 1)))

    @cached_property
    def right_matrices(self) -> np.ndarray:
        """``R[mu]`` with ``R[mu] @ x`` the coefficients of ``x e_mu``."""
        return np.ascontiguousarray(np.transpose(self.structure_constants, (1, 2, 0)))

    def left_matrix(self, coeffs) -> np.ndarray:
        coeffs, L = sc.unify(np.asarray(coeffs), self.left_matrices)
        return np.tensordot(coeffs, L, axes=(0, 0))

    def right_matrix(self, coeffs) -> np.ndarray:
        coeffs, R = sc.unify(np.asarray(coeffs), self.right_matrices)
        return np.tensordot(coeffs, R, axes=(0, 0))

    def star_coeffs(self, coeffs) -> np.ndarray:
        coeffs, S = sc.unify(np.asarray(coeffs), self.star_map)
        return S.T @ np.conj(coeffs)

    # conversions -----------------------------------------------------------

    def to_float(self) -> "AlgebraSpec":
        if not self.exact:
            return self
        return self._float_twin

    @cached_property
    def _float_twin(self) -> "AlgebraSpec":
        return AlgebraSpec(
            structure_constants=sc.as_complex(self.structure_constants),
            star_map=sc.as_complex(self.star_map),
            unit=sc.as_complex(self.unit),
            unit_index=self.unit_index,
            labels=self.labels,
            label=self.label,
            trace=None if self.trace is None else sc.as_complex(self.trace),
            matrix_basis=None if self.matrix_basis is None else sc.as_complex(self.matrix_basis),
            kind=self.kind,
        )

    def matrix_of(self, a: "Element") -> np.ndarray:
        """Underlying associative matrix of ``a`` (matrix instances only)."""
        if self.matrix_basis is None:
            raise ValueError(f"algebra {self.label!r} has no underlying matrix realisation")
        coeffs, mb = sc.unify(a.coeffs, self.matrix_basis)
        return np.tensordot(coeffs, mb, axes=(0, 0))

    def from_matrix(self, m) -> "Element":
        """Inverse of :meth:`matrix_of` by least squares on the matrix basis."""
        if self.matrix_basis is None:
            raise ValueError(f"algebra {self.label!r} has no underlying matrix realisation")
        mb = sc.as_complex(self.matrix_basis).reshape(self.dim, -1).T
        coeffs, *_ = np.linalg.lstsq(mb, sc.as_complex(m).ravel(), rcond=None)
        return Element(self.to_float() if self.exact else self, coeffs)

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"AlgebraSpec({self.label!r}, dim={self.dim}, {mode})"


@dataclass(frozen=True, eq=False)
class Element:
    """A coefficient vector over the algebra's basis."""

    algebra: AlgebraSpec
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.algebra.dim,):
            raise DimensionMismatchError(
                f"element has {self.coeffs.shape} coefficients, algebra dim is {self.algebra.dim}")

    @property
    def exact(self) -> bool:
        return sc.is_exact(self.coeffs)

    def _check(self, other: "Element"):
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.algebra is not self.algebra and (
                other.algebra.dim != self.algebra.dim
                or other.algebra.label != self.algebra.label):
            raise DimensionMismatchError("elements belong to different algebras")

    def _wrap(self, coeffs) -> "Element":
        algebra = self.algebra
        if algebra.exact and not sc.is_exact(coeffs):
            algebra = algebra.to_float()
        return Element(algebra, coeffs)

    def __add__(self, other):
        self._check(other)
        a, b = sc.unify(self.coeffs, other.coeffs)
        return self._wrap(a + b)

    def __sub__(self, other):
        self._check(other)
        a, b = sc.unify(self.coeffs, other.coeffs)
        return self._wrap(a - b)

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        return self._wrap(sc.scale(self.coeffs, other))

    def __rmul__(self, other):
        return self._wrap(sc.scale(self.coeffs, other))

    def __truediv__(self, z):
        if sc.is_exact(self.coeffs):
            ez = sc.exact_scalar(z)
            if ez is not None:
                return self._wrap(self.coeffs * (sc.ONE / ez))
        return self._wrap(sc.as_complex(self.coeffs) / complex(z))

    def star(self) -> "Element":
        return star(self)

    def to_float(self) -> "Element":
        return Element(self.algebra.to_float(), sc.as_complex(self.coeffs))

    def isclose(self, other: "Element", tol: float | None = None) -> bool:
        self._check(other)
        return sc.allclose(self.coeffs, other.coeffs, tol)

    def __eq__(self, other):
        if not isinstance(other, Element) or other.algebra.dim != self.algebra.dim:
            return NotImplemented
        a, b = sc.unify(self.coeffs, other.coeffs)
        return bool(all(x == y for x, y in zip(a, b)))

    __hash__ = None

    def __getitem__(self, mu):
        return self.coeffs[mu]

    def __repr__(self):
        terms = []
        for c, name in zip(self.coeffs, self.algebra.labels):
            if c != 0:
                terms.append(f"{c}*{name}")
        return " + ".join(terms) if terms else "0"


def multiply(a: Element, b: Element) -> Element:
    """Bilinear product ``sum c[mu,nu,:] a_mu b_nu``; no associativity assumed."""
    a._check(b)
    x, y, c = sc.unify(a.coeffs, b.coeffs, a.algebra.structure_constants)
    out = y @ np.tensordot(x, c, axes=(0, 0))
    return a._wrap(out)


def star(a: Element) -> Element:
    return a._wrap(a.algebra.star_coeffs(a.coeffs))


def associator(a: Element, b: Element, c: Element) -> Element:
    """``(a b) c - a (b c)``."""
    return multiply(multiply(a, b), c) - multiply(a, multiply(b, c))


def commutator(a: Element, b: Element) -> Element:
    return multiply(a, b) - multiply(b, a)


def jacobiator(a: Element, b: Element, c: Element) -> Element:
    return (commutator(a, commutator(b, c)) + commutator(c, commutator(a, b))
            + commutator(b, commutator(c, a)))


# ---------------------------------------------------------------------------
# axiom checks

@dataclass
class AxiomCheck:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class AxiomReport:
    """Per-axiom verdicts with worst-case residuals; never raises."""

    subject: str
    checks: list[AxiomCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def add(self, name: str, diff, tol: float, detail: str = ""):
        diff = np.asarray(diff)
        res = sc.max_abs(diff)
        ok = sc.is_zero(diff, tol)
        self.checks.append(AxiomCheck(name, ok, res, detail))

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "residual": c.residual,
                        **({"detail": c.detail} if c.detail else {})}
                       for c in self.checks],
        }


def check_algebra_axioms(A: AlgebraSpec, tol: float | None = None) -> AxiomReport:
    """Unitality, star involution and the star antihomomorphism on basis pairs."""
    tol = sc.default_tol() if tol is None else tol
    report = AxiomReport(A.label or "algebra")
    n = A.dim
    c, S, u = A.structure_constants, A.star_map, A.unit
    ident = sc.eye(n, A.exact)
    try:
        report.add("unit_left", A.left_matrix(u) - ident, tol)
        report.add("unit_right", A.right_matrix(u) - ident, tol)
        report.add("star_involutive", np.conj(S) @ S - ident, tol)
        report.add("star_unit", A.star_coeffs(u) - u, tol)
        lhs = np.einsum("mnr,rs->mns", np.conj(c), S)
        rhs = np.einsum("na,mb,abr->mnr", S, S, c)
        report.add("star_antihomomorphism", lhs - rhs, tol)
    except Exception as exc:  # malformed input still yields a report
        report.checks.append(AxiomCheck("evaluation", False, float("inf"), repr(exc)))
    return report


# ---------------------------------------------------------------------------
# JSON algebra files

def _parse_number(x, exact: bool, where: str):
    try:
        if exact:
            return sc.GaussianRational.coerce(x)
        if isinstance(x, str):
            return float(sc.GaussianRational.coerce(x))
        return x
    except (TypeError, ValueError) as exc:
        raise AlgebraFileError(f"{where}: bad number {x!r} ({exc})") from None


def _parse_complex(pair, exact: bool, where: str):
    if isinstance(pair, (int, float, str)):
        pair = [pair, 0]
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise AlgebraFileError(f"{where}: expected [re, im], got {pair!r}")
    re = _parse_number(pair[0], exact, where)
    im = _parse_number(pair[1], exact, where)
    if exact:
        return re + im * sc.I
    return complex(re, im)


def _parse_vector(raw, n: int, exact: bool, where: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != n:
        raise AlgebraFileError(f"{where}: expected {n} [re, im] entries")
    vals = [_parse_complex(p, exact, f"{where}[{i}]") for i, p in enumerate(raw)]
    return sc.exact_array(vals) if exact else np.array(vals, dtype=complex)


def algebra_from_dict(d: dict, exact: bool = True) -> AlgebraSpec:
    """Build an AlgebraSpec from the sparse-triplet JSON layout."""
    if not isinstance(d, dict):
        raise AlgebraFileError("algebra file must hold a JSON object")
    try:
        n = int(d["dim"])
    except (KeyError, TypeError, ValueError):
        raise AlgebraFileError("missing or invalid 'dim'") from None
    if n < 1:
        raise AlgebraFileError("'dim' must be positive")
    c = sc.zeros((n, n, n), exact)
    for k, entry in enumerate(d.get("structure_constants", [])):
        where = f"structure_constants[{k}]"
        if not isinstance(entry, list) or len(entry) != 5:
            raise AlgebraFileError(f"{where}: expected [mu, nu, rho, re, im], got {entry!r}")
        try:
            mu, nu, rho = (int(v) for v in entry[:3])
        except (TypeError, ValueError):
            raise AlgebraFileError(f"{where}: indices must be integers") from None
        if not all(0 <= i < n for i in (mu, nu, rho)):
            raise AlgebraFileError(f"{where}: index out of range for dim {n}")
        c[mu, nu, rho] = c[mu, nu, rho] + _parse_complex(entry[3:], exact, where)

    star_raw = d.get("star", {})
    if isinstance(star_raw, dict) and "matrix" in star_raw:
        m = star_raw["matrix"]
        if isinstance(m, list) and len(m) == n and all(
                isinstance(r, list) and len(r) == n and all(isinstance(p, list) for p in r)
                for r in m):
            flat = [p for row in m for p in row]
        else:
            flat = m
        S = _parse_vector(flat, n * n, exact, "star.matrix").reshape(n, n)
    elif isinstance(star_raw, dict) and "diagonal" in star_raw:
        diag = _parse_vector(star_raw["diagonal"], n, exact, "star.diagonal")
        S = sc.zeros((n, n), exact)
        for i in range(n):
            S[i, i] = diag[i]
    else:
        raise AlgebraFileError("missing 'star' with 'matrix' entry")

    unit_index = d.get("unit_index", 0)
    if "unit" in d:
        unit = _parse_vector(d["unit"], n, exact, "unit")
        unit_index = d.get("unit_index")
    else:
        if not isinstance(unit_index, int) or not 0 <= unit_index < n:
            raise AlgebraFileError(f"unit_index must be an integer in [0, {n})")
        unit = sc.zeros(n, exact)
        unit[unit_index] = sc.ONE if exact else 1.0

    trace = _parse_vector(d["trace"], n, exact, "trace") if "trace" in d else None
    labels = tuple(d.get("labels", ()))
    if labels and len(labels) != n:
        raise AlgebraFileError(f"'labels' must have {n} entries")
    return AlgebraSpec(c, S, unit, unit_index, labels, str(d.get("label", "")), trace)


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _exact_pair(z) -> list:
    z = sc.GaussianRational.coerce(z)
    out = []
    for part in (z.re, z.im):
        out.append(int(part) if part.denominator == 1 else str(part))
    return out


def algebra_to_dict(A: AlgebraSpec) -> dict:
    pair = _exact_pair if A.exact else _pair
    c = A.structure_constants
    triplets = []
    for mu, nu, rho in zip(*np.nonzero(c != 0)):
        triplets.append([int(mu), int(nu), int(rho), *pair(c[mu, nu, rho])])
    out = {
        "dim": A.dim,
        "label": A.label,
        "labels": list(A.labels),
        "structure_constants": triplets,
        "star": {"matrix": [pair(z) for z in A.star_map.ravel()]},
    }
    if A.unit_index is not None:
        out["unit_index"] = A.unit_index
    else:
        out["unit"] = [pair(z) for z in A.unit]
    if A.trace is not None:
        out["trace"] = [pair(z) for z in A.trace]
    return out


def load_algebra(path: str | Path, exact: bool = True) -> AlgebraSpec:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno - 1 < len(text.splitlines()) else ""
        raise AlgebraFileError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from None
    try:
        return algebra_from_dict(data, exact=exact)
    except AlgebraFileError as exc:
        raise AlgebraFileError(f"{path}: {exc}") from None


def save_algebra(A: AlgebraSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(algebra_to_dict(A), indent=1, sort_keys=True) + "\n")


def elements_from(A: AlgebraSpec, rows: Sequence) -> list[Element]:
    return [A.element(r) for r in rows]
