"""The multiplication algebra of an algebra in its regular birepresentation.

Elements of the enveloping algebra are stored as ``n x n`` matrices acting on
coefficient vectors, optionally with a *word*: a weighted sum of monomials in
left (``L``) and right (``R``) multiplication generators.  The word is what
makes the prime anti-automorphism and the star computable, since neither is
determined by the matrix alone.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from . import scalars as sc
from .algebra import AlgebraSpec, Element
from .errors import (AlgebraFileError, DimensionMismatchError, UnknownSymbolError,
                     UnsupportedOperationError)


# ---------------------------------------------------------------------------
# words

@dataclass(frozen=True, eq=False)
class Factor:
    """A single generator: left or right multiplication by ``element``."""

    kind: str
    element: Element

    def __post_init__(self):
        if self.kind not in ("L", "R"):
            raise UnknownSymbolError(f"generator kind must be 'L' or 'R', got {self.kind!r}")

    def matrix(self) -> np.ndarray:
        A = self.element.algebra
        if self.kind == "L":
            return A.left_matrix(self.element.coeffs)
        return A.right_matrix(self.element.coeffs)

    def key(self):
        return (self.kind, tuple(self.element.coeffs.tolist()))

    def primed(self) -> "Factor":
        return Factor("R" if self.kind == "L" else "L", self.element)

    def starred(self) -> "Factor":
        return Factor(self.kind, self.element.star())

    def __repr__(self):
        A = self.element.algebra
        nz = np.flatnonzero(sc.as_complex(self.element.coeffs))
        if len(nz) == 1 and self.element.coeffs[nz[0]] == 1:
            return f"{self.kind}[{A.labels[nz[0]]}]"
        return f"{self.kind}[{self.element!r}]"


@dataclass(frozen=True)
class Word:
    """Formal sum ``sum_k w_k f_k1 o f_k2 o ...``; the empty monomial is the identity."""

    terms: tuple[tuple[object, tuple[Factor, ...]], ...] = ()

    @staticmethod
    def identity(weight=None) -> "Word":
        return Word(((sc.ONE if weight is None else weight, ()),))

    @staticmethod
    def generator(factor: Factor) -> "Word":
        return Word(((sc.ONE, (factor,)),))

    def _simplify(self) -> "Word":
        merged: dict = {}
        order = []
        for w, mono in self.terms:
            k = tuple(f.key() for f in mono)
            if k in merged:
                merged[k] = (merged[k][0] + w, mono)
            else:
                merged[k] = (w, mono)
                order.append(k)
        return Word(tuple(merged[k] for k in order if merged[k][0] != 0))

    def __add__(self, other: "Word") -> "Word":
        return Word(self.terms + other.terms)._simplify()

    def scaled(self, z) -> "Word":
        return Word(tuple((_mul_weight(w, z), m) for w, m in self.terms))._simplify()

    def compose(self, other: "Word") -> "Word":
        return Word(tuple((_mul_weight(w1, w2), m1 + m2)
                          for w1, m1 in self.terms for w2, m2 in other.terms))._simplify()

    def primed(self) -> "Word":
        return Word(tuple((w, tuple(f.primed() for f in reversed(m)))
                          for w, m in self.terms))

    def starred(self) -> "Word":
        return Word(tuple((np.conj(w), tuple(f.starred() for f in reversed(m)))
                          for w, m in self.terms))

    @property
    def max_length(self) -> int:
        return max((len(m) for _, m in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, m in self.terms:
            body = " o ".join(repr(f) for f in m) or "1"
            parts.append(body if w == 1 else f"({w})*{body}")
        return " + ".join(parts)


def _mul_weight(a, b):
    if isinstance(a, sc.GaussianRational) and not isinstance(b, sc.GaussianRational):
        eb = sc.exact_scalar(b)
        return a * eb if eb is not None else complex(a) * complex(b)
    if isinstance(b, sc.GaussianRational) and not isinstance(a, sc.GaussianRational):
        return _mul_weight(b, a)
    return a * b


def _word_matrix(algebra: AlgebraSpec, word: Word, exact: bool) -> np.ndarray:
    n = algebra.dim
    total = sc.zeros((n, n), exact)
    for w, mono in word.terms:
        m = sc.eye(n, exact)
        for f in mono:
            fm = f.matrix()
            m, fm = sc.unify(m, fm)
            m = m @ fm
        if sc.is_exact(m) and isinstance(w, sc.GaussianRational):
            term = m * w
        else:
            term = sc.as_complex(m) * complex(w)
        total, term = sc.unify(total, term)
        total = total + term
    return total


# ---------------------------------------------------------------------------
# operators

@dataclass(frozen=True, eq=False)
class MultOp:
    """An element of the multiplication algebra acting on ``algebra``.

    Attributes:
        algebra: the algebra acted upon.
        matrix: ``n x n`` matrix with ``matrix @ x.coeffs`` the action on ``x``.
        word: optional generator word reproducing ``matrix``.
        star_matrix: optional matrix of the starred operator, used when there
            is no word (e.g. for exponentials of words).
    """

    algebra: AlgebraSpec
    matrix: np.ndarray
    word: Word | None = None
    star_matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.algebra.exact and not sc.is_exact(self.matrix):
            object.__setattr__(self, "algebra", self.algebra.to_float())
        n = self.algebra.dim
        if self.matrix.shape != (n, n):
            raise DimensionMismatchError(
                f"operator matrix must be {n} x {n}, got {self.matrix.shape}")

    @property
    def exact(self) -> bool:
        return sc.is_exact(self.matrix)

    def _check(self, other: "MultOp"):
        if not isinstance(other, MultOp):
            raise TypeError(f"expected MultOp, got {type(other).__name__}")
        if other.algebra.dim != self.algebra.dim:
            raise DimensionMismatchError("operators act on algebras of different dimension")

    def _star_available(self) -> bool:
        return self.word is not None or self.star_matrix is not None

    def _star(self) -> np.ndarray:
        if self.star_matrix is not None:
            return self.star_matrix
        return star_op(self).matrix

    def __add__(self, other: "MultOp") -> "MultOp":
        self._check(other)
        a, b = sc.unify(self.matrix, other.matrix)
        word = self.word + other.word if self.word is not None and other.word is not None else None
        star = None
        if word is None and self._star_available() and other._star_available():
            star = np.add(*sc.unify(self._star(), other._star()))
        return MultOp(self.algebra, a + b, word, star)

    def __neg__(self) -> "MultOp":
        return self * -1

    def __sub__(self, other: "MultOp") -> "MultOp":
        return self + (-other)

    def __mul__(self, z) -> "MultOp":
        if isinstance(z, MultOp):
            return compose(self, z)
        word = self.word.scaled(z) if self.word is not None else None
        star = None
        if word is None and self.star_matrix is not None:
            star = sc.scale(self.star_matrix, np.conj(z))
        return MultOp(self.algebra, sc.scale(self.matrix, z), word, star)

    __rmul__ = __mul__

    def __matmul__(self, other: "MultOp") -> "MultOp":
        return compose(self, other)

    def __call__(self, x: Element) -> Element:
        return act(self, x)

    def to_float(self) -> "MultOp":
        star = None if self.star_matrix is None else sc.as_complex(self.star_matrix)
        return MultOp(self.algebra.to_float(), sc.as_complex(self.matrix), self.word, star)

    def isclose(self, other: "MultOp", tol: float | None = None) -> bool:
        self._check(other)
        return sc.allclose(self.matrix, other.matrix, tol)

    def __repr__(self):
        tag = repr(self.word) if self.word is not None else "<matrix>"
        return f"MultOp({tag}, dim={self.algebra.dim})"


def _from_word(algebra: AlgebraSpec, word: Word, exact: bool | None = None) -> MultOp:
    if exact is None:
        exact = algebra.exact
    m = _word_matrix(algebra, word, exact)
    alg = algebra if sc.is_exact(m) else algebra.to_float()
    return MultOp(alg, m, word)


def left_op(a: Element) -> MultOp:
    """Left multiplication ``x -> a x``."""
    return MultOp(a.algebra, a.algebra.left_matrix(a.coeffs), Word.generator(Factor("L", a)))


def right_op(a: Element) -> MultOp:
    """Right multiplication ``x -> x a``."""
    return MultOp(a.algebra, a.algebra.right_matrix(a.coeffs), Word.generator(Factor("R", a)))


def identity_op(algebra: AlgebraSpec) -> MultOp:
    return MultOp(algebra, sc.eye(algebra.dim, algebra.exact), Word.identity())


def zero_op(algebra: AlgebraSpec) -> MultOp:
    return MultOp(algebra, sc.zeros((algebra.dim, algebra.dim), algebra.exact), Word())


def as_op(algebra: AlgebraSpec, matrix, star_matrix=None) -> MultOp:
    """Wrap a bare matrix; without ``star_matrix`` it cannot be starred by word."""
    matrix = np.asarray(matrix)
    alg = algebra if sc.is_exact(matrix) else algebra.to_float()
    return MultOp(alg, matrix, None, star_matrix)


def compose(X: MultOp, Y: MultOp) -> MultOp:
    """Composition product ``X o Y`` (apply ``Y`` first)."""
    X._check(Y)
    a, b = sc.unify(X.matrix, Y.matrix)
    m = a @ b
    word = X.word.compose(Y.word) if X.word is not None and Y.word is not None else None
    star = None
    if word is None and X._star_available() and Y._star_available():
        ys, xs = sc.unify(Y._star(), X._star())
        star = ys @ xs
    alg = X.algebra if sc.is_exact(m) else X.algebra.to_float()
    return MultOp(alg, m, word, star)


def commutator_op(X: MultOp, Y: MultOp) -> MultOp:
    """``[X, Y]_o = X o Y - Y o X``."""
    return compose(X, Y) - compose(Y, X)


def anticommutator_op(X: MultOp, Y: MultOp) -> MultOp:
    return compose(X, Y) + compose(Y, X)


def prime_op(X: MultOp) -> MultOp:
    """The anti-automorphism swapping left and right generators.

    Raises:
        UnsupportedOperationError: if ``X`` carries no word.
    """
    if X.word is None:
        raise UnsupportedOperationError("prime_op needs word provenance")
    return _from_word(X.algebra, X.word.primed(), X.exact)


def star_op(X: MultOp, trace=None) -> MultOp:
    """The star of the multiplication algebra.

    Uses the word when present, then a stored star matrix.  As a last resort
    a faithful trace identifies the star with the Gram adjoint
    ``G^-1 X^H G``; otherwise the operation is unsupported.
    """
    if X.word is not None:
        return _from_word(X.algebra, X.word.starred(), X.exact)
    if X.star_matrix is not None:
        alg = X.algebra if sc.is_exact(X.star_matrix) else X.algebra.to_float()
        return MultOp(alg, X.star_matrix, None, X.matrix)
    if trace is not None:
        G = sc.as_complex(trace.gram())
        M = sc.as_complex(X.matrix)
        adj = np.linalg.solve(G, M.conj().T @ G)
        return MultOp(X.algebra.to_float(), adj, None, M)
    raise UnsupportedOperationError("star_op needs word provenance, a star matrix or a trace")


def is_observable(X: MultOp, tol: float | None = None, trace=None) -> bool:
    return sc.allclose(X.matrix, star_op(X, trace).matrix, tol)


def act(X: MultOp, x: Element) -> Element:
    """``X |> x`` as a matrix-vector product."""
    if x.algebra.dim != X.algebra.dim:
        raise DimensionMismatchError("operator and element live on different algebras")
    m, v = sc.unify(X.matrix, x.coeffs)
    out = m @ v
    alg = x.algebra if sc.is_exact(out) else x.algebra.to_float()
    return Element(alg, out)


# ---------------------------------------------------------------------------
# word parsing

_SYMBOL = re.compile(r"^(L|R)(?::?)(.+)$")


def _resolve_element(algebra: AlgebraSpec, ref) -> Element:
    if isinstance(ref, Element):
        return ref
    if isinstance(ref, (int, np.integer)):
        if not 0 <= int(ref) < algebra.dim:
            raise UnknownSymbolError(f"basis index {ref} out of range for dim {algebra.dim}")
        return algebra.basis(int(ref))
    if isinstance(ref, str):
        if ref.isdigit():
            return _resolve_element(algebra, int(ref))
        try:
            return algebra.basis(algebra.index(ref))
        except KeyError:
            raise UnknownSymbolError(f"unknown basis label {ref!r}") from None
    raise UnknownSymbolError(f"cannot interpret {ref!r} as an algebra element")


def _to_factor(algebra: AlgebraSpec | None, sym) -> Factor:
    if isinstance(sym, Factor):
        return sym
    if isinstance(sym, MultOp):
        raise UnknownSymbolError("nested operators are not word symbols")
    if isinstance(sym, str):
        m = _SYMBOL.match(sym.strip())
        if m is None:
            raise UnknownSymbolError(f"unknown word symbol {sym!r}")
        sym = (m.group(1), m.group(2))
    if isinstance(sym, (tuple, list)) and len(sym) == 2:
        kind, ref = sym
        if kind not in ("L", "R"):
            raise UnknownSymbolError(f"unknown generator kind {kind!r}")
        if algebra is None and not isinstance(ref, Element):
            raise UnknownSymbolError("an algebra is needed to resolve index symbols")
        alg = ref.algebra if isinstance(ref, Element) else algebra
        return Factor(kind, _resolve_element(alg, ref))
    raise UnknownSymbolError(f"unknown word symbol {sym!r}")


def evaluate_word(word, algebra: AlgebraSpec | None = None) -> MultOp:
    """Turn a word into an operator, multiplying generator matrices left to right.

    ``word`` is a :class:`Word` or a sequence of symbols, each a
    :class:`Factor`, a pair ``("L", mu)`` / ``("R", label)``, or a string
    such as ``"L3"``, ``"R:e5"``.

    Raises:
        UnknownSymbolError: for symbols that name no generator.
    """
    if isinstance(word, Word):
        if algebra is None:
            algebra = _word_algebra(word)
        return _from_word(algebra, word)
    factors = [_to_factor(algebra, s) for s in word]
    if algebra is None:
        if not factors:
            raise UnknownSymbolError("empty word needs an explicit algebra")
        algebra = factors[0].element.algebra
    w = Word.identity()
    for f in factors:
        w = w.compose(Word.generator(f))
    return _from_word(algebra, w)


def _word_algebra(word: Word) -> AlgebraSpec:
    for _, mono in word.terms:
        if mono:
            return mono[0].element.algebra
    raise UnknownSymbolError("word has no generators; pass the algebra explicitly")


def word_to_json(word: Word) -> list:
    """Serialize as a list of monomials, each a list of factor entries.

    A factor entry is a list of ``{"gen", "index", "weight"}`` terms summing
    to the generating element.  Monomial weights are folded into the first
    factor; the identity monomial is ``[{"gen": "I", "weight": w}]``.
    """
    out = []
    for w, mono in word.terms:
        if not mono:
            out.append([{"gen": "I", "weight": _pair(w)}])
            continue
        entries = []
        for pos, f in enumerate(mono):
            coeffs = f.element.coeffs * w if pos == 0 else f.element.coeffs
            entries.append([{"gen": f.kind, "index": int(mu), "weight": _pair(coeffs[mu])}
                            for mu in np.flatnonzero(sc.as_complex(coeffs))])
        out.append(entries)
    return out


def _pair(z) -> list:
    if isinstance(z, sc.GaussianRational):
        return [int(p) if p.denominator == 1 else str(p) for p in (z.re, z.im)]
    z = complex(z)
    return [z.real, z.imag]


def word_from_json(algebra: AlgebraSpec, data) -> Word:
    """Inverse of :func:`word_to_json`; a bare entry dict is also accepted as a factor."""
    from .algebra import _parse_complex
    exact = algebra.exact
    if not isinstance(data, list):
        raise AlgebraFileError("word must be a JSON list of monomials")
    total = Word()
    for k, mono in enumerate(data):
        if isinstance(mono, dict):
            mono = [mono]
        if not isinstance(mono, list):
            raise AlgebraFileError(f"word[{k}]: monomial must be a list")
        w = Word.identity()
        for j, entry in enumerate(mono):
            where = f"word[{k}][{j}]"
            items = entry if isinstance(entry, list) else [entry]
            if len(items) == 1 and isinstance(items[0], dict) and items[0].get("gen") == "I":
                w = w.scaled(_parse_complex(items[0].get("weight", [1, 0]), exact, where))
                continue
            kinds = {it.get("gen") if isinstance(it, dict) else None for it in items}
            if len(kinds) != 1 or next(iter(kinds)) not in ("L", "R"):
                raise UnknownSymbolError(f"{where}: factor terms need a common gen 'L' or 'R'")
            coeffs = sc.zeros(algebra.dim, exact)
            for it in items:
                idx = it.get("index")
                if not isinstance(idx, int) or not 0 <= idx < algebra.dim:
                    raise UnknownSymbolError(f"{where}: index {idx!r} out of range")
                coeffs[idx] = coeffs[idx] + _parse_complex(it.get("weight", [1, 0]), exact, where)
            w = w.compose(Word.generator(Factor(next(iter(kinds)), algebra.element(coeffs))))
        total = total + w
    return total


# ---------------------------------------------------------------------------
# span closure

@dataclass
class GeneratedSubalgebra:
    """Linearly independent operators spanning the generated subalgebra.

    ``paths[k]`` lists the generator indices whose composition gives
    ``basis[k]`` (an empty path is the identity).
    """

    basis: list[MultOp]
    dim: int
    closed: bool
    generator_count: int = 0
    paths: list[tuple[int, ...]] = field(default_factory=list)
    label: str = ""

    def matrices(self) -> np.ndarray:
        return np.stack([sc.as_complex(b.matrix) for b in self.basis])

    def coordinates(self, X: MultOp) -> np.ndarray:
        """Coefficients of ``X`` in the basis (least squares in float mode)."""
        A = self.matrices().reshape(self.dim, -1).T
        c, *_ = np.linalg.lstsq(A, sc.as_complex(X.matrix).ravel(), rcond=None)
        return c

    def contains(self, X: MultOp, tol: float = 1e-8) -> bool:
        c = self.coordinates(X)
        recon = np.tensordot(c, self.matrices(), axes=(0, 0))
        scale = max(1.0, sc.max_abs(X.matrix))
        return sc.max_abs(recon - sc.as_complex(X.matrix)) <= tol * scale

    def report(self) -> dict:
        return {"label": self.label, "generator_count": self.generator_count,
                "dim": self.dim, "closed": self.closed}


def _split_gaussian(m: np.ndarray):
    """Exact matrix -> (scale, re_int, im_int) with ``m = scale * (re + i im)``."""
    den = 1
    for z in m.ravel():
        if z:
            den = math.lcm(den, int(z.re.denominator), int(z.im.denominator))
    re_ = np.array([[int(z.re * den) for z in row] for row in m], dtype=object)
    im_ = np.array([[int(z.im * den) for z in row] for row in m], dtype=object)
    return sc._q(1) / den, re_, im_


def _primitive_pair(re_: np.ndarray, im_: np.ndarray):
    g = math.gcd(*[int(x) for x in re_.ravel()], *[int(x) for x in im_.ravel()])
    if g > 1:
        return g, re_ // g, im_ // g
    return 1, re_, im_


def span_closure(generators: Sequence[MultOp], include_unit: bool = True,
                 max_length: int | None = None, label: str = "") -> GeneratedSubalgebra:
    """Breadth-first closure of the span of all compositions of ``generators``.

    Each level composes every generator on the left of the elements added by
    the previous level; candidates are ranked by path length and then by the
    lexicographic order of generator indices before the rank test.  The
    search stops when a level adds nothing or the full ``n^2`` is reached.

    Args:
        generators: nonempty list of operators on a common algebra.
        include_unit: seed the span with the identity operator.
        max_length: optional cap on path length; hitting it leaves ``closed``
            False unless the span was already saturated.
        label: name echoed in :meth:`GeneratedSubalgebra.report`.
    """
    generators = list(generators)
    if not generators:
        raise ValueError("span_closure needs at least one generator")
    algebra = generators[0].algebra
    n = algebra.dim
    for g in generators[1:]:
        generators[0]._check(g)
    exact = all(g.exact for g in generators)
    if not exact:
        generators = [g.to_float() for g in generators]
        algebra = algebra.to_float()
    full = n * n

    ech = linalg.echelon(full, exact)
    basis_paths: list[tuple[int, ...]] = []
    # exact: path -> (scale, re, im); float: path -> matrix
    store: dict[tuple[int, ...], object] = {}
    gen_data = []
    for g in generators:
        if exact:
            gen_data.append(_split_gaussian(g.matrix))
        else:
            gen_data.append(sc.as_complex(g.matrix))

    def try_add(path, data) -> bool:
        if exact:
            s, re_, im_ = data
            g, re_, im_ = _primitive_pair(re_, im_)
            data = (s * g, re_, im_)
            ok = ech.add_gaussian(re_.ravel().tolist(), im_.ravel().tolist())
        else:
            ok = ech.add(data.ravel())
        if ok:
            basis_paths.append(path)
            store[path] = data
        return ok

    frontier: list[tuple[int, ...]] = []
    if include_unit:
        if exact:
            data = (sc._q(1), np.array([[int(i == j) for j in range(n)] for i in range(n)],
                                       dtype=object),
                    np.array([[0] * n for _ in range(n)], dtype=object))
        else:
            data = np.eye(n, dtype=complex)
        if try_add((), data):
            frontier.append(())
    for i in sorted(range(len(generators))):
        if ech.rank >= full:
            break
        if try_add((i,), gen_data[i]):
            frontier.append((i,))

    length = 1
    closed = True
    while frontier and ech.rank < full:
        if max_length is not None and length >= max_length:
            closed = False
            break
        candidates = sorted(((i,) + p for p in frontier for i in range(len(generators))),
                            key=lambda path: (len(path), path))
        new_frontier = []
        for path in candidates:
            if ech.rank >= full:
                break
            if path in store:
                continue
            i, rest = path[0], path[1:]
            if exact:
                sg, gre, gim = gen_data[i]
                sb, bre, bim = store[rest]
                data = (sg * sb, gre.dot(bre) - gim.dot(bim), gre.dot(bim) + gim.dot(bre))
            else:
                data = gen_data[i] @ store[rest]
            if try_add(path, data):
                new_frontier.append(path)
        frontier = new_frontier
        length += 1

    basis = []
    for path in basis_paths:
        word = Word.identity()
        for i in path:
            gw = generators[i].word
            word = word.compose(gw) if (word is not None and gw is not None) else None
        if exact:
            s, re_, im_ = store[path]
            m = np.empty((n, n), dtype=object)
            for a in range(n):
                for b in range(n):
                    m[a, b] = sc.GaussianRational(s * re_[a, b], s * im_[a, b])
        else:
            m = store[path]
        op = MultOp(algebra, m, word)
        if word is None:
            op = MultOp(algebra, m, None, _path_star(generators, path))
        basis.append(op)
    return GeneratedSubalgebra(basis, len(basis), closed, len(generators), basis_paths, label)


def _path_star(generators, path):
    """Star of a composition of generators, when every generator can be starred."""
    if not all(g._star_available() for g in generators):
        return None
    n = generators[0].algebra.dim
    m = sc.eye(n, all(g.exact for g in generators))
    for i in path:
        gs = generators[i]._star()
        gs, m = sc.unify(gs, m)
        m = gs @ m
    return m


def basis_ops(algebra: AlgebraSpec, kinds: Iterable[str] = ("L", "R")) -> list[MultOp]:
    """Left and/or right multiplication operators of every basis element."""
    out = []
    for kind in kinds:
        for mu in range(algebra.dim):
            e = algebra.basis(mu)
            out.append(left_op(e) if kind == "L" else right_op(e))
    return out


def multiplication_algebra(algebra: AlgebraSpec, kinds: Iterable[str] = ("L", "R"),
                           label: str = "") -> GeneratedSubalgebra:
    """Span closure of the basis multiplication operators together with the identity."""
    return span_closure(basis_ops(algebra, kinds), include_unit=True,
                        label=label or algebra.label)
