"""Ground-field arithmetic: exact Gaussian rationals and tolerance-based floats.

Exact values live in numpy object arrays of :class:`GaussianRational`; float
values live in ``complex128`` arrays.  Most of the package is written against
plain numpy operators so that both kinds flow through the same code.
"""

from __future__ import annotations

import math
import numbers
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

DEFAULT_TOL = 1e-10

# floats with a denominator above this are treated as inexact
_MAX_EXACT_DENOMINATOR = 2 ** 24


def default_tol() -> float:
    """Float-mode equality tolerance; ``NAQM_TOL`` overrides the default."""
    value = os.environ.get("NAQM_TOL")
    if value is None:
        return DEFAULT_TOL
    return float(value)


def _q(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} exactly")
        return mpq(x)
    if isinstance(x, str):
        f = Fraction(x.strip())
        return mpq(f.numerator, f.denominator)
    if isinstance(x, numbers.Rational):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, np.integer):
        return mpq(int(x))
    if isinstance(x, np.floating):
        return _q(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (complex, np.complexfloating)):
            return cls(float(x.real), float(x.imag))
        return cls(x)

    # arithmetic -------------------------------------------------------

    def _other(self, other):
        if isinstance(other, GaussianRational):
            return other
        try:
            return GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if not o.im and not self.im:
            return GaussianRational(self.re * o.re, 0)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if not d:
            raise ZeroDivisionError("division by zero")
        return GaussianRational((self.re * o.re + self.im * o.im) / d,
                                (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / self ** (-k)
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    @property
    def real(self):
        return GaussianRational(self.re)

    @property
    def imag(self):
        return GaussianRational(self.im)

    # comparisons / conversions ---------------------------------------

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError("complex value has no float conversion")
        return float(self.re)

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "-" if self.im < 0 else "+"
        return f"({self.re}{sign}{abs(self.im)}i)"


I = GaussianRational(0, 1)
ZERO = GaussianRational(0)
ONE = GaussianRational(1)


def is_exact(arr) -> bool:
    return isinstance(arr, np.ndarray) and arr.dtype == object


def exact_scalar(z) -> GaussianRational | None:
    """Exact image of ``z`` or None when ``z`` is an inexact float.

    Floats are admitted only when they are short dyadic rationals such as
    0.5 or 2.0; anything else would smuggle rounding error into exact mode.
    """
    if isinstance(z, GaussianRational):
        return z
    if isinstance(z, (float, complex, np.floating, np.complexfloating)):
        parts = (complex(z).real, complex(z).imag)
        for p in parts:
            if not math.isfinite(p):
                return None
            if Fraction(p).denominator > _MAX_EXACT_DENOMINATOR:
                return None
    return GaussianRational.coerce(z)


_coerce_vec = np.frompyfunc(GaussianRational.coerce, 1, 1)


def exact_array(values) -> np.ndarray:
    """Convert array-like input into an object array of GaussianRationals."""
    if isinstance(values, np.ndarray) and values.dtype != object:
        arr = values.astype(object)
    else:
        arr = np.array(values, dtype=object)
    if arr.ndim == 0:
        return np.array(GaussianRational.coerce(arr.item()), dtype=object)
    return _coerce_vec(arr).astype(object)


def as_complex(arr) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.dtype == object:
        return arr.astype(complex)
    return arr.astype(complex, copy=False)


def zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(ZERO)
        return out
    return np.zeros(shape, dtype=complex)


def eye(n: int, exact: bool) -> np.ndarray:
    out = zeros((n, n), exact)
    for i in range(n):
        out[i, i] = ONE if exact else 1.0
    return out


def conj(arr) -> np.ndarray:
    return np.conj(arr)


def unify(*arrays):
    """Bring arrays to a common mode: exact only if every input is exact."""
    if all(is_exact(a) for a in arrays):
        return arrays
    return tuple(as_complex(a) for a in arrays)


def scale(arr: np.ndarray, z) -> np.ndarray:
    """Multiply ``arr`` by the scalar ``z``, demoting to floats if needed."""
    if is_exact(arr):
        ez = exact_scalar(z)
        if ez is not None:
            return arr * ez
        return as_complex(arr) * complex(z)
    return arr * complex(z)


def max_abs(arr) -> float:
    arr = as_complex(arr)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def residual(a, b) -> float:
    """Worst-case entrywise difference, computed exactly when possible."""
    a, b = unify(np.asarray(a), np.asarray(b))
    return max_abs(a - b)


def is_zero(arr, tol: float | None = None) -> bool:
    """Exact zero test for exact arrays, ``max|x| <= tol`` for floats."""
    arr = np.asarray(arr)
    if is_exact(arr):
        return bool(np.all(arr == 0))
    return max_abs(arr) <= (default_tol() if tol is None else tol)


def allclose(a, b, tol: float | None = None) -> bool:
    a, b = unify(np.asarray(a), np.asarray(b))
    return is_zero(a - b, tol)


@dataclass(frozen=True)
class Scalar:
    """A field value tagged with its comparison mode."""

    value: complex | GaussianRational
    exact: bool = False
    tol: float = DEFAULT_TOL

    def equals(self, other) -> bool:
        other_value = other.value if isinstance(other, Scalar) else other
        if self.exact and (not isinstance(other, Scalar) or other.exact):
            o = exact_scalar(other_value)
            if o is not None:
                return GaussianRational.coerce(self.value) == o
        return abs(complex(self.value) - complex(other_value)) <= self.tol

    def __complex__(self):
        return complex(self.value)
