"""Univariate real polynomials over an exact-rational or a floating-point backend.

Coefficients are stored in ascending degree order.  The rational backend keeps
``fractions.Fraction`` values and is used for exact identities; the float
backend keeps Python floats and is what the selection loop runs on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)

# imaginary parts up to this fraction of (1 + spectral radius) are discarded
REAL_ROOT_TOL = 1e-6


class PolynomialError(ValueError):
    """Raised on invalid polynomial operations (bad divisor, wrong degree, ...)."""


class NotRealRootedError(PolynomialError):
    """Raised when a polynomial expected to be real-rooted has complex roots."""


def _coerce(value, backend):
    if backend == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        raise TypeError(f"rational backend needs exact values, got {type(value).__name__}")
    return float(value)


@dataclass(frozen=True)
class RealPoly:
    """A polynomial ``sum(coeffs[i] * x**i)``.

    Trailing zero coefficients are trimmed on construction, so ``coeffs[-1]``
    is the leading coefficient unless the polynomial is zero (``coeffs == ()``).
    """

    coeffs: tuple
    backend: str = FLOAT

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        cs = [_coerce(c, self.backend) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if self.backend == FLOAT and not all(math.isfinite(c) for c in cs):
            raise PolynomialError("non-finite coefficient")
        object.__setattr__(self, "coeffs", tuple(cs))

    # construction helpers

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, backend: str = FLOAT) -> "RealPoly":
        return cls(tuple(coeffs), backend)

    @classmethod
    def monomial(cls, e: int, backend: str = FLOAT, c=1) -> "RealPoly":
        return cls((0,) * e + (c,), backend)

    @classmethod
    def from_roots(cls, roots: Sequence, backend: str = FLOAT) -> "RealPoly":
        """Monic polynomial with the given roots."""
        p = cls((1,), backend)
        for r in roots:
            p = p * cls((-_coerce(r, backend), 1), backend)
        return p

    # basic properties

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        if self.is_zero:
            raise PolynomialError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"RealPoly({list(self.coeffs)!r}, backend={self.backend!r})"

    # arithmetic

    def _other(self, other) -> "RealPoly":
        if isinstance(other, RealPoly):
            if other.backend != self.backend:
                raise PolynomialError("cannot mix rational and float polynomials")
            return other
        return RealPoly((other,), self.backend)

    def __add__(self, other):
        other = self._other(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        zero = _coerce(0, self.backend)
        return RealPoly(
            tuple((a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)),
            self.backend,
        )

    __radd__ = __add__

    def __neg__(self):
        return RealPoly(tuple(-c for c in self.coeffs), self.backend)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, RealPoly):
            c = _coerce(other, self.backend)
            return RealPoly(tuple(c * a for a in self.coeffs), self.backend)
        other = self._other(other)
        if self.is_zero or other.is_zero:
            return RealPoly((), self.backend)
        out = [_coerce(0, self.backend)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RealPoly(tuple(out), self.backend)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise PolynomialError("negative power")
        out = RealPoly((1,), self.backend)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, RealPoly):
            return NotImplemented
        return self.backend == other.backend and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.backend))

    # conversions

    def to_float(self) -> "RealPoly":
        if self.backend == FLOAT:
            return self
        return RealPoly(tuple(float(c) for c in self.coeffs), FLOAT)

    def monic(self) -> "RealPoly":
        lead = self.leading
        if self.backend == RATIONAL:
            return RealPoly(tuple(c / lead for c in self.coeffs), RATIONAL)
        return RealPoly(tuple(c / lead for c in self.coeffs[:-1]) + (1.0,), FLOAT)

    def compose_linear(self, a, b) -> "RealPoly":
        """Return ``p(a + b*x)`` by exact binomial recombination."""
        a = _coerce(a, self.backend)
        b = _coerce(b, self.backend)
        if self.backend == FLOAT:
            acc = np.zeros(1)
            for c in reversed(self.coeffs):
                acc = np.polynomial.polynomial.polymul(acc, [a, b])
                acc[0] += c
            return RealPoly(tuple(acc.tolist()), FLOAT)
        out = RealPoly((), self.backend)
        lin = RealPoly((a, b), self.backend)
        # Horner in the polynomial ring
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out

    def reflect(self) -> "RealPoly":
        """Return ``p(1 - x)``."""
        return self.compose_linear(1, -1)

    def norm(self) -> float:
        return max((abs(float(c)) for c in self.coeffs), default=0.0)


def _basis(base: str, backend: str) -> RealPoly:
    if base == "x":
        return RealPoly((0, 1), backend)
    if base == "x-1":
        return RealPoly((-1, 1), backend)
    raise ValueError(f"base must be 'x' or 'x-1', got {base!r}")


def derivative_k(p: RealPoly, k: int) -> RealPoly:
    """k-fold formal derivative."""
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    if k == 0:
        return p
    out = []
    for i in range(k, len(p.coeffs)):
        out.append(p.coeffs[i] * math.perm(i, k))
    return RealPoly(tuple(out), p.backend)


def multiply_power(p: RealPoly, base: str, e: int) -> RealPoly:
    """Return ``p * base**e`` with base one of ``'x'``, ``'x-1'``."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    if base == "x":
        return RealPoly((0,) * e + p.coeffs, p.backend) if not p.is_zero else p
    return p * _basis(base, p.backend) ** e


def deflate_power(p: RealPoly, base: str, e: int) -> RealPoly:
    """Divide ``p`` by ``base**e`` where base is ``'x'`` or ``'x-1'``.

    The rational backend demands an exactly zero remainder.  The float backend
    accepts remainder coefficients up to ``1e-9 * max|p_i|`` and drops them.
    """
    _basis(base, p.backend)
    if e < 0:
        raise ValueError("exponent must be non-negative")
    tol = 0 if p.backend == RATIONAL else 1e-9 * p.norm()
    cs = list(p.coeffs)
    residual = 0.0
    if base == "x":
        low = cs[:e]
        residual = max((abs(float(c)) for c in low), default=0.0)
        if any(abs(c) > tol for c in low):
            raise PolynomialError(f"x^{e} does not divide polynomial (residual {residual:.3g})")
        return RealPoly(tuple(cs[e:]), p.backend)
    for step in range(e):
        if len(cs) <= 1:
            if cs and abs(cs[0]) > tol:
                raise PolynomialError(f"(x-1)^{e} does not divide polynomial (residual {abs(float(cs[0])):.3g})")
            cs = []
            continue
        # synthetic division by (x - 1), highest degree first
        q = [cs[-1]]
        for c in reversed(cs[1:-1]):
            q.append(c + q[-1])
        rem = cs[0] + q[-1]
        if abs(rem) > tol:
            raise PolynomialError(
                f"(x-1)^{e} does not divide polynomial (residual {abs(float(rem)):.3g} at step {step})"
            )
        cs = list(reversed(q))
    return RealPoly(tuple(cs), p.backend)


@dataclass(frozen=True)
class RootList:
    """Real roots in descending order, with multiplicity."""

    roots: tuple
    residual_imag: float = 0.0

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]


def _newton_polish(c: np.ndarray, dc: np.ndarray, r: float) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        pr = np.polynomial.polynomial.polyval(r, c)
        dpr = np.polynomial.polynomial.polyval(r, dc)
        if dpr == 0 or not math.isfinite(dpr) or not math.isfinite(pr):
            return r
        cand = r - pr / dpr
        # keep the step only if it does not increase the residual (clusters, multiple roots)
        if abs(np.polynomial.polynomial.polyval(cand, c)) <= abs(pr):
            return float(cand)
    return r


def real_roots(p: RealPoly) -> RootList:
    """All roots of a real-rooted polynomial, descending, with multiplicity.

    Exact zero roots (vanishing low coefficients) are split off first, and for
    the rational backend exact roots at 1 as well.  The rest come from the
    eigenvalues of the companion matrix (LAPACK balances it), followed by one
    guarded Newton step per root.

    Raises
    ------
    NotRealRootedError
        if a discarded imaginary part exceeds ``1e-6 * (1 + max|root|)``.
    """
    if p.is_zero:
        raise PolynomialError("zero polynomial has no roots")
    zeros = 0
    cs = p.coeffs
    while cs[zeros] == 0:
        zeros += 1
    roots: list[float] = [0.0] * zeros
    body = RealPoly(cs[zeros:], p.backend)
    if p.backend == RATIONAL:
        # exact roots at 1 come out before numerics so they are not smeared
        while body.degree > 0 and body(1) == 0:
            body = deflate_power(body, "x-1", 1)
            roots.append(1.0)
    rest = [float(c) for c in body.coeffs]
    residual = 0.0
    if len(rest) > 1:
        c = np.asarray(rest, dtype=float)
        c = c / c[-1]
        if len(c) == 2:
            ev = np.array([-c[0]], dtype=complex)
        else:
            ev = np.linalg.eigvals(np.polynomial.polynomial.polycompanion(c))
        radius = float(np.max(np.abs(ev)))
        residual = float(np.max(np.abs(ev.imag)))
        if residual > REAL_ROOT_TOL * (1.0 + radius):
            raise NotRealRootedError(
                f"polynomial not numerically real-rooted (max |imag| = {residual:.3g})"
            )
        dc = np.polynomial.polynomial.polyder(c)
        roots.extend(_newton_polish(c, dc, float(z.real)) for z in ev)
    roots.sort(reverse=True)
    return RootList(tuple(roots), residual)


def kth_largest_root(p: RealPoly, j: int) -> float:
    """The j-th largest root (1-based), counting multiplicity."""
    if not 1 <= j <= p.degree:
        raise ValueError(f"root index {j} outside [1, {p.degree}]")
    return real_roots(p)[j - 1]


def smallest_root(p: RealPoly) -> float:
    return real_roots(p)[-1]


def _charpoly_rational(M: np.ndarray) -> RealPoly:
    # Faddeev-LeVerrier; the divisions by k are exact over Q
    n = M.shape[0]
    ident = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = ident * Fraction(0)
    for k in range(1, n + 1):
        Mk = M.dot(Mk) + coeffs[n - k + 1] * ident
        AM = M.dot(Mk)
        coeffs[n - k] = -sum(AM[i, i] for i in range(n)) / k
    return RealPoly(tuple(coeffs), RATIONAL)


def charpoly_gram(M, backend: str = FLOAT) -> RealPoly:
    """Monic characteristic polynomial ``det(x I - M)`` of a symmetric matrix."""
    if backend == RATIONAL:
        M = np.asarray(M, dtype=object)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("matrix must be square")
        if M.shape[0] == 0:
            return RealPoly((1,), RATIONAL)
        M = np.vectorize(Fraction, otypes=[object])(M)
        if not (M == M.T).all():
            raise ValueError("matrix is not exactly symmetric")
        return _charpoly_rational(M)
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if M.shape[0] == 0:
        return RealPoly((1.0,), FLOAT)
    asym = float(np.max(np.abs(M - M.T)))
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(M)))):
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    eig = np.linalg.eigvalsh((M + M.T) / 2)
    return RealPoly(tuple(np.poly(eig)[::-1].tolist()), FLOAT)


def bernstein_coeffs(p: RealPoly, k: int) -> list:
    """Coefficients ``c_i`` with ``p = sum c_i * C(k,i) x^i (1-x)^(k-i)``."""
    if p.degree > k:
        raise PolynomialError(f"degree {p.degree} exceeds Bernstein order {k}")
    a = list(p.coeffs) + [_coerce(0, p.backend)] * (k + 1 - len(p.coeffs))
    out = []
    for i in range(k + 1):
        if p.backend == RATIONAL:
            out.append(sum(Fraction(math.comb(i, j), math.comb(k, j)) * a[j] for j in range(i + 1)))
        else:
            out.append(sum(math.comb(i, j) / math.comb(k, j) * a[j] for j in range(i + 1)))
    return out


def from_bernstein(c: Sequence, backend: str = FLOAT) -> RealPoly:
    """Monomial form of ``sum c_i B_{k,i}`` with ``k = len(c) - 1``."""
    k = len(c) - 1
    x = RealPoly((0, 1), backend)
    one_minus_x = RealPoly((1, -1), backend)
    out = RealPoly((), backend)
    for i, ci in enumerate(c):
        out = out + (x ** i) * (one_minus_x ** (k - i)) * (math.comb(k, i) * _coerce(ci, backend))
    return out
