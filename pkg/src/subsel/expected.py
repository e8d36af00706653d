"""Expected characteristic polynomials of the column-subset interlacing family.

For an isotropic frame Y (n x m) and a subset size k, the leaves are
``p_S(x) = det(x I - Y_S Y_S^T)`` over all ``#S = k``.  A node of the tree is a
partial selection T; its polynomial is the average of ``p_S`` over ``S ⊇ T``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import FRAME_TOL, IsotropicFrame, subset_index
from .poly import (
    FLOAT,
    RATIONAL,
    PolynomialError,
    RealPoly,
    charpoly_gram,
    deflate_power,
    derivative_k,
    from_bernstein,
    multiply_power,
)

BRUTE_FORCE_LIMIT = 10**6


@dataclass(frozen=True)
class FamilyParams:
    m: int
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.k <= self.m:
            raise ValueError(f"need 1 <= k <= m, got k={self.k}, m={self.m}")
        if self.m < self.n:
            raise ValueError(f"need m >= n, got m={self.m}, n={self.n}")


def _seed_poly(m: int, n: int, backend: str) -> RealPoly:
    # (x - 1)^(m - n) * x^n
    base = RealPoly((-1, 1), backend) ** (m - n)
    return multiply_power(base, "x", n)


def f_empty(params: FamilyParams, backend: str = RATIONAL) -> RealPoly:
    """Root-node polynomial: the average of ``p_S`` over all ``#S = k``.

    Evaluates ``(m-k)!/m! (x-1)^{-(m-n-k)} d^k/dx^k [(x-1)^{m-n} x^n]``, which is
    monic of degree n.  The float backend converts the exact result.
    """
    m, n, k = params.m, params.n, params.k
    d = derivative_k(_seed_poly(m, n, RATIONAL), k)
    shift = m - n - k
    if shift > 0:
        try:
            d = deflate_power(d, "x-1", shift)
        except PolynomialError as exc:
            raise ArithmeticError(f"root-node formula violated for {params}") from exc
    elif shift < 0:
        d = multiply_power(d, "x-1", -shift)
    f = d * Fraction(math.factorial(m - k), math.factorial(m))
    if f.degree != n or f.leading != 1:
        raise ArithmeticError(f"root-node polynomial has wrong shape for {params}")
    return f if backend == RATIONAL else f.to_float()


def g_empty(params: FamilyParams, backend: str = RATIONAL) -> RealPoly:
    """``(-1)^k m!/(m-k)! f_empty(x) / x^(n-k)``, a degree-k polynomial (k <= n)."""
    m, n, k = params.m, params.n, params.k
    if k > n:
        raise ValueError("g_empty defined only for k <= n")
    f = f_empty(params, RATIONAL)
    g = deflate_power(f, "x", n - k) * ((-1) ** k * math.perm(m, k))
    return g if backend == RATIONAL else g.to_float()


def g_bernstein_coeffs(params: FamilyParams) -> list:
    """Bernstein coefficients of ``g_empty`` in closed form (exact integers)."""
    m, n, k = params.m, params.n, params.k
    if k > n:
        raise ValueError("g_empty defined only for k <= n")
    out = []
    for i in range(k + 1):
        if i <= min(m - n, k):
            out.append(Fraction((-1) ** i * math.perm(n, k - i) * math.perm(m - n, i)))
        else:
            out.append(Fraction(0))
    return out


def g_empty_bernstein(params: FamilyParams, backend: str = RATIONAL) -> RealPoly:
    """``g_empty`` rebuilt from its closed-form Bernstein coefficients."""
    g = from_bernstein(g_bernstein_coeffs(params), RATIONAL)
    return g if backend == RATIONAL else g.to_float()


@dataclass(frozen=True, eq=False)
class SelectionState:
    """A node of the selection tree: the chosen columns and their Gram matrix."""

    params: FamilyParams
    frame: IsotropicFrame
    chosen: tuple = ()
    gram: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        n = self.frame.dim
        if self.params.n != n or self.params.m != self.frame.count:
            raise ValueError("params do not match frame shape")
        chosen = subset_index(self.chosen, self.params.m)
        if len(chosen) > self.params.k:
            raise ValueError("more columns chosen than k")
        object.__setattr__(self, "chosen", chosen)
        if self.gram is None:
            Y = self.frame.columns[:, list(chosen)]
            G = Y.dot(Y.T)
            if not self.frame.exact:
                G = np.asarray(G, dtype=float).reshape(n, n)
            object.__setattr__(self, "gram", G)

    @classmethod
    def root(cls, frame: IsotropicFrame, k: int) -> "SelectionState":
        return cls(FamilyParams(frame.count, frame.dim, k), frame)

    @property
    def t(self) -> int:
        return len(self.chosen)

    @property
    def backend(self) -> str:
        return RATIONAL if self.frame.exact else FLOAT

    def extend(self, i: int) -> "SelectionState":
        """New state with column ``i`` added; the parent is left untouched."""
        if i in self.chosen:
            raise ValueError(f"column {i} already chosen")
        y = self.frame.columns[:, i]
        G = self.gram + np.outer(y, y)
        return SelectionState(self.params, self.frame, self.chosen + (i,), G)


def _descending_ratio(e: int, top: int, d: int) -> float:
    # prod_{i<d} (e - i) / (top - i), the float-safe form of perm(e, d) / perm(top, d)
    if e < d:
        return 0.0
    r = 1.0
    for i in range(d):
        r *= (e - i) / (top - i)
    return r


def _node_poly_y(state: SelectionState) -> RealPoly:
    # Node average in the variable y = 1 - x, up to a positive factor.
    p = state.params
    m, n, k, t = p.m, p.n, p.k, state.t
    if state.backend == FLOAT and state.frame.gram_residual > FRAME_TOL:
        raise ValueError(f"frame is not isotropic (residual {state.frame.gram_residual:.3g})")
    backend = state.backend
    rest = m - t
    if rest >= n:
        ident = np.eye(n, dtype=int).astype(object) if backend == RATIONAL else np.eye(n)
        q = charpoly_gram(ident - state.gram, backend)
        shift = rest - n
    else:
        # fewer unchosen columns than dimensions: use the small Gram matrix
        comp = [j for j in range(m) if j not in set(state.chosen)]
        Yc = state.frame.columns[:, comp]
        q = charpoly_gram(Yc.T.dot(Yc), backend)
        shift = 0
    d = k - t
    out = [0] * (n + 1)
    for j, c in enumerate(q.coeffs):
        e = j + shift
        if e < d or c == 0:
            continue
        power = e + n - rest
        if power < 0:
            raise ArithmeticError("conditional polynomial has a negative power")
        if backend == RATIONAL:
            out[power] = c * math.perm(e, d)
        else:
            out[power] = c * _descending_ratio(e, rest, d)
    return RealPoly(tuple(out), backend)


def conditional_poly(state: SelectionState) -> RealPoly:
    """Monic average of ``p_S`` over all ``#S = k`` with ``S ⊇ chosen``.

    With W the Gram matrix of the unchosen columns (``I - gram`` by isotropy) and
    ``H(y) = det(y I_{m-t} - Y_c^T Y_c) = y^(m-t-n) det(y I_n - W)``, the node
    average equals, up to a positive factor and the substitution ``y = 1 - x``,
    ``y^(n-m+t) d^(k-t)/dy^(k-t) H(y)``.
    """
    return _node_poly_y(state).reflect().monic()


def conditional_factors(state: SelectionState) -> tuple:
    """Split the node polynomial as ``(x - 1)^ones * core`` with ``core`` monic.

    Every leaf satisfies ``Y_S Y_S^T = I - Y_c Y_c^T`` with only m - k columns in
    Y_c, so eigenvalue 1 has multiplicity at least ``n - (m - k)``.  Exact
    zero coefficients in y = 1 - x are split off, so root finding never sees
    that cluster.
    """
    R = _node_poly_y(state)
    ones = 0
    while R.coeffs[ones] == 0:
        ones += 1
    core = RealPoly(R.coeffs[ones:], R.backend)
    return ones, core.reflect().monic()


# roots closer than this are one multiple root during derivative tracking
MERGE_TOL = 1e-14


def _merge_roots(vals: np.ndarray, mult: np.ndarray) -> tuple:
    vals, mult = vals[mult > 0], mult[mult > 0]
    if vals.size == 0:
        return np.zeros(0), np.zeros(0, dtype=np.int64)
    order = np.argsort(vals, kind="stable")
    vals, mult = vals[order], mult[order]
    starts = np.concatenate([[0], np.flatnonzero(np.diff(vals) > MERGE_TOL) + 1])
    total = np.add.reduceat(mult, starts)
    v = np.add.reduceat(vals * mult, starts) / total
    # exact structural roots at 0 and 1 absorb their clusters unchanged
    v[np.add.reduceat(vals == 1.0, starts) > 0] = 1.0
    v[np.add.reduceat(vals == 0.0, starts) > 0] = 0.0
    return v, total


def _critical_points(r: np.ndarray, mu: np.ndarray) -> tuple:
    """Roots of the derivative of ``prod (y - r_i)^mu_i``, as (distinct, multiplicity).

    Each r_i survives with multiplicity mu_i - 1.  The remaining roots solve
    ``sum mu_i / (y - r_i) = 0``; they are the eigenvalues of ``diag(r)`` compressed
    to the complement of ``sqrt(mu)``, a symmetric problem with no coefficient loss.
    """
    keep = mu > 1
    vals, mult = [r[keep]], [mu[keep] - 1]
    D = len(r)
    if D > 1:
        u = np.sqrt(mu / mu.sum())
        v = u.copy()
        v[0] += 1.0
        # columns 1.. of the Householder reflector mapping u to -e1 span u's complement
        V = np.eye(D)[:, 1:] - np.outer(v, v[1:]) * (2.0 / v.dot(v))
        inner = np.linalg.eigvalsh((V.T * r).dot(V))
        vals.append(np.clip(inner, r[0], r[-1]))
        mult.append(np.ones(D - 1, dtype=np.int64))
    return _merge_roots(np.concatenate(vals), np.concatenate(mult))


def derivative_roots(vals, mult, times: int) -> tuple:
    """Roots of the ``times``-th derivative of ``prod (y - vals_i)^mult_i``."""
    r, mu = _merge_roots(np.asarray(vals, dtype=float), np.asarray(mult, dtype=np.int64))
    for _ in range(times):
        r, mu = _critical_points(r, mu)
    return r, mu


def f_empty_roots(params: FamilyParams) -> np.ndarray:
    """Roots of the root-node polynomial in descending order, by derivative tracking."""
    m, n, k = params.m, params.n, params.k
    r, mu = derivative_roots([0.0, 1.0], [n, m - n], k)
    mu = mu.copy()
    one = np.flatnonzero(r == 1.0)
    shift = m - n - k
    if one.size:
        mu[one[0]] -= shift
    elif shift < 0:
        r, mu = np.append(r, 1.0), np.append(mu, -shift)
    if np.any(mu < 0):
        raise ArithmeticError(f"root-node polynomial lost its roots at one for {params}")
    x = np.repeat(r, mu)
    if x.size != n:
        raise ArithmeticError(f"root-node polynomial has {x.size} roots, expected {n}")
    return np.sort(x)[::-1]


def node_roots(state: SelectionState) -> np.ndarray:
    """Roots of the node polynomial in descending order, computed without coefficients.

    Starts from the eigenvalues of the unchosen-column Gram matrix and applies the
    k - t derivatives to the root multiset directly, so the result stays accurate
    at degrees where monomial coefficients are hopelessly ill-conditioned.
    Float frames only; exact frames go through :func:`conditional_factors`.
    """
    p = state.params
    m, n, k, t = p.m, p.n, p.k, state.t
    if state.backend != FLOAT:
        raise ValueError("node_roots needs a float frame")
    if state.frame.gram_residual > FRAME_TOL:
        raise ValueError(f"frame is not isotropic (residual {state.frame.gram_residual:.3g})")
    rest = m - t
    if rest >= n:
        eig = np.linalg.eigvalsh(np.eye(n) - state.gram)
        zeros = rest - n
    else:
        comp = [j for j in range(m) if j not in set(state.chosen)]
        Yc = state.frame.columns[:, comp]
        eig = np.linalg.eigvalsh(Yc.T.dot(Yc))
        zeros = 0
    eig = np.clip(eig, 0.0, 1.0)
    vals = np.concatenate([eig, np.zeros(1)])
    mult = np.concatenate([np.ones(len(eig), dtype=np.int64), [zeros]])
    r, mu = derivative_roots(vals, mult, k - t)
    # the node polynomial is y^(n - m + k) times the k - t th derivative
    mu = mu.copy()
    z = np.flatnonzero(r == 0.0)
    extra = n - m + k
    if z.size:
        mu[z[0]] += extra
    elif extra > 0:
        r, mu = np.append(r, 0.0), np.append(mu, extra)
    if np.any(mu < 0):
        raise ArithmeticError("node polynomial lost its structural roots at zero")
    y = np.repeat(r, mu)
    if y.size != n:
        raise ArithmeticError(f"node polynomial has {y.size} roots, expected {n}")
    return np.sort(1.0 - y)[::-1]


def brute_force_average(frame: IsotropicFrame, k: int, chosen=()) -> RealPoly:
    """Plain average of ``p_S`` over all size-k completions of ``chosen``."""
    m = frame.count
    chosen = subset_index(chosen, m)
    t = len(chosen)
    if not t <= k <= m:
        raise ValueError("need #chosen <= k <= m")
    count = math.comb(m - t, k - t)
    if count > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{count} completions exceed the brute-force limit {BRUTE_FORCE_LIMIT}")
    backend = RATIONAL if frame.exact else FLOAT
    comp = [j for j in range(m) if j not in set(chosen)]
    total = RealPoly((), backend)
    for extra in itertools.combinations(comp, k - t):
        Ys = frame.columns[:, list(chosen) + list(extra)]
        total = total + charpoly_gram(Ys.dot(Ys.T), backend)
    return total * (Fraction(1, count) if backend == RATIONAL else 1.0 / count)


def knh_identity_check(m: int, n: int, k: int) -> bool:
    """Exact check of ``d^k (x-1)^{m-n} x^n = (m-n)!/(m-k)! x^{n-k} d^n (x-1)^{m-k} x^k``."""
    if not n <= k <= m:
        raise ValueError("need n <= k <= m")
    lhs = derivative_k(_seed_poly(m, n, RATIONAL), k)
    rhs = derivative_k(_seed_poly(m, k, RATIONAL), n)
    try:
        rhs = deflate_power(rhs, "x", k - n)
    except PolynomialError:
        return False
    rhs = rhs * Fraction(math.factorial(m - n), math.factorial(m - k))
    return lhs == rhs
