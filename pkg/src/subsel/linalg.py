"""Dense real matrix plumbing: rank detection, thin SVD, isotropic frames, sigma_min."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

DEFAULT_RANK_TOL = 1e-10
FRAME_TOL = 1e-8

EXACT = "exact-construction"
SVD = "svd"
RANDOM = "random-orthonormalization"


class ZeroMatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TargetMatrix:
    """A dense real ``n x m`` matrix with its detected numerical rank."""

    entries: np.ndarray
    rank_tolerance: float = DEFAULT_RANK_TOL
    rank: int = -1

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        s = np.linalg.svd(a, compute_uv=False)
        r = int(np.sum(s > self.rank_tolerance * s[0])) if s[0] > 0 else 0
        object.__setattr__(self, "rank", r)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape


def as_target(A) -> TargetMatrix:
    return A if isinstance(A, TargetMatrix) else TargetMatrix(A)


@dataclass(frozen=True, eq=False)
class IsotropicFrame:
    """Columns ``y_1..y_m`` in R^n with ``sum y_j y_j^T = I_n``.

    ``columns`` is the ``n x m`` matrix Y; for exact frames it is an object
    array of ``Fraction``.  ``svd_factors`` holds ``(U, sigma)`` when the frame
    came from a thin SVD ``A = U diag(sigma) Y``.
    """

    columns: np.ndarray
    gram_residual: float
    origin: str
    svd_factors: Optional[tuple] = None

    @property
    def dim(self) -> int:
        return self.columns.shape[0]

    @property
    def count(self) -> int:
        return self.columns.shape[1]

    @property
    def exact(self) -> bool:
        return self.columns.dtype == object


def gram_residual(Y: np.ndarray):
    """max |Y Y^T - I|; exact ``Fraction`` for object arrays."""
    n = Y.shape[0]
    G = Y.dot(Y.T)
    if Y.dtype == object:
        return max(abs(G[i, j] - (1 if i == j else 0)) for i in range(n) for j in range(n))
    return float(np.max(np.abs(G - np.eye(n)))) if n else 0.0


def subset_index(indices: Iterable[int], m: int) -> tuple:
    """Validate a column subset and return it as a sorted tuple."""
    S = tuple(sorted(int(i) for i in indices))
    if len(set(S)) != len(S):
        raise ValueError(f"duplicate column indices in {S}")
    if S and (S[0] < 0 or S[-1] >= m):
        raise ValueError(f"column indices {S} out of range [0, {m})")
    return S


def thin_svd(A) -> tuple:
    """Return ``(U, sigma, frame)`` with ``A = U diag(sigma) Y`` truncated to rank r."""
    A = as_target(A)
    if A.rank == 0:
        raise ZeroMatrixError("zero matrix has no frame")
    U, s, Vt = np.linalg.svd(A.entries, full_matrices=False)
    r = A.rank
    U, s, Y = U[:, :r], s[:r], Vt[:r]
    for a in (U, s, Y):
        a.setflags(write=False)
    return U, s, IsotropicFrame(Y, gram_residual(Y), SVD, (U, s))


def _eig_floor(G: np.ndarray) -> float:
    return max(float(np.linalg.eigvalsh(G)[0]), 0.0)


def sigma_min_sub(A, S, dim: Optional[int] = None) -> float:
    """The ``min(k, dim)``-th largest singular value of the column submatrix A_S.

    ``dim`` defaults to the row count; pass the rank to get the smallest
    singular value in the rank-deficient reading.  Computed from the smallest
    eigenvalue of the smaller Gram matrix.
    """
    a = A.entries if isinstance(A, TargetMatrix) else np.asarray(A, dtype=float)
    n, m = a.shape
    S = subset_index(S, m)
    if not S:
        raise ValueError("empty subset")
    dim = n if dim is None else dim
    k = len(S)
    As = a[:, S]
    if k <= dim:
        if k <= n:
            return float(np.sqrt(_eig_floor(As.T @ As)))
        # k-th singular value of a matrix with only n rows
        return 0.0
    if dim == n:
        return float(np.sqrt(_eig_floor(As @ As.T)))
    s = np.sqrt(np.clip(np.linalg.eigvalsh(As @ As.T)[::-1], 0.0, None))
    return float(s[dim - 1])


def sigma_min(A, dim: Optional[int] = None) -> float:
    """sigma_min of the whole matrix in the same convention as :func:`sigma_min_sub`."""
    A = as_target(A)
    return sigma_min_sub(A, range(A.cols), dim)


def _fraction_solve(M: np.ndarray, B: np.ndarray) -> np.ndarray:
    # Gauss-Jordan over Q; returns M^{-1} B
    n = M.shape[0]
    aug = np.concatenate([M.astype(object), B.astype(object)], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r, col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular over the rationals")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] / aug[col, col]
        for r in range(n):
            if r != col and aug[r, col] != 0:
                aug[r] = aug[r] - aug[r, col] * aug[col]
    return aug[:, n:]


def _fraction_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=object)
    return np.vectorize(Fraction, otypes=[object])(M)


def rational_isotropic_frame(skew, dim: int) -> IsotropicFrame:
    """Exact isotropic frame from the Cayley transform of a rational skew matrix.

    ``Q = (I - K)(I + K)^{-1}`` is orthogonal over Q; its first ``dim`` rows
    have ``Y Y^T = I`` exactly.
    """
    K = _fraction_matrix(skew)
    m = K.shape[0]
    if K.shape != (m, m):
        raise ValueError("skew matrix must be square")
    if not (K == -K.T).all():
        raise ValueError("matrix is not skew-symmetric")
    if not 1 <= dim <= m:
        raise ValueError(f"dim must lie in [1, {m}]")
    eye = _fraction_matrix(np.eye(m, dtype=int))
    try:
        # (I - K)(I + K)^{-1} = (I + K)^{-1}(I - K) since the factors commute
        Q = _fraction_solve(eye + K, eye - K)
    except ZeroDivisionError as exc:
        raise ValueError("I + skew is singular") from exc
    Y = Q[:dim].copy()
    res = gram_residual(Y)
    if res != 0:
        raise ArithmeticError("Cayley frame is not exactly isotropic")
    return IsotropicFrame(Y, res, EXACT)


def random_rational_skew(m: int, seed: int, max_num: int = 3, den: int = 5) -> np.ndarray:
    """Random skew matrix with entries ``p/den``, ``|p| <= max_num``."""
    rng = np.random.default_rng(seed)
    K = _fraction_matrix(np.zeros((m, m), dtype=int))
    for i in range(m):
        for j in range(i + 1, m):
            v = Fraction(int(rng.integers(-max_num, max_num + 1)), den)
            K[i, j] = v
            K[j, i] = -v
    return K


def random_isotropic_frame(n: int, m: int, seed: int) -> IsotropicFrame:
    """Orthonormalize the rows of a seeded Gaussian ``n x m`` matrix."""
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((m, n)))
    Y = np.ascontiguousarray(Q.T)
    Y.setflags(write=False)
    return IsotropicFrame(Y, gram_residual(Y), RANDOM)


def frame_to_float(frame: IsotropicFrame) -> IsotropicFrame:
    """Float copy of an exact frame."""
    Y = np.asarray(frame.columns, dtype=float)
    return IsotropicFrame(Y, gram_residual(Y), frame.origin)
