"""Column selection engines and certificate checking."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

from . import bounds
from .expected import FamilyParams, SelectionState, conditional_factors, f_empty_roots, node_roots
from .linalg import as_target, sigma_min, sigma_min_sub, subset_index, thin_svd
from .poly import FLOAT, PolynomialError, RealPoly, deflate_power, real_roots

DEFAULT_EPSILON = 1e-10
CERT_SLACK = 1e-9
BRUTE_FORCE_LIMIT = 10**6
THREADS_ENV = "SUBSEL_THREADS"


class SelectionError(RuntimeError):
    """A node of the selection tree could not be evaluated."""


@dataclass
class SelectionResult:
    subset: tuple
    sigma_min_sq: float
    root_certificate: float
    bound_certificate: float
    epsilon: float
    trace: list = field(default_factory=list)
    sigma_min_a_sq: float = 0.0
    main_bound: float = 0.0
    alpha: float = 1.0
    alpha_branch: str = ""
    rank: int = 0
    method: str = "interlacing"

    @property
    def k(self) -> int:
        return len(self.subset)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["subset"] = list(self.subset)
        d["trace"] = [list(step) for step in self.trace]
        return d


def decision_root(ones: int, core: RealPoly, n: int, k: int) -> float:
    """Root compared during descent: r_k for k < n, the smallest root otherwise.

    The node polynomial is ``(x - 1)^ones * core``.  For k < n every leaf has
    ``x^(n-k)`` as a factor, which is divided out of ``core`` first.
    """
    if k < n:
        core = deflate_power(core, "x", n - k)
    if core.degree < 1:
        return 1.0 if ones else math.nan
    low = real_roots(core)[-1]
    return min(low, 1.0) if ones else low


def node_decision_root(state: SelectionState, method: str = "roots") -> float:
    """Decision root of a node.

    ``"roots"`` tracks the root multiset through the derivatives (float frames);
    ``"coeffs"`` builds the node polynomial and runs the companion-matrix solver.
    Exact frames always use the coefficient route, where deflation is exact.
    """
    p = state.params
    if method == "roots" and state.backend == FLOAT:
        return float(node_roots(state)[min(p.k, p.n) - 1])
    if method not in ("roots", "coeffs"):
        raise ValueError(f"unknown method {method!r}")
    ones, core = conditional_factors(state)
    return float(decision_root(ones, core, p.n, p.k))


@lru_cache(maxsize=256)
def root_node_certificate(m: int, n: int, k: int) -> float:
    """Decision root of the root-node polynomial: r_k for k < n, else the smallest root."""
    return float(f_empty_roots(FamilyParams(m, n, k))[min(k, n) - 1])


def _threads(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, threads)


def _bound_fields(m: int, r: int, k: int) -> tuple:
    a, branch = bounds.alpha(m, r, k)
    return a, branch, bounds.bound_with_alpha(m, r, k, a)


def select_interlacing(
    A, k: int, epsilon: float = DEFAULT_EPSILON, threads: Optional[int] = None, method: str = "roots"
) -> SelectionResult:
    """Greedy descent of the interlacing family of ``det(x I - Y_S Y_S^T)``.

    A is reduced to its isotropic frame Y (rank r rows).  Each of the k steps
    scores every unchosen column by the decision root of the child node and
    keeps the lowest index whose root is within a relative ``epsilon`` of the
    best, so the final leaf's root is at least ``(1 - k*epsilon)`` times the
    root node's.
    """
    A = as_target(A)
    m = A.cols
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m = {m}, got k = {k}")
    if not 0 < epsilon < 1 / k:
        raise ValueError(f"epsilon must lie in (0, 1/k), got {epsilon}")
    _, s, frame = thin_svd(A)
    r = frame.dim
    state = SelectionState.root(frame, k)
    trace = []

    def score(i):
        try:
            return node_decision_root(state.extend(i), method)
        except (PolynomialError, ArithmeticError) as exc:
            raise SelectionError(f"node {state.chosen + (i,)} failed: {exc}") from exc

    workers = _threads(threads)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for _ in range(k):
            cands = [i for i in range(m) if i not in state.chosen]
            roots = list(pool.map(score, cands)) if pool else [score(i) for i in cands]
            best = max(roots)
            cut = best * (1 - epsilon) if best > 0 else best
            pick = min(i for i, root in zip(cands, roots) if root >= cut)
            trace.append((pick, roots[cands.index(pick)]))
            state = state.extend(pick)
    finally:
        if pool:
            pool.shutdown()

    subset = state.chosen
    a, branch, mb = _bound_fields(m, r, k)
    smin_a_sq = float(s[-1]) ** 2
    return SelectionResult(
        subset=subset,
        sigma_min_sq=sigma_min_sub(A, subset, r) ** 2,
        root_certificate=root_node_certificate(m, r, k),
        bound_certificate=mb * smin_a_sq,
        epsilon=epsilon,
        trace=trace,
        sigma_min_a_sq=smin_a_sq,
        main_bound=mb,
        alpha=a,
        alpha_branch=branch,
        rank=r,
        method="interlacing",
    )


def select_brute_force(A, k: int) -> SelectionResult:
    """Exhaustive argmax of sigma_min(A_S); ties go to the lexicographically first S."""
    A = as_target(A)
    m = A.cols
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m = {m}, got k = {k}")
    total = math.comb(m, k)
    if total > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{total} subsets exceed the brute-force limit {BRUTE_FORCE_LIMIT}")
    r = A.rank
    if r == 0:
        raise ValueError("zero matrix")
    best, best_val = None, -1.0
    for S in itertools.combinations(range(m), k):
        v = sigma_min_sub(A, S, r)
        if v > best_val:
            best, best_val = S, v
    smin_a_sq = sigma_min(A, r) ** 2
    a, branch, mb = _bound_fields(m, r, k)
    return SelectionResult(
        subset=best,
        sigma_min_sq=best_val**2,
        root_certificate=root_node_certificate(m, r, k),
        bound_certificate=mb * smin_a_sq,
        epsilon=0.0,
        sigma_min_a_sq=smin_a_sq,
        main_bound=mb,
        alpha=a,
        alpha_branch=branch,
        rank=r,
        method="brute-force",
    )


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: float


@dataclass
class Verdict:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def lines(self) -> list:
        return [
            f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.17g} vs {c.threshold:.17g}"
            for c in self.checks
        ]


def verify_certificate(A, result: SelectionResult, slack: float = CERT_SLACK) -> Verdict:
    """Recompute everything a selection claims and check it from scratch.

    Checks the bound guarantee ``sigma_min(A_S)^2 >= (1 - k eps) bound sigma_min(A)^2``,
    the tighter root certificate, and that the reported sigma_min^2 matches.
    """
    A = as_target(A)
    m = A.cols
    checks = []
    try:
        subset = subset_index(result.subset, m)
        ok = len(subset) == len(result.subset) and len(subset) >= 1
    except ValueError:
        ok, subset = False, ()
    checks.append(Check("subset valid", ok, float(len(subset)), float(len(result.subset))))
    if not ok:
        return Verdict(checks)
    k = len(subset)
    r = A.rank
    smin_sq = sigma_min_sub(A, subset, r) ** 2
    smin_a_sq = sigma_min(A, r) ** 2
    factor = bounds.main_bound(m, r, k)
    eps = float(result.epsilon)
    need = (1 - k * eps) * factor * smin_a_sq
    checks.append(Check("bound guarantee", smin_sq >= need - slack, smin_sq, need))
    root = root_node_certificate(m, r, k)
    ratio = smin_sq / smin_a_sq
    checks.append(Check("root certificate", ratio >= root - slack, ratio, root))
    tol = 1e-9 * max(1.0, smin_sq)
    checks.append(
        Check("reported sigma_min^2", abs(result.sigma_min_sq - smin_sq) <= tol, result.sigma_min_sq, smin_sq)
    )
    return Verdict(checks)
