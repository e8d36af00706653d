"""Closed-form lower bounds on max_S sigma_min(A_S)^2 / sigma_min(A)^2.

All functions return the factor multiplying ``sigma_min(A)^2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

# radicands this close below zero are treated as zero
RADICAND_CLAMP = 1e-12
BRANCH_AGREEMENT = 1e-12

BRANCH_H1_K_LE_N = "h1(m,n,k)"
BRANCH_H1_K_GE_N = "h1(m,k,n)"
BRANCH_H2_K_LE_N = "h2(m,n,k)"
BRANCH_H2_K_GE_N = "h2(m,k,n)"
BRANCH_DEGENERATE = "degenerate"

BASELINES = ("hong_pan", "hong_pan_n2", "greedy", "xu21", "spielman17")


class DomainError(ValueError):
    pass


def _require(cond: bool, msg: str):
    if not cond:
        raise DomainError(msg)


def h1(m, x2, x3) -> float:
    _require(x3 >= 1, f"h1: x3 = {x3} must be >= 1")
    _require(x2 >= 1, f"h1: x2 = {x2} must be >= 1")
    _require(m > x2, f"h1: denominator (m - x2) = {m - x2} must be positive")
    return 4.0 * (x3 - 1) / x3**2 * (1.0 - (x3 - 1) * (m - x3 + 1) / ((m - x2) * x2))


def h2(m, x2, x3) -> float:
    _require(x3 >= 1, f"h2: x3 = {x3} must be >= 1")
    _require(m > x3, f"h2: denominator (m - x3) = {m - x3} must be positive")
    _require(m > x2, f"h2: denominator (m - x2) = {m - x2} must be positive")
    num = (x2 + 1 - x3) * (m - x2 - 1) * (x2 + x3 + 1 - m)
    return 4.0 * num / ((m - x3) * x3 * (m - x2) ** 2)


def _alpha_from_h(h: float) -> float:
    if h > 1.0 + RADICAND_CLAMP or h < -RADICAND_CLAMP:
        raise DomainError(f"h = {h!r} outside [0, 1]")
    return 0.5 + 0.5 * math.sqrt(max(0.0, 1.0 - h))


def _check_params(m, n, k):
    _require(n >= 1, f"n = {n} must be >= 1")
    _require(1 <= k <= m, f"need 1 <= k <= m, got k={k}, m={m}")
    _require(m >= n, f"need m >= n, got m={m}, n={n}")


def alpha(m: int, n: int, k: int) -> tuple:
    """Sharpening factor and the name of the branch that produced it.

    Below ``m = n + k`` the h2 form is used, from there on the h1 form.  Where
    the rival branch is also defined (``m == n + k``) the two are asserted equal.
    When the term alpha multiplies vanishes (``k = m`` or ``m = n``) the value
    is 1 and the branch is reported as degenerate.
    """
    _check_params(m, n, k)
    if min(k, n) * m - n * k == 0:
        return 1.0, BRANCH_DEGENERATE
    _require(m >= n + 1, f"need m >= n + 1, got m={m}, n={n}")
    small, big = (k, n) if k <= n else (n, k)
    if m >= n + k:
        a = _alpha_from_h(h1(m, big, small))
        branch = BRANCH_H1_K_LE_N if k <= n else BRANCH_H1_K_GE_N
        if m == n + k:
            other = _alpha_from_h(h2(m, big, small))
            if abs(a - other) > BRANCH_AGREEMENT:
                raise ArithmeticError(f"alpha branches disagree at m = n + k: {a!r} vs {other!r}")
    else:
        a = _alpha_from_h(h2(m, big, small))
        branch = BRANCH_H2_K_LE_N if k <= n else BRANCH_H2_K_GE_N
    return a, branch


def bound_with_alpha(m: int, n: int, k: int, a: float) -> float:
    gap = abs(n - k) + 1
    return gap / (a * (min(k, n) * m - n * k) + gap)


def main_bound(m: int, n: int, k: int) -> float:
    """Guaranteed factor ``(|n-k|+1) / (alpha (min(k,n) m - n k) + |n-k|+1)``."""
    return bound_with_alpha(m, n, k, alpha(m, n, k)[0])


def corollary_alpha(m: int, n: int) -> float:
    """alpha for ``k = n``, split at ``m = 2n``."""
    _require(n >= 1 and m >= n + 1, f"need m >= n + 1 >= 2, got m={m}, n={n}")
    if m >= 2 * n:
        h = 4.0 * (n - 1) / n**2 * (1.0 - (n - 1) * (m - n + 1) / ((m - n) * n))
    else:
        h = 4.0 * (m - n - 1) * (2 * n + 1 - m) / ((m - n) ** 3 * n)
    return _alpha_from_h(h)


def corollary_bound(m: int, n: int) -> float:
    """Factor for selecting a basis (k = n) out of a tight frame."""
    return 1.0 / (corollary_alpha(m, n) * n * (m - n) + 1)


def g1(m, x) -> float:
    """Smaller root of ``m(m-1) t^2 - 2x(m-1) t + x(x-1)``."""
    _require(2 <= x <= m - 1, f"g1 needs 2 <= x <= m - 1, got x={x}, m={m}")
    return (x - math.sqrt(x * (m - x) / (m - 1))) / m


def g2(m, x) -> float:
    """Smallest root of the cubic ``m(m-1)(m-2)t^3 - 3x(m-1)(m-2)t^2 + 3x(x-1)(m-2)t - x(x-1)(x-2)``."""
    _require(3 <= x <= m - 1, f"g2 needs 3 <= x <= m - 1, got x={x}, m={m}")
    r = math.sqrt(x * (m - x) / (m - 1))
    arg = (m - 2 * x) / (m - 2) * math.sqrt((m - 1) / (x * (m - x)))
    _require(-1 - 1e-12 <= arg <= 1 + 1e-12, f"g2: arccos argument {arg!r} outside [-1, 1]")
    arg = min(1.0, max(-1.0, arg))
    return x / m + 2.0 / m * r * math.cos(math.acos(arg) / 3 + 2 * math.pi / 3)


def explicit_bound(m: int, n: int, k: int) -> Optional[float]:
    """Exact extreme root of the root-node polynomial when k or n is 2 or 3."""
    x = None
    if k in (2, 3) and n >= k:
        x, which = n, k
    elif n in (2, 3) and k >= n:
        x, which = k, n
    if x is None or x > m - 1:
        return None
    return g1(m, x) if which == 2 else g2(m, x)


def hong_pan(m: int, n: int) -> float:
    return 1.0 / (n * (m - n) + 1)


def hong_pan_n2(m: int) -> float:
    return (2.0 - math.sqrt(2.0) * math.sqrt((m - 2) / (m - 1))) / m


def greedy_bound(m: int, n: int, k: int) -> float:
    return (k - n + 1) / (n * (m - k) + k - n + 1)


def xu21_bound(m: int, n: int, k: int) -> float:
    return (math.sqrt((k + 1) * (m - n)) - math.sqrt(n * (m - k - 1))) ** 2 / m**2


def spielman17_bound(m: int, n: int, k: int) -> float:
    return (1.0 - math.sqrt(k / n)) ** 2 * (n / m)


def baseline_bounds(m: int, n: int, k: int) -> dict:
    """Prior bounds that apply to (m, n, k); inapplicable ones are absent."""
    out = {}
    if k == n and m >= n + 1:
        out["hong_pan"] = hong_pan(m, n)
        if n == 2:
            out["hong_pan_n2"] = hong_pan_n2(m)
    if n <= k <= m - 1:
        out["greedy"] = greedy_bound(m, n, k)
        out["xu21"] = xu21_bound(m, n, k)
    if k < n:
        out["spielman17"] = spielman17_bound(m, n, k)
    return out


@dataclass
class BoundReport:
    m: int
    n: int
    k: int
    alpha: float
    alpha_branch: str
    main_bound: float
    explicit_bound: Optional[float] = None
    baselines: dict = field(default_factory=dict)
    dominates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        return cls(**d)


def compare_report(m: int, n: int, k: int) -> BoundReport:
    _require(m >= n + 1, f"need m >= n + 1, got m={m}, n={n}")
    a, branch = alpha(m, n, k)
    main = bound_with_alpha(m, n, k, a)
    base = baseline_bounds(m, n, k)
    return BoundReport(
        m=m,
        n=n,
        k=k,
        alpha=a,
        alpha_branch=branch,
        main_bound=main,
        explicit_bound=explicit_bound(m, n, k),
        baselines=base,
        dominates={name: main > v for name, v in base.items()},
    )
