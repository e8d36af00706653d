"""Acceptance suite: one test (and one printed PASS/FAIL line) per criterion.

Criteria 8 and 9 bundle several claims; each claim is its own test so that a
failing claim does not hide the others.  Every check runs at its stated
tolerance.  Three claims fail here by mathematics rather than by bug; the
failure messages carry the counterexamples.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from subsel.bounds import (
    alpha,
    corollary_alpha,
    g1,
    g2,
    greedy_bound,
    hong_pan,
    main_bound,
    spielman17_bound,
    xu21_bound,
)
from subsel.cli import main as cli_main
from subsel.expected import (
    FamilyParams,
    SelectionState,
    brute_force_average,
    conditional_poly,
    f_empty,
    g_empty,
    knh_identity_check,
)
from subsel.formats import format_csv_matrix
from subsel.linalg import (
    random_isotropic_frame,
    random_rational_skew,
    rational_isotropic_frame,
    sigma_min,
)
from subsel.poly import FLOAT, RATIONAL, RealPoly, real_roots
from subsel.selector import select_brute_force, select_interlacing

EPS = 1e-10
SLACK = 1e-9
GRID_M = 60


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[acceptance] {label}: {'PASS' if ok else 'FAIL'}{' ' + detail if detail else ''}")
        return ok

    return emit


def _state(frame, k, chosen):
    st = SelectionState.root(frame, k)
    for i in chosen:
        st = st.extend(i)
    return st


def test_criterion_01_knh_identity(report):
    t0 = time.perf_counter()
    bad = [(m, n, k) for m in range(1, 13) for n in range(1, m + 1) for k in range(n, m + 1)
           if not knh_identity_check(m, n, k)]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    report("1 derivative identity, m <= 12", ok, f"failures={bad[:3]} time={dt:.1f}s")
    assert ok


def test_criterion_02_root_node_formula(report):
    t0 = time.perf_counter()
    worst, exact_bad = 0.0, []
    rng = np.random.default_rng(2)
    for i in range(10):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(n, 9))
        frame = random_isotropic_frame(n, m, 1000 + i)
        for k in range(1, m + 1):
            avg = brute_force_average(frame, k)
            f = f_empty(FamilyParams(m, n, k), FLOAT)
            worst = max(worst, float(np.max(np.abs(np.array(avg.coeffs) - np.array(f.coeffs)))))
    for m, n, seed in [(4, 2, 1), (5, 3, 2), (6, 2, 3)]:
        frame = rational_isotropic_frame(random_rational_skew(m, seed), n)
        for k in range(1, m + 1):
            if brute_force_average(frame, k) != f_empty(FamilyParams(m, n, k), RATIONAL):
                exact_bad.append((m, n, k))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and not exact_bad and dt < 60
    report("2 root-node formula", ok, f"max float coeff error={worst:.2e} exact failures={exact_bad} time={dt:.1f}s")
    assert ok


def test_criterion_03_conditional_oracle(report):
    t0 = time.perf_counter()
    count, bad = 0, []
    for m in range(1, 7):
        for n in range(1, m + 1):
            frame = rational_isotropic_frame(random_rational_skew(m, 7 * m + n), n)
            for k in range(1, m + 1):
                for t in range(k + 1):
                    for chosen in itertools.combinations(range(m), t):
                        count += 1
                        if conditional_poly(_state(frame, k, chosen)) != brute_force_average(frame, k, chosen).monic():
                            bad.append((m, n, k, chosen))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    report("3 conditional-polynomial oracle, m <= 6", ok, f"cases={count} failures={len(bad)} time={dt:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def sweep_runs():
    """The 200 random instances of criterion 4 with every k in [1, m-1]."""
    rng = np.random.default_rng(20240)
    runs = []
    t0 = time.perf_counter()
    for _ in range(200):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(n + 1, 13))
        A = rng.standard_normal((n, m))
        for k in range(1, m):
            runs.append((A, k, select_interlacing(A, k, EPS)))
    return runs, time.perf_counter() - t0


def test_criterion_04_main_guarantee(report, sweep_runs):
    runs, dt = sweep_runs
    bound_fail, root_fail = [], []
    for A, k, res in runs:
        n, m = A.shape
        s2 = sigma_min(A) ** 2
        if res.sigma_min_sq < (1 - k * EPS) * main_bound(m, n, k) * s2 - SLACK:
            bound_fail.append((n, m, k))
        if res.sigma_min_sq / s2 < res.root_certificate - SLACK:
            root_fail.append((n, m, k))
    ok = not bound_fail and not root_fail and dt < 300
    report("4 main guarantee, 200 instances", ok,
           f"selections={len(runs)} bound failures={len(bound_fail)} root failures={len(root_fail)} time={dt:.1f}s")
    assert ok


def test_criterion_05_sandwich(report, sweep_runs):
    runs, _ = sweep_runs
    checked, bad = 0, []
    for A, k, res in runs:
        n, m = A.shape
        if math.comb(m, k) > 800:
            continue
        checked += 1
        best = select_brute_force(A, k).sigma_min_sq
        low = res.root_certificate * sigma_min(A) ** 2
        if not (best + SLACK >= res.sigma_min_sq >= low - SLACK):
            bad.append((n, m, k, best, res.sigma_min_sq, low))
    ok = not bad
    report("5 sandwich against the optimum", ok, f"instances={checked} violations={len(bad)}")
    assert ok


def test_criterion_06_root_bounds(report):
    bad_g, bad_f = [], []
    for m in range(3, 17):
        for n in range(2, m):
            for k in range(2, n + 1):
                lam = real_roots(g_empty(FamilyParams(m, n, k)))[-1]
                if lam < main_bound(m, n, k) - SLACK:
                    bad_g.append((m, n, k))
    for m in range(2, 17):
        for n in range(1, m):
            for k in range(n, m):
                lam = real_roots(f_empty(FamilyParams(m, n, k)))[-1]
                if lam < main_bound(m, n, k) - SLACK:
                    bad_f.append((m, n, k))
    ok = not bad_g and not bad_f
    report("6 extreme-root bounds", ok, f"g failures={bad_g[:3]} f failures={bad_f[:3]}")
    assert ok


def test_criterion_07_explicit_roots(report):
    worst = 0.0
    for m in range(4, 61):
        quad = RealPoly((2, -4 * (m - 1), m * (m - 1)), RATIONAL)
        worst = max(worst, abs(g1(m, 2) - real_roots(quad)[-1]))
        x = 3
        cubic = RealPoly((-x * (x - 1) * (x - 2), 3 * x * (x - 1) * (m - 2), -3 * x * (m - 1) * (m - 2),
                          m * (m - 1) * (m - 2)), RATIONAL)
        worst = max(worst, abs(g2(m, 3) - real_roots(cubic)[-1]))
        worst = max(worst, abs(g1(m, 2) - (2 - math.sqrt(2 * (m - 2) / (m - 1))) / m))
    ok = worst <= 1e-12
    report("7 explicit roots for k, n in {2, 3}", ok, f"max error={worst:.2e}")
    assert ok


def _grid():
    for m in range(2, GRID_M + 1):
        for n in range(1, m):
            for k in range(1, m + 1):
                yield m, n, k


def test_criterion_08a_beats_hong_pan(report):
    bad = [(m, n) for m in range(4, GRID_M + 1) for n in range(2, m - 1) if not main_bound(m, n, n) > hong_pan(m, n)]
    report("8a main bound > hong_pan (k = n, n >= 2, m >= n + 2)", not bad, f"violations={len(bad)}")
    assert not bad


def test_criterion_08b_beats_greedy(report):
    bad = [(m, n, k) for m, n, k in _grid()
           if n >= 2 and n <= k <= m - 2 and alpha(m, n, k)[0] < 1 and not main_bound(m, n, k) > greedy_bound(m, n, k)]
    report("8b main bound > greedy when alpha < 1", not bad, f"violations={len(bad)}")
    assert not bad


def test_criterion_08c_beats_xu21(report):
    bad = [(m, n, k) for m, n, k in _grid()
           if n <= k <= min(n + 3, m - 1) and not main_bound(m, n, k) > xu21_bound(m, n, k)]
    at_edge = sum(1 for m, n, k in bad if k == m - 1)
    report("8c main bound > xu21 (k in [n, n+3], k < m)", not bad,
           f"violations={len(bad)} (at k = m - 1: {at_edge}, where both equal (k-n+1)/(k+1)) first={bad[:3]}")
    assert not bad, "at k = m - 1 the two bounds coincide exactly; strict dominance cannot hold"


def test_criterion_08d_beats_spielman17(report):
    bad = [(m, n, k) for m, n, k in _grid()
           if max(1, n - 4) <= k < n and not main_bound(m, n, k) > spielman17_bound(m, n, k)]
    report("8d main bound > spielman17 (k in [n-4, n), k < n)", not bad, f"violations={len(bad)}")
    assert not bad


def test_criterion_09a_alpha_range(report):
    bad = [(m, n, k) for m, n, k in _grid() if not 0 < alpha(m, n, k)[0] <= 1]
    report("9a alpha in (0, 1] on the grid", not bad, f"violations={len(bad)}")
    assert not bad


def test_criterion_09b_alpha_one_set(report):
    # the stated characterization; k = m is excluded since alpha multiplies zero there
    bad = []
    for m, n, k in _grid():
        if k == m:
            continue
        stated = k == 1 or m == n + 1 or m == k + 1
        if (alpha(m, n, k)[0] == 1.0) != stated:
            bad.append((m, n, k))
    n_one = sum(1 for m, n, k in bad if n == 1)
    report("9b alpha = 1 exactly when k = 1 or m = n + 1 or m = k + 1", not bad,
           f"violations={len(bad)} (with n = 1: {n_one}) first={bad[:3]}")
    assert not bad, "for n = 1 the h1 argument has the factor (n - 1) = 0, so alpha = 1 for every k"


def test_criterion_09c_alpha_expansion(report):
    bad = []
    for n in range(10, 41):
        for m in range(2 * n, GRID_M + 1):
            a = corollary_alpha(m, n)
            if abs(a - (1 - 1 / n**2)) > 10 / n**3:
                bad.append((m, n, a))
    detail = f"violations={len(bad)}"
    if bad:
        m, n, a = bad[0]
        detail += f" first (m={m}, n={n}): alpha={a:.10f} vs 1-1/n^2={1 - 1 / n**2:.10f}"
    report("9c |alpha - (1 - 1/n^2)| <= 10/n^3 for k = n, m >= 2n, m <= 60", not bad, detail)
    assert not bad, "the expansion holds only for m much larger than n; near m = 2n, 1 - alpha is about 1/n^3"


def test_criterion_10_vieta_sums(report):
    worst = 0.0
    for m in range(3, 17):
        for n in range(1, m):
            for k in range(1, min(n, m - n) + 1):
                lam = np.array(real_roots(g_empty(FamilyParams(m, n, k))).roots)
                e0 = k * (m - k + 1) / (n - k + 1)
                e1 = k * (m - k + 1) / (m - n - k + 1)
                worst = max(worst, abs(np.sum(1 / lam) - e0) / e0, abs(np.sum(1 / (1 - lam)) - e1) / e1)
    ok = worst <= 1e-9
    report("10 reciprocal-root sums", ok, f"max relative error={worst:.2e}")
    assert ok


def test_criterion_11_cli_round_trip(report, tmp_path, capsys):
    rng = np.random.default_rng(11)
    codes, tampered = [], []
    for i in range(20):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(n + 1, 13))
        k = int(rng.integers(1, m))
        A = rng.standard_normal((n, m))
        mpath = tmp_path / f"a{i}.csv"
        mpath.write_text(format_csv_matrix(A))
        assert cli_main(["select", "--input", str(mpath), "--k", str(k)]) == 0
        rep_text = capsys.readouterr().out
        rpath = tmp_path / f"r{i}.json"
        rpath.write_text(rep_text)
        codes.append(cli_main(["verify", "--input", str(mpath), "--report", str(rpath)]))
        rep = json.loads(rep_text)
        rep["sigma_min_sq"] = rep["sigma_min_sq"] * 1.5 + 1.0
        rpath.write_text(json.dumps(rep))
        tampered.append(cli_main(["verify", "--input", str(mpath), "--report", str(rpath)]))
        capsys.readouterr()
    ok = all(c == 0 for c in codes) and all(c == 1 for c in tampered)
    report("11 CLI select/verify round trip", ok, f"verify exit codes={sorted(set(codes))} tampered={sorted(set(tampered))}")
    assert ok
