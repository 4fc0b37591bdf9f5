"""Acceptance gate: every release criterion at its stated scale and
tolerance, one printed pass/fail line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
print; without -s they still appear in captured output on failure."""

import json
import subprocess
import sys
import time

import numpy as np

from cncflsa import (
    CncConfig,
    KINDS,
    NoiseSpec,
    PenaltySpec,
    add_awgn,
    convexity_margin,
    default_pulse_spec,
    fused_lasso_l1,
    fused_lasso_optimality_residual,
    generate_pulses,
    lambda1_heuristic,
    objective,
    select_a1,
    solve,
    tvd,
    tvd_optimality_residual,
)
from cncflsa.cli import sweep_sigma

from refsolvers import fl_objective, fused_lasso_reference, tv_objective, tvd_reference
from suites import check_majorizer_domination, run_full_penalty_suite

LAMBDAS = (0.01, 0.1, 1.0, 10.0)


def report(num, ok, detail):
    line = f"[acceptance] criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def random_piecewise(rng, n, block=5, noise=0.8):
    base = np.repeat(rng.normal(0.0, 2.0, n // block + 1), block)[:n]
    return base + rng.normal(0.0, noise, n)


def test_criterion_1_convexity_reproduction():
    """Midpoint convexity of the smooth part on/off the certified boundary."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    U = rng.uniform(-3.0, 3.0, (10000, 2))
    V = rng.uniform(-3.0, 3.0, (10000, 2))

    def g_batch(X, a0, a1):
        p0, p1 = PenaltySpec("log", a0), PenaltySpec("log", a1)
        return (
            0.5 * np.sum(X**2, axis=1)
            + np.sum(p0.residual(X), axis=1)
            + p1.residual(X[:, 1] - X[:, 0])
        )

    def violations(a0, a1):
        return (
            g_batch(0.5 * (U + V), a0, a1)
            - 0.5 * (g_batch(U, a0, a1) + g_batch(V, a0, a1))
        )

    v_convex = np.max(violations(0.5, 0.125))
    v_nonconvex = np.max(violations(0.5, 1.0 / 3.0))
    elapsed = time.perf_counter() - t0
    ok = v_convex <= 1e-12 and v_nonconvex > 1e-6 and elapsed < 1.0
    report(
        1,
        ok,
        f"boundary max violation {v_convex:.2e} (<=1e-12), beyond-boundary max "
        f"{v_nonconvex:.2e} (>1e-6), {elapsed:.2f}s",
    )


def test_criterion_2_oracle_exactness():
    """Solver outputs satisfy subgradient optimality; small instances match a
    slow reference convex solver."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst_resid = 0.0
    worst_ref = 0.0
    n_small = 0
    for trial in range(100):
        n = int(rng.integers(2, 17)) if trial % 3 == 0 else int(rng.integers(1, 65))
        y = random_piecewise(rng, n)
        lam1 = LAMBDAS[trial % 4]
        lam0 = LAMBDAS[(trial // 4) % 4]
        x_tv = tvd(y, lam1)
        x_fl = fused_lasso_l1(y, lam0, lam1)
        worst_resid = max(
            worst_resid,
            tvd_optimality_residual(y, x_tv, lam1),
            fused_lasso_optimality_residual(y, x_fl, lam0, lam1),
        )
        if n <= 16:
            n_small += 1
            f_tv = tv_objective(y, x_tv, lam1)
            f_tv_ref = tv_objective(y, tvd_reference(y, lam1), lam1)
            f_fl = fl_objective(y, x_fl, lam0, lam1)
            f_fl_ref = fl_objective(y, fused_lasso_reference(y, lam0, lam1), lam0, lam1)
            worst_ref = max(
                worst_ref,
                abs(f_tv - f_tv_ref) / max(1.0, abs(f_tv_ref)),
                abs(f_fl - f_fl_ref) / max(1.0, abs(f_fl_ref)),
            )
    elapsed = time.perf_counter() - t0
    ok = worst_resid <= 1e-8 and worst_ref <= 1e-10 and elapsed < 10.0 and n_small >= 20
    report(
        2,
        ok,
        f"worst residual {worst_resid:.2e} (<=1e-8) on 100 instances, worst reference "
        f"objective gap {worst_ref:.2e} (<=1e-10 rel) on {n_small} small instances, "
        f"{elapsed:.1f}s",
    )


def test_criterion_3_mm_descent():
    """Objective history never increases beyond roundoff slack."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    worst_rise = -np.inf
    for _ in range(100):
        n = int(rng.integers(2, 80))
        y = random_piecewise(rng, n)
        lam0 = float(rng.uniform(0.05, 2.0))
        lam1 = float(rng.uniform(0.05, 2.0))
        u = float(rng.uniform(0.0, 1.0))
        v = float(rng.uniform(0.0, 1.0 - u))
        cfg = CncConfig(
            lam0,
            lam1,
            PenaltySpec(str(rng.choice(KINDS)), u / lam0),
            PenaltySpec(str(rng.choice(KINDS)), v / (4 * lam1)),
            max_iter=60,
            tol=1e-11,
        )
        h = solve(y, cfg).objective_history
        if h.size > 1:
            worst_rise = max(worst_rise, float(np.max(np.diff(h))))
    elapsed = time.perf_counter() - t0
    ok = worst_rise <= 1e-12 and elapsed < 10.0
    report(3, ok, f"largest objective rise {worst_rise:.2e} (<=1e-12) over 100 runs, {elapsed:.1f}s")


def test_criterion_4_convergence_speed():
    """Relative objective change below 1e-8 within 10 updates on the fixture.

    lambda0 is pinned at its grid-tuned value for this fixture (0.1 * the
    lambda1 heuristic); the noise realization is a fixed representative seed.
    """
    clean = generate_pulses(default_pulse_spec())
    sigma = 0.5
    y = add_awgn(clean, NoiseSpec(sigma, 42))
    lam1 = lambda1_heuristic(clean.size, sigma)
    lam0 = 0.1 * lam1
    a0 = 0.5 / lam0
    a1 = select_a1(lam0, lam1, a0)
    cfg = CncConfig(
        lam0, lam1, PenaltySpec("log", a0), PenaltySpec("log", a1),
        max_iter=10, tol=1e-8,
    )
    assert abs(convexity_margin(cfg)) <= 1e-12
    res = solve(y, cfg)
    nontrivial = np.count_nonzero(res.x) > 0
    ok = res.converged and res.iterations <= 10 and nontrivial
    report(
        4,
        ok,
        f"relative change below 1e-8 after {res.iterations} updates (<=10), "
        f"{np.count_nonzero(res.x)} nonzero samples in the estimate",
    )


def test_criterion_5_l1_reduction():
    """With both non-convexity degrees at zero the solver is the plain fused
    lasso and stops after one update."""
    rng = np.random.default_rng(50)
    worst = 0.0
    iters_ok = True
    for _ in range(50):
        n = int(rng.integers(2, 60))
        y = random_piecewise(rng, n)
        lam0 = float(rng.uniform(0.05, 1.5))
        lam1 = float(rng.uniform(0.05, 1.5))
        cfg = CncConfig(lam0, lam1, PenaltySpec("log", 0.0), PenaltySpec("log", 0.0))
        res = solve(y, cfg)
        worst = max(worst, float(np.max(np.abs(res.x - fused_lasso_l1(y, lam0, lam1)))))
        iters_ok = iters_ok and res.iterations == 1
    ok = worst <= 1e-12 and iters_ok
    report(5, ok, f"sup-norm gap to fused lasso {worst:.2e} (<=1e-12), all stopped after 1 update")


def test_criterion_6_global_optimality():
    """Random perturbations never beat the returned solution under convexity."""
    rng = np.random.default_rng(60)
    worst_gap = -np.inf
    for _ in range(10):
        n = int(rng.integers(8, 33))
        y = random_piecewise(rng, n)
        lam0 = float(rng.uniform(0.1, 1.5))
        lam1 = float(rng.uniform(0.1, 1.5))
        u = float(rng.uniform(0.0, 1.0))
        v = float(rng.uniform(0.0, 1.0 - u))
        cfg = CncConfig(
            lam0,
            lam1,
            PenaltySpec(str(rng.choice(KINDS)), u / lam0),
            PenaltySpec(str(rng.choice(KINDS)), v / (4 * lam1)),
            max_iter=500,
            tol=1e-15,
        )
        assert convexity_margin(cfg) >= -1e-12
        res = solve(y, cfg)
        fstar = objective(res.x, y, cfg)
        deltas = rng.uniform(-0.1, 0.1, size=(1000, n))
        gaps = [fstar - objective(res.x + d, y, cfg) for d in deltas]
        worst_gap = max(worst_gap, max(gaps))
    ok = worst_gap <= 1e-9
    report(6, ok, f"worst improvement by perturbation {worst_gap:.2e} (<=1e-9)")


def test_criterion_7_rmse_ordering():
    """Statistical ordering cnc <= mdfl <= l1 with positive mean gaps."""
    t0 = time.perf_counter()
    rows = sweep_sigma(
        [0.25, 0.5, 1.0], trials=15, base_seed=0, beta=0.25,
        kind="atan", methods=["l1", "mdfl", "cnc"],
    )
    elapsed = time.perf_counter() - t0
    means = {(r["method"], r["value"]): r["mean_rmse"] for r in rows}
    lines = []
    ok = elapsed < 120.0
    for sigma in (0.25, 0.5, 1.0):
        cnc, mdfl, l1 = means[("cnc", sigma)], means[("mdfl", sigma)], means[("l1", sigma)]
        ok = ok and (cnc < mdfl < l1)
        lines.append(f"sigma={sigma}: {cnc:.4f} < {mdfl:.4f} < {l1:.4f}")
    report(7, ok, "; ".join(lines) + f"; {elapsed:.0f}s")


def test_criterion_8_penalty_property_suite():
    t0 = time.perf_counter()
    run_full_penalty_suite()
    elapsed = time.perf_counter() - t0
    ok = elapsed < 5.0
    report(8, ok, f"all finite-difference invariants hold for 4 kinds x 4 a-values, {elapsed:.1f}s")


def test_criterion_9_majorizer_domination():
    worst_dom = np.inf
    worst_touch = 0.0
    for kind in KINDS:
        dom, touch = check_majorizer_domination(kind)
        worst_dom = min(worst_dom, dom)
        worst_touch = max(worst_touch, touch)
    ok = worst_dom >= -1e-12 and worst_touch <= 1e-12
    report(
        9,
        ok,
        f"10^4 triples/kind: worst domination slack {worst_dom:.2e} (>=-1e-12), "
        f"worst touch error {worst_touch:.2e} (<=1e-12)",
    )


def test_criterion_10_cli_determinism_and_exit_codes(tmp_path):
    def run(*args):
        return subprocess.run(
            [sys.executable, "-m", "cncflsa.cli", *args],
            capture_output=True, text=True, cwd=tmp_path,
        )

    def chain(tag):
        noisy = tmp_path / f"noisy_{tag}.txt"
        first = tmp_path / f"first_{tag}.txt"
        second = tmp_path / f"second_{tag}.txt"
        assert run("generate", "--output", str(noisy), "--default",
                   "--sigma", "0.5", "--seed", "9").returncode == 0
        assert run("denoise", str(noisy), str(first),
                   "--lambda0", "0.4", "--lambda1", "2.165").returncode == 0
        assert run("denoise", str(first), str(second),
                   "--lambda0", "0.4", "--lambda1", "2.165").returncode == 0
        return (
            noisy.read_bytes(), first.read_bytes(),
            (tmp_path / f"first_{tag}.txt.json").read_bytes(),
            second.read_bytes(),
            (tmp_path / f"second_{tag}.txt.json").read_bytes(),
        )

    identical = chain("a") == chain("b")

    bad = tmp_path / "garbage.txt"
    bad.write_text("zero point five\n")
    parse_code = run("denoise", str(bad), str(tmp_path / "o.txt"),
                     "--lambda0", "1", "--lambda1", "1").returncode

    noisy = tmp_path / "noisy_a.txt"
    convexity_code = run(
        "denoise", str(noisy), str(tmp_path / "o.txt"),
        "--lambda0", "1", "--lambda1", "1", "--a0", "0.9", "--a1", "0.3",
    ).returncode

    ok = identical and parse_code == 2 and convexity_code == 3
    report(
        10,
        ok,
        f"generate/denoise/re-denoise chains byte-identical: {identical}; "
        f"parse error exit {parse_code} (=2); convexity violation exit {convexity_code} (=3)",
    )
