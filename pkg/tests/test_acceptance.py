"""Acceptance suite: one test per release criterion, one pass/fail line
each (echoed in the pytest terminal summary under "acceptance criteria").

Heavy criteria share the experiment machinery the CLI uses, at the full
configuration (degree 3, 1000 iterations, 1/k steps, zero start, 20
trials). Everything is seeded; the suite is deterministic end to end.
"""

import time

import numpy as np
import pytest

from bezier_mopt.bezier import BezierSimplex, fit_least_squares
from bezier_mopt.cli import main, run_experiment
from bezier_mopt.diagnostics import perturbation_experiment, repeat_generalization_gap
from bezier_mopt.metrics import gd, igd
from bezier_mopt.problems import get_problem, scaled_med, scaled_med_pareto
from bezier_mopt.simplex import enumerate_multi_indices, sample_uniform_simplex
from bezier_mopt.solver import (SolverConfig, gradient_step_rule, run_generic,
                                run_surface_gd)
from bezier_mopt.sweep import minimize_scalarizations

ROOT_SEED = 2024


def test_criterion_1_mse_band_scaled_med(acceptance_report):
    started = time.perf_counter()
    result = run_experiment("scaled-med", [30, 50, 100], trials=20,
                            root_seed=ROOT_SEED, metric_names=["mse"],
                            iterations=1000, degree=3, schedule="1/k")
    means = {s["n"]: s["mse"]["mean"] for s in result["aggregate"]["settings"]}
    elapsed = time.perf_counter() - started
    in_band = all(1e-5 <= means[n] <= 4e-4 for n in (30, 50, 100))
    ordered = means[100] < means[30]
    acceptance_report(1, in_band and ordered,
           f"mean mse n30={means[30]:.3e} n50={means[50]:.3e} "
           f"n100={means[100]:.3e}, band [1e-5, 4e-4], {elapsed:.0f}s")
    assert in_band
    assert ordered


def test_criterion_2_gd_igd_magnitude_skew_problems(acceptance_report):
    started = time.perf_counter()
    outcomes = {}
    for name in ("skew-3med", "skew-3mmd"):
        result = run_experiment(name, [30, 50, 100], trials=20,
                                root_seed=ROOT_SEED, metric_names=["gd", "igd"],
                                iterations=1000, degree=3, schedule="1/k",
                                validation_count=1000)
        for setting in result["aggregate"]["settings"]:
            outcomes[(name, setting["n"], "gd")] = setting["gd"]["mean"]
            outcomes[(name, setting["n"], "igd")] = setting["igd"]["mean"]
    elapsed = time.perf_counter() - started
    worst = max(outcomes.values())
    passed = worst < 0.15
    acceptance_report(2, passed,
           f"worst mean indicator {worst:.3f} < 0.15 over "
           f"{len(outcomes)} cells, {elapsed:.0f}s")
    assert passed, outcomes


def test_criterion_3_algorithm_equivalence(acceptance_report):
    problem = scaled_med()
    worst = 0.0
    for seed in range(5):
        cfg = SolverConfig(num_samples=30, num_iterations=10, degree=3, seed=seed)
        a, _ = run_surface_gd(problem, cfg)
        b, _ = run_generic(problem, gradient_step_rule("1/k"), cfg)
        worst = max(worst, float(np.linalg.norm(a.control_points - b.control_points)))
    passed = worst < 1e-8
    acceptance_report(3, passed, f"max control gap over 5 seeds: {worst:.2e} < 1e-8")
    assert passed


def test_criterion_4_planted_model_recovery(acceptance_report):
    rng = np.random.default_rng(ROOT_SEED)
    basis = enumerate_multi_indices(3, 3)
    worst = 0.0
    for trial in range(20):
        planted = rng.uniform(-1.0, 1.0, size=(basis.size, 3))
        model = BezierSimplex(basis=basis, control_points=planted)
        weights = sample_uniform_simplex(3, 20, 1000 + trial)
        fitted = fit_least_squares(weights, model.evaluate_batch(weights), basis)
        worst = max(worst, float(np.linalg.norm(fitted.control_points - planted)))
    passed = worst < 1e-8
    acceptance_report(4, passed, f"max recovery error over 20 planted models: {worst:.2e} < 1e-8")
    assert passed


def test_criterion_5_analytic_map_stationarity(acceptance_report):
    problem = scaled_med()
    weights = sample_uniform_simplex(3, 1000, ROOT_SEED)
    residuals = np.array([
        np.linalg.norm(problem.jacobian(scaled_med_pareto(t)).T @ t)
        for t in weights])
    stationary = residuals.max() < 1e-9

    centroid = np.full((1, 3), 1.0 / 3.0)
    oracle = minimize_scalarizations(problem, centroid, grad_tol=1e-10)
    assert oracle.converged.all()
    gap = float(np.linalg.norm(oracle.points[0] - scaled_med_pareto(centroid[0])))
    oracle_ok = gap < 1e-8
    acceptance_report(5, stationary and oracle_ok,
           f"max stationarity residual {residuals.max():.2e} < 1e-9, "
           f"centroid oracle gap {gap:.2e} < 1e-8")
    assert stationary
    assert oracle_ok


def test_criterion_6_jacobians_match_finite_differences(acceptance_report):
    h = 1e-6
    worst = 0.0
    rng = np.random.default_rng(ROOT_SEED + 6)
    for name in ("scaled-med", "skew-3med", "skew-3mmd"):
        problem = get_problem(name)
        centers = problem.norm_power.centers
        count = 0
        while count < 100:
            x = rng.uniform(-2.0, 2.0, size=3)
            if name != "scaled-med" and np.linalg.norm(x - centers, axis=1).min() <= 0.1:
                continue
            count += 1
            numeric = np.stack([
                (problem.evaluate(x + h * e) - problem.evaluate(x - h * e)) / (2 * h)
                for e in np.eye(3)], axis=1)
            scale = max(1.0, float(np.abs(numeric).max()))
            worst = max(worst, float(np.abs(problem.jacobian(x) - numeric).max()) / scale)
    passed = worst < 1e-5
    acceptance_report(6, passed, f"max relative jacobian error {worst:.2e} < 1e-5")
    assert passed


def test_criterion_7_gradient_bound_every_iteration(acceptance_report):
    problem = scaled_med()
    ok = True
    for seed in range(5):
        cfg = SolverConfig(num_samples=30, num_iterations=100, degree=3, seed=seed)
        _, record = run_surface_gd(problem, cfg)
        ok &= bool(np.all(record.ztg_norm <= 30 * 1.0 * record.max_scalarized_grad))
        ok &= bool(np.all(record.max_basis_sum_err < 1e-12))
        ok &= bool(np.all(record.max_basis_norm <= 1.0 + 1e-12))
    acceptance_report(7, ok, "design-weighted gradient bound, partition of unity, and "
                  "unit basis norm held on all iterations of 5 runs")
    assert ok


def test_criterion_8_stability_trends(acceptance_report):
    started = time.perf_counter()
    problem = scaled_med()
    medians = {}
    for n in (30, 100):
        cfg = SolverConfig(num_samples=n, num_iterations=50, degree=3,
                           seed=ROOT_SEED)
        reports = perturbation_experiment(problem, cfg, k=25, repeats=10)
        medians[n] = float(np.median([r.sup_gap for r in reports]))
    perturb_ok = medians[100] < medians[30]

    gaps = {}
    for n in (30, 50, 100):
        cfg = SolverConfig(num_samples=n, num_iterations=1000, degree=3,
                           seed=ROOT_SEED)
        out = repeat_generalization_gap(problem, cfg, holdout=10000, trials=20)
        gaps[n] = out["gap_abs_mean"]
    gengap_ok = gaps[30] >= gaps[50] >= gaps[100]
    elapsed = time.perf_counter() - started
    acceptance_report(8, perturb_ok and gengap_ok,
           f"median sup_gap n30={medians[30]:.2e} > n100={medians[100]:.2e}; "
           f"mean |gap| {gaps[30]:.2e} >= {gaps[50]:.2e} >= {gaps[100]:.2e}, "
           f"{elapsed:.0f}s")
    assert perturb_ok
    assert gengap_ok


def test_criterion_9_indicator_bruteforce_oracle(acceptance_report):
    rng = np.random.default_rng(ROOT_SEED + 9)
    exact = True
    for _ in range(100):
        x = rng.normal(size=(int(rng.integers(1, 9)), 3))
        y = rng.normal(size=(int(rng.integers(1, 9)), 3))
        ref_gd = float(np.mean([min(np.linalg.norm(p - q) for q in y) for p in x]))
        ref_igd = float(np.mean([min(np.linalg.norm(p - q) for p in x) for q in y]))
        exact &= gd(x, y) == pytest.approx(ref_gd, rel=1e-13, abs=0.0)
        exact &= igd(x, y) == pytest.approx(ref_igd, rel=1e-13, abs=0.0)
        exact &= gd(x, x) == 0.0 and igd(x, x) == 0.0
    acceptance_report(9, exact, "gd/igd match the double-loop reference on 100 set pairs")
    assert exact


def test_criterion_10_per_trial_csv_determinism(tmp_path, acceptance_report):
    args = ["experiment", "--problem", "scaled-med", "--n", "30", "--k",
            "1000", "--degree", "3", "--trials", "20", "--seed",
            str(ROOT_SEED), "--metrics", "mse"]
    dirs = [tmp_path / "first", tmp_path / "second"]
    for d in dirs:
        assert main(args + ["--out-dir", str(d)]) == 0
    first = (dirs[0] / "trials.csv").read_bytes()
    second = (dirs[1] / "trials.csv").read_bytes()
    passed = first == second
    acceptance_report(10, passed, f"two runs of the n=30 cell produced "
                       f"{'identical' if passed else 'DIFFERING'} per-trial CSV bytes")
    assert passed
