"""Acceptance suite: the toolkit must reproduce the documented null
behavior of both tests and satisfy the structural guarantees.

Each test prints one pass/fail line (visible with ``pytest -s``) and
asserts the criterion at its stated tolerance.  The Monte Carlo cells
share one seeded grid computed once per session.
"""

import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from gof_lab import (
    GofLabError,
    Scenario,
    central_matrix,
    chi2_sf,
    fit_logistic,
    ghl_test,
    group_by_balanced_variance,
    hl_statistic,
    make_dataset,
    residual_vector,
    run_grid,
    summarize_groups,
)
from gof_lab.cli import (
    RESULTS_COLUMNS,
    VERDICT_BOTH_WITH_CAUTION,
    VERDICT_GHL,
    VERDICT_GHL_OR_BOTH,
    VERDICT_HL,
    advise,
    main,
)
from gof_lab.logistic import inverse_logit

from oracles import chi2_sf_even_df, ghl_stat_brute, hl_diag_quadratic, sigma_dense_hat_form

SEED = 0
REPS = 2000
WORKERS = 2

D_SWEEP = (2, 5, 10, 15, 20, 25)
NOISE_SWEEP = (0.0, 0.001, 0.01, 0.1)


def _cells():
    grid = []
    # no-replicate calibration cells
    for d in (2, 10):
        grid.append(Scenario(n=500, m=500, d=d, G=10, reps=REPS, seed=SEED))
    # replicated cells across model sizes
    for d in D_SWEEP:
        grid.append(Scenario(n=500, m=50, d=d, G=10, reps=REPS, seed=SEED))
    # replication-intensity comparison at d=20
    for m in (100, 500):
        grid.append(Scenario(n=500, m=m, d=20, G=10, reps=REPS, seed=SEED))
    # more groups
    for d in (2, 25):
        grid.append(Scenario(n=500, m=50, d=d, G=26, reps=REPS, seed=SEED))
    # near-replicate noise sweep at the largest model
    for s2e in NOISE_SWEEP[1:]:
        grid.append(Scenario(n=500, m=50, d=25, G=10, reps=REPS, seed=SEED, sigma2_e=s2e))
    return grid


@pytest.fixture(scope="module")
def grid():
    cells = _cells()
    start = time.monotonic()
    summaries = run_grid(cells, workers=WORKERS)
    elapsed = time.monotonic() - start
    by_key = {
        (s.scenario.m, s.scenario.d, s.scenario.G, s.scenario.sigma2_e): s
        for s in summaries
    }
    by_key["_seconds_per_cell"] = elapsed / len(cells)
    return by_key


def _verdict(num: int, name: str, ok: bool) -> bool:
    print(f"[acceptance] criterion {num:2d} ({name}): {'PASS' if ok else 'FAIL'}")
    return ok


def test_criterion_01_null_calibration_without_replicates(grid):
    details = []
    ok = True
    for d in (2, 10):
        cell = grid[(500, d, 10, 0.0)]
        hl_ok = 0.035 <= cell.hl.rejection_rate <= 0.065
        ghl_ok = 0.035 <= cell.ghl.rejection_rate <= 0.075
        ok = ok and hl_ok and ghl_ok
        details.append(
            f"d={d}: hl_rej={cell.hl.rejection_rate:.4f} ghl_rej={cell.ghl.rejection_rate:.4f}"
        )
    runtime_ok = grid["_seconds_per_cell"] <= 300.0
    ok = ok and runtime_ok
    details.append(f"seconds/cell={grid['_seconds_per_cell']:.1f}")
    assert _verdict(1, "null calibration, no replicates", ok), "; ".join(details)


def test_criterion_02_collapse_under_replication(grid):
    cells = [grid[(50, d, 10, 0.0)] for d in D_SWEEP]
    rej = [c.hl.rejection_rate for c in cells]
    mean = [c.hl.mean for c in cells]
    var = [c.hl.variance for c in cells]
    drop_ok = rej[-1] <= rej[0] - 0.02
    mean_ok = mean[-1] < mean[0]
    var_ok = var[-1] < var[0]
    corr_ok = all(
        spearmanr(D_SWEEP, metric).statistic < 0 for metric in (rej, mean, var)
    )
    ok = drop_ok and mean_ok and var_ok and corr_ok
    assert _verdict(2, "grouped Pearson test collapses with model size", ok), (
        f"rej={rej} mean={mean} var={var}"
    )


def test_criterion_03_replication_intensity_ordering(grid):
    cells = {m: grid[(m, 20, 10, 0.0)] for m in (50, 100, 500)}
    rej = {m: cells[m].hl.rejection_rate for m in cells}
    hw = {
        m: (cells[m].hl.rejection_ci[1] - cells[m].hl.rejection_ci[0]) / 2.0
        for m in cells
    }
    ok = rej[50] <= rej[100] + max(hw[50], hw[100]) and rej[100] <= rej[500] + max(
        hw[100], hw[500]
    )
    assert _verdict(3, "more replication, stronger collapse", ok), f"rej={rej} hw={hw}"


def test_criterion_04_generalized_test_stays_calibrated(grid):
    details = []
    ok = True
    for d in D_SWEEP:
        cell = grid[(50, d, 10, 0.0)]
        mean_ok = 8.5 <= cell.ghl.mean <= 9.5
        var_ok = 15.0 <= cell.ghl.variance <= 21.0
        ok = ok and mean_ok and var_ok
        details.append(f"d={d}: mean={cell.ghl.mean:.3f} var={cell.ghl.variance:.2f}")
    assert _verdict(4, "generalized test mean/variance stable", ok), "; ".join(details)


def test_criterion_05_persistence_with_more_groups(grid):
    low = grid[(50, 2, 26, 0.0)].hl.rejection_rate
    high = grid[(50, 25, 26, 0.0)].hl.rejection_rate
    ok = high < low
    assert _verdict(5, "collapse persists with 26 groups", ok), (
        f"rej(d=2)={low:.4f} rej(d=25)={high:.4f}"
    )


def test_criterion_06_noise_sweep_monotonicity(grid):
    cells = [grid[(50, 25, 10, s2e)] for s2e in NOISE_SWEEP]
    rej = [c.hl.rejection_rate for c in cells]
    hw = [(c.hl.rejection_ci[1] - c.hl.rejection_ci[0]) / 2.0 for c in cells]
    diag = [c.mean_sigma_diag for c in cells]
    rej_ok = all(
        rej[i + 1] >= rej[i] - max(hw[i], hw[i + 1]) for i in range(len(rej) - 1)
    )
    diag_ok = all(diag[i + 1] >= diag[i] - 1e-12 for i in range(len(diag) - 1))
    ok = rej_ok and diag_ok
    assert _verdict(6, "noise restores level; matrix diagonal grows", ok), (
        f"rej={rej} diag={diag}"
    )


def test_criterion_07_structural_invariants():
    rng = np.random.default_rng(2024)
    start = time.monotonic()
    instances = 0
    attempts = 0
    while instances < 200:
        attempts += 1
        assert attempts < 2000, "instance generator stuck"
        n = int(rng.integers(20, 61))
        d = int(rng.integers(2, 7))
        G = int(rng.integers(3, 7))
        X = np.column_stack([np.ones(n), rng.normal(size=(n, d - 1))])
        beta_true = rng.normal(scale=0.5, size=d)
        y = (rng.random(n) < inverse_logit(X @ beta_true)).astype(float)
        data = make_dataset(y, X)
        try:
            model = fit_logistic(data)
            grouping = group_by_balanced_variance(
                model, G, np.random.default_rng(rng.integers(2**32))
            )
        except GofLabError:
            continue  # separation or degenerate grouping: draw a fresh instance
        instances += 1

        score = data.X.T @ (data.y - model.fitted)
        assert float(np.max(np.abs(score))) < 1e-6

        cm = central_matrix(model, data, grouping)
        assert float(np.max(np.abs(cm.sigma - cm.sigma.T))) <= 1e-10
        assert float(np.linalg.eigvalsh(cm.sigma).min()) >= -1e-8
        assert float(np.max(np.abs(cm.sigma @ np.ones(G)))) <= 1e-8

        s = residual_vector(model, data, grouping)
        assert abs(float(np.sum(s))) <= 1e-8

        summary = summarize_groups(grouping, data.y, model.fitted)
        assert hl_statistic(summary) == pytest.approx(
            hl_diag_quadratic(
                summary.observed, summary.expected, summary.sizes, summary.pi_bar
            ),
            abs=1e-12,
        )

        sigma_dense = sigma_dense_hat_form(data.X, model.weights, grouping.assignment, G)
        ghl_out = ghl_test(model, data, grouping)
        assert ghl_out.statistic == pytest.approx(
            ghl_stat_brute(s, sigma_dense), abs=1e-10
        )

        for lhs, rhs in (
            (cm.sigma @ cm.pinv @ cm.sigma, cm.sigma),
            (cm.pinv @ cm.sigma @ cm.pinv, cm.pinv),
            ((cm.sigma @ cm.pinv).T, cm.sigma @ cm.pinv),
            ((cm.pinv @ cm.sigma).T, cm.pinv @ cm.sigma),
        ):
            assert float(np.max(np.abs(lhs - rhs))) <= 1e-8

    elapsed = time.monotonic() - start
    ok = elapsed <= 60.0
    assert _verdict(7, f"structural invariants on 200 instances ({elapsed:.1f}s)", ok)


def test_criterion_08_chi_squared_special_values():
    closed_ok = all(
        abs(chi2_sf(float(x), df) - chi2_sf_even_df(float(x), df)) <= 1e-10
        for df in (2, 4, 8, 24)
        for x in np.linspace(0.0, 100.0, 401)
    )
    critical_ok = abs(chi2_sf(15.507, 8) - 0.050) <= 0.001
    ok = closed_ok and critical_ok
    assert _verdict(8, "chi-squared tail closed forms", ok), (
        f"chi2_sf(15.507, 8)={chi2_sf(15.507, 8):.6f}"
    )


def test_criterion_09_worker_count_determinism(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text(
        "n = 100\nm_list = 20\nd_min = 2\nd_max = 4\nG = 5\n"
        "reps = 30\nalpha = 0.05\nseed = 7\ngrouping_method = balanced\n"
    )
    outputs = []
    for workers in (1, 4, 8):
        out = tmp_path / f"results_w{workers}.csv"
        code = main(
            ["simulate", "--config", str(cfg), "--out", str(out), "--workers", str(workers)]
        )
        assert code == 0
        outputs.append(out.read_text())
    ok = outputs[0] == outputs[1] == outputs[2]
    header_ok = outputs[0].splitlines()[0] == ",".join(RESULTS_COLUMNS)
    ok = ok and header_ok
    assert _verdict(9, "identical results for 1/4/8 workers", ok)


def test_criterion_10_advisor_reaches_all_leaves():
    expectations = [
        ((500, 50, 10), VERDICT_GHL_OR_BOTH),
        ((100, 20, 20), VERDICT_BOTH_WITH_CAUTION),
        ((500, 500, 5), VERDICT_HL),
        ((100000, 100000, 10), VERDICT_GHL),
    ]
    verdicts = [advise(n, m, d).verdict for (n, m, d), _ in expectations]
    ok = verdicts == [v for _, v in expectations]
    assert _verdict(10, "decision tree reaches all four leaves", ok), f"verdicts={verdicts}"
