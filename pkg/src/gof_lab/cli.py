"""Command-line entry points: fit-and-test a dataset, run simulation
grids, plot result summaries, and advise on test choice.

Owns all file formats:

* Simulation config: flat ``key=value`` lines (``#`` comments allowed).
  Keys: n, m_list, d_min, d_max, G, sigma2_e_list, reps, alpha, seed,
  grouping_method.  Unknown keys are errors.
* Results CSV, one row per scenario x test:
  n,m,d,G,sigma2_e,reps,failures,method,mean,var,rejection,
  mean_ci_lo,mean_ci_hi,rej_ci_lo,rej_ci_hi,seed
  Floats carry 6 significant digits; ``--long`` appends full-precision
  duplicates plus the mean central-matrix diagonal.
* Plots: one standalone SVG per (metric, m, noise variance) combination.

Exit codes: 0 success, 1 computational failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import LoadOptions, load_dataset
from .errors import ConfigError, DataError, GofLabError
from .ghl import ghl_test
from .grouping import group_by_balanced_variance, group_by_quantiles
from .hl import TestResult, hl_test
from .logistic import fit_logistic
from .simulate import GROUPING_METHODS, Scenario, SimSummary, run_grid

RESULTS_COLUMNS = [
    "n", "m", "d", "G", "sigma2_e", "reps", "failures", "method",
    "mean", "var", "rejection",
    "mean_ci_lo", "mean_ci_hi", "rej_ci_lo", "rej_ci_hi", "seed",
]
LONG_COLUMNS = [
    "mean_full", "var_full", "rejection_full",
    "mean_ci_lo_full", "mean_ci_hi_full", "rej_ci_lo_full", "rej_ci_hi_full",
    "sigma_diag_mean",
]

VERDICT_HL = "USE_HL"
VERDICT_GHL = "USE_GHL"
VERDICT_GHL_OR_BOTH = "USE_GHL_OR_BOTH"
VERDICT_BOTH_WITH_CAUTION = "BOTH_WITH_CAUTION"

# The advisor's guidance was validated for ten groups and at most ~25
# parameters; outside that envelope it extrapolates.
_ADVISOR_MAX_D = 25
_CLUSTERING_RATIO = 5.0
DEFAULT_VERY_LARGE_N = 10000


@dataclass(frozen=True)
class Recommendation:
    """Advisor verdict with the inputs and the decision trace."""

    verdict: str
    inputs_echo: dict
    rationale: list[str]


def advise(
    n: int, m: int, d: int, very_large_n_threshold: int = DEFAULT_VERY_LARGE_N
) -> Recommendation:
    """Walk the test-choice decision tree.

    The model counts as small/moderate when d <= min(n/20, m/2); the data
    count as clustered when the replication ratio n/m >= 5; n is very
    large when it meets the configurable threshold.

    Args:
        n: Sample size.
        m: Number of unique covariate patterns (or an estimated cluster
            count supplied by the user when replicates are only
            approximate).
        d: Number of model parameters including the intercept.
        very_large_n_threshold: Sample size treated as "very large".

    Returns:
        Recommendation with one of the four verdicts and a rationale trace.
    """
    if not (n >= m >= 1):
        raise DataError(f"need n >= m >= 1, got n={n}, m={m}")
    if d < 1:
        raise DataError(f"need d >= 1, got d={d}")

    small_bound = min(n / 20, m / 2)
    small = d <= small_bound
    ratio = n / m
    clustering = ratio >= _CLUSTERING_RATIO
    very_large = n >= very_large_n_threshold

    trace = [
        f"model small or moderate (d <= min(n/20, m/2) = {small_bound:g})? "
        f"{'yes' if small else 'no'} (d = {d})",
    ]
    if d > _ADVISOR_MAX_D:
        trace.append(
            f"note: d = {d} exceeds the validated range (~{_ADVISOR_MAX_D}); "
            "this recommendation is an extrapolation"
        )

    if not small:
        trace.append(
            f"replicates or clusters (n/m = {ratio:g} >= {_CLUSTERING_RATIO:g})? "
            f"{'yes' if clustering else 'no'}"
        )
        if clustering:
            verdict = VERDICT_BOTH_WITH_CAUTION
            trace.append("large model with clustering: try both tests, with caution")
        else:
            verdict = VERDICT_HL
            trace.append("no clustering: the grouped Pearson test is undisturbed")
    else:
        trace.append(
            f"very large n (n >= {very_large_n_threshold})? "
            f"{'yes' if very_large else 'no'} (n = {n})"
        )
        if very_large:
            verdict = VERDICT_GHL
            trace.append("large sample with adequate m: the generalized test is safe")
        else:
            trace.append(
                f"replicates or clusters (n/m = {ratio:g} >= {_CLUSTERING_RATIO:g})? "
                f"{'yes' if clustering else 'no'}"
            )
            if clustering:
                verdict = VERDICT_GHL_OR_BOTH
                trace.append("clustering present: prefer the generalized test (or both)")
            else:
                verdict = VERDICT_HL
                trace.append("no clustering: the grouped Pearson test is undisturbed")

    return Recommendation(
        verdict=verdict,
        inputs_echo={
            "n": n,
            "m": m,
            "d": d,
            "clustering": clustering,
            "very_large_n": very_large,
        },
        rationale=trace,
    )


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "n", "m_list", "d_min", "d_max", "G", "sigma2_e_list",
    "reps", "alpha", "seed", "grouping_method",
}
_REQUIRED_KEYS = {"n", "m_list", "d_min", "d_max", "G", "reps", "seed"}


def parse_config(path: str | Path) -> list[Scenario]:
    """Parse a flat key=value config file into the scenario grid.

    The grid is the cross product m_list x {d_min..d_max} x sigma2_e_list,
    ordered with m outermost and sigma2_e innermost; every cell carries
    the same master seed.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such config file: {path}")
    raw: dict[str, str] = {}
    for line_num, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}: line {line_num}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(
                f"{path}: line {line_num}: unknown key {key!r}; "
                f"valid keys: {', '.join(sorted(_CONFIG_KEYS))}"
            )
        if key in raw:
            raise ConfigError(f"{path}: line {line_num}: duplicate key {key!r}")
        raw[key] = value.strip()

    missing = _REQUIRED_KEYS - raw.keys()
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(sorted(missing))}")

    def as_int(key: str) -> int:
        try:
            return int(raw[key])
        except ValueError:
            raise ConfigError(f"{path}: key {key!r} must be an integer, got {raw[key]!r}") from None

    def as_float_list(key: str, default: list[float]) -> list[float]:
        if key not in raw:
            return default
        try:
            return [float(tok) for tok in raw[key].split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(
                f"{path}: key {key!r} must be a comma-separated number list, got {raw[key]!r}"
            ) from None

    def as_int_list(key: str) -> list[int]:
        try:
            return [int(tok) for tok in raw[key].split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(
                f"{path}: key {key!r} must be a comma-separated integer list, got {raw[key]!r}"
            ) from None

    n = as_int("n")
    m_list = as_int_list("m_list")
    d_min, d_max = as_int("d_min"), as_int("d_max")
    if d_min > d_max:
        raise ConfigError(f"{path}: d_min={d_min} exceeds d_max={d_max}")
    G = as_int("G")
    reps = as_int("reps")
    seed = as_int("seed")
    sigma2_e_list = as_float_list("sigma2_e_list", [0.0])
    try:
        alpha = float(raw.get("alpha", "0.05"))
    except ValueError:
        raise ConfigError(
            f"{path}: key 'alpha' must be a number, got {raw['alpha']!r}"
        ) from None
    grouping_method = raw.get("grouping_method", "balanced")
    if grouping_method not in GROUPING_METHODS:
        raise ConfigError(
            f"{path}: grouping_method must be one of {GROUPING_METHODS}, got {grouping_method!r}"
        )

    scenarios = [
        Scenario(
            n=n, m=m, d=d, G=G, reps=reps, seed=seed,
            sigma2_e=s2e, alpha=alpha, grouping_method=grouping_method,
        )
        for m in m_list
        for d in range(d_min, d_max + 1)
        for s2e in sigma2_e_list
    ]
    try:
        for cell in scenarios:
            cell.validate()
    except GofLabError as exc:
        raise ConfigError(f"{path}: invalid scenario grid: {exc}") from None
    return scenarios


# ---------------------------------------------------------------------------
# Results CSV
# ---------------------------------------------------------------------------


def _fmt6(x: float) -> str:
    return f"{x:.6g}"


def write_results_csv(
    summaries: list[SimSummary], path: str | Path, long_format: bool = False
) -> None:
    """Emit one row per scenario x test, in scenario order (HL row first)."""
    header = RESULTS_COLUMNS + (LONG_COLUMNS if long_format else [])
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for summary in summaries:
            cell = summary.scenario
            for method, mc in (("hl", summary.hl), ("ghl", summary.ghl)):
                row = [
                    cell.n, cell.m, cell.d, cell.G, _fmt6(cell.sigma2_e),
                    cell.reps, summary.failures, method,
                    _fmt6(mc.mean), _fmt6(mc.variance), _fmt6(mc.rejection_rate),
                    _fmt6(mc.mean_ci[0]), _fmt6(mc.mean_ci[1]),
                    _fmt6(mc.rejection_ci[0]), _fmt6(mc.rejection_ci[1]),
                    cell.seed,
                ]
                if long_format:
                    row += [
                        repr(mc.mean), repr(mc.variance), repr(mc.rejection_rate),
                        repr(mc.mean_ci[0]), repr(mc.mean_ci[1]),
                        repr(mc.rejection_ci[0]), repr(mc.rejection_ci[1]),
                        repr(summary.mean_sigma_diag),
                    ]
                writer.writerow(row)


def read_results_csv(path: str | Path) -> list[dict]:
    """Read a results CSV back, validating the schema prefix."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such results file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty results file") from None
        if header[: len(RESULTS_COLUMNS)] != RESULTS_COLUMNS:
            raise DataError(
                f"{path}: schema mismatch; expected columns {RESULTS_COLUMNS}, got {header}"
            )
        rows = []
        for row in reader:
            if not row:
                continue
            rec = dict(zip(header, row))
            for key in ("n", "m", "d", "G", "reps", "failures", "seed"):
                rec[key] = int(rec[key])
            for key in (
                "sigma2_e", "mean", "var", "rejection",
                "mean_ci_lo", "mean_ci_hi", "rej_ci_lo", "rej_ci_hi",
            ):
                rec[key] = float(rec[key])
            rows.append(rec)
    if not rows:
        raise DataError(f"{path}: results file has no data rows")
    return rows


# ---------------------------------------------------------------------------
# Plotting
# ---------------------------------------------------------------------------

_METRICS = ("mean", "variance", "rejection")


def _plot_panel(rows: list[dict], metric: str, out_path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for method, color in (("hl", "tab:blue"), ("ghl", "tab:orange")):
        sub = sorted((r for r in rows if r["method"] == method), key=lambda r: r["d"])
        if not sub:
            continue
        d = [r["d"] for r in sub]
        if metric == "mean":
            val = [r["mean"] for r in sub]
            lo = [r["mean_ci_lo"] for r in sub]
            hi = [r["mean_ci_hi"] for r in sub]
        elif metric == "variance":
            # The CSV carries no variance interval; use the normal-theory
            # approximation Var(s^2) ~ 2 s^4 / (N - 1).
            val = [r["var"] for r in sub]
            half = [1.96 * r["var"] * np.sqrt(2.0 / max(r["reps"] - r["failures"] - 1, 1)) for r in sub]
            lo = [v - h for v, h in zip(val, half)]
            hi = [v + h for v, h in zip(val, half)]
        else:
            val = [r["rejection"] for r in sub]
            lo = [r["rej_ci_lo"] for r in sub]
            hi = [r["rej_ci_hi"] for r in sub]
        ax.plot(d, val, marker="o", ms=3, color=color, label=method.upper())
        ax.fill_between(d, lo, hi, color=color, alpha=0.2, linewidth=0)
    if metric == "rejection":
        ax.axhline(0.05, color="red", linewidth=0.8)
        ax.axhspan(0.045, 0.055, color="red", alpha=0.12, linewidth=0)
        ax.set_ylabel("estimated type 1 error rate")
    elif metric == "mean":
        ax.set_ylabel("Monte Carlo mean of the statistic")
    else:
        ax.set_ylabel("Monte Carlo variance of the statistic")
    ax.set_xlabel("number of model parameters d")
    first = rows[0]
    ax.set_title(f"n={first['n']}, m={first['m']}, G={first['G']}, sigma2_e={first['sigma2_e']:g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)


def emit_plots(rows: list[dict], outdir: Path, data_path: str | None = None) -> list[Path]:
    """Write one SVG per (metric, m, sigma2_e) panel; optionally a scatter
    of the first two covariates of a raw dataset."""
    outdir.mkdir(parents=True, exist_ok=True)
    combos = sorted({(r["m"], r["sigma2_e"]) for r in rows})
    multi_noise = len({s for _, s in combos}) > 1
    written: list[Path] = []
    for m, s2e in combos:
        panel_rows = [r for r in rows if r["m"] == m and r["sigma2_e"] == s2e]
        suffix = f"_m{m}" + (f"_sige{s2e:g}" if multi_noise else "")
        for metric in _METRICS:
            out_path = outdir / f"{metric}{suffix}.svg"
            _plot_panel(panel_rows, metric, out_path)
            written.append(out_path)
    if data_path is not None:
        written.append(_emit_scatter(data_path, outdir))
    return written


def _emit_scatter(data_path: str, outdir: Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = load_dataset(data_path)
    if data.d < 3:
        raise DataError("clustering scatter needs at least two covariates")
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter(data.X[:, 1], data.X[:, 2], s=8, alpha=0.6)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title("first two covariates")
    fig.tight_layout()
    out_path = outdir / "clustering_scatter.svg"
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return out_path


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_test(args: argparse.Namespace) -> int:
    data = load_dataset(
        args.data,
        LoadOptions(
            response_column=args.response,
            delimiter=args.delimiter,
            add_intercept=not args.no_intercept,
        ),
    )
    model = fit_logistic(data)
    if args.grouping == "balanced":
        rng = np.random.default_rng(args.seed)
        grouping = group_by_balanced_variance(model, args.G, rng)
    else:
        grouping = group_by_quantiles(model, args.G)

    results: list[TestResult] = []
    if args.method in ("hl", "both"):
        results.append(hl_test(model, data, grouping))
    if args.method in ("ghl", "both"):
        results.append(ghl_test(model, data, grouping))

    print(f"{'method':<8}{'statistic':>12}{'df':>5}{'p_value':>12}")
    for res in results:
        print(f"{res.method:<8}{res.statistic:>12.6g}{res.df:>5}{res.p_value:>12.6g}")
    print()
    summary = results[0].groups
    print(f"{'group':>5}{'size':>7}{'observed':>10}{'expected':>12}{'pi_bar':>10}")
    for g in range(summary.G):
        print(
            f"{g + 1:>5}{summary.sizes[g]:>7}{summary.observed[g]:>10.6g}"
            f"{summary.expected[g]:>12.6g}{summary.pi_bar[g]:>10.4f}"
        )
    if args.csv:
        with Path(args.csv).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "statistic", "df", "p_value", "G"])
            for res in results:
                writer.writerow([res.method, repr(res.statistic), res.df, repr(res.p_value), res.G])
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenarios = parse_config(args.config)
    if args.seed is not None:
        scenarios = [dataclasses.replace(c, seed=args.seed) for c in scenarios]
    summaries = run_grid(scenarios, workers=args.workers)
    write_results_csv(summaries, args.out, long_format=args.long)
    print(f"wrote {2 * len(summaries)} result rows to {args.out}")
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    rows = read_results_csv(args.results)
    written = emit_plots(rows, Path(args.outdir), data_path=args.data)
    print(f"wrote {len(written)} plot files to {args.outdir}")
    return 0


def _cmd_advise(args: argparse.Namespace) -> int:
    rec = advise(args.n, args.m, args.d, args.very_large_n)
    print(f"verdict: {rec.verdict}")
    echo = rec.inputs_echo
    print(
        f"inputs: n={echo['n']} m={echo['m']} d={echo['d']} "
        f"clustering={echo['clustering']} very_large_n={echo['very_large_n']}"
    )
    for line in rec.rationale:
        print(f"  - {line}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gof-lab",
        description="Goodness-of-fit tests for logistic regression and a "
        "Monte Carlo harness for their null behavior.",
    )
    parser.add_argument("--seed", type=int, default=None, help="global random seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="fit a dataset and run the grouped tests")
    p_test.add_argument("--data", required=True, help="CSV file with a response column")
    p_test.add_argument("--G", type=int, default=10, help="number of groups")
    p_test.add_argument("--grouping", choices=GROUPING_METHODS, default="balanced")
    p_test.add_argument("--method", choices=("hl", "ghl", "both"), default="both")
    p_test.add_argument("--response", default="y", help="response column name")
    p_test.add_argument("--delimiter", default=",")
    p_test.add_argument(
        "--no-intercept", action="store_true",
        help="the file already carries a leading all-ones column",
    )
    p_test.add_argument("--csv", default=None, help="also write results to this CSV")
    p_test.set_defaults(func=_cmd_test)

    p_sim = sub.add_parser("simulate", help="run a scenario grid from a config file")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", required=True, help="results CSV path")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument(
        "--long", action="store_true",
        help="append full-precision columns and the mean central-matrix diagonal",
    )
    p_sim.set_defaults(func=_cmd_simulate)

    p_plot = sub.add_parser("plot", help="render SVG charts from a results CSV")
    p_plot.add_argument("--results", required=True)
    p_plot.add_argument("--outdir", required=True)
    p_plot.add_argument("--data", default=None, help="raw dataset for a covariate scatter")
    p_plot.set_defaults(func=_cmd_plot)

    p_adv = sub.add_parser("advise", help="recommend which test to use")
    p_adv.add_argument("--n", type=int, required=True)
    p_adv.add_argument("--m", type=int, required=True, help="unique covariate patterns (or estimated clusters)")
    p_adv.add_argument("--d", type=int, required=True)
    p_adv.add_argument("--very-large-n", type=int, default=DEFAULT_VERY_LARGE_N)
    p_adv.set_defaults(func=_cmd_advise)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"gof-lab: input error: {exc}", file=sys.stderr)
        return 2
    except GofLabError as exc:
        print(f"gof-lab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
