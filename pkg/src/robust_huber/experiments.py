"""Batch experiment runner: configs, seeded trials, CSV/report emission.

A run is a pure function of (config bytes, seed): every trial derives its
instance seed from (seed, grid point index, trial index), workers share
nothing, and rows are sorted by (grid point, trial) before emission, so
serial and parallel executions write byte-identical CSVs.  Wall-clock times
are kept in memory for the report but zeroed in the CSV for that reason.
"""

from __future__ import annotations

import configparser
import csv
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import log
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .datagen import (
    NoiseSpec,
    SignalSpec,
    gen_matrix_completion_scenario,
    make_gaussian_design_instance,
    make_pca_instance,
    make_regression_instance,
    trial_seed,
)
from .estimators import (
    EstimatorConstants,
    PcaProblem,
    RegressionProblem,
    estimate_pca,
    estimate_sparse_regression,
    frobenius_error,
    parameter_error,
    prediction_error,
)
from .lowerbound import lb_xi_of_alpha, phase_trial
from .solver import SolverConfig
from .verification import CertificateParams, assemble_certificate

__all__ = [
    "SCENARIOS",
    "ExperimentSpec",
    "ResultRow",
    "run_experiment",
    "fit_loglog_slope",
    "emit_csv",
    "parse_csv",
    "emit_report",
    "scenario_assertions",
    "build_instance",
    "run_certificate",
]

SCENARIOS = (
    "regression_n_sweep",
    "regression_alpha_sweep",
    "regression_gaussian_design",
    "pca_n_sweep",
    "pca_alpha_sweep",
    "matrix_completion",
    "lowerbound_phase",
    "meta_certificate",
)

_SOLVER_KEYS = ("max_iters", "rel_tol", "initial_step", "backtrack_factor")


@dataclass(frozen=True)
class ExperimentSpec:
    """One scenario with its grid, fixed parameters, and solver knobs."""

    scenario: str
    grid: dict
    params: dict
    trials_per_point: int = 1
    seed: int = 0
    delta: float = 0.05
    constants: EstimatorConstants = EstimatorConstants()
    solver: SolverConfig = SolverConfig()

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if not self.grid or any(len(v) == 0 for v in self.grid.values()):
            raise ValueError("grid must be non-empty")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if not (0 < self.delta < 1):
            raise ValueError("delta must lie in (0, 1)")

    @classmethod
    def from_config(cls, path, scenario: Optional[str] = None, seed: Optional[int] = None):
        """Build a spec from a flat INI file with one section per scenario."""
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {path}: {exc}") from exc
        sections = parser.sections()
        if scenario is None:
            if len(sections) != 1:
                raise ValueError(
                    f"config {path} has sections {sections}; pick one with scenario="
                )
            scenario = sections[0]
        elif scenario not in sections:
            raise ValueError(f"config {path} has no section [{scenario}]")

        grid, params = {}, {}
        extras = {"trials_per_point": 1, "seed": 0, "delta": 0.05}
        const_kw, solver_kw = {}, {}
        for key, raw in parser.items(scenario):
            if key.endswith("_grid"):
                values = [_parse_scalar(tok) for tok in raw.replace(",", " ").split()]
                if not values:
                    raise ValueError(f"empty grid for {key}")
                grid[key[: -len("_grid")]] = values
            elif key in extras:
                extras[key] = _parse_scalar(raw)
            elif key in ("gamma_scale", "huber_h_override"):
                const_kw[key] = float(raw)
            elif key in _SOLVER_KEYS:
                solver_kw[key] = _parse_scalar(raw)
            else:
                params[key] = _parse_scalar(raw)
        if seed is not None:
            extras["seed"] = seed
        return cls(
            scenario=scenario,
            grid=grid,
            params=params,
            trials_per_point=int(extras["trials_per_point"]),
            seed=int(extras["seed"]),
            delta=float(extras["delta"]),
            constants=EstimatorConstants(**const_kw),
            solver=SolverConfig(**{k: v for k, v in solver_kw.items()}),
        )


def _parse_scalar(raw: str):
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


@dataclass
class ResultRow:
    """One (grid point, trial) outcome."""

    scenario: str
    point: dict
    trial: int
    metrics: dict
    iterations: int
    flags: dict
    wall_ms: float = 0.0
    error: str = ""

    def __post_init__(self):
        if self.trial < 0:
            raise ValueError("trial must be >= 0")
        if not self.error:
            for name, value in self.metrics.items():
                if np.isnan(value):
                    raise ValueError(f"metric {name} is NaN without an error tag")
                if "error" in name and not np.isfinite(value):
                    raise ValueError(f"error metric {name} must be finite")


def _row_sort_key(row: ResultRow):
    return (tuple(sorted(row.point.items())), row.trial)


def grid_points(grid: dict) -> list[dict]:
    keys = sorted(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


# ---------------------------------------------------------------------------
# per-trial execution


def build_instance(spec: ExperimentSpec, p: dict, instance_seed: int):
    """The problem object a given scenario solves, before solving it."""
    sc = spec.scenario
    if sc in ("regression_n_sweep", "regression_alpha_sweep") or (
        sc == "meta_certificate" and p.get("family", "regression") == "regression"
    ):
        noise = NoiseSpec(
            family=p.get("noise_family", "symmetric_mixture"),
            alpha=float(p["alpha"]),
            zeta=float(p.get("zeta", 1.0)),
            outlier_scale=float(p.get("outlier_scale", 100.0)),
        )
        signal = SignalSpec(k=int(p["k"]), magnitude=float(p.get("magnitude", 1.0)))
        return make_regression_instance(int(p["n"]), int(p["d"]), signal, noise, instance_seed)
    if sc == "regression_gaussian_design":
        signal = SignalSpec(k=int(p["k"]), magnitude=float(p.get("magnitude", 1.0)))
        return make_gaussian_design_instance(
            int(p["n"]), int(p["d"]), signal, float(p["alpha"]), instance_seed
        )
    if sc in ("pca_n_sweep", "pca_alpha_sweep") or (
        sc == "meta_certificate" and p.get("family") == "pca"
    ):
        noise = NoiseSpec(
            family=p.get("noise_family", "symmetric_mixture"),
            alpha=float(p["alpha"]),
            zeta=float(p.get("zeta", 1.0)),
            outlier_scale=float(p.get("outlier_scale", 100.0)),
        )
        return make_pca_instance(
            int(p["n"]),
            int(p["r"]),
            noise,
            float(p.get("rho_over_n", 1.0)),
            instance_seed,
            l_scale=float(p.get("l_scale", 1.0)),
        )
    if sc == "matrix_completion":
        return gen_matrix_completion_scenario(
            int(p["n"]),
            int(p["r"]),
            float(p["alpha"]),
            float(p.get("zeta", 1.0)),
            float(p.get("rho_over_n", 1.0)),
            instance_seed,
        )
    if sc == "lowerbound_phase":
        xi = lb_xi_of_alpha(int(p["n"]), int(p["r"]), float(p["alpha"]))
        noise = NoiseSpec(
            family="lb_geometric_even", alpha=float(p["alpha"]), zeta=1.0, xi=xi
        )
        return make_pca_instance(int(p["n"]), int(p["r"]), noise, 1.0, instance_seed)
    raise ValueError(f"no instance builder for scenario {sc!r}")


def run_certificate(spec: ExperimentSpec, p: dict, instance_seed: int):
    """Solve one instance and assemble its certificate."""
    problem = build_instance(spec, p, instance_seed)
    cert_params = CertificateParams(
        alpha=float(p["alpha"]), delta=spec.delta, seed=instance_seed
    )
    if isinstance(problem, RegressionProblem):
        estimate, result = estimate_sparse_regression(problem, spec.constants, spec.solver)
    else:
        estimate, result = estimate_pca(problem, spec.constants, spec.solver)
    cert = assemble_certificate(problem, estimate, spec.constants, cert_params)
    return problem, estimate, result, cert


def _solve_metrics(spec, p, instance_seed):
    problem = build_instance(spec, p, instance_seed)
    if isinstance(problem, RegressionProblem):
        est, result = estimate_sparse_regression(problem, spec.constants, spec.solver)
        metrics = {
            "prediction_error_sq": prediction_error(problem, est),
            "parameter_error_sq": parameter_error(problem, est),
        }
    else:
        est, result = estimate_pca(problem, spec.constants, spec.solver)
        metrics = {"frobenius_error": frobenius_error(problem, est)}
    flags = {"dominated": bool(result.reference_dominated)}
    return metrics, result.iterations, flags


def _phase_metrics(spec, p, instance_seed):
    rec = phase_trial(
        int(p["n"]), int(p["r"]), float(p["alpha"]), instance_seed, spec.constants, spec.solver
    )
    success = rec["rel_error"] <= float(p["epsilon"])
    return (
        {"rel_error": rec["rel_error"]},
        rec["iterations"],
        {"success": bool(success), "dominated": rec["dominated"]},
    )


def _certificate_metrics(spec, p, instance_seed):
    _, _, result, cert = run_certificate(spec, p, instance_seed)
    metrics = {
        "error_value": float(cert.error_value),
        "gamma_measured": float(cert.gamma_measured),
        "kappa": float(cert.kappa),
        "s": float(cert.s),
        "R": float(cert.R),
        "radius_est": float(cert.radius_est),
    }
    flags = {name: bool(ok) for name, ok in cert.conditions.items()}
    flags.update(
        all_conditions=cert.all_conditions(),
        cone_membership=cert.cone_membership_ok,
        error_lt_radius=cert.error_lt_radius,
        dominated=cert.dominated_est,
        dominated_meas=cert.dominated_meas,
        rsc_vacuous=cert.rsc_vacuous,
    )
    return metrics, result.iterations, flags


def _metrics_for(spec, p, instance_seed):
    if spec.scenario == "lowerbound_phase":
        return _phase_metrics(spec, p, instance_seed)
    if spec.scenario == "meta_certificate":
        return _certificate_metrics(spec, p, instance_seed)
    return _solve_metrics(spec, p, instance_seed)


def _trial_worker(job) -> ResultRow:
    spec, point_idx, point, trial = job
    p = dict(spec.params)
    p.update(point)
    iseed = trial_seed(spec.seed, point_idx, trial)
    t0 = time.perf_counter()
    try:
        metrics, iterations, flags = _metrics_for(spec, p, iseed)
        tag = ""
    except Exception as exc:  # recorded, run continues
        metrics, iterations, flags = {}, 0, {}
        tag = f"{type(exc).__name__}: " + " ".join(str(exc).split())
    wall_ms = 1000.0 * (time.perf_counter() - t0)
    return ResultRow(
        scenario=spec.scenario,
        point=dict(point),
        trial=trial,
        metrics={k: float(v) for k, v in metrics.items()},
        iterations=int(iterations),
        flags={k: bool(v) for k, v in flags.items()},
        wall_ms=wall_ms,
        error=tag,
    )


def run_experiment(
    spec: ExperimentSpec,
    threads: int = 1,
    on_row: Optional[Callable[[ResultRow], None]] = None,
) -> list[ResultRow]:
    """All (grid point, trial) rows, sorted by deterministic key."""
    jobs = [
        (spec, i, pt, t)
        for i, pt in enumerate(grid_points(spec.grid))
        for t in range(spec.trials_per_point)
    ]
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = []
            for row in pool.map(_trial_worker, jobs):
                if on_row is not None:
                    on_row(row)
                rows.append(row)
    else:
        rows = []
        for job in jobs:
            row = _trial_worker(job)
            if on_row is not None:
                on_row(row)
            rows.append(row)
    rows.sort(key=_row_sort_key)
    return rows


# ---------------------------------------------------------------------------
# aggregation


def median_by_point(rows: Sequence[ResultRow], x_field: str, y_field: str) -> dict:
    groups: dict = {}
    for row in rows:
        if row.error:
            continue
        x = row.point.get(x_field)
        if x is None or y_field not in row.metrics:
            continue
        groups.setdefault(x, []).append(row.metrics[y_field])
    return {x: float(np.median(v)) for x, v in sorted(groups.items())}


def fit_loglog_slope(
    rows: Sequence[ResultRow], x_field: str, y_field: str
) -> tuple[float, float, float]:
    """Least-squares line through (log x, log median y) per grid point."""
    med = median_by_point(rows, x_field, y_field)
    if len(med) < 2:
        raise ValueError("need at least 2 distinct grid values to fit a slope")
    xs = np.array(sorted(med))
    ys = np.array([med[x] for x in xs])
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit needs positive x values and positive medians")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((slope * lx + intercept - ly) ** 2)))
    return float(slope), float(intercept), resid


# ---------------------------------------------------------------------------
# emission


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _schema(rows: Sequence[ResultRow]):
    point_keys: set = set()
    metric_keys: set = set()
    flag_keys: set = set()
    for row in rows:
        point_keys.update(row.point)
        metric_keys.update(row.metrics)
        flag_keys.update(row.flags)
    return sorted(point_keys), sorted(metric_keys), sorted(flag_keys)


def emit_csv(rows: Sequence[ResultRow], path) -> None:
    """Deterministic CSV; wall_ms is zeroed so re-runs are byte-identical."""
    rows = sorted(rows, key=_row_sort_key)
    point_keys, metric_keys, flag_keys = _schema(rows)
    header = (
        ["scenario"] + point_keys + ["trial"] + metric_keys + ["iterations"]
        + flag_keys + ["wall_ms", "error"]
    )
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                rec = [row.scenario]
                rec += [_fmt(row.point[k]) if k in row.point else "" for k in point_keys]
                rec.append(str(row.trial))
                rec += [
                    _fmt(row.metrics[k]) if k in row.metrics else _fmt(float("nan"))
                    for k in metric_keys
                ]
                rec.append(str(row.iterations))
                rec += [_fmt(bool(row.flags.get(k, False))) for k in flag_keys]
                rec.append(_fmt(0.0))
                rec.append(row.error)
                writer.writerow(rec)
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc}") from exc


def parse_csv(path) -> list[ResultRow]:
    """Inverse of emit_csv (wall_ms comes back as the stored zero)."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            records = list(reader)
    except OSError as exc:
        raise OSError(f"cannot read CSV {path}: {exc}") from exc
    i_trial = header.index("trial")
    i_iter = header.index("iterations")
    i_wall = header.index("wall_ms")
    point_keys = header[1:i_trial]
    metric_keys = header[i_trial + 1 : i_iter]
    flag_keys = header[i_iter + 1 : i_wall]
    rows = []
    for rec in records:
        point = {
            k: _parse_scalar(v)
            for k, v in zip(point_keys, rec[1 : i_trial])
            if v != ""
        }
        metrics = {
            k: float(v) for k, v in zip(metric_keys, rec[i_trial + 1 : i_iter])
        }
        flags = {k: v == "1" for k, v in zip(flag_keys, rec[i_iter + 1 : i_wall])}
        error = rec[i_wall + 1]
        if error:
            metrics = {k: v for k, v in metrics.items() if not np.isnan(v)}
        rows.append(
            ResultRow(
                scenario=rec[0],
                point=point,
                trial=int(rec[i_trial]),
                metrics=metrics,
                iterations=int(rec[i_iter]),
                flags=flags,
                wall_ms=float(rec[i_wall]),
                error=error,
            )
        )
    return rows


_PLOT_AXES = {
    "regression_n_sweep": ("n", "prediction_error_sq", True),
    "regression_alpha_sweep": ("alpha", "prediction_error_sq", True),
    "regression_gaussian_design": ("n", "prediction_error_sq", True),
    "pca_n_sweep": ("n", "frobenius_error", True),
    "pca_alpha_sweep": ("alpha", "frobenius_error", True),
    "matrix_completion": ("alpha", "frobenius_error", False),
    "lowerbound_phase": ("alpha", "rel_error", False),
    "meta_certificate": ("instance", "error_value", False),
}


def _gnuplot_script(rows: Sequence[ResultRow], csv_path) -> Optional[str]:
    if not rows:
        return None
    scenario = rows[0].scenario
    axes = _PLOT_AXES.get(scenario)
    if axes is None:
        return None
    x_field, y_field, loglog = axes
    point_keys, metric_keys, flag_keys = _schema(rows)
    header = (
        ["scenario"] + point_keys + ["trial"] + metric_keys + ["iterations"]
        + flag_keys + ["wall_ms", "error"]
    )
    if x_field not in header or y_field not in header:
        return None
    ix = header.index(x_field) + 1
    iy = header.index(y_field) + 1
    lines = [
        "set datafile separator ','",
        f"set title '{scenario}'",
        f"set xlabel '{x_field}'",
        f"set ylabel '{y_field}'",
    ]
    if loglog:
        lines.append("set logscale xy")
    lines.append(
        f"plot '{csv_path}' every ::1 using {ix}:{iy} with points pt 7 title 'trials'"
    )
    return "\n".join(lines) + "\n"


def emit_report(
    rows: Sequence[ResultRow],
    path,
    csv_path=None,
    spec: Optional[ExperimentSpec] = None,
) -> list[tuple[str, bool, str]]:
    """Plain-text summary with per-point medians, slopes, and pass/fail lines.

    Returns the assertion triples so callers can set exit codes; writes a
    companion gnuplot script next to the report when csv_path is given.
    """
    rows = sorted(rows, key=_row_sort_key)
    checks = scenario_assertions(spec, rows) if spec is not None else []
    lines = []
    scenario = spec.scenario if spec is not None else (rows[0].scenario if rows else "?")
    lines.append(f"scenario: {scenario}")
    lines.append(f"rows: {len(rows)} ({sum(1 for r in rows if r.error)} with errors)")
    total_wall = sum(r.wall_ms for r in rows)
    lines.append(f"total solve time: {total_wall / 1000.0:.2f} s")
    point_keys, metric_keys, _ = _schema(rows)
    for x_field in point_keys:
        if len({row.point.get(x_field) for row in rows}) < 2:
            continue
        for y_field in metric_keys:
            med = median_by_point(rows, x_field, y_field)
            if not med:
                continue
            lines.append(f"median {y_field} by {x_field}:")
            for x, m in med.items():
                lines.append(f"  {x_field}={_fmt(x)}  {m:.6g}")
            try:
                slope, intercept, resid = fit_loglog_slope(rows, x_field, y_field)
                lines.append(
                    f"loglog slope of {y_field} vs {x_field}: {slope:.4f}"
                    f" (intercept {intercept:.4f}, rms resid {resid:.4f})"
                )
            except ValueError:
                pass
    for name, ok, detail in checks:
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w") as fh:
            fh.write(text)
        if csv_path is not None:
            script = _gnuplot_script(rows, csv_path)
            if script is not None:
                Path(path).with_suffix(".gnuplot").write_text(script)
    except OSError as exc:
        raise OSError(f"cannot write report {path}: {exc}") from exc
    return checks


# ---------------------------------------------------------------------------
# scenario-level pass/fail rules (shared by the CLI and the acceptance tests)


def _success_fractions(rows: Sequence[ResultRow]):
    by_alpha: dict = {}
    for row in rows:
        if row.error:
            continue
        by_alpha.setdefault(row.point["alpha"], []).append(bool(row.flags.get("success")))
    out = {}
    for alpha, vals in sorted(by_alpha.items()):
        out[alpha] = (float(np.mean(vals)), len(vals))
    return out


def _slope_check(name, rows, x_field, y_field, lo, hi, target):
    try:
        slope, _, _ = fit_loglog_slope(rows, x_field, y_field)
    except ValueError as exc:
        return (name, False, f"slope fit unavailable: {exc}")
    return (name, lo <= slope <= hi, f"slope {slope:.4f} in {target}")


def scenario_assertions(
    spec: ExperimentSpec, rows: Sequence[ResultRow]
) -> list[tuple[str, bool, str]]:
    """(name, passed, detail) triples encoding each scenario's target claims."""
    sc = spec.scenario
    p = spec.params
    clean = [r for r in rows if not r.error]
    out: list[tuple[str, bool, str]] = []
    if len(clean) < len(rows):
        bad = next(r for r in rows if r.error)
        out.append(
            ("no_trial_errors", False, f"{len(rows) - len(clean)} rows failed; first: {bad.error}")
        )

    if sc == "regression_n_sweep":
        k, d, alpha = int(p["k"]), int(p["d"]), float(p["alpha"])
        for n, med in median_by_point(clean, "n", "prediction_error_sq").items():
            bound = 100.0 * k * log(d) / (alpha**2 * n)
            out.append(
                (f"median_pred_sq_at_n_{n}", med <= bound, f"{med:.6g} <= {bound:.6g}")
            )
        out.append(
            _slope_check("slope_vs_n", clean, "n", "prediction_error_sq",
                         -1.25, -0.75, "-1 +- 0.25")
        )
    elif sc == "regression_alpha_sweep":
        out.append(
            _slope_check("slope_vs_alpha", clean, "alpha", "prediction_error_sq",
                         -2.4, -1.6, "-2 +- 0.4")
        )
    elif sc == "pca_n_sweep":
        r_rank, alpha = int(p["r"]), float(p["alpha"])
        scale = float(p.get("zeta", 1.0)) + float(p.get("rho_over_n", 1.0))
        for n, med in median_by_point(clean, "n", "frobenius_error").items():
            bound = float(10.0 * np.sqrt(r_rank * n) / alpha * scale)
            out.append(
                (f"median_frob_at_n_{n}", med <= bound, f"{med:.6g} <= {bound:.6g}")
            )
        out.append(
            _slope_check("slope_vs_n", clean, "n", "frobenius_error",
                         0.3, 0.7, "0.5 +- 0.2")
        )
    elif sc == "pca_alpha_sweep":
        out.append(
            _slope_check("slope_vs_alpha", clean, "alpha", "frobenius_error",
                         -1.3, -0.7, "-1 +- 0.3")
        )
    elif sc == "lowerbound_phase":
        fracs = _success_fractions(clean)
        alphas = sorted(fracs)
        if len(alphas) >= 2:
            lo, hi = fracs[alphas[0]][0], fracs[alphas[-1]][0]
            out.append(("phase_low_alpha", lo <= 0.5, f"success {lo:.3f} <= 0.5"))
            out.append(("phase_high_alpha", hi >= 0.9, f"success {hi:.3f} >= 0.9"))
            monotone = True
            worst = ""
            for a, b in zip(alphas, alphas[1:]):
                (pa, ta), (pb, tb) = fracs[a], fracs[b]
                # Laplace-smoothed binomial sigmas so endpoint fractions of
                # exactly 0 or 1 still get a nonzero noise allowance
                sa = np.sqrt((pa * (1 - pa) + 1.0 / (ta + 2)) / ta)
                sb = np.sqrt((pb * (1 - pb) + 1.0 / (tb + 2)) / tb)
                slack = 2.0 * np.hypot(sa, sb)
                if pb < pa - slack:
                    monotone = False
                    worst = f"drop {pa:.3f} -> {pb:.3f} at alpha {a:.4g} -> {b:.4g} exceeds 2 sigma {slack:.3f}"
            out.append(("phase_monotone", monotone, worst or "within 2 sigma"))
    elif sc == "meta_certificate":
        conds = ("decomposability", "contraction", "gradient_bound",
                 "restricted_convexity", "radius_bound")
        all_flags = all(
            all(r.flags.get(c, False) for c in conds) for r in clean
        ) and len(clean) > 0
        out.append(("conditions_all_instances", all_flags, f"{len(clean)} instances"))
        cone = all(r.flags.get("cone_membership", False) for r in clean) and clean
        out.append(("cone_membership", bool(cone), "estimate error in expansion cone"))
        err_lt = all(r.flags.get("error_lt_radius", False) for r in clean) and clean
        out.append(("error_lt_radius", bool(err_lt), "E(estimate - truth) < R"))
        violation = [
            r
            for r in clean
            if all(r.flags.get(c, False) for c in conds)
            and r.flags.get("dominated", False)
            and not r.flags.get("error_lt_radius", False)
        ]
        out.append(
            (
                "implication_holds",
                not violation,
                "no instance with all flags true but error >= radius",
            )
        )
    return out
