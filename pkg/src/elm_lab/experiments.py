"""Experiment harness: entropy tables, loss-vs-concentration curves, audits.

Scenarios draw i.i.d. label samples from a ground truth theta*, fit the
empirical loss minimizer per (lambda, N, run) cell, and aggregate the
quantized entropy of the fitted level-2 distribution together with the
empirical label frequency and the fitted mean.  Every cell owns an RNG
stream derived from (seed, lambda-index, N-index, run-index), so results
are bitwise reproducible and independent of execution order.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dist import (
    Dirac,
    Dirichlet,
    DirichletParams,
    Level2Distribution,
    SimplexPoint,
    categorical_sample,
)
from .entropy import DEFAULT_GRID_M, get_simplex_grid, quantized_probs
from .level2 import (
    KLToDirichlet,
    LossConfig,
    NegEntropyUniformPrior,
    NoRegularizer,
    RegularizerKind,
    expected_l2_risk_under_truth,
)
from .losses import Level1LossKind
from .optimizer import FitError, OptimizerConfig, fit_elm
from .rng import SeededRng


class ScenarioError(ValueError):
    """A scenario file or scenario construction is invalid."""


@dataclass(frozen=True)
class Scenario:
    """One table/audit experiment: ground truth, sweep grids, fit settings."""

    scenario_id: str
    theta_star: SimplexPoint
    n_values: tuple[int, ...]
    lambda_values: tuple[float, ...]
    runs: int
    level1: Level1LossKind
    regularizer: RegularizerKind
    data_scale: float
    grid_m: int
    seed: int
    optimizer: OptimizerConfig
    theta_hat_index: int = 0

    def __post_init__(self):
        if self.runs < 1:
            raise ScenarioError("runs must be >= 1")
        if not self.n_values or any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ScenarioError("n_values must be nonempty and strictly ascending")
        if not self.lambda_values:
            raise ScenarioError("lambda_values must be nonempty")
        if any(lam < 0 for lam in self.lambda_values):
            raise ScenarioError("lambda values must be >= 0")
        if not 0 <= self.theta_hat_index < self.k:
            raise ScenarioError("theta_hat_index out of range")

    @property
    def k(self) -> int:
        return self.theta_star.k

    def loss_config(self, lam: float) -> LossConfig:
        return LossConfig(
            level1=self.level1,
            regularizer=self.regularizer,
            lam=lam,
            data_scale=self.data_scale,
        )


@dataclass(frozen=True)
class RunRecord:
    """One fitted cell replicate."""

    lambda_index: int
    n_index: int
    run_index: int
    lam: float
    n: int
    entropy_bits: float
    theta_hat: float        # empirical label frequency at theta_hat_index
    elm_mean: float         # fitted predicted mean at theta_hat_index
    is_dirac: bool
    objective: float
    starts_agreeing: int
    q: Level2Distribution


@dataclass(frozen=True)
class CellStats:
    lam: float
    n: int
    run_count: int
    entropy_mean: float
    entropy_std: float
    theta_hat_mean: float
    theta_hat_std: float
    elm_mean_mean: float
    elm_mean_std: float


@dataclass(frozen=True)
class TableResult:
    scenario: Scenario
    cells: tuple[CellStats, ...]
    records: tuple[RunRecord, ...]

    def cell(self, lam: float, n: int) -> CellStats:
        for c in self.cells:
            if c.lam == lam and c.n == n:
                return c
        raise KeyError(f"no cell for lambda={lam}, N={n}")


@dataclass(frozen=True)
class AuditEntry:
    """Definition-level audit of one lambda value across sample sizes."""

    lam: float
    n_values: tuple[int, ...]
    entropy_means: tuple[float, ...]
    entropy_stds: tuple[float, ...]
    a1_nonincreasing: bool
    a1_strict_decrease_somewhere: bool
    a1_degenerate_constant: bool
    a2_dirac_at_largest_n: bool
    tv_to_truth: tuple[float, ...]
    tv_trend_decreasing: bool

    @property
    def a2_satisfied(self) -> bool:
        return self.a2_dirac_at_largest_n and self.tv_trend_decreasing


@dataclass(frozen=True)
class AuditReport:
    scenario: Scenario
    entries: tuple[AuditEntry, ...]


@dataclass(frozen=True)
class CurveResult:
    """Expected level-2 risk of Dir(c * shape) over a concentration grid."""

    theta_star: SimplexPoint
    alpha_shape: np.ndarray
    lambda_values: tuple[float, ...]
    c_grid: np.ndarray
    values: np.ndarray          # (len(lambdas), len(c_grid))
    argmin_c: tuple[float, ...]

    def argmin_index(self, lambda_index: int) -> int:
        return int(np.argmin(self.values[lambda_index]))


@dataclass(frozen=True)
class ProbeResult:
    name: str
    passed: bool
    n_trials: int
    n_passed: int
    details: tuple[dict, ...]


@dataclass(frozen=True)
class TheoremReport:
    probes: tuple[ProbeResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(p.passed for p in self.probes)


# --- Table runner -----------------------------------------------------------


def _fit_cell_run(scenario: Scenario, li: int, ni: int, ri: int) -> RunRecord:
    lam = scenario.lambda_values[li]
    n = scenario.n_values[ni]
    base = SeededRng(scenario.seed, 0)
    labels = categorical_sample(
        scenario.theta_star, base.derive(li, ni, ri, 0), size=n
    )
    try:
        fit = fit_elm(
            labels, scenario.k, scenario.loss_config(lam),
            opt=scenario.optimizer, rng=base.derive(li, ni, ri, 1),
            grid=get_simplex_grid(scenario.k, scenario.grid_m),
        )
    except FitError as exc:
        raise FitError(
            f"cell lambda={lam} N={n} run={ri} of {scenario.scenario_id}: {exc}"
        ) from exc
    counts = np.bincount(labels, minlength=scenario.k)
    idx = scenario.theta_hat_index
    return RunRecord(
        lambda_index=li, n_index=ni, run_index=ri, lam=lam, n=n,
        entropy_bits=fit.quantized_entropy_bits,
        theta_hat=float(counts[idx] / n),
        elm_mean=float(fit.predicted_mean.probs[idx]),
        is_dirac=fit.is_dirac,
        objective=fit.objective,
        starts_agreeing=fit.starts_agreeing,
        q=fit.q,
    )


def _run_cell(args: tuple[Scenario, int, int]) -> list[RunRecord]:
    scenario, li, ni = args
    return [_fit_cell_run(scenario, li, ni, ri) for ri in range(scenario.runs)]


def _std(values: np.ndarray) -> float:
    return float(values.std(ddof=1)) if values.size > 1 else 0.0


def run_table(scenario: Scenario, jobs: int = 1, progress=None) -> TableResult:
    """All (lambda, N) cells with ``runs`` replicates each.

    ``jobs > 1`` fits cells in separate processes; the deterministic
    per-cell streams and the fixed aggregation order keep the result
    identical to a serial run.
    """
    tasks = [
        (scenario, li, ni)
        for li in range(len(scenario.lambda_values))
        for ni in range(len(scenario.n_values))
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_cell = list(pool.map(_run_cell, tasks))
    else:
        per_cell = []
        for task in tasks:
            per_cell.append(_run_cell(task))
            if progress is not None:
                _, li, ni = task
                recs = per_cell[-1]
                progress(
                    f"{scenario.scenario_id} lambda={scenario.lambda_values[li]:g} "
                    f"N={scenario.n_values[ni]} entropy="
                    f"{np.mean([r.entropy_bits for r in recs]):.3f} bits"
                )
    records = tuple(r for cell in per_cell for r in cell)
    cells = []
    for cell in per_cell:
        ent = np.array([r.entropy_bits for r in cell])
        th = np.array([r.theta_hat for r in cell])
        em = np.array([r.elm_mean for r in cell])
        cells.append(CellStats(
            lam=cell[0].lam, n=cell[0].n, run_count=len(cell),
            entropy_mean=float(ent.mean()), entropy_std=_std(ent),
            theta_hat_mean=float(th.mean()), theta_hat_std=_std(th),
            elm_mean_mean=float(em.mean()), elm_mean_std=_std(em),
        ))
    return TableResult(scenario=scenario, cells=tuple(cells), records=records)


# --- Appropriateness audit ----------------------------------------------------


def run_appropriateness_audit(scenario: Scenario, jobs: int = 1,
                              progress=None) -> AuditReport:
    """Check the two appropriateness conditions from the fitted table.

    A1 (uncertainty non-increasing in N) is judged on across-runs means
    with a 2-pooled-std noise band; the strict-decrease clause and the
    all-zero degenerate case are reported separately.  A2 (convergence to
    the point mass at theta*) is judged by the Dirac check at the largest
    N and the trend of the total-variation distance, on the quantization
    grid, to the Dirac at theta*.
    """
    if scenario.runs < 5:
        raise ScenarioError("audit needs runs >= 5 for meaningful expectations")
    table = run_table(scenario, jobs=jobs, progress=progress)
    grid = get_simplex_grid(scenario.k, scenario.grid_m)
    truth_probs = quantized_probs(Dirac(scenario.theta_star), grid)
    entries = []
    for li, lam in enumerate(scenario.lambda_values):
        cells = [c for c in table.cells if c.lam == lam]
        means = np.array([c.entropy_mean for c in cells])
        stds = np.array([c.entropy_std for c in cells])
        band = 2.0 * np.sqrt(0.5 * (stds[:-1] ** 2 + stds[1:] ** 2))
        nonincreasing = bool(np.all(means[1:] <= means[:-1] + band))
        strict = bool(np.any(means[1:] < means[:-1] - band))
        degenerate = bool(np.all(means < 0.05))
        tv = []
        for ni in range(len(scenario.n_values)):
            recs = [r for r in table.records if r.lambda_index == li and r.n_index == ni]
            dists = [
                0.5 * float(np.abs(quantized_probs(r.q, grid) - truth_probs).sum())
                for r in recs
            ]
            tv.append(float(np.mean(dists)))
        last = [r for r in table.records
                if r.lambda_index == li and r.n_index == len(scenario.n_values) - 1]
        entries.append(AuditEntry(
            lam=lam,
            n_values=scenario.n_values,
            entropy_means=tuple(float(v) for v in means),
            entropy_stds=tuple(float(v) for v in stds),
            a1_nonincreasing=nonincreasing,
            a1_strict_decrease_somewhere=strict,
            a1_degenerate_constant=degenerate,
            a2_dirac_at_largest_n=all(r.is_dirac for r in last),
            tv_to_truth=tuple(tv),
            tv_trend_decreasing=bool(tv[-1] < tv[0] or tv[-1] < 1e-9),
        ))
    return AuditReport(scenario=scenario, entries=tuple(entries))


# --- Loss-vs-concentration curves ----------------------------------------------


def run_curve(theta_star: SimplexPoint, lambda_values, c_grid,
              alpha_shape) -> CurveResult:
    """Expected regularized level-2 risk of Q = Dir(c * shape) per (lambda, c).

    The level-1 loss is the log loss, matching the cross-entropy curves;
    everything is closed form, so the curve is deterministic.
    """
    c_grid = np.asarray(c_grid, dtype=np.float64)
    if c_grid.ndim != 1 or c_grid.size < 2:
        raise ValueError("c_grid must be a 1-D grid with at least 2 points")
    if np.any(c_grid <= 0) or np.any(np.diff(c_grid) <= 0):
        raise ValueError("c_grid must be positive and strictly ascending")
    shape = np.asarray(alpha_shape, dtype=np.float64)
    if shape.size != theta_star.k or np.any(shape <= 0):
        raise ValueError("alpha_shape must be positive with K entries")
    lambda_values = tuple(float(l) for l in lambda_values)
    values = np.empty((len(lambda_values), c_grid.size))
    for i, lam in enumerate(lambda_values):
        config = LossConfig(
            level1=Level1LossKind.LOG_LOSS,
            regularizer=NegEntropyUniformPrior(),
            lam=lam,
        )
        for j, c in enumerate(c_grid):
            q = Dirichlet(DirichletParams(c * shape))
            values[i, j] = expected_l2_risk_under_truth(config, q, theta_star)
    argmin_c = tuple(float(c_grid[int(np.argmin(values[i]))])
                     for i in range(len(lambda_values)))
    values.flags.writeable = False
    c_grid.flags.writeable = False
    return CurveResult(
        theta_star=theta_star, alpha_shape=shape,
        lambda_values=lambda_values, c_grid=c_grid,
        values=values, argmin_c=argmin_c,
    )


# --- Theorem probes ----------------------------------------------------------


def run_theorem_report(theta_star: SimplexPoint | None = None,
                       level1: Level1LossKind = Level1LossKind.BRIER,
                       data_scale: float = 0.5,
                       seed: int = 0,
                       opt: OptimizerConfig | None = None,
                       progress=None) -> TheoremReport:
    """Numeric checks of the three impossibility results.

    Probe 1: without a regularizer the fitted minimizer is always the point
    mass at the empirical frequency (20 samples over N in {10, 100, 1000}).
    Probe 3: the same holds at lambda = 1e-5.  Probe 2: at lambda = 10 and
    N = 1e5 the minimizer stays far from any point mass (entropy > 1 bit),
    5 replicates.
    """
    theta_star = theta_star or SimplexPoint(np.array([0.5, 0.5]))
    opt = opt or OptimizerConfig()
    k = theta_star.k
    grid = get_simplex_grid(k)
    base = SeededRng(seed, 0x7E0)

    def dirac_probe(name: str, config: LossConfig, probe_id: int) -> ProbeResult:
        details = []
        n_passed = 0
        n_cycle = (10, 100, 1000)
        for t in range(20):
            n = n_cycle[t % 3]
            labels = categorical_sample(theta_star, base.derive(probe_id, t, 0), size=n)
            fit = fit_elm(labels, k, config, opt=opt,
                          rng=base.derive(probe_id, t, 1), grid=grid)
            freq = np.bincount(labels, minlength=k) / n
            dev = float(np.abs(fit.predicted_mean.probs - freq).max())
            ok = fit.is_dirac and dev <= 0.02
            n_passed += ok
            details.append(dict(trial=t, n=n, is_dirac=fit.is_dirac,
                                max_mean_deviation=dev,
                                entropy_bits=fit.quantized_entropy_bits, passed=ok))
            if progress is not None:
                progress(f"{name} trial {t}: {'pass' if ok else 'FAIL'}")
        return ProbeResult(name=name, passed=n_passed == 20,
                           n_trials=20, n_passed=n_passed, details=tuple(details))

    probe1 = dirac_probe(
        "theorem-1-unregularized-dirac",
        LossConfig(level1=level1, regularizer=NoRegularizer(), lam=0.0,
                   data_scale=data_scale),
        probe_id=1,
    )
    probe3 = dirac_probe(
        "theorem-3-small-lambda-dirac",
        LossConfig(level1=level1, regularizer=NegEntropyUniformPrior(), lam=1e-5,
                   data_scale=data_scale),
        probe_id=3,
    )

    config2 = LossConfig(level1=level1, regularizer=NegEntropyUniformPrior(),
                         lam=10.0, data_scale=data_scale)
    details2 = []
    n_passed2 = 0
    for t in range(5):
        labels = categorical_sample(theta_star, base.derive(2, t, 0), size=100_000)
        fit = fit_elm(labels, k, config2, opt=opt,
                      rng=base.derive(2, t, 1), grid=grid)
        ok = (not fit.is_dirac) and fit.quantized_entropy_bits > 1.0
        n_passed2 += ok
        details2.append(dict(trial=t, n=100_000, is_dirac=fit.is_dirac,
                             entropy_bits=fit.quantized_entropy_bits, passed=ok))
        if progress is not None:
            progress(f"theorem-2 trial {t}: {'pass' if ok else 'FAIL'}")
    probe2 = ProbeResult(name="theorem-2-regularized-non-dirac",
                         passed=n_passed2 == 5, n_trials=5, n_passed=n_passed2,
                         details=tuple(details2))
    return TheoremReport(probes=(probe1, probe2, probe3))


# --- Persistence --------------------------------------------------------------


_LEVEL1_NAMES = {Level1LossKind.BRIER: "brier", Level1LossKind.LOG_LOSS: "log_loss"}


def _regularizer_to_json(reg: RegularizerKind):
    if isinstance(reg, NoRegularizer):
        return "none"
    if isinstance(reg, NegEntropyUniformPrior):
        return "neg_entropy"
    return {"kl_prior": [float(a) for a in reg.prior.alpha]}


def _regularizer_from_json(value) -> RegularizerKind:
    if value == "none":
        return NoRegularizer()
    if value == "neg_entropy":
        return NegEntropyUniformPrior()
    if isinstance(value, dict) and "kl_prior" in value:
        return KLToDirichlet(DirichletParams(np.asarray(value["kl_prior"], dtype=float)))
    raise ScenarioError(
        f"field 'regularizer': expected 'none', 'neg_entropy' or "
        f"{{'kl_prior': [...]}}, got {value!r}"
    )


def scenario_to_json(s: Scenario) -> dict:
    return {
        "scenario_id": s.scenario_id,
        "k": s.k,
        "theta_star": [float(p) for p in s.theta_star.probs],
        "n_values": list(s.n_values),
        "lambda_values": list(s.lambda_values),
        "runs": s.runs,
        "level1_loss": _LEVEL1_NAMES[s.level1],
        "regularizer": _regularizer_to_json(s.regularizer),
        "data_scale": s.data_scale,
        "grid_m": s.grid_m,
        "seed": s.seed,
        "theta_hat_index": s.theta_hat_index,
        "optimizer": {
            "starts": s.optimizer.starts,
            "max_iter": s.optimizer.max_iterations,
            "tol": s.optimizer.tolerance,
            "alpha_max": s.optimizer.alpha_max,
            "components": s.optimizer.components,
        },
    }


def _require(data: dict, key: str, kinds, where: str):
    if key not in data:
        raise ScenarioError(f"{where}: missing required field '{key}'")
    value = data[key]
    if not isinstance(value, kinds):
        raise ScenarioError(
            f"{where}: field '{key}' has type {type(value).__name__}, "
            f"expected {kinds if isinstance(kinds, type) else '/'.join(k.__name__ for k in kinds)}"
        )
    return value


def scenario_from_json(data: dict, where: str = "scenario") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError(f"{where}: top level must be a JSON object")
    k = _require(data, "k", int, where)
    theta = _require(data, "theta_star", list, where)
    if len(theta) != k:
        raise ScenarioError(f"{where}: field 'theta_star' has {len(theta)} entries, expected k={k}")
    level1_name = _require(data, "level1_loss", str, where)
    names = {v: kk for kk, v in _LEVEL1_NAMES.items()}
    if level1_name not in names:
        raise ScenarioError(
            f"{where}: field 'level1_loss' must be one of {sorted(names)}, got {level1_name!r}"
        )
    opt_data = _require(data, "optimizer", dict, where)
    optimizer = OptimizerConfig(
        starts=_require(opt_data, "starts", int, f"{where}.optimizer"),
        max_iterations=_require(opt_data, "max_iter", int, f"{where}.optimizer"),
        tolerance=float(_require(opt_data, "tol", (int, float), f"{where}.optimizer")),
        alpha_max=float(_require(opt_data, "alpha_max", (int, float), f"{where}.optimizer")),
        components=_require(opt_data, "components", int, f"{where}.optimizer"),
    )
    try:
        return Scenario(
            scenario_id=str(data.get("scenario_id", "scenario")),
            theta_star=SimplexPoint(np.asarray(theta, dtype=np.float64)),
            n_values=tuple(int(n) for n in _require(data, "n_values", list, where)),
            lambda_values=tuple(float(l) for l in _require(data, "lambda_values", list, where)),
            runs=_require(data, "runs", int, where),
            level1=names[level1_name],
            regularizer=_regularizer_from_json(_require(data, "regularizer", (str, dict), where)),
            data_scale=float(data.get("data_scale", 1.0)),
            grid_m=_require(data, "grid_m", int, where),
            seed=_require(data, "seed", int, where),
            optimizer=optimizer,
            theta_hat_index=int(data.get("theta_hat_index", 0)),
        )
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def read_scenario(path) -> Scenario:
    """Parse a scenario JSON file, with field-level diagnostics."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return scenario_from_json(data, where=str(path))


def write_scenario(s: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(scenario_to_json(s), fh, indent=2)
        fh.write("\n")


def _serialize_q(q: Level2Distribution) -> dict:
    if isinstance(q, Dirac):
        return {"type": "dirac", "point": [float(p) for p in q.point.probs]}
    if isinstance(q, Dirichlet):
        return {"type": "dirichlet", "alpha": [float(a) for a in q.params.alpha]}
    return {
        "type": "mixture",
        "weights": [float(w) for w in q.weights],
        "alphas": [[float(a) for a in c.alpha] for c in q.components],
    }


def _table_rows(result: TableResult) -> list[list]:
    sid = result.scenario.scenario_id
    return [
        [sid, repr(c.lam), c.n, c.run_count,
         repr(c.entropy_mean), repr(c.entropy_std),
         repr(c.theta_hat_mean), repr(c.theta_hat_std),
         repr(c.elm_mean_mean), repr(c.elm_mean_std)]
        for c in result.cells
    ]


TABLE_CSV_HEADER = [
    "scenario_id", "lambda", "n", "run_count",
    "entropy_mean", "entropy_std",
    "theta_hat_mean", "theta_hat_std",
    "elm_mean_mean", "elm_mean_std",
]


def write_results(result, path, format: str = "csv") -> None:
    """Persist any runner result; CSV for tables/curves, JSON for everything."""
    if format not in ("csv", "json"):
        raise ValueError(f"unknown format {format!r}")
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if isinstance(result, TableResult):
                writer.writerow(TABLE_CSV_HEADER)
                writer.writerows(_table_rows(result))
            elif isinstance(result, CurveResult):
                writer.writerow(["lambda", "c", "expected_l2_risk"])
                for i, lam in enumerate(result.lambda_values):
                    for j, c in enumerate(result.c_grid):
                        writer.writerow([repr(float(lam)), repr(float(c)),
                                         repr(float(result.values[i, j]))])
            else:
                raise ValueError(
                    f"{type(result).__name__} has no CSV form; use format='json'"
                )
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_result_to_json(result), fh, indent=2)
        fh.write("\n")


def _result_to_json(result) -> dict:
    if isinstance(result, TableResult):
        return {
            "scenario": scenario_to_json(result.scenario),
            "cells": [vars(c) for c in result.cells],
            "records": [
                {
                    "lambda": r.lam, "n": r.n, "run": r.run_index,
                    "seed": result.scenario.seed,
                    "stream_indices": [r.lambda_index, r.n_index, r.run_index],
                    "entropy_bits": r.entropy_bits,
                    "theta_hat": r.theta_hat, "elm_mean": r.elm_mean,
                    "is_dirac": r.is_dirac, "objective": r.objective,
                    "starts_agreeing": r.starts_agreeing,
                    "q": _serialize_q(r.q),
                }
                for r in result.records
            ],
        }
    if isinstance(result, CurveResult):
        return {
            "theta_star": [float(p) for p in result.theta_star.probs],
            "alpha_shape": [float(a) for a in result.alpha_shape],
            "lambda_values": list(result.lambda_values),
            "c_grid": [float(c) for c in result.c_grid],
            "values": [[float(v) for v in row] for row in result.values],
            "argmin_c": list(result.argmin_c),
        }
    if isinstance(result, AuditReport):
        return {
            "scenario": scenario_to_json(result.scenario),
            "entries": [
                {
                    "lambda": e.lam,
                    "n_values": list(e.n_values),
                    "entropy_means": list(e.entropy_means),
                    "entropy_stds": list(e.entropy_stds),
                    "a1_nonincreasing": e.a1_nonincreasing,
                    "a1_strict_decrease_somewhere": e.a1_strict_decrease_somewhere,
                    "a1_degenerate_constant": e.a1_degenerate_constant,
                    "a2_dirac_at_largest_n": e.a2_dirac_at_largest_n,
                    "a2_satisfied": e.a2_satisfied,
                    "tv_to_truth": list(e.tv_to_truth),
                    "tv_trend_decreasing": e.tv_trend_decreasing,
                }
                for e in result.entries
            ],
        }
    if isinstance(result, TheoremReport):
        return {
            "all_passed": result.all_passed,
            "probes": [
                {
                    "name": p.name, "passed": p.passed,
                    "n_trials": p.n_trials, "n_passed": p.n_passed,
                    "details": list(p.details),
                }
                for p in result.probes
            ],
        }
    raise ValueError(f"cannot serialize {type(result).__name__}")


# --- Built-in scenarios ---------------------------------------------------------


_TABLE_LAMBDAS = (0.0, 1e-5, 0.1, 0.5, 1.0, 10.0)
_TABLE_NS = (10, 100, 1_000, 10_000, 100_000)


def _table_scenario(scenario_id: str, probs, data_scale: float,
                    theta_hat_index: int, seed: int) -> Scenario:
    probs = np.asarray(probs, dtype=np.float64)
    return Scenario(
        scenario_id=scenario_id,
        theta_star=SimplexPoint(probs),
        n_values=_TABLE_NS,
        lambda_values=_TABLE_LAMBDAS,
        runs=10,
        level1=Level1LossKind.BRIER,
        regularizer=NegEntropyUniformPrior(),
        data_scale=data_scale,
        grid_m=DEFAULT_GRID_M[probs.size],
        seed=seed,
        optimizer=OptimizerConfig(),
        theta_hat_index=theta_hat_index,
    )


def builtin_scenario(name: str) -> Scenario:
    """The four built-in table scenarios (binary and 3-class ground truths)."""
    if name == "binary-05":
        return _table_scenario("binary-05", [0.5, 0.5], 0.5, 0, seed=20_05)
    if name == "binary-005":
        return _table_scenario("binary-005", [0.95, 0.05], 0.5, 1, seed=20_005)
    if name == "ternary-uniform":
        return _table_scenario("ternary-uniform", [1 / 3, 1 / 3, 1 / 3], 1.0, 0,
                               seed=30_333)
    if name == "ternary-imbalanced":
        return _table_scenario("ternary-imbalanced", [7 / 8, 1 / 16, 1 / 16], 1.0, 0,
                               seed=30_711)
    raise ScenarioError(f"unknown builtin scenario {name!r}")


def builtin_curve(name: str) -> tuple[SimplexPoint, tuple[float, ...], np.ndarray, np.ndarray]:
    """Arguments for run_curve matching the two loss-vs-concentration panels."""
    lambdas = (0.0, 0.25, 0.5, 0.75, 1.0)
    c_grid = np.geomspace(0.05, 500.0, 400)
    if name == "figure1-left":
        return (SimplexPoint(np.array([0.5, 0.5])), lambdas, c_grid,
                np.array([1.0, 1.0]))
    if name == "figure1-right":
        return (SimplexPoint(np.array([0.25, 0.75])), lambdas, c_grid,
                np.array([1.0, 3.0]))
    raise ScenarioError(f"unknown builtin curve {name!r}")


TABLE_BUILTINS = ("binary-05", "binary-005", "ternary-uniform", "ternary-imbalanced")
CURVE_BUILTINS = ("figure1-left", "figure1-right")
