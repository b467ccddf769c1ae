"""End-to-end experiment driver.

Sweeps a parameter grid (alpha outer, beta inner), solving once per
(alpha, beta) pair and reusing the resulting coefficients for every
threshold value m, clusters and scores each variant, and writes
machine-readable artifacts into the output directory:

* ``manifest.json`` — the fully resolved configuration.
* ``records.csv`` — one row per grid point (plain rows have an empty m
  cell, thresholded rows one per m).
* ``timings.csv`` — wall-clock seconds per grid point, kept separate so
  record files are byte-reproducible.
* ``summary.csv`` — the best-ACC and best-NMI grid points per variant.
* ``traces/`` — one residual trace file per solve.
* ``matrices/`` — coefficient/feature matrices in the raw-binary format.
* ``figures/`` — rendered trace and grid-performance figures.

Grid points are independent jobs; with ``workers > 1`` they run in a
process pool, and per-job seeds derive from (seed, grid index) so serial
and parallel runs produce identical records.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from . import solver
from .data import (
    DataMatrix,
    SyntheticSpec,
    generate_union_of_subspaces,
    load_dense_matrix,
    load_labels,
    save_dense_matrix,
)
from .graph import affinity_from_coefficients, threshold_m_largest
from .metrics import accuracy, nmi
from .spectral import cluster_affinity

PARAM_GRID_DEFAULT = (1e-5, 1e-4, 1e-3, 5e-3, 0.01, 0.05, 0.1, 0.5)
M_GRID_DEFAULT = (4, 5, 6, 7, 8, 9, 10)

RECORD_COLUMNS = ("alpha", "beta", "m", "acc", "nmi", "iters", "converged")
SUMMARY_COLUMNS = ("variant", "criterion", "alpha", "beta", "m", "acc", "nmi")


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved configuration of one experiment run.

    Exactly one data source must be given: ``data_path`` (with
    ``data_format`` and optional ``labels_path``) or ``synthetic``.
    An empty ``m_grid`` disables the thresholded variant.
    """

    k: int
    out_dir: str
    data_path: str | None = None
    data_format: str = "csv"
    labels_path: str | None = None
    synthetic: SyntheticSpec | None = None
    alpha_grid: tuple = PARAM_GRID_DEFAULT
    beta_grid: tuple = PARAM_GRID_DEFAULT
    m_grid: tuple = M_GRID_DEFAULT
    seed: int = 0
    epsilon: float = 1e-7
    max_iter: int = 500
    mu0: float = 1e-6
    rho: float = 1.1
    mu_max: float = 1e30
    workers: int = 1
    restarts: int = 20
    save_matrices: str = "best"
    figures: bool = True

    def __post_init__(self):
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        object.__setattr__(self, "beta_grid", tuple(float(b) for b in self.beta_grid))
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        if (self.data_path is None) == (self.synthetic is None):
            raise ValueError("exactly one of data_path and synthetic must be set")
        if self.k < 2:
            raise ValueError("cluster count k must be at least 2")
        if not self.alpha_grid or not self.beta_grid:
            raise ValueError("alpha and beta grids must be nonempty")
        if any(m < 1 for m in self.m_grid):
            raise ValueError("threshold values must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.workers < 1:
            raise ValueError("need at least one worker")
        if self.restarts < 1:
            raise ValueError("need at least one k-means restart")
        if self.save_matrices not in ("none", "best", "all"):
            raise ValueError("save_matrices must be one of none, best, all")


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one grid point; m is None for unthresholded rows.

    acc/nmi are None when ground-truth labels are unavailable or the
    grid point failed.
    """

    alpha: float
    beta: float
    m: int | None
    acc: float | None
    nmi: float | None
    iterations: int | None
    converged: bool | None
    seconds: float


@dataclass(frozen=True)
class ExperimentReport:
    """Return value of :func:`run_experiment`."""

    records: list
    failures: list
    out_dir: Path


@dataclass
class _GridOutcome:
    index: int
    alpha: float
    beta: float
    records: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)
    delta_history: list = field(default_factory=list)
    error: str | None = None
    C_star: np.ndarray | None = None
    F_star: np.ndarray | None = None


@dataclass(frozen=True)
class _GridContext:
    X: np.ndarray
    labels: np.ndarray | None
    k: int
    m_grid: tuple
    seed: int
    solver_kwargs: dict
    restarts: int
    return_matrices: bool


_WORKER_CTX: _GridContext | None = None


def _init_worker(ctx: _GridContext) -> None:
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _run_point_in_worker(point):
    return _run_grid_point(_WORKER_CTX, point)


def _score(labels_pred, labels_true):
    if labels_true is None:
        return None, None
    return accuracy(labels_pred, labels_true), nmi(labels_pred, labels_true)


def _run_grid_point(ctx: _GridContext, point) -> _GridOutcome:
    index, alpha, beta = point
    outcome = _GridOutcome(index=index, alpha=alpha, beta=beta)
    start = time.perf_counter()
    try:
        config = solver.SolverConfig(alpha=alpha, beta=beta, **ctx.solver_kwargs)
        result = solver.solve(ctx.X, config)
        solve_seconds = time.perf_counter() - start
        outcome.residual_history = result.residual_history
        outcome.delta_history = result.delta_history

        tic = time.perf_counter()
        affinity = affinity_from_coefficients(result.C_star)
        pred = cluster_affinity(affinity, ctx.k, seed=(ctx.seed, index, 0), restarts=ctx.restarts)
        acc_val, nmi_val = _score(pred, ctx.labels)
        outcome.records.append(
            RunRecord(
                alpha, beta, None, acc_val, nmi_val,
                result.iterations, result.converged,
                solve_seconds + time.perf_counter() - tic,
            )
        )
        for slot, m in enumerate(ctx.m_grid, start=1):
            tic = time.perf_counter()
            thresholded = affinity_from_coefficients(threshold_m_largest(result.C_star, m))
            pred_m = cluster_affinity(
                thresholded, ctx.k, seed=(ctx.seed, index, slot), restarts=ctx.restarts
            )
            acc_m, nmi_m = _score(pred_m, ctx.labels)
            outcome.records.append(
                RunRecord(
                    alpha, beta, m, acc_m, nmi_m,
                    result.iterations, result.converged,
                    time.perf_counter() - tic,
                )
            )
        if ctx.return_matrices:
            outcome.C_star = result.C_star
            outcome.F_star = result.F_star
    except Exception as exc:  # isolate grid-point failures; the sweep continues
        outcome.error = f"{type(exc).__name__}: {exc}"
        outcome.records = [
            RunRecord(alpha, beta, None, None, None, None, None, time.perf_counter() - start)
        ]
        outcome.C_star = None
        outcome.F_star = None
    return outcome


def _resolve_source(config: ExperimentConfig):
    if config.synthetic is not None:
        return generate_union_of_subspaces(config.synthetic)
    X = load_dense_matrix(config.data_path, config.data_format)
    labels = None
    if config.labels_path is not None:
        labels = load_labels(config.labels_path)
        if labels.shape[0] != X.n:
            raise ValueError(
                f"label count {labels.shape[0]} does not match sample count {X.n}"
            )
    return X, labels


def _fmt_param(x) -> str:
    return format(float(x), ".12g")


def _fmt_metric(x) -> str:
    return "" if x is None else format(float(x), ".6f")


def _fmt_flag(x) -> str:
    return "" if x is None else ("true" if x else "false")


def _record_row(record: RunRecord) -> str:
    return ",".join(
        (
            _fmt_param(record.alpha),
            _fmt_param(record.beta),
            "" if record.m is None else str(record.m),
            _fmt_metric(record.acc),
            _fmt_metric(record.nmi),
            "" if record.iterations is None else str(record.iterations),
            _fmt_flag(record.converged),
        )
    )


def _write_lines(path: Path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _write_records(path: Path, records) -> None:
    _write_lines(path, [",".join(RECORD_COLUMNS), *(_record_row(r) for r in records)])


def _write_timings(path: Path, records) -> None:
    lines = ["alpha,beta,m,seconds"]
    for r in records:
        m_cell = "" if r.m is None else str(r.m)
        lines.append(
            f"{_fmt_param(r.alpha)},{_fmt_param(r.beta)},{m_cell},{r.seconds:.6f}"
        )
    _write_lines(path, lines)


def _write_failures(path: Path, failures) -> None:
    lines = ["index,alpha,beta,error"]
    for index, alpha, beta, message in failures:
        safe = message.replace('"', "'")
        lines.append(f'{index},{_fmt_param(alpha)},{_fmt_param(beta)},"{safe}"')
    _write_lines(path, lines)


def _best_record(records, key):
    best = None
    best_val = -np.inf
    for r in records:
        val = getattr(r, key)
        if val is not None and val > best_val:
            best, best_val = r, val
    return best


def _summary_rows(records):
    rows = []
    for variant, subset in (
        ("agcsc", [r for r in records if r.m is None]),
        ("tagcsc", [r for r in records if r.m is not None]),
    ):
        for criterion in ("acc", "nmi"):
            best = _best_record(subset, criterion)
            if best is None:
                continue
            rows.append(
                ",".join(
                    (
                        variant,
                        f"best_{criterion}",
                        _fmt_param(best.alpha),
                        _fmt_param(best.beta),
                        "" if best.m is None else str(best.m),
                        _fmt_metric(best.acc),
                        _fmt_metric(best.nmi),
                    )
                )
            )
    return rows


def _write_trace(path: Path, residual_history, delta_history=None) -> None:
    if delta_history is not None:
        lines = ["# columns: max|C-Z|, max|C1-1|, dC_fro2, dF_fro2, dZ_fro2 (row t = iteration t)"]
        for (r1, r2), (dc, df, dz) in zip(residual_history, delta_history):
            lines.append(
                f"{r1:.12e},{r2:.12e},{dc:.12e},{df:.12e},{dz:.12e}"
            )
    else:
        lines = ["# columns: max|C-Z|, max|C1-1| (row t = iteration t)"]
        for r1, r2 in residual_history:
            lines.append(f"{r1:.12e},{r2:.12e}")
    _write_lines(path, lines)


def emit_trace(result, path, include_deltas: bool = False) -> None:
    """Write the per-iteration residual trace of a solver result.

    One row per completed iteration; a leading header line documents the
    columns. With ``include_deltas`` the squared Frobenius change of
    each iterate is appended to every row.
    """
    _write_trace(
        Path(path),
        result.residual_history,
        result.delta_history if include_deltas else None,
    )


def _trace_name(index: int, alpha: float, beta: float) -> str:
    return f"trace_{index:03d}_alpha{alpha:g}_beta{beta:g}.csv"


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run the full grid sweep and write all artifacts.

    The solver runs exactly once per (alpha, beta) pair; thresholded
    rows reuse that solve's coefficients. Outputs are aggregated in grid
    order (alpha outer, beta inner, m innermost) regardless of worker
    scheduling, and identical configs and seeds reproduce record files
    byte for byte.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "traces").mkdir(exist_ok=True)

    X, labels = _resolve_source(config)
    _write_manifest(out / "manifest.json", config, X)

    ctx = _GridContext(
        X=np.asarray(X.values),
        labels=labels,
        k=config.k,
        m_grid=config.m_grid,
        seed=config.seed,
        solver_kwargs=dict(
            mu0=config.mu0,
            rho=config.rho,
            mu_max=config.mu_max,
            epsilon=config.epsilon,
            max_iter=config.max_iter,
        ),
        restarts=config.restarts,
        return_matrices=config.save_matrices != "none",
    )
    points = [
        (index, alpha, beta)
        for index, (alpha, beta) in enumerate(product(config.alpha_grid, config.beta_grid))
    ]

    matrices_dir = out / "matrices"
    if config.save_matrices != "none":
        matrices_dir.mkdir(exist_ok=True)

    outcomes = []
    best_matrices = None  # (acc or None, index, C_star, F_star)
    if config.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(
            max_workers=config.workers, initializer=_init_worker, initargs=(ctx,)
        ) as pool:
            stream = pool.map(_run_point_in_worker, points)
            outcomes, best_matrices = _collect(stream, config, matrices_dir)
    else:
        stream = (_run_grid_point(ctx, p) for p in points)
        outcomes, best_matrices = _collect(stream, config, matrices_dir)

    if config.save_matrices == "best" and best_matrices is not None:
        _, index, C_star, F_star = best_matrices
        save_dense_matrix(C_star, matrices_dir / "best_C.bin", "raw-binary")
        save_dense_matrix(F_star, matrices_dir / "best_F.bin", "raw-binary")
        _write_lines(matrices_dir / "best_point.txt", [f"grid index {index}"])

    records = [r for o in outcomes for r in o.records]
    failures = [(o.index, o.alpha, o.beta, o.error) for o in outcomes if o.error]

    _write_records(out / "records.csv", records)
    _write_timings(out / "timings.csv", records)
    if failures:
        _write_failures(out / "failures.csv", failures)
    _write_lines(out / "summary.csv", [",".join(SUMMARY_COLUMNS), *_summary_rows(records)])
    for o in outcomes:
        if o.error is None:
            _write_trace(out / "traces" / _trace_name(o.index, o.alpha, o.beta), o.residual_history)

    if config.figures:
        from . import plots

        plots.render_figures(out, config, records, outcomes)

    return ExperimentReport(records=records, failures=failures, out_dir=out)


def _collect(stream, config: ExperimentConfig, matrices_dir: Path):
    """Drain grid outcomes in submission order, persisting or pruning the
    heavyweight matrices as they arrive so memory stays bounded."""
    outcomes = []
    best = None
    for o in stream:
        if o.C_star is not None:
            if config.save_matrices == "all":
                save_dense_matrix(o.C_star, matrices_dir / f"point_{o.index:03d}_C.bin", "raw-binary")
                save_dense_matrix(o.F_star, matrices_dir / f"point_{o.index:03d}_F.bin", "raw-binary")
            elif config.save_matrices == "best":
                acc_val = o.records[0].acc
                if best is None or (acc_val is not None and (best[0] is None or acc_val > best[0])):
                    best = (acc_val, o.index, o.C_star, o.F_star)
            o.C_star = None
            o.F_star = None
        outcomes.append(o)
    return outcomes, best


def _write_manifest(path: Path, config: ExperimentConfig, X: DataMatrix) -> None:
    if config.synthetic is not None:
        source = {
            "synthetic": {
                "k": config.synthetic.k,
                "n_per": config.synthetic.n_per,
                "d": config.synthetic.d,
                "r": config.synthetic.r,
                "sigma": config.synthetic.sigma,
                "seed": config.synthetic.seed,
            }
        }
    else:
        source = {
            "path": config.data_path,
            "format": config.data_format,
            "labels": config.labels_path,
        }
    manifest = {
        "data": source,
        "n": X.n,
        "d": X.d,
        "k": config.k,
        "alpha_grid": list(config.alpha_grid),
        "beta_grid": list(config.beta_grid),
        "m_grid": list(config.m_grid),
        "seed": config.seed,
        "epsilon": config.epsilon,
        "max_iter": config.max_iter,
        "mu0": config.mu0,
        "rho": config.rho,
        "mu_max": config.mu_max,
        "workers": config.workers,
        "restarts": config.restarts,
        "save_matrices": config.save_matrices,
        "figures": config.figures,
    }
    _write_lines(path, [json.dumps(manifest, indent=2, sort_keys=True)])
