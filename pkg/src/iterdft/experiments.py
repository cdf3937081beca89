"""Seeded Monte-Carlo sweeps and single-run demos.

Every study produces a :class:`StudyTable` holding one raw row per
(grid point, replicate) plus a per-point summary.  Replicate seeds come
from :func:`iterdft.signals.derive_seed` keyed on (study, point index,
replicate index), so a row can be regenerated from those values and the
base seed alone, and serial and parallel execution give identical tables.
"""
from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import charts
from .engine import EngineConfig, RunResult, run, run_matrix
from .errors import InvalidArgumentError
from .metrics import MseReport, mse_ratio, score_trace
from .signals import SpikeModel, derive_seed, gaussian_vector, spike_matrix, spike_plus_noise
from .sparsify import SparsifierSpec

__all__ = [
    "Study",
    "SweepSpec",
    "StudyTable",
    "run_sweep",
    "convergence_vs_n",
    "convergence_vs_p",
    "mse_vs_cycles",
    "mse_vs_iteration",
    "mse_vs_noise",
    "DemoBundle",
    "vector_demo",
    "matrix_demo",
    "format_value",
    "write_csv",
]


class Study(enum.Enum):
    CONVERGENCE_VS_N = "convergence_vs_n"
    CONVERGENCE_VS_P = "convergence_vs_p"
    MSE_VS_CYCLES = "mse_vs_cycles"
    MSE_VS_ITERATION = "mse_vs_iteration"
    MSE_VS_NOISE = "mse_vs_noise"
    VECTOR_DEMO = "vector_demo"
    MATRIX_DEMO = "matrix_demo"

    @property
    def key(self) -> int:
        # stable numeric id used in seed derivation; never reorder
        return list(Study).index(self) + 1


CONVERGENCE_STUDIES = (Study.CONVERGENCE_VS_N, Study.CONVERGENCE_VS_P)
MSE_STUDIES = (Study.MSE_VS_CYCLES, Study.MSE_VS_ITERATION, Study.MSE_VS_NOISE)

DEFAULT_N_GRID = tuple(range(50, 1001, 50))
DEFAULT_P_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
DEFAULT_CYCLES_GRID = (2, 4, 8, 12, 16, 20, 24, 28, 32, 40)
DEFAULT_NOISE_GRID = (0.25, 0.5, 1.0, 2.0)

MEAN_ENGINE = EngineConfig(SparsifierSpec.mean(), SparsifierSpec.mean(), max_iter=50)


@dataclass(frozen=True)
class SweepSpec:
    """A study, its grid, and the shared run settings.

    Grid points are dicts of parameter overrides: ``n`` and ``p`` for the
    convergence studies, :class:`SpikeModel` field names for the MSE ones.
    """

    study: Study
    grid: tuple[dict, ...]
    replicates: int = 50
    base_seed: int = 0
    engine: EngineConfig = MEAN_ENGINE
    model: SpikeModel | None = None
    n: int = 500
    carry_forward: bool = True

    def __post_init__(self):
        if not self.grid:
            raise InvalidArgumentError("sweep grid is empty")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise InvalidArgumentError("replicates must be >= 1")
        if self.base_seed < 0:
            raise InvalidArgumentError("base seed must be non-negative")
        if self.study in MSE_STUDIES and self.model is None:
            raise InvalidArgumentError(f"{self.study.value} needs a spike model")
        if self.study not in CONVERGENCE_STUDIES + MSE_STUDIES:
            raise InvalidArgumentError(f"{self.study.value} is not a sweep study")


@dataclass
class StudyTable:
    study: Study
    base_seed: int
    columns: list[str]
    rows: list[dict]
    summary_columns: list[str]
    summary: list[dict]
    extra: dict[str, tuple[list[str], list[dict]]] = field(default_factory=dict)
    chart: str = ""

    @property
    def stem(self) -> str:
        return f"{self.study.value}_{self.base_seed}"

    def column(self, name: str, summary: bool = True) -> list:
        return [r[name] for r in (self.summary if summary else self.rows)]

    def write(self, outdir) -> list[Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = [write_csv(outdir / f"{self.stem}.csv", self.columns, self.rows)]
        written.append(write_csv(outdir / f"{self.stem}_summary.csv", self.summary_columns, self.summary))
        for name, (cols, rows) in self.extra.items():
            written.append(write_csv(outdir / f"{self.stem}_{name}.csv", cols, rows))
        if self.chart:
            path = outdir / f"{self.stem}.svg"
            path.write_text(self.chart, encoding="utf-8")
            written.append(path)
        return written


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{float(v):.17g}"
    return str(v).replace(",", ";").replace("\n", " ")


def write_csv(path, columns: list[str], rows: list[dict]) -> Path:
    path = Path(path)
    lines = [",".join(columns)]
    lines.extend(",".join(format_value(r.get(c)) for c in columns) for r in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


# -- replicate workers ------------------------------------------------------

_CONV_COLUMNS = ["point", "n", "p", "replicate", "seed", "iterations", "converged", "error"]
_MSE_COLUMNS = [
    "point", "b", "lam", "n", "alpha_min", "alpha_max", "sigma2", "replicate", "seed",
    "iterations", "converged", "mse_first", "mse_converged", "ratio", "mse_first_zero", "error",
]


@dataclass(frozen=True)
class _Task:
    study: Study
    point: int
    params: dict
    replicate: int
    seed: int
    engine: EngineConfig
    model: SpikeModel | None
    n: int


def _convergence_replicate(task: _Task) -> tuple[dict, list[float]]:
    n = int(task.params.get("n", task.n))
    engine = task.engine
    p = task.params.get("p")
    if p is not None:
        spec = SparsifierSpec.proportion(p)
        engine = replace(engine, h_spec=spec, g_spec=spec)
    row = {
        "point": task.point, "n": n, "p": engine.h_spec.p,
        "replicate": task.replicate, "seed": task.seed,
    }
    try:
        x = gaussian_vector(n, 1.0, task.seed)
        result = run(x, replace(engine, trace="patterns"))
        row.update(iterations=result.iterations_completed, converged=result.converged, error="")
    except Exception as err:  # recorded in-row; the sweep keeps going
        row.update(iterations=None, converged=False, error=f"{type(err).__name__}: {err}")
    return row, []


def _mse_replicate(task: _Task) -> tuple[dict, list[float]]:
    model = replace(task.model, **task.params)
    row = {
        "point": task.point, "b": model.b, "lam": model.lam, "n": model.n,
        "alpha_min": model.alpha_min, "alpha_max": model.alpha_max, "sigma2": model.sigma2,
        "replicate": task.replicate, "seed": task.seed,
    }
    try:
        x, s, _ = spike_plus_noise(model, task.seed)
        result = run(x, replace(task.engine, trace="patterns"), truth=s)
        report = score_trace(result.trace, s)
        row.update(
            iterations=result.iterations_completed, converged=result.converged,
            mse_first=report.mse_first, mse_converged=report.mse_converged,
            ratio=report.ratio, mse_first_zero=report.first_is_zero, error="",
        )
        return row, list(report.mse_per_iteration)
    except Exception as err:
        row.update(iterations=None, converged=False, error=f"{type(err).__name__}: {err}")
        return row, []


def _work(task: _Task):
    if task.study in CONVERGENCE_STUDIES:
        return _convergence_replicate(task)
    return _mse_replicate(task)


def _tasks(spec: SweepSpec) -> list[_Task]:
    return [
        _Task(
            spec.study, i, dict(point), r,
            derive_seed(spec.base_seed, spec.study.key, i, r),
            spec.engine, spec.model, spec.n,
        )
        for i, point in enumerate(spec.grid)
        for r in range(spec.replicates)
    ]


def default_workers() -> int:
    env = os.environ.get("ITERDFT_WORKERS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise InvalidArgumentError(f"ITERDFT_WORKERS must be an integer, got {env!r}") from None
        if value < 1:
            raise InvalidArgumentError("ITERDFT_WORKERS must be >= 1")
        return value
    return 1


def _execute(tasks: list[_Task], workers: int):
    if workers <= 1 or len(tasks) <= 1:
        results = [_work(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_work, tasks, chunksize=chunk))
    paired = sorted(zip(tasks, results), key=lambda tr: (tr[0].point, tr[0].replicate))
    return [(t, row, curve) for t, (row, curve) in paired]


# -- summaries ----------------------------------------------------------------

def _finite_mean(values) -> float:
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else math.nan


def _summarize(spec: SweepSpec, outcomes, keys: list[str]) -> list[dict]:
    out = []
    for i in range(len(spec.grid)):
        rows = [row for t, row, _ in outcomes if t.point == i]
        s = {k: rows[0][k] for k in keys}
        s.update(
            point=i,
            replicates=len(rows),
            converged_fraction=sum(bool(r["converged"]) for r in rows) / len(rows),
            failures=sum(bool(r["error"]) for r in rows),
            mean_iterations=_finite_mean(r["iterations"] for r in rows),
        )
        if spec.study in MSE_STUDIES:
            s["mean_ratio"] = _finite_mean(r.get("ratio") for r in rows)
        out.append(s)
    return out


def iteration_curve(curves: list[list[float]], carry_forward: bool = True) -> list[dict]:
    """Average ratio ``MSE_i / MSE_1`` at each iteration index.

    With ``carry_forward`` a run that stopped early contributes its final
    value to every later iteration; otherwise only runs still going at
    iteration ``i`` are averaged there.
    """
    curves = [c for c in curves if c]
    if not curves:
        return []
    length = max(len(c) for c in curves)
    rows = []
    for i in range(length):
        if carry_forward:
            vals = [mse_ratio(c[min(i, len(c) - 1)], c[0]) for c in curves]
        else:
            vals = [mse_ratio(c[i], c[0]) for c in curves if len(c) > i]
        rows.append({"iteration": i + 1, "mean_ratio": float(np.mean(vals)), "runs": len(vals)})
    return rows


def run_sweep(spec: SweepSpec, workers: int | None = None) -> StudyTable:
    """Run every replicate of ``spec`` and assemble the tables and chart."""
    workers = default_workers() if workers is None else workers
    outcomes = _execute(_tasks(spec), workers)
    rows = [row for _, row, _ in outcomes]
    study = spec.study

    if study in CONVERGENCE_STUDIES:
        columns = _CONV_COLUMNS
        param = "n" if study is Study.CONVERGENCE_VS_N else "p"
        keys = ["n", "p"]
        summary = _summarize(spec, outcomes, keys)
        summary_columns = ["point", *keys, "replicates", "converged_fraction", "failures", "mean_iterations"]
        chart = charts.line_chart(
            [("", [s[param] for s in summary], [s["mean_iterations"] for s in summary])],
            title="Mean iterations until convergence", xlabel=param, ylabel="mean iterations",
        )
        return StudyTable(study, spec.base_seed, columns, rows, summary_columns, summary, chart=chart)

    keys = ["b", "lam", "n", "alpha_min", "alpha_max", "sigma2"]
    summary = _summarize(spec, outcomes, keys)
    summary_columns = ["point", *keys, "replicates", "converged_fraction", "failures", "mean_iterations", "mean_ratio"]
    extra = {}
    if study is Study.MSE_VS_ITERATION:
        trace_rows = [
            {"point": t.point, "replicate": t.replicate, "iteration": k + 1,
             "mse": m, "ratio": mse_ratio(m, curve[0])}
            for t, _, curve in outcomes for k, m in enumerate(curve)
        ]
        extra["trace"] = (["point", "replicate", "iteration", "mse", "ratio"], trace_rows)
        series = []
        curve_rows = []
        for i in range(len(spec.grid)):
            curve = iteration_curve([c for t, _, c in outcomes if t.point == i], spec.carry_forward)
            curve_rows.extend({"point": i, **c} for c in curve)
            series.append((f"point {i}", [c["iteration"] for c in curve], [c["mean_ratio"] for c in curve]))
        extra["curve"] = (["point", "iteration", "mean_ratio", "runs"], curve_rows)
        chart = charts.line_chart(series, title="Average MSE ratio per iteration", xlabel="iteration", ylabel="MSE ratio")
    else:
        param = "b" if study is Study.MSE_VS_CYCLES else "sigma2"
        chart = charts.line_chart(
            [("", [s[param] for s in summary], [s["mean_ratio"] for s in summary])],
            title="Average MSE ratio", xlabel=param, ylabel="MSE ratio",
        )
    return StudyTable(study, spec.base_seed, _MSE_COLUMNS, rows, summary_columns, summary, extra, chart)


# -- study entry points --------------------------------------------------------

def _proportion_engine(p: float, max_iter: int) -> EngineConfig:
    spec = SparsifierSpec.proportion(p)
    return EngineConfig(spec, spec, max_iter=max_iter)


def convergence_vs_n(
    n_values=DEFAULT_N_GRID, p: float = 0.5, replicates: int = 50, base_seed: int = 0,
    max_iter: int = 50, workers: int | None = None,
) -> StudyTable:
    """Iterations to a stable pattern for N(0, 1) vectors of each length."""
    spec = SweepSpec(
        Study.CONVERGENCE_VS_N, tuple({"n": int(n)} for n in n_values), replicates, base_seed,
        _proportion_engine(p, max_iter),
    )
    return run_sweep(spec, workers)


def convergence_vs_p(
    p_values=DEFAULT_P_GRID, n: int = 500, replicates: int = 50, base_seed: int = 0,
    max_iter: int = 50, workers: int | None = None,
) -> StudyTable:
    """Iterations to a stable pattern at fixed length for each sparse proportion."""
    spec = SweepSpec(
        Study.CONVERGENCE_VS_P, tuple({"p": float(p)} for p in p_values), replicates, base_seed,
        _proportion_engine(0.5, max_iter), n=n,
    )
    return run_sweep(spec, workers)


def _mean_engine(max_iter: int) -> EngineConfig:
    return replace(MEAN_ENGINE, max_iter=max_iter)


def mse_vs_cycles(
    b_values=DEFAULT_CYCLES_GRID, model: SpikeModel = SpikeModel(), replicates: int = 50,
    base_seed: int = 0, max_iter: int = 50, workers: int | None = None,
) -> StudyTable:
    """Average converged/first-pass MSE ratio for each cycle count."""
    spec = SweepSpec(
        Study.MSE_VS_CYCLES, tuple({"b": int(b)} for b in b_values), replicates, base_seed,
        _mean_engine(max_iter), model,
    )
    return run_sweep(spec, workers)


def mse_vs_iteration(
    model: SpikeModel = SpikeModel(b=20), replicates: int = 50, base_seed: int = 0,
    max_iter: int = 50, carry_forward: bool = True, workers: int | None = None,
) -> StudyTable:
    """Average MSE ratio after each iteration at a single model setting.

    The ``curve`` extra table holds the averaged curve; ``trace`` holds the
    raw per-iteration MSE of every replicate.
    """
    spec = SweepSpec(
        Study.MSE_VS_ITERATION, ({},), replicates, base_seed, _mean_engine(max_iter), model,
        carry_forward=carry_forward,
    )
    return run_sweep(spec, workers)


def mse_vs_noise(
    sigma2_values=DEFAULT_NOISE_GRID, model: SpikeModel = SpikeModel(b=20), replicates: int = 50,
    base_seed: int = 0, max_iter: int = 50, workers: int | None = None,
) -> StudyTable:
    """Average MSE ratio for each noise variance."""
    spec = SweepSpec(
        Study.MSE_VS_NOISE, tuple({"sigma2": float(v)} for v in sigma2_values), replicates,
        base_seed, _mean_engine(max_iter), model,
    )
    return run_sweep(spec, workers)


# -- demos -------------------------------------------------------------------

@dataclass
class DemoBundle:
    """Everything needed to redraw a single-run figure."""

    kind: str
    model: SpikeModel
    seed: int
    signal: np.ndarray
    noise: np.ndarray
    input: np.ndarray
    result: RunResult
    report: MseReport

    @property
    def stem(self) -> str:
        return f"{self.kind}_demo_{self.seed}"

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "model": asdict(self.model),
            "iterations": self.result.iterations_completed,
            "converged": self.result.converged,
            "mse_per_iteration": list(self.report.mse_per_iteration),
            "mse_first": self.report.mse_first,
            "mse_converged": self.report.mse_converged,
            "ratio": None if math.isinf(self.report.ratio) else self.report.ratio,
        }

    def chart(self) -> str:
        outputs = self.result.trace.outputs
        mses = self.report.mse_per_iteration
        if self.kind == "vector":
            panels = [("signal", self.signal), ("noise", self.noise), ("input", self.input)]
            panels += [(f"h() output, iteration {i + 1}, MSE {m:.4g}", o) for i, (o, m) in enumerate(zip(outputs, mses))]
            return charts.signal_panels(panels, reference=self.signal)
        picks = sorted({0, len(outputs) - 1})
        panels = [("signal", self.signal), ("noise", self.noise), ("input", self.input)]
        panels += [(f"iteration {i + 1}, MSE {mses[i]:.3g}", outputs[i]) for i in picks]
        return charts.heatmap_grid(panels, columns=3, cell=2 if self.signal.shape[0] <= 200 else 1)

    def write(self, outdir) -> list[Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        outputs = self.result.trace.outputs
        if self.kind == "vector":
            cols = ["index", "signal", "noise", "input"] + [f"h_{i + 1}" for i in range(len(outputs))]
            rows = []
            for j in range(self.signal.size):
                row = {"index": j, "signal": self.signal[j], "noise": self.noise[j], "input": self.input[j]}
                row.update({f"h_{i + 1}": o[j] for i, o in enumerate(outputs)})
                rows.append(row)
            written.append(write_csv(outdir / f"{self.stem}.csv", cols, rows))
        else:
            mdir = outdir / self.stem
            mdir.mkdir(exist_ok=True)
            mats = [("signal", self.signal), ("noise", self.noise), ("input", self.input)]
            mats += [(f"h_{i + 1:02d}", o) for i, o in enumerate(outputs)]
            for name, m in mats:
                path = mdir / f"{name}.csv"
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write("\n".join(",".join(format_value(v) for v in r) for r in m) + "\n")
                written.append(path)
        path = outdir / f"{self.stem}.json"
        path.write_text(json.dumps(self.summary(), indent=2) + "\n", encoding="utf-8")
        written.append(path)
        path = outdir / f"{self.stem}.svg"
        path.write_text(self.chart(), encoding="utf-8")
        written.append(path)
        return written


def vector_demo(model: SpikeModel = SpikeModel(), seed: int = 0, engine: EngineConfig = MEAN_ENGINE) -> DemoBundle:
    """One spike-plus-noise vector run with every h() output kept."""
    x, s, eps = spike_plus_noise(model, seed)
    result = run(x, replace(engine, trace="full"))
    return DemoBundle("vector", model, seed, s, eps, x, result, score_trace(result.trace, s))


def matrix_demo(model: SpikeModel = SpikeModel(), seed: int = 0, engine: EngineConfig = MEAN_ENGINE) -> DemoBundle:
    """One rank-one spike matrix plus noise run with every h() output kept."""
    X, S, E = spike_matrix(model, seed)
    result = run_matrix(X, replace(engine, trace="full"))
    return DemoBundle("matrix", model, seed, S, E, X, result, score_trace(result.trace, S))
