"""Command-line interface: demos, sweeps and denoising of CSV signals.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .engine import EngineConfig, run, run_matrix
from .errors import InvalidArgumentError
from .experiments import format_value
from .signals import SpikeModel
from .sparsify import SparsifierSpec

__all__ = ["main", "read_signal", "write_signal", "MalformedSignalError"]


class MalformedSignalError(InvalidArgumentError):
    """A signal file is empty, ragged, or holds non-numeric or non-finite cells."""


def read_signal(path) -> np.ndarray:
    """Read a one-column CSV as a vector, or a rectangular grid as a matrix."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise MalformedSignalError(f"{path}: empty signal file")
    width = len(rows[0])
    for i, r in enumerate(rows, 1):
        if len(r) != width:
            raise MalformedSignalError(f"{path}: row {i} has {len(r)} cells, expected {width}")
    try:
        data = np.array([[float(c) for c in r] for r in rows])
    except ValueError as err:
        raise MalformedSignalError(f"{path}: {err}") from None
    if not np.all(np.isfinite(data)):
        raise MalformedSignalError(f"{path}: non-finite value")
    return data[:, 0].copy() if width == 1 else data


def write_signal(path, x) -> None:
    """Write a vector as one column or a matrix as a grid, 17 significant digits."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        lines = [format_value(v) for v in x]
    elif x.ndim == 2:
        lines = [",".join(format_value(v) for v in row) for row in x]
    else:
        raise InvalidArgumentError(f"cannot write a {x.ndim}-D signal")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# -- argument types ----------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not np.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _nonneg_float(text: str) -> float:
    value = _float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a value >= 0, got {value}")
    return value


def _proportion(text: str) -> float:
    value = _float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"proportion must lie in (0, 1), got {value}")
    return value


def _list_of(kind):
    def parse(text: str) -> list:
        items = [t for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("expected a comma-separated list")
        return [kind(t.strip()) for t in items]
    return parse


# -- parser ------------------------------------------------------------------

def _add_engine_flags(p: argparse.ArgumentParser, sparsifiers: bool) -> None:
    p.add_argument("--max-iter", type=_positive_int, default=50, help="maximum iterations (default 50)")
    if sparsifiers:
        p.add_argument("--h", choices=["mean", "prop"], default="mean", help="time-domain sparsifier")
        p.add_argument("--g", choices=["mean", "prop"], default="mean", help="frequency-domain sparsifier")
        p.add_argument("--p", type=_proportion, default=0.5, help="proportion for 'prop' sparsifiers")


def _add_model_flags(p: argparse.ArgumentParser, cycles: int) -> None:
    p.add_argument("--alpha", type=_float, default=None, help="constant spike amplitude (sets both bounds)")
    p.add_argument("--alpha-min", type=_float, default=2.5)
    p.add_argument("--alpha-max", type=_float, default=2.5)
    p.add_argument("--cycles", type=_positive_int, default=cycles, help="number of spikes b")
    p.add_argument("--period", type=_positive_int, default=8, help="spike period lambda")
    p.add_argument("--noise-var", type=_nonneg_float, default=0.5, help="noise variance sigma^2")


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--replicates", type=_positive_int, default=50)
    p.add_argument("--seed", type=_nonneg_int, default=0, help="base seed")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker processes (default: $ITERDFT_WORKERS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iterdft", description="Iterated DFT/IDFT sparsification: denoising, demos and sweeps."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("denoise", help="denoise a CSV vector or matrix")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="CSV for the final h() output")
    _add_engine_flags(p, sparsifiers=True)
    p.add_argument("--trace-mode", choices=["auto", "full", "patterns"], default="patterns",
                   help="'full' also writes every h() output to <out>_trace/")
    p.add_argument("--seed", type=_nonneg_int, default=0, help="accepted for uniformity; denoise draws no randomness")

    for name, cycles, helptext in (
        ("demo-vector", 16, "single spike-vector run with every iteration written"),
        ("demo-matrix", 16, "single spike-matrix run with every iteration written"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_model_flags(p, cycles)
        _add_engine_flags(p, sparsifiers=False)
        p.add_argument("--seed", type=_nonneg_int, default=0)
        p.add_argument("--out", type=Path, required=True, help="output directory")

    p = sub.add_parser("sweep-convergence-n", help="mean iterations vs. vector length")
    p.add_argument("--n-values", type=_list_of(_positive_int), default=list(experiments.DEFAULT_N_GRID))
    p.add_argument("--p", type=_proportion, default=0.5)
    _add_engine_flags(p, sparsifiers=False)
    _add_sweep_flags(p)

    p = sub.add_parser("sweep-convergence-p", help="mean iterations vs. sparse proportion")
    p.add_argument("--p-values", type=_list_of(_proportion), default=list(experiments.DEFAULT_P_GRID))
    p.add_argument("--n", type=_positive_int, default=500)
    _add_engine_flags(p, sparsifiers=False)
    _add_sweep_flags(p)

    p = sub.add_parser("sweep-mse-cycles", help="MSE ratio vs. number of cycles")
    p.add_argument("--cycles-values", type=_list_of(_positive_int), default=list(experiments.DEFAULT_CYCLES_GRID))
    _add_model_flags(p, 20)
    _add_engine_flags(p, sparsifiers=False)
    _add_sweep_flags(p)

    p = sub.add_parser("sweep-mse-iteration", help="MSE ratio after each iteration")
    _add_model_flags(p, 20)
    _add_engine_flags(p, sparsifiers=False)
    p.add_argument("--drop-converged", action="store_true",
                   help="average only runs still active at each iteration")
    _add_sweep_flags(p)

    p = sub.add_parser("sweep-mse-noise", help="MSE ratio vs. noise variance")
    p.add_argument("--noise-values", type=_list_of(_nonneg_float), default=list(experiments.DEFAULT_NOISE_GRID))
    _add_model_flags(p, 20)
    _add_engine_flags(p, sparsifiers=False)
    _add_sweep_flags(p)
    return parser


def _model(args) -> SpikeModel:
    lo, hi = (args.alpha, args.alpha) if args.alpha is not None else (args.alpha_min, args.alpha_max)
    return SpikeModel(alpha_min=lo, alpha_max=hi, b=args.cycles, lam=args.period, sigma2=args.noise_var)


def _denoise(args) -> None:
    x = read_signal(args.input)
    cfg = EngineConfig(
        SparsifierSpec.from_name(args.h, args.p), SparsifierSpec.from_name(args.g, args.p),
        max_iter=args.max_iter, trace=args.trace_mode,
    )
    result = (run if x.ndim == 1 else run_matrix)(x, cfg)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_signal(args.out, result.output)
    sidecar = {
        "iterations": result.iterations_completed,
        "converged": result.converged,
        "zeros": len(result.trace.patterns[-1]),
        "size": int(result.output.size),
    }
    args.out.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    if result.trace.has_outputs:
        tdir = args.out.with_name(args.out.stem + "_trace")
        tdir.mkdir(exist_ok=True)
        for i, out in enumerate(result.trace.outputs, 1):
            write_signal(tdir / f"h_{i:02d}.csv", out)
    print(f"{'converged' if result.converged else 'stopped'} after {result.iterations_completed} iterations -> {args.out}")


def _dispatch(args) -> None:
    cmd = args.command
    if cmd == "denoise":
        _denoise(args)
        return
    if cmd in ("demo-vector", "demo-matrix"):
        engine = EngineConfig(SparsifierSpec.mean(), SparsifierSpec.mean(), max_iter=args.max_iter)
        demo = experiments.vector_demo if cmd == "demo-vector" else experiments.matrix_demo
        bundle = demo(_model(args), args.seed, engine)
        bundle.write(args.out)
        print(f"{bundle.stem}: {bundle.result.iterations_completed} iterations, "
              f"converged={bundle.result.converged}, final MSE {bundle.report.mse_converged:.4g} -> {args.out}")
        return
    common = dict(replicates=args.replicates, base_seed=args.seed, max_iter=args.max_iter, workers=args.workers)
    if cmd == "sweep-convergence-n":
        table = experiments.convergence_vs_n(args.n_values, p=args.p, **common)
    elif cmd == "sweep-convergence-p":
        table = experiments.convergence_vs_p(args.p_values, n=args.n, **common)
    elif cmd == "sweep-mse-cycles":
        table = experiments.mse_vs_cycles(args.cycles_values, model=_model(args), **common)
    elif cmd == "sweep-mse-iteration":
        table = experiments.mse_vs_iteration(model=_model(args), carry_forward=not args.drop_converged, **common)
    else:
        table = experiments.mse_vs_noise(args.noise_values, model=_model(args), **common)
    paths = table.write(args.out)
    print(f"{table.stem}: {len(table.rows)} rows -> " + ", ".join(str(p) for p in paths))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "alpha", None) is None and hasattr(args, "alpha_min") and args.alpha_min > args.alpha_max:
            parser.error("--alpha-min must not exceed --alpha-max")
        _dispatch(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (InvalidArgumentError, OSError, ArithmeticError, ValueError) as err:
        print(f"iterdft: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
