"""Recovery scoring: mean squared error and the converged/first-pass MSE ratio."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import IterationTrace
from .errors import InvalidArgumentError
from .sparsify import SparsityPattern

__all__ = ["MseReport", "mse", "mse_ratio", "score_trace", "patterns_equal"]


@dataclass(frozen=True)
class MseReport:
    """MSE of every h() output against the clean signal.

    ``ratio`` is ``mse_converged / mse_first``.  When ``mse_first`` is 0 the
    ratio is 0 if ``mse_converged`` is also 0 and ``inf`` otherwise, with
    ``first_is_zero`` set so the case is never silently lost.
    """

    mse_per_iteration: tuple[float, ...]
    mse_first: float
    mse_converged: float
    ratio: float
    first_is_zero: bool

    @property
    def ratio_per_iteration(self) -> tuple[float, ...]:
        return tuple(mse_ratio(m, self.mse_first) for m in self.mse_per_iteration)


def mse(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise InvalidArgumentError("mse of empty arrays")
    return float(np.mean((a - b) ** 2))


def mse_ratio(mse_c: float, mse_1: float) -> float:
    if mse_1 > 0:
        return mse_c / mse_1
    return 0.0 if mse_c == 0 else math.inf


def score_trace(trace: IterationTrace, truth) -> MseReport:
    """Score a run's trace against ``truth``.

    Uses the retained h() outputs when present, otherwise the MSE values
    the engine recorded during the run.
    """
    if len(trace) == 0:
        raise InvalidArgumentError("empty trace")
    if trace.has_outputs:
        values = tuple(mse(out, truth) for out in trace.outputs)
    elif len(trace.mse) == len(trace):
        values = tuple(trace.mse)
    else:
        raise InvalidArgumentError("trace holds neither outputs nor recorded MSE values")
    first, last = values[0], values[-1]
    return MseReport(
        mse_per_iteration=values,
        mse_first=first,
        mse_converged=last,
        ratio=mse_ratio(last, first),
        first_is_zero=first == 0,
    )


def patterns_equal(a: SparsityPattern, b: SparsityPattern) -> bool:
    return a == b
