"""Iterate sparsify -> DFT -> sparsify -> inverse DFT until the zero pattern repeats.

Each iteration ``i`` applies the time-domain operator ``h`` to the current
signal, then compares the zero pattern of that output with the one from
iteration ``i - 1``.  If they are equal the loop stops and returns the
latest ``h`` output; otherwise the output is pushed through
``inverse(g(forward(.)))`` and fed into the next iteration.  No comparison
is made at ``i = 1`` since there is no earlier output yet.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from . import transform
from .errors import DegenerateSpecError, InvalidArgumentError, SymmetryViolationError
from .sparsify import SparsifierSpec, SparsityPattern, pattern_of, sparsify_freq, sparsify_time

__all__ = ["EngineConfig", "IterationTrace", "RunResult", "iterate", "run", "run_matrix"]

TraceMode = Literal["auto", "full", "patterns"]

#: ``trace="auto"`` keeps every h() output up to this many elements
FULL_TRACE_LIMIT = 4096


@dataclass(frozen=True)
class EngineConfig:
    h_spec: SparsifierSpec
    g_spec: SparsifierSpec
    max_iter: int = 50
    trace: TraceMode = "auto"

    def __post_init__(self):
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgumentError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if self.trace not in ("auto", "full", "patterns"):
            raise InvalidArgumentError(f"unknown trace mode {self.trace!r}")

    def keeps_outputs(self, size: int) -> bool:
        if self.trace == "auto":
            return size <= FULL_TRACE_LIMIT
        return self.trace == "full"


@dataclass
class IterationTrace:
    """Per-iteration record of one run.

    ``outputs[i]`` is the h() output of iteration ``i + 1`` (or ``None`` when
    outputs are not retained); ``mse`` is filled only when the run was given
    a ground truth.
    """

    outputs: list = field(default_factory=list)
    patterns: list[SparsityPattern] = field(default_factory=list)
    mse: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.patterns)

    @property
    def has_outputs(self) -> bool:
        return bool(self.outputs) and self.outputs[0] is not None


@dataclass(frozen=True)
class RunResult:
    output: np.ndarray
    iterations_completed: int
    converged: bool
    trace: IterationTrace


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def iterate(
    x: np.ndarray,
    h: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    forward: Callable[[np.ndarray], np.ndarray],
    inverse: Callable[[np.ndarray], np.ndarray],
    max_iter: int,
    keep_outputs: bool = True,
    truth: np.ndarray | None = None,
) -> RunResult:
    """Run the loop with arbitrary operators.

    This is the general form behind :func:`run` and :func:`run_matrix`;
    any callables with matching shapes may be plugged in, including the
    identity.  Errors raised by the operators are re-raised with the
    iteration number prepended to the message and stored as
    ``err.iteration``.
    """
    trace = IterationTrace()
    current = x
    prev_pattern = None
    converged = False
    i = 0
    for i in range(1, max_iter + 1):
        try:
            out = _frozen(np.array(h(current), dtype=np.float64))
        except (SymmetryViolationError, DegenerateSpecError) as err:
            raise _annotated(err, i) from err
        pattern = pattern_of(out)
        trace.patterns.append(pattern)
        trace.outputs.append(out if keep_outputs else None)
        if truth is not None:
            trace.mse.append(float(np.mean((out - truth) ** 2)))
        if prev_pattern is not None and pattern == prev_pattern:
            converged = True
            break
        prev_pattern = pattern
        if i == max_iter:
            break
        try:
            current = inverse(g(forward(out)))
        except (SymmetryViolationError, DegenerateSpecError) as err:
            raise _annotated(err, i) from err
    return RunResult(output=out, iterations_completed=i, converged=converged, trace=trace)


def _annotated(err: Exception, iteration: int) -> Exception:
    new = type(err)(f"iteration {iteration}: {err}")
    new.iteration = iteration
    return new


def _prepare_truth(truth, shape):
    if truth is None:
        return None
    truth = transform.as_real(truth)
    if truth.shape != shape:
        raise InvalidArgumentError(f"truth shape {truth.shape} != input shape {shape}")
    return truth


def run(x, cfg: EngineConfig, truth=None) -> RunResult:
    """Denoise a real vector by iterated dual-domain sparsification.

    Parameters
    ----------
    x : array_like, shape (n,)
        Finite real input.
    cfg : EngineConfig
        Time (h) and frequency (g) sparsifiers and the iteration cap.
    truth : array_like, optional
        Clean signal; when given, the MSE of every h() output is recorded
        in ``result.trace.mse`` (useful with ``trace="patterns"``).
    """
    x = transform.as_real(x, ndim=1)
    return iterate(
        x,
        lambda v: sparsify_time(v, cfg.h_spec),
        lambda w: sparsify_freq(w, cfg.g_spec),
        transform.dft,
        transform.idft,
        cfg.max_iter,
        keep_outputs=cfg.keeps_outputs(x.size),
        truth=_prepare_truth(truth, x.shape),
    )


def run_matrix(x, cfg: EngineConfig, truth=None) -> RunResult:
    """Matrix counterpart of :func:`run` using the 2D transforms.

    Patterns are flat row-major indices into the matrix.
    """
    x = transform.as_real(x, ndim=2)
    return iterate(
        x,
        lambda v: sparsify_time(v, cfg.h_spec),
        lambda w: sparsify_freq(w, cfg.g_spec),
        transform.dft2,
        transform.idft2,
        cfg.max_iter,
        keep_outputs=cfg.keeps_outputs(x.size),
        truth=_prepare_truth(truth, x.shape),
    )
