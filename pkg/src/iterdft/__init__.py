"""Iterated DFT/IDFT with time- and frequency-domain sparsification."""
from .engine import EngineConfig, IterationTrace, RunResult, iterate, run, run_matrix
from .errors import DegenerateSpecError, InvalidArgumentError, SymmetryViolationError
from .metrics import MseReport, mse, score_trace
from .signals import SpikeModel, gaussian_vector, sinusoid, spike_matrix, spike_plus_noise, spike_signal
from .sparsify import Kind, SparsifierSpec, SparsityPattern, pattern_of, sparsify_freq, sparsify_time
from .transform import dft, dft2, idft, idft2

__version__ = "0.1.0"
