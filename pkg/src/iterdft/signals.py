"""Seeded generators for the input models.

All randomness comes from numpy's PCG64 bit generator; normal variates use
numpy's ziggurat sampler (``Generator.standard_normal``) and uniforms use
``Generator.uniform``.  A ``seed`` argument may be an int, a
``numpy.random.SeedSequence`` or an existing ``numpy.random.Generator``
(in which case draws continue from its current state).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "SpikeModel",
    "make_rng",
    "derive_seed",
    "gaussian_vector",
    "gaussian_matrix",
    "spike_signal",
    "spike_plus_noise",
    "spike_matrix",
    "sinusoid",
]


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    if isinstance(seed, (int, np.integer)) and seed >= 0:
        return np.random.Generator(np.random.PCG64(int(seed)))
    raise InvalidArgumentError(f"seed must be a non-negative int, SeedSequence or Generator, got {seed!r}")


def derive_seed(base_seed: int, *key: int) -> int:
    """Deterministic 64-bit seed for the stream identified by ``key``.

    Different keys under the same base seed give statistically independent
    streams; the mapping does not depend on the order in which keys are
    requested.
    """
    ss = np.random.SeedSequence(int(base_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SpikeModel:
    """Periodic spike train plus Gaussian noise.

    ``b`` spikes with period ``lam`` sit at the 0-indexed positions
    ``lam - 1, 2 * lam - 1, ..., b * lam - 1`` of a length ``b * lam``
    vector; amplitudes are uniform on ``[alpha_min, alpha_max]``.
    """

    alpha_min: float = 2.5
    alpha_max: float = 2.5
    b: int = 16
    lam: int = 8
    sigma2: float = 0.5

    def __post_init__(self):
        if not (np.isfinite(self.alpha_min) and np.isfinite(self.alpha_max)):
            raise InvalidArgumentError("amplitude bounds must be finite")
        if self.alpha_min > self.alpha_max:
            raise InvalidArgumentError("alpha_min must not exceed alpha_max")
        if int(self.b) != self.b or self.b < 1:
            raise InvalidArgumentError(f"cycle count b must be a positive integer, got {self.b!r}")
        if int(self.lam) != self.lam or self.lam < 1:
            raise InvalidArgumentError(f"period must be an integer >= 1, got {self.lam!r}")
        if not np.isfinite(self.sigma2) or self.sigma2 < 0:
            raise InvalidArgumentError(f"noise variance must be >= 0, got {self.sigma2!r}")

    @property
    def n(self) -> int:
        return int(self.b) * int(self.lam)

    @property
    def positions(self) -> np.ndarray:
        return np.arange(1, int(self.b) + 1) * int(self.lam) - 1


def _noise(shape, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    if sigma2 < 0 or not np.isfinite(sigma2):
        raise InvalidArgumentError(f"variance must be >= 0, got {sigma2!r}")
    z = rng.standard_normal(shape)
    if sigma2 == 0:
        return np.zeros(shape)
    return np.sqrt(sigma2) * z


def gaussian_vector(n: int, sigma2: float = 1.0, seed=0) -> np.ndarray:
    """``n`` i.i.d. N(0, sigma2) samples."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    return _noise(int(n), sigma2, make_rng(seed))


def gaussian_matrix(rows: int, cols: int, sigma2: float = 1.0, seed=0) -> np.ndarray:
    if rows < 1 or cols < 1:
        raise InvalidArgumentError("matrix dimensions must be positive")
    return _noise((int(rows), int(cols)), sigma2, make_rng(seed))


def spike_signal(model: SpikeModel, seed=0) -> np.ndarray:
    rng = make_rng(seed)
    s = np.zeros(model.n)
    if model.alpha_min == model.alpha_max:
        rng.uniform(size=model.b)  # keep stream positions independent of the bounds
        s[model.positions] = model.alpha_min
    else:
        s[model.positions] = rng.uniform(model.alpha_min, model.alpha_max, size=model.b)
    return s


def spike_plus_noise(model: SpikeModel, seed=0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(x, s, eps)`` with ``x = s + eps``."""
    rng = make_rng(seed)
    s = spike_signal(model, rng)
    eps = _noise(model.n, model.sigma2, rng)
    return s + eps, s, eps


def spike_matrix(model: SpikeModel, seed=0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(X, S, E)`` with ``S = s s^T`` for one spike vector ``s`` and ``X = S + E``."""
    rng = make_rng(seed)
    s = spike_signal(model, rng)
    S = np.outer(s, s)
    E = _noise((model.n, model.n), model.sigma2, rng)
    return S + E, S, E


def sinusoid(n: int, freq: float, amplitude: float = 1.0, phase: float = 0.0) -> np.ndarray:
    """``amplitude * sin(2 pi freq t / n + phase)`` for ``t = 0..n-1``."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    t = np.arange(int(n))
    return amplitude * np.sin(2 * np.pi * freq * t / n + phase)
