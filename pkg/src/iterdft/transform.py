"""Forward and inverse discrete Fourier transforms, 1D and 2D.

Conventions: 0-indexed, unnormalized forward transform, 1/n-normalized
inverse.  The 2D transforms compose the 1D conventions along each axis,
so the inverse carries a 1/(rows*cols) factor overall.

The fast path is numpy's pocketfft, which handles any length (mixed radix
with a Bluestein fallback for large prime factors).
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError, SymmetryViolationError

__all__ = [
    "dft",
    "idft",
    "dft2",
    "idft2",
    "symmetry_tolerance",
    "as_real",
    "as_spectrum",
]

#: relative factor in the imaginary-residue tolerance of the inverse transforms
SYMMETRY_RTOL = 1e-8


def as_real(x, ndim: int | None = None) -> np.ndarray:
    """Validate ``x`` as a finite, non-empty real array and return it as float64."""
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        raise InvalidArgumentError("expected real-valued input, got complex")
    try:
        arr = arr.astype(np.float64, copy=False)
    except (TypeError, ValueError) as err:
        raise InvalidArgumentError(f"input is not numeric: {err}") from None
    _check_shape(arr, ndim)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("input contains NaN or Inf")
    return arr


def as_spectrum(w, ndim: int | None = None) -> np.ndarray:
    """Validate ``w`` as a finite, non-empty complex array."""
    try:
        arr = np.asarray(w).astype(np.complex128, copy=False)
    except (TypeError, ValueError) as err:
        raise InvalidArgumentError(f"spectrum is not numeric: {err}") from None
    _check_shape(arr, ndim)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("spectrum contains NaN or Inf")
    return arr


def _check_shape(arr: np.ndarray, ndim: int | None) -> None:
    if ndim is not None and arr.ndim != ndim:
        raise InvalidArgumentError(f"expected a {ndim}-D array, got shape {arr.shape}")
    if arr.ndim == 0 or arr.size == 0:
        raise InvalidArgumentError("input must be a non-empty array")


def symmetry_tolerance(w: np.ndarray) -> float:
    """Largest imaginary residue accepted when inverting ``w``."""
    return SYMMETRY_RTOL * (1.0 + float(np.max(np.abs(w))))


def _real_part(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    residue = float(np.max(np.abs(z.imag)))
    tol = symmetry_tolerance(w)
    if residue > tol:
        raise SymmetryViolationError(
            f"inverse transform has imaginary residue {residue:.3g} > {tol:.3g}"
        )
    return np.ascontiguousarray(z.real)


def dft(x) -> np.ndarray:
    """Unnormalized forward DFT of a real vector.

    Parameters
    ----------
    x : array_like, shape (n,)
        Finite real samples, n >= 1.

    Returns
    -------
    numpy.ndarray of complex128, shape (n,)
        ``w[j] = sum_k x[k] exp(-2 pi i j k / n)``.
    """
    return np.fft.fft(as_real(x, ndim=1))


def idft(w) -> np.ndarray:
    """1/n-normalized inverse DFT, returned as a real vector.

    The imaginary part of the result is discarded after checking it is
    below :func:`symmetry_tolerance`; otherwise
    :class:`~iterdft.errors.SymmetryViolationError` is raised.
    """
    w = as_spectrum(w, ndim=1)
    return _real_part(np.fft.ifft(w), w)


def dft2(x) -> np.ndarray:
    """2D forward DFT of a real matrix (1D transform along rows, then columns)."""
    return np.fft.fft2(as_real(x, ndim=2))


def idft2(w) -> np.ndarray:
    """2D inverse DFT of a spectrum matrix, returned as a real matrix."""
    w = as_spectrum(w, ndim=2)
    return _real_part(np.fft.ifft2(w), w)
