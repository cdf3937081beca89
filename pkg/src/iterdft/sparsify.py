"""Time- and frequency-domain sparsification operators.

Two families are provided:

* proportion-rank: zero the ``floor(p * n)`` entries of smallest magnitude;
* mean-threshold: zero every entry whose magnitude is at or below the mean
  magnitude of the input.

Frequency operators treat each conjugate pair ``(k, -k mod shape)`` as a
single group so a conjugate-symmetric spectrum stays conjugate-symmetric.
Surviving entries are passed through untouched.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpecError, InvalidArgumentError
from .transform import as_real, as_spectrum

__all__ = [
    "Kind",
    "SparsifierSpec",
    "SparsityPattern",
    "sparsify_time",
    "sparsify_freq",
    "pattern_of",
    "conjugate_partner",
]


class Kind(enum.Enum):
    PROPORTION_RANK = "prop"
    MEAN_THRESHOLD = "mean"


@dataclass(frozen=True)
class SparsifierSpec:
    """Which sparsifier to apply, and its proportion for the rank kind."""

    kind: Kind
    p: float | None = None

    def __post_init__(self):
        if self.kind is Kind.PROPORTION_RANK:
            if self.p is None or not (0.0 < self.p < 1.0):
                raise InvalidArgumentError(
                    f"proportion-rank sparsifier needs 0 < p < 1, got {self.p!r}"
                )
        elif self.p is not None:
            raise InvalidArgumentError("mean-threshold sparsifier takes no p")

    @classmethod
    def proportion(cls, p: float) -> "SparsifierSpec":
        return cls(Kind.PROPORTION_RANK, float(p))

    @classmethod
    def mean(cls) -> "SparsifierSpec":
        return cls(Kind.MEAN_THRESHOLD)

    @classmethod
    def from_name(cls, name: str, p: float | None = None) -> "SparsifierSpec":
        """Build from the short names ``"prop"`` / ``"mean"``."""
        kind = Kind(name)
        if kind is Kind.PROPORTION_RANK:
            return cls.proportion(0.5 if p is None else p)
        return cls.mean()

    def zero_count(self, n: int) -> int:
        """Entries a proportion-rank sparsifier zeroes out of ``n``."""
        k = int(np.floor(self.p * n))
        if k == 0:
            raise DegenerateSpecError(
                f"floor(p * n) = 0 for p={self.p}, n={n}: sparsifier would be the identity"
            )
        return k


class SparsityPattern:
    """Sorted flat (row-major) indices of the exact zeros of an array."""

    __slots__ = ("indices", "size")

    def __init__(self, indices, size: int):
        idx = np.asarray(indices, dtype=np.int64)
        if idx.ndim != 1:
            raise InvalidArgumentError("pattern indices must be 1-D")
        idx = np.unique(idx)
        if idx.size and (idx[0] < 0 or idx[-1] >= size):
            raise InvalidArgumentError(f"pattern index out of range [0, {size})")
        idx.flags.writeable = False
        self.indices = idx
        self.size = int(size)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "SparsityPattern":
        return cls(np.flatnonzero(mask), mask.size)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsityPattern):
            return NotImplemented
        return self.size == other.size and np.array_equal(self.indices, other.indices)

    def __hash__(self) -> int:
        return hash((self.size, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"SparsityPattern(zeros={len(self)}, size={self.size})"

    def as_set(self) -> set[int]:
        return set(self.indices.tolist())


def pattern_of(x) -> SparsityPattern:
    """Pattern of exact zeros in a real vector or matrix."""
    arr = np.asarray(x)
    return SparsityPattern.from_mask(arr.ravel() == 0.0)


def _rank_zero_mask(mag: np.ndarray, k: int) -> np.ndarray:
    # stable sort: among equal magnitudes the lower index is zeroed first
    order = np.argsort(mag, kind="stable")
    mask = np.zeros(mag.size, dtype=bool)
    mask[order[:k]] = True
    return mask


def sparsify_time(x, spec: SparsifierSpec) -> np.ndarray:
    """Sparsify a real vector or matrix.

    Examples
    --------
    >>> sparsify_time([3.0, -1.0, 0.5, 2.0], SparsifierSpec.proportion(0.5))
    array([3., 0., 0., 2.])
    """
    x = as_real(x)
    flat = x.ravel()
    mag = np.abs(flat)
    if spec.kind is Kind.PROPORTION_RANK:
        mask = _rank_zero_mask(mag, spec.zero_count(flat.size))
    else:
        mask = mag <= mag.mean()
    out = flat.copy()
    out[mask] = 0.0
    return out.reshape(x.shape)


def conjugate_partner(shape: tuple[int, ...]) -> np.ndarray:
    """Flat index of the conjugate partner of every flat index.

    For a spectrum of real data, entry ``j`` equals the conjugate of entry
    ``partner[j]``, where the partner of multi-index ``(k1, k2, ...)`` is
    ``(-k1 mod n1, -k2 mod n2, ...)``.
    """
    grids = np.indices(shape)
    mirrored = tuple((-g) % n for g, n in zip(grids, shape))
    return np.ravel_multi_index(mirrored, shape).ravel()


def sparsify_freq(w, spec: SparsifierSpec) -> np.ndarray:
    """Sparsify a complex spectrum (vector or matrix) by coefficient magnitude.

    Conjugate pairs are zeroed or kept together; a group's magnitude is the
    larger of its members' magnitudes, which on a conjugate-symmetric input
    is just the common magnitude.  For the rank kind, groups are taken in
    ascending (magnitude, lowest index) order while they fit in the
    ``floor(p * n)`` budget; an odd leftover slot goes to the next
    self-conjugate group (DC, Nyquist) in that order, if any remains.
    """
    w = as_spectrum(w)
    flat = w.ravel()
    n = flat.size
    partner = conjugate_partner(w.shape)
    mag = np.abs(flat)
    group_mag = np.maximum(mag, mag[partner])
    leaders = np.flatnonzero(partner >= np.arange(n))
    if spec.kind is Kind.PROPORTION_RANK:
        k = spec.zero_count(n)
        sizes = np.where(partner[leaders] == leaders, 1, 2)
        order = np.argsort(group_mag[leaders], kind="stable")
        taken = np.cumsum(sizes[order]) <= k
        # taking groups in order until the first that overflows the budget
        stop = int(np.argmin(taken)) if not taken.all() else order.size
        chosen = list(order[:stop])
        remaining = k - int(sizes[order[:stop]].sum())
        if remaining == 1:
            singles = order[stop:][sizes[order[stop:]] == 1]
            if singles.size:
                chosen.append(singles[0])
        lead_mask = np.zeros(n, dtype=bool)
        lead_mask[leaders[np.asarray(chosen, dtype=np.int64)]] = True
        mask = lead_mask | lead_mask[partner]
    else:
        mask = group_mag <= mag.mean()
    out = flat.copy()
    out[mask] = 0.0
    return out.reshape(w.shape)
