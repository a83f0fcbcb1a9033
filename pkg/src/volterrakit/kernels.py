"""Packed symmetric Volterra kernels up to third order.

A truncated third-order Volterra filter computes

    y(n) = h0 + sum_i h1[i] x(n-i)
              + sum_{i<=j} h2[flat(i,j)] x(n-i) x(n-j)
              + sum_{i<=j<=l} h3[flat(i,j,l)] x(n-i) x(n-j) x(n-l)

over a memory of M past samples.  Because the kernels can be taken
symmetric without loss of generality, only one coefficient per unordered
index multiset is stored; each packed off-diagonal coefficient is the SUM
over the symmetric permutations it stands for (multiplicity 2 for pairs,
3 or 6 for triples).  Application is then a plain dot product between the
packed coefficient blocks and the matching monomial expansion of the input
window, which is what makes LMS-style adaptation of the packed form cheap.

The packed layout is row-major over ordered tuples: pairs enumerate
(0,0), (0,1), ..., (0,M-1), (1,1), ...; triples enumerate (i, j, l) with
i <= j <= l, l varying fastest.  Block sizes are M, M(M+1)/2, and
M(M+1)(M+2)/6.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericError
from .signals import Signal


def packed2_size(memory: int) -> int:
    """Number of packed second-order coefficients for a given memory."""
    return memory * (memory + 1) // 2


def packed3_size(memory: int) -> int:
    """Number of packed third-order coefficients for a given memory."""
    return memory * (memory + 1) * (memory + 2) // 6


def _check_memory(memory: int) -> int:
    if not isinstance(memory, (int, np.integer)) or isinstance(memory, bool):
        raise ValueError(f"memory must be an integer, got {memory!r}")
    if memory < 1:
        raise ValueError(f"memory must be >= 1, got {memory}")
    return int(memory)


def pack_index2(i: int, j: int, memory: int) -> int:
    """Flat position of the ordered pair (i, j), i <= j, in the packed layout."""
    m = _check_memory(memory)
    if not (0 <= i <= j < m):
        raise ValueError(f"need 0 <= i <= j < {m}, got (i, j) = ({i}, {j})")
    return i * m - i * (i - 1) // 2 + (j - i)


def pack_index3(i: int, j: int, l: int, memory: int) -> int:
    """Flat position of the ordered triple (i, j, l), i <= j <= l."""
    m = _check_memory(memory)
    if not (0 <= i <= j <= l < m):
        raise ValueError(f"need 0 <= i <= j <= l < {m}, got ({i}, {j}, {l})")
    # Triples starting at i occupy one packed block per outer index; the
    # block holds every pair (j, l) with j >= i, so its layout coincides
    # with the tail of the pair packing shifted by the position of (i, i).
    skipped = packed3_size(m) - packed3_size(m - i)
    return skipped + pack_index2(j, l, m) - pack_index2(i, i, m)


@lru_cache(maxsize=None)
def _pair_indices(memory: int) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays (i, j) enumerating ordered pairs in packed order."""
    i, j = np.triu_indices(memory)
    return i.copy(), j.copy()


@lru_cache(maxsize=None)
def _triple_factors(memory: int) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays (into x1, into x2) that build x3 in packed order.

    Mirrors the incremental construction: the outer index i walks the
    window while the inner index scans the packed pair vector from the
    position of (i, i) onward, that start advancing by M - i per step.
    That enumerates exactly the ordered triples i <= j <= l.
    """
    p2 = packed2_size(memory)
    first, second = [], []
    x2_start = 0
    for i in range(memory):
        for j in range(x2_start, p2):
            first.append(i)
            second.append(j)
        x2_start += memory - i
    return np.asarray(first, dtype=np.intp), np.asarray(second, dtype=np.intp)


@lru_cache(maxsize=None)
def _triple_tuples(memory: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(i, j, l) arrays for each packed third-order slot, in packed order."""
    i1, i2 = _triple_factors(memory)
    pi, pj = _pair_indices(memory)
    return i1.copy(), pi[i2].copy(), pj[i2].copy()


@dataclass(frozen=True)
class ExpansionVectors:
    """Monomial expansion of one input window.

    ``x1`` is the window itself, most recent sample first; ``x2`` and ``x3``
    are its packed pairwise and triple products, aligned with the packed
    kernel layout.  ``k`` records which sample of a longer signal the window
    belongs to (-1 for standalone windows).
    """

    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray
    k: int = -1


def build_expansion(window, k: int = -1) -> ExpansionVectors:
    """Expand a length-M window [x(k), x(k-1), ..., x(k-M+1)].

    The same routine feeds both the on-the-fly and the precomputed
    estimation paths, so the two are arithmetically identical by
    construction.
    """
    # Force a contiguous copy so downstream dot products take the same code
    # path whether the window arrived as a view or a stored row; this is
    # what makes the precomputed estimation path bit-identical.
    x1 = np.array(window, dtype=np.float64)
    if x1.ndim != 1 or len(x1) < 1:
        raise ValueError(f"window must be a non-empty 1-D sequence, got shape {x1.shape}")
    m = len(x1)
    pi, pj = _pair_indices(m)
    x2 = x1[pi] * x1[pj]
    f1, f2 = _triple_factors(m)
    x3 = x1[f1] * x2[f2]
    return ExpansionVectors(x1, x2, x3, k)


@dataclass(frozen=True)
class VolterraKernel:
    """Packed coefficient blocks of a truncated third-order Volterra filter.

    ``h0`` is a constant offset carried for completeness (the estimator
    never updates it), ``h1`` has length M, ``h2`` length M(M+1)/2, and
    ``h3`` length M(M+1)(M+2)/6.
    """

    memory: int
    h0: float
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray

    def __post_init__(self):
        m = _check_memory(self.memory)
        object.__setattr__(self, "memory", m)
        object.__setattr__(self, "h0", float(self.h0))
        for name, expected in (("h1", m), ("h2", packed2_size(m)), ("h3", packed3_size(m))):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (expected,):
                raise ValueError(
                    f"{name} must have length {expected} for memory {m}, got shape {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, arr)
        if not np.isfinite(self.h0):
            raise ValueError("h0 must be finite")


def _lag_matrix(samples: np.ndarray, memory: int) -> np.ndarray:
    """Rows tau = 0..M-1 of the input delayed by tau, zero pre-history."""
    n = len(samples)
    padded = np.concatenate([np.zeros(memory - 1), samples])
    windows = np.lib.stride_tricks.sliding_window_view(padded, n)
    return windows[::-1]


def apply_kernel(kernel: VolterraKernel, signal: Signal) -> Signal:
    """Run a signal through the packed Volterra filter.

    History before the first sample is zero-padded, so output length equals
    input length.  Raises :class:`~volterrakit.errors.NumericError` naming
    the first offending sample if the output is not finite.
    """
    n = len(signal)
    if n == 0:
        return Signal(np.zeros(0), signal.sample_rate)
    m = kernel.memory
    lags = _lag_matrix(signal.samples, m)

    y = np.full(n, kernel.h0)
    y += kernel.h1 @ lags
    if np.any(kernel.h2):
        for i in range(m):
            row = kernel.h2[pack_index2(i, i, m) : pack_index2(i, i, m) + (m - i)]
            y += lags[i] * (row @ lags[i:])
    if np.any(kernel.h3):
        for i in range(m):
            for j in range(i, m):
                start = pack_index3(i, j, j, m)
                seg = kernel.h3[start : start + (m - j)]
                y += (lags[i] * lags[j]) * (seg @ lags[j:])

    bad = ~np.isfinite(y)
    if bad.any():
        raise NumericError(f"non-finite output at sample {int(np.argmax(bad))}")
    return Signal(y, signal.sample_rate)


def symmetrize_dense(dense) -> np.ndarray:
    """Pack a dense order-2 (MxM) or order-3 (MxMxM) kernel.

    The dense kernel is first symmetrized by averaging over index
    permutations; each packed coefficient then absorbs the multiplicity of
    its index multiset (2 for off-diagonal pairs, 3 or 6 for triples), so
    that the packed dot product reproduces the dense multi-sum exactly.
    """
    arr = np.asarray(dense, dtype=np.float64)
    if arr.ndim == 2:
        if arr.shape[0] != arr.shape[1]:
            raise ValueError(f"dense order-2 kernel must be square, got {arr.shape}")
        m = arr.shape[0]
        sym = (arr + arr.T) / 2
        pi, pj = _pair_indices(m)
        mult = np.where(pi == pj, 1.0, 2.0)
        return sym[pi, pj] * mult
    if arr.ndim == 3:
        if not (arr.shape[0] == arr.shape[1] == arr.shape[2]):
            raise ValueError(f"dense order-3 kernel must be cubic, got {arr.shape}")
        m = arr.shape[0]
        sym = np.zeros_like(arr)
        for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            sym += arr.transpose(perm)
        sym /= 6
        ti, tj, tl = _triple_tuples(m)
        distinct = (ti != tj).astype(int) + (tj != tl).astype(int)
        mult = np.choose(distinct, [1.0, 3.0, 6.0])
        return sym[ti, tj, tl] * mult
    raise ValueError(f"expected a 2-D or 3-D array, got {arr.ndim}-D")
