"""Exact matrix permanents and submatrix helpers.

The permanent is the bosonic analogue of the determinant: permutation
terms add instead of alternating, so multi-pair amplitudes interfere.
The production path is an inclusion-exclusion kernel over column
subsets, O(2**n * n) with incremental row-sum updates; a compiled
version is used when the extension built, otherwise the NumPy fallback
with identical semantics.  ``permanent_naive`` is the independent
permutation-sum reference kept for cross-checks.
"""

from __future__ import annotations

import itertools
import math
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from .jsa import JsaMatrix

try:
    from sis._ryser import permanent_kernel as _kernel

    BACKEND = "cython"
except ImportError:
    from sis._ryser_py import permanent_kernel as _kernel

    BACKEND = "python"

__all__ = [
    "BACKEND",
    "DIMENSION_CAP",
    "permanent",
    "permanent_naive",
    "submatrix",
    "abs_squared_matrix",
    "count_nonzero_permutations",
]

DIMENSION_CAP = 20


def _as_square(m) -> np.ndarray:
    arr = np.ascontiguousarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"matrix must be square, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("matrix must have at least one row")
    if arr.shape[0] > DIMENSION_CAP:
        raise ValueError("dimension cap exceeded")
    return arr


def permanent(m) -> complex:
    """Permanent of a square complex matrix, n <= 20."""
    return complex(_kernel(_as_square(m)))


def permanent_naive(m) -> complex:
    """Reference permanent by explicit n! permutation sum.

    Only sensible for small n; used to cross-check the subset kernel.
    """
    arr = _as_square(m)
    n = arr.shape[0]
    if math.factorial(n) > 10_000_000:
        raise ValueError("matrix too large for the naive expansion")
    total = 0j
    rows = range(n)
    for perm in itertools.permutations(range(n)):
        p = 1 + 0j
        for i in rows:
            p *= arr[i, perm[i]]
        total += p
    return complex(total)


def submatrix(jsa: "JsaMatrix", idler_rows: Sequence, signal_cols: Sequence) -> np.ndarray:
    """Select idler rows and signal columns of an amplitude matrix by label.

    Labels may be given as 'i1'/'s2', bare numbers, or ints.  Duplicate
    selections are rejected because detection patterns never repeat a
    channel.
    """
    rows = [jsa.grid.idler_position(r) for r in idler_rows]
    cols = [jsa.grid.signal_position(c) for c in signal_cols]
    if len(set(rows)) != len(rows):
        raise ValueError(f"duplicate idler rows in {list(idler_rows)!r}")
    if len(set(cols)) != len(cols):
        raise ValueError(f"duplicate signal columns in {list(signal_cols)!r}")
    return jsa.entries[np.ix_(rows, cols)].copy()


def abs_squared_matrix(m) -> np.ndarray:
    """Entrywise |m|**2, the distinguishable-photon rate matrix."""
    arr = np.asarray(m, dtype=np.complex128)
    return (arr.real**2 + arr.imag**2).astype(np.float64)


def count_nonzero_permutations(m) -> int:
    """Number of permutations with a nonzero product term.

    Equals the permanent of the boolean sparsity indicator.  A count of
    one means the pattern has no interfering alternatives, so quantum
    and classical predictions must coincide there.
    """
    arr = _as_square(m)
    indicator = (arr != 0).astype(np.float64)
    return int(round(float(_kernel(indicator.astype(np.complex128)).real)))
