"""Multimode squeezed pair state built from a joint spectral amplitude.

Scaling the amplitude matrix so its largest singular value equals the
pump gain gives the pair-creation matrix of a multimode two-mode
squeezed vacuum.  Its singular values are the Schmidt-mode squeezing
parameters; the vacuum overlap is the product of sqrt(1 - lambda**2)
over Schmidt modes.  The amplitude for detecting N signal photons in
distinct channels together with N idler photons in distinct channels
is the permanent of the corresponding submatrix times that overlap,
which is where multi-pair interference enters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .jsa import FrequencyGrid, JsaMatrix
from .outcomes import OutcomeTable, pattern_key
from .permanent import permanent

__all__ = [
    "SCHMIDT_CUTOFF",
    "GaussianPairState",
    "OutcomePattern",
    "from_jsa",
    "n_pair_amplitude",
    "n_pair_probability",
    "quantum_outcome_table",
]

# Singular values below this are floating-point noise from structurally
# rank-deficient amplitude matrices and are treated as exactly zero.
SCHMIDT_CUTOFF = 1e-14


@dataclass(frozen=True)
class OutcomePattern:
    """N distinct signal channels paired with N distinct idler channels."""

    signal_channels: frozenset[str]
    idler_channels: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "signal_channels", frozenset(self.signal_channels))
        object.__setattr__(self, "idler_channels", frozenset(self.idler_channels))
        if len(self.signal_channels) == 0:
            raise ValueError("pattern must contain at least one pair")
        if len(self.signal_channels) != len(self.idler_channels):
            raise ValueError(
                f"pattern needs equal channel counts, got {len(self.signal_channels)} signal "
                f"and {len(self.idler_channels)} idler"
            )

    @property
    def n_pairs(self) -> int:
        return len(self.signal_channels)

    def key(self) -> tuple[str, ...]:
        return pattern_key(self.idler_channels | self.signal_channels)


@dataclass(frozen=True)
class GaussianPairState:
    """Pair-creation matrix with its Schmidt data.

    Attributes
    ----------
    lambda_matrix : ndarray
        Idler-by-signal pair-creation matrix, spectral norm equal to
        ``gain``.
    schmidt_values : tuple of float
        Singular values in descending order, each strictly below one.
    norm_constant : float
        Vacuum amplitude, product of sqrt(1 - lambda**2).
    gain : float
        Largest Schmidt value.
    """

    lambda_matrix: np.ndarray
    schmidt_values: tuple[float, ...]
    norm_constant: float
    gain: float
    grid: FrequencyGrid

    def __post_init__(self) -> None:
        arr = np.asarray(self.lambda_matrix, dtype=np.complex128)
        arr.setflags(write=False)
        object.__setattr__(self, "lambda_matrix", arr)
        object.__setattr__(self, "schmidt_values", tuple(float(v) for v in self.schmidt_values))


def from_jsa(jsa: JsaMatrix, gain: float) -> GaussianPairState:
    """Promote an amplitude matrix to the squeezed state at a given gain.

    The matrix is rescaled so its largest singular value equals
    ``gain``; entrywise phases are untouched, so interference patterns
    carry over unchanged.

    Raises
    ------
    ValueError
        If ``gain`` is outside (0, 1) or the matrix is identically zero.
    """
    if not 0 < gain < 1:
        raise ValueError(f"unphysical gain {gain!r}, must lie strictly inside (0, 1)")
    sv = np.linalg.svd(jsa.entries, compute_uv=False)
    top = float(sv[0])
    if top == 0.0:
        raise ValueError("cannot build a state from an all-zero amplitude matrix")
    lam = (gain / top) * jsa.entries
    schmidt = gain * sv / top
    schmidt = np.where(schmidt < SCHMIDT_CUTOFF, 0.0, schmidt)
    norm_constant = float(np.prod(np.sqrt(1.0 - schmidt**2)))
    return GaussianPairState(
        lambda_matrix=lam,
        schmidt_values=tuple(schmidt),
        norm_constant=norm_constant,
        gain=float(gain),
        grid=jsa.grid,
    )


def _pattern_submatrix(state: GaussianPairState, pattern: OutcomePattern) -> np.ndarray:
    rows = sorted(state.grid.idler_position(c) for c in pattern.idler_channels)
    cols = sorted(state.grid.signal_position(c) for c in pattern.signal_channels)
    return state.lambda_matrix[np.ix_(rows, cols)]


def n_pair_amplitude(state: GaussianPairState, pattern: OutcomePattern) -> complex:
    """Amplitude for one photon in each channel of the pattern.

    Equal to ``norm_constant * permanent(submatrix)``; the row and
    column order inside the pattern is immaterial because the permanent
    is invariant under both.
    """
    return state.norm_constant * permanent(_pattern_submatrix(state, pattern))


def n_pair_probability(state: GaussianPairState, pattern: OutcomePattern) -> float:
    """Probability of the exact collision-free pattern, |amplitude|**2."""
    amp = n_pair_amplitude(state, pattern)
    return float(amp.real**2 + amp.imag**2)


def quantum_outcome_table(state: GaussianPairState, n_pairs: int) -> OutcomeTable:
    """Probabilities of every collision-free pattern with ``n_pairs`` pairs.

    Entries are true per-pattern probabilities of the full state; they
    are not normalized within the N-pair sector.
    """
    signals = state.grid.signal_labels
    idlers = state.grid.idler_labels
    if not 1 <= n_pairs <= min(len(signals), len(idlers)):
        raise ValueError(
            f"n_pairs={n_pairs} needs between 1 and {min(len(signals), len(idlers))} distinct channels"
        )
    values: dict[tuple[str, ...], float] = {}
    for idler_combo in itertools.combinations(idlers, n_pairs):
        for signal_combo in itertools.combinations(signals, n_pairs):
            pat = OutcomePattern(frozenset(signal_combo), frozenset(idler_combo))
            values[pat.key()] = n_pair_probability(state, pat)
    return OutcomeTable(values, meta={"n_pairs": n_pairs, "kind": "exact_quantum"})
