"""Truncated Fock expansion of the pair state and event sampling.

This is the brute-force reference path: expand
exp(sum Lambda_jk a_j^dag b_k^dag) acting on vacuum order by order,
keeping bosonic ladder factors, so collision patterns (several photons
in one channel) are represented exactly up to the truncation.  The
permanent shortcut in :mod:`sis.gaussian` must agree with this
expansion on every collision-free pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .detection import DetectionModel
from .gaussian import GaussianPairState
from .jsa import FrequencyGrid
from .outcomes import OutcomeTable, PatternKey, pattern_key

__all__ = [
    "MAX_TRUNCATION",
    "OccupationPattern",
    "TruncatedState",
    "expand",
    "pattern_probability",
    "sample_events",
]

# The sparse map grows combinatorially with the photon-pair order.
MAX_TRUNCATION = 6


@dataclass(frozen=True)
class OccupationPattern:
    """Photon numbers per signal and per idler channel, in grid order."""

    signal: tuple[int, ...]
    idler: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "signal", tuple(int(n) for n in self.signal))
        object.__setattr__(self, "idler", tuple(int(n) for n in self.idler))
        if any(n < 0 for n in self.signal + self.idler):
            raise ValueError("occupations must be non-negative")
        if sum(self.signal) != sum(self.idler):
            raise ValueError(
                f"photons are created in pairs, got {sum(self.signal)} signal "
                f"and {sum(self.idler)} idler"
            )

    @property
    def n_pairs(self) -> int:
        return sum(self.signal)

    def is_collision_free(self) -> bool:
        return all(n <= 1 for n in self.signal + self.idler)


@dataclass(frozen=True)
class TruncatedState:
    """Sparse amplitude map over occupation patterns up to n_max pairs."""

    n_max: int
    amplitudes: Mapping[OccupationPattern, complex]
    norm_deficit: float
    grid: FrequencyGrid

    def vacuum_amplitude(self) -> complex:
        ns = len(self.grid.signal_indices)
        ni = len(self.grid.idler_indices)
        return self.amplitudes[OccupationPattern((0,) * ns, (0,) * ni)]


def expand(state: GaussianPairState, n_max: int) -> TruncatedState:
    """Order-by-order expansion of the squeezed state.

    The pair-creation operator is applied ``n_max`` times to a sparse
    amplitude map; the N-th application divided by N! yields the
    N-pair sector.  Ladder factors sqrt(n + 1) are picked up on every
    creation, so repeated channels are normalized correctly.
    """
    if not 1 <= n_max <= MAX_TRUNCATION:
        raise ValueError(f"n_max must lie in 1..{MAX_TRUNCATION}, got {n_max}")
    lam = state.lambda_matrix
    n_idler, n_signal = lam.shape
    nonzero = [
        (m, n, lam[m, n]) for m in range(n_idler) for n in range(n_signal) if lam[m, n] != 0
    ]
    vacuum = OccupationPattern((0,) * n_signal, (0,) * n_idler)
    amplitudes: dict[OccupationPattern, complex] = {vacuum: complex(state.norm_constant)}
    current: dict[OccupationPattern, complex] = {vacuum: 1.0 + 0j}
    factorial = 1.0
    for order in range(1, n_max + 1):
        nxt: dict[OccupationPattern, complex] = {}
        for pat, amp in current.items():
            s_occ, i_occ = pat.signal, pat.idler
            for m, n, coeff in nonzero:
                w = amp * coeff * math.sqrt((s_occ[n] + 1) * (i_occ[m] + 1))
                new = OccupationPattern(
                    s_occ[:n] + (s_occ[n] + 1,) + s_occ[n + 1 :],
                    i_occ[:m] + (i_occ[m] + 1,) + i_occ[m + 1 :],
                )
                nxt[new] = nxt.get(new, 0j) + w
        current = nxt
        factorial *= order
        for pat, amp in current.items():
            amplitudes[pat] = state.norm_constant * amp / factorial
    captured = sum(abs(a) ** 2 for a in amplitudes.values())
    return TruncatedState(
        n_max=n_max,
        amplitudes=amplitudes,
        norm_deficit=max(0.0, 1.0 - float(captured)),
        grid=state.grid,
    )


def pattern_probability(state: TruncatedState, pattern: OccupationPattern) -> float:
    """Probability of an exact occupation pattern within the truncation."""
    if pattern.n_pairs > state.n_max:
        raise ValueError(f"pattern has {pattern.n_pairs} pairs, truncation is {state.n_max}")
    ns = len(state.grid.signal_indices)
    ni = len(state.grid.idler_indices)
    if len(pattern.signal) != ns or len(pattern.idler) != ni:
        raise ValueError("pattern does not match the grid's channel counts")
    amp = state.amplitudes.get(pattern)
    if amp is None:
        return 0.0
    return float(abs(amp) ** 2)


def _sorted_patterns(state: TruncatedState) -> list[OccupationPattern]:
    return sorted(state.amplitudes, key=lambda p: (p.n_pairs, p.idler, p.signal))


def sample_events(
    state: TruncatedState,
    detection: DetectionModel,
    n_shots: int,
    seed: int,
) -> OutcomeTable:
    """Draw click-pattern counts for ``n_shots`` independent events.

    Events are drawn from the truncated distribution renormalized by
    its norm deficit, then pushed through loss thinning and threshold
    detection.  The generator is ``numpy.random.default_rng(seed)``;
    identical inputs give identical tables on any platform.
    """
    if n_shots < 1:
        raise ValueError(f"n_shots must be positive, got {n_shots}")
    detection.validate_for_grid(state.grid)
    patterns = _sorted_patterns(state)
    probs = np.array([abs(state.amplitudes[p]) ** 2 for p in patterns], dtype=np.float64)
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    event_counts = rng.multinomial(n_shots, probs)

    labels = state.grid.channel_labels
    etas = np.array([detection.efficiency(c) for c in labels])
    darks = np.array([detection.dark_click(c) for c in labels])
    weights = 1 << np.arange(len(labels), dtype=np.int64)
    counts: dict[PatternKey, int] = {}

    def add(code: int, k: int) -> None:
        key = pattern_key([lab for bit, lab in enumerate(labels) if code >> bit & 1])
        counts[key] = counts.get(key, 0) + k

    for pat, k in zip(patterns, event_counts):
        if k == 0:
            continue
        occ = np.array(pat.idler + pat.signal, dtype=np.int64)
        deterministic = darks.max() == 0.0 and bool(np.all((etas == 1.0) | (occ == 0)))
        if deterministic:
            # no randomness left for this event class
            if not detection.record_collisions and occ.max() >= 2:
                continue
            add(int(((occ >= 1) * weights).sum()), int(k))
            continue
        surv = np.zeros((k, len(occ)), dtype=np.int64)
        for c, (n, eta) in enumerate(zip(occ, etas)):
            if n == 0:
                continue
            if eta >= 1.0:
                surv[:, c] = n
            else:
                surv[:, c] = rng.binomial(int(n), eta, size=k)
        clicks = surv >= 1
        if darks.max() > 0.0:
            clicks |= rng.random((k, len(occ))) < darks
        if detection.record_collisions:
            keep = np.ones(k, dtype=bool)
        else:
            keep = ~(surv >= 2).any(axis=1)
        codes = clicks[keep] @ weights
        for code, c in zip(*np.unique(codes, return_counts=True)):
            add(int(code), int(c))

    return OutcomeTable(
        {k: v for k, v in counts.items()},
        meta={"kind": "sampled_clicks", "n_shots": n_shots, "seed": seed},
    )
