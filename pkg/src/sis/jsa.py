"""Frequency-channel bookkeeping and joint spectral amplitudes.

The model lives on a discrete grid of frequency channels indexed by
integers.  Pump components occupy channels on the pump axis; signal and
idler detection channels occupy a shared output axis.  Only channel
*sums* couple the two axes: a signal photon in channel ``n`` and an
idler photon in channel ``m`` are created with amplitude proportional to
the pump autoconvolution evaluated at ``n + m``.  Absolute offsets of
either axis are therefore pure convention, and shifting all pump
indices by ``+1`` while shifting signal and idler indices by ``+1``
each leaves the matrix unchanged.

Conventions fixed here:

* signal columns are labelled ``s1 .. sN`` in listed order,
* idler rows are labelled ``i1 .. iM`` in listed order,
* the default grid places four signal channels at indices 1..4, the
  two idler channels at -2 (``i1``) and -3 (``i2``), and up to three
  pump components at -1, 0, +1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = [
    "FrequencyGrid",
    "PumpSpectrum",
    "PumpAutoconvolution",
    "JsaMatrix",
    "autoconvolve",
    "build_jsa",
    "three_pump_matrix",
    "default_grid",
]


def _reject_unknown_keys(doc: Mapping, known: tuple[str, ...], what: str) -> None:
    extra = sorted(set(doc) - set(known))
    if extra:
        raise ValueError(f"{what} has unknown key(s): {', '.join(map(str, extra))}")


def _validate_monotonic(name: str, values: tuple[int, ...]) -> None:
    if len(values) == 0:
        raise ValueError(f"{name} must not be empty")
    if any(int(v) != v for v in values):
        raise ValueError(f"{name} must contain integers, got {values!r}")
    diffs = [b - a for a, b in zip(values, values[1:])]
    if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
        raise ValueError(f"{name} must be strictly monotonic, got {values!r}")


@dataclass(frozen=True)
class FrequencyGrid:
    """Integer channel layout for pumps, signals and idlers.

    ``signal_indices`` and ``idler_indices`` are stored in presentation
    order: the n-th signal index is column ``s{n}`` of every matrix
    built on this grid, and the m-th idler index is row ``i{m}``.
    Lists must be strictly monotonic so the ordering is unambiguous;
    signal and idler channels may not overlap since they are distinct
    physical detection channels.
    """

    spacing_hz: float = 200e9
    pump_indices: tuple[int, ...] = (-1, 0, 1)
    signal_indices: tuple[int, ...] = (1, 2, 3, 4)
    idler_indices: tuple[int, ...] = (-2, -3)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pump_indices", tuple(self.pump_indices))
        object.__setattr__(self, "signal_indices", tuple(self.signal_indices))
        object.__setattr__(self, "idler_indices", tuple(self.idler_indices))
        if not (self.spacing_hz > 0):
            raise ValueError(f"spacing_hz must be positive, got {self.spacing_hz}")
        _validate_monotonic("pump_indices", self.pump_indices)
        _validate_monotonic("signal_indices", self.signal_indices)
        _validate_monotonic("idler_indices", self.idler_indices)
        overlap = set(self.signal_indices) & set(self.idler_indices)
        if overlap:
            raise ValueError(f"signal and idler channels overlap at indices {sorted(overlap)}")

    @property
    def signal_labels(self) -> tuple[str, ...]:
        return tuple(f"s{n + 1}" for n in range(len(self.signal_indices)))

    @property
    def idler_labels(self) -> tuple[str, ...]:
        return tuple(f"i{m + 1}" for m in range(len(self.idler_indices)))

    @property
    def channel_labels(self) -> tuple[str, ...]:
        """All detection channels, idlers first."""
        return self.idler_labels + self.signal_labels

    def signal_position(self, label: str | int) -> int:
        """Column position of a signal channel given as 's2', '2' or 2."""
        text = str(label)
        if text.startswith("s"):
            text = text[1:]
        try:
            n = int(text)
        except ValueError:
            raise ValueError(f"unknown signal channel {label!r}") from None
        if not 1 <= n <= len(self.signal_indices):
            raise ValueError(f"unknown signal channel {label!r}")
        return n - 1

    def idler_position(self, label: str | int) -> int:
        """Row position of an idler channel given as 'i1', '1' or 1."""
        text = str(label)
        if text.startswith("i"):
            text = text[1:]
        try:
            m = int(text)
        except ValueError:
            raise ValueError(f"unknown idler channel {label!r}") from None
        if not 1 <= m <= len(self.idler_indices):
            raise ValueError(f"unknown idler channel {label!r}")
        return m - 1

    def to_dict(self) -> dict:
        return {
            "spacing_hz": self.spacing_hz,
            "pump_indices": list(self.pump_indices),
            "signal_indices": list(self.signal_indices),
            "idler_indices": list(self.idler_indices),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "FrequencyGrid":
        _reject_unknown_keys(doc, ("spacing_hz", "pump_indices", "signal_indices", "idler_indices"), "grid")
        return cls(
            spacing_hz=float(doc.get("spacing_hz", 200e9)),
            pump_indices=tuple(doc["pump_indices"]),
            signal_indices=tuple(doc["signal_indices"]),
            idler_indices=tuple(doc["idler_indices"]),
        )


def default_grid() -> FrequencyGrid:
    """Grid used by the canonical single- and three-pump scenarios."""
    return FrequencyGrid()


@dataclass(frozen=True)
class PumpSpectrum:
    """Complex pump amplitude per occupied pump channel."""

    amplitudes: Mapping[int, complex]

    def __post_init__(self) -> None:
        amps = {int(k): complex(v) for k, v in dict(self.amplitudes).items()}
        if not amps or all(v == 0 for v in amps.values()):
            raise ValueError("empty spectrum")
        if any(not np.isfinite([v.real, v.imag]).all() for v in amps.values()):
            raise ValueError("pump amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(k for k, v in self.amplitudes.items() if v != 0))

    def scaled(self, factor: complex) -> "PumpSpectrum":
        return PumpSpectrum({k: factor * v for k, v in self.amplitudes.items()})


@dataclass(frozen=True)
class PumpAutoconvolution:
    """Energy-matching weights ``f_j = sum_l e_l e_{j-l}``, keyed by channel sum."""

    values: Mapping[int, complex]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", {int(k): complex(v) for k, v in dict(self.values).items()})

    def __call__(self, j: int) -> complex:
        return self.values.get(j, 0j)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(k for k, v in self.values.items() if v != 0))


def autoconvolve(pump: PumpSpectrum | Mapping[int, complex]) -> PumpAutoconvolution:
    """Discrete autoconvolution of the pump spectrum.

    ``f_j`` collects every ordered pair of pump photons whose channel
    indices sum to ``j``, so a pair drawn from two distinct components
    contributes twice (``f_{p+q} = 2 e_p e_q`` for ``p != q``) while a
    degenerate pair contributes once (``f_{2p} = e_p**2``).

    Raises
    ------
    ValueError
        If the spectrum is empty or identically zero.
    """
    if not isinstance(pump, PumpSpectrum):
        pump = PumpSpectrum(pump)
    amps = {k: v for k, v in pump.amplitudes.items() if v != 0}
    out: dict[int, complex] = {}
    for p, ep in amps.items():
        for q, eq in amps.items():
            out[p + q] = out.get(p + q, 0j) + ep * eq
    return PumpAutoconvolution(out)


@dataclass(frozen=True)
class JsaMatrix:
    """Two-photon amplitude over idler rows and signal columns.

    ``entries[m, n]`` is the (unnormalized) amplitude for creating a
    signal photon in column ``n`` together with an idler photon in row
    ``m``.  Matrices built by :func:`build_jsa` satisfy
    ``entries[m, n] == f(signal_index[n] + idler_index[m])``.
    """

    entries: np.ndarray
    grid: FrequencyGrid

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError(f"entries must be a 2-d matrix, got shape {arr.shape}")
        expected = (len(self.grid.idler_indices), len(self.grid.signal_indices))
        if arr.shape != expected:
            raise ValueError(f"entries shape {arr.shape} does not match grid shape {expected}")
        if not np.isfinite(arr).all():
            raise ValueError("entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n_idler(self) -> int:
        return self.entries.shape[0]

    @property
    def n_signal(self) -> int:
        return self.entries.shape[1]

    def to_json_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "shape": list(self.entries.shape),
            "entries": [
                {"re": float(z.real), "im": float(z.imag)} for z in self.entries.ravel(order="C")
            ],
        }

    def to_json_text(self, meta: Mapping[str, object] | None = None) -> str:
        doc = self.to_json_dict()
        if meta:
            doc["meta"] = dict(meta)
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "JsaMatrix":
        grid = FrequencyGrid.from_dict(doc["grid"])
        shape = tuple(doc["shape"])
        flat = np.array([complex(e["re"], e["im"]) for e in doc["entries"]], dtype=np.complex128)
        return cls(entries=flat.reshape(shape), grid=grid)

    def to_csv_text(self, meta: Mapping[str, object] | None = None) -> str:
        lines = []
        for key in sorted(meta or {}):
            lines.append(f"# {key}={meta[key]}")
        lines.append("channel," + ",".join(self.grid.signal_labels))
        for m, row_label in enumerate(self.grid.idler_labels):
            cells = [f"{z.real:.17g}{z.imag:+.17g}j" for z in self.entries[m]]
            lines.append(row_label + "," + ",".join(cells))
        return "\n".join(lines) + "\n"


def build_jsa(pump: PumpSpectrum | Mapping[int, complex], grid: FrequencyGrid | None = None) -> JsaMatrix:
    """Joint spectral amplitude of the pair source for a given pump.

    Every entry is the autoconvolution evaluated at the sum of the
    column's signal index and the row's idler index.  The pump support
    must lie on the grid's pump channels.
    """
    if grid is None:
        grid = default_grid()
    if not isinstance(pump, PumpSpectrum):
        pump = PumpSpectrum(pump)
    stray = set(pump.support()) - set(grid.pump_indices)
    if stray:
        raise ValueError(f"pump components at indices {sorted(stray)} are not on the grid")
    f = autoconvolve(pump)
    entries = np.array(
        [[f(s + i) for s in grid.signal_indices] for i in grid.idler_indices],
        dtype=np.complex128,
    )
    return JsaMatrix(entries=entries, grid=grid)


def three_pump_matrix(a1: complex, a2: complex, a3: complex) -> JsaMatrix:
    """Closed-form amplitude matrix for three adjacent pump components.

    Components sit at the default pump channels -1, 0, +1 with
    amplitudes ``a1, a2, a3``.  The center column pair picks up the sum
    of a degenerate contribution from the middle component and a cross
    contribution from the outer two, which is what makes the outcome
    interference-sensitive to the middle component's phase.
    """
    a1, a2, a3 = complex(a1), complex(a2), complex(a3)
    row_i1 = [2 * a1 * a2, a2 * a2 + 2 * a1 * a3, 2 * a2 * a3, a3 * a3]
    row_i2 = [a1 * a1, 2 * a1 * a2, a2 * a2 + 2 * a1 * a3, 2 * a2 * a3]
    return JsaMatrix(entries=np.array([row_i1, row_i2], dtype=np.complex128), grid=default_grid())
