"""Scenario configuration and the end-to-end pipeline.

A scenario bundles a pump spectrum, a channel grid, the squeezing
gain, the oracle truncation, a detection model and sampling controls.
Running it produces the exact prediction tables, the sampled counts,
the distinguishable-photon baseline and the interference contrast, all
reproducible from the config plus seed alone.  Artifact files embed
the seed and a hash of the resolved config so every output can be
traced back to its inputs.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .detection import (
    ContrastReport,
    CountReport,
    DetectionModel,
    apply_detection,
    classical_fourfold_prediction,
    interference_contrast,
    normalize_to_least_efficient,
    split_counts,
)
from .fock import OccupationPattern, TruncatedState, expand, pattern_probability, sample_events
from .gaussian import (
    GaussianPairState,
    OutcomePattern,
    from_jsa,
    n_pair_probability,
    quantum_outcome_table,
)
from .jsa import FrequencyGrid, JsaMatrix, PumpSpectrum, _reject_unknown_keys, build_jsa
from .outcomes import OutcomeTable, PatternKey, pattern_key, pattern_string
from .permanent import count_nonzero_permutations

__all__ = [
    "VERIFY_TOLERANCE",
    "PumpComponent",
    "ScenarioConfig",
    "SweepSpec",
    "ScenarioResult",
    "SweepResult",
    "VerifyReport",
    "run_scenario",
    "phase_sweep",
    "verify_oracle",
    "single_permutation_patterns",
    "render_artifacts",
    "publish_artifacts",
    "bundled_config_names",
    "load_bundled_config",
]

VERIFY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PumpComponent:
    """One pump tone: channel index, magnitude and phase in radians."""

    index: int
    magnitude: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.magnitude) and self.magnitude >= 0):
            raise ValueError(f"pump magnitude must be finite and non-negative, got {self.magnitude}")
        if not math.isfinite(self.phase):
            raise ValueError(f"pump phase must be finite, got {self.phase}")

    @property
    def amplitude(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))

    def to_dict(self) -> dict:
        return {"index": self.index, "magnitude": self.magnitude, "phase": self.phase}


@dataclass(frozen=True)
class ScenarioConfig:
    pump: tuple[PumpComponent, ...]
    grid: FrequencyGrid
    detection: DetectionModel
    gain: float = 0.1
    truncation: int = 4
    shots: int = 1_000_000
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "pump", tuple(self.pump))
        if not self.pump:
            raise ValueError("config needs at least one pump component")
        indices = [c.index for c in self.pump]
        if len(set(indices)) != len(indices):
            raise ValueError(f"duplicate pump indices in config: {indices}")
        if self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")
        self.detection.validate_for_grid(self.grid)

    def pump_spectrum(self) -> PumpSpectrum:
        return PumpSpectrum({c.index: c.amplitude for c in self.pump})

    def to_dict(self) -> dict:
        return {
            "pump": [c.to_dict() for c in self.pump],
            "grid": self.grid.to_dict(),
            "gain": self.gain,
            "truncation": self.truncation,
            "detection": self.detection.to_dict(),
            "shots": self.shots,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ScenarioConfig":
        _reject_unknown_keys(
            doc, ("pump", "grid", "detection", "gain", "truncation", "shots", "seed"), "config"
        )
        try:
            pump = []
            for c in doc["pump"]:
                _reject_unknown_keys(c, ("index", "magnitude", "phase"), "pump component")
                pump.append(
                    PumpComponent(
                        index=int(c["index"]),
                        magnitude=float(c["magnitude"]),
                        phase=float(c.get("phase", 0.0)),
                    )
                )
            pump = tuple(pump)
            grid = FrequencyGrid.from_dict(doc["grid"])
            detection = DetectionModel.from_dict(doc.get("detection", {}))
        except KeyError as exc:
            raise ValueError(f"config is missing required key {exc}") from None
        return cls(
            pump=pump,
            grid=grid,
            detection=detection,
            gain=float(doc.get("gain", 0.1)),
            truncation=int(doc.get("truncation", 4)),
            shots=int(doc.get("shots", 1_000_000)),
            seed=int(doc.get("seed", 0)),
        )

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SweepSpec:
    """Phase sweep of one pump component over a grid of phases."""

    swept_pump_index: int
    phase_grid: tuple[float, ...]
    base: ScenarioConfig

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase_grid", tuple(float(t) for t in self.phase_grid))
        if not self.phase_grid:
            raise ValueError("phase grid must not be empty")
        if any(not 0.0 <= t < 2.0 * math.pi for t in self.phase_grid):
            raise ValueError("phase grid values must lie in [0, 2*pi)")
        if self.swept_pump_index not in [c.index for c in self.base.pump]:
            raise ValueError(
                f"swept pump index {self.swept_pump_index} is not a component of the base config"
            )

    def to_dict(self) -> dict:
        return {
            "swept_pump_index": self.swept_pump_index,
            "phase_grid": list(self.phase_grid),
            "base": self.base.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "SweepSpec":
        if "phase_grid" not in doc:
            raise ValueError("sweep config must contain a phase_grid")
        _reject_unknown_keys(doc, ("swept_pump_index", "phase_grid", "base"), "sweep config")
        return cls(
            swept_pump_index=int(doc.get("swept_pump_index", 0)),
            phase_grid=tuple(doc["phase_grid"]),
            base=ScenarioConfig.from_dict(doc["base"]),
        )

    def config_hash(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def single_permutation_patterns(state: GaussianPairState) -> tuple[PatternKey, ...]:
    """Fourfold patterns whose submatrix admits exactly one permutation.

    On these patterns no interference is possible, so quantum and
    classical predictions coincide; they anchor the relative scaling
    of the two tables.
    """
    import itertools

    idlers, signals = state.grid.idler_labels, state.grid.signal_labels
    anchors = []
    for ic in itertools.combinations(idlers, 2):
        for sc in itertools.combinations(signals, 2):
            rows = [state.grid.idler_position(c) for c in ic]
            cols = [state.grid.signal_position(c) for c in sc]
            sub = state.lambda_matrix[np.ix_(rows, cols)]
            if count_nonzero_permutations(sub) == 1:
                anchors.append(pattern_key(ic + sc))
    return tuple(sorted(anchors))


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    config_hash: str
    jsa: JsaMatrix
    state: GaussianPairState
    truncated: TruncatedState
    anchors: tuple[PatternKey, ...]
    twofold_exact: OutcomeTable
    fourfold_exact: OutcomeTable
    classical_exact: OutcomeTable
    contrast_exact: ContrastReport
    click_probs: OutcomeTable
    clicks: OutcomeTable | None = None
    report: CountReport | None = None
    report_normalized: CountReport | None = None
    classical_sampled: OutcomeTable | None = None
    contrast_sampled: ContrastReport | None = None


def run_scenario(cfg: ScenarioConfig, sample: bool = True) -> ScenarioResult:
    """Execute the full pipeline for one scenario.

    The exact path (amplitude matrix, squeezed state, permanent tables,
    distinguishable baseline) always runs; the sampled path is skipped
    when ``sample`` is false.
    """
    jsa = build_jsa(cfg.pump_spectrum(), cfg.grid)
    state = from_jsa(jsa, cfg.gain)
    truncated = expand(state, cfg.truncation)
    anchors = single_permutation_patterns(state)

    twofold_exact = quantum_outcome_table(state, 1)
    fourfold_exact = quantum_outcome_table(state, 2)
    classical_exact = classical_fourfold_prediction(twofold_exact, total_shots=1)
    contrast_exact = interference_contrast(fourfold_exact, classical_exact, anchors)
    click_probs = apply_detection(truncated, cfg.detection)

    result = ScenarioResult(
        config=cfg,
        config_hash=cfg.config_hash(),
        jsa=jsa,
        state=state,
        truncated=truncated,
        anchors=anchors,
        twofold_exact=twofold_exact,
        fourfold_exact=fourfold_exact,
        classical_exact=classical_exact,
        contrast_exact=contrast_exact,
        click_probs=click_probs,
    )
    if sample:
        clicks = sample_events(truncated, cfg.detection, cfg.shots, cfg.seed)
        report = split_counts(clicks, cfg.grid, cfg.shots, cfg.seed)
        result.clicks = clicks
        result.report = report
        result.report_normalized = normalize_to_least_efficient(report, cfg.detection)
        result.classical_sampled = classical_fourfold_prediction(report.twofold, cfg.shots)
        result.contrast_sampled = interference_contrast(
            report.fourfold, result.classical_sampled, anchors
        )
    return result


@dataclass
class SweepResult:
    spec: SweepSpec
    config_hash: str
    thetas: tuple[float, ...]
    center_row_abs2: np.ndarray  # shape (n_theta, 3): |amplitude|^2 on row i1, columns s1..s3
    twofold_counts: list[OutcomeTable] | None = None
    point_seeds: tuple[int, ...] | None = None


def phase_sweep(spec: SweepSpec, sample: bool = False) -> SweepResult:
    """Sweep the phase of one pump component and track the i1 row.

    For every phase the first idler row of the amplitude matrix is
    recorded as |entry|^2 for signal columns s1..s3: the center column
    carries the interference between the degenerate and cross pump
    contributions while the side columns stay flat.  With ``sample``
    set, each point also draws its twofold counts using a sub-seed
    derived from the base seed.
    """
    base = spec.base
    rows = []
    tables: list[OutcomeTable] | None = [] if sample else None
    seeds: tuple[int, ...] | None = None
    if sample:
        seeds = tuple(
            int(s) for s in np.random.SeedSequence(base.seed).generate_state(len(spec.phase_grid), dtype=np.uint64)
        )
    for i, theta in enumerate(spec.phase_grid):
        pump = tuple(
            replace(c, phase=float(theta)) if c.index == spec.swept_pump_index else c
            for c in base.pump
        )
        cfg = replace(base, pump=pump)
        jsa = build_jsa(cfg.pump_spectrum(), cfg.grid)
        row = np.abs(jsa.entries[0, :3]) ** 2
        rows.append(row)
        if sample:
            state = from_jsa(jsa, cfg.gain)
            truncated = expand(state, cfg.truncation)
            clicks = sample_events(truncated, cfg.detection, cfg.shots, seeds[i])
            tables.append(split_counts(clicks, cfg.grid, cfg.shots, seeds[i]).twofold)
    return SweepResult(
        spec=spec,
        config_hash=spec.config_hash(),
        thetas=spec.phase_grid,
        center_row_abs2=np.array(rows),
        twofold_counts=tables,
        point_seeds=seeds,
    )


@dataclass
class VerifyReport:
    max_relative_deviation: float
    n_patterns: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_relative_deviation < self.tolerance


def verify_oracle(cfg: ScenarioConfig, max_pairs: int = 3) -> VerifyReport:
    """Compare the permanent shortcut against the Fock expansion.

    Every collision-free pattern up to ``max_pairs`` pairs (bounded by
    the truncation and the channel counts) is evaluated along both
    routes; the report carries the worst relative deviation.
    """
    if cfg.truncation < 2:
        raise ValueError("verification needs a truncation of at least 2")
    import itertools

    jsa = build_jsa(cfg.pump_spectrum(), cfg.grid)
    state = from_jsa(jsa, cfg.gain)
    truncated = expand(state, cfg.truncation)
    signals, idlers = cfg.grid.signal_labels, cfg.grid.idler_labels
    ns, ni = len(signals), len(idlers)
    worst = 0.0
    checked = 0
    for n in range(1, min(max_pairs, cfg.truncation, ns, ni) + 1):
        for ic in itertools.combinations(range(ni), n):
            for sc in itertools.combinations(range(ns), n):
                pat = OutcomePattern(
                    frozenset(signals[j] for j in sc), frozenset(idlers[j] for j in ic)
                )
                p_perm = n_pair_probability(state, pat)
                occ = OccupationPattern(
                    tuple(1 if j in sc else 0 for j in range(ns)),
                    tuple(1 if j in ic else 0 for j in range(ni)),
                )
                p_fock = pattern_probability(truncated, occ)
                denom = max(abs(p_perm), abs(p_fock))
                if denom > 0.0:
                    worst = max(worst, abs(p_perm - p_fock) / denom)
                checked += 1
    return VerifyReport(max_relative_deviation=worst, n_patterns=checked, tolerance=VERIFY_TOLERANCE)


# ---------------------------------------------------------------------------
# artifact rendering


def _meta(result_hash: str, seed: int | None) -> dict:
    meta: dict[str, object] = {"config_hash": result_hash}
    if seed is not None:
        meta["seed"] = seed
    return meta


def _fmt(value) -> str:
    if value == "" or value is None:
        return ""
    return repr(value)


def _counts_csv(
    keys: Sequence[PatternKey],
    meta: Mapping[str, object],
    raw: OutcomeTable | None,
    normalized: OutcomeTable | None,
    quantum_pred: OutcomeTable | None,
    classical_pred: OutcomeTable | None,
    ratios: OutcomeTable | None,
) -> str:
    lines = [f"# {k}={meta[k]}" for k in sorted(meta)]
    lines.append("pattern,raw_count,normalized_count,quantum_pred,classical_pred,ratio")
    for key in keys:
        cells = [pattern_string(key)]
        for table in (raw, normalized, quantum_pred, classical_pred, ratios):
            cells.append(_fmt(table.values.get(key, "")) if table is not None else "")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_artifacts(
    result: ScenarioResult,
    formats: Sequence[str] = ("all",),
    include_comparison: bool = True,
) -> dict[str, bytes]:
    """Render a scenario result into artifact file bodies.

    Always includes the config echo; table formats follow ``formats``
    (any of csv, json, svg, or all).
    """
    want = set(formats)
    if "all" in want:
        want = {"csv", "json", "svg"}
    cfg = result.config
    meta = _meta(result.config_hash, cfg.seed)
    files: dict[str, bytes] = {}

    echo = dict(cfg.to_dict())
    echo["config_hash"] = result.config_hash
    files["config.json"] = (json.dumps(echo, sort_keys=True, indent=2) + "\n").encode()

    shots = cfg.shots
    quantum_pred_2 = OutcomeTable(
        {k: v * shots for k, v in result.click_probs.values.items() if len(k) == 2},
        meta={"kind": "expected_counts"},
    )
    quantum_pred_4 = OutcomeTable(
        {k: v * shots for k, v in result.click_probs.values.items() if len(k) == 4},
        meta={"kind": "expected_counts"},
    )
    two_keys = sorted(result.twofold_exact.values)
    four_keys = sorted(result.fourfold_exact.values)

    sampled = result.report is not None
    if "csv" in want:
        files["twofold.csv"] = _counts_csv(
            two_keys,
            meta,
            result.report.twofold if sampled else None,
            result.report_normalized.twofold if sampled else None,
            quantum_pred_2,
            None,
            None,
        ).encode()
        files["fourfold.csv"] = _counts_csv(
            four_keys,
            meta,
            result.report.fourfold if sampled else None,
            result.report_normalized.fourfold if sampled else None,
            quantum_pred_4,
            result.classical_sampled if sampled else None,
            result.contrast_sampled.ratios if sampled else None,
        ).encode()
    if "csv" in want and include_comparison:
        lines = [f"# {k}={meta[k]}" for k in sorted(meta)]
        lines.append("pattern,quantum_weight,classical_weight,ratio,interference")
        for key in four_keys:
            q = result.fourfold_exact.values[key]
            c = result.classical_exact.values[key]
            r = result.contrast_exact.ratios.values.get(key)
            if r is None:
                label, r_text = "undefined", ""
            elif math.isinf(r):
                label, r_text = "infinite enhancement", "inf"
            elif r > 1.0 + 1e-9:
                label, r_text = "constructive", repr(r)
            elif r < 1.0 - 1e-9:
                label, r_text = "destructive", repr(r)
            else:
                label, r_text = "none", repr(r)
            lines.append(f"{pattern_string(key)},{q!r},{c!r},{r_text},{label}")
        summary = result.contrast_exact.summary_dict()
        for k in sorted(summary):
            v = summary[k]
            text = ";".join(v) if isinstance(v, list) else v
            lines.append(f"# summary.{k}={text}")
        files["comparison.csv"] = ("\n".join(lines) + "\n").encode()

    if "json" in want:
        files["twofold.json"] = result.twofold_exact.to_json_text(
            {**meta, "expected_counts": {pattern_string(k): v for k, v in quantum_pred_2.sorted_items()}}
        ).encode()
        files["fourfold.json"] = result.fourfold_exact.to_json_text(meta).encode()
        if sampled:
            files["counts.json"] = result.report.to_json_text(meta).encode()
    if "json" in want and include_comparison:
        comparison = {
            "meta": meta,
            "quantum": {pattern_string(k): v for k, v in result.fourfold_exact.sorted_items()},
            "classical": {pattern_string(k): v for k, v in result.classical_exact.sorted_items()},
            "ratios": {
                pattern_string(k): (repr(v) if not math.isfinite(v) else v)
                for k, v in result.contrast_exact.ratios.sorted_items()
            },
            "summary": result.contrast_exact.summary_dict(),
        }
        files["comparison.json"] = (json.dumps(comparison, sort_keys=True, indent=2) + "\n").encode()

    if "svg" in want:
        from . import render

        files["twofold.svg"] = render.twofold_chart(result, meta)
        files["fourfold.svg"] = render.fourfold_chart(result, meta)

    return files


def render_sweep_artifacts(result: SweepResult, formats: Sequence[str] = ("all",)) -> dict[str, bytes]:
    want = set(formats)
    if "all" in want:
        want = {"csv", "json", "svg"}
    meta = _meta(result.config_hash, result.spec.base.seed)
    files: dict[str, bytes] = {}
    echo = dict(result.spec.to_dict())
    echo["config_hash"] = result.config_hash
    files["config.json"] = (json.dumps(echo, sort_keys=True, indent=2) + "\n").encode()

    sampled = result.twofold_counts is not None
    if "csv" in want:
        lines = [f"# {k}={meta[k]}" for k in sorted(meta)]
        header = "theta,i1_s1_abs2,i1_s2_abs2,i1_s3_abs2"
        if sampled:
            header += ",point_seed," + ",".join(
                f"count_{pattern_string(k)}" for k in sorted(result.twofold_counts[0].values)
            )
        lines.append(header)
        for i, theta in enumerate(result.thetas):
            row = [repr(float(theta))] + [repr(float(v)) for v in result.center_row_abs2[i]]
            if sampled:
                row.append(str(result.point_seeds[i]))
                row += [repr(v) for _, v in result.twofold_counts[i].sorted_items()]
            lines.append(",".join(row))
        files["sweep.csv"] = ("\n".join(lines) + "\n").encode()

    if "json" in want:
        doc = {
            "meta": meta,
            "theta": [float(t) for t in result.thetas],
            "i1_row_abs2": [[float(v) for v in row] for row in result.center_row_abs2],
        }
        if sampled:
            doc["point_seeds"] = list(result.point_seeds)
            doc["twofold_counts"] = [
                {pattern_string(k): v for k, v in t.sorted_items()} for t in result.twofold_counts
            ]
        files["sweep.json"] = (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()

    if "svg" in want:
        from . import render

        files["sweep.svg"] = render.sweep_chart(result, meta)
    return files


def publish_artifacts(files: Mapping[str, bytes], out_dir: str | Path) -> list[Path]:
    """Write staged artifact bodies, leaving no partial directory behind.

    All bodies are staged into a temporary sibling directory first; the
    final directory is only created or updated once every file exists.
    """
    out = Path(out_dir)
    tmp = out.parent / f".{out.name}.tmp.{os.getpid()}"
    tmp.mkdir(parents=True, exist_ok=True)
    try:
        for name, body in files.items():
            (tmp / name).write_bytes(body)
        if not out.exists():
            tmp.replace(out)
            return [out / name for name in files]
        written = []
        for name in files:
            target = out / name
            os.replace(tmp / name, target)
            written.append(target)
        return written
    finally:
        if tmp.exists():
            for leftover in tmp.iterdir():
                leftover.unlink()
            tmp.rmdir()


# ---------------------------------------------------------------------------
# bundled scenarios


def bundled_config_names() -> tuple[str, ...]:
    files = resources.files("sis").joinpath("configs")
    return tuple(sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json")))


def load_bundled_config(name: str) -> dict:
    """Parsed JSON body of a bundled config such as ``two-pump`` or ``sweep``."""
    path = resources.files("sis").joinpath("configs", f"{name}.json")
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ValueError(f"no bundled config named {name!r}; have {bundled_config_names()}") from None
    return json.loads(text)
