"""Detection model: loss, threshold clicks, and classical baselines.

Loss is per-channel binomial thinning of photon number.  Detectors are
threshold devices, so an occupation of one or more maps to a single
click; by default events where any channel keeps two or more photons
are dropped rather than recorded, matching hardware that cannot
resolve photon number.  The classical baseline treats photons as
distinguishable: fourfold rates are permanents of the measured twofold
rate matrix, with no amplitude-level interference.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable, Mapping

import numpy as np

from .jsa import FrequencyGrid, _reject_unknown_keys
from .outcomes import OutcomeTable, PatternKey, pattern_key, pattern_string
from .permanent import permanent

if TYPE_CHECKING:
    from .fock import OccupationPattern, TruncatedState

__all__ = [
    "DetectionModel",
    "CountReport",
    "ContrastReport",
    "apply_detection",
    "thin_occupations",
    "threshold_clicks",
    "occupation_distribution",
    "normalize_to_least_efficient",
    "classical_fourfold_prediction",
    "interference_contrast",
]


@dataclass(frozen=True)
class DetectionModel:
    """Per-channel efficiencies plus threshold-detector behaviour.

    ``dark_click_prob`` exists for completeness and defaults to zero on
    every channel; the shipped scenarios never enable it.
    """

    efficiencies: Mapping[str, float] = field(default_factory=dict)
    record_collisions: bool = False
    dark_click_prob: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        effs = {str(k): float(v) for k, v in dict(self.efficiencies).items()}
        for label, eta in effs.items():
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"efficiency for {label} must lie in [0, 1], got {eta}")
        darks = {str(k): float(v) for k, v in dict(self.dark_click_prob).items()}
        for label, d in darks.items():
            if not 0.0 <= d <= 1.0:
                raise ValueError(f"dark click probability for {label} must lie in [0, 1], got {d}")
        object.__setattr__(self, "efficiencies", effs)
        object.__setattr__(self, "dark_click_prob", darks)

    def efficiency(self, label: str) -> float:
        return self.efficiencies.get(label, 1.0)

    def dark_click(self, label: str) -> float:
        return self.dark_click_prob.get(label, 0.0)

    def validate_for_grid(self, grid: FrequencyGrid) -> None:
        known = set(grid.channel_labels)
        stray = (set(self.efficiencies) | set(self.dark_click_prob)) - known
        if stray:
            raise ValueError(f"detection model references unknown channels {sorted(stray)}")

    def with_efficiencies(self, efficiencies: Mapping[str, float]) -> "DetectionModel":
        return replace(self, efficiencies=efficiencies)

    def to_dict(self) -> dict:
        doc: dict = {
            "efficiencies": {k: self.efficiencies[k] for k in sorted(self.efficiencies)},
            "record_collisions": self.record_collisions,
        }
        if self.dark_click_prob:
            doc["dark_click_prob"] = {k: self.dark_click_prob[k] for k in sorted(self.dark_click_prob)}
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "DetectionModel":
        _reject_unknown_keys(doc, ("efficiencies", "record_collisions", "dark_click_prob"), "detection model")
        return cls(
            efficiencies=dict(doc.get("efficiencies", {})),
            record_collisions=bool(doc.get("record_collisions", False)),
            dark_click_prob=dict(doc.get("dark_click_prob", {})),
        )


OccKey = tuple[tuple[int, ...], tuple[int, ...]]


def occupation_distribution(state: "TruncatedState") -> dict[OccKey, float]:
    """Probability of each occupation pattern in the truncated state.

    Sums to 1 - norm_deficit; no renormalization is applied here.
    """
    return {
        (pat.signal, pat.idler): float(abs(amp) ** 2)
        for pat, amp in state.amplitudes.items()
    }


def _binomial_pmf(n: int, eta: float) -> list[float]:
    if n == 0:
        return [1.0]
    if eta == 1.0:
        return [0.0] * n + [1.0]
    if eta == 0.0:
        return [1.0] + [0.0] * n
    return [math.comb(n, k) * eta**k * (1.0 - eta) ** (n - k) for k in range(n + 1)]


def thin_occupations(
    dist: Mapping[OccKey, float], model: DetectionModel, grid: FrequencyGrid
) -> dict[OccKey, float]:
    """Exact per-channel binomial loss applied to an occupation distribution.

    Composing two thinning passes with efficiencies eta and eta' equals
    a single pass with eta * eta'.
    """
    model.validate_for_grid(grid)
    s_labels, i_labels = grid.signal_labels, grid.idler_labels
    out: dict[OccKey, float] = {}
    for (s_occ, i_occ), weight in dist.items():
        if len(s_occ) != len(s_labels) or len(i_occ) != len(i_labels):
            raise ValueError("occupation pattern does not match the grid")
        branches: list[tuple[tuple[int, ...], tuple[int, ...], float]] = [((), (), weight)]
        for occ, labels, which in ((s_occ, s_labels, 0), (i_occ, i_labels, 1)):
            for n, label in zip(occ, labels):
                pmf = _binomial_pmf(n, model.efficiency(label))
                nxt = []
                for s_part, i_part, w in branches:
                    for k, p in enumerate(pmf):
                        if p == 0.0:
                            continue
                        if which == 0:
                            nxt.append((s_part + (k,), i_part, w * p))
                        else:
                            nxt.append((s_part, i_part + (k,), w * p))
                branches = nxt
        for s_part, i_part, w in branches:
            key = (s_part, i_part)
            out[key] = out.get(key, 0.0) + w
    return out


def threshold_clicks(
    dist: Mapping[OccKey, float], model: DetectionModel, grid: FrequencyGrid
) -> OutcomeTable:
    """Map surviving occupations to click patterns.

    Occupation >= 1 gives a click.  When ``record_collisions`` is
    false, events where any channel kept two or more photons are
    dropped entirely.  Dark clicks, when enabled, fire independently on
    channels that saw no photon.
    """
    s_labels, i_labels = grid.signal_labels, grid.idler_labels
    values: dict[PatternKey, float] = {}
    for (s_occ, i_occ), weight in dist.items():
        if weight == 0.0:
            continue
        if not model.record_collisions and (max(s_occ, default=0) >= 2 or max(i_occ, default=0) >= 2):
            continue
        lit = [lab for lab, n in zip(i_labels, i_occ) if n >= 1]
        lit += [lab for lab, n in zip(s_labels, s_occ) if n >= 1]
        dark = [
            (lab, model.dark_click(lab))
            for lab, n in zip(i_labels + s_labels, i_occ + s_occ)
            if n == 0 and model.dark_click(lab) > 0.0
        ]
        if not dark:
            key = pattern_key(lit)
            values[key] = values.get(key, 0.0) + weight
            continue
        for fires in itertools.product((False, True), repeat=len(dark)):
            w = weight
            extra = []
            for (lab, d), fired in zip(dark, fires):
                w *= d if fired else (1.0 - d)
                if fired:
                    extra.append(lab)
            key = pattern_key(lit + extra)
            values[key] = values.get(key, 0.0) + w
    return OutcomeTable(values, meta={"kind": "click_probability"})


def apply_detection(state: "TruncatedState", model: DetectionModel) -> OutcomeTable:
    """Exact click-pattern probabilities of a truncated state.

    The result is subnormalized by the state's norm deficit and, when
    collisions are dropped, by the dropped events.
    """
    model.validate_for_grid(state.grid)
    thinned = thin_occupations(occupation_distribution(state), model, state.grid)
    return threshold_clicks(thinned, model, state.grid)


@dataclass
class CountReport:
    """Twofold and fourfold pattern counts from one sampling run."""

    twofold: OutcomeTable
    fourfold: OutcomeTable
    n_shots: int
    seed: int | None = None
    normalized: bool = False

    def to_csv_texts(
        self,
        quantum_pred: OutcomeTable | None = None,
        classical_pred: OutcomeTable | None = None,
        ratios: OutcomeTable | None = None,
        raw: "CountReport | None" = None,
        meta: Mapping[str, object] | None = None,
    ) -> dict[str, str]:
        """Render the report as twofold and fourfold CSV bodies.

        ``raw`` supplies the unnormalized counts when this report has
        been normalized; predictions and ratios fill the remaining
        columns where available.
        """
        merged: dict[str, object] = {"n_shots": self.n_shots}
        if self.seed is not None:
            merged["seed"] = self.seed
        if meta:
            merged.update(meta)
        out = {}
        for name, table in (("twofold", self.twofold), ("fourfold", self.fourfold)):
            lines = [f"# {k}={merged[k]}" for k in sorted(merged)]
            lines.append("pattern,raw_count,normalized_count,quantum_pred,classical_pred,ratio")
            raw_table = getattr(raw, name).values if raw is not None else table.values
            for key, value in table.sorted_items():
                raw_v = raw_table.get(key, value if not self.normalized else "")
                norm_v = value if self.normalized else ""
                q = quantum_pred.values.get(key, "") if quantum_pred else ""
                c = classical_pred.values.get(key, "") if classical_pred else ""
                r = ratios.values.get(key, "") if ratios else ""
                cells = [pattern_string(key)] + [
                    "" if v == "" else repr(v) for v in (raw_v, norm_v, q, c, r)
                ]
                lines.append(",".join(cells))
            out[name] = "\n".join(lines) + "\n"
        return out

    def to_json_text(self, meta: Mapping[str, object] | None = None) -> str:
        import json

        doc = {
            "n_shots": self.n_shots,
            "seed": self.seed,
            "normalized": self.normalized,
            "twofold": {pattern_string(k): v for k, v in self.twofold.sorted_items()},
            "fourfold": {pattern_string(k): v for k, v in self.fourfold.sorted_items()},
        }
        if meta:
            doc["meta"] = dict(meta)
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def split_counts(clicks: OutcomeTable, grid: FrequencyGrid, n_shots: int, seed: int | None) -> CountReport:
    """Extract twofold and fourfold coincidence tables from click counts.

    Twofolds are exactly one idler with one signal; fourfolds are two
    idlers with two signals.  Missing combinations are zero-filled so
    downstream permanents always see the full rate matrix.
    """
    idlers, signals = grid.idler_labels, grid.signal_labels
    twofold = {
        pattern_key((i, s)): 0.0 for i in idlers for s in signals
    }
    fourfold = {
        pattern_key(ic + sc): 0.0
        for ic in itertools.combinations(idlers, 2)
        for sc in itertools.combinations(signals, 2)
    }
    for key, count in clicks.values.items():
        if key in twofold:
            twofold[key] += count
        elif key in fourfold:
            fourfold[key] += count
    return CountReport(
        twofold=OutcomeTable(twofold, meta={"kind": "sampled_counts"}),
        fourfold=OutcomeTable(fourfold, meta={"kind": "sampled_counts"}),
        n_shots=n_shots,
        seed=seed,
    )


def _split_channels(key: PatternKey) -> tuple[list[str], list[str]]:
    idlers = [c for c in key if c.startswith("i")]
    signals = [c for c in key if c.startswith("s")]
    return idlers, signals


def normalize_to_least_efficient(report: CountReport, model: DetectionModel) -> CountReport:
    """Rescale counts as if every channel were as lossy as the worst one.

    Each signal (idler) photon contributes a factor
    eta_min_signal / eta_channel (idler respectively), undoing the
    relative efficiency spread without inventing absolute rates.
    Applying the normalization twice is the same as applying it once.
    """
    if report.normalized:
        return report

    def factor(key: PatternKey, eta_min_i: float, eta_min_s: float) -> float:
        idlers, signals = _split_channels(key)
        f = 1.0
        for c in idlers:
            f *= eta_min_i / model.efficiency(c)
        for c in signals:
            f *= eta_min_s / model.efficiency(c)
        return f

    channels = set()
    for table in (report.twofold, report.fourfold):
        for key in table.values:
            channels.update(key)
    etas = {c: model.efficiency(c) for c in channels}
    dead = sorted(c for c, eta in etas.items() if eta == 0.0)
    if dead:
        raise ValueError(f"cannot normalize dead channel {dead[0]}")
    eta_min_i = min((eta for c, eta in etas.items() if c.startswith("i")), default=1.0)
    eta_min_s = min((eta for c, eta in etas.items() if c.startswith("s")), default=1.0)

    def rescale(table: OutcomeTable) -> OutcomeTable:
        return OutcomeTable(
            {k: v * factor(k, eta_min_i, eta_min_s) for k, v in table.values.items()},
            meta={**table.meta, "normalized": True},
        )

    return CountReport(
        twofold=rescale(report.twofold),
        fourfold=rescale(report.fourfold),
        n_shots=report.n_shots,
        seed=report.seed,
        normalized=True,
    )


def classical_fourfold_prediction(twofold: OutcomeTable, total_shots: float) -> OutcomeTable:
    """Distinguishable-photon fourfold rates from measured twofolds.

    The twofold table must cover every idler-signal combination; rates
    are counts divided by ``total_shots`` and fourfold predictions are
    permanents of 2x2 rate submatrices scaled back to counts.
    """
    if not total_shots >= 1:
        raise ValueError(f"total_shots must be at least 1, got {total_shots}")
    idlers: set[str] = set()
    signals: set[str] = set()
    for key in twofold.values:
        i_part, s_part = _split_channels(key)
        if len(i_part) != 1 or len(s_part) != 1:
            raise ValueError(f"not a twofold pattern: {pattern_string(key)}")
        idlers.update(i_part)
        signals.update(s_part)
    i_labels = sorted(idlers, key=lambda c: int(c[1:]))
    s_labels = sorted(signals, key=lambda c: int(c[1:]))
    missing = [
        (i, s) for i in i_labels for s in s_labels if pattern_key((i, s)) not in twofold.values
    ]
    if missing:
        raise ValueError(f"twofold table is missing combination {missing[0]}")
    rate = np.array(
        [[twofold[(i, s)] / total_shots for s in s_labels] for i in i_labels], dtype=np.complex128
    )
    values: dict[PatternKey, float] = {}
    for ic in itertools.combinations(range(len(i_labels)), 2):
        for sc in itertools.combinations(range(len(s_labels)), 2):
            sub = rate[np.ix_(ic, sc)]
            key = pattern_key([i_labels[i] for i in ic] + [s_labels[s] for s in sc])
            values[key] = float(permanent(sub).real) * total_shots
    return OutcomeTable(values, meta={"kind": "classical_prediction"})


@dataclass
class ContrastReport:
    """Per-pattern quantum/classical ratios plus summary statistics."""

    ratios: OutcomeTable
    scale: float
    anchors: tuple[PatternKey, ...]
    mean_constructive: float | None
    mean_destructive: float | None
    contrast: float | None

    def summary_dict(self) -> dict:
        return {
            "scale": self.scale,
            "anchors": [pattern_string(k) for k in self.anchors],
            "mean_constructive": self.mean_constructive,
            "mean_destructive": self.mean_destructive,
            "contrast": self.contrast,
        }


def interference_contrast(
    quantum: OutcomeTable,
    classical: OutcomeTable,
    anchor_patterns: Iterable[PatternKey] = (),
    ratio_tolerance: float = 1e-9,
) -> ContrastReport:
    """Quantum over classical ratio per pattern, after anchor scaling.

    Anchor patterns are those whose amplitude submatrix admits a single
    nonzero permutation; interference cannot shift them, so the two
    tables are rescaled to agree in total over the anchors before
    ratios are taken.  Without anchors the tables are compared as
    given.  A zero classical entry against nonzero quantum weight is
    reported as an infinite enhancement rather than an error.
    """
    anchors = tuple(sorted(pattern_key(a) for a in anchor_patterns))
    keys = sorted(set(quantum.values) | set(classical.values))
    scale = 1.0
    if anchors:
        q_sum = sum(quantum.get(a) for a in anchors)
        c_sum = sum(classical.get(a) for a in anchors)
        if c_sum > 0.0 and q_sum > 0.0:
            scale = q_sum / c_sum
    ratios: dict[PatternKey, float] = {}
    for key in keys:
        q = quantum.get(key)
        c = classical.get(key) * scale
        if c == 0.0:
            if q > 0.0:
                ratios[key] = math.inf
            # both zero: the pattern carries no information, omit it
        else:
            ratios[key] = q / c
    finite = {k: r for k, r in ratios.items() if math.isfinite(r)}
    up = [r for r in finite.values() if r > 1.0 + ratio_tolerance]
    down = [r for r in finite.values() if r < 1.0 - ratio_tolerance]
    mean_con = float(np.mean(up)) if up else None
    mean_des = float(np.mean(down)) if down else None
    contrast = mean_con / mean_des if (mean_con and mean_des) else None
    return ContrastReport(
        ratios=OutcomeTable(ratios, meta={"kind": "contrast_ratio"}),
        scale=float(scale),
        anchors=anchors,
        mean_constructive=mean_con,
        mean_destructive=mean_des,
        contrast=contrast,
    )
