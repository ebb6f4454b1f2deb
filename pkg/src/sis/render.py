"""Figure-ready SVG bar charts for scenario and sweep results.

Rendering is deterministic: the SVG hash salt is pinned to the config
hash and the date metadata is suppressed, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import io
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

if TYPE_CHECKING:
    from .scenario import ScenarioResult, SweepResult

from .outcomes import pattern_string


def _new_figure(salt: str, figsize: tuple[float, float]):
    import matplotlib

    matplotlib.use("svg", force=False)
    from matplotlib.figure import Figure

    matplotlib.rcParams["svg.hashsalt"] = salt
    return Figure(figsize=figsize)


def _to_svg(fig, meta: Mapping[str, object]) -> bytes:
    buf = io.BytesIO()
    description = ", ".join(f"{k}={meta[k]}" for k in sorted(meta))
    fig.savefig(buf, format="svg", metadata={"Date": None, "Description": description})
    return buf.getvalue()


def _bar_chart(
    salt: str,
    meta: Mapping[str, object],
    labels: Sequence[str],
    series: Sequence[tuple[str, Sequence[float]]],
    title: str,
    ylabel: str,
) -> bytes:
    fig = _new_figure(salt, (max(6.0, 1.1 * len(labels)), 4.0))
    ax = fig.add_subplot(111)
    x = np.arange(len(labels))
    width = 0.8 / max(1, len(series))
    for i, (name, values) in enumerate(series):
        ax.bar(x + (i - (len(series) - 1) / 2) * width, values, width, label=name)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    return _to_svg(fig, meta)


def twofold_chart(result: "ScenarioResult", meta: Mapping[str, object]) -> bytes:
    keys = sorted(result.twofold_exact.values)
    labels = [pattern_string(k) for k in keys]
    series: list[tuple[str, list[float]]] = []
    if result.report is not None:
        series.append(("sampled", [result.report.twofold.values.get(k, 0.0) for k in keys]))
        if result.report_normalized is not None:
            series.append(
                ("normalized", [result.report_normalized.twofold.values.get(k, 0.0) for k in keys])
            )
        expected = [
            result.click_probs.values.get(k, 0.0) * result.config.shots for k in keys
        ]
        series.append(("expected", expected))
        ylabel = "counts"
    else:
        series.append(("exact probability", [result.twofold_exact.values[k] for k in keys]))
        ylabel = "probability"
    return _bar_chart(
        result.config_hash, meta, labels, series, "Twofold coincidences", ylabel
    )


def fourfold_chart(result: "ScenarioResult", meta: Mapping[str, object]) -> bytes:
    keys = sorted(result.fourfold_exact.values)
    labels = [pattern_string(k) for k in keys]
    series: list[tuple[str, list[float]]] = []
    if result.report is not None:
        series.append(("sampled", [result.report.fourfold.values.get(k, 0.0) for k in keys]))
        if result.classical_sampled is not None:
            series.append(
                ("classical", [result.classical_sampled.values.get(k, 0.0) for k in keys])
            )
        ylabel = "counts"
    else:
        scale = result.contrast_exact.scale
        series.append(("quantum", [result.fourfold_exact.values[k] for k in keys]))
        series.append(
            ("classical (scaled)", [result.classical_exact.values[k] * scale for k in keys])
        )
        ylabel = "probability"
    return _bar_chart(
        result.config_hash, meta, labels, series, "Fourfold coincidences", ylabel
    )


def sweep_chart(result: "SweepResult", meta: Mapping[str, object]) -> bytes:
    fig = _new_figure(result.config_hash, (6.4, 4.0))
    ax = fig.add_subplot(111)
    thetas = np.asarray(result.thetas)
    curves = result.center_row_abs2
    names = ["i1&s1", "i1&s2", "i1&s3"][: curves.shape[1]]
    for col, name in enumerate(names):
        ax.plot(thetas, curves[:, col], marker="o", markersize=3, label=name)
    ax.set_xlabel("center pump phase (rad)")
    ax.set_ylabel("|amplitude|^2")
    ax.set_title("Twofold amplitudes vs pump phase")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _to_svg(fig, meta)
