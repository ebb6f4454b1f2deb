"""Loss thinning, threshold clicks, count normalization and contrast."""

import numpy as np
import pytest

from sis import (
    CountReport,
    DetectionModel,
    FrequencyGrid,
    OutcomeTable,
    classical_fourfold_prediction,
    default_grid,
    interference_contrast,
    normalize_to_least_efficient,
    pattern_key,
)
from sis.detection import split_counts, thin_occupations, threshold_clicks


def small_grid():
    return FrequencyGrid(pump_indices=(0,), signal_indices=(1, 2), idler_indices=(-1, -2))


def test_model_validation():
    with pytest.raises(ValueError):
        DetectionModel(efficiencies={"s1": 1.2})
    with pytest.raises(ValueError):
        DetectionModel(efficiencies={"s1": -0.1})
    with pytest.raises(ValueError):
        DetectionModel(dark_click_prob={"s1": 2.0})
    m = DetectionModel(efficiencies={"s1": 0.5})
    assert m.efficiency("s1") == 0.5
    assert m.efficiency("s2") == 1.0
    assert m.dark_click("s2") == 0.0


def test_model_grid_validation():
    m = DetectionModel(efficiencies={"s9": 0.5})
    with pytest.raises(ValueError, match="unknown channels"):
        m.validate_for_grid(default_grid())
    DetectionModel(efficiencies={"s4": 0.5}).validate_for_grid(default_grid())


def test_model_dict_round_trip():
    m = DetectionModel(
        efficiencies={"s1": 0.5, "i2": 0.25},
        record_collisions=True,
        dark_click_prob={"s2": 0.01},
    )
    assert DetectionModel.from_dict(m.to_dict()) == m
    with pytest.raises(ValueError, match="unknown key"):
        DetectionModel.from_dict({"efficiencies": {}, "typo": 1})


def test_thinning_exact_binomial():
    grid = small_grid()
    dist = {((2, 0), (1, 0)): 1.0}
    model = DetectionModel(efficiencies={"s1": 0.5, "i1": 0.25})
    out = thin_occupations(dist, model, grid)
    # signal channel keeps 0, 1 or 2 of two photons; idler keeps 0 or 1
    assert out[((2, 0), (1, 0))] == pytest.approx(0.25 * 0.25)
    assert out[((1, 0), (1, 0))] == pytest.approx(0.5 * 0.25)
    assert out[((0, 0), (0, 0))] == pytest.approx(0.25 * 0.75)
    assert sum(out.values()) == pytest.approx(1.0)


def test_thinning_composes():
    grid = small_grid()
    rng = np.random.default_rng(21)
    for _ in range(20):
        dist = {}
        for _ in range(4):
            s = tuple(rng.integers(0, 3, size=2))
            i = tuple(rng.integers(0, 3, size=2))
            dist[(s, i)] = dist.get((s, i), 0.0) + float(rng.random())
        etas1 = {c: float(rng.uniform(0.2, 1.0)) for c in grid.channel_labels}
        etas2 = {c: float(rng.uniform(0.2, 1.0)) for c in grid.channel_labels}
        combo = {c: etas1[c] * etas2[c] for c in etas1}
        two_pass = thin_occupations(
            thin_occupations(dist, DetectionModel(efficiencies=etas1), grid),
            DetectionModel(efficiencies=etas2),
            grid,
        )
        one_pass = thin_occupations(dist, DetectionModel(efficiencies=combo), grid)
        assert set(two_pass) == set(one_pass)
        for key in one_pass:
            assert two_pass[key] == pytest.approx(one_pass[key], rel=1e-12)


def test_thinning_rejects_mismatched_pattern():
    with pytest.raises(ValueError, match="does not match"):
        thin_occupations({((1,), (1,)): 1.0}, DetectionModel(), small_grid())


def test_threshold_collision_handling():
    grid = small_grid()
    dist = {((2, 0), (1, 1)): 0.3, ((1, 0), (1, 0)): 0.7}
    dropped = threshold_clicks(dist, DetectionModel(record_collisions=False), grid)
    assert dropped.get(("s1", "i1", "i2")) == 0.0
    assert dropped[("s1", "i1")] == pytest.approx(0.7)
    kept = threshold_clicks(dist, DetectionModel(record_collisions=True), grid)
    assert kept[("s1", "i1", "i2")] == pytest.approx(0.3)


def test_threshold_dark_clicks_fire_on_silent_channels():
    grid = small_grid()
    dist = {((1, 0), (1, 0)): 1.0}
    model = DetectionModel(dark_click_prob={"s2": 0.25})
    out = threshold_clicks(dist, model, grid)
    assert out[("i1", "s1")] == pytest.approx(0.75)
    assert out[("i1", "s1", "s2")] == pytest.approx(0.25)
    # a lit channel is unaffected by its own dark probability
    lit = threshold_clicks(dist, DetectionModel(dark_click_prob={"s1": 0.25}), grid)
    assert lit[("i1", "s1")] == pytest.approx(1.0)


def test_split_counts_zero_fills_every_combination():
    grid = default_grid()
    clicks = OutcomeTable({("i1", "s2"): 10.0, ("i1", "i2", "s2", "s3"): 2.0, (): 88.0})
    report = split_counts(clicks, grid, n_shots=100, seed=9)
    assert len(report.twofold.values) == 8
    assert len(report.fourfold.values) == 6
    assert report.twofold[("i1", "s2")] == 10.0
    assert report.twofold[("i2", "s4")] == 0.0
    assert report.fourfold[("i1", "i2", "s2", "s3")] == 2.0
    assert report.n_shots == 100 and report.seed == 9 and not report.normalized


def test_normalization_scales_by_worst_channel():
    grid = default_grid()
    counts = OutcomeTable({pattern_key((i, s)): 100.0 for i in ("i1", "i2") for s in ("s1", "s2", "s3", "s4")})
    report = split_counts(counts, grid, n_shots=1000, seed=None)
    model = DetectionModel(efficiencies={"s1": 0.5, "s2": 1.0, "i1": 0.8})
    normed = normalize_to_least_efficient(report, model)
    assert normed.normalized
    # each twofold has one signal and one idler photon
    assert normed.twofold[("i1", "s1")] == pytest.approx(100.0 * (0.8 / 0.8) * (0.5 / 0.5))
    assert normed.twofold[("i1", "s2")] == pytest.approx(100.0 * 1.0 * 0.5)
    assert normed.twofold[("i2", "s2")] == pytest.approx(100.0 * (0.8 / 1.0) * 0.5)


def test_normalization_is_idempotent():
    grid = default_grid()
    counts = OutcomeTable({("i1", "s1"): 64.0, ("i1", "i2", "s1", "s2"): 4.0})
    report = split_counts(counts, grid, n_shots=100, seed=None)
    model = DetectionModel(efficiencies={"s1": 0.5, "i2": 0.7})
    once = normalize_to_least_efficient(report, model)
    twice = normalize_to_least_efficient(once, model)
    assert twice is once


def test_normalization_rejects_dead_channel():
    grid = default_grid()
    report = split_counts(OutcomeTable({("i1", "s1"): 5.0}), grid, n_shots=10, seed=None)
    with pytest.raises(ValueError, match="dead channel"):
        normalize_to_least_efficient(report, DetectionModel(efficiencies={"s1": 0.0}))


def test_classical_prediction_is_rate_permanent():
    rates = {
        ("i1", "s1"): 8.0, ("i1", "s2"): 9.0,
        ("i2", "s1"): 4.0, ("i2", "s2"): 8.0,
    }
    table = classical_fourfold_prediction(OutcomeTable(rates), total_shots=100.0)
    # perm([[.08, .09], [.04, .08]]) * 100
    assert table[("i1", "i2", "s1", "s2")] == pytest.approx((0.08 * 0.08 + 0.09 * 0.04) * 100.0)


def test_classical_prediction_validation():
    with pytest.raises(ValueError, match="total_shots"):
        classical_fourfold_prediction(OutcomeTable({("i1", "s1"): 1.0}), total_shots=0.0)
    with pytest.raises(ValueError, match="not a twofold"):
        classical_fourfold_prediction(OutcomeTable({("i1", "i2", "s1", "s2"): 1.0}), 10.0)
    missing = OutcomeTable({("i1", "s1"): 1.0, ("i2", "s2"): 1.0})
    with pytest.raises(ValueError, match="missing combination"):
        classical_fourfold_prediction(missing, 10.0)


def test_contrast_anchor_scaling():
    quantum = OutcomeTable({("i1", "s1"): 2.0, ("i1", "s2"): 10.0})
    classical = OutcomeTable({("i1", "s1"): 1.0, ("i1", "s2"): 1.0})
    report = interference_contrast(quantum, classical, anchor_patterns=[("i1", "s1")])
    assert report.scale == pytest.approx(2.0)
    assert report.ratios[("i1", "s1")] == pytest.approx(1.0)
    assert report.ratios[("i1", "s2")] == pytest.approx(5.0)
    assert report.anchors == (("i1", "s1"),)


def test_contrast_without_anchors_compares_directly():
    quantum = OutcomeTable({("i1", "s1"): 3.0})
    classical = OutcomeTable({("i1", "s1"): 2.0})
    report = interference_contrast(quantum, classical)
    assert report.scale == 1.0
    assert report.ratios[("i1", "s1")] == pytest.approx(1.5)


def test_contrast_zero_classical_is_infinite():
    quantum = OutcomeTable({("i1", "s1"): 1.0, ("i1", "s2"): 0.0})
    classical = OutcomeTable({("i1", "s1"): 0.0, ("i1", "s2"): 0.0})
    report = interference_contrast(quantum, classical)
    assert report.ratios[("i1", "s1")] == float("inf")
    # a pattern both models forbid is omitted, not reported as 0/0
    assert ("i1", "s2") not in report.ratios.values


def test_contrast_summary_statistics():
    quantum = OutcomeTable({("i1", "s1"): 4.0, ("i1", "s2"): 1.0, ("i1", "s3"): 1.0})
    classical = OutcomeTable({("i1", "s1"): 2.0, ("i1", "s2"): 2.0, ("i1", "s3"): 1.0})
    report = interference_contrast(quantum, classical)
    assert report.mean_constructive == pytest.approx(2.0)
    assert report.mean_destructive == pytest.approx(0.5)
    assert report.contrast == pytest.approx(4.0)
    summary = report.summary_dict()
    assert summary["scale"] == 1.0 and summary["anchors"] == []


def test_count_report_round_trip_and_csv():
    grid = default_grid()
    report = split_counts(OutcomeTable({("i1", "s1"): 5.0}), grid, n_shots=10, seed=4)
    texts = report.to_csv_texts()
    assert "pattern,raw_count,normalized_count,quantum_pred,classical_pred,ratio" in texts["twofold"]
    assert "i1&s1,5.0" in texts["twofold"]
    doc = report.to_json_text()
    assert '"n_shots": 10' in doc

    normed = normalize_to_least_efficient(report, DetectionModel())
    assert isinstance(normed, CountReport)
    texts2 = normed.to_csv_texts(raw=report)
    assert "i1&s1,5.0,5.0" in texts2["twofold"]
