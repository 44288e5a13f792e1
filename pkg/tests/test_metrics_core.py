"""Accuracy windows, correlation, chance baseline, cross-entropy."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rulelab.metrics import (
    EmptyWindowError,
    LabelSeries,
    ObjectRecord,
    ZeroVarianceError,
    accuracy,
    chance_baseline,
    cross_entropy,
    cross_entropy_series,
    last_quarter_count,
    pearson_r,
    r_squared,
)


def series_of(pairs, rule_id="r") -> LabelSeries:
    records = [
        ObjectRecord(set_index=i // 3, object_index=i % 3, gold=gold, model=model)
        for i, (gold, model) in enumerate(pairs)
    ]
    return LabelSeries(rule_id, records)


def test_last_quarter_count_is_ceiling():
    assert last_quarter_count(75) == 19
    assert last_quarter_count(74) == 19
    assert last_quarter_count(76) == 19
    assert last_quarter_count(80) == 20
    assert last_quarter_count(1) == 1


def test_all_correct_is_one_in_both_windows():
    series = series_of([(True, True)] * 75)
    assert accuracy(series, "overall") == 1.0
    assert accuracy(series, "last_quarter") == 1.0


def test_windowing_then_exclusion():
    # 8 objects -> last quarter = final 2; one of them excluded.
    pairs = [(True, True)] * 6 + [(True, None), (True, False)]
    series = series_of(pairs)
    assert accuracy(series, "last_quarter") == 0.0  # only the final object counts
    assert accuracy(series, "overall") == 6 / 7


def test_all_excluded_errors():
    series = series_of([(True, None)] * 4)
    with pytest.raises(EmptyWindowError):
        accuracy(series, "overall")


def test_window_name_checked():
    with pytest.raises(ValueError):
        accuracy(series_of([(True, True)]), "first_half")


def pearson_oracle(xs, ys):
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    xd, yd = xs - xs.mean(), ys - ys.mean()
    return float((xd * yd).sum() / math.sqrt((xd * xd).sum() * (yd * yd).sum()))


def test_r_squared_identity_vector():
    human = [0.1, 0.4, 0.9]
    assert r_squared(human, human) == pytest.approx(1.0)


def test_r_squared_anticorrelation():
    human = [0.1, 0.4, 0.9]
    model = [1 - h for h in human]
    assert r_squared(model, human) == pytest.approx(1.0)
    assert pearson_r(model, human) == pytest.approx(-1.0)


def test_r_squared_worked_example():
    # Oracle-derived: covariance 0.28, variances 0.32 and 0.26, so
    # r^2 = 0.28^2 / (0.32 * 0.26) = 49/52.
    model = [0.1, 0.5, 0.9]
    human = [0.2, 0.4, 0.9]
    r = pearson_oracle(model, human)
    assert r_squared(model, human) == pytest.approx(r * r, abs=1e-12)
    assert r_squared(model, human) == pytest.approx(49 / 52, abs=1e-9)


def test_r_squared_matches_oracle_on_random_vectors():
    rng = random.Random(0)
    for _ in range(100):
        n = rng.randint(3, 40)
        model = [rng.random() for _ in range(n)]
        human = [rng.random() for _ in range(n)]
        expected = pearson_oracle(model, human) ** 2
        assert r_squared(model, human) == pytest.approx(expected, abs=1e-9)


def test_missing_human_values_dropped():
    model = [0.1, 0.5, 0.9, 0.7]
    human = [0.2, None, 0.8, 0.6]
    expected = pearson_oracle([0.1, 0.9, 0.7], [0.2, 0.8, 0.6]) ** 2
    assert r_squared(model, human) == pytest.approx(expected, abs=1e-12)


def test_zero_variance_errors():
    with pytest.raises(ZeroVarianceError):
        r_squared([0.5, 0.5, 0.5], [0.1, 0.2, 0.3])
    with pytest.raises(ZeroVarianceError):
        r_squared([0.1, 0.2, 0.3], [0.5, 0.5, 0.5])


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(0, 1), min_size=3, max_size=20),
    st.floats(0.01, 5.0),
    st.floats(-1.0, 1.0),
)
def test_pearson_affine_invariance(human, slope, intercept):
    model = [0.1 * i for i in range(len(human))]  # strictly increasing
    try:
        base = r_squared(model, human)
    except ZeroVarianceError:
        return
    scaled = [slope * m + intercept for m in model]
    assert r_squared(scaled, human) == pytest.approx(base, abs=1e-9)


def test_chance_baseline_values():
    assert chance_baseline(0.5) == 0.5
    assert chance_baseline(0.8) == 0.68
    assert chance_baseline(1.0) == 1.0
    assert chance_baseline(0.0) == 1.0


@settings(max_examples=200)
@given(st.floats(0, 1))
def test_chance_baseline_symmetry_and_minimum(p):
    assert chance_baseline(p) == pytest.approx(chance_baseline(1 - p), abs=1e-12)
    assert chance_baseline(p) >= 0.5 - 1e-12


def test_cross_entropy_exact_match_degenerate():
    assert cross_entropy(1.0, 1.0) == 0.0
    assert cross_entropy(0.0, 0.0) == 0.0


def test_cross_entropy_fair_coin():
    assert cross_entropy(0.5, 0.5) == pytest.approx(math.log(2), abs=1e-12)
    assert cross_entropy(1.0, 0.5) == pytest.approx(math.log(2), abs=1e-12)


def test_cross_entropy_infinite_when_unsupported():
    assert cross_entropy(1.0, 0.0) == float("inf")
    assert cross_entropy(0.5, 1.0) == float("inf")


@settings(max_examples=200)
@given(st.floats(0, 1), st.floats(0.01, 0.99))
def test_cross_entropy_gibbs_inequality(p, q):
    assert cross_entropy(p, q) >= cross_entropy(p, p) - 1e-12


def test_cross_entropy_series_sums():
    pairs = [(1.0, 0.5), (0.5, 0.5)]
    assert cross_entropy_series(pairs) == pytest.approx(2 * math.log(2), abs=1e-12)


def test_overall_accuracy_is_weighted_per_set_combination():
    rng = random.Random(6)
    records = []
    for set_index in range(8):
        for object_index in range(rng.randint(1, 5)):
            gold = rng.random() < 0.5
            model = gold if rng.random() < 0.7 else (None if rng.random() < 0.3 else not gold)
            records.append(ObjectRecord(set_index, object_index, gold, model))
    series = LabelSeries("r", records)

    weighted = 0.0
    attempted_total = 0
    for set_index in range(8):
        in_set = [r for r in records if r.set_index == set_index and r.model is not None]
        if not in_set:
            continue
        set_accuracy = sum(r.model == r.gold for r in in_set) / len(in_set)
        weighted += set_accuracy * len(in_set)
        attempted_total += len(in_set)
    assert accuracy(series, "overall") == pytest.approx(weighted / attempted_total, abs=1e-12)
