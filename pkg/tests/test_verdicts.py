"""Trajectory classification and verdict plumbing."""

import math

import pytest
from hypothesis import given, strategies as st

from wcalc import (
    DOWN,
    FAILS,
    FLAT,
    FROZEN,
    HOLDS,
    UP,
    Verdict,
    classify_trajectory,
    decimate,
    fit_line,
    running_sup_stabilized,
)


def test_verdict_props_and_json():
    v = Verdict("demo", HOLDS, 64, witness=None, evidence={"x": 1})
    assert v.holds and not v.fails
    d = v.to_json()
    assert d == {"subject": "demo", "status": "Holds", "horizon": 64,
                 "witness": None, "evidence": {"x": 1}}
    assert Verdict("demo", FAILS, 64).fails


def test_decimate_keeps_ends():
    short = [1.0, 2.0, 3.0]
    assert decimate(short) == short
    long = list(range(100))
    thin = decimate(long)
    assert len(thin) == 16
    assert thin[0] == 0 and thin[-1] == 99
    assert thin == sorted(thin)


def test_fit_line_recovers_exact_line():
    xs = [1.0, 2.0, 3.0, 4.0]
    ys = [2.0 * x - 1.0 for x in xs]
    slope, intercept = fit_line(xs, ys)
    assert slope == pytest.approx(2.0, abs=1e-12)
    assert intercept == pytest.approx(-1.0, abs=1e-12)
    # degenerate abscissae fall back to the mean
    assert fit_line([5.0, 5.0], [1.0, 3.0]) == (0.0, 2.0)
    assert fit_line([], []) == (0.0, 0.0)


def classify(vals, cfg, idx=None):
    idx = idx or list(range(1, len(vals) + 1))
    return classify_trajectory(idx, vals, cfg)


def test_classify_frozen_peak_then_decay(cfg):
    vals = [0.0, 5.0, 3.0, 2.0, 1.5, 1.2, 1.1, 1.05, 1.02, 1.0]
    r = classify(vals, cfg)
    assert r.trend == FROZEN
    assert r.stabilized
    assert r.sup == 5.0 and r.sup_index == 1


def test_classify_constant_is_frozen(cfg):
    r = classify([2.5] * 16, cfg)
    assert r.trend == FROZEN
    assert r.sup == 2.5


def test_classify_log_growth_is_up(cfg):
    vals = [math.log(j) for j in range(1, 65)]
    r = classify(vals, cfg)
    assert r.trend == UP
    assert not r.stabilized
    assert r.slope == pytest.approx(1.0, abs=0.05)


def test_classify_pure_decay_is_frozen(cfg):
    # sup sits at the first sample, so the freeze rule wins over the slope
    vals = [-math.log(j) for j in range(1, 65)]
    r = classify(vals, cfg)
    assert r.trend == FROZEN
    assert r.stabilized


def test_classify_late_spike_with_sinking_fit_is_down(cfg):
    # sup inside the last quarter blocks the freeze; the fit decides
    vals = [-float(i) for i in range(64)]
    vals[60] = 1.0
    r = classify(vals, cfg)
    assert r.trend == DOWN
    assert r.stabilized


def test_classify_late_sup_with_flat_slope(cfg):
    vals = [0.0] * 15 + [1e-9]
    r = classify(vals, cfg)
    assert r.trend == FLAT
    assert r.stabilized


def test_classify_short_window_rules(cfg):
    # under 8 points only a head-certified sup avoids the growth call
    assert classify([1.0, 1.0, 1.0], cfg).trend == FLAT
    assert classify([1.0, 1.0, 1.1], cfg).trend == UP
    assert classify([3.0, 2.0, 1.0], cfg).trend == FLAT


def test_classify_input_validation(cfg):
    with pytest.raises(ValueError):
        classify_trajectory([], [], cfg)
    with pytest.raises(ValueError):
        classify_trajectory([1, 2], [1.0], cfg)


@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=8, max_size=64))
def test_classify_sup_is_max(cfg, vals):
    r = classify(vals, cfg)
    assert r.sup == max(vals)
    assert vals[r.sup_index] == r.sup
    assert r.trend in (FROZEN, FLAT, UP, DOWN)


def test_running_sup_plateau_stabilizes(cfg):
    vals = [min(float(j), 10.0) for j in range(1, 65)]
    stable, sup = running_sup_stabilized(vals, cfg)
    assert stable and sup == 10.0


def test_running_sup_steady_climb_does_not(cfg):
    vals = [math.log(j) for j in range(1, 65)]
    stable, sup = running_sup_stabilized(vals, cfg)
    assert not stable
    assert sup == pytest.approx(math.log(64))


def test_running_sup_scale_awareness(cfg):
    # a 1000-unit climb that settles to sub-relative drift still counts
    vals = [1000.0 * (1.0 - 2.0 ** -j) for j in range(1, 65)]
    stable, sup = running_sup_stabilized(vals, cfg)
    assert stable


@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=50))
def test_running_sup_returns_max(cfg, vals):
    _, sup = running_sup_stabilized(vals, cfg)
    assert sup == max(vals)
