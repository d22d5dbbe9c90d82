import math

import pytest

from beeloop.control import CoverageLabel, ThresholdClassifier
from beeloop.errors import RegionSetMismatchError
from beeloop.foraging import ColonyParams
from beeloop.landscape import tile_regions
from beeloop.monitor import LinearModel
from beeloop.scouting import ScoutParams
from beeloop.supervisor import (
    ControlBounds,
    LoopSettings,
    UserConfig,
    coverage_loss,
    optimize_env_control,
    required_labels,
    run_fi_loop,
)
from beeloop.weather import synth_weather

LOW, NORMAL, HIGH = CoverageLabel.LOW, CoverageLabel.NORMAL, CoverageLabel.HIGH

FAST_SCOUTS = ScoutParams(n_scouts=40)
FAST_COLONY = ColonyParams(season=(120, 180))
FAST_SETTINGS = LoopSettings(region_rows=4, region_cols=4, scout_cadence_days=10)


def test_coverage_loss_zero_when_satisfied():
    labels = {0: NORMAL, 1: HIGH}
    required = {0: NORMAL, 1: NORMAL}
    assert coverage_loss(labels, required) == 0.0


def test_coverage_loss_rank_shortfall():
    assert coverage_loss({0: LOW}, {0: HIGH}) == 2.0
    assert coverage_loss({0: LOW, 1: LOW}, {0: NORMAL, 1: HIGH}) == 3.0


def test_coverage_loss_over_coverage_free():
    assert coverage_loss({0: HIGH}, {0: LOW}) == 0.0


def test_coverage_loss_region_mismatch():
    with pytest.raises(RegionSetMismatchError):
        coverage_loss({0: LOW}, {0: LOW, 1: LOW})


def test_required_labels_only_for_crop_regions(desk_grid):
    tiling = tile_regions(desk_grid, 8, 8)
    regions = list(range(64))
    required = required_labels(desk_grid, tiling, NORMAL, regions)
    assert set(required) == set(regions)
    assert all(label in (NORMAL, LOW) for label in required.values())
    assert sum(1 for v in required.values() if v is NORMAL) > 50


def zero_model():
    return LinearModel((0.0, 0.0, 0.0, 0.0), 10.0, 0.0)


def test_optimize_zero_model_picks_smallest_controls():
    ctrl = optimize_env_control(
        zero_model(), synth_weather(1), (120, 180), ControlBounds(3.0, 5.0), 7, 16.0
    )
    assert (ctrl.temp_uplift, ctrl.extra_light_hours) == (0.0, 0.0)


def test_optimize_light_coefficient_maxes_light_only():
    model = LinearModel((0.0, 5.0, 0.0, 0.0), 0.0, 0.0)
    ctrl = optimize_env_control(
        model, synth_weather(1), (120, 180), ControlBounds(3.0, 5.0), 7, 16.0
    )
    assert ctrl.temp_uplift == 0.0
    assert ctrl.extra_light_hours == 5.0


def test_optimize_collapsed_bounds_returns_point():
    bounds = ControlBounds(
        max_temp_uplift=2.0, max_extra_light_h=3.0,
        min_temp_uplift=2.0, min_extra_light_h=3.0,
    )
    ctrl = optimize_env_control(
        zero_model(), synth_weather(1), (120, 180), bounds, 5, 16.0
    )
    assert (ctrl.temp_uplift, ctrl.extra_light_hours) == (2.0, 3.0)


def test_loop_stops_immediately_when_tolerance_met(desk_grid):
    cfg = UserConfig(loss_tolerance=math.inf)
    plan, trace, baseline, final = run_fi_loop(
        desk_grid, synth_weather(8), FAST_COLONY, FAST_SCOUTS,
        ThresholdClassifier(), cfg, seed=3, settings=FAST_SETTINGS,
    )
    assert plan.iterations_used == 0
    assert plan.placed_patches == ()
    assert len(trace) == 0
    assert final is baseline


def test_loop_noop_without_budget_or_headroom(desk_grid):
    cfg = UserConfig(max_artificial_patches=0)
    settings = LoopSettings(
        region_rows=4, region_cols=4, scout_cadence_days=10,
        bounds=ControlBounds(max_temp_uplift=0.0, max_extra_light_h=0.0),
    )
    plan, trace, baseline, final = run_fi_loop(
        desk_grid, synth_weather(8), FAST_COLONY, FAST_SCOUTS,
        ThresholdClassifier(), cfg, seed=3, settings=settings,
    )
    assert plan.iterations_used == 0
    assert plan.placed_patches == ()
    assert plan.env_control.temp_uplift == 0.0
    assert final is baseline


def test_loop_invariants_on_desk(desk_grid):
    cfg = UserConfig(max_artificial_patches=9, max_iterations=4)
    plan, trace, baseline, final = run_fi_loop(
        desk_grid, synth_weather(8), FAST_COLONY, FAST_SCOUTS,
        ThresholdClassifier(), cfg, seed=7, settings=FAST_SETTINGS,
    )
    assert len(plan.placed_patches) <= 9
    assert plan.iterations_used == len(trace)
    losses = [s.loss for s in trace.steps]
    assert losses == sorted(losses, reverse=True)
    assert len(set(losses)) == len(losses)  # strict decrease
    assert final.totals.total_visits >= baseline.totals.total_visits
    assert plan.final_loss == (losses[-1] if losses else plan.final_loss)


def test_loop_reproducible(desk_grid):
    cfg = UserConfig(max_artificial_patches=6, max_iterations=3)
    args = (
        desk_grid, synth_weather(8), FAST_COLONY, FAST_SCOUTS,
        ThresholdClassifier(), cfg,
    )
    plan_a, trace_a, base_a, final_a = run_fi_loop(*args, seed=11, settings=FAST_SETTINGS)
    plan_b, trace_b, base_b, final_b = run_fi_loop(*args, seed=11, settings=FAST_SETTINGS)
    assert plan_a == plan_b
    assert trace_a == trace_b
    assert base_a.totals == base_b.totals
    assert final_a.totals == final_b.totals


def test_loop_with_iterative_refit(desk_grid):
    import dataclasses

    cfg = UserConfig(max_artificial_patches=6, max_iterations=3)
    settings = dataclasses.replace(FAST_SETTINGS, refit_monitor_each_iteration=True)
    args = (
        desk_grid, synth_weather(8), FAST_COLONY, FAST_SCOUTS,
        ThresholdClassifier(), cfg,
    )
    plan_a, trace_a, base_a, final_a = run_fi_loop(*args, seed=13, settings=settings)
    plan_b, trace_b, base_b, final_b = run_fi_loop(*args, seed=13, settings=settings)
    assert plan_a == plan_b and trace_a == trace_b
    losses = [s.loss for s in trace_a.steps]
    assert losses == sorted(losses, reverse=True)
    assert final_a.totals.total_visits >= base_a.totals.total_visits


def test_user_config_validation():
    with pytest.raises(ValueError):
        UserConfig(w1=0.7, w2=0.7)
    with pytest.raises(ValueError):
        UserConfig(max_iterations=0)
    with pytest.raises(ValueError):
        UserConfig(max_artificial_patches=-1)
