"""The feedback loop: observe coverage, place patches, tune the environment.

One loop pass: run the unassisted baseline season, fit the monitoring model
on its days, pick an environmental control by grid search over predicted
seasonal visits, then iterate: classify regions, compute the coverage loss
against the required labels, propose up to three waypoint patches for the
worst Low regions, re-run the season, and keep the change only if the loss
strictly fell. An iteration that fails to improve is rolled back and the
loop stops, so accepted-loss monotonicity and final-never-worse-than-baseline
hold exactly rather than on average.

All seasons in one loop share the run seed, so a candidate differs from the
incumbent only through the patches and controls it adds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .control import (
    Classifier,
    CoverageLabel,
    PatchProposal,
    PlacementPolicy,
    classify_regions,
    extract_features,
    propose_patches,
)
from .errors import RegionSetMismatchError
from .foraging import ColonyParams, SeasonRecord, run_season
from .landscape import (
    CROP,
    CellGrid,
    PatchParams,
    RegionTiling,
    derive_patches,
    tile_regions,
    with_artificial,
)
from .monitor import LinearModel, MonitorSample, day_features, fit, predict
from .scouting import ScoutParams
from .weather import EnvControl, WeatherSeries

PATCHES_PER_ITERATION = 3


@dataclass(frozen=True)
class UserConfig:
    required_label: CoverageLabel = CoverageLabel.NORMAL
    max_artificial_patches: int = 30
    max_iterations: int = 10
    loss_tolerance: float = 0.0
    w1: float = 0.5
    w2: float = 0.5

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0 or abs(self.w1 + self.w2 - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.max_artificial_patches < 0:
            raise ValueError("max_artificial_patches must be >= 0")
        if self.loss_tolerance < 0:
            raise ValueError("loss_tolerance must be >= 0")


@dataclass(frozen=True)
class ControlBounds:
    max_temp_uplift: float = 3.0
    max_extra_light_h: float = 5.0
    min_temp_uplift: float = 0.0
    min_extra_light_h: float = 0.0


@dataclass(frozen=True)
class LoopSettings:
    """Everything the loop needs beyond the user-facing knobs."""

    patch_params: PatchParams = PatchParams()
    scout_cadence_days: int = 7
    base_cap_h: float = 9.0
    fi_cap_h: float = 16.0
    region_rows: int = 8
    region_cols: int = 8
    placement: PlacementPolicy = PlacementPolicy()
    bounds: ControlBounds = ControlBounds()
    control_grid_steps: int = 7
    refit_monitor_each_iteration: bool = False


@dataclass(frozen=True)
class LoopStep:
    iteration: int
    loss: float
    covered_area_fraction: float
    detected_fraction: float
    total_visits: int


@dataclass(frozen=True)
class LoopTrace:
    steps: tuple[LoopStep, ...]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class FiPlan:
    placed_patches: tuple[PatchProposal, ...]
    env_control: EnvControl
    iterations_used: int
    final_loss: float


def coverage_loss(
    labels: dict[int, CoverageLabel], required: dict[int, CoverageLabel]
) -> float:
    """Total shortfall in label ranks; over-coverage is free."""
    if set(labels) != set(required):
        raise RegionSetMismatchError(
            f"label regions {sorted(labels)} differ from required {sorted(required)}"
        )
    return float(
        sum(max(0, int(required[r]) - int(labels[r])) for r in labels)
    )


def required_labels(
    grid: CellGrid, tiling: RegionTiling, label: CoverageLabel, regions: list[int]
) -> dict[int, CoverageLabel]:
    """Require ``label`` in regions holding crop; others only need Low."""
    crop = grid.cells == CROP
    out = {}
    for region in regions:
        has_crop = bool(crop[tiling.region_of_cell == region].any())
        out[region] = label if has_crop else CoverageLabel.LOW
    return out


def optimize_env_control(
    model: LinearModel,
    weather: WeatherSeries,
    window: tuple[int, int],
    bounds: ControlBounds,
    grid_steps: int,
    cap: float,
) -> EnvControl:
    """Grid search maximizing predicted seasonal visits.

    Ties break toward smaller controls, lexicographically on uplift then
    extra light, so a flat objective returns (0, 0).
    """
    if grid_steps < 1:
        raise ValueError("grid_steps must be >= 1")

    def axis(lo: float, hi: float) -> list[float]:
        if grid_steps == 1 or hi == lo:
            return [lo]
        return [lo + (hi - lo) * i / (grid_steps - 1) for i in range(grid_steps)]

    days = [weather.day(d) for d in range(window[0], window[1] + 1)]
    best = None
    best_score = None
    for uplift in axis(bounds.min_temp_uplift, bounds.max_temp_uplift):
        for extra in axis(bounds.min_extra_light_h, bounds.max_extra_light_h):
            ctrl = EnvControl(uplift, extra, window)
            score = sum(predict(model, day_features(dw, ctrl, cap)) for dw in days)
            if best_score is None or score > best_score:
                best, best_score = ctrl, score
    return best


def _effective(ctrl: EnvControl) -> EnvControl | None:
    """A zero-magnitude control is no control at all (baseline hour cap)."""
    if ctrl.temp_uplift == 0.0 and ctrl.extra_light_hours == 0.0:
        return None
    return ctrl


def run_fi_loop(
    grid: CellGrid,
    weather: WeatherSeries,
    colony: ColonyParams,
    scout_params: ScoutParams,
    classifier: Classifier,
    cfg: UserConfig,
    seed: int,
    settings: LoopSettings = LoopSettings(),
) -> tuple[FiPlan, LoopTrace, SeasonRecord, SeasonRecord]:
    """Run the full loop; returns (plan, trace, baseline season, final season)."""
    window = colony.season
    tiling = tile_regions(grid, settings.region_rows, settings.region_cols)
    patches = derive_patches(grid, settings.patch_params)

    baseline = run_season(
        grid, patches, weather, None, colony, settings.scout_cadence_days,
        scout_params, seed, settings.base_cap_h,
    )

    feats = extract_features(baseline.scout_report.coverage, tiling, grid)
    required = required_labels(
        grid, tiling, cfg.required_label, [f.region_id for f in feats]
    )
    labels = classify_regions(classifier, feats)
    best_loss = coverage_loss(labels, required)

    samples = [
        MonitorSample(
            day_features(weather.day(d.day), None, settings.base_cap_h),
            float(sum(d.visits_per_patch.values())),
        )
        for d in baseline.days
    ]
    model = fit(samples)
    ctrl = optimize_env_control(
        model, weather, window, settings.bounds, settings.control_grid_steps,
        settings.fi_cap_h,
    )
    ctrl = replace(ctrl, active_window=window)
    ctrl_eff = _effective(ctrl)

    mean_crop_nectar = (
        sum(p.nectar_quantity for p in patches if not p.artificial)
        / max(1, sum(1 for p in patches if not p.artificial))
    )
    policy = replace(
        settings.placement,
        artificial_detect=settings.patch_params.artificial_detect,
        artificial_nectar_l=settings.patch_params.artificial_nectar_fraction
        * mean_crop_nectar,
    )

    grid_cur = grid
    season_cur = baseline
    placed: list[PatchProposal] = []
    steps: list[LoopStep] = []
    accepted_ctrl: EnvControl | None = None

    for _ in range(cfg.max_iterations):
        if best_loss <= cfg.loss_tolerance:
            break
        if settings.refit_monitor_each_iteration and season_cur is not baseline:
            cap_cur = settings.base_cap_h if accepted_ctrl is None else settings.fi_cap_h
            model = fit(
                [
                    MonitorSample(
                        day_features(weather.day(d.day), accepted_ctrl, cap_cur),
                        float(sum(d.visits_per_patch.values())),
                    )
                    for d in season_cur.days
                ]
            )
            ctrl = optimize_env_control(
                model, weather, window, settings.bounds,
                settings.control_grid_steps, settings.fi_cap_h,
            )
            ctrl_eff = _effective(replace(ctrl, active_window=window))
        remaining = cfg.max_artificial_patches - len(placed)
        labeled = [(f, labels[f.region_id]) for f in feats]
        proposals = propose_patches(
            labeled, tiling, grid_cur, min(PATCHES_PER_ITERATION, remaining), policy
        )
        ctrl_is_new = accepted_ctrl is None and ctrl_eff is not None
        if not proposals and not ctrl_is_new:
            break

        cand_grid = with_artificial(grid_cur, [p.cell for p in proposals])
        cand_patches = derive_patches(cand_grid, settings.patch_params)
        cap = settings.base_cap_h if ctrl_eff is None else settings.fi_cap_h
        cand_season = run_season(
            cand_grid, cand_patches, weather, ctrl_eff, colony,
            settings.scout_cadence_days, scout_params, seed, cap,
        )
        cand_feats = extract_features(cand_season.scout_report.coverage, tiling, cand_grid)
        cand_labels = classify_regions(classifier, cand_feats)
        cand_loss = coverage_loss(cand_labels, required)

        if cand_loss >= best_loss:
            break  # roll back this iteration's patches and stop
        grid_cur = cand_grid
        season_cur = cand_season
        feats, labels = cand_feats, cand_labels
        best_loss = cand_loss
        placed.extend(proposals)
        accepted_ctrl = ctrl_eff
        steps.append(
            LoopStep(
                iteration=len(steps) + 1,
                loss=cand_loss,
                covered_area_fraction=cand_season.totals.covered_area_fraction,
                detected_fraction=cand_season.totals.detected_fraction,
                total_visits=cand_season.totals.total_visits,
            )
        )

    plan = FiPlan(
        placed_patches=tuple(placed),
        env_control=accepted_ctrl if accepted_ctrl is not None else EnvControl(0.0, 0.0, window),
        iterations_used=len(steps),
        final_loss=best_loss,
    )
    return plan, LoopTrace(tuple(steps)), baseline, season_cur


def write_fi_plan_csv(path, plan: FiPlan) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            "item,cell_x,cell_y,region_id,detect_prob,nectar_l,"
            "temp_uplift_c,extra_light_h,window_start,window_end,"
            "iterations_used,final_loss\n"
        )
        for p in plan.placed_patches:
            fh.write(
                f"patch,{p.cell[0]},{p.cell[1]},{p.region_id},"
                f"{p.detection_probability!r},{p.nectar_quantity!r},,,,,,\n"
            )
        c = plan.env_control
        fh.write(
            f"control,,,,,,{c.temp_uplift!r},{c.extra_light_hours!r},"
            f"{c.active_window[0]},{c.active_window[1]},,\n"
        )
        fh.write(f"summary,,,,,,,,,,{plan.iterations_used},{plan.final_loss!r}\n")


def write_loop_trace_csv(path, trace: LoopTrace) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("iteration,loss,covered_area_frac,detected_frac,total_visits\n")
        for s in trace.steps:
            fh.write(
                f"{s.iteration},{s.loss!r},{s.covered_area_fraction!r},"
                f"{s.detected_fraction!r},{s.total_visits}\n"
            )
