"""Command line front-end: baseline, fi, report, train-monitor.

All artifacts land strictly under the scenario output directory. Every
failure path prints exactly one ``error: <Code>`` line on stderr and exits
nonzero; outputs are byte-identical across runs with the same seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as config_mod
from .control import (
    classify_regions,
    extract_features,
    synthetic_region_sample,
    train_softmax,
    write_labels_csv,
    write_proposals_csv,
)
from .errors import MissingArtifactsError, SimError
from .foraging import run_season, write_season_csv, write_totals
from .landscape import derive_patches, load_map, tile_regions, with_artificial, write_foodflow
from .metrics import compare, write_comparison_csv
from .monitor import (
    MonitorSample,
    day_features,
    fit,
    r_squared,
    save_model,
    split_samples,
)
from .rng import derive_seed
from .scouting import run_scouting, write_coverage_csv, write_trajectories_csv
from .supervisor import run_fi_loop, write_fi_plan_csv, write_loop_trace_csv
from .weather import foraging_hours

SOFTMAX_TRAIN_SIZE = 600
TEST_FRACTION = 0.2


def default_config_path() -> Path:
    return Path(__file__).parent / "data" / "desk.conf"


def _build_classifier(scenario):
    if scenario.classifier_kind == "threshold":
        return scenario.thresholds
    sample = synthetic_region_sample(
        SOFTMAX_TRAIN_SIZE, derive_seed(scenario.seed, "classifier"), scenario.thresholds
    )
    return train_softmax(sample, derive_seed(scenario.seed, "classifier"))


def _dump_first_refresh_paths(scenario, grid, patches, weather, out: Path) -> None:
    """Re-run the season's first active scouting refresh, capturing paths."""
    start, end = scenario.colony.season
    hours = 0.0
    for day in range(start, end + 1, scenario.settings.scout_cadence_days):
        hours = foraging_hours(weather.day(day), None, scenario.settings.base_cap_h)
        if hours > 0:
            break
    report = run_scouting(
        grid, patches, scenario.scout, hours,
        derive_seed(scenario.seed, "scout"), collect_trajectories=True,
    )
    write_trajectories_csv(out / "paths.csv", report)


def cmd_baseline(scenario, dump_paths: bool = False) -> int:
    grid = load_map(scenario.map_path)
    patches = derive_patches(grid, scenario.patch_params)
    weather = config_mod.weather_for(scenario)
    season = run_season(
        grid, patches, weather, None, scenario.colony,
        scenario.settings.scout_cadence_days, scenario.scout, scenario.seed,
        scenario.settings.base_cap_h,
    )
    out = scenario.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_season_csv(out / "season.csv", season)
    write_totals(out / "totals.json", season.totals)
    write_foodflow(out / "foodflow.csv", patches)
    write_coverage_csv(out / "coverage.csv", season.scout_report)
    if dump_paths:
        _dump_first_refresh_paths(scenario, grid, patches, weather, out)
    return 0


def cmd_fi(scenario, dump_paths: bool = False) -> int:
    grid = load_map(scenario.map_path)
    weather = config_mod.weather_for(scenario)
    classifier = _build_classifier(scenario)
    plan, trace, baseline, final = run_fi_loop(
        grid, weather, scenario.colony, scenario.scout, classifier,
        scenario.user_cfg, scenario.seed, scenario.settings,
    )
    final_grid = with_artificial(grid, [p.cell for p in plan.placed_patches])
    final_patches = derive_patches(final_grid, scenario.patch_params)

    out = scenario.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_season_csv(out / "season_baseline.csv", baseline)
    write_totals(out / "totals_baseline.json", baseline.totals)
    write_coverage_csv(out / "coverage_baseline.csv", baseline.scout_report)
    write_season_csv(out / "season_fi.csv", final)
    write_totals(out / "totals_fi.json", final.totals)
    write_coverage_csv(out / "coverage_fi.csv", final.scout_report)
    write_foodflow(out / "foodflow_fi.csv", final_patches)
    write_fi_plan_csv(out / "fi_plan.csv", plan)
    write_proposals_csv(out / "placed_patches.csv", list(plan.placed_patches))
    write_loop_trace_csv(out / "loop_trace.csv", trace)
    write_comparison_csv(
        out / "comparison.csv",
        compare(baseline, final, scenario.user_cfg.w1, scenario.user_cfg.w2),
    )
    tiling = tile_regions(
        final_grid, scenario.settings.region_rows, scenario.settings.region_cols
    )
    feats = extract_features(final.scout_report.coverage, tiling, final_grid)
    labels = classify_regions(classifier, feats)
    write_labels_csv(
        out / "region_labels.csv", [(f, labels[f.region_id]) for f in feats]
    )
    if dump_paths:
        patches = derive_patches(grid, scenario.patch_params)
        _dump_first_refresh_paths(scenario, grid, patches, weather, out)
    return 0


def cmd_report(run_dir: Path) -> int:
    """Melt both season exports into plot-ready long format."""
    metrics = [
        "foraging_h", "trips", "trips_per_sun_h", "total_visits",
        "detected_patches", "covered_area_frac",
    ]
    sources = {"baseline": run_dir / "season_baseline.csv", "fi": run_dir / "season_fi.csv"}
    for p in sources.values():
        if not p.is_file():
            raise MissingArtifactsError(f"missing season export: {p}")
    rows = []
    for scenario_name, path in sources.items():
        lines = path.read_text(encoding="utf-8").splitlines()
        header = lines[0].split(",")
        for line in lines[1:]:
            record = dict(zip(header, line.split(",")))
            for m in metrics:
                rows.append((m, scenario_name, record["day"], record[m]))
    rows.sort(key=lambda r: (r[0], r[1], int(r[2])))
    with open(run_dir / "report.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("metric,scenario,day,value\n")
        for m, s, d, v in rows:
            fh.write(f"{m},{s},{d},{v}\n")
    return 0


def cmd_train_monitor(scenario, season_csv: Path | None) -> int:
    """Fit the monitoring model from a season export and print it."""
    path = season_csv if season_csv is not None else scenario.out_dir / "season.csv"
    if not path.is_file():
        raise MissingArtifactsError(f"missing season export: {path}")
    weather = config_mod.weather_for(scenario)
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    samples = []
    for line in lines[1:]:
        record = dict(zip(header, line.split(",")))
        day = int(record["day"])
        samples.append(
            MonitorSample(
                day_features(weather.day(day), None, scenario.settings.base_cap_h),
                float(record["total_visits"]),
            )
        )
    train, test = split_samples(samples, TEST_FRACTION, scenario.seed)
    model = fit(train)
    out = scenario.out_dir
    out.mkdir(parents=True, exist_ok=True)
    save_model(out / "monitor.txt", model)
    sys.stdout.write((out / "monitor.txt").read_text(encoding="utf-8"))
    sys.stdout.write(f"r_squared_test: {r_squared(model, test)!r}\n")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beeloop",
        description="Bee foraging simulator with a patch-placement feedback loop",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("baseline", "fi", "train-monitor"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=default_config_path())
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", type=Path, default=None, help="override output directory")
        if name in ("baseline", "fi"):
            p.add_argument("--dump-paths", action="store_true")
        if name == "train-monitor":
            p.add_argument("--season", type=Path, default=None, help="season.csv to fit on")
    p = sub.add_parser("report")
    p.add_argument("run_dir", type=Path, help="directory holding fi command outputs")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "report":
            return cmd_report(args.run_dir)
        scenario = config_mod.load_scenario(args.config, args.seed, args.out)
        if args.command == "baseline":
            return cmd_baseline(scenario, args.dump_paths)
        if args.command == "fi":
            return cmd_fi(scenario, args.dump_paths)
        if args.command == "train-monitor":
            return cmd_train_monitor(scenario, args.season)
        raise AssertionError(f"unhandled command {args.command}")
    except SimError as err:
        print(f"error: {err.code}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
