"""Seasonal daily foraging over the detected patch set.

Colony demography is frozen: the forager count never changes. Each day the
colony completes round(active_foragers * trips_per_forager_hour * hours)
trips; every trip visits ``patches_per_trip`` patches drawn from a weighted
multinomial over the patches the colony currently knows about. The weight of
a patch is nectar / (1 + distance / reference_distance), a single-knob
quality-versus-distance tradeoff.

Scouting knowledge refreshes every ``scout_cadence_days`` days and is
cumulative: once a patch is known it stays known for the season. A season is
deterministic given its seed; the scouting walk within a season is one
behavioral draw (a fixed sub-seed), so longer foraging hours extend the same
walk rather than re-rolling it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .landscape import CellGrid, Patch
from .rng import derive_seed, generator
from .scouting import (
    ScoutParams,
    ScoutReport,
    empty_report,
    merge_reports,
    simulate_at_checkpoints,
)
from .weather import DayWeather, EnvControl, WeatherSeries, foraging_hours

TRIPS_PER_SUN_HOUR_EPS = 1e-6
DEFAULT_REFERENCE_DISTANCE_M = 1000.0


@dataclass(frozen=True)
class ColonyParams:
    initial_workers: int = 10000
    trips_per_forager_hour: float = 0.1
    patches_per_trip: int = 1
    forager_fraction: float = 0.25
    season: tuple[int, int] = (91, 243)  # April through August
    reference_distance_m: float = DEFAULT_REFERENCE_DISTANCE_M

    def __post_init__(self):
        if self.initial_workers < 0 or self.trips_per_forager_hour < 0:
            raise ValueError("colony sizes and rates must be non-negative")
        if self.patches_per_trip < 0:
            raise ValueError("patches_per_trip must be non-negative")
        if not (0.0 <= self.forager_fraction <= 1.0):
            raise ValueError("forager_fraction must be in [0, 1]")
        if self.season[0] > self.season[1] + 1:
            raise ValueError("season start must not exceed end + 1")


@dataclass(frozen=True)
class DayRecord:
    day: int
    foraging_period: float  # hours
    visits_per_patch: dict[int, int]
    completed_trips: int
    trips_per_sunshine_hour: float
    active_foragers: int


@dataclass(frozen=True)
class SeasonTotals:
    total_visits: int
    total_trips: int
    mean_foraging_period: float
    mean_trips_per_sunshine_hour: float
    detected_patch_count: int  # non-artificial patches found
    natural_patch_count: int
    detected_fraction: float  # over non-artificial patches
    covered_area_fraction: float
    natural_patch_ids: tuple[int, ...]
    detected_patch_ids: tuple[int, ...]  # all found, including artificial


@dataclass(frozen=True)
class SeasonRecord:
    days: list[DayRecord]
    totals: SeasonTotals
    scout_report: ScoutReport  # merged over the season's refreshes
    coverage_by_day: dict[int, tuple[int, float]]  # day -> (found patches, covered fraction)


def simulate_day(
    patches: list[Patch],
    dw: DayWeather,
    ctrl: EnvControl | None,
    colony: ColonyParams,
    seed: int,
    day: int,
    cap_hours: float = 9.0,
) -> DayRecord:
    """One day of foraging over the currently known patches."""
    period = foraging_hours(dw, ctrl, cap_hours)
    active = int(round(colony.forager_fraction * colony.initial_workers))
    if not patches or period == 0.0 or active == 0:
        return DayRecord(day, period, {}, 0, 0.0, active)
    trips = int(round(active * colony.trips_per_forager_hour * period))
    visits_total = trips * colony.patches_per_trip
    weights = np.array(
        [
            p.nectar_quantity / (1.0 + p.distance_from_hive / colony.reference_distance_m)
            for p in patches
        ]
    )
    total_w = weights.sum()
    probs = weights / total_w if total_w > 0 else np.full(len(patches), 1.0 / len(patches))
    counts = generator(seed).multinomial(visits_total, probs)
    visits = {p.id: int(c) for p, c in zip(patches, counts)}
    return DayRecord(
        day=day,
        foraging_period=period,
        visits_per_patch=visits,
        completed_trips=trips,
        trips_per_sunshine_hour=trips / max(dw.sunshine_hours, TRIPS_PER_SUN_HOUR_EPS),
        active_foragers=active,
    )


def aggregate_totals(
    days: list[DayRecord], report: ScoutReport, patches: list[Patch]
) -> SeasonTotals:
    natural_ids = tuple(sorted(p.id for p in patches if not p.artificial))
    natural_set = set(natural_ids)
    detected_natural = tuple(
        sorted(pid for pid in report.detected_patch_ids if pid in natural_set)
    )
    n_days = len(days)
    return SeasonTotals(
        total_visits=sum(sum(d.visits_per_patch.values()) for d in days),
        total_trips=sum(d.completed_trips for d in days),
        mean_foraging_period=(
            sum(d.foraging_period for d in days) / n_days if n_days else 0.0
        ),
        mean_trips_per_sunshine_hour=(
            sum(d.trips_per_sunshine_hour for d in days) / n_days if n_days else 0.0
        ),
        detected_patch_count=len(detected_natural),
        natural_patch_count=len(natural_ids),
        detected_fraction=(
            len(detected_natural) / len(natural_ids) if natural_ids else 0.0
        ),
        covered_area_fraction=report.covered_area_fraction,
        natural_patch_ids=natural_ids,
        detected_patch_ids=tuple(sorted(report.detected_patch_ids)),
    )


def run_season(
    grid: CellGrid,
    patches: list[Patch],
    weather: WeatherSeries,
    ctrl: EnvControl | None,
    colony: ColonyParams,
    scout_cadence_days: int,
    scout_params: ScoutParams,
    seed: int,
    cap_hours: float = 9.0,
) -> SeasonRecord:
    """Simulate the season window day by day.

    Scouting refreshes on the first day and every cadence days after. All
    refreshes share one walk seed, so a refresh with h hours yields the
    h-hour prefix of the season's walk; the merged report over refreshes is
    therefore exactly the sum of those prefixes.
    """
    if scout_cadence_days < 1:
        raise ValueError("scout_cadence_days must be >= 1")
    start, end = colony.season
    season_days = list(range(start, end + 1))
    refresh_days = season_days[::scout_cadence_days]

    scout_seed = derive_seed(seed, "scout")
    steps_by_day = {
        d: int(
            round(
                foraging_hours(weather.day(d), ctrl, cap_hours) * scout_params.steps_per_hour
            )
        )
        for d in refresh_days
    }
    checkpoints = sorted(set(steps_by_day.values()))
    if checkpoints:
        reports = simulate_at_checkpoints(grid, patches, scout_params, checkpoints, scout_seed)
        report_at = dict(zip(checkpoints, reports))
    else:
        report_at = {}

    merged = empty_report(grid, len(patches))
    by_id = {p.id: p for p in patches}
    known_ids: set[int] = set()
    days: list[DayRecord] = []
    coverage_by_day: dict[int, tuple[int, float]] = {}
    natural = {p.id for p in patches if not p.artificial}

    for day in season_days:
        if day in steps_by_day:
            # Merge of prefix runs: counts add, coverage equals the longest.
            rep = report_at[steps_by_day[day]]
            merged = merge_reports(merged, rep)
            known_ids |= rep.detected_patch_ids
        known = [by_id[i] for i in sorted(known_ids)]
        rec = simulate_day(
            known,
            weather.day(day),
            ctrl,
            colony,
            derive_seed(seed, "day", day),
            day,
            cap_hours,
        )
        days.append(rec)
        coverage_by_day[day] = (
            len(known_ids & natural),
            merged.covered_area_fraction,
        )

    return SeasonRecord(
        days=days,
        totals=aggregate_totals(days, merged, patches),
        scout_report=merged,
        coverage_by_day=coverage_by_day,
    )


def write_season_csv(path, record: SeasonRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            "day,foraging_h,trips,trips_per_sun_h,total_visits,detected_patches,covered_area_frac\n"
        )
        for d in record.days:
            found, frac = record.coverage_by_day[d.day]
            fh.write(
                f"{d.day},{d.foraging_period!r},{d.completed_trips},"
                f"{d.trips_per_sunshine_hour!r},{sum(d.visits_per_patch.values())},"
                f"{found},{frac!r}\n"
            )


def write_totals(path, totals: SeasonTotals) -> None:
    """Flat key-value text file (JSON object, sorted keys, one per line)."""
    items = [
        ("covered_area_fraction", repr(totals.covered_area_fraction)),
        ("detected_fraction", repr(totals.detected_fraction)),
        ("detected_patch_count", str(totals.detected_patch_count)),
        ("mean_foraging_period_h", repr(totals.mean_foraging_period)),
        ("mean_trips_per_sunshine_hour", repr(totals.mean_trips_per_sunshine_hour)),
        ("natural_patch_count", str(totals.natural_patch_count)),
        ("total_trips", str(totals.total_trips)),
        ("total_visits", str(totals.total_visits)),
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("{\n")
        for i, (k, v) in enumerate(items):
            comma = "," if i < len(items) - 1 else ""
            fh.write(f'  "{k}": {v}{comma}\n')
        fh.write("}\n")
