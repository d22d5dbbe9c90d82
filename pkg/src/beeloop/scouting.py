"""Scout bee exploration over the landscape.

Movement law: a correlated random walk. Each scout starts at the hive with a
uniform random heading; per step the heading gains Gaussian noise and the
scout advances ``step_length`` cells. Steps into obstacles or off the grid
are re-sampled with a fresh uniform direction (bounded retries), then the
scout reflects in place. Scouts beyond ``max_range`` of the hive head home.

Detection: a scout within ``detection_radius`` cells of any member cell of a
patch opens an encounter episode with that patch; one Bernoulli draw against
the patch's detection probability decides the episode. Leaving the sensing
zone and re-entering opens a new episode. On a successful detection the
scout, if idle, locks onto the patch centroid for ``dwell_steps`` steps with
reduced heading noise, then resumes free exploration. This local attraction
is what lets small high-detectability patches act as waypoints.

Randomness is split into two streams so that landscape edits have only
causal effects. Movement draws (turn noise plus a fixed block of retry
directions per step) come from a Philox stream with constant per-step
consumption; episode draws are computed by hashing (seed, scout, patch,
step), so they are order-independent. Adding a patch therefore leaves every
scout's walk bitwise unchanged until some scout actually senses it.

A run is fully determined by (grid, patches, params, hours, seed), and a
longer run with the same seed is an exact prefix-extension of a shorter one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .landscape import CellGrid, Patch
from .rng import derive_seed, generator, mix64

_MAX_STEP_RETRIES = 4
_U64_SCALE = 1.0 / 2.0**64


def _episode_uniform(key: int, scout: int, patch: int, step: int) -> float:
    """Order-independent uniform draw for one encounter episode."""
    z = mix64(key ^ mix64(scout))
    z = mix64(z ^ mix64(patch))
    z = mix64(z ^ mix64(step))
    return z * _U64_SCALE


@dataclass(frozen=True)
class ScoutParams:
    n_scouts: int = 150
    steps_per_hour: int = 24
    step_length: float = 0.8  # cells per step
    turn_sigma: float = 1.6  # radians, free-exploration turning spread
    max_range: float = 6000.0  # meters, leash distance from hive
    detection_radius: float = 1.8  # cells, sensing distance to a patch cell
    dwell_steps: int = 10  # steps of attraction after a detection
    bias_sigma: float = 0.3  # radians, turning spread while attracted

    def __post_init__(self):
        if min(self.n_scouts, self.steps_per_hour, self.dwell_steps) <= 0:
            raise ValueError("scout counts and step rates must be positive")
        if min(self.step_length, self.max_range, self.detection_radius, self.bias_sigma) <= 0:
            raise ValueError("scout distances and spreads must be positive")
        if not (0.0 < self.turn_sigma <= math.pi):
            raise ValueError("turn_sigma must be in (0, pi]")


@dataclass(frozen=True)
class ScoutReport:
    """Aggregate of one scouting run (or a merge of several)."""

    coverage: np.ndarray  # (height, width) int64 visit counts
    detected_patch_ids: frozenset[int]
    covered_area_fraction: float
    detected_patch_fraction: float
    n_patches: int
    traversable_cells: int
    trajectories: np.ndarray | None = None  # (n_scouts, steps, 2) cell coords

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScoutReport):
            return NotImplemented
        return (
            np.array_equal(self.coverage, other.coverage)
            and self.detected_patch_ids == other.detected_patch_ids
            and self.covered_area_fraction == other.covered_area_fraction
            and self.detected_patch_fraction == other.detected_patch_fraction
            and self.n_patches == other.n_patches
            and self.traversable_cells == other.traversable_cells
        )


def build_sensing_map(
    grid: CellGrid, patches: list[Patch], radius: float
) -> dict[int, tuple[int, ...]]:
    """Flat cell index -> sorted patch ids sensed from that cell."""
    offsets = [
        (dr, dc)
        for dr in range(-int(radius), int(radius) + 1)
        for dc in range(-int(radius), int(radius) + 1)
        if math.hypot(dr, dc) <= radius
    ]
    by_cell: dict[int, set[int]] = {}
    width, height = grid.width, grid.height
    for p in patches:
        for flat in p.cell_members:
            r, c = divmod(flat, width)
            for dr, dc in offsets:
                rr, cc = r + dr, c + dc
                if 0 <= rr < height and 0 <= cc < width:
                    by_cell.setdefault(rr * width + cc, set()).add(p.id)
    return {cell: tuple(sorted(ids)) for cell, ids in by_cell.items()}


def _make_report(coverage, detected, n_patches, traversable, trajectories=None) -> ScoutReport:
    visited = int(np.count_nonzero(coverage))
    return ScoutReport(
        coverage=coverage,
        detected_patch_ids=frozenset(detected),
        covered_area_fraction=visited / traversable if traversable else 0.0,
        detected_patch_fraction=len(detected) / n_patches if n_patches else 0.0,
        n_patches=n_patches,
        traversable_cells=traversable,
        trajectories=trajectories,
    )


def empty_report(grid: CellGrid, n_patches: int) -> ScoutReport:
    cov = np.zeros((grid.height, grid.width), dtype=np.int64)
    return _make_report(cov, frozenset(), n_patches, grid.traversable_count())


def simulate_at_checkpoints(
    grid: CellGrid,
    patches: list[Patch],
    params: ScoutParams,
    checkpoints: list[int],
    seed: int,
    collect_trajectories: bool = False,
) -> list[ScoutReport]:
    """One walk, snapshotted at each requested step count.

    The snapshot at ``s`` steps is identical to an independent run of ``s``
    steps with the same seed, which is what makes scouting monotone in
    effort and lets a season reuse a single walk across refresh days.
    """
    order = sorted(set(checkpoints))
    if order and order[0] < 0:
        raise ValueError("checkpoints must be non-negative")
    wanted = set(order)
    total_steps = order[-1] if order else 0
    width, height = grid.width, grid.height
    traversable = grid.traversable_count()
    n_patches = len(patches)

    move_rng = generator(seed, "move")
    episode_key = derive_seed(seed, "detect")
    n = params.n_scouts
    hx, hy = grid.hive_cell
    start = np.array([hx + 0.5, hy + 0.5])
    pos = np.tile(start, (n, 1))
    heading = move_rng.uniform(0.0, 2.0 * math.pi, n)
    target = np.full(n, -1, dtype=np.int64)
    dwell = np.zeros(n, dtype=np.int64)
    prev_near: list[tuple[int, ...]] = [()] * n

    sensing = build_sensing_map(grid, patches, params.detection_radius)
    detect_prob = {p.id: p.detection_probability for p in patches}
    centroid_cells = {
        p.id: (p.centroid[0] / grid.cell_size, p.centroid[1] / grid.cell_size)
        for p in patches
    }
    blocked_cells = grid.obstacle_mask()
    leash_cells = params.max_range / grid.cell_size
    step_len = params.step_length

    coverage = np.zeros((height, width), dtype=np.int64)
    detected: set[int] = set()
    trajectories = (
        np.zeros((n, total_steps, 2), dtype=np.float64) if collect_trajectories else None
    )

    snapshots: dict[int, ScoutReport] = {}
    if 0 in order:
        traj0 = trajectories[:, :0, :].copy() if trajectories is not None else None
        snapshots[0] = _make_report(
            coverage.copy(), detected, n_patches, traversable, traj0
        )

    for step in range(1, total_steps + 1):
        # Per-step draws are a fixed block (n turn noises, n x retries
        # directions) so one scout's detour never shifts another's stream.
        turn_noise = move_rng.normal(0.0, 1.0, n)
        retry_dirs = move_rng.uniform(0.0, 2.0 * math.pi, (n, _MAX_STEP_RETRIES))

        # Base heading: leash overrides attraction overrides persistence.
        dist = np.hypot(pos[:, 0] - start[0], pos[:, 1] - start[1])
        leashed = dist > leash_cells
        attracted = (target >= 0) & ~leashed
        sigma = np.where(attracted, params.bias_sigma, params.turn_sigma)
        if leashed.any():
            idx = np.nonzero(leashed)[0]
            heading[idx] = np.arctan2(start[1] - pos[idx, 1], start[0] - pos[idx, 0])
        if attracted.any():
            idx = np.nonzero(attracted)[0]
            tx = np.array([centroid_cells[int(t)][0] for t in target[idx]])
            ty = np.array([centroid_cells[int(t)][1] for t in target[idx]])
            heading[idx] = np.arctan2(ty - pos[idx, 1], tx - pos[idx, 0])
        heading = heading + sigma * turn_noise

        # Step proposal with obstacle re-sampling, then reflect in place.
        prop_x = pos[:, 0] + step_len * np.cos(heading)
        prop_y = pos[:, 1] + step_len * np.sin(heading)
        for attempt in range(_MAX_STEP_RETRIES + 1):
            inside = (prop_x >= 0) & (prop_x < width) & (prop_y >= 0) & (prop_y < height)
            blocked = ~inside
            if inside.any():
                ii = np.nonzero(inside)[0]
                hit = blocked_cells[
                    prop_y[ii].astype(np.int64), prop_x[ii].astype(np.int64)
                ]
                blocked[ii[hit]] = True
            if not blocked.any() or attempt == _MAX_STEP_RETRIES:
                break
            idx = np.nonzero(blocked)[0]
            heading[idx] = retry_dirs[idx, attempt]
            prop_x[idx] = pos[idx, 0] + step_len * np.cos(heading[idx])
            prop_y[idx] = pos[idx, 1] + step_len * np.sin(heading[idx])
        if blocked.any():
            idx = np.nonzero(blocked)[0]
            heading[idx] += math.pi
            prop_x[idx] = pos[idx, 0]
            prop_y[idx] = pos[idx, 1]
        pos[:, 0] = prop_x
        pos[:, 1] = prop_y
        if trajectories is not None:
            trajectories[:, step - 1, 0] = pos[:, 0]
            trajectories[:, step - 1, 1] = pos[:, 1]

        cols = pos[:, 0].astype(np.int64)
        rows = pos[:, 1].astype(np.int64)
        np.add.at(coverage, (rows, cols), 1)

        # Encounter episodes: one hashed draw per newly sensed patch.
        flat = rows * width + cols
        for i in range(n):
            near = sensing.get(int(flat[i]), ())
            if near != prev_near[i]:
                prev = prev_near[i]
                for pid in near:
                    if pid in prev:
                        continue
                    if _episode_uniform(episode_key, i, pid, step) < detect_prob[pid]:
                        detected.add(pid)
                        if target[i] < 0:
                            target[i] = pid
                            dwell[i] = params.dwell_steps
                prev_near[i] = near

        active = target >= 0
        dwell[active] -= 1
        target[active & (dwell <= 0)] = -1

        if step in wanted:
            traj = trajectories[:, :step, :].copy() if trajectories is not None else None
            snapshots[step] = _make_report(
                coverage.copy(), set(detected), n_patches, traversable, traj
            )

    return [snapshots[s] for s in order]


def run_scouting(
    grid: CellGrid,
    patches: list[Patch],
    params: ScoutParams,
    hours: float,
    seed: int,
    collect_trajectories: bool = False,
) -> ScoutReport:
    """Run one scouting pass of hours * steps_per_hour steps."""
    if hours < 0:
        raise ValueError("hours must be non-negative")
    steps = int(round(hours * params.steps_per_hour))
    return simulate_at_checkpoints(
        grid, patches, params, [steps], seed, collect_trajectories
    )[0]


def merge_reports(a: ScoutReport, b: ScoutReport) -> ScoutReport:
    """Cellwise visit-count sum and detection union over the same grid."""
    if a.coverage.shape != b.coverage.shape:
        raise DimensionMismatchError(
            f"coverage shapes differ: {a.coverage.shape} vs {b.coverage.shape}"
        )
    if a.n_patches != b.n_patches or a.traversable_cells != b.traversable_cells:
        raise DimensionMismatchError("reports describe different landscapes")
    return _make_report(
        a.coverage + b.coverage,
        a.detected_patch_ids | b.detected_patch_ids,
        a.n_patches,
        a.traversable_cells,
    )


def write_coverage_csv(path, report: ScoutReport) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in report.coverage:
            fh.write(",".join(str(int(v)) for v in row) + "\n")


def write_trajectories_csv(path, report: ScoutReport) -> None:
    if report.trajectories is None:
        raise ValueError("report has no trajectories; run with collect_trajectories")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("scout_id,step,x,y\n")
        n, steps, _ = report.trajectories.shape
        for i in range(n):
            for t in range(steps):
                x, y = report.trajectories[i, t]
                fh.write(f"{i},{t + 1},{x!r},{y!r}\n")
