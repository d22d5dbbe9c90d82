"""Field maps, flower patches and spatial geometry.

A landscape is an ASCII cell grid: `.` empty, `Y` crop, `#` obstacle, `H`
hive (exactly one), `A` artificial food. Crop patches are 4-connected
components of `Y` cells; artificial patches are 4-connected components of
`A` cells. Header lines of the form ``# key = value`` before the first grid
row carry metadata (``cell_size_m``). A grid row can itself start with `#`
(an obstacle): rows never contain ``=``, which is what disambiguates them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    MultipleHivesError,
    NoHiveError,
    RaggedRowsError,
    UnknownSymbolError,
    ZeroRegionsError,
)

EMPTY, CROP, OBSTACLE, HIVE, ARTIFICIAL = 0, 1, 2, 3, 4

_SYMBOL_TO_KIND = {".": EMPTY, "Y": CROP, "#": OBSTACLE, "H": HIVE, "A": ARTIFICIAL}
_KIND_TO_SYMBOL = {v: k for k, v in _SYMBOL_TO_KIND.items()}

DEFAULT_CELL_SIZE_M = 125.0


@dataclass(eq=False)
class CellGrid:
    """Rectangular cell grid; ``cells[row, col]`` holds a cell kind code."""

    width: int
    height: int
    cell_size: float
    cells: np.ndarray  # (height, width) int8

    def __eq__(self, other) -> bool:
        if not isinstance(other, CellGrid):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.cell_size == other.cell_size
            and np.array_equal(self.cells, other.cells)
        )

    @property
    def hive_cell(self) -> tuple[int, int]:
        """(col, row) of the unique hive cell."""
        rows, cols = np.nonzero(self.cells == HIVE)
        return int(cols[0]), int(rows[0])

    @property
    def hive_xy_m(self) -> tuple[float, float]:
        """Hive cell center in meters."""
        cx, cy = self.hive_cell
        return (cx + 0.5) * self.cell_size, (cy + 0.5) * self.cell_size

    def obstacle_mask(self) -> np.ndarray:
        return self.cells == OBSTACLE

    def traversable_count(self) -> int:
        return int(np.count_nonzero(self.cells != OBSTACLE))

    def cell_xy_m(self, col: int, row: int) -> tuple[float, float]:
        return (col + 0.5) * self.cell_size, (row + 0.5) * self.cell_size


@dataclass(frozen=True)
class Patch:
    """One contiguous food source with its bookkeeping attributes."""

    id: int
    centroid: tuple[float, float]  # meters
    area: float  # m^2
    cell_members: tuple[int, ...]  # flat indices row*width+col
    distance_from_hive: float  # meters
    nectar_quantity: float  # liters
    pollen_quantity: float  # grams
    detection_probability: float
    artificial: bool


@dataclass(frozen=True)
class PatchParams:
    """Scale constants for patch attributes.

    ``kappa`` sets detection probability 1 - exp(-kappa * cells); the
    functional form is a modeling choice exposed here so it can be retuned.
    Artificial patches get a fixed detection probability and a nectar load
    expressed as a fraction of the mean crop patch nectar.
    """

    kappa: float = 0.05
    nectar_per_m2: float = 0.002  # liters
    pollen_per_m2: float = 0.1  # grams
    artificial_detect: float = 0.95
    artificial_nectar_fraction: float = 0.1


@dataclass(frozen=True)
class RegionTiling:
    rows: int
    cols: int
    region_of_cell: np.ndarray = field(repr=False)  # (height, width) int32

    @property
    def n_regions(self) -> int:
        return self.rows * self.cols


def parse_map(text: str) -> CellGrid:
    """Parse map text into a validated CellGrid.

    Raises NoHive, MultipleHives, RaggedRows or UnknownSymbol with the
    offending line/column in the message.
    """
    cell_size = DEFAULT_CELL_SIZE_M
    lines = text.splitlines()
    grid_rows: list[str] = []
    row_lines: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if not grid_rows and line.startswith("#") and "=" in line:
            key, _, value = line.lstrip("#").partition("=")
            if key.strip() == "cell_size_m":
                try:
                    cell_size = float(value.strip())
                except ValueError:
                    raise UnknownSymbolError(
                        f"bad cell_size_m value {value.strip()!r} at line {lineno}"
                    )
            continue
        if not line.strip():
            continue
        grid_rows.append(line)
        row_lines.append(lineno)

    if not grid_rows:
        raise RaggedRowsError("map has no grid rows")
    # rows must be contiguous: a blank line inside the grid hides a row
    if row_lines[-1] - row_lines[0] != len(row_lines) - 1:
        raise RaggedRowsError("blank line inside the grid rows")

    width = len(grid_rows[0])
    height = len(grid_rows)
    cells = np.zeros((height, width), dtype=np.int8)
    hive_at = None
    for r, row in enumerate(grid_rows):
        if len(row) != width:
            raise RaggedRowsError(
                f"row at line {row_lines[r]} has width {len(row)}, expected {width}"
            )
        for c, sym in enumerate(row):
            kind = _SYMBOL_TO_KIND.get(sym)
            if kind is None:
                raise UnknownSymbolError(
                    f"unknown symbol {sym!r} at line {row_lines[r]}, column {c + 1}"
                )
            if kind == HIVE:
                if hive_at is not None:
                    raise MultipleHivesError(
                        f"second hive at line {row_lines[r]}, column {c + 1}"
                    )
                hive_at = (c, r)
            cells[r, c] = kind
    if hive_at is None:
        raise NoHiveError("map contains no hive cell")
    if cell_size <= 0:
        raise UnknownSymbolError(f"cell_size_m must be positive, got {cell_size}")
    return CellGrid(width=width, height=height, cell_size=cell_size, cells=cells)


def serialize_map(grid: CellGrid) -> str:
    """Inverse of parse_map; parse(serialize(g)) == g."""
    out = [f"# cell_size_m = {grid.cell_size!r}"]
    for r in range(grid.height):
        out.append("".join(_KIND_TO_SYMBOL[int(k)] for k in grid.cells[r]))
    return "\n".join(out) + "\n"


def load_map(path) -> CellGrid:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_map(fh.read())


def _connected_components(mask: np.ndarray) -> list[list[tuple[int, int]]]:
    """4-connected components of True cells, in scan order of their first cell."""
    height, width = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    components = []
    for r0 in range(height):
        for c0 in range(width):
            if not mask[r0, c0] or seen[r0, c0]:
                continue
            stack = [(r0, c0)]
            seen[r0, c0] = True
            members = []
            while stack:
                r, c = stack.pop()
                members.append((r, c))
                for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < height and 0 <= cc < width and mask[rr, cc] and not seen[rr, cc]:
                        seen[rr, cc] = True
                        stack.append((rr, cc))
            components.append(members)
    return components


def derive_patches(grid: CellGrid, params: PatchParams = PatchParams()) -> list[Patch]:
    """One Patch per 4-connected crop component, then artificial clusters.

    Ids are assigned in scan order (crop patches first), so the numbering is
    deterministic for a given grid.
    """
    hx, hy = grid.hive_xy_m
    cs = grid.cell_size
    patches: list[Patch] = []

    def build(members, pid, artificial, detect, nectar, pollen):
        xs = [(c + 0.5) * cs for _, c in members]
        ys = [(r + 0.5) * cs for r, _ in members]
        centroid = (sum(xs) / len(xs), sum(ys) / len(ys))
        flat = tuple(sorted(r * grid.width + c for r, c in members))
        return Patch(
            id=pid,
            centroid=centroid,
            area=len(members) * cs * cs,
            cell_members=flat,
            distance_from_hive=math.hypot(centroid[0] - hx, centroid[1] - hy),
            nectar_quantity=nectar,
            pollen_quantity=pollen,
            detection_probability=detect,
            artificial=artificial,
        )

    crop_components = _connected_components(grid.cells == CROP)
    for members in crop_components:
        n = len(members)
        area_m2 = n * cs * cs
        patches.append(
            build(
                members,
                len(patches),
                False,
                1.0 - math.exp(-params.kappa * n),
                params.nectar_per_m2 * area_m2,
                params.pollen_per_m2 * area_m2,
            )
        )

    mean_crop_nectar = (
        sum(p.nectar_quantity for p in patches) / len(patches) if patches else 0.0
    )
    for members in _connected_components(grid.cells == ARTIFICIAL):
        patches.append(
            build(
                members,
                len(patches),
                True,
                params.artificial_detect,
                params.artificial_nectar_fraction * mean_crop_nectar,
                0.0,
            )
        )
    return patches


def tile_regions(grid: CellGrid, rows: int, cols: int) -> RegionTiling:
    """Partition the grid into rows x cols near-equal rectangles.

    Band sizes are floor(extent / bands); the remainder goes to the last
    band, so a 5-cell extent split in 2 gives bands of 2 and 3 cells.
    """
    if rows < 1 or cols < 1:
        raise ZeroRegionsError(f"tiling needs rows, cols >= 1, got {rows}x{cols}")
    base_h = grid.height // rows
    base_w = grid.width // cols
    if base_h == 0 or base_w == 0:
        raise ZeroRegionsError(
            f"tiling {rows}x{cols} exceeds grid {grid.width}x{grid.height}"
        )
    region = np.zeros((grid.height, grid.width), dtype=np.int32)
    for r in range(grid.height):
        band_r = min(r // base_h, rows - 1)
        for c in range(grid.width):
            band_c = min(c // base_w, cols - 1)
            region[r, c] = band_r * cols + band_c
    return RegionTiling(rows=rows, cols=cols, region_of_cell=region)


def region_centroid_m(tiling: RegionTiling, grid: CellGrid, region: int) -> tuple[float, float]:
    """Mean cell-center position of a region, in meters."""
    rows, cols = np.nonzero(tiling.region_of_cell == region)
    cs = grid.cell_size
    return (float(cols.mean()) + 0.5) * cs, (float(rows.mean()) + 0.5) * cs


def with_artificial(grid: CellGrid, cells: list[tuple[int, int]]) -> CellGrid:
    """New grid with ArtificialFood placed on the given (col, row) cells."""
    new_cells = grid.cells.copy()
    for col, row in cells:
        if new_cells[row, col] != EMPTY:
            raise ValueError(f"cell ({col}, {row}) is not empty")
        new_cells[row, col] = ARTIFICIAL
    return replace(grid, cells=new_cells)


def write_foodflow(path, patches: list[Patch]) -> None:
    """Per-patch attribute table handed from scouting to foraging."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id,x_m,y_m,size_m2,dist_m,nectar_l,pollen_g,detect_prob,artificial\n")
        for p in patches:
            fh.write(
                f"{p.id},{p.centroid[0]!r},{p.centroid[1]!r},{p.area!r},"
                f"{p.distance_from_hive!r},{p.nectar_quantity!r},{p.pollen_quantity!r},"
                f"{p.detection_probability!r},{int(p.artificial)}\n"
            )
