#!/usr/bin/env python3
"""Independent patch count check for a map file.

Counts 4-connected crop components with union-find, on purpose a different
algorithm from the package's BFS flood fill, so the two can cross-validate.

Usage: python scripts/verify_map.py [path/to/map]
"""

import sys
from pathlib import Path


def count_components(rows: list[str], symbol: str = "Y") -> int:
    width = len(rows[0])
    parent: dict[int, int] = {}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch != symbol:
                continue
            idx = r * width + c
            parent[idx] = idx
            if c > 0 and row[c - 1] == symbol:
                union(idx, idx - 1)
            if r > 0 and rows[r - 1][c] == symbol:
                union(idx, idx - width)
    return len({find(i) for i in parent})


def load_rows(path: Path) -> list[str]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not rows and line.startswith("#") and "=" in line:
            continue
        if line.strip():
            rows.append(line)
    return rows


def main() -> None:
    default = Path(__file__).resolve().parents[1] / "src" / "beeloop" / "data" / "field_desk.map"
    path = Path(sys.argv[1]) if len(sys.argv) > 1 else default
    rows = load_rows(path)
    print(f"{path}: {len(rows[0])}x{len(rows)} cells")
    print(f"crop patches (union-find, 4-connected): {count_components(rows)}")
    print(f"hive cells: {sum(r.count('H') for r in rows)}")


if __name__ == "__main__":
    main()
