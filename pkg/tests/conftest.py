import pytest

from beeloop.cli import default_config_path
from beeloop.landscape import derive_patches, load_map


@pytest.fixture(scope="session")
def desk_grid():
    return load_map(default_config_path().parent / "field_desk.map")


@pytest.fixture(scope="session")
def desk_patches(desk_grid):
    return derive_patches(desk_grid)


def make_map(rows: list[str], cell_size: float = 100.0) -> str:
    return f"# cell_size_m = {cell_size!r}\n" + "\n".join(rows) + "\n"
