import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_log import ACCEPTANCE_LINES  # noqa: E402
from fusededup.datagen import GenConfig, generate  # noqa: E402


@pytest.fixture(scope="session")
def default_dataset():
    """The seeded default benchmark (833 entities, 20% duplicated, seed 42)."""
    return generate(GenConfig(seed=42))


@pytest.fixture
def small_csv(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text(
        "name,city,browser,os,login_times\n"
        '"Jon Doe","New York","Chrome","Windows","[""2024-01-01T22:00:00Z""]"\n'
        '"Jane Smith","Boston","Safari","macOS","[""2024-01-02T08:30:00Z"", ""2024-01-01T09:00:00Z""]"\n'
        '"Wei Zhang","Beijing","Firefox","Linux","[]"\n',
        encoding="utf-8",
    )
    return path


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
