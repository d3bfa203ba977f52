from __future__ import annotations

import pytest

from gamesynth import default_registry
from gamesynth.pipeline import GenerationConfig, generate

_CRITERIA: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    _CRITERIA[number] = line
    print(line)


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n])


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """Two samples per task for every game, generated once per session."""
    out = tmp_path_factory.mktemp("small")
    cfg = GenerationConfig(master_seed=7, per_task=2, output_dir=str(out))
    res = generate(cfg)
    return out, res
