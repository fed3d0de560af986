from pathlib import Path

import numpy as np
import pytest

from econo.config import PipelineConfig, build_dataset, load_config
from econo.series import Dataset, QuarterPeriod, QuarterlySeries

ROOT = Path(__file__).resolve().parents[1]
PAPER_INI = ROOT / "configs" / "paper.ini"


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")
    config._acceptance = {}


def pytest_runtest_makereport(item, call):
    m = item.get_closest_marker("acceptance")
    if m is None or call.when != "call":
        return
    num, title = m.args
    ok = call.excinfo is None
    store = item.config._acceptance
    prev = store.get(num, (title, True))
    store[num] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = getattr(config, "_acceptance", {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(store):
        title, ok = store[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def raw_data() -> Dataset:
    return build_dataset(PipelineConfig(breaks=(), generate=()))


@pytest.fixture(scope="session")
def ref_cfg() -> PipelineConfig:
    return load_config(PAPER_INI)


@pytest.fixture(scope="session")
def data(ref_cfg) -> Dataset:
    return build_dataset(ref_cfg)


def make_dataset(columns: dict, start=QuarterPeriod(2000, 1)) -> Dataset:
    return Dataset([QuarterlySeries(k, start, np.asarray(v, dtype=float)) for k, v in columns.items()])
