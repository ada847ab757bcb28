from __future__ import annotations

import functools
from pathlib import Path

import pytest

from hrbc.frontend import check, load_model, parse_source
from hrbc.reducer import aggregate
from hrbc.translator import ExplorationLimits, explore

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

BBW_LIMITS = dict(queue={"bctlr": 4, "wctlrR": 2, "wctlrL": 2}, timer_pool=1, arg_pool=11)
# the instrumented variants rename wL/wctlrL to wheel/wctlr and add two monitors
VARIANT_LIMITS = dict(queue={"bctlr": 4, "wctlrR": 2, "wctlr": 2, "monitor": 2, "idle": 2},
                      timer_pool=1, arg_pool=11)


def model_path(name: str) -> Path:
    for base in (MODELS, FIXTURES):
        path = base / f"{name}.hrebeca"
        if path.exists():
            return path
    raise FileNotFoundError(name)


def checked(source: str):
    return check(parse_source(source, "<test>"))


@functools.lru_cache(maxsize=None)
def full_ha(name: str, **limits):
    return explore(load_model(model_path(name)), ExplorationLimits(**limits) if limits else None)


@functools.lru_cache(maxsize=None)
def _bbw(name: str):
    limits = BBW_LIMITS if name == "bbw" else VARIANT_LIMITS
    full = explore(load_model(model_path(name)), ExplorationLimits(**limits))
    return full, aggregate(full)


def bbw_pair():
    return _bbw("bbw")


def reaction_pair():
    return _bbw("bbw_reaction")


def slip_pair():
    return _bbw("bbw_slip")


@pytest.fixture(scope="session")
def heater():
    return full_ha("heater")


@pytest.fixture(scope="session")
def heater_reduced(heater):
    return aggregate(heater)


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS, TITLES
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(TITLES):
        if n in RESULTS:
            terminalreporter.write_line(RESULTS[n])
