import os
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
SANTA_FE = REPO / "data" / "santafe_laser.txt"


@pytest.fixture
def santa_fe_path(monkeypatch):
    if not SANTA_FE.is_file():
        pytest.skip("Santa Fe data file not present")
    monkeypatch.setenv("SLRC_SANTAFE", str(SANTA_FE))
    return SANTA_FE


@pytest.fixture
def no_santa_fe(monkeypatch):
    monkeypatch.delenv("SLRC_SANTAFE", raising=False)


def pytest_configure(config):
    os.environ.setdefault("PYTHONHASHSEED", "0")
