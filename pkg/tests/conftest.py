"""
Shared fixtures and marker handling for the test suite
"""

import pytest

from balanced.config import config
from balanced.services.storage_service import LambdaCacheStore


def pytest_collection_modifyitems(items):
    """Skip extended tests unless BALANCED_EXTENDED=true"""
    if config.EXTENDED:
        return
    skip_extended = pytest.mark.skip(reason="set BALANCED_EXTENDED=true to run extended tests")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip_extended)


@pytest.fixture(autouse=True)
def single_process(monkeypatch):
    """Run services in-process unless a test asks for workers"""
    monkeypatch.setattr(config, "JOBS", 1)


@pytest.fixture
def store(tmp_path):
    return LambdaCacheStore(tmp_path / "cache")
