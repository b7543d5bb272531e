"""Shared fixtures."""

import pytest

from neuro_drift.core.config import RunConfig
from tests.factories import make_config


@pytest.fixture
def small_config() -> RunConfig:
    """小さなワールドの設定."""
    return make_config()
