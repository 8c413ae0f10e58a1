"""Shared test fixtures."""

import pytest
import structlog


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop log configuration bound to a test's captured stderr."""
    yield
    structlog.reset_defaults()
