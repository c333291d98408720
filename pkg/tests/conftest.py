"""Shared fixtures: generating a stem bank is moderately expensive, so the
default bank is built once per test session."""

from __future__ import annotations

import pytest

from tiltmix.stems import generate_stems


@pytest.fixture(scope="session")
def bank42():
    return generate_stems(42)
