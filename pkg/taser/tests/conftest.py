"""
Shared test fixtures and builders.

Every random test draws from a seeded numpy Generator so failures replay
exactly; make_* helpers build small observations by hand.
"""

import numpy as np
import pytest

from taser.harness.channel import generate_coherent_trial, generate_jed_trial
from taser.problems.models import (
    BPSK,
    CoherentInstance,
    Constellation,
    SimoBurst,
)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keep sweeps in tests on one thread unless a test overrides it."""
    monkeypatch.setenv("TASER_WORKERS", "1")


def make_coherent(
    rng: np.random.Generator,
    bs_antennas: int = 8,
    users: int = 4,
    constellation: Constellation = BPSK,
    n0: float = 0.1,
) -> tuple[CoherentInstance, np.ndarray]:
    return generate_coherent_trial(bs_antennas, users, constellation, n0, rng)


def make_burst(
    rng: np.random.Generator,
    bs_antennas: int = 8,
    data_slots: int = 4,
    constellation: Constellation = BPSK,
    n0: float = 0.1,
) -> tuple[SimoBurst, np.ndarray]:
    return generate_jed_trial(bs_antennas, data_slots, constellation, n0, rng)


def random_symbols(
    rng: np.random.Generator, constellation: Constellation, count: int
) -> np.ndarray:
    points = constellation.points
    return points[rng.integers(len(points), size=count)]
