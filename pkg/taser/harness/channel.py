"""
Random trial generation over i.i.d. flat Rayleigh fading.

Channel entries and noise are circularly-symmetric complex Gaussian; the
channel has unit variance per entry and the noise variance N0 per entry.
Symbols are drawn uniformly from the constellation.

SNR conventions:
  coherent MU-MIMO   N0 = U / SNR   (SNR per receive antenna)
  SIMO / JED         N0 = 1 / SNR
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from taser.problems.models import (
    CoherentInstance,
    Constellation,
    ProblemMode,
    SimoBurst,
)


@dataclass(frozen=True)
class Trial:
    """
    One generated observation with its ground truth.

    Attributes:
        observation: what the receiver sees
        true_symbols: transmitted user symbols, or the K data symbols for JED
        channel: true channel (B x U matrix, or length-B vector for JED)
    """

    observation: CoherentInstance | SimoBurst
    true_symbols: NDArray[np.complex128]
    channel: NDArray[np.complex128]


def snr_to_n0(snr_db: float, mode: ProblemMode, users: int = 1) -> float:
    snr_lin = 10.0 ** (snr_db / 10.0)
    if mode == ProblemMode.COHERENT:
        return users / snr_lin
    return 1.0 / snr_lin


def complex_gaussian(
    rng: np.random.Generator, shape: tuple[int, ...], variance: float = 1.0
) -> NDArray[np.complex128]:
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _random_symbols(
    constellation: Constellation, count: int, rng: np.random.Generator
) -> NDArray[np.complex128]:
    points = constellation.points
    return points[rng.integers(len(points), size=count)]


def draw_coherent_trial(
    bs_antennas: int,
    users: int,
    constellation: Constellation,
    n0: float,
    rng: np.random.Generator,
) -> Trial:
    h = complex_gaussian(rng, (bs_antennas, users))
    s = _random_symbols(constellation, users, rng)
    n = complex_gaussian(rng, (bs_antennas,), n0)
    inst = CoherentInstance(y=h @ s + n, h=h, constellation=constellation, n0=n0)
    return Trial(observation=inst, true_symbols=s, channel=h)


def draw_jed_trial(
    bs_antennas: int,
    data_slots: int,
    constellation: Constellation,
    n0: float,
    rng: np.random.Generator,
) -> Trial:
    """Y = h s^H + N with s = [s0; s_r] and s0 the first constellation point."""
    h = complex_gaussian(rng, (bs_antennas,))
    s0 = constellation.points[0]
    data = _random_symbols(constellation, data_slots, rng)
    s = np.concatenate([[s0], data])
    noise = complex_gaussian(rng, (bs_antennas, data_slots + 1), n0)
    y = np.outer(h, s.conj()) + noise
    burst = SimoBurst(y=y, s0=complex(s0), constellation=constellation, n0=n0)
    return Trial(observation=burst, true_symbols=data, channel=h)


def generate_coherent_trial(
    bs_antennas: int,
    users: int,
    constellation: Constellation,
    n0: float,
    rng: np.random.Generator,
) -> tuple[CoherentInstance, NDArray[np.complex128]]:
    """y = Hs + n with H ~ CN(0, 1) entries and n ~ CN(0, n0)."""
    trial = draw_coherent_trial(bs_antennas, users, constellation, n0, rng)
    assert isinstance(trial.observation, CoherentInstance)
    return trial.observation, trial.true_symbols


def generate_jed_trial(
    bs_antennas: int,
    data_slots: int,
    constellation: Constellation,
    n0: float,
    rng: np.random.Generator,
) -> tuple[SimoBurst, NDArray[np.complex128]]:
    """A block-fading SIMO burst of K+1 slots; returns the K data symbols."""
    trial = draw_jed_trial(bs_antennas, data_slots, constellation, n0, rng)
    assert isinstance(trial.observation, SimoBurst)
    return trial.observation, trial.true_symbols
