"""Reference detectors used as comparison curves and test oracles."""

from taser.baselines.detectors import (
    chest_mrc_detect,
    ml_exhaustive,
    ml_jed_exhaustive,
    mmse_detect,
    rayleigh_bpsk_ber,
    simo_detect,
    simo_lower_bound,
)

__all__ = [
    "chest_mrc_detect",
    "ml_exhaustive",
    "ml_jed_exhaustive",
    "mmse_detect",
    "rayleigh_bpsk_ber",
    "simo_detect",
    "simo_lower_bound",
]
