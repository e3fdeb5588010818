"""
Detector registry for Monte-Carlo sweeps.

Each detector is registered per problem mode under the name used on the
command line and in the CSV. Iterative detectors run once per t_max value;
the others run once per trial and are reported with t_max = 0.
"""

from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from taser.baselines.detectors import (
    chest_mrc_detect,
    ml_exhaustive,
    ml_jed_exhaustive,
    mmse_detect,
    simo_detect,
)
from taser.engine.solver import TaserConfig, float_signs, taser_detect
from taser.errors import UnknownDetector
from taser.fixed_point.solver import taser_solve_fx
from taser.harness.channel import Trial
from taser.problems.models import (
    CoherentInstance,
    DetectionResult,
    Modulation,
    ProblemMode,
    SimoBurst,
    constellation_for,
)


class Arithmetic(Enum):
    """Number representation used by the TASER solver."""

    FLOAT = "float"
    FIXED = "fixed"


@dataclass(frozen=True)
class TrialParams:
    t_max: int
    alpha: float
    arithmetic: Arithmetic


DetectorFn = Callable[[Trial, TrialParams], DetectionResult]


@dataclass(frozen=True)
class DetectorSpec:
    """
    Attributes:
        name: registry / CSV name
        mode: problem mode the detector serves
        iterative: whether the detector is swept over t_max
        run: detector applied to one trial
    """

    name: str
    mode: ProblemMode
    iterative: bool
    run: DetectorFn


def _coherent(trial: Trial) -> CoherentInstance:
    assert isinstance(trial.observation, CoherentInstance)
    return trial.observation


def _burst(trial: Trial) -> SimoBurst:
    assert isinstance(trial.observation, SimoBurst)
    return trial.observation


def _taser(trial: Trial, params: TrialParams) -> DetectionResult:
    cfg = TaserConfig(t_max=params.t_max, alpha=params.alpha)
    solver = taser_solve_fx if params.arithmetic == Arithmetic.FIXED else float_signs
    return taser_detect(trial.observation, cfg, solver=solver)


def _csir(trial: Trial, params: TrialParams) -> DetectionResult:
    return chest_mrc_detect(_burst(trial), channel=trial.channel)


_REGISTRY: dict[ProblemMode, dict[str, DetectorSpec]] = {
    ProblemMode.COHERENT: {
        "taser": DetectorSpec("taser", ProblemMode.COHERENT, True, _taser),
        "mmse": DetectorSpec(
            "mmse", ProblemMode.COHERENT, False, lambda t, p: mmse_detect(_coherent(t))
        ),
        "ml": DetectorSpec(
            "ml", ProblemMode.COHERENT, False, lambda t, p: ml_exhaustive(_coherent(t))
        ),
        "simo": DetectorSpec(
            "simo",
            ProblemMode.COHERENT,
            False,
            lambda t, p: simo_detect(_coherent(t), t.true_symbols),
        ),
    },
    ProblemMode.JED: {
        "taser": DetectorSpec("taser", ProblemMode.JED, True, _taser),
        "ml": DetectorSpec(
            "ml", ProblemMode.JED, False, lambda t, p: ml_jed_exhaustive(_burst(t))
        ),
        "chest": DetectorSpec(
            "chest", ProblemMode.JED, False, lambda t, p: chest_mrc_detect(_burst(t))
        ),
        "csir": DetectorSpec("csir", ProblemMode.JED, False, _csir),
    },
}


def registered_detectors(mode: ProblemMode) -> list[str]:
    return sorted(_REGISTRY[mode])


def get_detector(name: str, mode: ProblemMode) -> DetectorSpec:
    """
    Raises:
        UnknownDetector: name is not registered for mode
    """
    try:
        return _REGISTRY[mode][name]
    except KeyError:
        raise UnknownDetector(
            f"unknown detector {name!r} for mode {mode.value}; "
            f"choose from {', '.join(registered_detectors(mode))}"
        ) from None


def problem_dimension(modulation: Modulation, symbols: int) -> int:
    """N of the real-valued problem for U users (or K data slots)."""
    return constellation_for(modulation).real_dims_per_symbol * symbols + 1


def count_errors(
    result: DetectionResult,
    true_symbols: NDArray[np.complex128],
    modulation: Modulation,
) -> tuple[bool, int]:
    """(vector error, bit errors) of one detection."""
    constellation = constellation_for(modulation)
    vector_error = bool(np.any(np.abs(result.symbols - true_symbols) > 1e-9))
    true_bits = constellation.to_bits(true_symbols)
    bit_errors = int(np.count_nonzero(result.hard_bits != true_bits))
    return vector_error, bit_errors
