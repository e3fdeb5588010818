"""
Monte-Carlo acceptance checks of detection performance.

These run full sweeps and take minutes; they are marked slow. Select them
with `pytest -m slow`. TASER_ACCEPTANCE_TRIALS lowers the trial count for a
quick smoke run (the tolerances assume the default).
"""

import os
from typing import Literal

import numpy as np
import pytest

from taser.harness.registry import Arithmetic
from taser.harness.schemas import SweepConfig, SweepRow
from taser.harness.stats import snr_at_error_rate
from taser.harness.sweep import run_sweep
from taser.problems.models import Modulation, ProblemMode

pytestmark = pytest.mark.slow

TRIALS = int(os.getenv("TASER_ACCEPTANCE_TRIALS", "10000"))


def grid(start: float, stop: float, step: float) -> list[float]:
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 6) for i in range(count)]


def crossing(
    rows: list[SweepRow],
    detector: str,
    t_max: int = 0,
    metric: Literal["ver", "ber"] = "ver",
) -> float:
    curve = [r for r in rows if r.detector == detector and r.t_max == t_max]
    snr = snr_at_error_rate(curve, target=0.01, metric=metric)
    assert snr is not None, f"{detector} never reached 1% {metric}"
    return snr


def sweep(**params) -> list[SweepRow]:
    params.setdefault("trials", TRIALS)
    params.setdefault("seed", 0)
    return run_sweep(SweepConfig(**params), workers=os.cpu_count())


# ── Coherent detection ────────────────────────────────────────────────────────


def test_near_ml_on_a_square_system():
    rows = sweep(
        bs_antennas=16,
        users=16,
        snr_db=grid(0.0, 20.0, 1.0),
        t_max=[20],
        detectors=["taser", "ml"],
    )
    assert crossing(rows, "taser", 20) - crossing(rows, "ml") < 1.0


@pytest.mark.parametrize(
    "modulation, snr_db",
    [
        (Modulation.BPSK, grid(-12.0, 2.0, 0.5)),
        (Modulation.QPSK, grid(-9.0, 5.0, 0.5)),
    ],
)
def test_massive_mimo_detectors_approach_the_simo_bound(modulation, snr_db):
    rows = sweep(
        bs_antennas=128,
        users=8,
        modulation=modulation,
        snr_db=snr_db,
        t_max=[3],
        detectors=["taser", "mmse", "ml", "simo"],
    )
    bound = crossing(rows, "simo")
    assert crossing(rows, "taser", 3) - bound < 0.5
    assert crossing(rows, "mmse") - bound < 0.5
    assert crossing(rows, "ml") - bound < 0.5


@pytest.mark.parametrize("modulation", [Modulation.BPSK, Modulation.QPSK])
def test_taser_beats_mmse_on_a_square_system(modulation):
    rows = sweep(
        bs_antennas=32,
        users=32,
        modulation=modulation,
        snr_db=grid(0.0, 24.0, 2.0),
        t_max=[20],
        detectors=["taser", "mmse"],
    )
    taser = {r.snr_db: r for r in rows if r.detector == "taser"}
    checked = 0
    for mmse in (r for r in rows if r.detector == "mmse"):
        if not 1e-3 <= mmse.ver <= 0.5:
            continue
        ours = taser[mmse.snr_db]
        n = mmse.trials
        sigma = np.sqrt((mmse.ver * (1 - mmse.ver) + ours.ver * (1 - ours.ver)) / n)
        assert mmse.ver - ours.ver > 3.0 * sigma, f"no clear gain at {mmse.snr_db} dB"
        checked += 1
    assert checked > 0


def test_fixed_point_loss_is_small():
    common = {
        "bs_antennas": 128,
        "users": 8,
        "snr_db": grid(-10.0, 0.0, 0.25),
        "t_max": [3],
        "detectors": ["taser"],
    }
    floating = sweep(**common)
    fixed = sweep(arithmetic=Arithmetic.FIXED, **common)
    assert abs(crossing(fixed, "taser", 3) - crossing(floating, "taser", 3)) < 0.2


# ── Joint channel estimation and detection ────────────────────────────────────


def test_jed_gain_over_single_pilot_estimation():
    rows = sweep(
        mode=ProblemMode.JED,
        bs_antennas=16,
        users=15,
        snr_db=grid(-14.0, 4.0, 0.5),
        t_max=[20],
        detectors=["taser", "chest", "csir"],
    )
    taser = crossing(rows, "taser", 20, metric="ber")
    assert crossing(rows, "chest", metric="ber") - taser >= 2.0
    assert taser - crossing(rows, "csir", metric="ber") < 1.0
