#!/usr/bin/env python3
"""
Desk-scale error-rate experiments for TASER and the baseline detectors.

Runs four sweeps and prints, per detector, the SNR at which the error rate
crosses 1%:
1. Square system (16x16 BPSK): TASER vs ML
2. Massive MIMO (128x8, BPSK and QPSK): TASER, MMSE, ML and the SIMO bound
3. Fixed-point loss (128x8 BPSK): float vs bit-accurate TASER
4. JED (16x15 BPSK bursts): TASER vs single-pilot CHEST and perfect CSIR

Run:
    PYTHONPATH=. python benchmarks/figures.py
    FIGURE_TRIALS=2000 PYTHONPATH=. python benchmarks/figures.py   # quick look
"""

import os
import time
from typing import Literal

from taser.harness.registry import Arithmetic
from taser.harness.schemas import SweepConfig, SweepRow
from taser.harness.stats import snr_at_error_rate
from taser.harness.sweep import run_sweep
from taser.logging_config import configure_logging
from taser.problems.models import Modulation, ProblemMode

TRIALS = int(os.getenv("FIGURE_TRIALS", "10000"))
TARGET = 0.01
SEED = 2016


def grid(start: float, stop: float, step: float) -> list[float]:
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 6) for i in range(count)]


Metric = Literal["ver", "ber"]


def crossings(name: str, rows: list[SweepRow], metric: Metric = "ver") -> dict:
    """Collect the 1% crossing of every (detector, t_max) curve in a sweep."""
    curves: dict[str, list[SweepRow]] = {}
    for row in rows:
        label = row.detector if row.t_max == 0 else f"{row.detector} t={row.t_max}"
        if row.arithmetic == Arithmetic.FIXED:
            label += " (fixed)"
        curves.setdefault(label, []).append(row)
    return {
        "name": name,
        "metric": metric,
        "crossings": {
            label: snr_at_error_rate(curve, target=TARGET, metric=metric)
            for label, curve in curves.items()
        },
    }


def run(name: str, metric: Metric = "ver", **params) -> dict:
    params.setdefault("trials", TRIALS)
    params.setdefault("seed", SEED)
    cfg = SweepConfig(**params)
    start = time.perf_counter()
    rows = run_sweep(cfg)
    result = crossings(name, rows, metric)
    result["wall_time_sec"] = round(time.perf_counter() - start, 1)
    return result


def main() -> None:
    configure_logging(level=os.getenv("LOG_LEVEL", "WARNING"))

    results = [
        run(
            "Square 16x16 BPSK",
            bs_antennas=16,
            users=16,
            snr_db=grid(0.0, 20.0, 1.0),
            t_max=[5, 20],
            detectors=["taser", "ml", "mmse"],
        ),
        run(
            "Massive MIMO 128x8 BPSK",
            bs_antennas=128,
            users=8,
            snr_db=grid(-12.0, 2.0, 0.5),
            t_max=[1, 3],
            detectors=["taser", "mmse", "ml", "simo"],
        ),
        run(
            "Massive MIMO 128x8 QPSK",
            bs_antennas=128,
            users=8,
            modulation=Modulation.QPSK,
            snr_db=grid(-9.0, 5.0, 0.5),
            t_max=[1, 3],
            detectors=["taser", "mmse", "ml", "simo"],
        ),
    ]

    fixed = run(
        "Fixed-point 128x8 BPSK",
        bs_antennas=128,
        users=8,
        snr_db=grid(-10.0, 0.0, 0.25),
        t_max=[3],
        detectors=["taser"],
        arithmetic=Arithmetic.FIXED,
    )
    floating = run(
        "Float 128x8 BPSK",
        bs_antennas=128,
        users=8,
        snr_db=grid(-10.0, 0.0, 0.25),
        t_max=[3],
        detectors=["taser"],
    )
    fixed["crossings"].update(floating["crossings"])
    fixed["wall_time_sec"] += floating["wall_time_sec"]
    results.append(fixed)

    results.append(
        run(
            "JED 16x15 BPSK",
            metric="ber",
            mode=ProblemMode.JED,
            bs_antennas=16,
            users=15,
            snr_db=grid(-14.0, 4.0, 0.5),
            t_max=[5, 20],
            detectors=["taser", "chest", "csir"],
        )
    )

    print("\n" + "=" * 60)
    print(f"1% CROSSINGS ({TRIALS} trials per point)")
    print("=" * 60)
    for result in results:
        print(f"\n{result['name']}  [{result['metric']}, {result['wall_time_sec']}s]")
        for label, snr in sorted(result["crossings"].items()):
            value = "not reached" if snr is None else f"{snr:6.2f} dB"
            print(f"  {label:<22}: {value}")
    print()


if __name__ == "__main__":
    main()
