"""
Monte-Carlo sweep engine.

For every SNR point the configured number of trials is split into
fixed-size chunks that run on a thread pool. Each chunk draws its trials from
its own RNG substream, derived from the sweep seed, the system coordinates,
the SNR point and the chunk index, so:
  - all detectors and t_max values at one SNR see the same realisations
  - results do not depend on the number of workers
  - identical configurations give identical rows

Worker count: explicit argument, else TASER_WORKERS, else min(8, cpu_count).
"""

import hashlib
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import structlog

from taser.errors import TaserError, TrialError
from taser.harness.channel import (
    Trial,
    draw_coherent_trial,
    draw_jed_trial,
    snr_to_n0,
)
from taser.harness.registry import (
    DetectorSpec,
    TrialParams,
    count_errors,
    get_detector,
)
from taser.harness.schemas import SweepConfig, SweepRow
from taser.harness.stats import wilson_interval
from taser.metrics.collector import (
    active_workers,
    bit_errors,
    cell_seconds,
    detection_trials,
    vector_errors,
)
from taser.problems.models import ProblemMode, constellation_for

logger = structlog.get_logger(__name__)

CHUNK_TRIALS = 256
MAX_DEFAULT_WORKERS = 8

CellKey = tuple[str, int]  # (detector, t_max)


@dataclass
class CellCounts:
    trials: int = 0
    vector_errors: int = 0
    bit_errors: int = 0

    def merge(self, other: "CellCounts") -> None:
        self.trials += other.trials
        self.vector_errors += other.vector_errors
        self.bit_errors += other.bit_errors


def resolve_workers(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.getenv("TASER_WORKERS")
    if env:
        return max(1, int(env))
    return min(MAX_DEFAULT_WORKERS, os.cpu_count() or 1)


def substream(cfg: SweepConfig, snr_db: float, chunk: int) -> np.random.Generator:
    """Generator for one chunk of one SNR point."""
    coordinates = (
        f"{cfg.mode.value}|{cfg.bs_antennas}|{cfg.users}|"
        f"{cfg.modulation.value}|{snr_db!r}"
    )
    digest = hashlib.sha256(coordinates.encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "little")
    seed_seq = np.random.SeedSequence(cfg.seed, spawn_key=(key, chunk))
    return np.random.default_rng(seed_seq)


def _draw(cfg: SweepConfig, n0: float, rng: np.random.Generator) -> Trial:
    constellation = constellation_for(cfg.modulation)
    if cfg.mode == ProblemMode.COHERENT:
        return draw_coherent_trial(cfg.bs_antennas, cfg.users, constellation, n0, rng)
    return draw_jed_trial(cfg.bs_antennas, cfg.users, constellation, n0, rng)


def _run_chunk(
    cfg: SweepConfig,
    detectors: list[DetectorSpec],
    snr_db: float,
    chunk: int,
) -> dict[CellKey, CellCounts]:
    rng = substream(cfg, snr_db, chunk)
    n0 = snr_to_n0(snr_db, cfg.mode, cfg.users)
    first = chunk * CHUNK_TRIALS
    size = min(CHUNK_TRIALS, cfg.trials - first)
    counts: dict[CellKey, CellCounts] = {}

    active_workers.inc()
    try:
        for offset in range(size):
            trial = _draw(cfg, n0, rng)
            for spec in detectors:
                for t_max in cfg.t_max if spec.iterative else [0]:
                    params = TrialParams(t_max, cfg.alpha, cfg.arithmetic)
                    try:
                        result = spec.run(trial, params)
                    except TaserError as exc:
                        raise TrialError(
                            exc.message,
                            detector=spec.name,
                            trial_index=first + offset,
                            snr_db=snr_db,
                        ) from exc
                    wrong, bits = count_errors(
                        result, trial.true_symbols, cfg.modulation
                    )
                    cell = counts.setdefault((spec.name, t_max), CellCounts())
                    cell.merge(CellCounts(1, int(wrong), bits))
    finally:
        active_workers.dec()
    return counts


def _make_row(
    cfg: SweepConfig, key: CellKey, snr_db: float, c: CellCounts
) -> SweepRow:
    assert c.bit_errors <= c.vector_errors * cfg.bits_per_vector
    ci_lo, ci_hi = wilson_interval(c.vector_errors, c.trials)
    return SweepRow(
        detector=key[0],
        mode=cfg.mode,
        bs_antennas=cfg.bs_antennas,
        users=cfg.users,
        modulation=cfg.modulation,
        arithmetic=cfg.arithmetic,
        alpha=cfg.alpha,
        t_max=key[1],
        snr_db=snr_db,
        trials=c.trials,
        vector_errors=c.vector_errors,
        bit_errors=c.bit_errors,
        ver=c.vector_errors / c.trials,
        ber=c.bit_errors / (c.trials * cfg.bits_per_vector),
        ci_lo=ci_lo,
        ci_hi=ci_hi,
    )


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> list[SweepRow]:
    """
    Run every (detector, snr, t_max) cell of the configuration.

    Returns rows sorted by (detector, snr_db, t_max).

    Raises:
        UnknownDetector: a detector is not registered for the mode
        TrialError: a detector failed; carries the detector, SNR and trial index
    """
    detectors = [get_detector(name, cfg.mode) for name in cfg.detectors]
    n_chunks = -(-cfg.trials // CHUNK_TRIALS)
    pool_size = resolve_workers(workers)
    rows: list[SweepRow] = []

    with structlog.contextvars.bound_contextvars(
        mode=cfg.mode.value, system=cfg.system_label
    ):
        logger.info(
            "Sweep started",
            detectors=cfg.detectors,
            snr_points=len(cfg.snr_db),
            trials=cfg.trials,
            workers=pool_size,
        )
        with ThreadPoolExecutor(max_workers=pool_size) as pool:
            for snr_db in cfg.snr_db:
                started = time.perf_counter()
                futures = [
                    pool.submit(_run_chunk, cfg, detectors, snr_db, chunk)
                    for chunk in range(n_chunks)
                ]
                totals: dict[CellKey, CellCounts] = {}
                for chunk, future in enumerate(futures):
                    for key, counts in future.result().items():
                        totals.setdefault(key, CellCounts()).merge(counts)
                    logger.debug("Chunk finished", snr_db=snr_db, chunk=chunk)
                cell_seconds.labels(mode=cfg.mode.value).observe(
                    time.perf_counter() - started
                )

                for key in sorted(totals):
                    row = _make_row(cfg, key, snr_db, totals[key])
                    rows.append(row)
                    _record(row)
                    logger.info(
                        "Cell finished",
                        detector=row.detector,
                        snr_db=row.snr_db,
                        t_max=row.t_max,
                        ver=row.ver,
                        ber=row.ber,
                        trials=row.trials,
                    )

    rows.sort(key=lambda r: (r.detector, r.snr_db, r.t_max))
    logger.info("Sweep finished", rows=len(rows))
    return rows


def _record(row: SweepRow) -> None:
    labels = {"detector": row.detector, "mode": row.mode.value}
    detection_trials.labels(**labels).inc(row.trials)
    vector_errors.labels(**labels).inc(row.vector_errors)
    bit_errors.labels(**labels).inc(row.bit_errors)
