"""
CSV and metadata output of a sweep.

The CSV holds one row per (detector, snr, t_max) cell in a fixed column
order, with floats rendered by format(x, ".10g") so that identical sweeps
produce byte-identical files. The JSON sidecar <stem>.meta.json records
what produced the CSV: the configuration, the build, the hardware cost of
every t_max and the SNR / energy conventions.
"""

import csv
import json
import subprocess
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import structlog

from taser import __version__
from taser.hardware.cost_model import cycle_model
from taser.harness.registry import problem_dimension
from taser.harness.schemas import SweepConfig, SweepRow

logger = structlog.get_logger(__name__)

CSV_COLUMNS = [
    "detector",
    "mode",
    "B",
    "U_or_K",
    "modulation",
    "arithmetic",
    "alpha",
    "t_max",
    "snr_db",
    "trials",
    "vector_errors",
    "bit_errors",
    "ver",
    "ber",
    "ci_lo",
    "ci_hi",
]

CONVENTIONS = {
    "symbols": "unit average energy (Es = 1)",
    "channel": "i.i.d. CN(0, 1) entries, flat Rayleigh (block) fading",
    "snr_coherent": "SNR = U / N0",
    "snr_jed": "SNR = 1 / N0",
    "qpsk_bits": "Gray: bit 0 = Re < 0, bit 1 = Im < 0",
    "ver": "fraction of trials with any symbol in error",
    "ci": "Wilson 95%, one-sided upper bound when no errors were observed",
    "jed_model": "Y = h s^H + N, first symbol known",
}


def _fmt(value: float) -> str:
    return format(value, ".10g")


def _csv_record(row: SweepRow) -> list[str]:
    return [
        row.detector,
        row.mode.value,
        str(row.bs_antennas),
        str(row.users),
        row.modulation.value,
        row.arithmetic.value,
        _fmt(row.alpha),
        str(row.t_max),
        _fmt(row.snr_db),
        str(row.trials),
        str(row.vector_errors),
        str(row.bit_errors),
        _fmt(row.ver),
        _fmt(row.ber),
        _fmt(row.ci_lo),
        _fmt(row.ci_hi),
    ]


def git_describe(cwd: Path | None = None) -> str:
    """`git describe --always --dirty` of the working tree, or "unknown"."""
    try:
        completed = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=cwd,
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return completed.stdout.strip() or "unknown"


def metadata(cfg: SweepConfig) -> dict[str, Any]:
    n_dim = problem_dimension(cfg.modulation, cfg.users)
    return {
        "version": __version__,
        "created_at": datetime.now(tz=timezone.utc).isoformat(),
        "git_describe": git_describe(),
        "config": cfg.model_dump(mode="json"),
        "problem_dimension": n_dim,
        "cost_model": {
            str(t): cycle_model(n_dim, t).to_dict() for t in sorted(set(cfg.t_max))
        },
        "conventions": CONVENTIONS,
    }


def write_results(
    rows: list[SweepRow], cfg: SweepConfig, out_path: Path
) -> tuple[Path, Path]:
    """
    Write the CSV and its metadata sidecar.

    Returns:
        (csv path, metadata path)
    """
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(_csv_record(row))

    meta_path = out_path.with_name(f"{out_path.stem}.meta.json")
    meta_path.write_text(
        json.dumps(metadata(cfg), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    logger.info("Results written", csv=str(out_path), meta=str(meta_path))
    return out_path, meta_path


def read_rows(path: Path) -> list[dict[str, str]]:
    """Read a results CSV back as string records."""
    with path.open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
