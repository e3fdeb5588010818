"""
Command-line entry point: run one Monte-Carlo sweep and write CSV + metadata.

Example:
  detect --system 128x8 --mod bpsk --snr=-2:1:10 --tmax 3 --trials 10000 \\
         --detectors taser,mmse,ml --seed 42 --out run.csv

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path

import structlog
from pydantic import ValidationError

from taser.errors import ConfigError, TaserError
from taser.harness.output import write_results
from taser.harness.registry import Arithmetic, registered_detectors
from taser.harness.schemas import SweepConfig
from taser.harness.sweep import run_sweep
from taser.logging_config import configure_logging
from taser.metrics.collector import write_metrics
from taser.problems.models import Modulation, ProblemMode

logger = structlog.get_logger(__name__)

DEFAULT_DETECTORS = {
    ProblemMode.COHERENT: "taser,mmse",
    ProblemMode.JED: "taser,chest",
}


# ── Flag parsing ──────────────────────────────────────────────────────────────


def parse_system(text: str) -> tuple[int, int]:
    """'BxU' -> (B, U)."""
    try:
        b, u = text.lower().split("x")
        return int(b), int(u)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected BxU (e.g. 128x8), got {text!r}"
        ) from None


def parse_snr(text: str) -> list[float]:
    """'start:step:stop' (inclusive) or a comma-separated list of dB values."""
    try:
        if ":" in text:
            start, step, stop = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 10) for i in range(count)]
        return [float(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected start:step:stop or a comma list, got {text!r}"
        ) from None


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detect",
        description="Monte-Carlo error-rate sweeps of TASER and baseline detectors.",
    )
    parser.add_argument(
        "--system", type=parse_system, required=True, help="BxU, or BxK for JED"
    )
    parser.add_argument(
        "--mode",
        choices=[m.value for m in ProblemMode],
        default=ProblemMode.COHERENT.value,
    )
    parser.add_argument(
        "--mod", choices=[m.value for m in Modulation], default=Modulation.BPSK.value
    )
    parser.add_argument(
        "--snr",
        type=parse_snr,
        required=True,
        help="start:step:stop or list (dB); write --snr=-2:1:10 for negative starts",
    )
    parser.add_argument("--tmax", type=parse_int_list, default=[3])
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument(
        "--detectors",
        default=None,
        help="comma list; coherent: "
        + ",".join(registered_detectors(ProblemMode.COHERENT))
        + "; jed: "
        + ",".join(registered_detectors(ProblemMode.JED)),
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--alpha", type=float, default=0.99)
    parser.add_argument(
        "--arithmetic",
        choices=[a.value for a in Arithmetic],
        default=Arithmetic.FLOAT.value,
    )
    parser.add_argument("--out", type=Path, required=True, help="results CSV path")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument(
        "--metrics-out", type=Path, default=None, help="Prometheus text file"
    )
    parser.add_argument("--log-level", default=None)
    parser.add_argument("--log-format", choices=["console", "json"], default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    """
    Raises:
        ConfigError: the flags do not form a valid sweep
        UnknownDetector: a detector name is not registered for the mode
    """
    mode = ProblemMode(args.mode)
    detectors = args.detectors
    if detectors is None:
        detectors = DEFAULT_DETECTORS[mode]
    bs_antennas, users = args.system
    try:
        return SweepConfig(
            mode=mode,
            bs_antennas=bs_antennas,
            users=users,
            modulation=Modulation(args.mod),
            snr_db=args.snr,
            t_max=args.tmax,
            alpha=args.alpha,
            trials=args.trials,
            seed=args.seed,
            detectors=[d.strip() for d in detectors.split(",") if d.strip()],
            arithmetic=Arithmetic(args.arithmetic),
        )
    except ValidationError as exc:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        )
        raise ConfigError(f"invalid sweep configuration: {details}") from exc


# ── Entry points ──────────────────────────────────────────────────────────────


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    configure_logging(level=args.log_level, log_format=args.log_format)

    try:
        cfg = config_from_args(args)
    except TaserError as exc:
        parser.print_usage(sys.stderr)
        print(f"detect: error: {exc}", file=sys.stderr)
        return 2

    try:
        rows = run_sweep(cfg, workers=args.workers)
        write_results(rows, cfg, args.out)
    except TaserError as exc:
        logger.error("Sweep failed", error=str(exc))
        return 1
    except OSError as exc:
        logger.error("Could not write results", error=str(exc))
        return 1

    if args.metrics_out is not None:
        write_metrics(args.metrics_out)
    return 0


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
