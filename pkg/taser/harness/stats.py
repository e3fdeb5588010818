"""
Error-rate statistics: Wilson score intervals and SNR crossing points.
"""

from collections.abc import Sequence
from typing import Literal

import numpy as np
from scipy.stats import norm

from taser.harness.schemas import SweepRow


def wilson_interval(
    errors: int, trials: int, confidence: float = 0.95
) -> tuple[float, float]:
    """
    Wilson score interval for a binomial proportion.

    With zero observed errors the interval is one-sided: [0, upper] at the
    given confidence.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= errors <= trials:
        raise ValueError(f"errors must lie in [0, {trials}], got {errors}")
    if errors == 0:
        z = float(norm.ppf(confidence))
        return 0.0, z * z / (trials + z * z)

    z = float(norm.ppf(1.0 - (1.0 - confidence) / 2.0))
    p = errors / trials
    z2n = z * z / trials
    centre = (p + z2n / 2.0) / (1.0 + z2n)
    spread = np.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials))
    half_width = z * spread / (1.0 + z2n)
    return max(0.0, centre - half_width), min(1.0, centre + half_width)


def snr_at_error_rate(
    rows: Sequence[SweepRow],
    target: float = 0.01,
    metric: Literal["ver", "ber"] = "ver",
) -> float | None:
    """
    SNR at which one error-rate curve first drops to `target`.

    Interpolates log10(rate) linearly between neighbouring SNR points. Rows
    must belong to a single curve (one detector and t_max). Returns None when
    the curve never crosses the target. A crossing onto a zero-error point
    returns that point's SNR.
    """
    curve = sorted(rows, key=lambda r: r.snr_db)
    points = [(r.snr_db, getattr(r, metric)) for r in curve]
    for (snr_a, rate_a), (snr_b, rate_b) in zip(points, points[1:]):
        if rate_a == target:
            return snr_a
        if rate_a > target >= rate_b:
            if rate_b <= 0.0:
                return snr_b
            log_a, log_b = np.log10(rate_a), np.log10(rate_b)
            frac = (np.log10(target) - log_a) / (log_b - log_a)
            return float(snr_a + frac * (snr_b - snr_a))
    if points and points[-1][1] == target:
        return points[-1][0]
    return None
