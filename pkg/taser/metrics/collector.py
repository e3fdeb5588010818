"""
Prometheus metrics for Monte-Carlo sweeps.

Exposes:
  detection_trials_total          counter, labels: detector, mode
  detection_vector_errors_total   counter, labels: detector, mode
  detection_bit_errors_total      counter, labels: detector, mode
  sweep_cell_seconds              histogram, labels: mode
  sweep_active_workers            gauge

Batch runs dump the default registry with --metrics-out.
"""

from pathlib import Path

from prometheus_client import REGISTRY, Counter, Gauge, Histogram, write_to_textfile

# ── Counters ──────────────────────────────────────────────────────────────────

detection_trials = Counter(
    "detection_trials_total",
    "Detection trials run",
    ["detector", "mode"],
)

vector_errors = Counter(
    "detection_vector_errors_total",
    "Trials whose detected symbol vector differs from the transmitted one",
    ["detector", "mode"],
)

bit_errors = Counter(
    "detection_bit_errors_total",
    "Bit errors after Gray demapping",
    ["detector", "mode"],
)

# ── Histograms ────────────────────────────────────────────────────────────────

cell_seconds = Histogram(
    "sweep_cell_seconds",
    "Wall time of one (snr, detector set) sweep cell",
    ["mode"],
    buckets=[0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 30.0, 60.0, 300.0],
)

# ── Gauges ────────────────────────────────────────────────────────────────────

active_workers = Gauge(
    "sweep_active_workers",
    "Worker threads currently running trial chunks",
)


def write_metrics(path: Path) -> None:
    """Write the default registry in the text exposition format."""
    write_to_textfile(str(path), REGISTRY)
