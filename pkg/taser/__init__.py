"""TASER data detection: triangular approximate SDR for large MIMO/SIMO systems."""

__version__ = "0.1.0"
