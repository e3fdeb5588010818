"""Cycle, multiplication and throughput model of the systolic array."""
