"""Bit-accurate model of the 14-bit fixed-point TASER datapath."""
