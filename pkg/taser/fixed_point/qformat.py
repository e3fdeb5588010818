"""
Q-format fixed-point primitives.

Raw values are plain Python / numpy int64 integers holding the two's-complement
(or unsigned) word; the real value is raw * 2^-frac_bits. Every conversion
rounds to nearest with ties to even and saturates at the format bounds, so a
raw value never wraps.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from taser.errors import DomainError

WORD_BITS = 14


class RoundingMode(Enum):
    """Rounding applied when a value is narrowed to fewer fraction bits."""

    ROUND_NEAREST_EVEN = "round_nearest_even"


@dataclass(frozen=True)
class QFormat:
    """
    Fixed-point word layout.

    Attributes:
        total_bits: word width including the sign bit
        frac_bits: bits to the right of the binary point
        signed: two's complement when True, unsigned otherwise
    """

    total_bits: int = WORD_BITS
    frac_bits: int = 8
    signed: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.frac_bits < self.total_bits <= 32:
            raise ValueError(
                f"need 0 <= frac_bits < total_bits <= 32, got "
                f"({self.total_bits}, {self.frac_bits})"
            )

    @property
    def min_raw(self) -> int:
        return -(1 << (self.total_bits - 1)) if self.signed else 0

    @property
    def max_raw(self) -> int:
        if self.signed:
            return (1 << (self.total_bits - 1)) - 1
        return (1 << self.total_bits) - 1

    @property
    def lsb(self) -> float:
        return 2.0 ** -self.frac_bits

    def __str__(self) -> str:
        prefix = "" if self.signed else "u"
        return f"{prefix}({self.total_bits},{self.frac_bits})"


@dataclass(frozen=True)
class FxValue:
    """
    One fixed-point number.

    Attributes:
        raw: integer word
        format: layout the word is interpreted in
    """

    raw: int
    format: QFormat

    def __post_init__(self) -> None:
        if not self.format.min_raw <= self.raw <= self.format.max_raw:
            raise DomainError(f"raw value {self.raw} does not fit {self.format}")

    @property
    def value(self) -> float:
        return self.raw * self.format.lsb


def saturate(raw: ArrayLike, fmt: QFormat) -> NDArray[np.int64]:
    return np.clip(np.asarray(raw, dtype=np.int64), fmt.min_raw, fmt.max_raw)


def round_shift(x: ArrayLike, shift: ArrayLike) -> NDArray[np.int64]:
    """
    x * 2^-shift rounded to nearest, ties to even, on integers.

    Negative shifts are exact left shifts. Shifts may be per-element arrays.
    """
    x = np.asarray(x, dtype=np.int64)
    shift = np.asarray(shift, dtype=np.int64)
    right = np.maximum(shift, 0)
    left = np.maximum(-shift, 0)
    q = x >> right
    remainder = x - (q << right)
    half = (np.int64(1) << right) >> 1
    up = (right > 0) & ((remainder > half) | ((remainder == half) & ((q & 1) == 1)))
    return (q + up.astype(np.int64)) << left


def fx_quantize_array(
    x: ArrayLike,
    fmt: QFormat,
    mode: RoundingMode = RoundingMode.ROUND_NEAREST_EVEN,
) -> NDArray[np.int64]:
    """Quantise real values to raw words (np.rint rounds half to even)."""
    assert mode is RoundingMode.ROUND_NEAREST_EVEN
    scaled = np.rint(np.asarray(x, dtype=float) * (1 << fmt.frac_bits))
    bounded = np.clip(scaled, fmt.min_raw, fmt.max_raw)
    return bounded.astype(np.int64)


def fx_dequantize_array(raw: ArrayLike, fmt: QFormat) -> NDArray[np.float64]:
    return np.asarray(raw, dtype=float) * fmt.lsb


def fx_quantize(
    x: float,
    fmt: QFormat,
    mode: RoundingMode = RoundingMode.ROUND_NEAREST_EVEN,
) -> FxValue:
    """
    Nearest representable value of x in fmt, saturating at the bounds.

    Example:
        fx_quantize(0.5, QFormat(14, 8)).raw == 128
    """
    return FxValue(int(fx_quantize_array(x, fmt, mode)), fmt)


def fx_mac(acc: FxValue, a: FxValue, b: FxValue) -> FxValue:
    """
    acc - a * b in acc's format.

    The product is formed at full width, rounded once into acc's fraction
    bits, subtracted and saturated.
    """
    product = a.raw * b.raw
    shift = a.format.frac_bits + b.format.frac_bits - acc.format.frac_bits
    aligned = int(round_shift(product, shift))
    return FxValue(int(saturate(acc.raw - aligned, acc.format)), acc.format)
