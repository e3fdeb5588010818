"""
Inverse-square-root look-up table.

The table has 2^11 words in (14,13) format. An input is first normalised by
an even power of two 2^e into [1, 4) (leading-one detection), held as an
unsigned (14,12) word, and the top 11 bits of that word form the address.
The table output approximates 1/sqrt of the normalised value; the caller
undoes the normalisation with a shift by e/2.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from taser.errors import DomainError
from taser.fixed_point.qformat import (
    FxValue,
    QFormat,
    round_shift,
    saturate,
)

ADDRESS_BITS = 11
INPUT_FORMAT = QFormat(14, 12, signed=False)
OUTPUT_FORMAT = QFormat(14, 13)


@dataclass(frozen=True)
class InvSqrtLut:
    """
    Attributes:
        table: 2048 raw output words, non-increasing in the address
        input_format: format of the normalised input word
        output_format: format of the table words
    """

    table: NDArray[np.int64]
    input_format: QFormat = INPUT_FORMAT
    output_format: QFormat = OUTPUT_FORMAT

    @property
    def index_shift(self) -> int:
        """Low input bits dropped when forming the address."""
        return self.input_format.total_bits - ADDRESS_BITS

    @classmethod
    def build(
        cls,
        input_format: QFormat = INPUT_FORMAT,
        output_format: QFormat = OUTPUT_FORMAT,
    ) -> "InvSqrtLut":
        """Entries are round(2^13 / sqrt(cell midpoint)), saturated."""
        shift = input_format.total_bits - ADDRESS_BITS
        addresses = np.arange(1 << ADDRESS_BITS, dtype=float)
        midpoints = (addresses + 0.5) * 2.0 ** (shift - input_format.frac_bits)
        words = np.rint((1 << output_format.frac_bits) / np.sqrt(midpoints))
        table = saturate(words, output_format)
        return cls(table=table, input_format=input_format, output_format=output_format)

    def normalize(
        self, x_raw: ArrayLike, frac_bits: int
    ) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
        """
        Split positive raw values into table addresses and half exponents.

        Returns (address, h) such that x ~ m * 4^h with m the normalised
        value addressed by `address`.

        Raises:
            DomainError: any x <= 0
        """
        x_raw = np.asarray(x_raw, dtype=np.int64)
        if np.any(x_raw <= 0):
            raise DomainError("inverse square root needs a positive argument")
        _, exponent = np.frexp(x_raw.astype(float))
        value_exponent = exponent.astype(np.int64) - frac_bits
        half = (value_exponent - 1) // 2
        shift = frac_bits - self.input_format.frac_bits + 2 * half
        m_raw = np.where(
            shift >= 0,
            x_raw >> np.maximum(shift, 0),
            x_raw << np.maximum(-shift, 0),
        )
        return m_raw >> self.index_shift, half

    def lookup(self, addresses: ArrayLike) -> NDArray[np.int64]:
        return self.table[np.asarray(addresses, dtype=np.int64)]


def inv_sqrt_lookup(x: FxValue, lut: InvSqrtLut) -> FxValue:
    """
    Table approximation of 1/sqrt(x).

    For x >= 1 the result is shifted back into the (14,13) output format. For
    x < 1 the table word is kept and the binary point moves left by the
    normalisation shift instead, so the result does not saturate.

    Raises:
        DomainError: x <= 0
    """
    if x.raw <= 0:
        raise DomainError(f"inverse square root of non-positive value {x.value}")
    address, half = lut.normalize(x.raw, x.format.frac_bits)
    word = int(lut.lookup(address))
    h = int(half)
    out = lut.output_format
    if h >= 0:
        return FxValue(int(round_shift(word, h)), out)
    frac = max(out.frac_bits + h, 0)
    fmt = QFormat(out.total_bits, frac, out.signed)
    raw = round_shift(word, -(frac - out.frac_bits - h))
    return FxValue(int(saturate(raw, fmt)), fmt)


def export_lut_hex(lut: InvSqrtLut, path: Path) -> Path:
    """Write one 4-digit hex word per line, address order."""
    mask = (1 << lut.output_format.total_bits) - 1
    lines = [f"{int(word) & mask:04x}" for word in lut.table]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
