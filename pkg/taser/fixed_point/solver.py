"""
Bit-accurate fixed-point TASER.

Word formats (14-bit words throughout):

  T_hat = 2 tau sigma T_tilde     (14,11)
  D, L and V rows 1..N-1          (14,8)
  L and V bottom row              (14,7)
  L_NN (constant register)        (14,5)
  column scale D_kk / ||v_k||     (14,11)
  squared column norms            full width, 16 fraction bits
  inverse square root             LUT, (14,13)

D is first scaled by a power of two so that max_{k<N} D_kk lies in (2, 4];
the last-row signs do not depend on a global positive scale of D.
"""

import numpy as np
from numpy.typing import NDArray

from taser.engine.solver import TaserConfig
from taser.errors import DimensionMismatch
from taser.fixed_point.lut import InvSqrtLut
from taser.fixed_point.qformat import (
    QFormat,
    fx_quantize,
    fx_quantize_array,
    round_shift,
    saturate,
)
from taser.problems.models import PrecondProblem

MAX_DIM = 65
T_HAT_FORMAT = QFormat(14, 11)
D_FORMAT = QFormat(14, 8)
ROW_FORMAT = QFormat(14, 8)
BOTTOM_ROW_FORMAT = QFormat(14, 7)
CORNER_FORMAT = QFormat(14, 5)
SCALE_FORMAT = QFormat(14, 11)
NORM_FRAC_BITS = 16

_DEFAULT_LUT = InvSqrtLut.build()


def _row_frac_bits(n_dim: int) -> NDArray[np.int64]:
    frac = np.full(n_dim, ROW_FORMAT.frac_bits, dtype=np.int64)
    frac[-1] = BOTTOM_ROW_FORMAT.frac_bits
    return frac


def _saturate_rows(raw: NDArray[np.int64]) -> NDArray[np.int64]:
    out = saturate(raw, ROW_FORMAT)
    out[-1] = saturate(raw[-1], BOTTOM_ROW_FORMAT)
    return out


def _corner_operand(corner_raw: int) -> int:
    """L_NN aligned from (14,5) to the bottom-row fraction bits."""
    return corner_raw << (BOTTOM_ROW_FORMAT.frac_bits - CORNER_FORMAT.frac_bits)


def normalize_diagonal(d_diag: NDArray[np.float64]) -> NDArray[np.float64]:
    """Scale D by a power of two so that max_{k<N} D_kk lies in (2, 4]."""
    peak = float(np.max(d_diag[:-1]))
    mantissa, exponent = np.frexp(peak)
    k = 3 - int(exponent) if mantissa == 0.5 else 2 - int(exponent)
    return np.ldexp(d_diag, k)


def fx_gradient_step(
    l_raw: NDArray[np.int64], t_hat_raw: NDArray[np.int64]
) -> NDArray[np.int64]:
    """
    V = L - tril(L T_hat) on raw words.

    Each row keeps its own fraction bits; the dot products are accumulated at
    full width and rounded once. The bottom row of l_raw must carry L_NN
    aligned to (14,7).
    """
    if l_raw.shape != t_hat_raw.shape:
        raise DimensionMismatch(
            f"factor {l_raw.shape} does not match T_hat {t_hat_raw.shape}"
        )
    t_frac = T_HAT_FORMAT.frac_bits
    product = l_raw @ t_hat_raw
    v_raw = round_shift((l_raw << t_frac) - product, t_frac)
    return _saturate_rows(np.tril(v_raw))


def fx_prox_step(
    v_raw: NDArray[np.int64],
    d_raw: NDArray[np.int64],
    corner_raw: int,
    lut: InvSqrtLut = _DEFAULT_LUT,
) -> NDArray[np.int64]:
    """
    Rescale columns 1..N-1 of V to norm D_kk through the LUT; column N is the
    constant L_NN register.

    Raises:
        DomainError: a column of V is exactly zero
    """
    n = v_raw.shape[0]
    align = NORM_FRAC_BITS - 2 * _row_frac_bits(n)
    squares = (v_raw[:, : n - 1] ** 2) << align[:, None]
    norms_sq = np.sum(squares, axis=0)

    addresses, half = lut.normalize(norms_sq, NORM_FRAC_BITS)
    inv_sqrt = lut.lookup(addresses)
    product_frac = D_FORMAT.frac_bits + lut.output_format.frac_bits
    scale_shift = product_frac - SCALE_FORMAT.frac_bits + half
    scale = saturate(round_shift(d_raw[: n - 1] * inv_sqrt, scale_shift), SCALE_FORMAT)

    l_raw = np.zeros_like(v_raw)
    l_raw[:, : n - 1] = round_shift(
        v_raw[:, : n - 1] * scale[None, :], SCALE_FORMAT.frac_bits
    )
    l_raw = _saturate_rows(np.tril(l_raw))
    l_raw[-1, -1] = _corner_operand(corner_raw)
    return l_raw


def taser_solve_fx(
    pre: PrecondProblem,
    cfg: TaserConfig,
    lut: InvSqrtLut = _DEFAULT_LUT,
) -> NDArray[np.int64]:
    """
    Run cfg.t_max fixed-point iterations and return the last-row signs.

    Raises:
        DimensionMismatch: N > 65
        DomainError: a column norm vanished in fixed point
    """
    n = pre.n_dim
    if n > MAX_DIM:
        raise DimensionMismatch(f"fixed-point model supports N <= {MAX_DIM}, got {n}")

    d_scaled = normalize_diagonal(pre.d_diag)
    d_raw = fx_quantize_array(d_scaled, D_FORMAT)
    corner_raw = fx_quantize(float(d_scaled[-1]), CORNER_FORMAT).raw
    t_hat_raw = fx_quantize_array(pre.scaled_matrix(), T_HAT_FORMAT)

    l_raw = np.diag(d_raw)
    l_raw[-1, -1] = _corner_operand(corner_raw)
    for _ in range(cfg.t_max):
        v_raw = fx_gradient_step(l_raw, t_hat_raw)
        l_raw = fx_prox_step(v_raw, d_raw, corner_raw, lut)

    return np.where(l_raw[-1, : n - 1] >= 0, 1, -1).astype(np.int64)
