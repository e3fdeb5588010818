"""
Tests for the fixed-point primitives, the inverse-square-root LUT and the
bit-accurate solver.
"""

import numpy as np
import pytest

from taser.engine.solver import TaserConfig, solve
from taser.errors import DimensionMismatch, DomainError
from taser.fixed_point.lut import InvSqrtLut, export_lut_hex, inv_sqrt_lookup
from taser.fixed_point.qformat import (
    FxValue,
    QFormat,
    fx_dequantize_array,
    fx_mac,
    fx_quantize,
    fx_quantize_array,
    round_shift,
)
from taser.fixed_point.solver import (
    CORNER_FORMAT,
    D_FORMAT,
    T_HAT_FORMAT,
    fx_gradient_step,
    fx_prox_step,
    normalize_diagonal,
    taser_solve_fx,
)
from taser.harness.channel import snr_to_n0
from taser.problems.builder import build_coherent_problem, jacobi_precondition
from taser.problems.models import BPSK, CoherentInstance, PrecondProblem, ProblemMode
from taser.tests.conftest import make_coherent

Q14_8 = QFormat(14, 8)
Q14_11 = QFormat(14, 11)


@pytest.fixture(scope="module")
def lut() -> InvSqrtLut:
    return InvSqrtLut.build()


# ── Q formats ─────────────────────────────────────────────────────────────────


def test_format_bounds():
    assert Q14_8.min_raw == -8192
    assert Q14_8.max_raw == 8191
    assert QFormat(14, 12, signed=False).max_raw == 16383
    assert str(QFormat(14, 12, signed=False)) == "u(14,12)"


@pytest.mark.parametrize("total_bits, frac_bits", [(14, 14), (14, -1), (40, 8)])
def test_invalid_formats_are_rejected(total_bits, frac_bits):
    with pytest.raises(ValueError):
        QFormat(total_bits, frac_bits)


def test_quantize_half():
    assert fx_quantize(0.5, Q14_8).raw == 128


def test_quantize_saturates():
    assert fx_quantize(100.0, Q14_8).raw == 8191
    assert fx_quantize(-100.0, Q14_8).raw == -8192


def test_quantize_error_is_at_most_half_an_lsb(rng):
    x = rng.uniform(-31.0, 31.0, 1000)
    back = fx_dequantize_array(fx_quantize_array(x, Q14_8), Q14_8)
    assert np.max(np.abs(back - x)) <= Q14_8.lsb / 2


def test_value_outside_format_is_a_domain_error():
    with pytest.raises(DomainError):
        FxValue(8192, Q14_8)


def test_round_shift_ties_to_even():
    assert list(round_shift([3, 5, -3, -5, 7], 1)) == [2, 2, -2, -2, 4]
    assert int(round_shift(3, -2)) == 12
    assert int(round_shift(5, 0)) == 5


def test_mac_subtracts_the_product():
    acc = FxValue(0, Q14_8)
    one = fx_quantize(1.0, Q14_8)
    one_t = fx_quantize(1.0, Q14_11)
    assert fx_mac(acc, one, one_t).value == -1.0


def test_mac_with_zero_factor_keeps_the_accumulator():
    acc = fx_quantize(3.25, Q14_8)
    assert fx_mac(acc, FxValue(0, Q14_8), fx_quantize(0.7, Q14_11)) == acc


def test_mac_is_within_half_an_lsb_of_real_arithmetic(rng):
    for _ in range(500):
        acc = fx_quantize(rng.uniform(-8, 8), Q14_8)
        a = fx_quantize(rng.uniform(-4, 4), Q14_8)
        b = fx_quantize(rng.uniform(-3.9, 3.9), Q14_11)
        exact = acc.value - a.value * b.value
        assert abs(fx_mac(acc, a, b).value - exact) <= Q14_8.lsb / 2


def test_mac_saturates():
    acc = fx_quantize(-31.0, Q14_8)
    a = fx_quantize(31.0, Q14_8)
    b = fx_quantize(3.0, Q14_11)
    assert fx_mac(acc, a, b).raw == Q14_8.min_raw


# ── Inverse square root LUT ───────────────────────────────────────────────────


def test_lut_has_2048_non_increasing_words(lut):
    assert lut.table.shape == (2048,)
    assert np.all(np.diff(lut.table) <= 0)
    assert np.all(lut.table <= lut.output_format.max_raw)


def test_lut_relative_error_over_the_addressed_range(lut):
    # normalised inputs lie in [1, 4), i.e. addresses 512..2047
    cell = 2.0 ** (lut.index_shift - lut.input_format.frac_bits)
    worst = 0.0
    for address in range(512, 2048):
        approx = lut.table[address] * lut.output_format.lsb
        for x in (address * cell, (address + 1) * cell):
            worst = max(worst, abs(approx * np.sqrt(x) - 1.0))
    assert worst < 2.0**-9


def test_lookup_of_one_and_four(lut):
    one = inv_sqrt_lookup(fx_quantize(1.0, Q14_8), lut)
    four = inv_sqrt_lookup(fx_quantize(4.0, Q14_8), lut)
    assert one.value == pytest.approx(1.0, abs=2.0**-9)
    assert four.value == pytest.approx(0.5, abs=2.0**-9)


def test_lookup_below_one_moves_the_binary_point(lut):
    result = inv_sqrt_lookup(fx_quantize(0.25, Q14_8), lut)
    assert result.value == pytest.approx(2.0, rel=2.0**-9)


def test_lookup_across_the_input_range(lut):
    for x in (0.02, 0.3, 1.7, 9.0, 30.0):
        result = inv_sqrt_lookup(fx_quantize(x, Q14_8), lut)
        quantized = fx_quantize(x, Q14_8).value
        assert result.value == pytest.approx(1.0 / np.sqrt(quantized), rel=2.0**-8)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_lookup_rejects_non_positive_input(lut, x):
    with pytest.raises(DomainError):
        inv_sqrt_lookup(fx_quantize(x, Q14_8), lut)


def test_lut_hex_export(lut, tmp_path):
    path = export_lut_hex(lut, tmp_path / "inv_sqrt.hex")
    lines = path.read_text().splitlines()
    assert len(lines) == 2048
    assert all(len(line) == 4 for line in lines)
    assert [int(line, 16) for line in lines] == [int(w) for w in lut.table]


# ── Fixed-point solver ────────────────────────────────────────────────────────


def test_diagonal_is_normalised_into_two_to_four(rng):
    for scale in (1e-3, 0.7, 1.0, 5.0, 1e4):
        d = normalize_diagonal(scale * rng.uniform(0.1, 1.0, 6))
        assert 2.0 < np.max(d[:-1]) <= 4.0
    assert np.max(normalize_diagonal(np.array([1.0, 1.0]))[:-1]) == 4.0


def test_scalar_problem_recovers_the_transmitted_sign():
    inst = CoherentInstance(
        y=np.array([1.0 + 0j]), h=np.array([[1.0 + 0j]]), constellation=BPSK, n0=0.0
    )
    pre = jacobi_precondition(build_coherent_problem(inst), alpha=0.99)
    assert list(taser_solve_fx(pre, TaserConfig(t_max=3))) == [1]


def test_prox_column_norms_match_the_diagonal(rng, lut):
    inst, _ = make_coherent(rng, bs_antennas=16, users=6)
    pre = jacobi_precondition(build_coherent_problem(inst), alpha=0.99)
    n = pre.n_dim
    d_scaled = normalize_diagonal(pre.d_diag)
    d_raw = fx_quantize_array(d_scaled, D_FORMAT)
    corner_raw = fx_quantize(float(d_scaled[-1]), CORNER_FORMAT).raw
    t_hat_raw = fx_quantize_array(pre.scaled_matrix(), T_HAT_FORMAT)

    l_raw = np.diag(d_raw)
    l_raw[-1, -1] = corner_raw << 2
    frac = np.full(n, 8)
    frac[-1] = 7
    for _ in range(3):
        l_raw = fx_prox_step(fx_gradient_step(l_raw, t_hat_raw), d_raw, corner_raw, lut)
        values = l_raw * 2.0 ** -frac[:, None]
        norms = np.linalg.norm(values[:, : n - 1], axis=0)
        target = d_raw[: n - 1] * D_FORMAT.lsb
        bound = 2.0**-7 * np.sqrt(n) + 2.0**-8 * target
        assert np.all(np.abs(norms - target) <= bound)
        assert np.all(np.triu(l_raw, k=1) == 0)


def test_dimension_limit():
    n = 66
    pre = PrecondProblem(
        t_tilde=np.eye(n), d_diag=np.ones(n), tau=0.5, alpha=0.99, spectral_norm=1.0
    )
    with pytest.raises(DimensionMismatch):
        taser_solve_fx(pre, TaserConfig(t_max=1))


def test_fixed_point_signs_track_floating_point(rng):
    n0 = snr_to_n0(10.0, ProblemMode.COHERENT, users=8)
    cfg = TaserConfig(t_max=8)
    agree = total = 0
    for _ in range(200):
        inst, _ = make_coherent(rng, bs_antennas=64, users=8, n0=n0)
        pre = jacobi_precondition(build_coherent_problem(inst), alpha=0.99)
        fixed = taser_solve_fx(pre, cfg)
        floating, _ = solve(pre, cfg)
        agree += int(np.count_nonzero(fixed == floating))
        total += fixed.size
    assert agree >= 0.99 * total
