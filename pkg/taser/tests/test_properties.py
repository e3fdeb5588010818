"""
Property-based tests using Hypothesis.

These tests draw random systems and check invariants of the pipeline:
- the real-valued objective equals the complex ML metric
- preconditioning yields a unit diagonal and tau ||T_tilde|| = alpha
- every iterate is lower triangular with column norms D
- detection is deterministic
- the forward-backward iteration converges
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from taser.engine.solver import (
    TaserConfig,
    TriangularFactor,
    gradient_step,
    prox_step,
    solve,
    taser_detect,
)
from taser.fixed_point.qformat import QFormat
from taser.fixed_point.solver import (
    BOTTOM_ROW_FORMAT,
    ROW_FORMAT,
    fx_gradient_step,
    taser_solve_fx,
)
from taser.harness.channel import (
    generate_coherent_trial,
    generate_jed_trial,
    snr_to_n0,
)
from taser.problems.builder import (
    build_coherent_problem,
    build_jed_problem,
    jacobi_precondition,
    objective_value,
    symbols_to_signs,
)
from taser.problems.models import BPSK, QPSK, ProblemMode


@st.composite
def coherent_case(draw, max_users=6):
    """Random small coherent system with B >= U."""
    users = draw(st.integers(min_value=1, max_value=max_users))
    bs_antennas = draw(st.integers(min_value=users, max_value=4 * max_users))
    constellation = draw(st.sampled_from([BPSK, QPSK]))
    snr_db = draw(st.floats(min_value=-5.0, max_value=20.0))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    n0 = snr_to_n0(snr_db, ProblemMode.COHERENT, users)
    inst, truth = generate_coherent_trial(bs_antennas, users, constellation, n0, rng)
    return inst, truth, rng


@st.composite
def jed_case(draw, max_slots=6):
    slots = draw(st.integers(min_value=1, max_value=max_slots))
    bs_antennas = draw(st.integers(min_value=1, max_value=16))
    constellation = draw(st.sampled_from([BPSK, QPSK]))
    snr_db = draw(st.floats(min_value=-5.0, max_value=20.0))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    n0 = snr_to_n0(snr_db, ProblemMode.JED)
    burst, truth = generate_jed_trial(bs_antennas, slots, constellation, n0, rng)
    return burst, truth, rng


@given(coherent_case())
@settings(max_examples=50, deadline=None)
def test_coherent_objective_is_the_ml_metric(case):
    """Property: s~^T T s~ = ||y - Hs||^2 for every candidate s."""
    inst, truth, rng = case
    prob = build_coherent_problem(inst)
    points = inst.constellation.points
    for s in (truth, points[rng.integers(len(points), size=inst.users)]):
        residual = float(np.linalg.norm(inst.y - inst.h @ s) ** 2)
        value = objective_value(prob, symbols_to_signs(s, prob))
        assert abs(value - residual) <= 1e-9 * max(1.0, residual)


@given(jed_case())
@settings(max_examples=50, deadline=None)
def test_jed_objective_is_the_negative_ml_metric(case):
    """Property: s~^T T s~ = -||Y [s0; s_r]||^2 for every candidate s_r."""
    burst, truth, _ = case
    prob = build_jed_problem(burst)
    combined = burst.y @ np.concatenate([[burst.s0], truth])
    energy = float(np.linalg.norm(combined) ** 2)
    value = objective_value(prob, symbols_to_signs(truth, prob))
    assert abs(value + energy) <= 1e-9 * max(1.0, energy)


@given(coherent_case(), st.floats(min_value=0.05, max_value=0.99))
@settings(max_examples=50, deadline=None)
def test_preconditioning_normalises_the_diagonal(case, alpha):
    """Property: diag(T_tilde) = 1, D > 0 and tau * ||T_tilde|| = alpha."""
    inst, _, _ = case
    pre = jacobi_precondition(build_coherent_problem(inst), alpha)
    assert np.allclose(np.diag(pre.t_tilde), 1.0)
    assert np.all(pre.d_diag > 0.0)
    assert pre.tau * pre.spectral_norm == pytest.approx(alpha)


@given(coherent_case(), st.integers(min_value=1, max_value=10))
@settings(max_examples=50, deadline=None)
def test_iterates_are_triangular_with_column_norms_d(case, iterations):
    """Property: after every prox step L is lower triangular and ||L_k|| = D_kk."""
    inst, _, _ = case
    pre = jacobi_precondition(build_coherent_problem(inst), 0.99)
    factor = TriangularFactor.from_diagonal(pre.d_diag)
    for _ in range(iterations):
        factor = prox_step(gradient_step(factor, pre), pre)
    assert np.all(np.triu(factor.l_tilde, k=1) == 0.0)
    norms = np.linalg.norm(factor.l_tilde, axis=0)
    assert np.allclose(norms, pre.d_diag, rtol=1e-9)


@given(jed_case())
@settings(max_examples=30, deadline=None)
def test_detection_is_deterministic(case):
    """Property: the same observation always yields the same decisions."""
    burst, _, _ = case
    cfg = TaserConfig(t_max=5)
    first = taser_detect(burst, cfg)
    second = taser_detect(burst, cfg)
    assert np.array_equal(first.symbols, second.symbols)
    assert np.array_equal(first.channel_estimate, second.channel_estimate)


@given(coherent_case(max_users=4), st.integers(min_value=1, max_value=5))
@settings(max_examples=30, deadline=None)
def test_fixed_point_solver_is_deterministic(case, t_max):
    inst, _, _ = case
    pre = jacobi_precondition(build_coherent_problem(inst), 0.99)
    cfg = TaserConfig(t_max=t_max)
    assert np.array_equal(taser_solve_fx(pre, cfg), taser_solve_fx(pre, cfg))


@given(
    st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=999)
)
@settings(max_examples=50, deadline=None)
def test_fixed_point_gradient_stays_in_range(n_dim, seed):
    """Property: gradient words always fit their row formats."""
    rng = np.random.default_rng(seed)
    words = QFormat(14, 0)
    shape = (n_dim, n_dim)
    l_raw = np.tril(rng.integers(words.min_raw, words.max_raw + 1, size=shape))
    t_hat = rng.integers(words.min_raw, words.max_raw + 1, size=shape)
    v_raw = fx_gradient_step(l_raw, t_hat)
    assert np.all(v_raw >= ROW_FORMAT.min_raw)
    assert np.all(v_raw <= ROW_FORMAT.max_raw)
    assert np.all(v_raw[-1] >= BOTTOM_ROW_FORMAT.min_raw)
    assert np.all(np.triu(v_raw, k=1) == 0)


@pytest.mark.slow
def test_iteration_converges_on_random_systems():
    """At least 99 of 100 random systems settle below 1e-6 within 10^4 steps."""
    rng = np.random.default_rng(7)
    cfg = TaserConfig(t_max=10_000, convergence_tol=1e-6)
    n0 = snr_to_n0(10.0, ProblemMode.COHERENT, users=4)
    converged = 0
    for _ in range(100):
        inst, _ = generate_coherent_trial(16, 4, BPSK, n0, rng)
        pre = jacobi_precondition(build_coherent_problem(inst), 0.99)
        _, trace = solve(pre, cfg)
        converged += int(trace.step_norms[-1] < 1e-6)
    assert converged >= 99
