"""
Tests for the systolic-array cost model.
"""

import pytest

from taser.hardware.cost_model import (
    PENALTY_CYCLES,
    array_geometry,
    cycle_model,
    iteration_schedule,
    mult_count,
    multiplications_for_users,
    throughput_model,
)
from taser.problems.models import Modulation


@pytest.mark.parametrize("n_dim, cycles", [(9, 16), (17, 24), (33, 40), (65, 72)])
def test_cycles_per_iteration(n_dim, cycles):
    assert cycle_model(n_dim, 1).cycles_per_iteration == cycles


def test_total_latency_scales_with_iterations():
    report = cycle_model(9, 3)
    assert report.total_latency_cycles == 48
    assert report.real_multiplications == mult_count(9, 3)


@pytest.mark.parametrize(
    "modulation, users",
    [(Modulation.BPSK, 8), (Modulation.QPSK, 4)],
)
def test_multiplications_for_equal_problem_size(modulation, users):
    assert multiplications_for_users(modulation, users, t_max=3) == 1152
    assert mult_count(9, 3) == 1152


@pytest.mark.parametrize("users", [1, 2, 4, 8, 16, 32])
@pytest.mark.parametrize("t_max", [1, 3, 5])
def test_per_user_forms_match_the_dimension_form(users, t_max):
    assert multiplications_for_users(Modulation.BPSK, users, t_max) == mult_count(
        users + 1, t_max
    )
    assert multiplications_for_users(Modulation.QPSK, users, t_max) == mult_count(
        2 * users + 1, t_max
    )


def test_throughput_of_a_bpsk_eight_user_detector():
    assert throughput_model(9, 3, 232e6, 8) == pytest.approx(38.67e6, rel=1e-3)
    assert throughput_model(9, 2, 200e6, 8) == pytest.approx(50e6)


def test_throughput_of_a_qpsk_eight_user_detector():
    # N = 17, 72 cycles per vector, 16 bits per vector
    assert throughput_model(17, 3, 225e6, 16) == pytest.approx(50e6)


def test_throughput_is_linear_in_the_clock():
    slow = throughput_model(17, 4, 100e6, 16)
    fast = throughput_model(17, 4, 200e6, 16)
    assert fast == pytest.approx(2 * slow)


def test_schedule_ends_on_the_iteration_length():
    for n_dim in (2, 9, 33):
        phases = iteration_schedule(n_dim)
        assert [p.cycle for p in phases] == sorted(p.cycle for p in phases)
        assert phases[0].name == "matrix_multiply"
        assert phases[0].cycle == n_dim
        assert phases[-1].cycle == n_dim + 5 + PENALTY_CYCLES
        assert phases[-1].cycle == cycle_model(n_dim, 1).cycles_per_iteration


def test_array_geometry():
    geometry = array_geometry(9)
    assert geometry.pe_count == 45


def test_report_serialises_to_a_dict():
    assert cycle_model(5, 2).to_dict() == {
        "n_dim": 5,
        "t_max": 2,
        "cycles_per_iteration": 12,
        "total_latency_cycles": 24,
        "real_multiplications": 2 * (250 + 225 + 65) // 6,
    }


@pytest.mark.parametrize("n_dim, t_max", [(1, 3), (9, 0)])
def test_invalid_dimensions_are_rejected(n_dim, t_max):
    with pytest.raises(ValueError):
        cycle_model(n_dim, t_max)


def test_throughput_rejects_a_non_positive_clock():
    with pytest.raises(ValueError):
        throughput_model(9, 3, 0.0, 8)
