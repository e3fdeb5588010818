"""
Analytical cost model of the triangular systolic array.

One TASER iteration on an N x N lower-triangular array of N(N+1)/2 PEs:

  cycle N      V = L - tril(L T_hat) complete (MAC mode)
  cycle N+1    squared column norms (norm mode)
  cycle N+2    inverse square roots issued to the LUT
  cycle N+4    scale factors D_kk / ||v_k|| ready
  cycle N+5    columns scaled (scale mode)
  +2           stage-register penalty cycles

Multiplications per iteration: sum_i i^2 for the triangular product,
N(N+1)/2 squarings, N scale-factor multiplies and N(N+1)/2 scalings, i.e.
N^3/3 + 3N^2/2 + 13N/6. Preprocessing is not counted and the inverse square
root is a lookup.
"""

from dataclasses import asdict, dataclass
from fractions import Fraction

from taser.problems.models import Modulation

PENALTY_CYCLES = 2


@dataclass(frozen=True)
class ArrayGeometry:
    """
    Attributes:
        n_dim: N, rows and columns of the array
        pe_count: number of processing elements, N(N+1)/2
    """

    n_dim: int
    pe_count: int

    def __post_init__(self) -> None:
        assert self.pe_count == self.n_dim * (self.n_dim + 1) // 2


@dataclass(frozen=True)
class SchedulePhase:
    name: str
    cycle: int


@dataclass(frozen=True)
class CostReport:
    """
    Latency and arithmetic cost of one detection.

    Attributes:
        n_dim: N
        t_max: iterations
        cycles_per_iteration: N + 7
        total_latency_cycles: t_max * cycles_per_iteration
        real_multiplications: multiplications over all t_max iterations
    """

    n_dim: int
    t_max: int
    cycles_per_iteration: int
    total_latency_cycles: int
    real_multiplications: int

    def to_dict(self) -> dict[str, int]:
        return asdict(self)


def _check(n_dim: int, t_max: int = 1) -> None:
    if n_dim < 2:
        raise ValueError(f"n_dim must be >= 2, got {n_dim}")
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")


def array_geometry(n_dim: int) -> ArrayGeometry:
    _check(n_dim)
    return ArrayGeometry(n_dim=n_dim, pe_count=n_dim * (n_dim + 1) // 2)


def iteration_schedule(n_dim: int) -> tuple[SchedulePhase, ...]:
    """Cycle (1-based) at which each phase of one iteration completes."""
    _check(n_dim)
    return (
        SchedulePhase("matrix_multiply", n_dim),
        SchedulePhase("column_norms", n_dim + 1),
        SchedulePhase("inverse_sqrt_issue", n_dim + 2),
        SchedulePhase("scale_factor_ready", n_dim + 4),
        SchedulePhase("column_scaling", n_dim + 5),
        SchedulePhase("stage_registers", n_dim + 5 + PENALTY_CYCLES),
    )


def mult_count(n_dim: int, t_max: int) -> int:
    """Real multiplications of t_max iterations: t_max (2N^3 + 9N^2 + 13N) / 6."""
    _check(n_dim, t_max)
    n = n_dim
    per_iteration = (2 * n**3 + 9 * n**2 + 13 * n) // 6
    return t_max * per_iteration


def cycle_model(n_dim: int, t_max: int) -> CostReport:
    _check(n_dim, t_max)
    per_iteration = iteration_schedule(n_dim)[-1].cycle
    return CostReport(
        n_dim=n_dim,
        t_max=t_max,
        cycles_per_iteration=per_iteration,
        total_latency_cycles=t_max * per_iteration,
        real_multiplications=mult_count(n_dim, t_max),
    )


def throughput_model(
    n_dim: int, t_max: int, clock_hz: float, bits_per_vector: int
) -> float:
    """Detected bits per second for back-to-back problems."""
    if clock_hz <= 0 or bits_per_vector <= 0:
        raise ValueError("clock_hz and bits_per_vector must be positive")
    report = cycle_model(n_dim, t_max)
    return bits_per_vector * clock_hz / report.total_latency_cycles


def multiplications_for_users(
    modulation: Modulation, users: int, t_max: int
) -> int:
    """
    Multiplication count expressed in the number of users U.

    BPSK (N = U + 1): t_max (U^3/3 + 5U^2/2 + 37U/6 + 4)
    QPSK (N = 2U + 1): t_max (8U^3/3 + 10U^2 + 37U/3 + 4)
    """
    u = Fraction(users)
    if modulation == Modulation.BPSK:
        per_iteration = u**3 / 3 + Fraction(5, 2) * u**2 + Fraction(37, 6) * u + 4
    else:
        per_iteration = Fraction(8, 3) * u**3 + 10 * u**2 + Fraction(37, 3) * u + 4
    total = t_max * per_iteration
    assert total.denominator == 1
    return int(total)
