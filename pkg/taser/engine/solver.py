"""
Floating-point TASER solver.

Preconditioned forward-backward splitting on the lower-triangular factor L
of the relaxed matrix S = L^T L:

    V      = L - tril(2 tau sigma L T_tilde)        (gradient step)
    L_k    = D_kk V_k / ||V_k||                     (prox step, per column)

starting from L = D and returning sign(L_Nk) for the first N-1 columns of
the last row. L_NN is held at D_NN after every prox step, as the last
processing element of the systolic array keeps it in a constant register.
The iteration mirrors that dataflow: no adaptive step sizes and an optional
early stop only.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from taser.errors import DimensionMismatch, ZeroColumn
from taser.problems.builder import (
    build_coherent_problem,
    build_jed_problem,
    extract_complex_solution,
    jacobi_precondition,
)
from taser.problems.models import (
    CoherentInstance,
    DetectionResult,
    PrecondProblem,
    SimoBurst,
)

ZERO_COLUMN_NORM = 1e-30


@dataclass(frozen=True)
class TriangularFactor:
    """
    Lower-triangular N x N iterate, stored densely.

    Attributes:
        l_tilde: the matrix; its strict upper triangle is always zero
    """

    l_tilde: NDArray[np.float64]

    @classmethod
    def from_diagonal(cls, d_diag: NDArray[np.float64]) -> "TriangularFactor":
        return cls(np.diag(np.asarray(d_diag, dtype=float)))

    @property
    def n_dim(self) -> int:
        return int(self.l_tilde.shape[0])

    def last_row_signs(self) -> NDArray[np.int64]:
        """sign(L_Nk) for k < N, with sign(0) = +1."""
        return np.where(self.l_tilde[-1, :-1] >= 0.0, 1, -1).astype(np.int64)


@dataclass(frozen=True)
class TaserConfig:
    """
    Solver settings.

    Attributes:
        t_max: iteration budget
        alpha: step-size factor, tau = alpha / ||T_tilde||_2
        convergence_tol: stop once ||L_t - L_{t-1}||_F < tol; 0 disables
        trace_objective: record Tr(L sigma T_tilde L^T) after each iteration
    """

    t_max: int
    alpha: float = 0.99
    convergence_tol: float = 0.0
    trace_objective: bool = False

    def __post_init__(self) -> None:
        if self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.convergence_tol < 0.0:
            raise ValueError(
                f"convergence_tol must be >= 0, got {self.convergence_tol}"
            )


@dataclass(frozen=True)
class TaserTrace:
    """
    Per-iteration diagnostics of one solve.

    Attributes:
        objective: objective after each iteration (NaN unless traced)
        step_norms: Frobenius norm of each iterate update
        iterations_run: number of iterations executed
    """

    objective: NDArray[np.float64]
    step_norms: NDArray[np.float64]
    iterations_run: int


@dataclass
class MultiplyCounter:
    """
    Tally of real multiplications, in the counting convention of the cost model.

    Attributes:
        gradient: triangular matrix-product multiplies
        squarings: squares summed into the column norms
        scale_factors: D_kk times inverse-square-root multiplies
        scalings: column scaling multiplies
    """

    gradient: int = 0
    squarings: int = 0
    scale_factors: int = 0
    scalings: int = 0

    @property
    def total(self) -> int:
        return self.gradient + self.squarings + self.scale_factors + self.scalings


# ── Iteration halves ──────────────────────────────────────────────────────────


def gradient_step(
    l: TriangularFactor,
    pre: PrecondProblem,
    counter: MultiplyCounter | None = None,
) -> TriangularFactor:
    """
    V = L - tril(2 tau sigma L T_tilde).

    Row i of L has i nonzero entries, so each of the i lower-triangle outputs
    of that row costs i multiplies.

    Raises:
        DimensionMismatch: L and T_tilde differ in size
    """
    if l.l_tilde.shape != pre.t_tilde.shape:
        raise DimensionMismatch(
            f"factor {l.l_tilde.shape} does not match T_tilde {pre.t_tilde.shape}"
        )
    scaled = pre.scaled_matrix()
    v = np.zeros_like(l.l_tilde)
    for i in range(l.n_dim):
        row = l.l_tilde[i, : i + 1]
        v[i, : i + 1] = row - row @ scaled[: i + 1, : i + 1]
        if counter is not None:
            counter.gradient += (i + 1) * (i + 1)
    return TriangularFactor(v)


def prox_step(
    v: TriangularFactor,
    pre: PrecondProblem,
    counter: MultiplyCounter | None = None,
) -> TriangularFactor:
    """
    Rescale every column k of V to norm D_kk, then set L_NN = D_NN.

    Column k of a lower-triangular V has N-k nonzero entries: that many
    squarings and scalings, plus one D_kk times inverse-square-root multiply.

    Raises:
        ZeroColumn: a column norm is below 1e-30
        DimensionMismatch: V and D differ in size
    """
    if v.n_dim != pre.d_diag.shape[0]:
        raise DimensionMismatch(
            f"factor of size {v.n_dim} does not match D of size {pre.d_diag.shape[0]}"
        )
    n = v.n_dim
    out = np.zeros_like(v.l_tilde)
    for k in range(n):
        column = v.l_tilde[k:, k]
        norm = float(np.sqrt(column @ column))
        if norm < ZERO_COLUMN_NORM:
            raise ZeroColumn(f"column {k} of the gradient iterate vanished")
        out[k:, k] = column * (pre.d_diag[k] / norm)
        if counter is not None:
            counter.squarings += n - k
            counter.scale_factors += 1
            counter.scalings += n - k
    out[-1, -1] = pre.d_diag[-1]
    return TriangularFactor(out)


def objective(l: TriangularFactor, pre: PrecondProblem) -> float:
    """Tr(L sigma T_tilde L^T)."""
    lt = l.l_tilde
    return float(pre.objective_sign * np.einsum("ij,jk,ik->", lt, pre.t_tilde, lt))


# ── Solver ────────────────────────────────────────────────────────────────────


def solve(
    pre: PrecondProblem,
    cfg: TaserConfig,
    counter: MultiplyCounter | None = None,
) -> tuple[NDArray[np.int64], TaserTrace]:
    """
    Run TASER for cfg.t_max iterations (or until the early-stop tolerance).

    Returns:
        (signs of length N-1, trace)
    """
    factor = TriangularFactor.from_diagonal(pre.d_diag)
    objectives: list[float] = []
    step_norms: list[float] = []
    for _ in range(cfg.t_max):
        previous = factor
        factor = prox_step(gradient_step(previous, pre, counter), pre, counter)
        step = float(np.linalg.norm(factor.l_tilde - previous.l_tilde))
        step_norms.append(step)
        objectives.append(objective(factor, pre) if cfg.trace_objective else np.nan)
        if cfg.convergence_tol > 0.0 and step < cfg.convergence_tol:
            break

    trace = TaserTrace(
        objective=np.asarray(objectives, dtype=float),
        step_norms=np.asarray(step_norms, dtype=float),
        iterations_run=len(step_norms),
    )
    return factor.last_row_signs(), trace


SignSolver = Callable[[PrecondProblem, TaserConfig], NDArray[np.int64]]


def float_signs(pre: PrecondProblem, cfg: TaserConfig) -> NDArray[np.int64]:
    signs, _ = solve(pre, cfg)
    return signs


def taser_detect(
    observation: CoherentInstance | SimoBurst,
    cfg: TaserConfig,
    solver: SignSolver = float_signs,
    detector_name: str = "taser",
) -> DetectionResult:
    """
    Build, precondition, solve and map back to complex symbols.

    `solver` selects the arithmetic; the fixed-point model plugs in here.
    For a SimoBurst the result also carries the channel estimate Y [s0; s_r].
    """
    if isinstance(observation, SimoBurst):
        problem = build_jed_problem(observation)
    else:
        problem = build_coherent_problem(observation)
    pre = jacobi_precondition(problem, cfg.alpha)
    symbols = extract_complex_solution(solver(pre, cfg), problem)

    channel = None
    if isinstance(observation, SimoBurst):
        full = np.concatenate([[observation.s0], symbols])
        channel = observation.y @ full
    return DetectionResult.from_symbols(
        symbols, observation.constellation, detector_name, channel
    )
