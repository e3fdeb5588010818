"""
Construction of the real-valued detection problems and Jacobi preconditioning.

Coherent MU-MIMO detection and SIMO joint channel estimation / data detection
are both mapped onto

    min  s~^T T s~   over   s~ = [s_bar; 1],  s_bar in {-1, +1}^(N-1)

with T = G^T G (coherent, PSD) or T = -G^T G (JED, NSD). G stacks the
real-valued system matrix and the (negated) receive vector. QPSK symbols are
(±1 ± j)/sqrt(2), so the system matrix carries the 1/sqrt(2) factor and
s_bar stays a ±1 vector.
"""

import numpy as np
import scipy.linalg
import structlog
from numpy.typing import NDArray

from taser.errors import (
    DimensionMismatch,
    InvalidProblem,
    LengthMismatch,
    NonpositiveDiagonal,
    PilotNotInConstellation,
    UnsupportedConstellation,
)
from taser.problems.models import (
    SQRT_HALF,
    CoherentInstance,
    Modulation,
    PrecondProblem,
    ProblemMode,
    RealProblem,
    SignConvention,
    SimoBurst,
)

POWER_ITERATIONS = 200
POWER_RTOL = 1e-8
SYMMETRY_RTOL = 1e-12
DEFINITENESS_RTOL = 1e-9

logger = structlog.get_logger(__name__)


# ── Problem construction ──────────────────────────────────────────────────────


def build_coherent_problem(inst: CoherentInstance) -> RealProblem:
    """
    Build T for coherent ML detection so that s~^T T s~ = ||y - Hs||^2.

    Raises:
        DimensionMismatch: y and H disagree, or H is empty
        UnsupportedConstellation: constellation is neither BPSK nor QPSK
    """
    y = np.asarray(inst.y)
    h = np.asarray(inst.h)
    if h.ndim != 2 or y.ndim != 1 or h.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"receive vector of length {y.shape} does not match channel {h.shape}"
        )
    if h.shape[0] < 1 or h.shape[1] < 1:
        raise DimensionMismatch(f"channel matrix must be non-empty, got {h.shape}")

    system = _real_system(h, inst.constellation.kind)
    y_bar = np.concatenate([y.real, y.imag])
    g = np.column_stack([system, -y_bar])
    return _make_problem(
        g.T @ g, ProblemMode.COHERENT, inst, SignConvention.PSD_MIN
    )


def build_jed_problem(burst: SimoBurst) -> RealProblem:
    """
    Build T for ML JED so that s~^T T s~ = -||Y [s0; s_r]||^2.

    Raises:
        DimensionMismatch: fewer than two time slots, or a malformed Y
        PilotNotInConstellation: s0 is not a constellation point
        UnsupportedConstellation: constellation is neither BPSK nor QPSK
    """
    y = np.asarray(burst.y)
    if y.ndim != 2 or y.shape[0] < 1 or y.shape[1] < 2:
        raise DimensionMismatch(
            f"burst must be B x (K+1) with B >= 1 and K >= 1, got {y.shape}"
        )
    if not burst.constellation.contains(burst.s0):
        raise PilotNotInConstellation(
            f"pilot {burst.s0!r} is not a {burst.constellation.kind.value} point"
        )

    pilot_term = y[:, 0] * burst.s0
    system = _real_system(y[:, 1:], burst.constellation.kind)
    y_bar = np.concatenate([pilot_term.real, pilot_term.imag])
    g = np.column_stack([system, y_bar])
    return _make_problem(
        -(g.T @ g), ProblemMode.JED, burst, SignConvention.NSD_MIN
    )


def _real_system(
    h: NDArray[np.complexfloating], kind: Modulation
) -> NDArray[np.float64]:
    if kind == Modulation.BPSK:
        return np.vstack([h.real, h.imag])
    if kind == Modulation.QPSK:
        top = np.hstack([h.real, -h.imag])
        bottom = np.hstack([h.imag, h.real])
        return SQRT_HALF * np.vstack([top, bottom])
    raise UnsupportedConstellation(f"unsupported constellation {kind!r}")


def _make_problem(
    t: NDArray[np.float64],
    mode: ProblemMode,
    source: CoherentInstance | SimoBurst,
    convention: SignConvention,
) -> RealProblem:
    t = 0.5 * (t + t.T)
    problem = RealProblem(
        t_matrix=t,
        n_dim=int(t.shape[0]),
        mode=mode,
        constellation=source.constellation,
        sign_convention=convention,
    )
    check_real_problem(problem)
    return problem


def check_real_problem(prob: RealProblem) -> None:
    """
    Check that T is symmetric and matches its sign convention.

    Raises:
        InvalidProblem: T is asymmetric, or not PSD (coherent) / NSD (JED)
    """
    t = prob.t_matrix
    scale = max(float(np.linalg.norm(t, 2)), np.finfo(float).tiny)
    asymmetry = float(np.max(np.abs(t - t.T)))
    if asymmetry > SYMMETRY_RTOL * scale:
        raise InvalidProblem(
            f"T is not symmetric (max |T - T^T| = {asymmetry:.3e})"
        )
    eigenvalues = scipy.linalg.eigvalsh(t)
    if prob.sign_convention == SignConvention.PSD_MIN:
        if eigenvalues[0] < -DEFINITENESS_RTOL * scale:
            raise InvalidProblem(
                f"T is not PSD (smallest eigenvalue {eigenvalues[0]:.3e})"
            )
    elif eigenvalues[-1] > DEFINITENESS_RTOL * scale:
        raise InvalidProblem(
            f"T is not NSD (largest eigenvalue {eigenvalues[-1]:.3e})"
        )


def objective_value(prob: RealProblem, s_bar: NDArray[np.floating]) -> float:
    """Evaluate s~^T T s~ for s~ = [s_bar; 1]."""
    s_tilde = np.append(np.asarray(s_bar, dtype=float), 1.0)
    return float(s_tilde @ prob.t_matrix @ s_tilde)


# ── Preconditioning ───────────────────────────────────────────────────────────


def exact_spectral_norm(matrix: NDArray[np.float64]) -> float:
    """Spectral norm of a symmetric matrix from its full eigendecomposition."""
    return float(np.max(np.abs(scipy.linalg.eigvalsh(matrix))))


def spectral_norm(
    matrix: NDArray[np.float64],
    max_iter: int = POWER_ITERATIONS,
    rtol: float = POWER_RTOL,
) -> float:
    """
    Spectral norm of a symmetric PSD matrix by power iteration.

    Starts from the all-ones vector and stops after max_iter iterations or
    when the Rayleigh quotient changes by less than rtol (relative). If the
    start vector lies in the null space the iterate vanishes, and the exact
    norm is returned instead.
    """
    x = np.ones(matrix.shape[0])
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(max_iter):
        w = matrix @ x
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return exact_spectral_norm(matrix)
        new_estimate = float(x @ w)
        x = w / norm_w
        if estimate > 0.0 and abs(new_estimate - estimate) <= rtol * new_estimate:
            return new_estimate
        estimate = new_estimate
    return estimate


def jacobi_precondition(prob: RealProblem, alpha: float) -> PrecondProblem:
    """
    Scale T to a unit diagonal and derive the step size.

    D = diag(sqrt(|T_kk|)), T_tilde = D^-1 (sigma T) D^-1 with sigma = -1 for
    NSD problems, tau = alpha / ||T_tilde||_2.

    Raises:
        NonpositiveDiagonal: a sign-normalised diagonal entry is <= 0
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    sigma = 1 if prob.sign_convention == SignConvention.PSD_MIN else -1
    t = sigma * prob.t_matrix
    diagonal = np.diag(t)
    if np.any(diagonal <= 0.0):
        bad = int(np.argmin(diagonal))
        raise NonpositiveDiagonal(
            f"diagonal entry T[{bad},{bad}] = {diagonal[bad]:.3e} is not positive"
        )
    d = np.sqrt(diagonal)
    d_inv = 1.0 / d
    t_tilde = t * np.outer(d_inv, d_inv)
    t_tilde = 0.5 * (t_tilde + t_tilde.T)
    np.fill_diagonal(t_tilde, 1.0)
    norm = spectral_norm(t_tilde)
    # a unit-diagonal PSD matrix has norm >= 1
    if norm < 1.0:
        logger.debug("Power iteration fell short", estimate=norm)
        norm = exact_spectral_norm(t_tilde)
    return PrecondProblem(
        t_tilde=t_tilde,
        d_diag=d,
        tau=alpha / norm,
        alpha=alpha,
        spectral_norm=norm,
        objective_sign=sigma,
        source=prob,
    )


# ── Solution mapping ──────────────────────────────────────────────────────────


def extract_complex_solution(
    signs: NDArray[np.integer], prob: RealProblem
) -> NDArray[np.complex128]:
    """
    Map the N-1 output signs back to complex symbols.

    Coherent: the U user symbols. JED: the K data symbols (pilot excluded).

    Raises:
        LengthMismatch: len(signs) != N - 1
    """
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (prob.n_dim - 1,):
        raise LengthMismatch(
            f"expected {prob.n_dim - 1} signs for N={prob.n_dim}, got {signs.shape}"
        )
    if prob.constellation.kind == Modulation.BPSK:
        return signs.astype(np.complex128)
    half = prob.symbols
    return SQRT_HALF * (signs[:half] + 1j * signs[half:])


def symbols_to_signs(
    symbols: NDArray[np.complexfloating], prob: RealProblem
) -> NDArray[np.int64]:
    """Inverse of extract_complex_solution: complex symbols to the ±1 vector s_bar."""
    symbols = np.asarray(symbols)
    if symbols.shape != (prob.symbols,):
        raise LengthMismatch(
            f"expected {prob.symbols} symbols for N={prob.n_dim}, got {symbols.shape}"
        )
    re = np.where(symbols.real >= 0, 1, -1)
    if prob.constellation.kind == Modulation.BPSK:
        return re.astype(np.int64)
    im = np.where(symbols.imag >= 0, 1, -1)
    return np.concatenate([re, im]).astype(np.int64)
