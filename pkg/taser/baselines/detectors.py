"""
Reference detectors.

- ml_exhaustive: exact coherent ML by enumeration (oracle, small U only)
- ml_jed_exhaustive: exact ML JED with the first symbol pinned
- mmse_detect: linear MMSE equalisation followed by slicing
- simo_detect / simo_lower_bound: interference-free single-user MRC links
- chest_mrc_detect: single-pilot channel estimate followed by MRC
- rayleigh_bpsk_ber: closed-form MRC BER over i.i.d. Rayleigh fading
"""

import numpy as np
from numpy.typing import NDArray
from scipy.special import comb

from taser.errors import (
    DimensionMismatch,
    SearchSpaceTooLarge,
    SingularMatrix,
)
from taser.problems.models import (
    CoherentInstance,
    Constellation,
    DetectionResult,
    SimoBurst,
)

MAX_CANDIDATES = 1 << 20
CHUNK_SIZE = 1 << 14


# ── Exhaustive search ─────────────────────────────────────────────────────────


def _candidate_count(constellation: Constellation, length: int) -> int:
    count = len(constellation.points) ** length
    if count > MAX_CANDIDATES:
        raise SearchSpaceTooLarge(
            f"{len(constellation.points)}^{length} = {count} candidates exceeds "
            f"the limit of {MAX_CANDIDATES}"
        )
    return count


def _candidates(
    points: NDArray[np.complex128], length: int, start: int, stop: int
) -> NDArray[np.complex128]:
    """Rows start..stop-1 of itertools.product(points, repeat=length)."""
    index = np.arange(start, stop)[:, None]
    m = len(points)
    weights = m ** np.arange(length - 1, -1, -1)
    digits = (index // weights) % m
    return points[digits]


def ml_exhaustive(inst: CoherentInstance) -> DetectionResult:
    """
    argmin_s ||y - Hs|| over all constellation vectors.

    Uses ||y - Hs||^2 = s^H G s - 2 Re(s^H z) + const with G = H^H H and
    z = H^H y. Ties go to the first candidate in lexicographic order.

    Raises:
        SearchSpaceTooLarge: more than 2^20 candidates
    """
    points = inst.constellation.points
    users = inst.users
    total = _candidate_count(inst.constellation, users)
    gram = inst.h.conj().T @ inst.h
    matched = inst.h.conj().T @ inst.y

    best_metric = np.inf
    best: NDArray[np.complex128] | None = None
    for start in range(0, total, CHUNK_SIZE):
        cands = _candidates(points, users, start, min(start + CHUNK_SIZE, total))
        quad = np.einsum("mi,ij,mj->m", cands.conj(), gram, cands).real
        metric = quad - 2.0 * (cands.conj() @ matched).real
        k = int(np.argmin(metric))
        if metric[k] < best_metric:
            best_metric = float(metric[k])
            best = cands[k]
    assert best is not None
    return DetectionResult.from_symbols(best, inst.constellation, "ml")


def ml_jed_exhaustive(burst: SimoBurst) -> DetectionResult:
    """
    argmax over s_r of ||Y [s0; s_r]||, with the channel estimate Y s_hat.

    Raises:
        SearchSpaceTooLarge: more than 2^20 candidates
    """
    if burst.data_slots < 1:
        raise DimensionMismatch(
            f"burst needs at least one data slot, got {burst.y.shape}"
        )
    points = burst.constellation.points
    slots = burst.data_slots
    total = _candidate_count(burst.constellation, slots)
    pilot_term = burst.y[:, 0] * burst.s0
    data = burst.y[:, 1:]

    best_metric = -np.inf
    best: NDArray[np.complex128] | None = None
    for start in range(0, total, CHUNK_SIZE):
        cands = _candidates(points, slots, start, min(start + CHUNK_SIZE, total))
        combined = pilot_term[None, :] + cands @ data.T
        metric = np.sum(np.abs(combined) ** 2, axis=1)
        k = int(np.argmax(metric))
        if metric[k] > best_metric:
            best_metric = float(metric[k])
            best = cands[k]
    assert best is not None
    channel = burst.y @ np.concatenate([[burst.s0], best])
    return DetectionResult.from_symbols(best, burst.constellation, "ml", channel)


# ── Linear and single-user detectors ──────────────────────────────────────────


def mmse_detect(inst: CoherentInstance) -> DetectionResult:
    """
    (H^H H + N0 I)^-1 H^H y, sliced to the constellation (Es = 1).

    Raises:
        SingularMatrix: the regularised Gram matrix could not be inverted
    """
    if inst.n0 < 0.0:
        raise ValueError(f"noise variance must be >= 0, got {inst.n0}")
    gram = inst.h.conj().T @ inst.h + inst.n0 * np.eye(inst.users)
    try:
        unquantised = np.linalg.solve(gram, inst.h.conj().T @ inst.y)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"MMSE filter matrix is singular: {exc}") from exc
    symbols = inst.constellation.slice(unquantised)
    return DetectionResult.from_symbols(symbols, inst.constellation, "mmse")


def simo_detect(
    inst: CoherentInstance, true_symbols: NDArray[np.complex128]
) -> DetectionResult:
    """
    Detect every user as if the others were absent.

    User u sees y_u = h_u s_u + n with the instance's own noise, i.e. a
    genie removes all inter-user interference; MRC then slices
    h_u^H y_u / ||h_u||^2.
    """
    true_symbols = np.asarray(true_symbols)
    if true_symbols.shape != (inst.users,):
        raise DimensionMismatch(
            f"expected {inst.users} transmitted symbols, got {true_symbols.shape}"
        )
    noise = inst.y - inst.h @ true_symbols
    energy = np.sum(np.abs(inst.h) ** 2, axis=0)
    z = true_symbols + (inst.h.conj().T @ noise) / energy
    symbols = inst.constellation.slice(z)
    return DetectionResult.from_symbols(symbols, inst.constellation, "simo")


def simo_lower_bound(
    bs_antennas: int,
    constellation: Constellation,
    n0: float,
    trials: int,
    seed: int,
    n_users: int = 1,
) -> float:
    """
    Monte-Carlo error rate of interference-free MRC over i.i.d. Rayleigh fading.

    Each trial simulates n_users independent single-user links; a trial is in
    error when any of them is. With n_users=1 this is the symbol error rate
    (the BER for BPSK).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    points = constellation.points
    scale = np.sqrt(0.5)
    errors = 0
    for start in range(0, trials, CHUNK_SIZE):
        size = (min(CHUNK_SIZE, trials - start), n_users)
        h = scale * (
            rng.standard_normal((*size, bs_antennas))
            + 1j * rng.standard_normal((*size, bs_antennas))
        )
        s = points[rng.integers(len(points), size=size)]
        n = np.sqrt(n0) * scale * (
            rng.standard_normal((*size, bs_antennas))
            + 1j * rng.standard_normal((*size, bs_antennas))
        )
        y = h * s[..., None] + n
        z = np.sum(h.conj() * y, axis=-1) / np.sum(np.abs(h) ** 2, axis=-1)
        wrong = np.abs(constellation.slice(z) - s) > 1e-9
        errors += int(np.count_nonzero(np.any(wrong, axis=1)))
    return errors / trials


def chest_mrc_detect(
    burst: SimoBurst,
    channel: NDArray[np.complex128] | None = None,
    detector_name: str | None = None,
) -> DetectionResult:
    """
    Single-pilot channel estimation followed by per-slot MRC.

    The estimate is h_hat = y_0 s0 / |s0|^2; passing `channel` replaces it
    with a known channel (perfect CSIR). Slot k is sliced from
    conj(h_hat^H y_k / ||h_hat||^2).
    """
    if burst.data_slots < 1:
        raise DimensionMismatch(
            f"burst needs at least one data slot, got {burst.y.shape}"
        )
    if channel is None:
        h_hat = burst.y[:, 0] * burst.s0 / abs(burst.s0) ** 2
        name = detector_name or "chest"
    else:
        h_hat = np.asarray(channel)
        name = detector_name or "csir"
    energy = float(np.real(np.vdot(h_hat, h_hat)))
    if energy == 0.0:
        combined = np.zeros(burst.data_slots, dtype=np.complex128)
    else:
        combined = (h_hat.conj() @ burst.y[:, 1:]) / energy
    symbols = burst.constellation.slice(combined.conj())
    return DetectionResult.from_symbols(symbols, burst.constellation, name, h_hat)


def rayleigh_bpsk_ber(snr_lin: float, diversity: int = 1) -> float:
    """
    BPSK bit error rate of L-branch MRC over i.i.d. Rayleigh fading.

    snr_lin is the average SNR per branch; for diversity=1 this is
    (1 - sqrt(snr / (1 + snr))) / 2.
    """
    mu = np.sqrt(snr_lin / (1.0 + snr_lin))
    total = sum(
        comb(diversity - 1 + l, l, exact=True) * ((1.0 + mu) / 2.0) ** l
        for l in range(diversity)
    )
    return float(((1.0 - mu) / 2.0) ** diversity * total)
