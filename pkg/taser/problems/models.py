"""
Core domain models for detection problems.

Observations (CoherentInstance, SimoBurst) hold complex baseband data as
received by the base station. RealProblem and PrecondProblem hold the
real-valued matrices the TASER solver works on. DetectionResult is what
every detector returns. All models are frozen dataclasses wrapping numpy
arrays; nothing mutates them after construction.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray

SQRT_HALF = 1.0 / np.sqrt(2.0)


class Modulation(Enum):
    """Constant-modulus constellations supported by the relaxation."""

    BPSK = "bpsk"
    QPSK = "qpsk"


class ProblemMode(Enum):
    """Which detection problem a RealProblem encodes."""

    COHERENT = "coherent"
    JED = "jed"


class SignConvention(Enum):
    """Definiteness of T: PSD for coherent detection, NSD for JED."""

    PSD_MIN = "psd_min"
    NSD_MIN = "nsd_min"


@dataclass(frozen=True)
class Constellation:
    """
    A unit-energy BPSK or QPSK constellation.

    Attributes:
        kind: BPSK or QPSK

    Points are ordered so that enumerating candidates with itertools.product
    over `points` gives the lexicographic order used for ML tie breaking; the
    first point doubles as the JED pilot symbol.
    """

    kind: Modulation

    @property
    def bits_per_symbol(self) -> int:
        return 1 if self.kind == Modulation.BPSK else 2

    @property
    def points(self) -> NDArray[np.complex128]:
        if self.kind == Modulation.BPSK:
            return np.array([1.0 + 0.0j, -1.0 + 0.0j])
        return SQRT_HALF * np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])

    @property
    def real_dims_per_symbol(self) -> int:
        """Number of ±1 variables one symbol occupies in the real decomposition."""
        return self.bits_per_symbol

    def contains(self, symbol: complex, atol: float = 1e-9) -> bool:
        return bool(np.any(np.abs(self.points - symbol) <= atol))

    def slice(self, z: NDArray[np.complexfloating]) -> NDArray[np.complex128]:
        """Nearest-point hard decisions; ties at zero resolve to the positive side."""
        z = np.asarray(z)
        re = np.where(z.real >= 0, 1.0, -1.0)
        if self.kind == Modulation.BPSK:
            return re.astype(np.complex128)
        im = np.where(z.imag >= 0, 1.0, -1.0)
        return SQRT_HALF * (re + 1j * im)

    def to_bits(self, symbols: NDArray[np.complexfloating]) -> NDArray[np.uint8]:
        """
        Gray demapping: bit 0 is set for a negative real part and, for QPSK,
        bit 1 for a negative imaginary part. Bits of successive symbols are
        concatenated.
        """
        symbols = np.asarray(symbols)
        re_bits = (symbols.real < 0).astype(np.uint8)
        if self.kind == Modulation.BPSK:
            return re_bits
        im_bits = (symbols.imag < 0).astype(np.uint8)
        return np.stack([re_bits, im_bits], axis=-1).reshape(*symbols.shape[:-1], -1)


BPSK = Constellation(Modulation.BPSK)
QPSK = Constellation(Modulation.QPSK)


def constellation_for(name: str | Modulation) -> Constellation:
    """Look up a constellation by name ('bpsk' / 'qpsk') or enum member."""
    kind = name if isinstance(name, Modulation) else Modulation(name.lower())
    return BPSK if kind == Modulation.BPSK else QPSK


@dataclass(frozen=True)
class CoherentInstance:
    """
    One MU-MIMO receive vector y = Hs + n with known channel.

    Attributes:
        y: receive vector, length B
        h: channel matrix, B x U
        constellation: symbol alphabet of all users
        n0: complex noise variance per receive entry
    """

    y: NDArray[np.complex128]
    h: NDArray[np.complex128]
    constellation: Constellation
    n0: float

    @property
    def bs_antennas(self) -> int:
        return int(self.h.shape[0])

    @property
    def users(self) -> int:
        return int(self.h.shape[1])


@dataclass(frozen=True)
class SimoBurst:
    """
    One SIMO block-fading burst Y = h s^H + N over K+1 time slots.

    Attributes:
        y: receive matrix, B x (K+1); column 0 carries the known symbol
        s0: known first transmit symbol
        constellation: symbol alphabet
        n0: complex noise variance per receive entry
    """

    y: NDArray[np.complex128]
    s0: complex
    constellation: Constellation
    n0: float

    @property
    def bs_antennas(self) -> int:
        return int(self.y.shape[0])

    @property
    def data_slots(self) -> int:
        """K, the number of unknown data slots."""
        return int(self.y.shape[1]) - 1


@dataclass(frozen=True)
class RealProblem:
    """
    Real-valued binary quadratic program min s~^T T s~ over s~ = [s_bar; 1].

    Attributes:
        t_matrix: symmetric N x N matrix T
        n_dim: N
        mode: coherent detection or JED
        constellation: alphabet the ±1 variables encode
        sign_convention: PSD (coherent) or NSD (JED)
    """

    t_matrix: NDArray[np.float64]
    n_dim: int
    mode: ProblemMode
    constellation: Constellation
    sign_convention: SignConvention

    @property
    def symbols(self) -> int:
        """U (coherent) or K (JED): complex symbols encoded by the N-1 signs."""
        return (self.n_dim - 1) // self.constellation.real_dims_per_symbol


@dataclass(frozen=True)
class PrecondProblem:
    """
    Jacobi-preconditioned problem handed to the solver.

    Attributes:
        t_tilde: D^-1 (sigma T) D^-1, unit main diagonal
        d_diag: diagonal of D = diag(sqrt(|T_kk|))
        tau: step size alpha / spectral_norm
        alpha: step-size tuning factor in (0, 1)
        spectral_norm: ||t_tilde||_2 estimate
        objective_sign: sigma, +1 for PSD problems and -1 for NSD problems;
            the solver minimises Tr(L (sigma t_tilde) L^T)
    """

    t_tilde: NDArray[np.float64]
    d_diag: NDArray[np.float64]
    tau: float
    alpha: float
    spectral_norm: float
    objective_sign: int = 1
    source: RealProblem | None = field(default=None, compare=False, repr=False)

    @property
    def n_dim(self) -> int:
        return int(self.t_tilde.shape[0])

    def scaled_matrix(self) -> NDArray[np.float64]:
        """T_hat = 2 tau sigma T_tilde, the matrix the hardware keeps in memory."""
        return (2.0 * self.tau * self.objective_sign) * self.t_tilde


@dataclass(frozen=True)
class DetectionResult:
    """
    Hard decisions of one detector on one observation.

    Attributes:
        symbols: detected constellation points (U users or K data slots)
        hard_bits: Gray-demapped bits, bits_per_symbol per symbol
        detector_name: registry name of the detector that produced them
        channel_estimate: channel vector estimate (JED detectors only)
    """

    symbols: NDArray[np.complex128]
    hard_bits: NDArray[np.uint8]
    detector_name: str
    channel_estimate: NDArray[np.complex128] | None = field(
        default=None, compare=False
    )

    @classmethod
    def from_symbols(
        cls,
        symbols: NDArray[np.complexfloating],
        constellation: Constellation,
        detector_name: str,
        channel_estimate: NDArray[np.complex128] | None = None,
    ) -> "DetectionResult":
        symbols = np.asarray(symbols, dtype=np.complex128)
        return cls(
            symbols=symbols,
            hard_bits=constellation.to_bits(symbols),
            detector_name=detector_name,
            channel_estimate=channel_estimate,
        )
