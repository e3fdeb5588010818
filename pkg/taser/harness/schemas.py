"""
Pydantic models for sweep configuration and result rows.

SweepConfig is what the CLI builds from its flags and what the metadata
sidecar echoes back; SweepRow is one line of the results CSV.
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from taser.harness.registry import Arithmetic, get_detector
from taser.problems.models import Modulation, ProblemMode, constellation_for

# ── Configuration ─────────────────────────────────────────────────────────────


class SweepConfig(BaseModel):
    """One Monte-Carlo experiment: a system, a detector set and an SNR grid."""

    model_config = ConfigDict(frozen=True)

    mode: ProblemMode = ProblemMode.COHERENT
    bs_antennas: int = Field(..., ge=1, description="B, receive antennas")
    users: int = Field(
        ..., ge=1, description="U users (coherent) or K data slots (JED)"
    )
    modulation: Modulation = Modulation.BPSK
    snr_db: list[float] = Field(..., min_length=1)
    t_max: list[int] = Field(default_factory=lambda: [3], min_length=1)
    alpha: float = Field(0.99, gt=0.0, lt=1.0)
    trials: int = Field(10_000, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    detectors: list[str] = Field(..., min_length=1)
    arithmetic: Arithmetic = Arithmetic.FLOAT

    @model_validator(mode="after")
    def check_lists(self) -> "SweepConfig":
        if any(t < 1 for t in self.t_max):
            raise ValueError("every t_max must be >= 1")
        if len(set(self.detectors)) != len(self.detectors):
            raise ValueError("detector names must be unique")
        for name in self.detectors:
            get_detector(name, self.mode)
        return self

    @property
    def bits_per_vector(self) -> int:
        return constellation_for(self.modulation).bits_per_symbol * self.users

    @property
    def system_label(self) -> str:
        return f"{self.bs_antennas}x{self.users}"


# ── Results ───────────────────────────────────────────────────────────────────


class SweepRow(BaseModel):
    """Error counts and rates of one (detector, snr, t_max) cell."""

    model_config = ConfigDict(frozen=True)

    detector: str
    mode: ProblemMode
    bs_antennas: int
    users: int
    modulation: Modulation
    arithmetic: Arithmetic
    alpha: float
    t_max: int = Field(..., ge=0)
    snr_db: float
    trials: int = Field(..., ge=1)
    vector_errors: int = Field(..., ge=0)
    bit_errors: int = Field(..., ge=0)
    ver: float = Field(..., ge=0.0, le=1.0)
    ber: float = Field(..., ge=0.0, le=1.0)
    ci_lo: float
    ci_hi: float

    @model_validator(mode="after")
    def check_consistency(self) -> "SweepRow":
        if self.vector_errors > self.trials:
            raise ValueError("vector_errors exceeds trials")
        if self.ver != self.vector_errors / self.trials:
            raise ValueError("ver must equal vector_errors / trials")
        if not 0.0 <= self.ci_lo <= self.ci_hi <= 1.0:
            raise ValueError("confidence bounds out of order")
        return self
