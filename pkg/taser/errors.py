"""
Domain errors for the detection library.

Every error carries a human-readable message. Callers that only care about
"something in the detection pipeline failed" can catch TaserError.
"""

from dataclasses import dataclass


@dataclass(eq=False)
class TaserError(Exception):
    """Base class for all detection-library errors."""

    message: str

    def __str__(self) -> str:
        return self.message


class DimensionMismatch(TaserError):
    """Array shapes of an observation or iterate do not agree."""


class UnsupportedConstellation(TaserError):
    """Only constant-modulus BPSK and QPSK are supported."""


class PilotNotInConstellation(TaserError):
    """The known first symbol of a SIMO burst is not a constellation point."""


class NonpositiveDiagonal(TaserError):
    """Jacobi preconditioning needs strictly positive (sign-normalised) diagonals."""


class InvalidProblem(TaserError):
    """A real problem matrix is asymmetric or violates its sign convention."""


class LengthMismatch(TaserError):
    """A sign vector does not match the N-1 entries the problem expects."""


class ZeroColumn(TaserError):
    """A column of the gradient iterate vanished, so the prox step is undefined."""


class SearchSpaceTooLarge(TaserError):
    """Exhaustive enumeration would exceed the candidate guard."""


class SingularMatrix(TaserError):
    """A linear system that should be positive definite could not be solved."""


class DomainError(TaserError):
    """An argument lies outside the domain of a fixed-point operator."""


class UnknownDetector(TaserError):
    """A detector name is not registered for the requested mode."""


class ConfigError(TaserError):
    """A sweep configuration is invalid."""


@dataclass(eq=False)
class TrialError(TaserError):
    """A module error raised while running one Monte-Carlo trial."""

    detector: str = ""
    trial_index: int = -1
    snr_db: float | None = None

    def __str__(self) -> str:
        return (
            f"{self.message} (detector={self.detector}, snr_db={self.snr_db}, "
            f"trial={self.trial_index})"
        )
