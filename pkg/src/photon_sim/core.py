"""Units, frequency conversions and the shared error taxonomy.

Internal units are nanoseconds for time and radians per nanosecond for
frequencies and decay rates.  GHz only appears at I/O boundaries.
"""
from __future__ import annotations

import enum
import math

TWO_PI = 2.0 * math.pi


class PhotonSimError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveLifetime(PhotonSimError, ValueError):
    pass


class NonPositiveWindow(PhotonSimError, ValueError):
    pass


class ProbabilityRange(PhotonSimError, ValueError):
    pass


class DegeneratePole(PhotonSimError, ValueError):
    pass


class DivergentIntegral(PhotonSimError, ValueError):
    pass


class DegenerateIntensities(PhotonSimError, ValueError):
    pass


class GridTooCoarse(PhotonSimError, ValueError):
    pass


class UnknownPreset(PhotonSimError, KeyError):
    pass


class UnknownAxis(PhotonSimError, KeyError):
    pass


class ConfigError(PhotonSimError, ValueError):
    pass


class NonConvergence(PhotonSimError, ArithmeticError):
    pass


class Convention(enum.Enum):
    """How a figure-axis value quoted in "GHz" is turned into rad/ns.

    ``ORDINARY`` treats the number as an ordinary frequency (omega = 2 pi nu).
    ``ANGULAR_AS_PRINTED`` uses the number directly as rad/ns, i.e. as a
    rate in 1/ns.
    """

    ORDINARY = "ordinary"
    ANGULAR_AS_PRINTED = "angular_as_printed"

    @classmethod
    def parse(cls, value: "Convention | str | None") -> "Convention":
        if value is None:
            return DEFAULT_CONVENTION
        if isinstance(value, Convention):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"unknown frequency convention {value!r}") from None


# Fixed by the Ba-Ba region calibration (see tests/test_acceptance.py).
DEFAULT_CONVENTION = Convention.ANGULAR_AS_PRINTED


def to_angular(nu_ghz: float) -> float:
    """Ordinary frequency in GHz -> angular frequency in rad/ns."""
    return TWO_PI * nu_ghz


def to_ordinary(omega: float) -> float:
    """Angular frequency in rad/ns -> ordinary frequency in GHz."""
    return omega / TWO_PI


def figure_to_angular(value_ghz: float, convention: Convention | str | None = None) -> float:
    """Convert a figure-axis "GHz" value (detuning or filter kappa) to rad/ns."""
    if Convention.parse(convention) is Convention.ORDINARY:
        return to_angular(value_ghz)
    return float(value_ghz)


def angular_to_figure(omega: float, convention: Convention | str | None = None) -> float:
    if Convention.parse(convention) is Convention.ORDINARY:
        return to_ordinary(omega)
    return float(omega)


def check_lifetime(tau: float, name: str = "tau") -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau <= 0:
        raise NonPositiveLifetime(f"{name} must be a positive finite duration in ns, got {tau}")
    return tau


def check_window(window: float) -> float:
    window = float(window)
    if math.isnan(window) or window <= 0:
        raise NonPositiveWindow(f"detection window must be positive, got {window}")
    return window


def check_probability(p: float, name: str = "probability") -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ProbabilityRange(f"{name} must lie in [0, 1], got {p}")
    return p
