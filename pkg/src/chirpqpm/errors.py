"""Exception types raised by the toolkit."""


class ChirpQpmError(Exception):
    """Base class for all toolkit errors."""


class OutOfRangeError(ChirpQpmError):
    """Wavelength outside a dispersion model's validity range."""


class DegenerateTableError(ChirpQpmError):
    """Tabulated dispersion data too sparse for cubic interpolation."""


class InvalidDesignError(ChirpQpmError):
    """Chirp design parameters violate their constraints."""


class NonPositivePowerError(ChirpQpmError):
    """Power reading contains a non-positive value."""


class ZeroOverlapError(ChirpQpmError):
    """Mode overlap integral vanished; effective area undefined."""


class GridMismatchError(ChirpQpmError):
    """Mode field grids are not congruent."""


class NothingAboveThresholdError(ChirpQpmError):
    """No spectral bin exceeds the noise threshold."""


class NonMonotonicGridError(ChirpQpmError):
    """Wavelength grid is not strictly increasing."""


class UnsortedStreamError(ChirpQpmError):
    """Timestamp stream is not sorted in ascending order."""


class ZeroAccidentalsError(ChirpQpmError):
    """Accidental coincidence level is zero; CAR undefined."""


class ZeroCoincidencesError(ChirpQpmError):
    """Coincidence rate is zero; pair generation rate undefined."""


class DegenerateFitError(ChirpQpmError):
    """Too few distinct points for a meaningful fit."""


class ConfigError(ChirpQpmError):
    """Run configuration is missing, malformed, or inconsistent."""
