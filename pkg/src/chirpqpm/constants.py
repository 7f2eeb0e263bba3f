"""Physical constants and unit conversion helpers.

All internal lengths are micrometres unless a suffix says otherwise;
wavelengths cross module boundaries in nanometres, efficiencies are
reported in %/W/cm^2 and frequencies in THz.
"""

VACUUM_PERMITTIVITY_F_PER_M = 8.8541878128e-12
SPEED_OF_LIGHT_M_PER_S = 2.99792458e8

# c expressed in nm * THz, so that frequency_thz = this / wavelength_nm
SPEED_OF_LIGHT_NM_THZ = 299792.458


def frequency_thz(wavelength_nm: float) -> float:
    """Optical frequency in THz for a vacuum wavelength in nm."""
    return SPEED_OF_LIGHT_NM_THZ / wavelength_nm


def bandwidth_thz(wavelength_lo_nm: float, wavelength_hi_nm: float) -> float:
    """Frequency extent in THz between two wavelengths (lo < hi)."""
    return SPEED_OF_LIGHT_NM_THZ * (1.0 / wavelength_lo_nm - 1.0 / wavelength_hi_nm)
