"""Effective-index dispersion models for the interacting optical bands.

A :class:`DispersionModel` returns the guided-mode effective index
n_eff(lambda) for one band, either by monotone cubic interpolation of a
measured/simulated table or by evaluating a low-order polynomial in the
wavelength expressed in micrometres.  Wave vectors derive from it as
k = 2*pi*n_eff/lambda in rad/um.

The shipped defaults are polynomial fits for the fundamental TE mode of
a thin-film lithium-niobate ridge, anchored so that the degenerate QPM
period is 4.45 um at a 1505 nm signal and 4.55 um at a 1610 nm signal.
They are an admitted approximation for design studies; load a CSV table
for device-accurate work.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateTableError, OutOfRangeError

TABULATED = "tabulated"
POLYNOMIAL = "polynomial"

# plausibility window for a lithium-niobate guided mode
_N_MIN, _N_MAX = 1.0, 3.0


class ExtrapolationWarning(UserWarning):
    """Raised (as a warning) whenever a model is evaluated outside its
    validity range with extrapolation enabled."""


@dataclass(frozen=True)
class WaveVectorQuery:
    """A single (wavelength, band) evaluation request."""

    wavelength_nm: float
    band: str

    def __post_init__(self):
        if self.wavelength_nm <= 0:
            raise ValueError("wavelength must be positive")


@dataclass(frozen=True, eq=False)
class DispersionModel:
    """Effective index n_eff(lambda) for one optical band.

    kind == "tabulated": ``samples`` is an (N, 2) array of
    (wavelength_nm, n_eff) rows, strictly increasing in wavelength,
    interpolated with a shape-preserving monotone cubic.  kind ==
    "polynomial": ``coefficients`` are ascending powers of the
    wavelength in micrometres.

    Evaluation outside ``valid_range_nm`` raises OutOfRangeError unless
    ``extrapolate=True`` is passed, in which case the model continues
    linearly with the boundary slope and emits ExtrapolationWarning.
    """

    band_label: str
    kind: str
    valid_range_nm: tuple[float, float]
    samples: np.ndarray | None = None
    coefficients: tuple[float, ...] | None = None
    _interp: PchipInterpolator | None = field(default=None, repr=False)

    def __post_init__(self):
        lo, hi = self.valid_range_nm
        if not (0 < lo < hi):
            raise ValueError(f"invalid validity range {self.valid_range_nm}")
        if self.kind == TABULATED:
            if self.samples is None:
                raise ValueError("tabulated model needs samples")
            samples = np.asarray(self.samples, dtype=np.float64)
            if samples.ndim != 2 or samples.shape[1] != 2:
                raise ValueError("samples must be (N, 2): wavelength_nm, n_eff")
            if samples.shape[0] < 4:
                raise DegenerateTableError(
                    f"{samples.shape[0]} samples; monotone cubic needs at least 4"
                )
            if np.any(np.diff(samples[:, 0]) <= 0):
                raise ValueError("sample wavelengths must be strictly increasing")
            if lo < samples[0, 0] or hi > samples[-1, 0]:
                raise ValueError(
                    "validity range must lie within the tabulated wavelengths"
                )
            object.__setattr__(self, "samples", samples)
            object.__setattr__(
                self, "_interp", PchipInterpolator(samples[:, 0], samples[:, 1])
            )
            self._check_plausible(samples[:, 1])
        elif self.kind == POLYNOMIAL:
            if not self.coefficients:
                raise ValueError("polynomial model needs coefficients")
            object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
            probe = np.linspace(lo, hi, 257)
            self._check_plausible(self._raw(probe))
        else:
            raise ValueError(f"unknown model kind {self.kind!r}")

    def _check_plausible(self, values: np.ndarray) -> None:
        if np.any(values <= _N_MIN) or np.any(values >= _N_MAX):
            raise ValueError(
                f"{self.band_label}: n_eff leaves the plausible window "
                f"({_N_MIN}, {_N_MAX}) inside the validity range"
            )

    # raw model evaluation, no range policy
    def _raw(self, wavelength_nm: np.ndarray) -> np.ndarray:
        if self.kind == TABULATED:
            return self._interp(wavelength_nm)
        return npoly.polyval(wavelength_nm * 1e-3, self.coefficients)

    def _edge_slope(self, edge_nm: float) -> float:
        if self.kind == TABULATED:
            return float(self._interp.derivative()(edge_nm))
        deriv = npoly.polyder(self.coefficients)
        # derivative is per um; convert to per nm
        return float(npoly.polyval(edge_nm * 1e-3, deriv)) * 1e-3

    def coverage(self, wavelength_nm) -> np.ndarray:
        """Boolean mask of points inside the validity range."""
        lam = np.asarray(wavelength_nm, dtype=np.float64)
        lo, hi = self.valid_range_nm
        return (lam >= lo) & (lam <= hi)

    def n_eff(self, wavelength_nm, extrapolate: bool = False):
        """Effective index at the given wavelength(s) in nm.

        Scalar in, scalar out; array in, array out.
        """
        lam = np.asarray(wavelength_nm, dtype=np.float64)
        scalar = lam.ndim == 0
        lam = np.atleast_1d(lam)
        if np.any(lam <= 0):
            raise ValueError("wavelength must be positive")
        inside = self.coverage(lam)
        if not inside.all():
            if not extrapolate:
                bad = lam[~inside]
                raise OutOfRangeError(
                    f"{self.band_label}: wavelength(s) {bad.tolist()} nm outside "
                    f"validity range {self.valid_range_nm} nm"
                )
            warnings.warn(
                f"{self.band_label}: extrapolating {int((~inside).sum())} point(s) "
                f"beyond {self.valid_range_nm} nm with clamped boundary slope",
                ExtrapolationWarning,
                stacklevel=2,
            )
        out = np.empty_like(lam)
        out[inside] = self._raw(lam[inside])
        if not inside.all():
            lo, hi = self.valid_range_nm
            below = lam < lo
            above = lam > hi
            if below.any():
                out[below] = self._raw(np.array([lo]))[0] + self._edge_slope(lo) * (lam[below] - lo)
            if above.any():
                out[above] = self._raw(np.array([hi]))[0] + self._edge_slope(hi) * (lam[above] - hi)
        return float(out[0]) if scalar else out

    def wave_vector(self, wavelength_nm, extrapolate: bool = False):
        """Wave vector k = 2*pi*n_eff/lambda in rad/um."""
        n = self.n_eff(wavelength_nm, extrapolate=extrapolate)
        lam_um = np.asarray(wavelength_nm, dtype=np.float64) * 1e-3
        k = 2.0 * np.pi * n / lam_um
        return float(k) if np.ndim(wavelength_nm) == 0 else k


def from_table(band_label: str, samples, valid_range_nm=None) -> DispersionModel:
    """Build a tabulated model; validity defaults to the table extent."""
    samples = np.asarray(samples, dtype=np.float64)
    if valid_range_nm is None:
        valid_range_nm = (float(samples[0, 0]), float(samples[-1, 0]))
    return DispersionModel(band_label, TABULATED, tuple(valid_range_nm), samples=samples)


def from_polynomial(band_label: str, coefficients, valid_range_nm) -> DispersionModel:
    """Build a polynomial model; coefficients are ascending powers of lambda(um)."""
    return DispersionModel(
        band_label, POLYNOMIAL, tuple(valid_range_nm), coefficients=tuple(coefficients)
    )


def load_dispersion_csv(path, band_label: str, valid_range_nm=None) -> DispersionModel:
    """Load a ``wavelength_nm,n_eff`` CSV table into a tabulated model.

    Rows must be sorted by strictly increasing wavelength; unsorted or
    duplicate wavelengths are rejected.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["wavelength_nm", "n_eff"]:
            raise ValueError(f"{path}: expected header 'wavelength_nm,n_eff', got {header}")
        for row in reader:
            if not row:
                continue
            rows.append((float(row[0]), float(row[1])))
    samples = np.asarray(rows, dtype=np.float64)
    if samples.ndim != 2 or np.any(np.diff(samples[:, 0]) <= 0):
        raise ValueError(f"{path}: wavelengths must be strictly increasing without duplicates")
    return from_table(band_label, samples, valid_range_nm)


# Default fits. Quadratics in lambda(um) for the two interacting bands of
# the reference ridge design. The telecom-band slope and curvature are
# set to plausible guided-mode values; the NIR coefficients then follow
# from the two period anchors (4.45 um <-> 1505 nm, 4.55 um <-> 1610 nm)
# through the degenerate QPM relation period = (lam/2)/(n_nir - n_tel).
_TELECOM_COEFFS = (2.7374, -0.59, 0.013)
_NIR_COEFFS = (3.065768059233646, -1.7287704128081596, 0.5)

_TELECOM_RANGE_NM = (1100.0, 2400.0)
_NIR_RANGE_NM = (600.0, 850.0)


def default_telecom_model() -> DispersionModel:
    """Default fit for the signal/idler (telecom) fundamental TE band."""
    return from_polynomial("TE00-telecom", _TELECOM_COEFFS, _TELECOM_RANGE_NM)


def default_nir_model() -> DispersionModel:
    """Default fit for the pump / second-harmonic (NIR) fundamental TE band."""
    return from_polynomial("TE00-NIR", _NIR_COEFFS, _NIR_RANGE_NM)


def qpm_period_um(
    nir: DispersionModel,
    telecom: DispersionModel,
    signal_nm: float,
    extrapolate: bool = False,
) -> float:
    """Degenerate first-order QPM period for a signal wavelength.

    The pump sits at signal/2; the period is lam_pump / (n_pump - n_signal)
    with both wavelengths in consistent units (um here).
    """
    n_p = nir.n_eff(signal_nm / 2.0, extrapolate=extrapolate)
    n_s = telecom.n_eff(signal_nm, extrapolate=extrapolate)
    pump_um = signal_nm * 1e-3 / 2.0
    return pump_um / (n_p - n_s)
