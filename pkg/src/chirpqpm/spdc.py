"""Down-conversion spectra and bandwidth extraction.

Pair emission is modeled for a CW pump: each signal wavelength fixes
the idler through 1/lam_i = 1/lam_p - 1/lam_s, and the relative
spectral density is the grating structure factor evaluated at the
material phase mismatch k_p - k_s - k_i. The density is a shape-only,
peak-normalized quantity; vacuum-field prefactors and detector response
are out of scope.

Photons on the short-wavelength side of degeneracy are labeled signal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import bandwidth_thz
from .dispersion import DispersionModel
from .errors import NonMonotonicGridError, NothingAboveThresholdError
from .grating import DomainPattern, sweep_response
from .spectra import STATUS_EXTRAPOLATED, STATUS_OK, STATUS_OUT_OF_RANGE, Spectrum


def idler_wavelength_nm(pump_nm: float, signal_nm: float) -> float:
    """Idler wavelength fixed by energy conservation, in nm."""
    inv = 1.0 / pump_nm - 1.0 / signal_nm
    if inv <= 0:
        raise ValueError(
            f"signal {signal_nm} nm too close to pump {pump_nm} nm: idler diverges"
        )
    return 1.0 / inv


@dataclass(eq=False)
class SpdcConfig:
    """Inputs for a pair-spectrum computation."""

    pump_nm: float
    signal_grid_nm: np.ndarray
    pump_dispersion: DispersionModel
    pair_dispersion: DispersionModel
    pattern: DomainPattern

    def __post_init__(self):
        self.signal_grid_nm = np.asarray(self.signal_grid_nm, dtype=np.float64)
        if self.pump_nm <= 0:
            raise ValueError("pump wavelength must be positive")
        if np.any(self.signal_grid_nm <= self.pump_nm):
            raise ValueError("every signal wavelength must exceed the pump wavelength")
        # energy conservation must give a positive, finite idler everywhere
        inv = 1.0 / self.pump_nm - 1.0 / self.signal_grid_nm
        if np.any(inv <= 0):
            raise ValueError("idler wavelength diverges inside the signal grid")


def default_signal_grid_nm(start: float = 1190.0, stop: float = 1700.0, step: float = 0.1):
    """Default signal sweep: 0.1 nm resolution over 1190..1700 nm."""
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def phase_mismatch(signal_nm, cfg: SpdcConfig, extrapolate: bool = False):
    """Material phase mismatch k_p - k_s - k_i in rad/um.

    The grating contribution is deliberately excluded; it enters through
    the structure factor. Symmetric under signal/idler exchange.
    """
    lam_s = np.asarray(signal_nm, dtype=np.float64)
    scalar = lam_s.ndim == 0
    lam_s = np.atleast_1d(lam_s)
    lam_i = 1.0 / (1.0 / cfg.pump_nm - 1.0 / lam_s)
    k_p = cfg.pump_dispersion.wave_vector(cfg.pump_nm, extrapolate=extrapolate)
    k_s = cfg.pair_dispersion.wave_vector(lam_s, extrapolate=extrapolate)
    k_i = cfg.pair_dispersion.wave_vector(lam_i, extrapolate=extrapolate)
    out = k_p - k_s - k_i
    return float(out[0]) if scalar else out


def spectral_density(cfg: SpdcConfig, extrapolate: bool = False) -> Spectrum:
    """Relative pair spectral density on the signal grid, peak-normalized.

    Grid points whose signal or idler wavelength leaves the pair-band
    model's validity range are flagged per point instead of failing the
    whole sweep.
    """
    lam_s = cfg.signal_grid_nm
    lam_i = 1.0 / (1.0 / cfg.pump_nm - 1.0 / lam_s)
    inside = cfg.pair_dispersion.coverage(lam_s) & cfg.pair_dispersion.coverage(lam_i)
    usable = np.ones_like(inside) if extrapolate else inside

    values = np.full(lam_s.shape, np.nan)
    if usable.any():
        dk = phase_mismatch(lam_s[usable], cfg, extrapolate=extrapolate)
        values[usable] = np.abs(sweep_response(cfg.pattern, dk)) ** 2
    peak = np.nanmax(values) if np.any(np.isfinite(values)) else np.nan
    if np.isfinite(peak) and peak > 0:
        values = values / peak

    status = []
    for ok, used in zip(inside, usable):
        if ok:
            status.append(STATUS_OK)
        elif used:
            status.append(STATUS_EXTRAPOLATED)
        else:
            status.append(STATUS_OUT_OF_RANGE)
    return Spectrum(lam_s, values, "relative", status)


@dataclass(frozen=True)
class BandReport:
    """Bandwidths extracted from a signal-side spectrum.

    Pair quantities follow from energy conservation: frequency extents
    double, and wavelength spans run from the band edge to its idler
    image. The 3-dB band is the contiguous half-peak span containing
    the global peak.
    """

    signal_band_lo_nm: float
    signal_band_hi_nm: float
    signal_full_bw_thz: float
    signal_3db_bw_thz: float
    pair_full_bw_thz: float
    pair_full_bw_nm: float
    pair_3db_bw_thz: float
    pair_3db_bw_nm: float
    threshold_used: float

    def to_flat_dict(self) -> dict:
        return {
            "signal_band_lo_nm": self.signal_band_lo_nm,
            "signal_band_hi_nm": self.signal_band_hi_nm,
            "signal_full_bw_thz": self.signal_full_bw_thz,
            "signal_3db_bw_thz": self.signal_3db_bw_thz,
            "pair_full_bw_thz": self.pair_full_bw_thz,
            "pair_full_bw_nm": self.pair_full_bw_nm,
            "pair_3db_bw_thz": self.pair_3db_bw_thz,
            "pair_3db_bw_nm": self.pair_3db_bw_nm,
            "threshold_used": self.threshold_used,
        }


def extract_bandwidth(spectrum: Spectrum, noise, pump_nm: float) -> BandReport:
    """Bandwidths of the band where the spectrum clears 3x the noise sigma.

    ``noise`` is a sample of background counts; the threshold is three
    times its standard deviation, so rescaling spectrum and noise
    together leaves the report unchanged.
    """
    lam = spectrum.wavelength_nm
    if np.any(np.diff(lam) <= 0):
        raise NonMonotonicGridError("spectrum grid must be strictly increasing")
    noise = np.asarray(noise, dtype=np.float64)
    if noise.size == 0:
        raise ValueError("noise sample must not be empty")
    threshold = 3.0 * float(np.std(noise))

    with np.errstate(invalid="ignore"):
        above = spectrum.values >= threshold
    idx = np.flatnonzero(above)
    if idx.size == 0:
        raise NothingAboveThresholdError(
            f"no spectral bin reaches the 3-sigma threshold {threshold!r}"
        )
    lo, hi = float(lam[idx[0]]), float(lam[idx[-1]])
    if lo <= pump_nm:
        raise ValueError("band edge at or below the pump wavelength")
    signal_full = bandwidth_thz(lo, hi)

    # contiguous half-peak span containing the global peak
    peak_idx = int(np.nanargmax(spectrum.values))
    half = spectrum.values[peak_idx] / 2.0
    with np.errstate(invalid="ignore"):
        above_half = spectrum.values >= half
    start = peak_idx
    while start > 0 and above_half[start - 1]:
        start -= 1
    end = peak_idx
    while end < lam.size - 1 and above_half[end + 1]:
        end += 1
    lo3, hi3 = float(lam[start]), float(lam[end])
    signal_3db = bandwidth_thz(lo3, hi3)

    return BandReport(
        signal_band_lo_nm=lo,
        signal_band_hi_nm=hi,
        signal_full_bw_thz=signal_full,
        signal_3db_bw_thz=signal_3db,
        pair_full_bw_thz=2.0 * signal_full,
        pair_full_bw_nm=idler_wavelength_nm(pump_nm, lo) - lo,
        pair_3db_bw_thz=2.0 * signal_3db,
        pair_3db_bw_nm=idler_wavelength_nm(pump_nm, lo3) - lo3,
        threshold_used=threshold,
    )


@dataclass(frozen=True)
class TrendReport:
    """Channelized coincidence rates ordered by wavelength."""

    wavelengths_nm: tuple
    rates: tuple
    max_channel_nm: float
    max_rate: float
    min_channel_nm: float
    min_rate: float
    monotonic_segments: tuple

    def to_flat_dict(self) -> dict:
        return {
            "channels_nm": list(self.wavelengths_nm),
            "rates": list(self.rates),
            "max_channel_nm": self.max_channel_nm,
            "max_rate": self.max_rate,
            "min_channel_nm": self.min_channel_nm,
            "min_rate": self.min_rate,
            "monotonic_segments": [list(seg) for seg in self.monotonic_segments],
        }


def pair_rate_trend(points) -> TrendReport:
    """Sort channelized rates by wavelength and summarize their shape.

    Segments are maximal runs of one direction ("increasing",
    "decreasing", "flat") given as (direction, start_nm, end_nm).
    """
    pts = sorted((float(w), float(r)) for w, r in points)
    if not pts:
        raise ValueError("need at least one channel")
    lam = tuple(p[0] for p in pts)
    rates = tuple(p[1] for p in pts)
    i_max = max(range(len(rates)), key=rates.__getitem__)
    i_min = min(range(len(rates)), key=rates.__getitem__)

    segments = []
    if len(pts) > 1:
        def direction(a, b):
            if b > a:
                return "increasing"
            if b < a:
                return "decreasing"
            return "flat"

        seg_start = 0
        current = direction(rates[0], rates[1])
        for i in range(1, len(rates) - 1):
            nxt = direction(rates[i], rates[i + 1])
            if nxt != current:
                segments.append((current, lam[seg_start], lam[i]))
                seg_start = i
                current = nxt
        segments.append((current, lam[seg_start], lam[-1]))

    return TrendReport(
        wavelengths_nm=lam,
        rates=rates,
        max_channel_nm=lam[i_max],
        max_rate=rates[i_max],
        min_channel_nm=lam[i_min],
        min_rate=rates[i_min],
        monotonic_segments=tuple(segments),
    )
