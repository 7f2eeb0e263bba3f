"""Sampled spectra on a wavelength grid, with units and per-point status."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

STATUS_OK = "ok"
STATUS_EXTRAPOLATED = "extrapolated"
STATUS_OUT_OF_RANGE = "out_of_range"


@dataclass(eq=False)
class Spectrum:
    """Function values sampled on an increasing wavelength grid.

    ``status`` carries one short token per point ("ok", "extrapolated",
    "out_of_range"); points flagged out of range hold NaN values.
    """

    wavelength_nm: np.ndarray
    values: np.ndarray
    unit: str
    status: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.wavelength_nm = np.asarray(self.wavelength_nm, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.wavelength_nm.shape != self.values.shape:
            raise ValueError("wavelength and value arrays differ in length")
        if not self.status:
            self.status = [STATUS_OK] * self.wavelength_nm.size
        if len(self.status) != self.wavelength_nm.size:
            raise ValueError("status list length does not match grid")

    @property
    def peak_value(self) -> float:
        return float(np.nanmax(self.values))

    @property
    def peak_wavelength_nm(self) -> float:
        return float(self.wavelength_nm[np.nanargmax(self.values)])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["wavelength_nm", "value", "unit", "status"])
            for lam, val, st in zip(self.wavelength_nm, self.values, self.status):
                writer.writerow([repr(float(lam)), repr(float(val)), self.unit, st])


def contiguous_span_above(spectrum: Spectrum, fraction: float) -> tuple[float, float, float]:
    """Contiguous wavelength span holding the peak where values stay at or
    above ``fraction`` of the peak. Returns (lo_nm, hi_nm, width_nm)."""
    values = spectrum.values
    lam = spectrum.wavelength_nm
    peak_idx = int(np.nanargmax(values))
    cut = fraction * values[peak_idx]
    with np.errstate(invalid="ignore"):
        above = values >= cut
    start = peak_idx
    while start > 0 and above[start - 1]:
        start -= 1
    end = peak_idx
    while end < lam.size - 1 and above[end + 1]:
        end += 1
    return float(lam[start]), float(lam[end]), float(lam[end] - lam[start])


def read_spectrum_csv(path) -> Spectrum:
    """Read a spectrum written by :meth:`Spectrum.write_csv`."""
    wavelengths = []
    values = []
    status = []
    unit = ""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["wavelength_nm", "value"]:
            raise ValueError(f"unexpected spectrum header: {header}")
        for row in reader:
            wavelengths.append(float(row[0]))
            values.append(float(row[1]))
            unit = row[2] if len(row) > 2 else ""
            status.append(row[3] if len(row) > 3 else STATUS_OK)
    return Spectrum(np.array(wavelengths), np.array(values), unit, status)
