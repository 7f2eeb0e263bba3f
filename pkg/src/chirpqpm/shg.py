"""Second-harmonic conversion efficiency, measured and modeled.

The measured figure normalizes fiber power readings to on-chip values
and reports %/W/cm^2. The model combines the mode-overlap effective
area, the grating structure factor, and the material nonlinearity into
the same units, so measured and simulated spectra are directly
comparable.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT_M_PER_S, VACUUM_PERMITTIVITY_F_PER_M
from .dispersion import DispersionModel
from .errors import GridMismatchError, NonPositivePowerError, ZeroOverlapError
from .grating import DomainPattern, sweep_response
from .spectra import STATUS_EXTRAPOLATED, STATUS_OK, STATUS_OUT_OF_RANGE, Spectrum


@dataclass(frozen=True)
class PhysicalConstants:
    """Vacuum constants plus the effective nonlinear coefficient.

    Only ``d_eff_pm_per_v`` is meant to be overridden (the underlying
    tensor component is negative; the magnitude is stored since every
    quantity here uses its square).
    """

    vacuum_permittivity_f_per_m: float = VACUUM_PERMITTIVITY_F_PER_M
    speed_of_light_m_per_s: float = SPEED_OF_LIGHT_M_PER_S
    d_eff_pm_per_v: float = 27.0


@dataclass(frozen=True)
class PowerReading:
    """Fiber-side power readings and coupling efficiencies for one sweep point."""

    p_fh_mw: float
    p_sh_uw: float
    eta_fh: float
    eta_sh: float
    length_cm: float

    def __post_init__(self):
        for name in ("p_fh_mw", "p_sh_uw", "eta_fh", "eta_sh", "length_cm"):
            if getattr(self, name) <= 0:
                raise NonPositivePowerError(f"{name} must be positive")
        if self.eta_fh > 1 or self.eta_sh > 1:
            raise ValueError("coupling efficiencies cannot exceed 1")


def normalized_efficiency_measured(reading: PowerReading) -> float:
    """Normalized conversion efficiency in %/W/cm^2 from fiber readings.

    On-chip powers are the fiber readings divided by the respective
    coupling efficiencies; the result is (P_sh / P_fh^2) / L^2 scaled to
    percent. Linear in the harmonic power, inverse-quadratic in the
    fundamental power.
    """
    p_fh_w = reading.p_fh_mw * 1e-3 / reading.eta_fh
    p_sh_w = reading.p_sh_uw * 1e-6 / reading.eta_sh
    return 100.0 * p_sh_w / (p_fh_w**2 * reading.length_cm**2)


@dataclass(eq=False)
class ModeField:
    """Transverse mode field sampled on a rectangular (x, z) grid.

    ``e_field`` holds the dominant field component in arbitrary linear
    units on the axes' outer product (shape len(x) by len(z));
    ``nonlinear_pm_per_v`` is the local nonlinear coefficient, zero
    outside the nonlinear material.
    """

    x_nm: np.ndarray
    z_nm: np.ndarray
    e_field: np.ndarray
    nonlinear_pm_per_v: np.ndarray

    def __post_init__(self):
        self.x_nm = np.asarray(self.x_nm, dtype=np.float64)
        self.z_nm = np.asarray(self.z_nm, dtype=np.float64)
        self.e_field = np.asarray(self.e_field, dtype=np.float64)
        self.nonlinear_pm_per_v = np.asarray(self.nonlinear_pm_per_v, dtype=np.float64)
        for axis in (self.x_nm, self.z_nm):
            if axis.size < 2:
                raise ValueError("grid axes need at least two samples")
            steps = np.diff(axis)
            if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9):
                raise ValueError("grid axes must be uniformly increasing")
        shape = (self.x_nm.size, self.z_nm.size)
        if self.e_field.shape != shape or self.nonlinear_pm_per_v.shape != shape:
            raise ValueError(f"field and mask arrays must have shape {shape}")
        if not np.any(self.nonlinear_pm_per_v):
            raise ValueError("nonlinear mask is identically zero")

    @property
    def dx_nm(self) -> float:
        return float(self.x_nm[1] - self.x_nm[0])

    @property
    def dz_nm(self) -> float:
        return float(self.z_nm[1] - self.z_nm[0])


def load_mode_field_csv(path) -> ModeField:
    """Load a row-major ``x_nm,z_nm,E_z,d_pm_per_V`` grid file."""
    xs, zs, es, ds = [], [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["x_nm", "z_nm", "E_z", "d_pm_per_V"]:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            if not row:
                continue
            xs.append(float(row[0]))
            zs.append(float(row[1]))
            es.append(float(row[2]))
            ds.append(float(row[3]))
    x_axis = np.unique(xs)
    z_axis = np.unique(zs)
    if len(xs) != x_axis.size * z_axis.size:
        raise ValueError(f"{path}: grid is not rectangular")
    expect_x = np.repeat(x_axis, z_axis.size)
    expect_z = np.tile(z_axis, x_axis.size)
    if not (np.array_equal(xs, expect_x) and np.array_equal(zs, expect_z)):
        raise ValueError(f"{path}: rows are not in row-major grid order")
    shape = (x_axis.size, z_axis.size)
    return ModeField(x_axis, z_axis, np.reshape(es, shape), np.reshape(ds, shape))


def effective_area(
    fh: ModeField, sh: ModeField, d_eff_pm_per_v: float = 27.0
) -> float:
    """Nonlinearity-weighted mode overlap area in um^2.

    Midpoint quadrature on the shared grid of
    [int fh^2]^2 * int sh^2 / [int (d/d_eff) fh^2 sh]^2.
    Invariant under separate rescaling of either field amplitude.
    """
    if fh.e_field.shape != sh.e_field.shape:
        raise GridMismatchError("mode grids differ in shape")
    if not (
        np.allclose(fh.x_nm, sh.x_nm, rtol=1e-12, atol=0)
        and np.allclose(fh.z_nm, sh.z_nm, rtol=1e-12, atol=0)
    ):
        raise GridMismatchError("mode grids differ in axes")

    cell_um2 = (fh.dx_nm * 1e-3) * (fh.dz_nm * 1e-3)
    fh2 = fh.e_field**2
    i_fh = fh2.sum() * cell_um2
    i_sh = (sh.e_field**2).sum() * cell_um2
    weight = fh.nonlinear_pm_per_v / d_eff_pm_per_v
    i_cross = (weight * fh2 * sh.e_field).sum() * cell_um2
    if i_cross == 0.0:
        raise ZeroOverlapError("nonlinearity-weighted overlap integral vanished")
    return float(i_fh**2 * i_sh / i_cross**2)


def _mismatch_per_um(lambda_fh_nm, n_fh, n_sh) -> np.ndarray:
    # k(SH) - 2 k(FH) = (4 pi / lambda_um) * (n_sh - n_fh)
    lam_um = np.asarray(lambda_fh_nm, dtype=np.float64) * 1e-3
    return 4.0 * np.pi * (np.asarray(n_sh) - np.asarray(n_fh)) / lam_um


def _efficiency_prefactor(lambda_fh_nm, n_fh, n_sh, s_eff_um2, k: PhysicalConstants):
    # SI value is per (W m^2); 1 W^-1 m^-2 = 1e-2 %/W/cm^2
    lam_m = np.asarray(lambda_fh_nm, dtype=np.float64) * 1e-9
    d_m_per_v = k.d_eff_pm_per_v * 1e-12
    s_m2 = s_eff_um2 * 1e-12
    si = (
        8.0
        * np.pi**2
        * d_m_per_v**2
        / (
            k.vacuum_permittivity_f_per_m
            * k.speed_of_light_m_per_s
            * np.asarray(n_fh) ** 2
            * np.asarray(n_sh)
            * lam_m**2
            * s_m2
        )
    )
    return si * 1e-2


def theoretical_efficiency(
    lambda_fh_nm: float,
    disp_fh: DispersionModel,
    disp_sh: DispersionModel,
    pattern: DomainPattern,
    s_eff_um2: float,
    constants: PhysicalConstants = PhysicalConstants(),
    extrapolate: bool = False,
) -> float:
    """Modeled conversion efficiency at one fundamental wavelength, %/W/cm^2.

    The phase mismatch k(SH) - 2 k(FH) is handed to the pattern's
    structure factor; the prefactor scales with d_eff^2 / S_eff and the
    inverse square of the wavelength.
    """
    n1 = disp_fh.n_eff(lambda_fh_nm, extrapolate=extrapolate)
    n2 = disp_sh.n_eff(lambda_fh_nm / 2.0, extrapolate=extrapolate)
    dk = float(_mismatch_per_um(lambda_fh_nm, n1, n2))
    g2 = abs(sweep_response(pattern, dk)[0]) ** 2
    return float(_efficiency_prefactor(lambda_fh_nm, n1, n2, s_eff_um2, constants) * g2)


def shg_spectrum(
    grid_nm,
    disp_fh: DispersionModel,
    disp_sh: DispersionModel,
    pattern: DomainPattern,
    s_eff_um2: float,
    constants: PhysicalConstants = PhysicalConstants(),
    extrapolate: bool = False,
) -> Spectrum:
    """Modeled efficiency spectrum over a fundamental-wavelength grid.

    Points whose wavelengths (fundamental or harmonic) leave a model's
    validity range are flagged per point: NaN + "out_of_range" when
    extrapolation is off, computed + "extrapolated" when it is on.
    """
    lam = np.asarray(grid_nm, dtype=np.float64)
    in_fh = disp_fh.coverage(lam)
    in_sh = disp_sh.coverage(lam / 2.0)
    inside = in_fh & in_sh
    usable = np.ones_like(inside) if extrapolate else inside

    values = np.full(lam.shape, np.nan)
    if usable.any():
        n1 = disp_fh.n_eff(lam[usable], extrapolate=extrapolate)
        n2 = disp_sh.n_eff(lam[usable] / 2.0, extrapolate=extrapolate)
        dk = _mismatch_per_um(lam[usable], n1, n2)
        g2 = np.abs(sweep_response(pattern, dk)) ** 2
        values[usable] = (
            _efficiency_prefactor(lam[usable], n1, n2, s_eff_um2, constants) * g2
        )

    status = []
    for ok, used in zip(inside, usable):
        if ok:
            status.append(STATUS_OK)
        elif used:
            status.append(STATUS_EXTRAPOLATED)
        else:
            status.append(STATUS_OUT_OF_RANGE)
    return Spectrum(lam, values, "%/W/cm^2", status)
