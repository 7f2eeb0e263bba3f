"""Poling-domain patterns and their spatial structure factor.

A step-chirped design is a ladder of sections, each holding a fixed
number of identical poling periods; the period grows by one step per
section. Domain boundaries are generated on an exact integer picometre
grid so that pattern lengths follow from integer arithmetic, then
converted once to micrometres.

The structure factor is the normalized spatial Fourier transform of the
domain sign profile d(z)/|d|; its squared magnitude multiplies every
conversion-efficiency and pair-spectral-density formula downstream.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidDesignError

_PM_PER_UM = 1_000_000


def _to_picometres(value_um: float, what: str) -> int:
    pm = value_um * _PM_PER_UM
    snapped = round(pm)
    if snapped <= 0 and pm > 0:
        raise InvalidDesignError(f"{what} of {value_um} um is below the pm grid")
    return snapped


@dataclass(frozen=True)
class ChirpDesign:
    """Step-chirped poling design.

    ``sections`` blocks of ``periods_per_section`` periods each; block i
    has period base_period_um + i * step_nm. ``duty_cycle`` is the
    positive-sign fraction of each period. Lengths are snapped to an
    exact picometre grid.
    """

    base_period_um: float
    step_nm: float = 0.0
    sections: int = 1
    periods_per_section: int = 1
    duty_cycle: float = 0.5

    def __post_init__(self):
        if self.base_period_um <= 0:
            raise InvalidDesignError("base period must be positive")
        if self.step_nm < 0:
            raise InvalidDesignError("chirp step must be non-negative")
        if self.sections < 1 or self.periods_per_section < 1:
            raise InvalidDesignError("sections and periods per section must be >= 1")
        if not 0.0 < self.duty_cycle < 1.0:
            raise InvalidDesignError("duty cycle must lie strictly inside (0, 1)")

    @property
    def base_period_pm(self) -> int:
        return _to_picometres(self.base_period_um, "base period")

    @property
    def step_pm(self) -> int:
        return round(self.step_nm * 1000)

    def period_um(self, section: int) -> float:
        """Poling period of one section, in um."""
        if not 0 <= section < self.sections:
            raise IndexError(f"section {section} outside 0..{self.sections - 1}")
        return (self.base_period_pm + section * self.step_pm) / _PM_PER_UM

    @property
    def total_length_pm(self) -> int:
        """Closed-form device length on the picometre grid (exact)."""
        s = self.sections
        return self.periods_per_section * (
            s * self.base_period_pm + self.step_pm * (s * (s - 1) // 2)
        )

    @property
    def total_length_um(self) -> float:
        return self.total_length_pm / _PM_PER_UM


@dataclass(eq=False)
class DomainPattern:
    """Ordered poling domains: boundary positions plus a sign per domain.

    ``boundaries_um`` starts at 0 and ends at the device length;
    ``signs`` holds +1/-1 per domain (one fewer entry than boundaries).
    Instances are treated as immutable once built.
    """

    boundaries_um: np.ndarray
    signs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.boundaries_um = np.asarray(self.boundaries_um, dtype=np.float64)
        self.signs = np.asarray(self.signs, dtype=np.float64)
        if self.boundaries_um.ndim != 1 or self.boundaries_um.size < 2:
            raise InvalidDesignError("need at least two boundaries")
        if self.boundaries_um[0] != 0.0:
            raise InvalidDesignError("first boundary must sit at z = 0")
        if np.any(np.diff(self.boundaries_um) <= 0):
            raise InvalidDesignError("boundaries must be strictly increasing")
        if self.signs.size != self.boundaries_um.size - 1:
            raise InvalidDesignError("need exactly one sign per domain")
        if not np.all(np.abs(self.signs) == 1.0):
            raise InvalidDesignError("signs must be +1 or -1")

    @property
    def length_um(self) -> float:
        return float(self.boundaries_um[-1])

    @property
    def n_domains(self) -> int:
        return int(self.signs.size)

    @property
    def domain_lengths_um(self) -> np.ndarray:
        return np.diff(self.boundaries_um)


@dataclass(frozen=True)
class StructureFactorResult:
    """Structure factor at one phase mismatch: complex amplitude and |.|^2."""

    delta_k_per_um: float
    amplitude: complex
    magnitude_squared: float


def generate_pattern(design: ChirpDesign) -> DomainPattern:
    """Lay out the domains of a chirp design along z, section 0 first.

    Within each period the positive-sign domain comes first with length
    duty_cycle * period (picometre-rounded), followed by the negative
    domain filling the remainder.
    """
    periods_pm = design.base_period_pm + design.step_pm * np.arange(
        design.sections, dtype=np.int64
    )
    periods_pm = np.repeat(periods_pm, design.periods_per_section)
    up_pm = np.rint(design.duty_cycle * periods_pm).astype(np.int64)
    down_pm = periods_pm - up_pm
    if np.any(up_pm < 1) or np.any(down_pm < 1):
        raise InvalidDesignError("duty cycle collapses a domain below the pm grid")

    lengths_pm = np.empty(2 * periods_pm.size, dtype=np.int64)
    lengths_pm[0::2] = up_pm
    lengths_pm[1::2] = down_pm
    boundaries_pm = np.concatenate(([0], np.cumsum(lengths_pm)))
    signs = np.empty(lengths_pm.size, dtype=np.float64)
    signs[0::2] = 1.0
    signs[1::2] = -1.0

    assert boundaries_pm[-1] == design.total_length_pm
    return DomainPattern(
        boundaries_um=boundaries_pm / 1e6,
        signs=signs,
        meta={
            "orientation": "period-ascending-along-z",
            "sections": design.sections,
            "periods_per_section": design.periods_per_section,
            "base_period_um": design.base_period_um,
            "step_nm": design.step_nm,
            "duty_cycle": design.duty_cycle,
        },
    )


def _sweep_arrays(pattern: DomainPattern):
    bz = np.ascontiguousarray(pattern.boundaries_um)
    signs = pattern.signs
    bw = np.empty(bz.size, dtype=np.float64)
    bw[0] = -signs[0]
    bw[-1] = signs[-1]
    bw[1:-1] = signs[:-1] - signs[1:]
    mz = 0.5 * (bz[1:] + bz[:-1])
    ml = np.diff(bz)
    return bz, bw, mz, ml, np.ascontiguousarray(signs)


def sweep_response(pattern: DomainPattern, delta_k_per_um) -> np.ndarray:
    """Complex structure factor at each mismatch value (rad/um).

    Vector form used by the spectrum modules; every grid point is an
    independent compensated sum, so output is deterministic regardless
    of worker count.
    """
    dk = np.ascontiguousarray(np.atleast_1d(np.asarray(delta_k_per_um, dtype=np.float64)))
    bz, bw, mz, ml, ms = _sweep_arrays(pattern)
    out = np.empty(dk.size, dtype=np.complex128)
    _kernels.sweep(bz, bw, mz, ml, ms, pattern.length_um, dk, out)
    return out


def structure_factor(pattern: DomainPattern, delta_k_per_um: float) -> StructureFactorResult:
    """Structure factor of the pattern at a single phase mismatch."""
    amp = complex(sweep_response(pattern, float(delta_k_per_um))[0])
    return StructureFactorResult(
        delta_k_per_um=float(delta_k_per_um),
        amplitude=amp,
        magnitude_squared=abs(amp) ** 2,
    )


def structure_factor_sweep(pattern: DomainPattern, delta_k_grid) -> list[StructureFactorResult]:
    """Element-wise :func:`structure_factor` over a mismatch grid."""
    grid = np.atleast_1d(np.asarray(delta_k_grid, dtype=np.float64))
    if grid.size == 0:
        raise ValueError("mismatch grid must not be empty")
    amps = sweep_response(pattern, grid)
    return [
        StructureFactorResult(float(dk), complex(a), abs(a) ** 2)
        for dk, a in zip(grid, amps)
    ]


def export_pattern_csv(pattern: DomainPattern, path) -> None:
    """Write one row per domain: z_start_um, z_end_um, sign."""
    bz = pattern.boundaries_um
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["z_start_um", "z_end_um", "sign"])
        for z0, z1, s in zip(bz[:-1], bz[1:], pattern.signs):
            writer.writerow([f"{z0:.17g}", f"{z1:.17g}", f"{int(s):+d}"])
