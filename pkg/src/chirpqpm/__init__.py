"""chirpqpm: design and simulation toolkit for step-chirped QPM waveguides.

Generates chirped poling-domain patterns, evaluates their structure
factor, models second-harmonic efficiency and down-conversion spectral
density from dispersion data, extracts bandwidths, and analyzes photon
coincidence statistics (CAR, pair generation rate, brightness).
"""
from .counting import (
    BrightnessFit,
    CoincidenceHistogram,
    PgrEstimate,
    TimestampStream,
    accidental_level,
    brightness_fit,
    car,
    coincidence_histogram,
    load_timestamps_csv,
    pgr,
    simulate_streams,
    write_timestamps_csv,
)
from .dispersion import (
    DispersionModel,
    ExtrapolationWarning,
    WaveVectorQuery,
    default_nir_model,
    default_telecom_model,
    from_polynomial,
    from_table,
    load_dispersion_csv,
    qpm_period_um,
)
from .errors import (
    ChirpQpmError,
    ConfigError,
    DegenerateFitError,
    DegenerateTableError,
    GridMismatchError,
    InvalidDesignError,
    NonMonotonicGridError,
    NonPositivePowerError,
    NothingAboveThresholdError,
    OutOfRangeError,
    UnsortedStreamError,
    ZeroAccidentalsError,
    ZeroCoincidencesError,
    ZeroOverlapError,
)
from .grating import (
    ChirpDesign,
    DomainPattern,
    StructureFactorResult,
    export_pattern_csv,
    generate_pattern,
    structure_factor,
    structure_factor_sweep,
    sweep_response,
)
from .shg import (
    ModeField,
    PhysicalConstants,
    PowerReading,
    effective_area,
    load_mode_field_csv,
    normalized_efficiency_measured,
    shg_spectrum,
    theoretical_efficiency,
)
from .spdc import (
    BandReport,
    SpdcConfig,
    TrendReport,
    default_signal_grid_nm,
    extract_bandwidth,
    idler_wavelength_nm,
    pair_rate_trend,
    phase_mismatch,
    spectral_density,
)
from .spectra import Spectrum, contiguous_span_above, read_spectrum_csv

__version__ = "0.1.0"
