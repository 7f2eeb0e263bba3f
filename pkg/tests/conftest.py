import pytest

from chirpqpm import (
    ChirpDesign,
    default_nir_model,
    default_telecom_model,
    generate_pattern,
)

# reference device: 101 sections of 15 periods, 4.45 um base, 1 nm step
REFERENCE_DESIGN = ChirpDesign(
    base_period_um=4.45,
    step_nm=1.0,
    sections=101,
    periods_per_section=15,
    duty_cycle=0.5,
)


@pytest.fixture(scope="session")
def reference_pattern():
    return generate_pattern(REFERENCE_DESIGN)


@pytest.fixture(scope="session")
def telecom_model():
    return default_telecom_model()


@pytest.fixture(scope="session")
def nir_model():
    return default_nir_model()
