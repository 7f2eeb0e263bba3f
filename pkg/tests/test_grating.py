import math

import numpy as np
import pytest

from chirpqpm import (
    ChirpDesign,
    DomainPattern,
    InvalidDesignError,
    export_pattern_csv,
    generate_pattern,
    structure_factor,
    structure_factor_sweep,
    sweep_response,
)
from chirpqpm import _kernels
from conftest import REFERENCE_DESIGN
from oracles import resolvable_mismatch_samples, structure_factor_quadrature


def uniform_pattern(period_um=4.0, periods=10, duty=0.5):
    return generate_pattern(
        ChirpDesign(period_um, 0.0, 1, periods, duty)
    )


# ---------- pattern generation ----------

def test_reference_design_total_length(reference_pattern):
    assert REFERENCE_DESIGN.total_length_um == 6817.5
    assert reference_pattern.length_um == 6817.5
    assert reference_pattern.length_um / 1000.0 == 6.8175
    assert reference_pattern.n_domains == 2 * 101 * 15
    assert reference_pattern.boundaries_um.size == 2 * 101 * 15 + 1


def test_single_period_layout():
    pattern = uniform_pattern(4.0, 1)
    assert np.array_equal(pattern.boundaries_um, [0.0, 2.0, 4.0])
    assert np.array_equal(pattern.signs, [1.0, -1.0])


def test_zero_step_matches_uniform():
    chirped = generate_pattern(ChirpDesign(4.0, 0.0, 3, 2, 0.5))
    uniform = generate_pattern(ChirpDesign(4.0, 0.0, 1, 6, 0.5))
    assert np.array_equal(chirped.boundaries_um, uniform.boundaries_um)
    assert np.array_equal(chirped.signs, uniform.signs)


def test_signs_alternate_and_periods_ascend(reference_pattern):
    signs = reference_pattern.signs
    assert np.all(signs[0::2] == 1.0)
    assert np.all(signs[1::2] == -1.0)
    # per-section period recovered from boundary spacing
    bounds = reference_pattern.boundaries_um
    periods = bounds[2::2] - bounds[:-2:2]
    section_periods = periods.reshape(101, 15)
    assert np.all(np.diff(section_periods.mean(axis=1)) > 0)
    assert section_periods[0, 0] == pytest.approx(4.45, abs=1e-12)
    assert section_periods[-1, 0] == pytest.approx(4.55, abs=1e-12)


def test_invalid_designs_rejected():
    with pytest.raises(InvalidDesignError):
        ChirpDesign(-1.0)
    with pytest.raises(InvalidDesignError):
        ChirpDesign(4.0, -0.5)
    with pytest.raises(InvalidDesignError):
        ChirpDesign(4.0, 0.0, 0, 1)
    with pytest.raises(InvalidDesignError):
        ChirpDesign(4.0, 0.0, 1, 1, duty_cycle=0.0)
    with pytest.raises(InvalidDesignError):
        ChirpDesign(4.0, 0.0, 1, 1, duty_cycle=1.0)


def test_pattern_validation():
    with pytest.raises(InvalidDesignError):
        DomainPattern(np.array([0.0, 1.0, 0.5]), np.array([1.0, -1.0]))
    with pytest.raises(InvalidDesignError):
        DomainPattern(np.array([1.0, 2.0]), np.array([1.0]))
    with pytest.raises(InvalidDesignError):
        DomainPattern(np.array([0.0, 2.0]), np.array([0.5]))


# ---------- structure factor ----------

def test_square_wave_fourier_values():
    for periods in (1, 7, 64):
        pattern = uniform_pattern(4.0, periods)
        at_qpm = structure_factor(pattern, 2.0 * math.pi / 4.0)
        assert abs(at_qpm.amplitude) == pytest.approx(2.0 / math.pi, rel=1e-12)
        assert at_qpm.magnitude_squared == pytest.approx(4.0 / math.pi**2, rel=1e-12)
        at_zero = structure_factor(pattern, 0.0)
        assert at_zero.magnitude_squared <= 1e-12


def test_conjugate_symmetry(reference_pattern):
    rng = np.random.default_rng(7)
    for dk in rng.uniform(0.2, 2.0, 25):
        plus = structure_factor(reference_pattern, dk).amplitude
        minus = structure_factor(reference_pattern, -dk).amplitude
        assert minus == pytest.approx(plus.conjugate(), rel=1e-13, abs=1e-16)


def test_magnitude_bounded(reference_pattern):
    rng = np.random.default_rng(11)
    grid = rng.uniform(-3.0, 3.0, 200)
    for res in structure_factor_sweep(reference_pattern, grid):
        assert 0.0 <= res.magnitude_squared <= 1.0
        assert res.magnitude_squared == pytest.approx(abs(res.amplitude) ** 2, rel=1e-15)


def test_domain_split_invariance():
    pattern = uniform_pattern(4.0, 5)
    bounds = pattern.boundaries_um
    # split the third domain in two at an arbitrary interior point
    insert_at = 0.5 * (bounds[2] + bounds[3]) + 0.3
    new_bounds = np.insert(bounds, 3, insert_at)
    new_signs = np.insert(pattern.signs, 2, pattern.signs[2])
    split = DomainPattern(new_bounds, new_signs)
    for dk in (0.3, 1.0, 2.0 * math.pi / 4.0):
        a = structure_factor(pattern, dk).amplitude
        b = structure_factor(split, dk).amplitude
        assert b == pytest.approx(a, rel=1e-12)


def test_uniform_sinc_envelope_zeros():
    pattern = uniform_pattern(4.45, 200)
    length = pattern.length_um
    center = 2.0 * math.pi / 4.45
    for x in (-2.0 * math.pi / length, 2.0 * math.pi / length):
        res = structure_factor(pattern, center + x)
        oracle = structure_factor_quadrature(pattern, center + x)
        assert res.magnitude_squared < 1e-18
        assert abs(oracle) ** 2 < 1e-18
    # off the zeros the envelope is finite again
    assert structure_factor(pattern, center + math.pi / length).magnitude_squared > 1e-6


def test_matches_quadrature_oracle_chirped(reference_pattern):
    samples = resolvable_mismatch_samples(reference_pattern, 1.25, 1.55, 40, seed=123)
    grid = np.array([dk for dk, _ in samples])
    amps = sweep_response(reference_pattern, grid)
    for (dk, oracle), amp in zip(samples, amps):
        assert abs(amp) ** 2 == pytest.approx(abs(oracle) ** 2, rel=1e-9)


def test_small_mismatch_branch_continuity():
    # the evaluator switches forms around |dk| * L = 1; both sides must
    # agree with quadrature
    pattern = uniform_pattern(4.0, 8)
    length = pattern.length_um
    for dk in (0.5 / length, 0.99 / length, 1.01 / length, 2.0 / length):
        amp = structure_factor(pattern, dk).amplitude
        oracle = structure_factor_quadrature(pattern, dk)
        assert amp == pytest.approx(oracle, rel=1e-10, abs=1e-18)


def test_sweep_matches_single_calls(reference_pattern):
    grid = np.array([0.9, 1.4, 1.41])
    sweep = structure_factor_sweep(reference_pattern, grid)
    for dk, res in zip(grid, sweep):
        single = structure_factor(reference_pattern, dk)
        assert res.amplitude == single.amplitude
        assert res.magnitude_squared == single.magnitude_squared
    one = structure_factor_sweep(reference_pattern, [1.4])
    assert one[0].amplitude == structure_factor(reference_pattern, 1.4).amplitude


def test_sweep_thread_count_invariance(reference_pattern):
    grid = np.linspace(1.3, 1.5, 512)
    baseline = sweep_response(reference_pattern, grid)
    before = _kernels.set_thread_count(1)
    one_thread = sweep_response(reference_pattern, grid)
    _kernels.set_thread_count(before)
    assert np.array_equal(baseline, one_thread)
    # repeat run is bit-identical too
    assert np.array_equal(baseline, sweep_response(reference_pattern, grid))


def test_empty_sweep_rejected(reference_pattern):
    with pytest.raises(ValueError):
        structure_factor_sweep(reference_pattern, [])


# ---------- export ----------

def test_export_csv_roundtrip(tmp_path, reference_pattern):
    path = tmp_path / "pattern.csv"
    export_pattern_csv(reference_pattern, path)
    lines = path.read_text(encoding="utf-8").strip().split("\n")
    assert lines[0] == "z_start_um,z_end_um,sign"
    assert len(lines) == reference_pattern.n_domains + 1
    starts = []
    ends = []
    signs = []
    for line in lines[1:]:
        z0, z1, s = line.split(",")
        starts.append(float(z0))
        ends.append(float(z1))
        signs.append(float(s))
    assert np.array_equal(starts, reference_pattern.boundaries_um[:-1])
    assert np.array_equal(ends, reference_pattern.boundaries_um[1:])
    assert np.array_equal(signs, reference_pattern.signs)
