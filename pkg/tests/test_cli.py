import json

import numpy as np
import pytest

from chirpqpm.cli import main
from chirpqpm.spectra import read_spectrum_csv


def run(args):
    return main([str(a) for a in args])


def test_design_defaults(tmp_path, capsys):
    assert run(["design", "--out", tmp_path]) == 0
    summary = json.loads((tmp_path / "design_summary.json").read_text())
    assert summary["length_mm"] == 6.8175
    assert summary["period_range_um"] == [4.45, 4.55]
    assert summary["n_domains"] == 3030
    lines = (tmp_path / "design_pattern.csv").read_text().strip().split("\n")
    assert len(lines) == 3031  # header + one row per domain


def test_design_single_section(tmp_path):
    assert run(["design", "--out", tmp_path, "--sections", 1,
                "--periods-per-section", 4, "--base-period-um", 4.0]) == 0
    summary = json.loads((tmp_path / "design_summary.json").read_text())
    assert summary["period_range_um"] == [4.0, 4.0]
    assert summary["total_length_um"] == 16.0


def test_design_invalid_parameters(tmp_path, capsys):
    assert run(["design", "--out", tmp_path, "--duty-cycle", 1.5]) == 1
    assert "duty cycle" in capsys.readouterr().err


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run(["design", "--config", bad, "--out", tmp_path]) == 2
    missing = tmp_path / "does_not_exist.json"
    assert run(["design", "--config", missing, "--out", tmp_path]) == 2


def test_shg_single_point(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "grid": {"start_nm": 1550.0, "stop_nm": 1550.0, "step_nm": 0.25},
    }), encoding="utf-8")
    assert run(["shg-spectrum", "--config", cfg, "--out", tmp_path]) == 0
    spectrum = read_spectrum_csv(tmp_path / "shg_spectrum.csv")
    assert spectrum.wavelength_nm.size == 1
    assert spectrum.unit == "%/W/cm^2"


def test_shg_sweep_plateau_and_determinism(tmp_path):
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    for out in (out1, out2):
        assert run(["shg-spectrum", "--out", out, "--svg"]) == 0
    assert (out1 / "shg_spectrum.csv").read_bytes() == (out2 / "shg_spectrum.csv").read_bytes()
    assert (out1 / "shg_summary.json").read_bytes() == (out2 / "shg_summary.json").read_bytes()
    summary = json.loads((out1 / "shg_summary.json").read_text())
    assert summary["above_10pct_width_nm"] >= 110.0
    svg = (out1 / "shg_spectrum.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_spdc_spectrum_coarse(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "grid": {"start_nm": 1200.0, "stop_nm": 1700.0, "step_nm": 1.0},
        "noise_counts": [0.004, 0.005, 0.0045, 0.0052, 0.0048],
    }), encoding="utf-8")
    assert run(["spdc-spectrum", "--config", cfg, "--out", tmp_path, "--pump-nm", 775]) == 0
    report = json.loads((tmp_path / "band_report.json").read_text())
    assert report["pair_full_bw_thz"] == 2 * report["signal_full_bw_thz"]
    assert report["signal_full_bw_thz"] > 30.0
    density = read_spectrum_csv(tmp_path / "spdc_density.csv")
    assert np.nanmax(density.values) == 1.0


def test_bandwidth_top_hat(tmp_path):
    lam = np.arange(1200.0, 1580.0 + 5.0, 5.0)
    values = np.where((lam >= 1235.0) & (lam <= 1550.0), 1.0, 0.001)
    lines = ["wavelength_nm,value,unit,status"]
    lines += [f"{l},{v},counts,ok" for l, v in zip(lam, values)]
    spectrum_csv = tmp_path / "spectrum.csv"
    spectrum_csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"noise_counts": [0.012, 0.009, 0.011, 0.010]}), encoding="utf-8")

    assert run(["bandwidth", "--config", cfg, "--out", tmp_path,
                "--spectrum-csv", spectrum_csv, "--pump-nm", 775]) == 0
    report = json.loads((tmp_path / "band_report.json").read_text())
    assert report["signal_full_bw_thz"] == pytest.approx(49.0, rel=0.01)
    assert report["pair_full_bw_thz"] == pytest.approx(99.0, rel=0.01)
    assert report["pair_full_bw_nm"] == pytest.approx(846.0, rel=0.01)


def test_bandwidth_nothing_above_threshold(tmp_path, capsys):
    lam = np.arange(1300.0, 1400.0, 10.0)
    lines = ["wavelength_nm,value,unit,status"]
    lines += [f"{l},0.001,counts,ok" for l in lam]
    spectrum_csv = tmp_path / "flat.csv"
    spectrum_csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"noise_counts": [1.0, 1.2, 0.8]}), encoding="utf-8")
    assert run(["bandwidth", "--config", cfg, "--out", tmp_path,
                "--spectrum-csv", spectrum_csv]) == 1


def test_bandwidth_missing_file(tmp_path):
    assert run(["bandwidth", "--out", tmp_path,
                "--spectrum-csv", tmp_path / "nope.csv"]) == 2


def test_analyze_counts_fixture_car_ten(tmp_path):
    # engineered streams: 55 true pairs at zero delay, far bins at 5
    # counts each -> CAR = (55 - 5) / 5 = 10
    bin_width = 1_000
    far_offsets = [o for o in range(-10_000, 10_001, bin_width) if abs(o) > 3_000]
    rows = ["channel,time_ps"]
    t = 1_000_000
    step = 1_000_000
    for _ in range(55):
        rows.append(f"signal,{t}")
        rows.append(f"idler,{t}")
        t += step
    for offset in far_offsets:
        for _ in range(5):
            rows.append(f"signal,{t}")
            rows.append(f"idler,{t + offset}")
            t += step
    path = tmp_path / "stamps.csv"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "bin_width_ps": bin_width,
        "span_ns": 10,
        "exclusion_ns": 3,
        "duration_ps": t + 100_000,
    }), encoding="utf-8")
    assert run(["analyze-counts", "--config", cfg, "--out", tmp_path,
                "--timestamps-csv", path]) == 0
    report = json.loads((tmp_path / "counts_report.json").read_text())
    assert report["car"] == 10.0
    assert report["accidentals_per_bin"] == 5.0
    hist_lines = (tmp_path / "histogram.csv").read_text().strip().split("\n")
    assert hist_lines[0] == "offset_ps,counts"


def test_analyze_counts_missing_file(tmp_path):
    assert run(["analyze-counts", "--out", tmp_path,
                "--timestamps-csv", tmp_path / "nope.csv"]) == 2


def test_simulate_analyze_roundtrip(tmp_path):
    sim_cfg = tmp_path / "sim.json"
    sim_cfg.write_text(json.dumps({
        "pair_rate_hz": 1e5, "eta_s": 0.5, "eta_i": 0.5,
        "dark_s_hz": 1e3, "dark_i_hz": 1e3, "duration_s": 2.0,
    }), encoding="utf-8")
    assert run(["simulate-counts", "--config", sim_cfg, "--out", tmp_path, "--seed", 4]) == 0

    ana_cfg = tmp_path / "ana.json"
    ana_cfg.write_text(json.dumps({
        "bin_width_ps": 100, "span_ns": 10, "exclusion_ns": 5,
        "splitter_factor": 1,
    }), encoding="utf-8")
    assert run(["analyze-counts", "--config", ana_cfg, "--out", tmp_path,
                "--timestamps-csv", tmp_path / "timestamps.csv"]) == 0
    report = json.loads((tmp_path / "counts_report.json").read_text())

    from oracles import pair_sim_expectations

    expect = pair_sim_expectations(1e5, 0.5, 0.5, 1e3, 1e3, 2.0, 100, 100)
    z = abs(report["pgr_hz"] - expect["expected_pgr_hz"]) / expect["pgr_sigma_hz"]
    assert z < 4.0
    assert report["car"] > 100.0  # strong temporal correlation present


def test_simulate_deterministic_given_seed(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert run(["simulate-counts", "--out", out, "--seed", 9,
                    "--config", _small_sim_cfg(tmp_path)]) == 0
    assert (out1 / "timestamps.csv").read_bytes() == (out2 / "timestamps.csv").read_bytes()


def _small_sim_cfg(tmp_path):
    cfg = tmp_path / "small.json"
    if not cfg.exists():
        cfg.write_text(json.dumps({"pair_rate_hz": 2e4, "duration_s": 0.2}), encoding="utf-8")
    return cfg


def test_threads_flag_accepted(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "grid": {"start_nm": 1540.0, "stop_nm": 1560.0, "step_nm": 5.0},
    }), encoding="utf-8")
    base, threaded = tmp_path / "base", tmp_path / "threaded"
    assert run(["shg-spectrum", "--config", cfg, "--out", base]) == 0
    assert run(["shg-spectrum", "--config", cfg, "--out", threaded, "--threads", 64]) == 0
    assert (base / "shg_spectrum.csv").read_bytes() == (threaded / "shg_spectrum.csv").read_bytes()


def test_allow_extrapolation_flag(tmp_path):
    import warnings

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "grid": {"start_nm": 1000.0, "stop_nm": 1000.0, "step_nm": 1.0},
    }), encoding="utf-8")
    out = tmp_path / "x"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert run(["shg-spectrum", "--config", cfg, "--out", out,
                    "--allow-extrapolation"]) == 0
    spectrum = read_spectrum_csv(out / "shg_spectrum.csv")
    assert spectrum.status == ["extrapolated"]


def test_unknown_command_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2
