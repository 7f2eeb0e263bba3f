"""Command-line front end: reproducible pipelines over the toolkit modules.

Every command reads an optional JSON config file, applies flag
overrides, writes its primary outputs as CSV/JSON into the output
directory, and echoes the fully resolved configuration into a
``*_summary.json`` for provenance. Given the same config and seed,
outputs are byte-identical between runs.

Exit codes: 0 success, 1 domain error, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _kernels, counting, dispersion, grating, shg, spdc, svgplot
from .errors import ChirpQpmError, ConfigError
from .spectra import contiguous_span_above, read_spectrum_csv

DEFAULT_DESIGN = {
    "base_period_um": 4.45,
    "step_nm": 1.0,
    "sections": 101,
    "periods_per_section": 15,
    "duty_cycle": 0.5,
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _resolve_design(cfg: dict) -> dict:
    merged = dict(DEFAULT_DESIGN)
    merged.update(cfg.get("design", {}))
    return merged


def _build_design(params: dict) -> grating.ChirpDesign:
    try:
        return grating.ChirpDesign(
            base_period_um=float(params["base_period_um"]),
            step_nm=float(params["step_nm"]),
            sections=int(params["sections"]),
            periods_per_section=int(params["periods_per_section"]),
            duty_cycle=float(params["duty_cycle"]),
        )
    except KeyError as exc:
        raise ConfigError(f"design is missing {exc}") from exc


def _resolve_model(cfg: dict, band: str) -> tuple[dispersion.DispersionModel, dict]:
    """Band is 'nir' (pump / second harmonic) or 'telecom' (signal / idler)."""
    spec = dict(cfg.get("dispersion", {}).get(band, {"kind": "default"}))
    kind = spec.get("kind", "default")
    if kind == "default":
        model = (
            dispersion.default_nir_model()
            if band == "nir"
            else dispersion.default_telecom_model()
        )
        spec = {"kind": "default", "band": band}
    elif kind == "csv":
        try:
            model = dispersion.load_dispersion_csv(
                spec["path"], spec.get("band_label", f"TE00-{band}"),
                valid_range_nm=spec.get("valid_range_nm"),
            )
        except KeyError as exc:
            raise ConfigError(f"dispersion.{band} is missing {exc}") from exc
    elif kind == "polynomial":
        try:
            model = dispersion.from_polynomial(
                spec.get("band_label", f"TE00-{band}"),
                spec["coefficients"],
                tuple(spec["valid_range_nm"]),
            )
        except KeyError as exc:
            raise ConfigError(f"dispersion.{band} is missing {exc}") from exc
    else:
        raise ConfigError(f"unknown dispersion kind {kind!r} for band {band!r}")
    return model, spec


def _grid(cfg: dict, key: str, start: float, stop: float, step: float):
    params = {"start_nm": start, "stop_nm": stop, "step_nm": step}
    params.update(cfg.get(key, {}))
    n = int(round((params["stop_nm"] - params["start_nm"]) / params["step_nm"]))
    return params["start_nm"] + params["step_nm"] * np.arange(n + 1), params


def cmd_design(args, cfg: dict, out: Path) -> int:
    params = _resolve_design(cfg)
    for name in ("base_period_um", "step_nm", "sections", "periods_per_section", "duty_cycle"):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    design = _build_design(params)
    pattern = grating.generate_pattern(design)
    grating.export_pattern_csv(pattern, out / "design_pattern.csv")
    summary = {
        "config": {"design": params},
        "total_length_um": pattern.length_um,
        "length_mm": pattern.length_um / 1000.0,
        "n_domains": pattern.n_domains,
        "sections": design.sections,
        "periods_per_section": design.periods_per_section,
        "period_range_um": [design.period_um(0), design.period_um(design.sections - 1)],
        "orientation": pattern.meta["orientation"],
    }
    _write_json(out / "design_summary.json", summary)
    print(f"wrote {out / 'design_pattern.csv'} ({pattern.n_domains} domains, "
          f"{summary['length_mm']} mm)")
    return 0


def cmd_shg_spectrum(args, cfg: dict, out: Path) -> int:
    design_params = _resolve_design(cfg)
    pattern = grating.generate_pattern(_build_design(design_params))
    tel, tel_spec = _resolve_model(cfg, "telecom")
    nir, nir_spec = _resolve_model(cfg, "nir")
    grid, grid_params = _grid(cfg, "grid", 1480.0, 1640.0, 0.25)
    s_eff = float(args.s_eff_um2 if args.s_eff_um2 is not None else cfg.get("s_eff_um2", 1.0))
    d_eff = float(cfg.get("d_eff_pm_per_v", 27.0))
    constants = shg.PhysicalConstants(d_eff_pm_per_v=d_eff)

    spectrum = shg.shg_spectrum(
        grid, tel, nir, pattern, s_eff, constants, extrapolate=args.allow_extrapolation
    )
    spectrum.write_csv(out / "shg_spectrum.csv")
    if args.svg:
        svgplot.line_plot(
            out / "shg_spectrum.svg",
            spectrum.wavelength_nm,
            spectrum.values,
            "fundamental wavelength (nm)",
            f"efficiency ({spectrum.unit})",
            "modeled conversion efficiency",
        )
    lo, hi, width = contiguous_span_above(spectrum, 0.1)
    summary = {
        "config": {
            "design": design_params,
            "dispersion": {"telecom": tel_spec, "nir": nir_spec},
            "grid": grid_params,
            "s_eff_um2": s_eff,
            "d_eff_pm_per_v": d_eff,
            "allow_extrapolation": args.allow_extrapolation,
        },
        "peak_value": spectrum.peak_value,
        "peak_wavelength_nm": spectrum.peak_wavelength_nm,
        "above_10pct_span_nm": [lo, hi],
        "above_10pct_width_nm": width,
        "unit": spectrum.unit,
    }
    _write_json(out / "shg_summary.json", summary)
    print(f"wrote {out / 'shg_spectrum.csv'} (10%-of-peak width {width} nm)")
    return 0


def _noise_sample(cfg: dict, values: np.ndarray) -> list[float]:
    if "noise_counts" in cfg:
        return [float(v) for v in cfg["noise_counts"]]
    # convenience: lowest-decile spectral bins stand in for background
    finite = np.sort(values[np.isfinite(values)])
    n = max(2, finite.size // 10)
    return [float(v) for v in finite[:n]]


def cmd_spdc_spectrum(args, cfg: dict, out: Path) -> int:
    design_params = _resolve_design(cfg)
    pattern = grating.generate_pattern(_build_design(design_params))
    tel, tel_spec = _resolve_model(cfg, "telecom")
    nir, nir_spec = _resolve_model(cfg, "nir")
    pump_nm = float(args.pump_nm if args.pump_nm is not None else cfg.get("pump_nm", 775.0))
    grid, grid_params = _grid(cfg, "grid", 1190.0, 1700.0, 0.1)

    config = spdc.SpdcConfig(pump_nm, grid, nir, tel, pattern)
    density = spdc.spectral_density(config, extrapolate=args.allow_extrapolation)
    density.write_csv(out / "spdc_density.csv")
    noise = _noise_sample(cfg, density.values)
    report = spdc.extract_bandwidth(density, noise, pump_nm)
    _write_json(out / "band_report.json", report.to_flat_dict())
    summary = {
        "config": {
            "design": design_params,
            "dispersion": {"telecom": tel_spec, "nir": nir_spec},
            "grid": grid_params,
            "pump_nm": pump_nm,
            "noise_counts": noise if "noise_counts" in cfg else "lowest-decile bins",
            "allow_extrapolation": args.allow_extrapolation,
        },
        "band_report": report.to_flat_dict(),
        "peak_wavelength_nm": density.peak_wavelength_nm,
    }
    _write_json(out / "spdc_summary.json", summary)
    print(f"wrote {out / 'spdc_density.csv'} "
          f"(pair full bandwidth {report.pair_full_bw_thz} THz)")
    return 0


def cmd_bandwidth(args, cfg: dict, out: Path) -> int:
    path = args.spectrum_csv or cfg.get("spectrum_csv")
    if path is None:
        raise ConfigError("bandwidth needs a spectrum_csv input")
    if not Path(path).exists():
        raise ConfigError(f"spectrum file not found: {path}")
    spectrum = read_spectrum_csv(path)
    pump_nm = float(args.pump_nm if args.pump_nm is not None else cfg.get("pump_nm", 775.0))
    noise = _noise_sample(cfg, spectrum.values)
    report = spdc.extract_bandwidth(spectrum, noise, pump_nm)
    _write_json(out / "band_report.json", report.to_flat_dict())
    summary = {
        "config": {"spectrum_csv": str(path), "pump_nm": pump_nm, "noise_counts": noise},
        "band_report": report.to_flat_dict(),
    }
    _write_json(out / "bandwidth_summary.json", summary)
    print(f"pair full bandwidth {report.pair_full_bw_thz} THz "
          f"({report.pair_full_bw_nm} nm)")
    return 0


def cmd_analyze_counts(args, cfg: dict, out: Path) -> int:
    path = args.timestamps_csv or cfg.get("timestamps_csv")
    if path is None:
        raise ConfigError("analyze-counts needs a timestamps_csv input")
    if not Path(path).exists():
        raise ConfigError(f"timestamp file not found: {path}")
    streams = counting.load_timestamps_csv(path, cfg.get("duration_ps"))
    sig_ch = cfg.get("signal_channel", "signal")
    idl_ch = cfg.get("idler_channel", "idler")
    if sig_ch not in streams or idl_ch not in streams:
        raise ConfigError(
            f"channels {sig_ch!r}/{idl_ch!r} not found; file has {sorted(streams)}"
        )
    sig, idl = streams[sig_ch], streams[idl_ch]

    bin_width_ps = int(cfg.get("bin_width_ps", 100))
    span_ps = int(cfg.get("span_ns", 50) * 1000)
    exclusion_ps = int(cfg.get("exclusion_ns", 5) * 1000)
    peak_window_ps = cfg.get("peak_window_ps")
    splitter_factor = int(cfg.get("splitter_factor", 1))
    numerator = cfg.get("car_numerator", "net")

    hist = counting.coincidence_histogram(sig, idl, bin_width_ps, span_ps)
    counting.write_histogram_csv(out / "histogram.csv", hist)
    ratio = counting.car(hist, peak_window_ps, exclusion_ps, numerator)
    acc_mean, acc_sem, acc_bins = counting.accidental_level(hist, exclusion_ps)

    window = peak_window_ps if peak_window_ps is not None else bin_width_ps
    peak_offset = hist.offsets_ps[int(np.argmax(hist.counts))]
    in_window = np.abs(hist.offsets_ps - peak_offset) <= window / 2.0
    duration_s = sig.duration_ps * 1e-12
    c_si_net = (float(hist.counts[in_window].sum()) - acc_mean * in_window.sum()) / duration_s
    estimate = counting.pgr(
        sig.rate_hz,
        idl.rate_hz,
        c_si_net,
        splitter_factor,
        pump_power_mw=cfg.get("pump_power_mw"),
        filter_bw_nm=cfg.get("filter_bw_nm"),
    )
    report = {
        "car": ratio,
        "car_numerator": numerator,
        "accidentals_per_bin": acc_mean,
        "accidentals_sem": acc_sem,
        "accidental_bins": acc_bins,
        "peak_offset_ps": int(peak_offset),
        **estimate.to_flat_dict(),
    }
    _write_json(out / "counts_report.json", report)
    summary = {
        "config": {
            "timestamps_csv": str(path),
            "signal_channel": sig_ch,
            "idler_channel": idl_ch,
            "bin_width_ps": bin_width_ps,
            "span_ns": span_ps / 1000,
            "exclusion_ns": exclusion_ps / 1000,
            "peak_window_ps": window,
            "splitter_factor": splitter_factor,
            "car_numerator": numerator,
        },
        "report": report,
    }
    _write_json(out / "analyze_summary.json", summary)
    print(f"CAR {ratio}, PGR {estimate.pgr_hz} Hz")
    return 0


def cmd_simulate_counts(args, cfg: dict, out: Path) -> int:
    params = {
        "pair_rate_hz": float(cfg.get("pair_rate_hz", 1e5)),
        "eta_s": float(cfg.get("eta_s", 0.5)),
        "eta_i": float(cfg.get("eta_i", 0.5)),
        "dark_s_hz": float(cfg.get("dark_s_hz", 1e3)),
        "dark_i_hz": float(cfg.get("dark_i_hz", 1e3)),
        "jitter_sigma_ps": float(cfg.get("jitter_sigma_ps", 0.0)),
        "duration_s": float(cfg.get("duration_s", 1.0)),
        "seed": int(args.seed),
    }
    sig, idl = counting.simulate_streams(**params)
    counting.write_timestamps_csv(out / "timestamps.csv", [sig, idl])
    summary = {
        "config": params,
        "signal_counts": sig.count,
        "idler_counts": idl.count,
        "signal_rate_hz": sig.rate_hz,
        "idler_rate_hz": idl.rate_hz,
    }
    _write_json(out / "simulate_summary.json", summary)
    print(f"wrote {out / 'timestamps.csv'} "
          f"({sig.count} signal, {idl.count} idler events)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--threads", type=int, default=None, help="sweep worker count")
    common.add_argument(
        "--allow-extrapolation",
        action="store_true",
        help="evaluate dispersion models beyond their validity range",
    )

    parser = argparse.ArgumentParser(
        prog="chirpqpm",
        description="design and simulation toolkit for step-chirped QPM waveguides",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common], help="generate a poling pattern")
    p.add_argument("--base-period-um", dest="base_period_um", type=float)
    p.add_argument("--step-nm", dest="step_nm", type=float)
    p.add_argument("--sections", type=int)
    p.add_argument("--periods-per-section", dest="periods_per_section", type=int)
    p.add_argument("--duty-cycle", dest="duty_cycle", type=float)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("shg-spectrum", parents=[common], help="modeled efficiency spectrum")
    p.add_argument("--s-eff-um2", dest="s_eff_um2", type=float)
    p.add_argument("--svg", action="store_true", help="also write an SVG line plot")
    p.set_defaults(func=cmd_shg_spectrum)

    p = sub.add_parser("spdc-spectrum", parents=[common], help="pair spectral density")
    p.add_argument("--pump-nm", dest="pump_nm", type=float)
    p.set_defaults(func=cmd_spdc_spectrum)

    p = sub.add_parser("bandwidth", parents=[common], help="bandwidths of a spectrum file")
    p.add_argument("--spectrum-csv", dest="spectrum_csv")
    p.add_argument("--pump-nm", dest="pump_nm", type=float)
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("analyze-counts", parents=[common], help="histogram, CAR and PGR")
    p.add_argument("--timestamps-csv", dest="timestamps_csv")
    p.set_defaults(func=cmd_analyze_counts)

    p = sub.add_parser("simulate-counts", parents=[common], help="synthetic detection streams")
    p.set_defaults(func=cmd_simulate_counts)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.threads is not None:
            _kernels.set_thread_count(args.threads)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return args.func(args, cfg, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ChirpQpmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
