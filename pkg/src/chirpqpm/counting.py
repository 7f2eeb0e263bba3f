"""Photon-detection timestamp analysis and a synthetic stream generator.

Timestamps are 64-bit integer picoseconds so delay arithmetic is exact.
The coincidence histogram is built by a two-pointer sweep over both
sorted streams; CAR and the pair generation rate follow from its peak
and accidental floor. The generator produces Poissonian pair and dark
events with independent detection efficiencies and Gaussian jitter,
deterministic per seed, and serves as the statistical oracle for the
estimators (higher-order multi-pair emission is not modeled).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFitError,
    UnsortedStreamError,
    ZeroAccidentalsError,
    ZeroCoincidencesError,
)

from ._kernels import HAVE_NUMBA

if HAVE_NUMBA:
    from numba import njit


@dataclass(eq=False)
class TimestampStream:
    """Sorted detection times (integer ps) for one channel."""

    channel: str
    times_ps: np.ndarray
    duration_ps: int

    def __post_init__(self):
        self.times_ps = np.asarray(self.times_ps, dtype=np.int64)
        self.duration_ps = int(self.duration_ps)
        if self.duration_ps <= 0:
            raise ValueError("duration must be positive")
        if self.times_ps.size and (
            self.times_ps[0] < 0 or self.times_ps[-1] > self.duration_ps
        ):
            raise ValueError("timestamps must lie within [0, duration]")
        if np.any(np.diff(self.times_ps) < 0):
            raise UnsortedStreamError(f"channel {self.channel!r} is not sorted")

    @property
    def count(self) -> int:
        return int(self.times_ps.size)

    @property
    def rate_hz(self) -> float:
        return self.count / (self.duration_ps * 1e-12)


@dataclass(eq=False)
class CoincidenceHistogram:
    """Counts of pair delays (t_b - t_a) in uniform bins."""

    bin_width_ps: int
    offsets_ps: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        self.bin_width_ps = int(self.bin_width_ps)
        self.offsets_ps = np.asarray(self.offsets_ps, dtype=np.int64)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.bin_width_ps <= 0:
            raise ValueError("bin width must be positive")
        if self.offsets_ps.shape != self.counts.shape:
            raise ValueError("offsets and counts differ in length")
        if self.offsets_ps.size > 1 and np.any(
            np.diff(self.offsets_ps) != self.bin_width_ps
        ):
            raise ValueError("offsets must be uniformly spaced by one bin width")
        if np.any(self.counts < 0):
            raise ValueError("counts cannot be negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


if HAVE_NUMBA:

    @njit(cache=True)
    def _correlate(ta, tb, bw, k_max, counts):  # pragma: no cover
        # delay d lands in bin round(d / bw) with ties away from zero,
        # so mirroring the inputs exactly negates the histogram;
        # keep |bin| <= k_max, i.e. 2|d| < 2 bw k_max + bw
        lo = 0
        hi = 0
        two_bw = 2 * bw
        bound = two_bw * k_max + bw
        for i in range(ta.shape[0]):
            t = ta[i]
            while lo < tb.shape[0] and 2 * (tb[lo] - t) <= -bound:
                lo += 1
            if hi < lo:
                hi = lo
            while hi < tb.shape[0] and 2 * (tb[hi] - t) < bound:
                hi += 1
            for j in range(lo, hi):
                d = tb[j] - t
                if d >= 0:
                    k = (2 * d + bw) // two_bw
                else:
                    k = -((-2 * d + bw) // two_bw)
                counts[k + k_max] += 1


def _correlate_numpy(ta, tb, bw, k_max, counts):
    # vectorized fallback: same binning rule via searchsorted windows,
    # done on doubled times so the half-bin bounds stay integral
    bound = 2 * bw * k_max + bw
    tb2 = tb * 2
    lo = np.searchsorted(tb2, ta * 2 - bound, side="right")
    hi = np.searchsorted(tb2, ta * 2 + bound, side="left")
    for i in range(ta.size):
        if hi[i] > lo[i]:
            d = tb[lo[i] : hi[i]] - ta[i]
            k = np.where(d >= 0, (2 * d + bw) // (2 * bw), -((-2 * d + bw) // (2 * bw)))
            np.add.at(counts, k + k_max, 1)


def coincidence_histogram(
    a: TimestampStream,
    b: TimestampStream,
    bin_width_ps: int = 100,
    span_ps: int = 50_000,
) -> CoincidenceHistogram:
    """Histogram of delays t_b - t_a within +-span_ps.

    Bins are centered on integer multiples of the bin width; a delay
    exactly between two bins rounds away from zero, which keeps
    histogram(b, a) the exact mirror of histogram(a, b). The sweep
    advances two pointers through the sorted streams, so cost is linear
    in events plus matches and the result is independent of any
    partitioning.
    """
    bin_width_ps = int(bin_width_ps)
    if bin_width_ps <= 0:
        raise ValueError("bin width must be positive")
    if np.any(np.diff(a.times_ps) < 0) or np.any(np.diff(b.times_ps) < 0):
        raise UnsortedStreamError("input streams must be sorted")
    k_max = int(round(span_ps / bin_width_ps))
    counts = np.zeros(2 * k_max + 1, dtype=np.int64)
    if a.count and b.count:
        if HAVE_NUMBA:
            _correlate(a.times_ps, b.times_ps, bin_width_ps, k_max, counts)
        else:
            _correlate_numpy(a.times_ps, b.times_ps, bin_width_ps, k_max, counts)
    offsets = bin_width_ps * np.arange(-k_max, k_max + 1, dtype=np.int64)
    return CoincidenceHistogram(bin_width_ps, offsets, counts)


def accidental_level(
    h: CoincidenceHistogram, exclusion_ps: int = 5_000
) -> tuple[float, float, int]:
    """Mean accidental counts per bin beyond the exclusion zone.

    Returns (mean, standard error of the mean, bins used).
    """
    far = np.abs(h.offsets_ps) > exclusion_ps
    n = int(far.sum())
    if n == 0:
        raise ValueError("histogram does not extend beyond the exclusion zone")
    far_counts = h.counts[far]
    mean = float(far_counts.mean())
    sem = float(far_counts.std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
    return mean, sem, n


def car(
    h: CoincidenceHistogram,
    peak_window_ps: int | None = None,
    accidental_exclusion_ps: int = 5_000,
    numerator: str = "net",
) -> float:
    """Coincidence-to-accidental ratio of a delay histogram.

    The peak window (default one bin) is centered on the maximum bin;
    the accidental level is the mean over bins beyond the exclusion
    zone, scaled to the same window. ``numerator`` selects the windowing
    convention: "net" returns (peak - accidentals) / accidentals,
    "raw" returns peak / accidentals.
    """
    if numerator not in ("net", "raw"):
        raise ValueError("numerator must be 'net' or 'raw'")
    if peak_window_ps is None:
        peak_window_ps = h.bin_width_ps
    if int(h.offsets_ps[-1]) <= accidental_exclusion_ps:
        raise ValueError("histogram must span beyond the accidental exclusion zone")

    peak_offset = h.offsets_ps[int(np.argmax(h.counts))]
    in_window = np.abs(h.offsets_ps - peak_offset) <= peak_window_ps / 2.0
    c_peak = float(h.counts[in_window].sum())
    mean_per_bin, _, _ = accidental_level(h, accidental_exclusion_ps)
    c_acc = mean_per_bin * int(in_window.sum())
    if c_acc == 0.0:
        raise ZeroAccidentalsError("no accidental counts; CAR is undefined")
    if numerator == "net":
        return (c_peak - c_acc) / c_acc
    return c_peak / c_acc


@dataclass(frozen=True)
class PgrEstimate:
    """Pair generation rate inferred from singles and coincidence rates."""

    c_s_hz: float
    c_i_hz: float
    c_si_hz: float
    splitter_factor: int
    pgr_hz: float
    brightness_hz_per_mw_nm: float | None = None

    def to_flat_dict(self) -> dict:
        out = {
            "c_s_hz": self.c_s_hz,
            "c_i_hz": self.c_i_hz,
            "c_si_hz": self.c_si_hz,
            "splitter_factor": self.splitter_factor,
            "pgr_hz": self.pgr_hz,
        }
        if self.brightness_hz_per_mw_nm is not None:
            out["brightness_hz_per_mw_nm"] = self.brightness_hz_per_mw_nm
        return out


def pgr(
    c_s_hz: float,
    c_i_hz: float,
    c_si_hz: float,
    splitter_factor: int = 2,
    pump_power_mw: float | None = None,
    filter_bw_nm: float | None = None,
) -> PgrEstimate:
    """On-chip pair rate C_i * C_s / (f * C_si).

    ``splitter_factor`` 2 models a 50:50 splitter feeding both
    detectors; 1 models deterministically separated channels. When pump
    power and filter bandwidth are given, a per-power, per-bandwidth
    brightness is attached.
    """
    if splitter_factor not in (1, 2):
        raise ValueError("splitter factor must be 1 or 2")
    if min(c_s_hz, c_i_hz) < 0:
        raise ValueError("rates cannot be negative")
    if c_si_hz <= 0:
        raise ZeroCoincidencesError("coincidence rate must be positive")
    rate = c_i_hz * c_s_hz / (splitter_factor * c_si_hz)
    brightness = None
    if pump_power_mw is not None and filter_bw_nm is not None:
        brightness = rate / pump_power_mw / filter_bw_nm
    return PgrEstimate(c_s_hz, c_i_hz, c_si_hz, splitter_factor, rate, brightness)


@dataclass(frozen=True)
class BrightnessFit:
    """Through-origin slope of pair rate versus pump power."""

    slope_hz_per_uw: float
    n_points: int
    filter_bw_nm: float | None = None

    @property
    def slope_mhz_per_uw(self) -> float:
        return self.slope_hz_per_uw * 1e-6

    @property
    def brightness_ghz_per_mw_nm(self) -> float | None:
        """Slope over filter bandwidth in the conventional GHz/mW/nm
        magnitude: slope[MHz/uW] * 1000 / bandwidth[nm] (a per-watt
        normalization of the pump power)."""
        if self.filter_bw_nm is None:
            return None
        return self.slope_hz_per_uw * 1e-3 / self.filter_bw_nm


def brightness_fit(points, filter_bw_nm: float | None = None) -> BrightnessFit:
    """Least-squares line through the origin for (pump uW, pair rate Hz).

    The intercept is pinned at zero because the pair rate vanishes
    without pump. At least two distinct pump powers are required.
    """
    pts = [(float(p), float(r)) for p, r in points]
    powers = {p for p, _ in pts}
    if len(powers) < 2:
        raise DegenerateFitError("need at least two distinct pump powers")
    x = np.array([p for p, _ in pts])
    y = np.array([r for _, r in pts])
    slope = float((x * y).sum() / (x * x).sum())
    return BrightnessFit(slope, len(pts), filter_bw_nm)


def simulate_streams(
    pair_rate_hz: float,
    eta_s: float,
    eta_i: float,
    dark_s_hz: float = 0.0,
    dark_i_hz: float = 0.0,
    jitter_sigma_ps: float = 0.0,
    duration_s: float = 1.0,
    seed: int = 0,
) -> tuple[TimestampStream, TimestampStream]:
    """Synthetic signal/idler streams with known ground truth.

    Pairs arrive as a Poisson process; each photon survives its
    channel's efficiency independently, picks up Gaussian jitter, and is
    merged with independent Poissonian dark counts. Draw order is fixed,
    so output is fully determined by the seed. Events jittered outside
    [0, duration] are dropped.
    """
    if pair_rate_hz < 0 or dark_s_hz < 0 or dark_i_hz < 0:
        raise ValueError("rates cannot be negative")
    if not (0.0 <= eta_s <= 1.0 and 0.0 <= eta_i <= 1.0):
        raise ValueError("efficiencies must lie in [0, 1]")
    if duration_s <= 0:
        raise ValueError("duration must be positive")

    rng = np.random.default_rng(seed)
    t_ps = int(round(duration_s * 1e12))

    n_pairs = rng.poisson(pair_rate_hz * duration_s)
    pair_times = rng.integers(0, t_ps, size=n_pairs, dtype=np.int64)
    keep_s = rng.random(n_pairs) < eta_s
    keep_i = rng.random(n_pairs) < eta_i

    def detector(times, jitter, dark_rate):
        if jitter > 0 and times.size:
            times = times + np.rint(rng.normal(0.0, jitter, times.size)).astype(np.int64)
        n_dark = rng.poisson(dark_rate * duration_s)
        dark = rng.integers(0, t_ps, size=n_dark, dtype=np.int64)
        merged = np.sort(np.concatenate([times, dark]))
        return merged[(merged >= 0) & (merged <= t_ps)]

    s_times = detector(pair_times[keep_s], jitter_sigma_ps, dark_s_hz)
    i_times = detector(pair_times[keep_i], jitter_sigma_ps, dark_i_hz)
    return (
        TimestampStream("signal", s_times, t_ps),
        TimestampStream("idler", i_times, t_ps),
    )


def load_timestamps_csv(path, duration_ps: int | None = None) -> dict[str, TimestampStream]:
    """Load ``channel,time_ps`` rows into per-channel sorted streams.

    Rows may arrive in any order; the loader sorts each channel. The
    duration defaults to the latest timestamp seen.
    """
    by_channel: dict[str, list[int]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["channel", "time_ps"]:
            raise ValueError(f"{path}: expected header 'channel,time_ps', got {header}")
        for row in reader:
            if not row:
                continue
            by_channel.setdefault(row[0], []).append(int(row[1]))
    if not by_channel:
        raise ValueError(f"{path}: no timestamp rows")
    if duration_ps is None:
        duration_ps = max(max(times) for times in by_channel.values())
    return {
        ch: TimestampStream(ch, np.sort(np.array(times, dtype=np.int64)), duration_ps)
        for ch, times in by_channel.items()
    }


def write_timestamps_csv(path, streams) -> None:
    """Write streams as ``channel,time_ps`` rows, one stream after another."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["channel", "time_ps"])
        for stream in streams:
            for t in stream.times_ps:
                writer.writerow([stream.channel, int(t)])


def write_histogram_csv(path, h: CoincidenceHistogram) -> None:
    """Write ``offset_ps,counts`` rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["offset_ps", "counts"])
        for off, cnt in zip(h.offsets_ps, h.counts):
            writer.writerow([int(off), int(cnt)])
