"""Seeded synthetic recordings with planted spikes.

Randomness comes from ``numpy.random.Generator(PCG64(seed))`` only, and every
draw happens in a fixed order, so output is a pure function of the profile,
the seed and the shape parameters.

Inter-spike intervals are truncated normals (at least ``MIN_ISI_S``). With
``train_length > 1`` the intervals come from two truncated-normal components:
short gaps inside a train and long gaps between trains. The number of long
gaps is fixed to ``round((n - 1) / train_length)`` and their positions are
shuffled; the long-gap mean is set so the overall mean ISI equals the profile
mean exactly in expectation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .detect import SpikeEvent
from .recording import ChannelSeries, Recording

MIN_ISI_S = 60.0
MIN_AMPLITUDE_FRACTION = 0.1
# mean gap inside a train, as a fraction of the overall mean ISI
WITHIN_TRAIN_FRACTION = 0.35


@dataclass(frozen=True)
class SpeciesProfile:
    mean_isi_min: float
    isi_stddev_min: float
    mean_amplitude_mv: float
    amplitude_stddev_mv: float
    spike_count: int
    train_length: float = 1.0

    def __post_init__(self):
        if not (self.mean_isi_min > 0 and self.mean_amplitude_mv > 0 and self.spike_count > 0):
            raise ValueError("profile means and spike count must be positive")
        if self.isi_stddev_min < 0 or self.amplitude_stddev_mv < 0:
            raise ValueError("standard deviations must be non-negative")
        if self.train_length < 1:
            raise ValueError("train_length must be >= 1")

    @property
    def mean_isi_s(self) -> float:
        return self.mean_isi_min * 60.0


# Counts, mean intervals and amplitudes per species; train lengths are the
# theta=a mean word lengths. Spreads are fixed fractions of the means.
_TABLE = {
    "c_militaris": (881, 116, 0.2, 4.7),
    "f_velutipes": (958, 102, 0.3, 3.6),
    "s_commune": (530, 41, 0.03, 4.4),
    "o_nidiformis": (1117, 92, 0.007, 3.3),
}
ISI_CV = 0.2
AMPLITUDE_CV = 0.25


def species_profile(name: str) -> SpeciesProfile:
    try:
        count, isi, amp, train = _TABLE[name]
    except KeyError:
        raise ValueError(f"unknown species {name!r}; expected one of {sorted(_TABLE)}") from None
    return SpeciesProfile(
        mean_isi_min=isi,
        isi_stddev_min=ISI_CV * isi,
        mean_amplitude_mv=amp,
        amplitude_stddev_mv=AMPLITUDE_CV * amp,
        spike_count=count,
        train_length=train,
    )


def _truncnorm(rng: np.random.Generator, mean: float, std: float, size: int,
               lower: float) -> np.ndarray:
    out = rng.normal(mean, std, size) if std > 0 else np.full(size, float(mean))
    if std == 0:
        return np.maximum(out, lower)
    bad = np.flatnonzero(out < lower)
    while bad.size:
        out[bad] = rng.normal(mean, std, bad.size)
        bad = bad[out[bad] < lower]
    return out


def _gaps(rng: np.random.Generator, p: SpeciesProfile, n_gaps: int) -> np.ndarray:
    mean = p.mean_isi_s
    cv = p.isi_stddev_min / p.mean_isi_min
    if p.train_length <= 1 or n_gaps == 0:
        return _truncnorm(rng, mean, cv * mean, n_gaps, MIN_ISI_S)
    n_between = max(1, round(n_gaps / p.train_length))
    n_within = n_gaps - n_between
    m_in = WITHIN_TRAIN_FRACTION * mean
    m_out = (mean * n_gaps - m_in * n_within) / n_between
    between = rng.permutation(np.arange(n_gaps) < n_between)
    gaps = np.empty(n_gaps)
    gaps[~between] = _truncnorm(rng, m_in, cv * m_in, n_within, MIN_ISI_S)
    gaps[between] = _truncnorm(rng, m_out, cv * m_out, n_between, MIN_ISI_S)
    return gaps


def _amplitudes(rng, mean: float, std: float, size: int) -> np.ndarray:
    return _truncnorm(rng, mean, std, size, MIN_AMPLITUDE_FRACTION * mean)


def _render(n_samples: int, peaks: np.ndarray, amps: np.ndarray, half: float) -> np.ndarray:
    x = np.zeros(n_samples)
    k = np.arange(-int(np.ceil(half)) + 1, int(np.ceil(half)))
    shape = np.clip(1.0 - np.abs(k) / half, 0.0, None)
    for c, a in zip(peaks, amps):
        idx = c + k
        ok = (idx >= 0) & (idx < n_samples)
        x[idx[ok]] += a * shape[ok]
    return x


def _assemble(rng, channel_peaks, channel_amps, pulse_width_s, sample_interval_s,
              pad_s, noise_mv, label):
    pad = int(round(pad_s / sample_interval_s))
    n_samples = max((int(p[-1]) for p in channel_peaks if len(p)), default=0) + pad + 1
    half = max(pulse_width_s / (2 * sample_interval_s), 1.0)
    chans, truth = [], []
    for ci, (peaks, amps) in enumerate(zip(channel_peaks, channel_amps)):
        name = f"ch{ci}"
        x = _render(n_samples, peaks, amps, half)
        if noise_mv > 0:
            x = x + rng.normal(0.0, noise_mv, n_samples)
        chans.append(ChannelSeries(name, x))
        for c, a in zip(peaks, amps):
            truth.append(SpikeEvent(name, int(c), float(c * sample_interval_s), float(a),
                                    float(pulse_width_s), float(a)))
    return Recording(tuple(chans), sample_interval_s, 0.0, label), truth


def _peaks_from_gaps(gaps: np.ndarray, first_s: float, dt: float) -> np.ndarray:
    steps = np.round(np.asarray(gaps) / dt).astype(np.int64)
    return int(round(first_s / dt)) + np.concatenate(([0], np.cumsum(steps)))


def generate_recording(profile: SpeciesProfile, seed: int, pulse_shape: str = "triangular",
                       pulse_width_s: float = 20.0, n_channels: int = 1,
                       sample_interval_s: float = 1.0, pad_s: float = 2000.0,
                       noise_mv: float = 0.0, label: str = "synthetic"):
    """Return ``(recording, planted_spikes)``.

    Each channel holds ``profile.spike_count`` triangular pulses of base width
    ``pulse_width_s`` on a zero baseline, starting ``pad_s`` after the first
    sample and ending ``pad_s`` before the last. ``noise_mv`` adds white
    Gaussian noise of that standard deviation.
    """
    if pulse_shape != "triangular":
        raise ValueError(f"unsupported pulse shape {pulse_shape!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    all_peaks, all_amps = [], []
    for _ in range(n_channels):
        gaps = _gaps(rng, profile, profile.spike_count - 1)
        amps = _amplitudes(rng, profile.mean_amplitude_mv, profile.amplitude_stddev_mv,
                           profile.spike_count)
        all_peaks.append(_peaks_from_gaps(gaps, pad_s, sample_interval_s))
        all_amps.append(amps)
    return _assemble(rng, all_peaks, all_amps, pulse_width_s, sample_interval_s,
                     pad_s, noise_mv, label)


def generate_burst(base: SpeciesProfile, burst_spikes: int, burst_isi_s: float, seed: int,
                   burst_amplitude_mv: float | None = None,
                   burst_amplitude_stddev_mv: float | None = None,
                   pulse_width_s: float = 20.0, sample_interval_s: float = 1.0,
                   pad_s: float = 2000.0, noise_mv: float = 0.0, label: str = "synthetic-burst"):
    """Background train with one dense packet of ``burst_spikes`` spikes in the middle.

    The background uses ``base`` without train structure. The burst spikes are
    exactly ``burst_isi_s`` apart and separated from the background on both
    sides by the background mean ISI. Returns ``(recording, planted_spikes)``.
    """
    if burst_spikes < 2:
        raise ValueError("burst_spikes must be >= 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    bg = replace(base, train_length=1.0)
    gaps = _gaps(rng, bg, bg.spike_count - 1)
    amps = _amplitudes(rng, bg.mean_amplitude_mv, bg.amplitude_stddev_mv, bg.spike_count)
    b_mean = base.mean_amplitude_mv if burst_amplitude_mv is None else burst_amplitude_mv
    b_std = 0.05 * b_mean if burst_amplitude_stddev_mv is None else burst_amplitude_stddev_mv
    b_amps = _amplitudes(rng, b_mean, b_std, burst_spikes)

    split = len(gaps) // 2
    sep = bg.mean_isi_s
    all_gaps = np.concatenate((gaps[:split], [sep], np.full(burst_spikes - 1, float(burst_isi_s)),
                               [sep], gaps[split + 1:]))
    all_amps = np.concatenate((amps[:split + 1], b_amps, amps[split + 1:]))
    peaks = _peaks_from_gaps(all_gaps, pad_s, sample_interval_s)
    return _assemble(rng, [peaks], [all_amps], pulse_width_s, sample_interval_s,
                     pad_s, noise_mv, label)


def truth_to_json(truth) -> list[dict]:
    out = []
    for e in truth:
        d = e.to_dict()
        d["planted"] = True
        out.append(d)
    return out
