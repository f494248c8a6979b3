"""Semi-automatic spike detection on a single voltage channel.

A sample is a spike candidate when its prominence over the neighbourhood
average, ``g_i = |x_i| - |a_i|``, exceeds ``delta``. Candidates closer than
``d`` samples to a stronger spike are removed as false spikes.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


@dataclass(frozen=True)
class DetectorParams:
    w: int
    delta: float
    d: int

    def __post_init__(self):
        if int(self.w) != self.w or self.w < 1:
            raise ValueError(f"w must be an integer >= 1, got {self.w}")
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if int(self.d) != self.d or self.d < 0:
            raise ValueError(f"d must be an integer >= 0, got {self.d}")
        object.__setattr__(self, "w", int(self.w))
        object.__setattr__(self, "d", int(self.d))


SPECIES_PRESETS = {
    "c_militaris": DetectorParams(w=200, delta=0.1, d=300),
    "f_velutipes": DetectorParams(w=200, delta=0.1, d=300),
    "s_commune": DetectorParams(w=100, delta=0.005, d=100),
    "o_nidiformis": DetectorParams(w=50, delta=0.003, d=100),
}


def species_preset(name: str) -> DetectorParams:
    try:
        return SPECIES_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown species {name!r}; expected one of {sorted(SPECIES_PRESETS)}") from None


@dataclass(frozen=True)
class SpikeEvent:
    """A detected (or planted) spike.

    ``prominence_mv`` is the signed ``x_peak - a_peak``; ``amplitude_mv`` is its
    magnitude. The sign is what tells voltage increases from decreases.
    """

    channel: str
    peak_index: int
    peak_time_s: float
    amplitude_mv: float
    width_s: float
    prominence_mv: float | None = None

    @property
    def sign(self) -> int:
        p = self.amplitude_mv if self.prominence_mv is None else self.prominence_mv
        return 1 if p >= 0 else -1

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "peak_index": self.peak_index,
            "peak_time_s": self.peak_time_s,
            "amplitude_mv": self.amplitude_mv,
            "width_s": self.width_s,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SpikeEvent":
        return cls(
            channel=str(obj["channel"]),
            peak_index=int(obj["peak_index"]),
            peak_time_s=float(obj["peak_time_s"]),
            amplitude_mv=float(obj["amplitude_mv"]),
            width_s=float(obj["width_s"]),
            prominence_mv=obj.get("prominence_mv"),
        )


@dataclass(frozen=True)
class SpikeStats:
    count: int
    mean_isi_s: float | None = None
    isi_stddev_s: float | None = None
    mean_amplitude_mv: float | None = None
    amplitude_stddev_mv: float | None = None

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean_isi_s": self.mean_isi_s,
            "isi_stddev_s": self.isi_stddev_s,
            "mean_amplitude_mv": self.mean_amplitude_mv,
            "amplitude_stddev_mv": self.amplitude_stddev_mv,
        }


def moving_average(x, w: int) -> np.ndarray:
    """Neighbourhood average ``a_i = (4w)^-1 * sum_{i-2w <= j <= i+2w} x_j``.

    The sum has ``4w + 1`` terms but the divisor is ``4w``, as in the original
    procedure. The result has the length of ``x``; the ``2w`` samples at each
    end, where the window does not fit, are NaN.
    """
    x = np.asarray(x, dtype=float)
    w = int(w)
    if w < 1:
        raise ValueError("w must be >= 1")
    n = len(x)
    if n < 4 * w + 1:
        raise ValueError(f"series too short: need at least {4 * w + 1} samples, got {n}")
    out = np.full(n, np.nan)
    out[2 * w:n - 2 * w] = sliding_window_view(x, 4 * w + 1).sum(axis=-1) / (4 * w)
    return out


def prominence(x, w: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(a, g)`` where ``g = |x| - |a|`` (NaN at the undefined ends)."""
    x = np.asarray(x, dtype=float)
    a = moving_average(x, w)
    return a, np.abs(x) - np.abs(a)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Half-open ``[start, stop)`` index ranges where ``mask`` is True."""
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def _suppress(candidates: list[tuple[int, float]], d: int) -> list[int]:
    # strongest first, earlier index wins ties
    order = sorted(candidates, key=lambda c: (-c[1], c[0]))
    accepted: list[int] = []
    for idx, _ in order:
        k = bisect.bisect_left(accepted, idx)
        if k < len(accepted) and accepted[k] - idx <= d:
            continue
        if k > 0 and idx - accepted[k - 1] <= d:
            continue
        accepted.insert(k, idx)
    return accepted


def detect_spikes(x, p: DetectorParams, channel: str = "ch0",
                  sample_interval_s: float = 1.0, start_s: float = 0.0) -> list[SpikeEvent]:
    """Detect spikes in one channel; result is sorted by peak index."""
    x = np.asarray(x, dtype=float)
    a, g = prominence(x, p.w)
    n = len(x)
    lo, hi = 2 * p.w, n - 2 * p.w
    gi = g[lo:hi]

    candidates = []
    for s, e in _runs(gi > p.delta):
        k = s + int(np.argmax(gi[s:e]))
        candidates.append((lo + k, float(gi[k])))
    peaks = _suppress(candidates, p.d)

    half = p.delta / 2
    cap = 4 * p.w
    events = []
    for i in peaks:
        left = i
        while left - 1 >= lo and g[left - 1] > half and i - left < cap:
            left -= 1
        right = i
        while right + 1 < hi and g[right + 1] > half and right - i < cap:
            right += 1
        width = min(right - left + 1, cap)
        signed = float(x[i] - a[i])
        events.append(SpikeEvent(
            channel=channel,
            peak_index=i,
            peak_time_s=start_s + i * sample_interval_s,
            amplitude_mv=abs(signed),
            width_s=width * sample_interval_s,
            prominence_mv=signed,
        ))
    return events


def spike_stats(events: Sequence[SpikeEvent], sample_interval_s: float = 1.0) -> SpikeStats:
    """Mean and population standard deviation of inter-spike intervals and amplitudes.

    ISI statistics need at least two events, amplitude statistics at least one.
    Intervals are measured in samples and converted with ``sample_interval_s``.
    """
    n = len(events)
    out = {"count": n}
    if n >= 1:
        amps = np.array([e.amplitude_mv for e in events])
        out["mean_amplitude_mv"] = float(amps.mean())
        out["amplitude_stddev_mv"] = float(amps.std())
    if n >= 2:
        idx = np.array([e.peak_index for e in events], dtype=float)
        isi = np.diff(idx) * sample_interval_s
        out["mean_isi_s"] = float(isi.mean())
        out["isi_stddev_s"] = float(isi.std())
    return SpikeStats(**out)


def pooled_stats(events_by_channel: dict[str, Sequence[SpikeEvent]],
                 sample_interval_s: float = 1.0) -> SpikeStats:
    """Statistics over all channels; ISIs are taken within each channel only."""
    amps, isis = [], []
    for events in events_by_channel.values():
        amps.extend(e.amplitude_mv for e in events)
        idx = [e.peak_index for e in events]
        isis.extend((b - a) * sample_interval_s for a, b in zip(idx, idx[1:]))
    out = {"count": len(amps)}
    if amps:
        out["mean_amplitude_mv"] = float(np.mean(amps))
        out["amplitude_stddev_mv"] = float(np.std(amps))
    if isis:
        out["mean_isi_s"] = float(np.mean(isis))
        out["isi_stddev_s"] = float(np.std(isis))
    return SpikeStats(**out)


def spikes_to_json(events: Sequence[SpikeEvent], **extra) -> list[dict]:
    out = []
    for e in events:
        d = e.to_dict()
        d.update(extra)
        out.append(d)
    return out

