"""Spike synchronisation between channels and wave-packet detection."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .detect import SpikeEvent


@dataclass(frozen=True)
class SpikeMatch:
    time_a_s: float
    time_b_s: float
    interval_s: float
    polarity: str  # "increase" or "decrease"

    def to_dict(self) -> dict:
        return {"t_a": self.time_a_s, "t_b": self.time_b_s,
                "interval_s": self.interval_s, "polarity": self.polarity}


@dataclass(frozen=True)
class WavePacket:
    spike_indices: tuple[int, ...]
    start_s: float
    end_s: float
    amplitudes_mv: tuple[float, ...]
    widths_s: tuple[float, ...]

    @property
    def n_spikes(self) -> int:
        return len(self.spike_indices)

    def to_dict(self) -> dict:
        return {"start_s": self.start_s, "end_s": self.end_s, "n_spikes": self.n_spikes,
                "amplitudes": list(self.amplitudes_mv), "widths": list(self.widths_s)}


def match_spikes(a: Sequence[SpikeEvent], b: Sequence[SpikeEvent],
                 window_s: float) -> list[SpikeMatch]:
    """Greedy one-to-one matching in the time order of ``a``.

    Each spike of ``a`` takes the nearest still-unmatched spike of ``b`` within
    ``window_s`` (the earlier one on ties). Polarity is ``increase`` when both
    peaks lie above their local averages.
    """
    tb = [e.peak_time_s for e in b]
    free = list(range(len(b)))  # sorted indices of unmatched b spikes
    out = []
    for ea in a:
        t = ea.peak_time_s
        lo = bisect.bisect_left(free, t - window_s, key=lambda j: tb[j])
        best = None
        for pos in range(lo, len(free)):
            j = free[pos]
            gap = tb[j] - t
            if gap > window_s:
                break
            if best is None or abs(gap) < best[1]:
                best = (pos, abs(gap))
        if best is None:
            continue
        j = free.pop(best[0])
        eb = b[j]
        pol = "increase" if ea.sign > 0 and eb.sign > 0 else "decrease"
        out.append(SpikeMatch(t, tb[j], abs(tb[j] - t), pol))
    return out


def match_interval_series(matches: Sequence[SpikeMatch]) -> list[float]:
    return [m.interval_s for m in sorted(matches, key=lambda m: m.time_a_s)]


def group_means(series: Sequence[float], group_sizes: Sequence[int]) -> list[float]:
    """Means of consecutive groups of the given sizes."""
    if sum(group_sizes) > len(series):
        raise ValueError("group sizes exceed series length")
    out, pos = [], 0
    for n in group_sizes:
        out.append(float(np.mean(series[pos:pos + n])))
        pos += n
    return out


def detect_wave_packets(events: Sequence[SpikeEvent], packet_isi_s: float | None = None,
                        min_spikes: int = 3) -> list[WavePacket]:
    """Maximal runs of at least ``min_spikes`` spikes whose ISIs are all <= ``packet_isi_s``.

    The default threshold is half the mean ISI of ``events``.
    """
    n = len(events)
    if n == 0:
        return []
    times = [e.peak_time_s for e in events]
    if packet_isi_s is None:
        if n < 2:
            return []
        packet_isi_s = 0.5 * (times[-1] - times[0]) / (n - 1)
    packets = []
    start = 0
    for i in range(1, n + 1):
        if i == n or times[i] - times[i - 1] > packet_isi_s:
            if i - start >= min_spikes:
                members = events[start:i]
                packets.append(WavePacket(
                    spike_indices=tuple(range(start, i)),
                    start_s=members[0].peak_time_s,
                    end_s=members[-1].peak_time_s,
                    amplitudes_mv=tuple(e.amplitude_mv for e in members),
                    widths_s=tuple(e.width_s for e in members),
                ))
            start = i
    return packets


def packet_profile(p: WavePacket) -> tuple[list[float], list[float]]:
    if p.n_spikes == 0:
        raise ValueError("empty packet")
    return list(p.amplitudes_mv), list(p.widths_s)


def spike_rate(events: Sequence[SpikeEvent], n_isi: int = 10) -> list[tuple[float, float]]:
    """Sliding spike rate: ``n_isi`` intervals divided by the time they span.

    Returns ``(centre_time_s, spikes_per_hour)`` pairs.
    """
    t = [e.peak_time_s for e in events]
    out = []
    for k in range(len(t) - n_isi):
        span = t[k + n_isi] - t[k]
        if span > 0:
            out.append(((t[k] + t[k + n_isi]) / 2, 3600.0 * n_isi / span))
    return out

