"""Spike trains as words and sentences.

Spikes are grouped into a word while the gap between consecutive spikes is at
most ``theta`` seconds; a sentence is the ordered list of word lengths of one
channel.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .detect import SpikeEvent, SpikeStats

# coefficient and |exponent| ranges reported for word-length frequency fits
REFERENCE_COEFFICIENT_RANGE = (20.0, 26.0)
REFERENCE_EXPONENT_RANGE = (0.6, 0.8)


@dataclass(frozen=True)
class BinarySpikeString:
    bits: np.ndarray

    @property
    def length(self) -> int:
        return len(self.bits)

    def ones(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


@dataclass(frozen=True)
class Sentence:
    word_lengths: tuple[int, ...]
    theta_s: float
    channel: str = ""

    def __post_init__(self):
        object.__setattr__(self, "word_lengths", tuple(int(l) for l in self.word_lengths))
        if any(l < 1 for l in self.word_lengths):
            raise ValueError("word lengths must be >= 1")

    def __len__(self):
        return len(self.word_lengths)

    @property
    def spike_count(self) -> int:
        return sum(self.word_lengths)

    def to_dict(self) -> dict:
        return {"channel": self.channel, "theta_s": self.theta_s,
                "word_lengths": list(self.word_lengths)}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "Sentence":
        return cls(tuple(obj["word_lengths"]), float(obj["theta_s"]), str(obj.get("channel", "")))


@dataclass(frozen=True)
class WordLengthDistribution:
    counts: dict[int, float] = field(default_factory=dict)

    @property
    def total_words(self) -> float:
        return sum(self.counts.values())

    def to_dict(self) -> dict[str, float]:
        return {str(k): self.counts[k] for k in sorted(self.counts)}


class PowerLawFit(NamedTuple):
    coefficient: float
    exponent: float
    rms_residual: float

    @property
    def in_reference_range(self) -> bool:
        lo, hi = REFERENCE_COEFFICIENT_RANGE
        elo, ehi = REFERENCE_EXPONENT_RANGE
        return lo <= self.coefficient <= hi and elo <= abs(self.exponent) <= ehi

    def to_dict(self) -> dict:
        return {"coefficient": self.coefficient, "exponent": self.exponent,
                "rms_residual": self.rms_residual, "paper_range": self.in_reference_range}


def to_binary_string(events: Sequence[SpikeEvent] | Iterable[int], n_samples: int) -> BinarySpikeString:
    """Bit ``i`` is 1 iff a spike peaks at sample ``i``.

    ``events`` may be spike events or bare peak indices.
    """
    bits = np.zeros(int(n_samples), dtype=np.uint8)
    for e in events:
        i = e.peak_index if isinstance(e, SpikeEvent) else int(e)
        if not 0 <= i < n_samples:
            raise ValueError(f"peak index {i} out of range [0, {n_samples})")
        bits[i] = 1
    return BinarySpikeString(bits)


def _times(events) -> list[float]:
    return [e.peak_time_s if isinstance(e, SpikeEvent) else float(e) for e in events]


def group_words(events: Sequence[SpikeEvent] | Sequence[float], theta_s: float,
                channel: str | None = None) -> Sentence:
    """Split a time-sorted spike list into words.

    Consecutive spikes whose gap is at most ``theta_s`` share a word. ``events``
    may be spike events or bare peak times in seconds.
    """
    if not theta_s > 0:
        raise ValueError("theta_s must be positive")
    times = _times(events)
    if channel is None:
        channel = events[0].channel if events and isinstance(events[0], SpikeEvent) else ""
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("events are not sorted by time")
    words = []
    run = 0
    prev = None
    for t in times:
        if prev is not None and t - prev > theta_s:
            words.append(run)
            run = 0
        run += 1
        prev = t
    if run:
        words.append(run)
    return Sentence(tuple(words), float(theta_s), channel)


def theta_for(stats: SpikeStats | float, multiplier: float = 1) -> float:
    """Word separation threshold: ``multiplier`` times the mean inter-spike interval."""
    mean = stats.mean_isi_s if isinstance(stats, SpikeStats) else stats
    if mean is None:
        raise ValueError("mean inter-spike interval is not available (fewer than 2 spikes)")
    return multiplier * mean


def word_length_distribution(sentence: Sentence | Sequence[int]) -> WordLengthDistribution:
    lengths = sentence.word_lengths if isinstance(sentence, Sentence) else sentence
    c = Counter(int(l) for l in lengths)
    return WordLengthDistribution({k: c[k] for k in sorted(c)})


def pool_sentences(sentences: Iterable[Sentence]) -> list[int]:
    out: list[int] = []
    for s in sentences:
        out.extend(s.word_lengths)
    return out


def mean_word_length(sentence: Sentence | Sequence[int]) -> float:
    lengths = sentence.word_lengths if isinstance(sentence, Sentence) else tuple(sentence)
    if not lengths:
        raise ValueError("empty sentence has no mean word length")
    return sum(lengths) / len(lengths)


def fit_power_law(dist: WordLengthDistribution | Mapping[int, float]) -> PowerLawFit:
    """Fit ``count ~ A * l**c`` by least squares on ``log(count)`` vs ``log(l)``.

    Lengths with zero count are skipped. ``rms_residual`` is in log space.
    """
    counts = dist.counts if isinstance(dist, WordLengthDistribution) else dict(dist)
    pts = sorted((l, c) for l, c in counts.items() if c > 0)
    if len(pts) < 2:
        raise ValueError("power-law fit needs at least 2 distinct word lengths")
    lx = np.log(np.array([p[0] for p in pts], dtype=float))
    ly = np.log(np.array([p[1] for p in pts], dtype=float))
    design = np.column_stack([np.ones_like(lx), lx])
    (intercept, slope), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (intercept + slope * lx)
    return PowerLawFit(float(np.exp(intercept)), float(slope), float(np.sqrt(np.mean(resid ** 2))))
