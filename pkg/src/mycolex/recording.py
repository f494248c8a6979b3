"""Multichannel voltage recordings and their canonical CSV form.

The canonical file is UTF-8, comma separated, ``\\n`` line endings, with a
header ``t,<name1>,...,<nameN>``. Time is in seconds, voltages in mV written
with 6 significant digits.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

# half of the 78 mV logger acquisition range
VOLTAGE_WARN_MV = 39.0


class RecordingError(ValueError):
    """Raised for malformed recording files or invalid recording operations."""


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise RecordingError("channel values must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChannelSeries:
    name: str
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if not np.all(np.isfinite(arr)):
            raise RecordingError(f"channel {self.name!r} has non-finite values")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, ChannelSeries):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True)
class Recording:
    """Equal-length voltage channels sampled every ``sample_interval_s`` seconds.

    ``start_s`` is the time stamp of the first sample; the label is free text and
    does not take part in equality.
    """

    channels: tuple[ChannelSeries, ...] = ()
    sample_interval_s: float = 1.0
    start_s: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        if not self.sample_interval_s > 0:
            raise RecordingError("sample_interval_s must be positive")
        lengths = {len(ch) for ch in self.channels}
        if len(lengths) > 1:
            raise RecordingError(f"channels have unequal lengths {sorted(lengths)}")
        names = [ch.name for ch in self.channels]
        if len(set(names)) != len(names):
            raise RecordingError("duplicate channel names")

    @classmethod
    def from_arrays(cls, data: dict[str, Sequence[float]], sample_interval_s=1.0,
                    start_s=0.0, label="") -> "Recording":
        chans = tuple(ChannelSeries(name, vals) for name, vals in data.items())
        return cls(chans, sample_interval_s, start_s, label)

    @property
    def n_samples(self) -> int:
        return len(self.channels[0]) if self.channels else 0

    @property
    def duration_s(self) -> float:
        return self.n_samples * self.sample_interval_s

    @property
    def channel_names(self) -> list[str]:
        return [ch.name for ch in self.channels]

    def channel(self, name: str) -> ChannelSeries:
        for ch in self.channels:
            if ch.name == name:
                return ch
        raise KeyError(name)

    def times(self) -> np.ndarray:
        return self.start_s + np.arange(self.n_samples) * self.sample_interval_s


def _fmt_time(t: float) -> str:
    return f"{t:.15g}"


def _fmt_value(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def _parse_float(cell: str, lineno: int) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise RecordingError(f"non-numeric cell {cell!r} on line {lineno}") from None
    if not math.isfinite(v):
        raise RecordingError(f"non-finite cell {cell!r} on line {lineno}")
    return v


def load_recording(path, format: str = "csv", sample_interval_s: float | None = None) -> Recording:
    """Read a canonical CSV recording.

    The sample interval is inferred from the time column (its mean step) unless
    given explicitly. Raises ``FileNotFoundError`` for a missing file and
    ``RecordingError`` for malformed content.
    """
    if format != "csv":
        raise RecordingError(f"unsupported format {format!r}")
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RecordingError("missing header row") from None
        if not header or header[0].strip() != "t":
            raise RecordingError("first header column must be 't'")
        names = [h.strip() for h in header[1:]]
        ncol = len(header)
        times: list[float] = []
        cols: list[list[float]] = [[] for _ in names]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != ncol:
                raise RecordingError(
                    f"malformed row on line {lineno}: expected {ncol} columns, got {len(row)}")
            t = _parse_float(row[0], lineno)
            if times and t <= times[-1]:
                raise RecordingError(f"non-increasing time on line {lineno}")
            times.append(t)
            for col, cell in zip(cols, row[1:]):
                col.append(_parse_float(cell, lineno))

    if sample_interval_s is None:
        if len(times) >= 2:
            sample_interval_s = float(f"{(times[-1] - times[0]) / (len(times) - 1):.12g}")
        else:
            sample_interval_s = 1.0
    start = times[0] if times else 0.0
    rec = Recording(
        tuple(ChannelSeries(n, c) for n, c in zip(names, cols)),
        sample_interval_s=sample_interval_s,
        start_s=start,
        label=path.stem,
    )
    _warn_range(rec)
    return rec


def _warn_range(rec: Recording) -> None:
    for ch in rec.channels:
        if len(ch) and np.max(np.abs(ch.values)) > VOLTAGE_WARN_MV:
            warnings.warn(
                f"channel {ch.name!r} exceeds {VOLTAGE_WARN_MV} mV", RuntimeWarning, stacklevel=3)


def save_recording(rec: Recording, path) -> None:
    """Write ``rec`` in the canonical CSV format."""
    path = Path(path)
    lines = [",".join(["t"] + rec.channel_names)]
    times = rec.times()
    columns = [ch.values for ch in rec.channels]
    for i, t in enumerate(times):
        lines.append(",".join([_fmt_time(t)] + [_fmt_value(c[i]) for c in columns]))
    text = "\n".join(lines) + "\n"
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def slice_recording(rec: Recording, start_s: float, end_s: float) -> Recording:
    """Samples whose time offset from the recording start lies in ``[start_s, end_s)``."""
    if not (0 <= start_s < end_s <= rec.duration_s):
        raise RecordingError(
            f"slice bounds [{start_s}, {end_s}) outside [0, {rec.duration_s}]")
    dt = rec.sample_interval_s
    i0 = math.ceil(start_s / dt - 1e-9)
    i1 = math.ceil(end_s / dt - 1e-9)
    chans = tuple(ChannelSeries(ch.name, ch.values[i0:i1]) for ch in rec.channels)
    return Recording(chans, dt, rec.start_s + i0 * dt, rec.label)
