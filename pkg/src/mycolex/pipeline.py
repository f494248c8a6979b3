"""Pipeline configuration and the detect -> tokenize -> machine -> complexity chain."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import complexity as cx
from . import lexicon as lx
from . import machine as mc
from .detect import (DetectorParams, SpikeEvent, detect_spikes, pooled_stats, species_preset,
                     spike_stats)
from .multichannel import detect_wave_packets, match_interval_series, match_spikes, spike_rate
from .recording import Recording


class ConfigError(ValueError):
    """Invalid or inconsistent pipeline configuration."""


class InvariantError(RuntimeError):
    """An internal consistency check failed."""


@dataclass(frozen=True)
class PipelineConfig:
    input: Path | None = None
    species: str | None = None
    params: DetectorParams | None = None
    theta_multipliers: tuple[int, ...] = (1,)
    cap: int | None = None
    ctm_table: Path | None = None
    output: Path | None = None
    max_state: int | None = None
    core_mass: float = 0.8
    sync_window_s: float = 300.0
    rate_window: int = 10
    pooled: bool = True
    jobs: int | None = None

    def __post_init__(self):
        if self.species is not None and self.params is not None:
            raise ConfigError("give either a species preset or explicit w/delta/d, not both")
        if self.species is None and self.params is None:
            raise ConfigError("a species preset or explicit w/delta/d is required")
        if self.species is not None:
            try:
                species_preset(self.species)
            except ValueError as e:
                raise ConfigError(str(e)) from None
        for m in self.theta_multipliers:
            if m not in (1, 2):
                raise ConfigError(f"theta multiplier must be 1 or 2, got {m}")
        if self.cap is not None and self.cap < 1:
            raise ConfigError("cap must be >= 1")

    @property
    def detector(self) -> DetectorParams:
        return self.params if self.params is not None else species_preset(self.species)


def params_from_flags(species: str | None, w, delta, d) -> tuple[str | None, DetectorParams | None]:
    explicit = [v is not None for v in (w, delta, d)]
    if any(explicit) and species is not None:
        raise ConfigError("--species cannot be combined with --w/--delta/--d")
    if any(explicit) and not all(explicit):
        raise ConfigError("--w, --delta and --d must be given together")
    if all(explicit):
        try:
            return None, DetectorParams(w, delta, d)
        except ValueError as e:
            raise ConfigError(str(e)) from None
    return species, None


def detect_recording(rec: Recording, params: DetectorParams,
                     jobs: int | None = None) -> dict[str, list[SpikeEvent]]:
    """Detect spikes on every channel, channels in parallel; order follows the recording."""
    def run(ch):
        return detect_spikes(ch.values, params, ch.name, rec.sample_interval_s, rec.start_s)

    jobs = jobs or min(len(rec.channels), os.cpu_count() or 1) or 1
    if jobs == 1 or len(rec.channels) <= 1:
        results = [run(ch) for ch in rec.channels]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, rec.channels))
    return {ch.name: ev for ch, ev in zip(rec.channels, results)}


def check_detection(by_channel: dict[str, list[SpikeEvent]], params: DetectorParams) -> None:
    for name, ev in by_channel.items():
        idx = [e.peak_index for e in ev]
        for a, b in zip(idx, idx[1:]):
            if b - a <= params.d:
                raise InvariantError(f"channel {name}: peaks {a} and {b} are within d={params.d}")


def check_sentences(sentences: Sequence[lx.Sentence],
                    by_channel: dict[str, list[SpikeEvent]]) -> None:
    for s in sentences:
        if s.spike_count != len(by_channel.get(s.channel, [])):
            raise InvariantError(f"channel {s.channel}: words do not cover every spike")


def split_by_channel(events: Sequence[SpikeEvent]) -> dict[str, list[SpikeEvent]]:
    out: dict[str, list[SpikeEvent]] = {}
    for e in events:
        out.setdefault(e.channel, []).append(e)
    for v in out.values():
        v.sort(key=lambda e: e.peak_time_s)
    return out


def stats_section(by_channel: dict[str, list[SpikeEvent]], dt: float) -> dict:
    return {
        "channels": {name: spike_stats(ev, dt).to_dict() for name, ev in by_channel.items()},
        "pooled": pooled_stats(by_channel, dt).to_dict(),
    }


def _guard(stage: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (ValueError, RuntimeError) as e:
        return {"error": f"{stage}: {e}"}


def tokenize(by_channel: dict[str, list[SpikeEvent]], multiplier: int, dt: float = 1.0,
             pooled: bool = True, theta_s: float | None = None) -> list[lx.Sentence]:
    """One sentence per channel.

    In pooled mode every channel uses the threshold derived from the pooled mean
    ISI; otherwise each channel uses its own.
    """
    if theta_s is None and pooled:
        theta_s = lx.theta_for(pooled_stats(by_channel, dt), multiplier)
    out = []
    for name, ev in by_channel.items():
        th = theta_s if theta_s is not None else lx.theta_for(spike_stats(ev, dt), multiplier)
        out.append(lx.group_words(ev, th, channel=name))
    return out


def lexicon_section(sentences: Sequence[lx.Sentence]) -> dict:
    words = lx.pool_sentences(sentences)
    dist = lx.word_length_distribution(words)
    return {
        "n_words": len(words),
        "mean_word_length": lx.mean_word_length(words) if words else None,
        "distribution": dist.to_dict(),
        "fit": _guard("lexicon", lambda: lx.fit_power_law(dist).to_dict()),
    }


def machine_section(sentences: Sequence[lx.Sentence], max_state=None, mass=0.8) -> dict:
    def run():
        g = mc.build_machine(sentences, max_state=max_state)
        return mc.analyze(g, mass).to_dict()
    return _guard("machine", run)


def complexity_section(sentences: Sequence[lx.Sentence], cap=None, table=None) -> dict:
    def run():
        seq = cx.SymbolSequence(tuple(lx.pool_sentences(sentences)))
        if cap is not None:
            seq = cx.cap_alphabet(seq, cap)
        return cx.complexity_report(seq, table).to_dict()
    return _guard("complexity", run)


def sync_section(a: list[SpikeEvent], b: list[SpikeEvent], window_s: float) -> dict:
    matches = match_spikes(a, b, window_s)
    return {
        "window_s": window_s,
        "matches": [m.to_dict() for m in matches],
        "intervals": match_interval_series(matches),
    }


def run_report(rec: Recording, cfg: PipelineConfig) -> dict:
    """Full analysis of one recording as a JSON-ready dict."""
    params = cfg.detector
    dt = rec.sample_interval_s
    by_channel = detect_recording(rec, params, cfg.jobs)
    check_detection(by_channel, params)
    table = cx.load_ctm_table(cfg.ctm_table) if cfg.ctm_table else None

    report = {
        "input": Path(cfg.input).name if cfg.input else rec.label,
        "species": cfg.species,
        "params": {"w": params.w, "delta": params.delta, "d": params.d},
        "sample_interval_s": dt,
        "n_samples": rec.n_samples,
        "stats": stats_section(by_channel, dt),
        "spikes": {name: [e.to_dict() for e in ev] for name, ev in by_channel.items()},
        "theta": [],
    }
    for m in cfg.theta_multipliers:
        sec: dict = {"multiplier": m}
        try:
            sentences = tokenize(by_channel, m, dt, pooled=cfg.pooled)
        except ValueError as e:
            sec["error"] = f"lexicon: {e}"
            report["theta"].append(sec)
            continue
        check_sentences(sentences, by_channel)
        sec["theta_s"] = {s.channel: s.theta_s for s in sentences}
        sec["sentences"] = [s.to_dict() for s in sentences]
        sec["per_channel"] = {
            s.channel: {
                **lexicon_section([s]),
                "machine": machine_section([s], cfg.max_state, cfg.core_mass),
                "complexity": complexity_section([s], cfg.cap, table),
            }
            for s in sentences
        }
        sec["pooled"] = {
            **lexicon_section(sentences),
            "machine": machine_section(sentences, cfg.max_state, cfg.core_mass),
            "complexity": complexity_section(sentences, cfg.cap, table),
        }
        report["theta"].append(sec)

    names = list(by_channel)
    report["sync"] = [
        {"a": x, "b": y, **sync_section(by_channel[x], by_channel[y], cfg.sync_window_s)}
        for x, y in zip(names, names[1:])
    ]
    report["packets"] = {
        name: [p.to_dict() for p in detect_wave_packets(ev)] for name, ev in by_channel.items()
    }
    report["rate"] = {
        name: [list(r) for r in spike_rate(ev, cfg.rate_window)] for name, ev in by_channel.items()
    }
    return report
