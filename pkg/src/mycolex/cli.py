"""Command-line entry point: ``mycolex <command>``.

Exit codes: 0 success, 1 I/O error, 2 invalid configuration, 3 internal
invariant violation.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import complexity as cx
from . import lexicon as lx
from . import machine as mc
from . import pipeline as pl
from .barcode import barcode_svg
from .detect import SPECIES_PRESETS, SpikeEvent
from .multichannel import detect_wave_packets, spike_rate
from .recording import RecordingError, load_recording, save_recording
from .synth import generate_burst, generate_recording, species_profile, truth_to_json

EXIT_IO, EXIT_CONFIG, EXIT_INVARIANT = 1, 2, 3
SPECIES = click.Choice(sorted(SPECIES_PRESETS))


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        _fail(EXIT_IO, f"cannot read {path}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        _fail(EXIT_IO, f"malformed JSON in {path}: {e}")


def _load(path):
    try:
        return load_recording(path)
    except OSError as e:
        _fail(EXIT_IO, f"cannot read {path}: {e.strerror or e}")
    except RecordingError as e:
        _fail(EXIT_IO, f"{path}: {e}")


def _config(**kw) -> pl.PipelineConfig:
    try:
        species, params = pl.params_from_flags(kw.pop("species"), kw.pop("w"),
                                               kw.pop("delta"), kw.pop("d"))
        return pl.PipelineConfig(species=species, params=params, **kw)
    except pl.ConfigError as e:
        _fail(EXIT_CONFIG, str(e))


def _multipliers(value: str) -> tuple[int, ...]:
    return (1, 2) if value == "both" else (int(value),)


def detector_options(f):
    f = click.option("--d", "d", type=int, default=None, help="Minimum peak separation, samples.")(f)
    f = click.option("--delta", type=float, default=None, help="Prominence threshold, mV.")(f)
    f = click.option("--w", "w", type=int, default=None, help="Neighbourhood half-scale, samples.")(f)
    f = click.option("--species", type=SPECIES, default=None, help="Species parameter preset.")(f)
    return f


def _spikes_from_json(path) -> list[SpikeEvent]:
    data = _read_json(path)
    try:
        return [SpikeEvent.from_dict(o) for o in data]
    except (TypeError, KeyError, ValueError) as e:
        _fail(EXIT_IO, f"malformed spike list in {path}: {e}")


def _sentences_from_json(path, multiplier: int | None) -> list[lx.Sentence]:
    data = _read_json(path)
    try:
        if isinstance(data, dict) and "sections" in data:
            sections = data["sections"]
            if multiplier is not None:
                sections = [s for s in sections if s["multiplier"] == multiplier]
                if not sections:
                    _fail(EXIT_CONFIG, f"no theta multiplier {multiplier} section in {path}")
            data = sections[0]["sentences"]
        return [lx.Sentence.from_dict(o) for o in data]
    except (TypeError, KeyError, ValueError) as e:
        _fail(EXIT_IO, f"malformed sentence file {path}: {e}")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Spike detection, spike-train language and complexity analysis."""


@main.command()
@click.argument("input", type=click.Path(path_type=Path))
@detector_options
@click.option("-o", "--out", "out", type=click.Path(path_type=Path), default=Path("."),
              help="Output directory.")
@click.option("--jobs", type=int, default=None, help="Channels processed in parallel.")
def detect(input, species, w, delta, d, out, jobs):
    """Detect spikes; writes spikes.json and stats.json."""
    cfg = _config(species=species, w=w, delta=delta, d=d, input=input, jobs=jobs)
    rec = _load(input)
    by_channel = pl.detect_recording(rec, cfg.detector, jobs)
    try:
        pl.check_detection(by_channel, cfg.detector)
    except pl.InvariantError as e:
        _fail(EXIT_INVARIANT, str(e))
    spikes = [e.to_dict() for ev in by_channel.values() for e in ev]
    try:
        _write_json(out / "spikes.json", spikes)
        _write_json(out / "stats.json", pl.stats_section(by_channel, rec.sample_interval_s))
    except OSError as e:
        _fail(EXIT_IO, f"cannot write to {out}: {e.strerror or e}")
    click.echo(f"{len(spikes)} spikes on {len(by_channel)} channel(s) -> {out}")


@main.command()
@click.argument("spikes", type=click.Path(path_type=Path))
@click.option("--theta-multiplier", type=click.Choice(["1", "2", "both"]), default="1")
@click.option("--theta-s", type=float, default=None, help="Explicit word separation threshold, s.")
@click.option("--mode", type=click.Choice(["pooled", "per-channel"]), default="pooled",
              help="Derive theta from the pooled or the per-channel mean ISI.")
@click.option("-o", "--out", "out", type=click.Path(path_type=Path), default=Path("."))
def tokenize(spikes, theta_multiplier, theta_s, mode, out):
    """Group spikes into words; writes sentences.json."""
    by_channel = pl.split_by_channel(_spikes_from_json(spikes))
    sections = []
    for m in _multipliers(theta_multiplier):
        try:
            sentences = pl.tokenize(by_channel, m, pooled=(mode == "pooled"),
                                    theta_s=None if theta_s is None else m * theta_s)
        except ValueError as e:
            _fail(EXIT_CONFIG, f"lexicon: {e}")
        sections.append({
            "multiplier": m,
            "sentences": [s.to_dict() for s in sentences],
            "per_channel": {s.channel: lx.word_length_distribution(s).to_dict() for s in sentences},
            **pl.lexicon_section(sentences),
        })
    try:
        _write_json(out / "sentences.json", {"mode": mode, "sections": sections})
    except OSError as e:
        _fail(EXIT_IO, f"cannot write to {out}: {e.strerror or e}")


@main.command()
@click.argument("sentences", type=click.Path(path_type=Path))
@click.option("--theta-multiplier", type=click.Choice(["1", "2"]), default=None)
@click.option("--max-state", type=int, default=None, help="Drop words longer than this.")
@click.option("--mass", type=float, default=0.8, help="Stationary mass of the attractive core.")
@click.option("-o", "--out", "out", type=click.Path(path_type=Path), default=Path("."))
def machine(sentences, theta_multiplier, max_state, mass, out):
    """Build and analyse the spiking machine; writes machine.json and DOT graphs."""
    sents = _sentences_from_json(sentences, None if theta_multiplier is None else int(theta_multiplier))
    try:
        g = mc.build_machine(sents, max_state=max_state)
        rep = mc.analyze(g, mass)
    except ValueError as e:
        _fail(EXIT_CONFIG, f"machine: {e}")
    try:
        _write_json(out / "machine.json", rep.to_dict())
        (out / "machine.dot").write_text(mc.to_dot(g, "machine"), encoding="utf-8")
        (out / "machine_filtered.dot").write_text(mc.to_dot(mc.filter_graph(g), "filtered"),
                                                  encoding="utf-8")
    except OSError as e:
        _fail(EXIT_IO, f"cannot write to {out}: {e.strerror or e}")


@main.command()
@click.argument("sentences", type=click.Path(path_type=Path))
@click.option("--theta-multiplier", type=click.Choice(["1", "2"]), default=None)
@click.option("--cap", type=int, default=None, help="Remove symbols above this value.")
@click.option("--ctm-table", type=click.Path(path_type=Path), default=None,
              help="CTM table TSV for BDM.")
@click.option("-o", "--out", "out", type=click.Path(path_type=Path), default=Path("."))
def complexity(sentences, theta_multiplier, cap, ctm_table, out):
    """Entropy, LZ and BDM complexity of the pooled word sequence; writes complexity.json."""
    sents = _sentences_from_json(sentences, None if theta_multiplier is None else int(theta_multiplier))
    table = None
    if ctm_table is not None:
        try:
            table = cx.load_ctm_table(ctm_table)
        except OSError as e:
            _fail(EXIT_IO, f"cannot read {ctm_table}: {e.strerror or e}")
        except ValueError as e:
            _fail(EXIT_CONFIG, f"{ctm_table}: {e}")
    res = pl.complexity_section(sents, cap, table)
    if "error" in res:
        _fail(EXIT_CONFIG, res["error"])
    try:
        _write_json(out / "complexity.json", res)
    except OSError as e:
        _fail(EXIT_IO, f"cannot write to {out}: {e.strerror or e}")


@main.command()
@click.argument("input", type=click.Path(path_type=Path))
@click.option("--a", "chan_a", required=True, help="First channel name.")
@click.option("--b", "chan_b", required=True, help="Second channel name.")
@click.option("--window-s", type=float, default=300.0, help="Matching window, s.")
@click.option("--packet-isi-s", type=float, default=None,
              help="Wave-packet ISI threshold, s (default half the channel mean ISI).")
@click.option("--min-spikes", type=int, default=3)
@click.option("--rate-window", type=int, default=10, help="ISIs per spike-rate estimate.")
@detector_options
@click.option("-o", "--out", "out", type=click.Path(path_type=Path), default=Path("."))
def sync(input, chan_a, chan_b, window_s, packet_isi_s, min_spikes, rate_window,
         species, w, delta, d, out):
    """Cross-channel spike matching and wave packets; writes sync.json."""
    cfg = _config(species=species, w=w, delta=delta, d=d, input=input)
    rec = _load(input)
    for c in (chan_a, chan_b):
        if c not in rec.channel_names:
            _fail(EXIT_CONFIG, f"no channel {c!r} in {input}")
    by_channel = pl.detect_recording(rec, cfg.detector)
    a, b = by_channel[chan_a], by_channel[chan_b]
    res = {
        "a": chan_a,
        "b": chan_b,
        **pl.sync_section(a, b, window_s),
        "packets": {c: [p.to_dict() for p in detect_wave_packets(by_channel[c], packet_isi_s,
                                                                    min_spikes)]
                    for c in (chan_a, chan_b)},
        "rate": {c: [list(r) for r in spike_rate(by_channel[c], rate_window)]
                 for c in (chan_a, chan_b)},
    }
    try:
        _write_json(out / "sync.json", res)
    except OSError as e:
        _fail(EXIT_IO, f"cannot write to {out}: {e.strerror or e}")


@main.command()
@click.argument("spikes", type=click.Path(path_type=Path))
@click.option("-o", "--out", "out", type=click.Path(path_type=Path), default=Path("barcode.svg"))
@click.option("--duration-s", type=float, default=None,
              help="Time mapped to the right edge (default: last spike).")
def barcode(spikes, out, duration_s):
    """Bar-code SVG with one bar per spike."""
    events = _spikes_from_json(spikes)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(barcode_svg(events, duration_s), encoding="utf-8")
    except OSError as e:
        _fail(EXIT_IO, f"cannot write {out}: {e.strerror or e}")


@main.command()
@click.option("--species", type=SPECIES, required=True)
@click.option("--seed", type=int, default=0, help="Overridden by MYCOLEX_SEED.")
@click.option("--channels", type=int, default=1)
@click.option("--spike-count", type=int, default=None, help="Override the profile spike count.")
@click.option("--pulse-width-s", type=float, default=20.0)
@click.option("--noise-mv", type=float, default=0.0)
@click.option("--burst-spikes", type=int, default=None, help="Embed one dense packet.")
@click.option("--burst-isi-s", type=float, default=1200.0)
@click.option("--burst-amplitude-mv", type=float, default=None)
@click.option("-o", "--out", "out", type=click.Path(path_type=Path), default=Path("."))
def synth(species, seed, channels, spike_count, pulse_width_s, noise_mv, burst_spikes,
          burst_isi_s, burst_amplitude_mv, out):
    """Synthetic recording; writes recording.csv and truth.json."""
    env = os.environ.get("MYCOLEX_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            _fail(EXIT_CONFIG, f"MYCOLEX_SEED must be an integer, got {env!r}")
    prof = species_profile(species)
    if spike_count is not None:
        prof = replace(prof, spike_count=spike_count)
    if burst_spikes is not None:
        try:
            rec, truth = generate_burst(prof, burst_spikes, burst_isi_s, seed,
                                        burst_amplitude_mv=burst_amplitude_mv,
                                        pulse_width_s=pulse_width_s, noise_mv=noise_mv)
        except ValueError as e:
            _fail(EXIT_CONFIG, str(e))
    else:
        rec, truth = generate_recording(prof, seed, pulse_width_s=pulse_width_s,
                                        n_channels=channels, noise_mv=noise_mv)
    try:
        out.mkdir(parents=True, exist_ok=True)
        save_recording(rec, out / "recording.csv")
        _write_json(out / "truth.json", truth_to_json(truth))
    except OSError as e:
        _fail(EXIT_IO, f"cannot write to {out}: {e.strerror or e}")
    click.echo(f"seed {seed}: {len(truth)} planted spikes, {rec.n_samples} samples -> {out}")


@main.command()
@click.argument("input", type=click.Path(path_type=Path))
@detector_options
@click.option("--theta-multiplier", type=click.Choice(["1", "2", "both"]), default="both")
@click.option("--cap", type=int, default=None)
@click.option("--ctm-table", type=click.Path(path_type=Path), default=None)
@click.option("--max-state", type=int, default=None)
@click.option("--mode", type=click.Choice(["pooled", "per-channel"]), default="pooled")
@click.option("--window-s", type=float, default=300.0, help="Cross-channel matching window, s.")
@click.option("--rate-window", type=int, default=10)
@click.option("-o", "--out", "out", type=click.Path(path_type=Path), default=Path("report.json"))
def report(input, species, w, delta, d, theta_multiplier, cap, ctm_table, max_state, mode,
           window_s, rate_window, out):
    """Run the whole pipeline and write one JSON report."""
    cfg = _config(species=species, w=w, delta=delta, d=d, input=input,
                  theta_multipliers=_multipliers(theta_multiplier), cap=cap,
                  ctm_table=ctm_table, max_state=max_state, pooled=(mode == "pooled"),
                  sync_window_s=window_s, rate_window=rate_window, output=out)
    rec = _load(input)
    try:
        res = pl.run_report(rec, cfg)
    except pl.InvariantError as e:
        _fail(EXIT_INVARIANT, str(e))
    except OSError as e:
        _fail(EXIT_IO, f"{e.filename}: {e.strerror or e}")
    except ValueError as e:
        _fail(EXIT_CONFIG, str(e))
    try:
        _write_json(out, res)
    except OSError as e:
        _fail(EXIT_IO, f"cannot write {out}: {e.strerror or e}")


if __name__ == "__main__":
    main()
